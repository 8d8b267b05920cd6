"""Group knowledge metrics over knows-level species g0..g4.

Complexity is the Shannon entropy (natural log) of the species
distribution, disparity is Rao's quadratic entropy with distance
``d(i, j) = |i - j|``, and heterogeneity is their product.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

LEVELS = 5
COLOR_SCORE = 0.25


class EmptyPopulationError(ValueError):
    pass


@dataclass(frozen=True)
class SpeciesCensus:
    counts: tuple[int, ...]

    @classmethod
    def from_levels(cls, levels: Iterable[int], n_levels: int = LEVELS) -> SpeciesCensus:
        c = Counter(levels)
        bad = [lv for lv in c if not 0 <= lv < n_levels]
        if bad:
            raise ValueError(f"knows-levels out of range: {sorted(bad)}")
        return cls(tuple(c.get(i, 0) for i in range(n_levels)))

    @property
    def total(self) -> int:
        return sum(self.counts)

    def proportions(self) -> list[float]:
        total = self.total
        if total == 0:
            raise EmptyPopulationError("census of an empty population")
        return [c / total for c in self.counts]


def level_distance(n_levels: int = LEVELS) -> list[list[float]]:
    return [[float(abs(i - j)) for j in range(n_levels)] for i in range(n_levels)]


def complexity(census: SpeciesCensus) -> float:
    h = sum(p * math.log(p) for p in census.proportions() if p > 0)
    # a single occupied species gives 0.0, not -0.0
    return -h if h else 0.0


def disparity(census: SpeciesCensus, dm: Sequence[Sequence[float]] | None = None) -> float:
    p = census.proportions()
    if dm is None:
        dm = level_distance(len(p))
    total = 0.0
    for i, pi in enumerate(p):
        if pi == 0:
            continue
        for j, pj in enumerate(p):
            if pj:
                total += pi * pj * dm[i][j] ** 2
    return total


def heterogeneity(census: SpeciesCensus, dm: Sequence[Sequence[float]] | None = None) -> float:
    return complexity(census) * disparity(census, dm)


def mean_knowledge_score(colors_known: Iterable[int]) -> float:
    """Mean over robots of 0.25 per target color the robot can handle."""
    known = list(colors_known)
    if not known:
        raise EmptyPopulationError("no robots")
    return sum(COLOR_SCORE * k for k in known) / len(known)

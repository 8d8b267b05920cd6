"""Seeded trials: configuration, placement, sampling and CSV output."""
from __future__ import annotations

import io
import math
import random
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from ..comms import CommStats
from ..metrics import LEVELS, SpeciesCensus, complexity, disparity, mean_knowledge_score
from ..stringbt import serialize_sequence
from .world import COLORS, ROBOT_TYPES, Arena, ConfigurationError, World, robot_rng

CSV_COLUMNS = (
    "tick", "collected_pct",
    "knows0", "knows1", "knows2", "knows3", "knows4",
    "complexity", "disparity", "heterogeneity", "knowledge_score",
    "queries_sent", "queries_lost", "responses_sent",
)

# robots per unit area: 40 robots in a 1000 x 1000 arena
DENSITY_CAP = 40 / 1_000_000
PLACEMENT_RETRIES = 10_000


class Mode(Enum):
    NO_TRANSFER = "nt"
    KT_BT = "ktbt"

    @classmethod
    def parse(cls, text: str) -> Mode:
        key = text.strip().lower().replace("-", "").replace("_", "")
        if key in ("nt", "notransfer"):
            return cls.NO_TRANSFER
        if key in ("ktbt", "kt"):
            return cls.KT_BT
        raise ValueError(f"unknown mode {text!r}")


@dataclass(frozen=True)
class SimConfig:
    composition: tuple[int, int, int, int, int, int]
    targets: tuple[int, int, int, int]
    iterations: int
    trials: int = 1
    mode: Mode = Mode.KT_BT
    d_coms: float = 200.0
    obstacles: bool = False
    seed: int = 0
    arena: tuple[float, float] = (1000.0, 1000.0)
    speed: float = 1.0
    d_t: float = 30.0
    d_c: float = 10.0
    t1_limit: int = 50
    t2_limit: int = 100
    pickup_radius: float = 2.0
    walk_duration: int = 60
    sample_every: int = 100

    def __post_init__(self):
        if len(self.composition) != len(ROBOT_TYPES):
            raise ConfigurationError("composition requires 6 values")
        if len(self.targets) != len(COLORS):
            raise ConfigurationError("targets requires 4 values")
        if any(c < 0 for c in self.composition) or any(t < 0 for t in self.targets):
            raise ConfigurationError("counts must be non-negative")
        if self.iterations < 0 or self.trials < 1:
            raise ConfigurationError("iterations must be >= 0 and trials >= 1")
        if self.t1_limit < 0 or self.t2_limit < 0 or self.sample_every < 1:
            raise ConfigurationError("timer limits and sampling interval must be positive")
        if self.speed <= 0 or self.d_t < 0 or self.d_c < 0 or self.d_coms < 0:
            raise ConfigurationError("speed and ranges must be positive")
        w, h = self.arena
        cap = DENSITY_CAP * w * h
        if self.n_robots > cap + 1e-9:
            raise ConfigurationError(
                f"{self.n_robots} robots exceed the density cap of {math.floor(cap + 1e-9)} for a {w:g}x{h:g} arena"
            )

    @property
    def n_robots(self) -> int:
        return sum(self.composition)

    @property
    def n_targets(self) -> int:
        return sum(self.targets)

    def robot_labels(self) -> list[str]:
        return [label for label, n in zip(ROBOT_TYPES, self.composition) for _ in range(n)]

    def with_(self, **changes) -> SimConfig:
        return replace(self, **changes)


def _stream(seed: int, trial: int, purpose: int) -> random.Random:
    state = np.random.SeedSequence([seed, trial, purpose]).generate_state(2)
    return random.Random(int(state[0]) << 32 | int(state[1]))


def _free_point(arena: Arena, rng: random.Random) -> tuple[float, float]:
    for _ in range(PLACEMENT_RETRIES):
        x = rng.uniform(0.0, arena.width)
        y = rng.uniform(0.0, arena.height)
        if arena.free_for_placement(x, y):
            return x, y
    raise ConfigurationError("could not find a free placement point")


def build_world(config: SimConfig, trial_index: int = 0) -> World:
    """World for one trial with targets and robots placed from seeded streams.

    Target and robot placement use separate streams, so configurations that
    differ only in robot types or mode share positions for the same trial.
    """
    arena = Arena.standard(*config.arena, obstacles=config.obstacles)
    world = World(
        arena, d_coms=config.d_coms, d_t=config.d_t, d_c=config.d_c,
        pickup_radius=config.pickup_radius, walk_duration=config.walk_duration,
        transfer=config.mode is Mode.KT_BT,
        t1_limit=config.t1_limit, t2_limit=config.t2_limit,
    )
    trng = _stream(config.seed, trial_index, 1)
    for color, n in zip(COLORS, config.targets):
        for _ in range(n):
            world.add_target(color, *_free_point(arena, trng))
    prng = _stream(config.seed, trial_index, 2)
    for rid, label in enumerate(config.robot_labels()):
        x, y = _free_point(arena, prng)
        world.add_robot(label, x, y, robot_rng(config.seed, trial_index, rid), speed=config.speed)
    return world


@dataclass
class TrialResult:
    config: SimConfig
    trial_index: int
    rows: list[tuple] = field(default_factory=list)
    iterations_to_99: int | None = None
    ticks_run: int = 0
    final_colors_known: list[int] = field(default_factory=list)
    final_kb: list[list[str]] = field(default_factory=list)
    stats: CommStats = field(default_factory=CommStats)

    @property
    def final_row(self) -> dict:
        return dict(zip(CSV_COLUMNS, self.rows[-1]))

    def column(self, name: str) -> list:
        i = CSV_COLUMNS.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.rows:
            out.write(",".join(repr(v) for v in row) + "\n")
        return out.getvalue()


def sample_row(world: World) -> tuple:
    known = [r.colors_known() for r in world.robots]
    if known:
        census = SpeciesCensus.from_levels(known, LEVELS)
        comp = complexity(census)
        disp = disparity(census)
        score = mean_knowledge_score(known)
    else:
        census = SpeciesCensus((0,) * LEVELS)
        comp = disp = score = 0.0
    stats = world.medium.stats
    pct = 100.0 * world.collected / world.n_targets if world.n_targets else 100.0
    return (
        world.tick, pct, *census.counts,
        comp, disp, comp * disp, score,
        stats.queries_sent, stats.queries_lost, stats.responses_sent,
    )


def run_world(world: World, iterations: int, sample_every: int = 100) -> tuple[list[tuple], int | None]:
    """Step ``world`` until everything is collected or ``iterations`` ticks pass."""
    rows = [sample_row(world)]
    n_t = world.n_targets
    need = math.ceil(0.99 * n_t)
    reached = 0 if need == 0 else None
    while world.tick < iterations and world.collected < n_t:
        world.step()
        if reached is None and world.collected >= need:
            reached = world.tick
        if world.tick % sample_every == 0:
            rows.append(sample_row(world))
    if rows[-1][0] != world.tick:
        rows.append(sample_row(world))
    return rows, reached


def run_trial(config: SimConfig, trial_index: int = 0) -> TrialResult:
    world = build_world(config, trial_index)
    rows, reached = run_world(world, config.iterations, config.sample_every)
    return TrialResult(
        config=config,
        trial_index=trial_index,
        rows=rows,
        iterations_to_99=reached,
        ticks_run=world.tick,
        final_colors_known=[r.colors_known() for r in world.robots],
        final_kb=[[serialize_sequence(s) for s in r.agent.kb.known_states] for r in world.robots],
        stats=replace(world.medium.stats),
    )

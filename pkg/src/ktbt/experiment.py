"""Run study variants over seeded trials and write CSV reports."""
from __future__ import annotations

import math
import os
import re
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .config import ExperimentSpec
from .sar.trial import CSV_COLUMNS, Mode, SimConfig, TrialResult, run_trial

SUMMARY_COLUMNS = (
    "collected_pct", "knows4", "heterogeneity", "knowledge_score",
    "queries_sent", "queries_lost", "responses_sent",
)


@dataclass(frozen=True)
class Variant:
    name: str
    config: SimConfig


def variants(spec: ExperimentSpec) -> list[Variant]:
    base = spec.config
    study = spec.study
    if study is None:
        return [Variant("run", base)]
    if study == "compare":
        out = []
        for name in spec.study_values:
            if name == "bl1":
                comp = (0, base.n_robots, 0, 0, 0, 0)
                out.append(Variant(name, base.with_(composition=comp, mode=Mode.NO_TRANSFER)))
            elif name == "bl2":
                out.append(Variant(name, base.with_(mode=Mode.NO_TRANSFER)))
            else:
                out.append(Variant(name, base.with_(mode=Mode.KT_BT)))
        return out
    if study == "opportunities":
        return [Variant(f"targets={n}", base.with_(targets=(n,) * 4)) for n in spec.study_values]
    if study == "comm_range":
        return [Variant(f"d_coms={r:g}", base.with_(d_coms=r)) for r in spec.study_values]
    return [Variant("heterogeneity", base)]


def _file_stem(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "-", name)


def aggregate_rows(results: list[TrialResult]) -> list[tuple]:
    """Per-tick mean over trials; a trial that stopped early holds its final row."""
    ticks = sorted({row[0] for r in results for row in r.rows})
    n = len(results)
    out = []
    cursors = [0] * n
    for t in ticks:
        picked = []
        for i, r in enumerate(results):
            rows = r.rows
            j = cursors[i]
            while j + 1 < len(rows) and rows[j + 1][0] <= t:
                j += 1
            cursors[i] = j
            picked.append(rows[j])
        if n == 1:
            out.append((t,) + tuple(picked[0][1:]))
        else:
            out.append((t,) + tuple(sum(p[c] for p in picked) / n for c in range(1, len(CSV_COLUMNS))))
    return out


def rows_to_csv(rows: list[tuple]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(",".join(repr(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def mean_sd(values: list[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (n - 1); sd is nan for one value."""
    if not values:
        return math.nan, math.nan
    mean = statistics.fmean(values)
    sd = statistics.stdev(values) if len(values) > 1 else math.nan
    return mean, sd


def _fmt(mean: float, sd: float) -> str:
    if math.isnan(mean):
        return "n/a"
    if math.isnan(sd):
        return f"{mean:.4g}"
    return f"{mean:.4g} ± {sd:.4g}"


def ordering_count(results: dict[str, list[TrialResult]]) -> tuple[int, int] | None:
    """Paired trials with BL1 <= KT-BT < BL2 in iterations to 99 %.

    Trials that never reach 99 % count as taking forever.
    """
    if not all(k in results for k in ("bl1", "bl2", "ktbt")):
        return None

    def it(r):
        return math.inf if r.iterations_to_99 is None else r.iterations_to_99

    trios = list(zip(results["bl1"], results["ktbt"], results["bl2"]))
    ok = sum(1 for a, k, b in trios if it(a) <= it(k) < it(b))
    return ok, len(trios)


@dataclass
class ExperimentReport:
    results: dict[str, list[TrialResult]] = field(default_factory=dict)
    aggregates: dict[str, list[tuple]] = field(default_factory=dict)
    summary: str = ""
    files: list[Path] = field(default_factory=list)


def summarize(results: dict[str, list[TrialResult]]) -> str:
    lines = []
    for name, trials in results.items():
        reached = [r.iterations_to_99 for r in trials if r.iterations_to_99 is not None]
        lines.append(f"[{name}] trials={len(trials)}")
        lines.append(
            f"  iterations_to_99: {_fmt(*mean_sd(reached))} ({len(reached)}/{len(trials)} reached 99%)"
        )
        for col in SUMMARY_COLUMNS:
            vals = [float(r.final_row[col]) for r in trials]
            lines.append(f"  final {col}: {_fmt(*mean_sd(vals))}")
    order = ordering_count(results)
    if order is not None:
        lines.append(f"ordering BL1 <= KT-BT < BL2 in iterations_to_99: {order[0]}/{order[1]} paired trials")
    return "\n".join(lines) + "\n"


def worker_count(n_jobs: int) -> int:
    cap = os.cpu_count() or 1
    env = os.environ.get("KTBT_THREADS")
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ValueError(f"KTBT_THREADS must be an integer, got {env!r}") from None
    return max(1, min(cap, n_jobs))


def _job(args):
    config, trial_index = args
    return run_trial(config, trial_index)


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> ExperimentReport:
    vs = variants(spec)
    jobs = [(v.config, i) for v in vs for i in range(v.config.trials)]
    workers = worker_count(len(jobs)) if workers is None else max(1, workers)
    if workers == 1:
        flat = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(_job, jobs))

    report = ExperimentReport()
    k = 0
    for v in vs:
        report.results[v.name] = flat[k:k + v.config.trials]
        k += v.config.trials
    for name, trials in report.results.items():
        report.aggregates[name] = aggregate_rows(trials)
    report.summary = summarize(report.results)

    out = spec.output_dir
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        for name, trials in report.results.items():
            stem = _file_stem(name)
            for r in trials:
                path = out / f"{stem}_trial{r.trial_index:03d}.csv"
                path.write_text(r.to_csv())
                report.files.append(path)
            path = out / f"{stem}_aggregate.csv"
            path.write_text(rows_to_csv(report.aggregates[name]))
            report.files.append(path)
        path = out / "summary.txt"
        path.write_text(report.summary)
        report.files.append(path)
    return report

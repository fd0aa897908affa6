"""Per-seed run results and their aggregation into reporting quantities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

CHANNEL_KINDS = ("idle", "success_ax", "success_bf", "collision_ax", "collision_bf", "collision_cross")


@dataclass(frozen=True)
class SensingRecord:
    ap_id: int
    request_time: float
    access_time: float | None
    completion_time: float | None
    outcome: str
    collisions_experienced: int

    @property
    def latency(self) -> float | None:
        if self.outcome != "completed":
            return None
        return self.completion_time - self.request_time


@dataclass
class RunMetrics:
    seed: int
    duration: float
    latency_samples: list[float]
    dropped_count: int
    attempted_count: int
    per_ap_goodput: list[float]
    channel_tally: dict[str, tuple[int, float]]
    records: list[SensingRecord] = field(default_factory=list)
    bf_backoff_wait: float = 0.0
    bf_decrements: int = 0
    ax_discards: int = 0
    backend: str = ""

    @property
    def total_goodput(self) -> float:
        return float(sum(self.per_ap_goodput))

    @property
    def mean_goodput(self) -> float:
        return self.total_goodput / len(self.per_ap_goodput) if self.per_ap_goodput else 0.0

    @property
    def slots(self) -> int:
        return sum(c for c, _ in self.channel_tally.values())

    def slot_frequencies(self) -> dict[str, float]:
        n = self.slots
        c = {k: v[0] for k, v in self.channel_tally.items()}
        coll = c["collision_ax"] + c["collision_bf"] + c["collision_cross"]
        return {
            "idle": c["idle"] / n,
            "success": (c["success_ax"] + c["success_bf"]) / n,
            "collision": coll / n,
        }

    def airtime_fractions(self) -> tuple[float, float]:
        idle = self.channel_tally["idle"][1]
        total = sum(s for _, s in self.channel_tally.values())
        return idle / total, (total - idle) / total


@dataclass(frozen=True)
class DistributionSummary:
    n_samples: int
    mean: float = math.nan
    median: float = math.nan
    p5: float = math.nan
    p25: float = math.nan
    p75: float = math.nan
    p95: float = math.nan
    bin_edges: tuple[float, ...] = ()
    counts: tuple[int, ...] = ()
    empty: bool = False

    def row(self) -> dict[str, float]:
        return {
            "mean": self.mean, "median": self.median, "p5": self.p5, "p25": self.p25,
            "p75": self.p75, "p95": self.p95, "n": self.n_samples,
        }


def histogram_edges(samples: np.ndarray, bins: int = 64) -> np.ndarray:
    """Equal-width edges; Freedman-Diaconis width when it gives fewer bins."""
    lo, hi = float(samples[0]), float(samples[-1])
    if hi <= lo:
        return np.array([lo, lo + 1.0])
    q75, q25 = np.percentile(samples, [75, 25])
    iqr = q75 - q25
    if iqr > 0:
        fd = 2 * iqr / len(samples) ** (1 / 3)
        n_fd = int(math.ceil((hi - lo) / fd))
        if 1 <= n_fd < bins:
            bins = n_fd
    return np.linspace(lo, hi, bins + 1)


def summarize_samples(samples: Iterable[float], bins: int = 64) -> DistributionSummary:
    arr = np.sort(np.asarray(list(samples), dtype=float))
    if arr.size == 0:
        return DistributionSummary(n_samples=0, empty=True)
    p5, p25, p50, p75, p95 = np.percentile(arr, [5, 25, 50, 75, 95])
    edges = histogram_edges(arr, bins)
    counts, _ = np.histogram(arr, bins=edges)
    return DistributionSummary(
        n_samples=int(arr.size),
        mean=float(arr.mean()),
        median=float(p50),
        p5=float(p5),
        p25=float(p25),
        p75=float(p75),
        p95=float(p95),
        bin_edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
    )


def summarize(runs: Sequence[RunMetrics], bins: int = 64) -> dict[str, DistributionSummary]:
    """Pool latency across seeds; throughput summaries are over per-run values."""
    if not runs:
        raise ValueError("summarize needs at least one run")
    latency = [x for r in runs for x in r.latency_samples]
    return {
        "latency_us": summarize_samples(latency, bins),
        "ax_aggregate_bps": summarize_samples([r.total_goodput for r in runs], bins),
        "ax_per_ap_bps": summarize_samples([r.mean_goodput for r in runs], bins),
    }


def per_seed_summaries(runs: Sequence[RunMetrics], bins: int = 64) -> list[DistributionSummary]:
    return [summarize_samples(r.latency_samples, bins) for r in runs]


def failure_rate(runs: Sequence[RunMetrics]) -> float:
    """Dropped sensing attempts as a percentage of resolved attempts (NaN if none)."""
    attempted = sum(r.attempted_count for r in runs)
    if attempted == 0:
        return math.nan
    return 100.0 * sum(r.dropped_count for r in runs) / attempted


@dataclass(frozen=True)
class MetricComparison:
    metric: str
    analytic: float
    simulated: float
    rel_error: float
    flagged: bool


def compare_engines(analytic_point: dict[str, float], sim_summary: dict[str, float], threshold: float = 0.15) -> list[MetricComparison]:
    """Relative deviation of simulation from the analytic value, per metric."""
    out = []
    for metric in sorted(set(analytic_point) & set(sim_summary)):
        a, s = analytic_point[metric], sim_summary[metric]
        if a == 0:
            err = 0.0 if s == 0 else math.inf
        else:
            err = abs(s - a) / abs(a)
        out.append(MetricComparison(metric, a, s, err, err > threshold))
    return out

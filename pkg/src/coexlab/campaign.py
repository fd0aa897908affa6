"""Sweeps over scenario axes, seed fan-out and deterministic result files."""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Sequence

from coexlab import presets
from coexlab.analytic import AnalyticPoint, analytic_point
from coexlab.config import ScenarioConfig
from coexlab.errors import InvalidParameter, OutputError
from coexlab.metrics import (
    DistributionSummary,
    MetricComparison,
    RunMetrics,
    compare_engines,
    failure_rate,
    summarize,
)
from coexlab.model import EDCA_CLASSES

log = logging.getLogger("coexlab")

AXES = ("n_bf", "n_ax", "interval", "edca_class", "antenna", "rate")
SUMMARY_COLUMNS = ("scenario_id", "metric", "mean", "median", "p5", "p25", "p75", "p95", "n")
HIST_COLUMNS = ("scenario_id", "bin_lo", "bin_hi", "count")


def _as_int(axis: str, v: Any) -> int:
    try:
        out = int(str(v))
    except ValueError:
        raise InvalidParameter(f"sweep {axis}: {v!r} is not an integer", field=f"sweep.{axis}") from None
    return out


def _as_float(axis: str, v: Any) -> float:
    try:
        return float(str(v))
    except ValueError:
        raise InvalidParameter(f"sweep {axis}: {v!r} is not a number", field=f"sweep.{axis}") from None


def _antenna(v: Any) -> int:
    text = str(v).lower()
    if "x" in text:
        a, b = text.split("x", 1)
        if a != b:
            raise InvalidParameter(f"sweep antenna: {v!r} must be square (AxA)", field="sweep.antenna")
        text = a
    n = _as_int("antenna", text)
    if n < 1:
        raise InvalidParameter("sweep antenna: size must be >= 1", field="sweep.antenna")
    return n


def apply_axis(base: ScenarioConfig, axis: str, value: Any) -> ScenarioConfig:
    """One grid point: ``base`` with ``axis`` set to ``value``."""
    if axis == "n_bf":
        return base.with_population(n_bf_aps=_as_int(axis, value))
    if axis == "n_ax":
        return base.with_population(n_ax_aps=_as_int(axis, value))
    if axis == "interval":
        ms = _as_float(axis, value)
        if base.arrival.mode == "continuous":
            raise InvalidParameter("sweep interval needs periodic or poisson arrivals", field="sweep.interval")
        return replace(base, arrival=replace(base.arrival, interval_ms=ms, rate_hz=1000.0 / ms if ms > 0 else -1))
    if axis == "edca_class":
        name = str(value).upper()
        if name not in EDCA_CLASSES:
            raise InvalidParameter(f"sweep edca_class: unknown class {value!r}", field="sweep.edca_class")
        return base.with_population(edca_bf=EDCA_CLASSES[name])
    if axis == "antenna":
        n = _antenna(value)
        return replace(base, sensing=replace(base.sensing, n_tx=n, n_rx=n))
    if axis == "rate":
        return replace(base, timing=replace(base.timing, rate_R=_as_float(axis, value)))
    raise InvalidParameter(f"unknown sweep axis {axis!r}; expected one of {AXES}", field="sweep")


def sweep_configs(base: ScenarioConfig, axis: str, values: Sequence[Any]) -> list[ScenarioConfig]:
    if axis not in AXES:
        raise InvalidParameter(f"unknown sweep axis {axis!r}; expected one of {AXES}", field="sweep")
    if not values:
        raise InvalidParameter(f"sweep {axis}: empty value list", field=f"sweep.{axis}")
    out = []
    for v in values:
        cfg = apply_axis(base, axis, v)
        out.append(replace(cfg, scenario_id=f"{base.scenario_id}_{axis}{v}"))
    return out


def parse_sweep(spec: str) -> tuple[str, list[str]]:
    """``AXIS=v1,v2,...`` into (axis, values)."""
    if "=" not in spec:
        raise InvalidParameter(f"--sweep expects AXIS=v1,v2,...; got {spec!r}", field="sweep")
    axis, _, rest = spec.partition("=")
    values = [v.strip() for v in rest.split(",") if v.strip()]
    if not values:
        raise InvalidParameter(f"sweep {axis}: empty value list", field=f"sweep.{axis}")
    return axis.strip(), values


PRESETS: dict[str, Callable[[ScenarioConfig | None], list[ScenarioConfig]]] = {
    "bf_sweep": presets.bf_sweep_grid,
    "ax_sweep": presets.ax_sweep_grid,
    "failure_table": presets.failure_table_grid,
    "edca": presets.edca_grid,
    "antenna": presets.antenna_grid,
}


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    runs: list[RunMetrics] = field(default_factory=list)
    summary: dict[str, DistributionSummary] = field(default_factory=dict)
    failure_pct: float = math.nan
    analytic: AnalyticPoint | None = None
    comparison: list[MetricComparison] = field(default_factory=list)

    @property
    def scenario_id(self) -> str:
        return self.config.scenario_id


def _one_run(args: tuple[ScenarioConfig, int]) -> RunMetrics:
    from coexlab import sim

    cfg, seed = args
    return sim.run(cfg, seed, keep_records=False)


def run_seeds(config: ScenarioConfig, threads: int = 1) -> list[RunMetrics]:
    jobs = [(config, s) for s in config.seeds]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            # map keeps submission order, so results are ordered by seed
            return list(pool.map(_one_run, jobs))
    return [_one_run(j) for j in jobs]


def run_scenario(config: ScenarioConfig, threads: int = 1) -> ScenarioResult:
    res = ScenarioResult(config)
    if config.mode in ("sim", "both"):
        log.info("scenario %s: %d seeds", config.scenario_id, len(config.seeds))
        res.runs = run_seeds(config, threads)
        res.summary = summarize(res.runs)
        res.failure_pct = failure_rate(res.runs)
    if config.mode in ("analytic", "both"):
        res.analytic = analytic_point(config)
    if config.mode == "both":
        res.comparison = compare_engines(
            {"mean_latency_us": res.analytic.mean_latency_us, "aggregate_bps": res.analytic.aggregate_bps},
            {"mean_latency_us": res.summary["latency_us"].mean, "aggregate_bps": res.summary["ax_aggregate_bps"].mean},
        )
    return res


def run_campaign(configs: Sequence[ScenarioConfig], threads: int = 1) -> list[ScenarioResult]:
    return [run_scenario(c, threads) for c in configs]


# ---------------------------------------------------------------------------
# output


def _num(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return ""
    return repr(float(x)) if isinstance(x, float) else str(x)


def _clean(obj: Any) -> Any:
    if isinstance(obj, float):
        return None if math.isnan(obj) or math.isinf(obj) else obj
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def summary_rows(res: ScenarioResult) -> list[dict[str, Any]]:
    rows = []
    for metric in sorted(res.summary):
        rows.append({"scenario_id": res.scenario_id, "metric": metric, **res.summary[metric].row()})
    if res.runs:
        rows.append({"scenario_id": res.scenario_id, "metric": "failure_rate_pct", "mean": res.failure_pct, "n": len(res.runs)})
    if res.analytic is not None:
        rows.append({"scenario_id": res.scenario_id, "metric": "analytic_mean_latency_us", "mean": res.analytic.mean_latency_us, "n": 1})
        rows.append({"scenario_id": res.scenario_id, "metric": "analytic_aggregate_bps", "mean": res.analytic.aggregate_bps, "n": 1})
    for c in res.comparison:
        rows.append({"scenario_id": res.scenario_id, "metric": f"rel_error_{c.metric}", "mean": c.rel_error, "n": 1})
    return rows


def scenario_json(res: ScenarioResult) -> dict[str, Any]:
    out: dict[str, Any] = {"scenario_id": res.scenario_id, "config": res.config.to_dict()}
    if res.runs:
        out["sim"] = {
            name: {**s.row(), "bin_edges": list(s.bin_edges), "counts": list(s.counts), "empty": s.empty}
            for name, s in sorted(res.summary.items())
        }
        out["sim"]["failure_rate_pct"] = res.failure_pct
        out["sim"]["backend"] = res.runs[0].backend
    if res.analytic is not None:
        a = res.analytic
        out["analytic"] = {
            "mean_latency_us": a.mean_latency_us,
            "aggregate_bps": a.aggregate_bps,
            "arrival_mode": a.arrival_mode,
            "saturated_delay_us": a.saturated_delay_us,
            "residual_us": a.residual_us,
            "tau_bf": a.fixed_point.tau_bf,
            "tau_ax": a.fixed_point.tau_ax,
        }
    if res.comparison:
        out["comparison"] = [
            {"metric": c.metric, "analytic": c.analytic, "simulated": c.simulated, "rel_error": c.rel_error, "flagged": c.flagged}
            for c in res.comparison
        ]
    return _clean(out)


def _write(path: Path, write: Callable[[Any], None]) -> None:
    try:
        with open(path, "w", newline="") as fh:
            write(fh)
    except OSError as exc:
        raise OutputError(f"{path}: {exc.strerror}", path=str(path)) from None


def _write_csv(path: Path, columns: Sequence[str], rows: Sequence[dict[str, Any]]) -> None:
    def body(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_num(r.get(c, math.nan)) if c not in ("scenario_id", "metric") else r[c] for c in columns])

    _write(path, body)


def emit(results: Sequence[ScenarioResult], formats: Sequence[str], out_dir: str | Path, campaign: str | None = None) -> list[Path]:
    """Write scenario_<id>.<fmt> per result, latency histograms, and a campaign table."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"{out}: {exc.strerror}", path=str(out)) from None
    for fmt in formats:
        if fmt not in ("csv", "json"):
            raise InvalidParameter(f"unknown output format {fmt!r}", field="format")
    written = []
    all_rows = []
    for res in results:
        rows = summary_rows(res)
        all_rows.extend(rows)
        if "csv" in formats:
            p = out / f"scenario_{res.scenario_id}.csv"
            _write_csv(p, SUMMARY_COLUMNS, rows)
            written.append(p)
        if "json" in formats:
            p = out / f"scenario_{res.scenario_id}.json"
            text = json.dumps(scenario_json(res), indent=2, sort_keys=True) + "\n"
            _write(p, lambda fh: fh.write(text))
            written.append(p)
        lat = res.summary.get("latency_us")
        if lat is not None and not lat.empty:
            hist = [
                {"scenario_id": res.scenario_id, "bin_lo": lo, "bin_hi": hi, "count": c}
                for lo, hi, c in zip(lat.bin_edges[:-1], lat.bin_edges[1:], lat.counts)
            ]
            p = out / f"scenario_{res.scenario_id}_hist.csv"
            _write_csv(p, HIST_COLUMNS, hist)
            written.append(p)
    if campaign is not None and len(results) > 1:
        lat_rows = [r for r in all_rows if r["metric"] == "latency_us"] or all_rows
        p = out / f"campaign_{campaign}.csv"
        _write_csv(p, SUMMARY_COLUMNS, lat_rows)
        written.append(p)
    return written


__all__ = [
    "AXES",
    "PRESETS",
    "ScenarioResult",
    "apply_axis",
    "emit",
    "parse_sweep",
    "run_campaign",
    "run_scenario",
    "run_seeds",
    "sweep_configs",
]

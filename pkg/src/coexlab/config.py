"""Scenario description, JSON loading and named presets."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from coexlab.errors import InvalidParameter
from coexlab.model import (
    EDCA_CLASSES,
    AxTrafficProfile,
    EdcaClass,
    MacTiming,
    PopulationMix,
    SensingProfile,
)

ARRIVAL_MODES = ("continuous", "periodic", "poisson")
RUN_MODES = ("analytic", "sim", "both")

# 20 MHz is the calibrated baseline; wider channels scale the rate by the
# HE data-tone ratio (234 / 980 / 1960) and widen the CSI report.
BANDWIDTHS: dict[str, dict[str, float | int]] = {
    "20MHz": {"rate_scale": 1.0, "n_sc": 242},
    "80MHz": {"rate_scale": 980 / 234, "n_sc": 996},
    "160MHz": {"rate_scale": 1960 / 234, "n_sc": 1992},
}


@dataclass(frozen=True)
class AnalyticOptions:
    """Switches for the places where the closed-form model leaves a choice.

    p_d: ``"one"`` (decrement every slot) or ``"idle"`` (P_d = P_i).
    busy_success: ``"printed"`` or ``"corrected"`` neighbour-success term.
    residency: ``"printed"`` or ``"renewal"`` busy-slot residencies.
    p_success: ``"printed"`` uses exponent N in the per-technology success
        probability; ``"corrected"`` uses N - 1 (the other APs).

    The defaults form the variant that tracks the simulator; ``PRINTED``
    reproduces the closed forms term by term.
    """

    p_d: str = "idle"
    busy_success: str = "corrected"
    residency: str = "renewal"
    p_success: str = "corrected"
    tol: float = 1e-9
    max_iter: int = 100_000

    def __post_init__(self) -> None:
        if self.p_d not in ("one", "idle"):
            raise InvalidParameter("analytic.p_d must be 'one' or 'idle'", field="analytic.p_d")
        if self.busy_success not in ("printed", "corrected"):
            raise InvalidParameter("analytic.busy_success must be 'printed' or 'corrected'", field="analytic.busy_success")
        if self.residency not in ("printed", "renewal"):
            raise InvalidParameter("analytic.residency must be 'printed' or 'renewal'", field="analytic.residency")
        if self.p_success not in ("printed", "corrected"):
            raise InvalidParameter("analytic.p_success must be 'printed' or 'corrected'", field="analytic.p_success")


PRINTED = AnalyticOptions(p_d="one", busy_success="printed", residency="printed", p_success="printed")


@dataclass(frozen=True)
class ArrivalModel:
    mode: str = "periodic"
    interval_ms: float = 100.0
    rate_hz: float = 10.0

    def __post_init__(self) -> None:
        if self.mode not in ARRIVAL_MODES:
            raise InvalidParameter(f"arrival.mode must be one of {ARRIVAL_MODES}", field="arrival.mode")
        if self.interval_ms <= 0:
            raise InvalidParameter("arrival.interval_ms must be > 0", field="arrival.interval_ms")
        if self.rate_hz <= 0:
            raise InvalidParameter("arrival.rate_hz must be > 0", field="arrival.rate_hz")

    @property
    def interval_us(self) -> float:
        return self.interval_ms * 1000.0

    @property
    def rate_per_us(self) -> float:
        return self.rate_hz * 1e-6


@dataclass(frozen=True)
class ScenarioConfig:
    population: PopulationMix = field(default_factory=PopulationMix)
    timing: MacTiming = field(default_factory=MacTiming)
    traffic: AxTrafficProfile = field(default_factory=AxTrafficProfile)
    sensing: SensingProfile = field(default_factory=SensingProfile)
    arrival: ArrivalModel = field(default_factory=ArrivalModel)
    analytic: AnalyticOptions = field(default_factory=AnalyticOptions)
    duration_s: float = 10.0
    seeds: tuple[int, ...] = tuple(range(50))
    mode: str = "both"
    scenario_id: str = "default"

    def __post_init__(self) -> None:
        if not self.duration_s > 0:
            raise InvalidParameter("duration_s must be > 0", field="duration_s")
        if self.mode not in RUN_MODES:
            raise InvalidParameter(f"mode must be one of {RUN_MODES}", field="mode")
        if self.mode != "analytic" and not self.seeds:
            raise InvalidParameter("seeds must be non-empty in sim modes", field="seeds")

    @property
    def duration_us(self) -> float:
        return self.duration_s * 1e6

    def with_population(self, **kw: Any) -> "ScenarioConfig":
        return replace(self, population=replace(self.population, **kw))

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        return d


def _schema() -> dict[str, Any]:
    text = resources.files("coexlab").joinpath("schema.json").read_text()
    return json.loads(text)


def _edca(value: Any, path: str) -> EdcaClass:
    if isinstance(value, str):
        try:
            return EDCA_CLASSES[value]
        except KeyError:
            raise InvalidParameter(f"{path}: unknown access category {value!r}", field=path) from None
    base = EDCA_CLASSES["BE"]
    try:
        return EdcaClass(
            cw_min=value.get("cw_min", base.cw_min),
            cw_max=value.get("cw_max", base.cw_max),
            aifs=value.get("aifs", base.aifs),
            retry_limit=value.get("retry_limit", base.retry_limit),
        )
    except InvalidParameter as exc:
        raise InvalidParameter(f"{path}.{exc}", field=f"{path}.{exc.field}") from None


def _build(cls, values: dict[str, Any], path: str):
    try:
        return cls(**values)
    except InvalidParameter as exc:
        raise InvalidParameter(f"{path}.{exc}", field=f"{path}.{exc.field}") from None


def config_from_dict(raw: dict[str, Any]) -> ScenarioConfig:
    """Validate ``raw`` against the published schema and apply defaults."""
    validator = jsonschema.Draft7Validator(_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise InvalidParameter(f"{where}: {err.message}", field=where)

    raw = dict(raw)
    bw = raw.get("bandwidth", "20MHz")
    preset = BANDWIDTHS[bw]

    timing_raw = dict(raw.get("timing", {}))
    if "rate_R" not in timing_raw:
        timing_raw["rate_R"] = MacTiming().rate_R * preset["rate_scale"]
    timing = _build(MacTiming, timing_raw, "timing")

    sensing_raw = dict(raw.get("sensing", {}))
    sensing_raw.setdefault("n_sc", preset["n_sc"])
    sensing = _build(SensingProfile, sensing_raw, "sensing")

    traffic = _build(AxTrafficProfile, dict(raw.get("traffic", {})), "traffic")

    pop_raw = dict(raw.get("population", {}))
    for key in ("edca_bf", "edca_ax"):
        if key in pop_raw:
            pop_raw[key] = _edca(pop_raw[key], f"population.{key}")
    population = _build(PopulationMix, pop_raw, "population")

    arrival = _build(ArrivalModel, dict(raw.get("arrival", {})), "arrival")
    analytic = _build(AnalyticOptions, dict(raw.get("analytic", {})), "analytic")

    seeds = raw.get("seeds", 50)
    seeds = tuple(range(seeds)) if isinstance(seeds, int) else tuple(seeds)

    top = {k: raw[k] for k in ("duration_s", "mode", "scenario_id") if k in raw}
    return ScenarioConfig(
        population=population,
        timing=timing,
        traffic=traffic,
        sensing=sensing,
        arrival=arrival,
        analytic=analytic,
        seeds=seeds,
        **top,
    )


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidParameter(f"{path}: {exc.strerror}", field=str(path)) from None
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise InvalidParameter(
            f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}", field="<root>"
        ) from None
    return config_from_dict(raw)

"""coexctl: run scenarios, sweeps and presets from the command line."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from typing import Sequence

from coexlab import __version__, campaign, presets
from coexlab.config import RUN_MODES, ScenarioConfig, load_config
from coexlab.errors import CoexError, InvalidParameter

log = logging.getLogger("coexlab")


def _seeds(text: str) -> tuple[int, ...]:
    """``50`` means seeds 0..49; ``3,7,11`` lists them; ``10:20`` is a range."""
    text = text.strip()
    try:
        if "," in text:
            seeds = tuple(int(s) for s in text.split(",") if s.strip())
        elif ":" in text:
            lo, hi = text.split(":", 1)
            seeds = tuple(range(int(lo), int(hi)))
        else:
            seeds = tuple(range(int(text)))
    except ValueError:
        raise InvalidParameter(f"--seeds: cannot parse {text!r}", field="seeds") from None
    if not seeds:
        raise InvalidParameter("--seeds: empty seed list", field="seeds")
    return seeds


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coexctl", description=__doc__)
    p.add_argument("--config", help="scenario JSON file (defaults apply when omitted)")
    p.add_argument("--mode", choices=RUN_MODES, help="analytic, sim or both")
    p.add_argument("--sweep", metavar="AXIS=v1,v2,...", help=f"sweep one axis: {', '.join(campaign.AXES)}")
    p.add_argument("--preset", choices=sorted(campaign.PRESETS), help="calibrated scenario grid")
    p.add_argument("--arrival", choices=("continuous", "periodic", "poisson"), help="override the arrival mode")
    p.add_argument("--seeds", help="N, a,b,c or lo:hi")
    p.add_argument("--duration", type=float, help="virtual seconds per run")
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--format", default="csv,json", help="csv, json or both (comma separated)")
    p.add_argument("--threads", type=int, default=1, help="worker processes for seed fan-out")
    p.add_argument("--calibrate", action="store_true", help="rerun the frame-time calibration search and print it")
    p.add_argument("--version", action="version", version=f"coexctl {__version__}")
    return p


def _configure_logging() -> None:
    level = os.environ.get("COEX_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _base_config(args: argparse.Namespace) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if args.mode:
        cfg = replace(cfg, mode=args.mode)
    if args.seeds:
        cfg = replace(cfg, seeds=_seeds(args.seeds))
    if args.duration is not None:
        cfg = replace(cfg, duration_s=args.duration)
    if args.arrival:
        cfg = replace(cfg, arrival=replace(cfg.arrival, mode=args.arrival))
    return cfg


def _configs(args: argparse.Namespace, base: ScenarioConfig) -> tuple[list[ScenarioConfig], str | None]:
    if args.preset and args.sweep:
        raise InvalidParameter("--preset and --sweep are exclusive", field="sweep")
    if args.preset:
        grid = campaign.PRESETS[args.preset](base)
        return grid, args.preset
    if args.sweep:
        axis, values = campaign.parse_sweep(args.sweep)
        return campaign.sweep_configs(base, axis, values), f"{base.scenario_id}_{axis}"
    return [base], None


def _report(results: Sequence[campaign.ScenarioResult]) -> None:
    for res in results:
        parts = [res.scenario_id]
        lat = res.summary.get("latency_us")
        if lat is not None and not lat.empty:
            parts.append(f"median {lat.median / 1e3:.2f} ms mean {lat.mean / 1e3:.2f} ms")
        if res.summary:
            parts.append(f"ax {res.summary['ax_aggregate_bps'].mean / 1e6:.1f} Mbps")
        if res.runs:
            parts.append(f"fail {res.failure_pct:.2f}%")
        if res.analytic is not None:
            parts.append(f"analytic {res.analytic.mean_latency_us / 1e3:.2f} ms {res.analytic.aggregate_bps / 1e6:.1f} Mbps")
        flagged = [c.metric for c in res.comparison if c.flagged]
        if flagged:
            parts.append("FLAGGED " + ",".join(flagged))
        print("  ".join(parts))


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.calibrate:
            seeds = _seeds(args.seeds) if args.seeds else tuple(range(20))
            result = presets.calibrate(seeds=seeds)
            for t, rate, loss, vals in sorted(result.table, key=lambda r: r[2]):
                anchors = " ".join(f"{lat / 1e3:.2f}ms/{thr / 1e6:.1f}Mbps" for lat, thr in vals)
                print(f"frame {t:g} us  rate {rate:g}  loss {loss:.4f}  {anchors}")
            print(f"best: frame {result.frame_time_us:g} us, rate {result.rate_R:g}")
            return 0
        if args.threads < 1:
            raise InvalidParameter("--threads must be >= 1", field="threads")
        formats = [f.strip() for f in args.format.split(",") if f.strip()]
        base = _base_config(args)
        configs, name = _configs(args, base)
        results = campaign.run_campaign(configs, threads=args.threads)
        written = campaign.emit(results, formats, args.out, campaign=name)
        _report(results)
        log.info("wrote %d files to %s", len(written), args.out)
        return 0
    except CoexError as exc:
        field = getattr(exc, "field", None)
        where = f" [{field}]" if field else ""
        print(f"coexctl: {exc.category} error{where}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

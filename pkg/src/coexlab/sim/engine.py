"""Build a slot kernel from a ScenarioConfig and turn its output into RunMetrics."""

from __future__ import annotations

import math

import numpy as np

from coexlab.config import ScenarioConfig
from coexlab.metrics import CHANNEL_KINDS, RunMetrics, SensingRecord
from coexlab.model import event_durations
from coexlab.sim import backend as _backend

_MODES = {"continuous": 0, "periodic": 1, "poisson": 2}


def ap_generators(seed: int, n_aps: int) -> list[np.random.Generator]:
    """One independent stream per AP, keyed on (seed, ap_id) only."""
    return [np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(ap,)))) for ap in range(n_aps)]


def build_kernel(config: ScenarioConfig, seed: int, kernel_cls=None):
    pop = config.population
    timing = config.timing
    dur = event_durations(config)
    # bf APs first, then ax APs
    tech = [1] * pop.n_bf_aps + [0] * pop.n_ax_aps
    edcas = [pop.edca_bf] * pop.n_bf_aps + [pop.edca_ax] * pop.n_ax_aps
    difs_slots = timing.difs_slots
    cls = kernel_cls or _backend.SlotKernel
    return cls(
        tech,
        [e.cw_min for e in edcas],
        [e.cw_max for e in edcas],
        [e.retry_limit for e in edcas],
        [e.aifs for e in edcas],
        # busy spans already end with DIFS
        [max(e.aifs - difs_slots, 0) for e in edcas],
        (dur.t_s_ax, dur.t_s_bf),
        (dur.t_c_ax, dur.t_c_bf),
        dur.t_cfp,
        timing.sigma,
        _MODES[config.arrival.mode],
        config.arrival.interval_us,
        config.arrival.rate_per_us,
        dur.ax_mpdus * config.traffic.msdu_bits,
        ap_generators(seed, len(tech)),
    )


def run(config: ScenarioConfig, seed: int, kernel_cls=None, keep_records: bool = True) -> RunMetrics:
    kernel = build_kernel(config, seed, kernel_cls)
    elapsed = kernel.run(config.duration_us)
    aps, req, acc, done, outcome, colls = (list(x) for x in kernel.records)

    latency = []
    records = []
    dropped = 0
    for i in range(len(aps)):
        if outcome[i] == 1:
            latency.append(done[i] - req[i])
        else:
            dropped += 1
        if keep_records:
            ok = outcome[i] == 1
            records.append(SensingRecord(
                ap_id=aps[i],
                request_time=req[i],
                access_time=acc[i] if ok else None,
                completion_time=done[i] if ok else None,
                outcome="completed" if ok else "dropped",
                collisions_experienced=colls[i],
            ))

    n_bf = config.population.n_bf_aps
    bits = list(kernel.bits)
    goodput = [b / elapsed * 1e6 for b in bits[n_bf:]]
    counts = list(kernel.tally_count)
    spans = list(kernel.tally_span)
    tally = {k: (int(counts[i]), float(spans[i])) for i, k in enumerate(CHANNEL_KINDS)}
    return RunMetrics(
        seed=seed,
        duration=float(elapsed),
        latency_samples=latency,
        dropped_count=dropped,
        attempted_count=len(aps),
        per_ap_goodput=goodput,
        channel_tally=tally,
        records=records,
        bf_backoff_wait=float(kernel.bf_wait),
        bf_decrements=int(kernel.bf_decrements),
        ax_discards=int(kernel.ax_discards),
        backend=getattr(_backend, "BACKEND", "?"),
    )


def mean_decrement_interval(runs) -> float:
    dec = sum(r.bf_decrements for r in runs)
    return sum(r.bf_backoff_wait for r in runs) / dec if dec else math.nan

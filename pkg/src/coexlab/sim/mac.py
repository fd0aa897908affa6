"""Per-AP MAC state machine as small pure functions.

The slot kernels inline these rules for speed. ``reference_run`` drives the
same rules one dataclass at a time and is used to check the kernels record
for record; it consumes each AP's random stream in the same order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterator, Sequence

import numpy as np

from coexlab.config import ScenarioConfig
from coexlab.metrics import SensingRecord
from coexlab.model import DurationTable, EdcaClass, event_durations

Draw = Callable[[], float]

IDLE = "idle"
SUCCESS_AX = "success_ax"
SUCCESS_BF = "success_bf"
COLLISION = "collision"


@dataclass(frozen=True)
class ApState:
    technology: str
    edca: EdcaClass
    backoff_stage: int = 0
    backoff_counter: int = 0
    aifs_remaining: int = 0
    pending: str = "none"
    request_time: float = math.nan
    retries: int = 0
    collisions: int = 0

    @property
    def ready(self) -> bool:
        return self.pending != "none" and self.aifs_remaining == 0 and self.backoff_counter == 0


@dataclass(frozen=True)
class ChannelOutcome:
    kind: str
    span: float
    aps: tuple[int, ...] = ()

    @property
    def busy(self) -> bool:
        return self.kind != IDLE


class BlockDraws:
    """Uniform draws from one generator, fetched in fixed-size blocks like the kernels."""

    def __init__(self, gen: np.random.Generator, block: int = 4096):
        self.gen = gen
        self.block = block
        self.buf: list[float] = []
        self.pos = block

    def __call__(self) -> float:
        if self.pos == self.block:
            self.buf = self.gen.random(self.block).tolist()
            self.pos = 0
        u = self.buf[self.pos]
        self.pos += 1
        return u


def draw_counter(edca: EdcaClass, stage: int, draw: Draw) -> int:
    return int(draw() * edca.window(stage))


def aifs_after(edca: EdcaClass, busy: bool, difs_slots: int) -> int:
    # a busy span already ends with DIFS, so only the excess AIFS slots remain
    return max(edca.aifs - difs_slots, 0) if busy else edca.aifs


def arbitrate_slot(states: Sequence[ApState], dur: DurationTable) -> ChannelOutcome:
    txs = tuple(i for i, s in enumerate(states) if s.ready)
    if not txs:
        return ChannelOutcome(IDLE, dur.sigma)
    if len(txs) == 1:
        if states[txs[0]].technology == "ax":
            return ChannelOutcome(SUCCESS_AX, dur.t_s_ax, txs)
        return ChannelOutcome(SUCCESS_BF, dur.t_s_bf, txs)
    span = max(dur.t_c_ax if states[i].technology == "ax" else dur.t_c_bf for i in txs)
    return ChannelOutcome(COLLISION, span, txs)


def on_collision(ap: ApState, draw: Draw, difs_slots: int = 2) -> ApState:
    """Back off further; after L+1 failed attempts restart at stage 0."""
    L = ap.edca.retry_limit
    retries = ap.retries + 1
    stage = min(ap.backoff_stage + 1, L)
    if retries > L:
        retries = 0
        stage = 0
    return replace(
        ap,
        backoff_stage=stage,
        retries=retries,
        backoff_counter=draw_counter(ap.edca, stage, draw),
        aifs_remaining=aifs_after(ap.edca, True, difs_slots),
        collisions=ap.collisions + (ap.technology == "bf"),
    )


def on_success(ap: ApState, draw: Draw, difs_slots: int = 2) -> ApState:
    if ap.technology == "bf":
        return replace(ap, pending="none", backoff_stage=0, retries=0)
    return replace(
        ap,
        backoff_stage=0,
        retries=0,
        backoff_counter=draw_counter(ap.edca, 0, draw),
        aifs_remaining=aifs_after(ap.edca, True, difs_slots),
    )


def freeze_and_decrement(ap: ApState, outcome: ChannelOutcome, difs_slots: int = 2) -> ApState:
    """Update a non-transmitting AP after a slot."""
    if ap.pending == "none":
        return ap
    if outcome.busy:
        return replace(ap, aifs_remaining=aifs_after(ap.edca, True, difs_slots))
    if ap.aifs_remaining > 0:
        return replace(ap, aifs_remaining=ap.aifs_remaining - 1)
    return replace(ap, backoff_counter=ap.backoff_counter - 1)


def new_request(ap: ApState, when: float, draw: Draw, saw_busy: bool, difs_slots: int = 2) -> ApState:
    return replace(
        ap,
        pending="sensing",
        request_time=when,
        backoff_stage=0,
        retries=0,
        collisions=0,
        backoff_counter=draw_counter(ap.edca, 0, draw),
        aifs_remaining=aifs_after(ap.edca, saw_busy, difs_slots),
    )


def next_arrival(mode: str, last: float, interval: float, rate: float, draw: Draw) -> float:
    if mode == "periodic":
        return last + interval
    if mode == "poisson":
        return last - math.log1p(-draw()) / rate
    return math.inf


def sensing_arrivals(mode: str, interval: float, rate: float, draw: Draw, horizon: float) -> Iterator[float]:
    """Request times in [0, horizon) for periodic or Poisson arrivals.

    Continuous requests depend on completions and are produced by the run loop.
    """
    if mode == "continuous":
        return
    t = 0.0 if mode == "periodic" else next_arrival(mode, 0.0, interval, rate, draw)
    while t < horizon:
        yield t
        t = next_arrival(mode, t, interval, rate, draw)


def drop_expired(ap_id: int, ap: ApState, successor_arrival: float, now: float) -> SensingRecord | None:
    """Drop a pending attempt once its successor request has arrived."""
    if ap.pending != "sensing" or successor_arrival > now:
        return None
    return SensingRecord(ap_id, ap.request_time, None, None, "dropped", ap.collisions)


def reference_run(config: ScenarioConfig, seed: int) -> tuple[list[SensingRecord], float]:
    """Slow run built from the functions above; returns records and elapsed time."""
    from coexlab.sim.engine import ap_generators

    pop = config.population
    dur = event_durations(config)
    difs = config.timing.difs_slots
    mode = config.arrival.mode
    interval = config.arrival.interval_us
    rate = config.arrival.rate_per_us
    techs = ["bf"] * pop.n_bf_aps + ["ax"] * pop.n_ax_aps
    draws = [BlockDraws(g) for g in ap_generators(seed, len(techs))]
    states: list[ApState] = []
    arrivals = [math.inf] * len(techs)
    for i, tech in enumerate(techs):
        edca = pop.edca_bf if tech == "bf" else pop.edca_ax
        ap = ApState(tech, edca)
        if tech == "ax":
            ap = replace(ap, pending="data", backoff_counter=draw_counter(edca, 0, draws[i]), aifs_remaining=edca.aifs)
        elif mode == "continuous":
            ap = new_request(ap, 0.0, draws[i], False, difs)
        elif mode == "periodic":
            arrivals[i] = 0.0
        else:
            arrivals[i] = next_arrival(mode, 0.0, interval, rate, draws[i])
        states.append(ap)

    records: list[SensingRecord] = []
    t = 0.0
    prev_start = 0.0
    prev_busy = False
    horizon = config.duration_us
    while t < horizon:
        for i, tech in enumerate(techs):
            if tech != "bf":
                continue
            while arrivals[i] <= t:
                arr = arrivals[i]
                dropped = drop_expired(i, states[i], arr, t)
                if dropped is not None:
                    records.append(dropped)
                states[i] = new_request(states[i], arr, draws[i], prev_busy and arr > prev_start, difs)
                arrivals[i] = next_arrival(mode, arr, interval, rate, draws[i])

        out = arbitrate_slot(states, dur)
        for i, ap in enumerate(states):
            if i not in out.aps:
                states[i] = freeze_and_decrement(ap, out, difs)
        if out.kind in (SUCCESS_AX, SUCCESS_BF):
            i = out.aps[0]
            ap = states[i]
            if out.kind == SUCCESS_BF:
                records.append(SensingRecord(i, ap.request_time, t, t + dur.t_cfp, "completed", ap.collisions))
            states[i] = on_success(ap, draws[i], difs)
            if out.kind == SUCCESS_BF and mode == "continuous":
                states[i] = new_request(states[i], t + dur.t_cfp, draws[i], True, difs)
        elif out.kind == COLLISION:
            for i in out.aps:
                states[i] = on_collision(states[i], draws[i], difs)
        prev_start = t
        prev_busy = out.busy
        t += out.span
    return records, t

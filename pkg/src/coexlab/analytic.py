"""Coupled fixed-point model of bf/ax contention and the closed-form
throughput and sensing-delay expressions built on it.

Populations are indexed by technology: ``bf`` sensing APs and ``ax`` data
APs. Every function is pure; a solved :class:`FixedPointSolution` is the
input to everything downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from coexlab.config import AnalyticOptions, ScenarioConfig
from coexlab.errors import ConvergenceFailure, ModelInconsistency, SingularModel, UnstableSystem
from coexlab.model import AxTrafficProfile, DurationTable, EdcaClass, event_durations


@dataclass(frozen=True)
class FixedPointSolution:
    tau_bf: float
    tau_ax: float
    p_bf: float
    p_ax: float
    p_f_bf: float
    p_f_ax: float
    p_t_bf: float
    p_t_ax: float
    p_s_bf: float
    p_s_ax: float
    residual: float
    iterations: int
    n_bf: int = 0
    n_ax: int = 0
    edca_bf: EdcaClass | None = None
    edca_ax: EdcaClass | None = None

    def event_probabilities(self) -> dict[str, float]:
        """Per-slot probabilities of idle / success / collision on the channel."""
        a, b = self.p_t_ax, self.p_t_bf
        idle = (1 - a) * (1 - b)
        success = a * self.p_s_ax * (1 - b) + b * self.p_s_bf * (1 - a)
        return {"idle": idle, "success": success, "collision": 1.0 - idle - success}


@dataclass(frozen=True)
class SlotResidency:
    d_i: float
    d_s: float
    d_c: float
    gamma: float
    p_ci: float
    p_cs: float
    p_cc: float
    degenerate: bool = False


@dataclass(frozen=True)
class BackoffSlot:
    f_avg_slot: float
    f_b: float
    f_t: float
    cw_bar: float
    p_i: float
    p_s: float
    p_c: float
    p_d: float


@dataclass(frozen=True)
class DelayBreakdown:
    mean_access_delay_T: float
    per_stage_terms: list[tuple[int, float, float]]
    f_avg_slot: float
    f_b: float
    f_t: float
    cw_bar: float
    d_i: float
    d_s: float
    d_c: float
    gamma: float
    p_ci: float
    p_cs: float
    p_cc: float


# ---------------------------------------------------------------------------
# attempt probability and fixed point


def attempt_probability(p_coll: float, p_f: float, edca: EdcaClass) -> float:
    if not 0.0 <= p_f < 1.0:
        raise SingularModel(f"freezing probability must lie in [0, 1), got {p_f}")
    if not 0.0 <= p_coll <= 1.0:
        raise SingularModel(f"collision probability must lie in [0, 1], got {p_coll}")
    num = 0.0
    den = 0.0
    pj = 1.0
    for j in range(edca.retry_limit + 1):
        w = edca.window(j)
        # sum_{k=1}^{W-1} (W-k)/W == (W-1)/2
        den += (1.0 + (w - 1) / (2.0 * (1.0 - p_f))) * pj
        num += pj
        pj *= p_coll
    return num / den


def _collision_probs(tau_bf: float, tau_ax: float, n_bf: int, n_ax: int) -> tuple[float, float]:
    p_bf = 1.0 - (1.0 - tau_bf) ** max(n_bf - 1, 0) * (1.0 - tau_ax) ** n_ax if n_bf else 0.0
    p_ax = 1.0 - (1.0 - tau_ax) ** max(n_ax - 1, 0) * (1.0 - tau_bf) ** n_bf if n_ax else 0.0
    return p_bf, p_ax


def success_probability(tau: float, n: int, variant: str = "corrected") -> float:
    """P_s: exactly one of the n transmitting, given at least one does."""
    p_t = 1.0 - (1.0 - tau) ** n
    if p_t <= 0.0:
        return 0.0
    exp = n if variant == "printed" else n - 1
    # ratio of two roundings can overshoot 1 by an ulp when n == 1
    return min(n * tau * (1.0 - tau) ** exp / p_t, 1.0)


def solve_populations(
    n_bf: int,
    n_ax: int,
    edca_bf: EdcaClass,
    edca_ax: EdcaClass,
    tol: float = 1e-9,
    max_iter: int = 100_000,
    p_success: str = "corrected",
) -> FixedPointSolution:
    """Damped fixed-point iteration on (tau_bf, tau_ax)."""
    if n_bf + n_ax < 1:
        raise SingularModel("at least one AP is required")

    def step(t_bf: float, t_ax: float) -> tuple[float, float, float, float]:
        p_bf, p_ax = _collision_probs(t_bf, t_ax, n_bf, n_ax)
        # Freezing probability: a tagged AP sees the channel busy exactly
        # when some other AP transmits, i.e. with its collision probability.
        new_bf = attempt_probability(p_bf, p_bf, edca_bf) if n_bf else 0.0
        new_ax = attempt_probability(p_ax, p_ax, edca_ax) if n_ax else 0.0
        return new_bf, new_ax, p_bf, p_ax

    t_bf = 2.0 / (edca_bf.cw_min + 1) if n_bf else 0.0
    t_ax = 2.0 / (edca_ax.cw_min + 1) if n_ax else 0.0
    damping = 0.5
    prev_res = math.inf
    res = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        new_bf, new_ax, _, _ = step(t_bf, t_ax)
        res = max(abs(new_bf - t_bf), abs(new_ax - t_ax))
        if res <= tol * 1e-3:
            t_bf, t_ax = new_bf, new_ax
            break
        if res > prev_res:
            damping *= 0.5
        prev_res = res
        t_bf = (1 - damping) * t_bf + damping * new_bf
        t_ax = (1 - damping) * t_ax + damping * new_ax
    new_bf, new_ax, p_bf, p_ax = step(t_bf, t_ax)
    res = max(abs(new_bf - t_bf), abs(new_ax - t_ax))
    if res > tol:
        raise ConvergenceFailure(f"fixed point did not converge after {it} iterations", residual=res)

    p_t_bf = 1.0 - (1.0 - t_bf) ** n_bf
    p_t_ax = 1.0 - (1.0 - t_ax) ** n_ax
    p_s_bf = success_probability(t_bf, n_bf, p_success)
    p_s_ax = success_probability(t_ax, n_ax, p_success)
    return FixedPointSolution(
        tau_bf=t_bf, tau_ax=t_ax, p_bf=p_bf, p_ax=p_ax, p_f_bf=p_bf, p_f_ax=p_ax,
        p_t_bf=p_t_bf, p_t_ax=p_t_ax, p_s_bf=p_s_bf, p_s_ax=p_s_ax,
        residual=res, iterations=it, n_bf=n_bf, n_ax=n_ax, edca_bf=edca_bf, edca_ax=edca_ax,
    )


def solve_fixed_point(config: ScenarioConfig) -> FixedPointSolution:
    pop = config.population
    opts = config.analytic
    return solve_populations(pop.n_bf_aps, pop.n_ax_aps, pop.edca_bf, pop.edca_ax, opts.tol, opts.max_iter, opts.p_success)


# ---------------------------------------------------------------------------
# event mixture and throughput


def event_weights(sol: FixedPointSolution) -> dict[str, float]:
    """The nine disjoint per-slot event probabilities of the mixture."""
    a, sa = sol.p_t_ax, sol.p_s_ax
    b, sb = sol.p_t_bf, sol.p_s_bf
    return {
        "idle": (1 - a) * (1 - b),
        "success_ax": a * sa * (1 - b),
        "success_bf": b * sb * (1 - a),
        "collision_ax": a * (1 - sa) * (1 - b),
        "collision_bf": b * (1 - sb) * (1 - a),
        "cross_ss": a * sa * b * sb,
        "cross_sc": a * sa * b * (1 - sb),
        "cross_cs": a * (1 - sa) * b * sb,
        "cross_cc": a * (1 - sa) * b * (1 - sb),
    }


def _cross_collision_time(sol: FixedPointSolution, dur: DurationTable) -> float:
    w = event_weights(sol)
    return (
        w["collision_ax"] * dur.t_c_ax
        + w["collision_bf"] * dur.t_c_bf
        + dur.t_c_cross * (w["cross_ss"] + w["cross_sc"] + w["cross_cs"] + w["cross_cc"])
    )


def mean_event_time(sol: FixedPointSolution, dur: DurationTable) -> float:
    w = event_weights(sol)
    return (
        w["idle"] * dur.sigma
        + w["success_ax"] * dur.t_s_ax
        + w["success_bf"] * dur.t_s_bf
        + _cross_collision_time(sol, dur)
    )


def ax_throughput(sol: FixedPointSolution, dur: DurationTable, traffic: AxTrafficProfile) -> tuple[float, float]:
    """Normalised ax throughput and delivered payload rate in bit/s."""
    t_m = mean_event_time(sol, dur)
    w = event_weights(sol)["success_ax"]
    normalized = w * dur.t_f_ax / t_m
    mpdus = dur.ax_mpdus or traffic.ampdu_count
    bps = w * mpdus * traffic.msdu_bits / t_m * 1e6
    return normalized, bps


# ---------------------------------------------------------------------------
# slot residency and mean backoff slot


def mean_window(p: float, edca: EdcaClass) -> float:
    """Average backoff window over stages, weighted by where access succeeds."""
    L = edca.retry_limit
    norm = 1.0 - p ** (L + 1)
    if norm <= 0.0:
        return float(edca.window(L))
    return sum((1 - p) * p**i * edca.window(i) for i in range(L + 1)) / norm


def collision_pmf(n_ax_c: int, n_bf_c: int, sol: FixedPointSolution) -> float:
    """Probability that exactly ``n_ax_c`` ax and ``n_bf_c`` bf APs transmit."""
    N_ax, N_bf = sol.n_ax, sol.n_bf
    if not (0 <= n_ax_c <= N_ax and 0 <= n_bf_c <= N_bf):
        return 0.0
    return (
        math.comb(N_ax, n_ax_c) * sol.tau_ax**n_ax_c * (1 - sol.tau_ax) ** (N_ax - n_ax_c)
        * math.comb(N_bf, n_bf_c) * sol.tau_bf**n_bf_c * (1 - sol.tau_bf) ** (N_bf - n_bf_c)
    )


def collision_exits(sol: FixedPointSolution) -> tuple[float, float]:
    """(P_ci, P_cs): leaving a collision towards an idle or a success slot."""
    cw_ax = mean_window(sol.p_ax, sol.edca_ax) if sol.edca_ax else 1.0
    cw_bf = mean_window(sol.p_bf, sol.edca_bf) if sol.edca_bf else 1.0
    q_ax = 1.0 - 1.0 / cw_ax
    q_bf = 1.0 - 1.0 / cw_bf
    p_ci = 0.0
    p_cs = 0.0
    for n_bf_c in range(2, sol.n_bf):
        for n_ax_c in range(0, sol.n_ax + 1):
            q = collision_pmf(n_ax_c, n_bf_c, sol)
            p_ci += q * q_ax**n_ax_c * q_bf**n_bf_c
            p_cs += q * n_bf_c * (1.0 / cw_bf) * q_bf ** (n_bf_c - 1) * q_ax**n_ax_c
    for n_ax_c in range(1, sol.n_ax + 1):
        p_cs += collision_pmf(n_ax_c, 1, sol) * (1.0 / cw_bf) * q_ax**n_ax_c
    return p_ci, p_cs


def neighbour_busy_times(sol: FixedPointSolution, dur: DurationTable) -> tuple[float, float, float, float]:
    """(P_succ, E[span | succ], P_coll, E[span | coll]) over the APs other than a tagged bf AP."""
    t_bf, t_ax = sol.tau_bf, sol.tau_ax
    n_bf = max(sol.n_bf - 1, 0)
    n_ax = sol.n_ax
    none_bf = (1 - t_bf) ** n_bf
    none_ax = (1 - t_ax) ** n_ax
    one_bf = n_bf * t_bf * (1 - t_bf) ** max(n_bf - 1, 0) if n_bf else 0.0
    one_ax = n_ax * t_ax * (1 - t_ax) ** max(n_ax - 1, 0) if n_ax else 0.0
    s_bf = one_bf * none_ax
    s_ax = one_ax * none_bf
    many_bf = 1 - none_bf - one_bf
    many_ax = 1 - none_ax - one_ax
    c_bf = many_bf * none_ax
    c_ax = many_ax * none_bf
    c_cross = (1 - none_bf) * (1 - none_ax)
    p_succ = s_bf + s_ax
    p_coll = c_bf + c_ax + c_cross
    e_succ = (s_bf * dur.t_s_bf + s_ax * dur.t_s_ax) / p_succ if p_succ > 0 else 0.0
    e_coll = (c_bf * dur.t_c_bf + c_ax * dur.t_c_ax + c_cross * dur.t_c_cross) / p_coll if p_coll > 0 else 0.0
    return p_succ, e_succ, p_coll, e_coll


def slot_residency(sol: FixedPointSolution, dur: DurationTable, config: ScenarioConfig | None = None) -> SlotResidency:
    """Residency of a backing-off bf AP per channel state, plus collision exits.

    ``printed`` follows the closed forms literally: busy durations weighted by
    unconditional event probabilities, a geometric run of successes and the
    consecutive-collision sum. ``renewal`` uses the mean span of a
    neighbour's success (d_S) or collision (d_C) given that it occurs.
    """
    opts = config.analytic if config is not None else AnalyticOptions()
    edca_bf = sol.edca_bf or (config.population.edca_bf if config else None)
    w0 = edca_bf.cw_min if edca_bf else 1
    p_ss = 1.0 / w0
    w = event_weights(sol)

    d_i = dur.sigma
    gamma = _cross_collision_time(sol, dur)
    p_ci, p_cs = collision_exits(sol)
    p_cc = 1.0 - p_ci - p_cs
    if -1e-12 < p_cc < 0.0:
        p_cc = 0.0
    if not 0.0 <= p_cc <= 1.0:
        raise ModelInconsistency(f"P_cc = {p_cc} outside [0, 1]")
    degenerate = p_cc >= 1.0 - 1e-15

    if opts.residency == "renewal":
        _, d_s, _, d_c = neighbour_busy_times(sol, dur)
        return SlotResidency(d_i=d_i, d_s=d_s, d_c=d_c, gamma=gamma, p_ci=p_ci, p_cs=p_cs, p_cc=p_cc, degenerate=degenerate)

    succ_time = w["success_ax"] * dur.t_s_ax + w["success_bf"] * dur.t_s_bf
    d_s = d_i + succ_time / (1.0 - p_ss) if p_ss < 1 else d_i + succ_time
    L = edca_bf.retry_limit if edca_bf else 0
    runs = sum(i * p_cc**i for i in range(L + 1))
    if degenerate:
        # no exit from collision is modelled; only the collision time remains
        d_c = runs * gamma
    else:
        d_c = runs * gamma + p_cs / (1 - p_cc) * d_s + p_ci / (1 - p_cc) * d_i
    return SlotResidency(d_i=d_i, d_s=d_s, d_c=d_c, gamma=gamma, p_ci=p_ci, p_cs=p_cs, p_cc=p_cc, degenerate=degenerate)


def busy_success_probability(sol: FixedPointSolution, variant: str = "printed") -> float:
    """Probability that a backing-off bf AP sees a neighbour's successful slot."""
    t_bf, t_ax, N_bf, N_ax = sol.tau_bf, sol.tau_ax, sol.n_bf, sol.n_ax
    bf_term = (N_bf - 1) * t_bf * (1 - t_bf) ** max(N_bf - 2, 0) * (1 - t_ax) ** N_ax if N_bf >= 2 else 0.0
    ax_term = N_ax * t_ax * (1 - t_ax) ** max(N_ax - 1, 0) if N_ax >= 1 else 0.0
    if variant == "corrected":
        ax_term *= (1 - t_bf) ** max(N_bf - 1, 0)
    return bf_term + ax_term


def mean_backoff_slot(sol: FixedPointSolution, res: SlotResidency, config: ScenarioConfig | None = None) -> BackoffSlot:
    opts = config.analytic if config is not None else AnalyticOptions()
    edca_bf = sol.edca_bf or config.population.edca_bf
    p_i = 1.0 - sol.p_bf
    p_s = busy_success_probability(sol, opts.busy_success)
    p_c = 1.0 - p_s - p_i
    if -1e-12 < p_c < 0.0:
        p_c = 0.0
    p_d = 1.0 if opts.p_d == "one" else p_i
    if p_d <= 0.0:
        raise SingularModel("backoff decrement probability is zero")
    busy = p_i * res.d_i + p_s * res.d_s + p_c * res.d_c
    f_b = busy / p_d
    cw_bar = mean_window(sol.p_bf, edca_bf)
    f_t = (cw_bar - 1) * busy / cw_bar
    f = (1 - sol.tau_bf) * f_b + sol.tau_bf * f_t
    return BackoffSlot(f_avg_slot=f, f_b=f_b, f_t=f_t, cw_bar=cw_bar, p_i=p_i, p_s=p_s, p_c=p_c, p_d=p_d)


# ---------------------------------------------------------------------------
# sensing delay


def tagged_collision_span(sol: FixedPointSolution, dur: DurationTable) -> float:
    """Mean span of a collision that involves a tagged bf AP."""
    if sol.p_bf <= 0.0:
        return dur.t_c_bf
    no_ax = (1 - sol.tau_ax) ** sol.n_ax
    bf_only = (1 - (1 - sol.tau_bf) ** max(sol.n_bf - 1, 0)) * no_ax
    return (bf_only * dur.t_c_bf + (1 - no_ax) * dur.t_c_cross) / sol.p_bf


def saturated_sensing_delay(
    sol: FixedPointSolution,
    dur: DurationTable,
    slot: BackoffSlot,
    res: SlotResidency | None = None,
    t_coll: float | None = None,
) -> DelayBreakdown:
    """Per-stage access delays and their success-weighted mean.

    ``t_coll`` is the time charged per own collision; T_c,bf by default.
    """
    t_coll = dur.t_c_bf if t_coll is None else t_coll
    edca = sol.edca_bf
    L = edca.retry_limit
    p = sol.p_bf
    norm = 1.0 - p ** (L + 1)
    f = slot.f_avg_slot
    terms: list[tuple[int, float, float]] = []
    backoff = 0.0
    total = 0.0
    for i in range(L + 1):
        backoff += (edca.window(i) - 1) / 2.0 * f
        t_i = dur.t_cfp + i * t_coll + backoff
        p_suc = (1 - p) * p**i
        terms.append((i, p_suc, t_i))
        total += p_suc * t_i
    mean = total / norm
    res = res or SlotResidency(0, 0, 0, 0, 0, 0, 1)
    return DelayBreakdown(
        mean_access_delay_T=mean, per_stage_terms=terms, f_avg_slot=f, f_b=slot.f_b, f_t=slot.f_t,
        cw_bar=slot.cw_bar, d_i=res.d_i, d_s=res.d_s, d_c=res.d_c, gamma=res.gamma,
        p_ci=res.p_ci, p_cs=res.p_cs, p_cc=res.p_cc,
    )


@dataclass(frozen=True)
class SaturatedPoint:
    """Everything the closed-form model says about one population mix."""

    solution: FixedPointSolution
    durations: DurationTable
    residency: SlotResidency
    slot: BackoffSlot
    delay: DelayBreakdown | None
    t_m: float
    ax_normalized: float
    ax_bps: float


def evaluate_saturated(config: ScenarioConfig, n_bf: int | None = None, n_ax: int | None = None) -> SaturatedPoint:
    pop = config.population
    n_bf = pop.n_bf_aps if n_bf is None else n_bf
    n_ax = pop.n_ax_aps if n_ax is None else n_ax
    opts = config.analytic
    sol = solve_populations(n_bf, n_ax, pop.edca_bf, pop.edca_ax, opts.tol, opts.max_iter, opts.p_success)
    dur = event_durations(config)
    res = slot_residency(sol, dur, config)
    slot = mean_backoff_slot(sol, res, config)
    t_coll = tagged_collision_span(sol, dur) if opts.residency == "renewal" else dur.t_c_bf
    delay = saturated_sensing_delay(sol, dur, slot, res, t_coll) if n_bf >= 1 else None
    norm, bps = ax_throughput(sol, dur, config.traffic)
    return SaturatedPoint(sol, dur, res, slot, delay, mean_event_time(sol, dur), norm, bps)


def _binomial_weights(n: int, p_busy: float) -> list[float]:
    return [math.comb(n, i) * p_busy**i * (1 - p_busy) ** (n - i) for i in range(n + 1)]


@dataclass(frozen=True)
class UnsaturatedResult:
    mean_delay: float
    p0: float
    mu_bar: float
    iterations: int
    residual: float


def unsaturated_sensing_delay(
    config: ScenarioConfig, sensing_rate_lambda: float, tol: float = 1e-12, max_iter: int = 10_000
) -> UnsaturatedResult:
    """Mean delay when bf requests arrive as a Poisson stream (rate per µs).

    The number of bf APs holding a request is binomial over all bf APs with
    probability ``1 - P0``; with ``i`` of them contending the delay is the
    saturated delay of a tagged AP among ``i`` bf contenders (``i = 0`` falls
    back to the tagged AP alone).
    """
    lam = sensing_rate_lambda
    if not lam > 0:
        raise UnstableSystem("sensing rate must be > 0")
    n_bf = config.population.n_bf_aps
    if n_bf < 1:
        raise SingularModel("the unsaturated model needs at least one bf AP")
    t_sat = [evaluate_saturated(config, n_bf=max(i, 1)).delay.mean_access_delay_T for i in range(n_bf + 1)]

    def mean_delay(p0: float) -> float:
        return sum(w * t for w, t in zip(_binomial_weights(n_bf, 1.0 - p0), t_sat))

    if 1.0 - lam * mean_delay(0.0) <= 0.0 and 1.0 - lam * t_sat[1] <= 0.0:
        raise UnstableSystem("sensing load exceeds service capacity at every contention level")

    p0 = max(1.0 - lam * t_sat[1], 0.0)
    it = 0
    for it in range(1, max_iter + 1):
        new = 1.0 - lam * mean_delay(p0)
        if new <= 0.0:
            if p0 == 0.0:
                raise UnstableSystem("sensing load exceeds service capacity (lambda >= mu)")
            new = 0.0
        if abs(new - p0) <= tol * max(p0, 1e-300):
            p0 = new
            break
        p0 = 0.5 * p0 + 0.5 * new
    else:
        raise ConvergenceFailure("unsaturated P0 iteration did not converge", residual=abs(new - p0))
    e_t = mean_delay(p0)
    if 1.0 - lam * e_t <= 0.0:
        raise UnstableSystem("sensing load exceeds service capacity (lambda >= mu)")
    return UnsaturatedResult(mean_delay=e_t, p0=p0, mu_bar=1.0 / e_t, iterations=it, residual=abs(p0 - (1.0 - lam * e_t)))


def swap_populations(config: ScenarioConfig) -> ScenarioConfig:
    pop = config.population
    return config.with_population(
        n_bf_aps=pop.n_ax_aps, n_ax_aps=pop.n_bf_aps, edca_bf=pop.edca_ax, edca_ax=pop.edca_bf
    )


# ---------------------------------------------------------------------------
# one comparable point per arrival mode


@dataclass(frozen=True)
class AnalyticPoint:
    """Closed-form counterpart of a simulated scenario."""

    mean_latency_us: float
    aggregate_bps: float
    arrival_mode: str
    fixed_point: FixedPointSolution
    saturated_delay_us: float
    residual_us: float = 0.0


def arrival_residual(config: ScenarioConfig) -> float:
    """Mean remaining busy time seen by a request arriving at a random instant.

    Length-biased residual of the channel events of the ax-only population,
    E[X^2] / (2 E[X]).
    """
    n_ax = config.population.n_ax_aps
    if n_ax < 1:
        return 0.0
    pop = config.population
    opts = config.analytic
    sol = solve_populations(0, n_ax, pop.edca_bf, pop.edca_ax, opts.tol, opts.max_iter, opts.p_success)
    dur = event_durations(config)
    w = event_weights(sol)
    spans = [(w["idle"], dur.sigma), (w["success_ax"], dur.t_s_ax), (w["collision_ax"], dur.t_c_ax)]
    m1 = sum(p * x for p, x in spans)
    m2 = sum(p * x * x for p, x in spans)
    return m2 / (2.0 * m1)


def analytic_point(config: ScenarioConfig) -> AnalyticPoint:
    """Mean bf latency and aggregate ax throughput for the configured arrivals.

    continuous: saturated delay among all bf APs.
    poisson: unsaturated binomial mixture plus the arrival residual.
    periodic: synchronised batches drain with k = N_bf..1 contenders, so the
    latency is the mean of the saturated delays over k plus the residual and
    throughput is time-weighted over the drain phases and the idle tail.
    """
    pop = config.population
    n_bf = pop.n_bf_aps
    mode = config.arrival.mode
    full = evaluate_saturated(config)
    if n_bf < 1:
        return AnalyticPoint(math.nan, full.ax_bps, mode, full.solution, math.nan)
    t_full = full.delay.mean_access_delay_T
    if mode == "continuous":
        return AnalyticPoint(t_full, full.ax_bps, mode, full.solution, t_full)

    resid = arrival_residual(config)
    sat = {k: evaluate_saturated(config, n_bf=k) for k in range(0, n_bf + 1)}
    if mode == "poisson":
        un = unsaturated_sensing_delay(config, config.arrival.rate_per_us)
        weights = _binomial_weights(n_bf, 1.0 - un.p0)
        bps = sum(wt * sat[i].ax_bps for i, wt in enumerate(weights))
        return AnalyticPoint(un.mean_delay + resid, bps, mode, full.solution, t_full, resid)

    delays = [sat[k].delay.mean_access_delay_T for k in range(1, n_bf + 1)]
    latency = sum(delays) / n_bf + resid
    interval = config.arrival.interval_us
    left = interval
    acc = 0.0
    for k in range(n_bf, 0, -1):
        span = min(sat[k].delay.mean_access_delay_T / k, left)
        acc += span * sat[k].ax_bps
        left -= span
    acc += left * sat[0].ax_bps
    return AnalyticPoint(latency, acc / interval, mode, full.solution, t_full, resid)

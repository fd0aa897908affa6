import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from coexlab.analytic import (
    analytic_point,
    arrival_residual,
    attempt_probability,
    ax_throughput,
    busy_success_probability,
    collision_exits,
    collision_pmf,
    evaluate_saturated,
    event_weights,
    mean_backoff_slot,
    mean_event_time,
    mean_window,
    saturated_sensing_delay,
    slot_residency,
    solve_fixed_point,
    solve_populations,
    success_probability,
    swap_populations,
    unsaturated_sensing_delay,
)
from coexlab.config import PRINTED, AnalyticOptions, ArrivalModel, ScenarioConfig
from coexlab.errors import ConvergenceFailure, SingularModel, UnstableSystem
from coexlab.model import EDCA_CLASSES, EdcaClass, event_durations
from oracles import chain_attempt_probability, chain_fixed_point, enumerate_collision_exits

edca_st = st.sampled_from(sorted(EDCA_CLASSES))


def cfg_with(n_bf=1, n_ax=1, **kw) -> ScenarioConfig:
    return ScenarioConfig().with_population(n_bf_aps=n_bf, n_ax_aps=n_ax, **kw)


# attempt probability ---------------------------------------------------------


@pytest.mark.parametrize("cw", [1, 2, 4, 8, 16, 32, 1024])
def test_lone_contender_attempt_probability(cw):
    edca = EdcaClass(cw_min=cw, cw_max=cw * 4, aifs=2, retry_limit=3)
    assert attempt_probability(0.0, 0.0, edca) == pytest.approx(2 / (cw + 1), abs=1e-12)


def test_attempt_probability_matches_stage_sum():
    edca = EdcaClass(cw_min=8, cw_max=32, aifs=2, retry_limit=3)
    p, pf = 0.3, 0.2
    num = sum(p**j for j in range(4))
    den = sum((1 + sum((w - k) / w for k in range(1, w)) / (1 - pf)) * p**j for j, w in enumerate(edca.windows()))
    assert attempt_probability(p, pf, edca) == pytest.approx(num / den, rel=1e-13)


def test_attempt_probability_rejects_full_freezing():
    with pytest.raises(SingularModel):
        attempt_probability(0.1, 1.0, EDCA_CLASSES["BE"])


@given(st.floats(0, 1), st.floats(0, 0.999), edca_st)
def test_attempt_probability_bounded(p, pf, name):
    tau = attempt_probability(p, pf, EDCA_CLASSES[name])
    assert 0 < tau <= 1


@pytest.mark.parametrize("p,pf", [(0.0, 0.0), (0.2, 0.2), (0.35, 0.1), (0.6, 0.6)])
def test_attempt_probability_matches_chain(p, pf):
    edca = EdcaClass(cw_min=4, cw_max=16, aifs=2, retry_limit=2)
    assert attempt_probability(p, pf, edca) == pytest.approx(chain_attempt_probability(edca.windows(), p, pf), abs=1e-10)


# fixed point ------------------------------------------------------------------


def test_fixed_point_matches_chain_oracle():
    edca = EdcaClass(cw_min=4, cw_max=16, aifs=2, retry_limit=2)
    sol = solve_populations(0, 2, edca, edca)
    assert sol.tau_ax == pytest.approx(chain_fixed_point(edca.windows(), 2), abs=1e-6)
    assert sol.tau_bf == 0.0


def test_single_ap_fixed_point_is_closed_form():
    sol = solve_fixed_point(cfg_with(1, 0))
    assert sol.tau_bf == pytest.approx(2 / (EDCA_CLASSES["BE"].cw_min + 1), abs=1e-9)
    assert sol.p_bf == 0.0


@given(st.integers(0, 9), st.integers(0, 9), edca_st, edca_st)
def test_fixed_point_probabilities_in_unit_interval(n_bf, n_ax, a, b):
    assume(n_bf + n_ax >= 1)
    sol = solve_populations(n_bf, n_ax, EDCA_CLASSES[a], EDCA_CLASSES[b])
    for v in (sol.tau_bf, sol.tau_ax, sol.p_bf, sol.p_ax, sol.p_t_bf, sol.p_t_ax, sol.p_s_bf, sol.p_s_ax):
        assert 0.0 <= v <= 1.0
    assert sol.residual <= 1e-9


@given(st.integers(1, 9), st.integers(1, 9), edca_st, edca_st)
def test_swap_symmetry(n_bf, n_ax, a, b):
    cfg = cfg_with(n_bf, n_ax, edca_bf=EDCA_CLASSES[a], edca_ax=EDCA_CLASSES[b])
    s1 = solve_fixed_point(cfg)
    s2 = solve_fixed_point(swap_populations(cfg))
    assert s1.tau_bf == pytest.approx(s2.tau_ax, abs=1e-9)
    assert s1.tau_ax == pytest.approx(s2.tau_bf, abs=1e-9)


def test_no_aps_is_singular():
    with pytest.raises(SingularModel):
        solve_populations(0, 0, EDCA_CLASSES["BE"], EDCA_CLASSES["BE"])


def test_iteration_budget_exhaustion_raises():
    with pytest.raises(ConvergenceFailure) as exc:
        solve_populations(5, 5, EDCA_CLASSES["BE"], EDCA_CLASSES["BE"], tol=1e-15, max_iter=1)
    assert exc.value.residual > 0


def test_success_probability_variants():
    assert success_probability(0.2, 1) == pytest.approx(1.0)
    assert success_probability(0.2, 1, "printed") == pytest.approx(0.8)
    tau, n = 0.1, 4
    assert success_probability(tau, n) == pytest.approx(n * tau * (1 - tau) ** 3 / (1 - (1 - tau) ** 4))
    assert success_probability(0.0, 3) == 0.0


# event mixture ---------------------------------------------------------------


@given(st.integers(0, 9), st.integers(0, 9))
def test_event_weights_sum_to_one(n_bf, n_ax):
    assume(n_bf + n_ax >= 1)
    w = event_weights(solve_fixed_point(cfg_with(n_bf, n_ax)))
    assert sum(w.values()) == pytest.approx(1.0, abs=1e-12)
    assert all(v >= 0 for v in w.values())


def test_mean_event_time_monte_carlo():
    cfg = cfg_with(3, 2)
    sol = solve_fixed_point(cfg)
    dur = event_durations(cfg)
    rng = np.random.default_rng(7)
    n = 4_000_000
    k_bf = rng.binomial(sol.n_bf, sol.tau_bf, n)
    k_ax = rng.binomial(sol.n_ax, sol.tau_ax, n)
    span = np.full(n, dur.sigma)
    span[(k_ax == 1) & (k_bf == 0)] = dur.t_s_ax
    span[(k_bf == 1) & (k_ax == 0)] = dur.t_s_bf
    span[(k_ax >= 2) & (k_bf == 0)] = dur.t_c_ax
    span[(k_bf >= 2) & (k_ax == 0)] = dur.t_c_bf
    span[(k_ax >= 1) & (k_bf >= 1)] = dur.t_c_cross
    assert span.mean() == pytest.approx(mean_event_time(sol, dur), rel=0.01)


def test_throughput_of_lone_ax_ap():
    cfg = cfg_with(0, 1)
    sol = solve_fixed_point(cfg)
    dur = event_durations(cfg)
    norm, bps = ax_throughput(sol, dur, cfg.traffic)
    tau = sol.tau_ax
    t_m = (1 - tau) * dur.sigma + tau * dur.t_s_ax
    assert norm == pytest.approx(tau * dur.t_f_ax / t_m)
    assert bps == pytest.approx(tau * dur.ax_mpdus * cfg.traffic.msdu_bits / t_m * 1e6)


@given(st.integers(0, 9), st.integers(1, 9), edca_st)
def test_normalised_throughput_in_unit_interval(n_bf, n_ax, name):
    cfg = cfg_with(n_bf, n_ax, edca_bf=EDCA_CLASSES[name])
    norm, bps = ax_throughput(solve_fixed_point(cfg), event_durations(cfg), cfg.traffic)
    assert 0.0 <= norm <= 1.0 and bps >= 0


def test_sensing_aps_reduce_throughput():
    vals = [evaluate_saturated(cfg_with(n, 1)).ax_bps for n in range(0, 6)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


# residency and collision exits -------------------------------------------------


def test_q_pmf_sums_to_one():
    sol = solve_fixed_point(cfg_with(3, 2))
    total = sum(collision_pmf(a, b, sol) for a in range(3) for b in range(4))
    assert total == pytest.approx(1.0, abs=1e-14)
    assert collision_pmf(3, 0, sol) == 0.0


@given(st.integers(1, 8), st.integers(0, 8))
def test_q_pmf_sums_to_one_property(n_bf, n_ax):
    sol = solve_fixed_point(cfg_with(n_bf, n_ax))
    total = sum(collision_pmf(a, b, sol) for a in range(n_ax + 1) for b in range(n_bf + 1))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_collision_exits_match_enumeration():
    cfg = cfg_with(3, 2)
    sol = solve_fixed_point(cfg)
    p_ci, p_cs = collision_exits(sol)
    want = enumerate_collision_exits(
        3, 2, sol.tau_bf, sol.tau_ax, mean_window(sol.p_bf, sol.edca_bf), mean_window(sol.p_ax, sol.edca_ax)
    )
    assert p_ci == pytest.approx(want[0], abs=1e-9)
    assert p_cs == pytest.approx(want[1], abs=1e-9)


@given(st.integers(1, 8), st.integers(0, 8), st.sampled_from(["printed", "renewal"]))
def test_collision_exit_probabilities_partition(n_bf, n_ax, residency):
    cfg = replace(cfg_with(n_bf, n_ax), analytic=AnalyticOptions(residency=residency))
    sol = solve_fixed_point(cfg)
    res = slot_residency(sol, event_durations(cfg), cfg)
    assert res.p_ci + res.p_cs + res.p_cc == pytest.approx(1.0, abs=1e-12)
    for v in (res.p_ci, res.p_cs, res.p_cc):
        assert 0.0 <= v <= 1.0
    assert res.d_i == cfg.timing.sigma


def test_degenerate_collision_chain_is_flagged():
    # a lone bf AP has no collision partner, so no exit is ever modelled
    cfg = replace(cfg_with(1, 0), analytic=PRINTED)
    res = slot_residency(solve_fixed_point(cfg), event_durations(cfg), cfg)
    assert res.degenerate and res.p_cc == pytest.approx(1.0)


def test_mean_window_limits():
    edca = EDCA_CLASSES["BE"]
    assert mean_window(0.0, edca) == edca.cw_min
    assert edca.cw_min < mean_window(0.5, edca) < edca.cw_max


def test_lone_bf_backoff_slot_is_sigma():
    cfg = cfg_with(1, 0)
    sol = solve_fixed_point(cfg)
    dur = event_durations(cfg)
    slot = mean_backoff_slot(sol, slot_residency(sol, dur, cfg), cfg)
    assert slot.f_b == pytest.approx(dur.sigma)
    assert slot.cw_bar == EDCA_CLASSES["BE"].cw_min


def test_busy_success_variants_differ_only_with_multiple_bf():
    one = solve_fixed_point(cfg_with(1, 3))
    assert busy_success_probability(one, "printed") == pytest.approx(busy_success_probability(one, "corrected"))
    many = solve_fixed_point(cfg_with(4, 3))
    assert busy_success_probability(many, "corrected") < busy_success_probability(many, "printed")


# sensing delay ------------------------------------------------------------------


@pytest.mark.parametrize("opts", [AnalyticOptions(), PRINTED])
def test_lone_bf_delay_is_cfp_plus_backoff(opts):
    cfg = replace(cfg_with(1, 0), analytic=opts)
    pt = evaluate_saturated(cfg)
    dur = pt.durations
    w0 = EDCA_CLASSES["BE"].cw_min
    tau = 2 / (w0 + 1)
    f = (1 - tau) * dur.sigma + tau * (w0 - 1) / w0 * dur.sigma
    assert pt.slot.f_b == pytest.approx(dur.sigma)
    assert pt.delay.mean_access_delay_T == pytest.approx(dur.t_cfp + (w0 - 1) / 2 * f, rel=1e-12)


@given(st.integers(1, 9), st.integers(0, 9))
def test_stage_weights_normalise(n_bf, n_ax):
    pt = evaluate_saturated(cfg_with(n_bf, n_ax))
    p = pt.solution.p_bf
    L = pt.solution.edca_bf.retry_limit
    total = sum(w for _, w, _ in pt.delay.per_stage_terms) / (1 - p ** (L + 1))
    assert total == pytest.approx(1.0, abs=1e-12)
    assert all(t >= pt.durations.t_cfp for _, _, t in pt.delay.per_stage_terms)


@pytest.mark.parametrize("opts", [AnalyticOptions(), PRINTED])
def test_delay_grows_with_bf_population(opts):
    vals = [evaluate_saturated(replace(cfg_with(n, 1), analytic=opts)).delay.mean_access_delay_T for n in range(1, 10)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_delay_grows_with_ax_population():
    vals = [evaluate_saturated(cfg_with(1, n)).delay.mean_access_delay_T for n in range(1, 10)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_explicit_collision_span_is_charged_per_stage():
    cfg = cfg_with(2, 2)
    pt = evaluate_saturated(cfg)
    a = saturated_sensing_delay(pt.solution, pt.durations, pt.slot, t_coll=0.0)
    b = saturated_sensing_delay(pt.solution, pt.durations, pt.slot, t_coll=100.0)
    for (i, _, ta), (_, _, tb) in zip(a.per_stage_terms, b.per_stage_terms):
        assert tb - ta == pytest.approx(100.0 * i)


# unsaturated model ---------------------------------------------------------------


@pytest.mark.parametrize("n_bf,n_ax,rate_hz", [(1, 1, 10), (3, 2, 20), (5, 5, 10), (9, 1, 5)])
def test_unsaturated_consistency(n_bf, n_ax, rate_hz):
    lam = rate_hz * 1e-6
    res = unsaturated_sensing_delay(cfg_with(n_bf, n_ax), lam)
    assert abs(res.p0 - (1 - lam * res.mean_delay)) <= 1e-6
    assert 0 <= res.p0 <= 1


def test_unsaturated_light_load_tends_to_lone_delay():
    cfg = cfg_with(4, 2)
    lone = evaluate_saturated(cfg, n_bf=1).delay.mean_access_delay_T
    assert unsaturated_sensing_delay(cfg, 1e-12).mean_delay == pytest.approx(lone, rel=1e-6)


def test_unsaturated_delay_grows_with_load():
    cfg = cfg_with(4, 2)
    vals = [unsaturated_sensing_delay(cfg, r * 1e-6).mean_delay for r in (1, 5, 20, 40)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_unsaturated_instability_reported():
    cfg = cfg_with(3, 3)
    t1 = evaluate_saturated(cfg, n_bf=1).delay.mean_access_delay_T
    with pytest.raises(UnstableSystem):
        unsaturated_sensing_delay(cfg, 2.0 / t1)
    with pytest.raises(UnstableSystem):
        unsaturated_sensing_delay(cfg, 0.0)


# comparable points -------------------------------------------------------------


def test_arrival_residual_of_idle_channel():
    assert arrival_residual(cfg_with(1, 0)) == 0.0
    r = arrival_residual(cfg_with(1, 1))
    assert 0 < r < event_durations(cfg_with(1, 1)).t_s_ax


@pytest.mark.parametrize("mode", ["continuous", "periodic", "poisson"])
def test_analytic_point_modes(mode):
    cfg = replace(cfg_with(3, 2), arrival=ArrivalModel(mode=mode))
    pt = analytic_point(cfg)
    assert pt.arrival_mode == mode
    assert pt.mean_latency_us >= pt.saturated_delay_us * (mode == "continuous") > -1
    assert pt.aggregate_bps > 0
    if mode == "continuous":
        assert pt.mean_latency_us == pytest.approx(evaluate_saturated(cfg).delay.mean_access_delay_T)


def test_analytic_point_without_bf():
    pt = analytic_point(cfg_with(0, 2))
    assert math.isnan(pt.mean_latency_us) and pt.aggregate_bps > 0


def test_single_node_closed_form_example():
    edca = EdcaClass(cw_min=16, cw_max=1024, aifs=2, retry_limit=5)
    assert attempt_probability(0.0, 0.0, edca) == pytest.approx(2 / 17, abs=1e-12)

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from infgraph.errors import DomainError, NumericError, PreconditionError, UnsupportedError
from infgraph.esa import (L2_BOUNDED, L2_DIVERGENT, UNDETERMINED, agmon_identity_check, classify_l2,
                          deficiency_recurrence, esa_probe, growth_witness, sandwich_check)
from infgraph.graph import FamilySpec, build_family, combinatorial_ball, half_line
from infgraph.metric import MetricContext, ball_distances, cutoff
from infgraph.operator import SchrodingerData, form_lower_bound, gauge_to_schrodinger

from conftest import rel_close, seeded


def unit_ray(start=1, W=0.0):
    return SchrodingerData.uniform(half_line(start), 1.0, W)


def table_ray(rng, period=None):
    period = period or int(rng.integers(1, 6))
    cs = rng.uniform(0.05, 5.0, period)
    g = half_line(1, 1.0, lambda n: float(cs[n % period]))
    return gauge_to_schrodinger(g)


# ---------------------------------------------------------------------------
# recurrence


def test_recurrence_fibonacci_odd_terms_exact():
    sol = deficiency_recurrence(unit_ray(), 1.0, 60, -1.0)
    assert [sol[n] for n in range(1, 6)] == [1.0, 2.0, 5.0, 13.0, 34.0]
    v = sol.values
    assert np.all(v[2:] == 3 * v[1:-1] - v[:-2]) or np.allclose(v[2:], 3 * v[1:-1] - v[:-2], rtol=1e-15)
    assert v[-1] / v[-2] == pytest.approx((3 + math.sqrt(5)) / 2, rel=1e-12)


def test_recurrence_trivial_cases():
    assert np.all(deficiency_recurrence(unit_ray(), 0.0, 100).values == 0.0)
    sol = deficiency_recurrence(unit_ray(), 2.5, 100, 0.0)
    assert np.all(sol.values == 2.5)


def test_recurrence_rejects_non_rays_and_short_ranges():
    s = gauge_to_schrodinger(build_family(FamilySpec("tree")))
    with pytest.raises(UnsupportedError):
        deficiency_recurrence(s, 1.0, 10)
    with pytest.raises(DomainError):
        deficiency_recurrence(unit_ray(start=3), 1.0, 3)


def test_recurrence_underflowing_coefficient_is_numeric_error():
    s = SchrodingerData(half_line(1), lambda x, y: 0.0 if min(x, y) == 4 else 1.0, lambda x: 0.0)
    with pytest.raises(NumericError):
        deficiency_recurrence(s, 1.0, 10)


def test_recurrence_log_domain_past_overflow():
    sol = deficiency_recurrence(unit_ray(), 1.0, 2000, -1.0)
    assert sol.rescaled
    ratio = (3 + math.sqrt(5)) / 2
    # v(n) ~ C ratio**n, so log|v| grows linearly with slope ln(ratio)
    la = sol.log_abs
    assert la[-1] - la[-2] == pytest.approx(math.log(ratio), rel=1e-12)
    assert la[-1] > 700  # far beyond double range
    assert np.all(np.diff(sol.log_partial_l2) >= 0)
    assert sol.residuals.max() <= 1e-10


@given(st.floats(-5, -0.01), st.floats(0.1, 3.0), st.integers(55, 400))
def test_recurrence_residual_and_monotone_partial_sums(lam, v0, N):
    s = gauge_to_schrodinger(build_family(FamilySpec("power", alpha=0.5, beta=1.0, start=2)))
    sol = deficiency_recurrence(s, v0, N, lam)
    assert sol.stop == N and sol[2] == v0
    assert sol.residuals.max() <= 1e-10
    assert np.all(np.diff(sol.log_partial_l2) >= 0)


# ---------------------------------------------------------------------------
# classification


def test_classify_examples():
    sol = deficiency_recurrence(unit_ray(), 1.0, 200, -1.0)
    assert classify_l2(sol).classification == L2_DIVERGENT
    zero = deficiency_recurrence(unit_ray(), 0.0, 200, -1.0)
    assert classify_l2(zero).classification == UNDETERMINED
    with pytest.raises(PreconditionError):
        classify_l2(deficiency_recurrence(unit_ray(), 1.0, 40, -1.0))


def test_classify_geometric_decay_is_bounded():
    # v(n) = 2**-n solves a Jacobi recurrence with a = 1 and W(n) - lam = -2.5 on the interior
    from infgraph.esa import DeficiencySolution
    n = np.arange(1, 201)
    sol = DeficiencySolution(1, -1.0, 0.5, 2.0 ** -n, np.zeros(200), np.zeros(199))
    v = classify_l2(sol)
    assert v.classification == L2_BOUNDED
    assert v.details["tail_ratio"] == pytest.approx(0.25)


def test_incomplete_metric_family_not_l2_bounded():
    s = gauge_to_schrodinger(build_family(FamilySpec("power", alpha=0, epsilon=1, start=2)))
    sol = deficiency_recurrence(s, 1.0, 3000, -1.0)
    assert classify_l2(sol).classification != L2_BOUNDED


# ---------------------------------------------------------------------------
# growth witness


def test_witness_examples():
    s = unit_ray()
    sol = deficiency_recurrence(s, 1.0, 150, -1.0)
    assert growth_witness(s, sol) == list(range(1, 151))
    neg = deficiency_recurrence(s, -1.0, 150, -1.0)
    assert growth_witness(s, neg) == list(range(1, 151))


def test_witness_skips_leading_zeros():
    from infgraph.esa import DeficiencySolution
    s = unit_ray()
    full = deficiency_recurrence(s, 1.0, 100, -1.0)
    # the same solution viewed on a ray starting two steps earlier with zero padding
    mant = np.concatenate([[0.0, 0.0], full.mantissa])
    padded = DeficiencySolution(1, -1.0, 0.0, mant, np.zeros(len(mant)), np.zeros(len(mant) - 1))
    assert growth_witness(s, padded)[0] == 3


def test_witness_requires_positive_shifted_potential():
    s = unit_ray()
    sol = deficiency_recurrence(s, 1.0, 100, 0.0)
    with pytest.raises(PreconditionError):
        growth_witness(s, sol)


def test_witness_on_random_constant_weight_families():
    rng = seeded(11)
    for _ in range(12):
        s = table_ray(rng)
        sol = deficiency_recurrence(s, 1.0, 400, -1.0)
        chain = growth_witness(s, sol)
        vals = [sol.log_abs[i - 1] for i in chain]
        assert len(chain) >= 100
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert classify_l2(sol).classification == L2_DIVERGENT


# ---------------------------------------------------------------------------
# Agmon identity


def test_agmon_zero_and_single_vertex():
    s = unit_ray()
    sol = deficiency_recurrence(s, 1.0, 50, -1.0)
    assert agmon_identity_check(s, -1.0, sol, {}).lhs == 0.0
    chk = agmon_identity_check(s, -1.0, sol, {1: 1.0})
    assert chk.lhs == pytest.approx(2.0, rel=1e-12)
    assert chk.edge_sum == pytest.approx(2.0, rel=1e-12)
    assert chk.vertex_sum == pytest.approx(2.0, rel=1e-12)
    assert chk.holds


def test_agmon_support_must_stay_inside_solution():
    s = unit_ray()
    sol = deficiency_recurrence(s, 1.0, 50, -1.0)
    with pytest.raises(PreconditionError):
        agmon_identity_check(s, -1.0, sol, {50: 1.0})


def test_agmon_rejects_non_solution():
    s = unit_ray()
    sol = deficiency_recurrence(s, 1.0, 50, -1.0)
    with pytest.raises(PreconditionError):
        agmon_identity_check(s.with_potential(0.3), -1.0, sol, {3: 1.0})


@pytest.mark.parametrize("spec", [FamilySpec("power", alpha=0, beta=0), FamilySpec("power", alpha=1, beta=0),
                                  FamilySpec("log"),
                                  FamilySpec("table", table=((1.0, 0.3), (2.0, 4.0), (0.7, 1.1)))],
                         ids=["unit", "power", "log", "table"])
def test_agmon_random_cutoffs(spec):
    s = gauge_to_schrodinger(build_family(spec))
    ctx = MetricContext.from_schrodinger(s)
    start = s.graph.start
    rng = seeded(3)
    sols = {}
    r_max = 1.0 if spec.kind == "half-line-log" else 3.0
    for _ in range(100):
        lam = float(rng.choice([-1.0, -2.0, -0.5]))
        R = float(rng.uniform(0, r_max))
        f = cutoff(ctx, start, R)
        if rng.random() < 0.5:  # random finitely supported f as well
            f = {x: float(rng.normal()) for x in range(start, start + int(rng.integers(1, 30)))}
        top = max(f) + 3
        key = (lam, top)
        if key not in sols:
            sols[key] = deficiency_recurrence(s, 1.0, top, lam)
        chk = agmon_identity_check(s, lam, sols[key], f)
        assert chk.gap <= 1e-9, (R, chk)


# ---------------------------------------------------------------------------
# sandwich inequality


def test_sandwich_trivial_solution():
    s = unit_ray()
    ctx = MetricContext.from_schrodinger(s)
    sol = deficiency_recurrence(s, 0.0, 40, -2.0)
    cert = sandwich_check(s, -2.0, sol, ctx, 1, 5.0, 0.0, 2)
    assert cert.lower == cert.middle == cert.upper_shell == 0.0
    assert cert.lower_holds and cert.shell_holds and cert.transition_holds


def test_sandwich_unit_ray_example():
    s = unit_ray()
    reg = combinatorial_ball(s.graph, 1, 1999)
    k = form_lower_bound(s, reg)
    assert k.k >= -1e-12
    lam = k.k - 2.0
    sol = deficiency_recurrence(s, 1.0, 40, lam)
    cert = sandwich_check(s, lam, sol, MetricContext.from_schrodinger(s), 1, 5.0, k, 2)
    assert cert.lower_holds and cert.transition_holds
    assert cert.lower == pytest.approx(sum(sol[n] ** 2 for n in range(1, 7)), rel=1e-12)


def test_sandwich_precondition():
    s = unit_ray()
    ctx = MetricContext.from_schrodinger(s)
    sol = deficiency_recurrence(s, 1.0, 40, -1.0)
    with pytest.raises(PreconditionError):
        sandwich_check(s, -1.0, sol, ctx, 1, 3.0, 0.0, 2)
    small = form_lower_bound(s, combinatorial_ball(s.graph, 1, 3))
    with pytest.raises(PreconditionError):
        sandwich_check(s, -2.0, deficiency_recurrence(s, 1.0, 40, -2.0), ctx, 1, 5.0, small, 2)


@pytest.mark.parametrize("spec", [FamilySpec("power", alpha=0, beta=0), FamilySpec("power", alpha=1, beta=0),
                                  FamilySpec("log")], ids=["unit", "power", "log"])
def test_sandwich_lower_and_transition_bounds_hold(spec):
    s = gauge_to_schrodinger(build_family(spec))
    ctx = MetricContext.from_schrodinger(s)
    radii = [0.5, 1.0, 1.5] if spec.kind == "half-line-log" else [3, 4, 5, 6]
    top = max(ball_distances(ctx, s.graph.start, max(radii) + 1))
    sol = deficiency_recurrence(s, 1.0, top + 2, -2.0)
    shells = []
    for R in radii:
        cert = sandwich_check(s, -2.0, sol, ctx, s.graph.start, R, 0.0, 2)
        assert cert.lower_holds and cert.transition_holds, cert
        shells.append(cert.upper_shell)
    # divergent solution: the shell mass cannot shrink to zero
    assert shells[-1] >= shells[0]


# ---------------------------------------------------------------------------
# orchestration


def test_probe_constant_weight_family():
    rep = esa_probe(FamilySpec("table", table=((1.0, 0.4), (1.0, 2.0))), N=400, radii=[3, 4])
    assert rep.classification == L2_DIVERGENT
    assert rep.witness is not None and len(rep.witness) >= 100
    assert len(rep.certificates) == 2


def test_probe_log_family():
    rep = esa_probe(FamilySpec("log"), N=2000, radii=[0.5, 1.0])
    assert rep.completeness == "complete"
    assert rep.form_bound >= -1e-9
    assert rep.classification != L2_BOUNDED
    assert not rep.w_bounded_below
    s = gauge_to_schrodinger(build_family(FamilySpec("log")))
    gaps = [abs(s.W(n) / math.log(n) + 1) for n in (100, 10_000)]
    assert gaps[1] < gaps[0]
    shifted = esa_probe(FamilySpec("log"), mode="schrodinger-with-shift", N=500, radii=[])
    assert shifted.lam == pytest.approx(shifted.form_bound - 2.0)


def test_probe_power_two_zero_asymptote():
    s = gauge_to_schrodinger(build_family(FamilySpec("power", alpha=2, beta=0, start=2)))
    for n in (100, 10_000):
        assert rel_close(s.W(n) / (-2.0 * n * n), 1.0, 1e-9)


def test_probe_shift_for_bounded_potential():
    rep = esa_probe(FamilySpec("power", alpha=0, beta=0), mode="schrodinger-with-shift", N=300, radii=[3])
    assert rep.w_bounded_below
    assert rep.lam == pytest.approx(rep.w_min - 1.0)
    assert rep.classification == L2_DIVERGENT


def test_probe_rejects_bad_inputs():
    with pytest.raises(UnsupportedError):
        esa_probe(FamilySpec("tree"))
    with pytest.raises(DomainError):
        esa_probe(FamilySpec("power"), mode="nope")

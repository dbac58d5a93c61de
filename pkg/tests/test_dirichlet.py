
import numpy as np
import pytest
from hypothesis import given, strategies as st

from infgraph.dirichlet import (CONSTANT, NOT_APPLICABLE, VIOLATION, DirichletProblem, conjugate_gradient,
                                dirichlet_residual, harnack_constant, harnack_sweep, harnack_verify,
                                minimum_principle_check, solve_dirichlet)
from infgraph.errors import DomainError, PreconditionError
from infgraph.graph import BinaryTree, combinatorial_ball, half_line, interior_connectivity, path_graph, region
from infgraph.operator import SchrodingerData

from conftest import random_connected_graph


def path_op(n, W=0.0, a=1.0):
    """Segment {0..n-1} inside the longer path {0..n}: vertex 0 is an endpoint of the
    graph, so we shift by one and use {1..n} as stand-in for the segment."""
    g = path_graph(list(range(n + 2)))
    s = SchrodingerData.uniform(g, a=a).with_potential(
        (lambda x: W(x - 1)) if callable(W) else W)
    return s, region(g, range(1, n + 1))


def test_linear_interpolation():
    s, reg = path_op(4)
    f = solve_dirichlet(DirichletProblem(s, reg, {1: 0.0, 4: 3.0}))
    assert abs(f[2] - 1.0) <= 1e-12 and abs(f[3] - 2.0) <= 1e-12


def test_potential_two_thirds():
    s, reg = path_op(3, W=lambda x: 1.0 if x == 1 else 0.0)
    f = solve_dirichlet(DirichletProblem(s, reg, {1: 1.0, 3: 1.0}))
    assert abs(f[2] - 2 / 3) <= 1e-12


def test_zero_data_gives_zero():
    s, reg = path_op(6)
    f = solve_dirichlet(DirichletProblem(s, reg, {1: 0.0, 6: 0.0}))
    assert all(v == 0.0 for v in f.values())


def test_problem_validation():
    s, reg = path_op(4)
    with pytest.raises(DomainError):
        DirichletProblem(s, reg, {1: 1.0})
    with pytest.raises(DomainError):
        DirichletProblem(s, reg, {1: 1.0, 4: 1.0, 2: 0.0})
    g = half_line(1)
    two = region(g, [4, 5, 6, 49, 50, 51])
    with pytest.raises(DomainError):
        DirichletProblem(SchrodingerData.uniform(g), two, {b: 1.0 for b in two.boundary})


def test_non_positive_form_rejected():
    s, reg = path_op(5, W=-3.0)
    with pytest.raises(PreconditionError):
        solve_dirichlet(DirichletProblem(s, reg, {1: 1.0, 5: 1.0}))


def test_large_interior_uses_cg():
    g = half_line(1)
    s = SchrodingerData.uniform(g).with_potential(lambda x: 1e-4)
    reg = combinatorial_ball(g, 1, 700)
    f = solve_dirichlet(DirichletProblem(s, reg, {701: 1.0}))
    assert len(reg.interior) > 500
    assert dirichlet_residual(s, reg, f) <= 1e-10 * 2
    assert min(f[x] for x in reg.interior) > 0


def test_cg_detects_indefinite():
    m = np.array([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(PreconditionError):
        conjugate_gradient(lambda v: m @ v, np.array([1.0, 1.0]))


def random_problem(rng, g_choice=None):
    """Random positive operator on a small path, tree ball or finite graph region."""
    kind = g_choice or rng.choice(["path", "tree", "ray"])
    if kind == "path":
        n = int(rng.integers(3, 50))
        g = path_graph(list(range(n + 2)), [float(c) for c in rng.uniform(0.1, 5, n + 1)])
        reg = region(g, range(1, n + 1))
    elif kind == "tree":
        g = BinaryTree(alpha=float(rng.uniform(-1, 1)), beta=float(rng.uniform(-1, 1)))
        reg = combinatorial_ball(g, 1, int(rng.integers(1, 5)))
    else:
        g = half_line(1, conductance=lambda n, c=rng.uniform(0.1, 5, 100): float(c[n % 100]))
        x0 = int(rng.integers(1, 40))
        reg = combinatorial_ball(g, x0, int(rng.integers(1, 20)))
    W = {x: float(rng.uniform(0, 3)) if rng.random() < 0.5 else 0.0 for x in reg.vertices}
    s = SchrodingerData.from_conductance(g, W=lambda x: W.get(x, 0.0))
    return s, reg


def test_randomized_positivity_and_linearity():
    rng = np.random.default_rng(10)
    for _ in range(100):
        s, reg = random_problem(rng)
        assert len(reg) <= 50
        u = {b: float(rng.uniform(0, 2)) for b in reg.boundary}
        if all(v == 0 for v in u.values()):
            continue
        f = solve_dirichlet(DirichletProblem(s, reg, u))
        assert min(f[x] for x in reg.interior) > 0
        again = solve_dirichlet(DirichletProblem(s, reg, u))
        assert all(abs(f[x] - again[x]) <= 1e-12 * abs(f[x]) for x in f)
        u2 = {b: float(rng.normal()) for b in reg.boundary}
        f2 = solve_dirichlet(DirichletProblem(s, reg, u2), check_positive=False)
        diff = solve_dirichlet(DirichletProblem(s, reg, {b: u[b] - u2[b] for b in u}), check_positive=False)
        scale = 1 + max(abs(v) for v in f.values()) + max(abs(v) for v in f2.values())
        assert max(abs(f[x] - f2[x] - diff[x]) for x in f) <= 1e-10 * scale


def test_harnack_constant_examples():
    s, reg = path_op(5)
    c = harnack_constant(s, reg)  # edges inside K = {1..5}: four of them
    assert (c.alpha, c.A, c.k0) == (1.0, 4.0, 4.0)
    assert harnack_constant(s, reg, ordered=True).A == 8.0
    s2, _ = path_op(5, a=3.7)
    assert harnack_constant(s2, reg).k0 == pytest.approx(4.0, rel=1e-15)
    s3, _ = path_op(5, W=2.0)
    assert harnack_constant(s3, reg).k0 == 6.0
    lone = path_graph([0, 1])
    with pytest.raises(DomainError):
        harnack_constant(SchrodingerData.uniform(lone), region(lone, [0]))


def test_harnack_verify_example():
    s, reg = path_op(5)  # segment vertex n is vertex n + 1 here
    phi = {n: float(n) for n in range(1, 6)}
    v = harnack_verify(s, reg, phi, 2, 4)
    assert v.ratio == 0.5 and v.d == 2 and v.bound == 16.0 and v.holds
    same = harnack_verify(s, reg, phi, 3, 3)
    assert same.ratio == 1.0 and same.holds
    with pytest.raises(DomainError):
        harnack_verify(s, reg, phi, 1, 3)
    with pytest.raises(DomainError):
        harnack_verify(s, reg, {n: float(n) ** 2 for n in range(1, 6)}, 2, 4)


def test_harnack_randomized_pairs():
    rng = np.random.default_rng(11)
    pairs = violations = 0
    while pairs < 10_000:
        s, reg = random_problem(rng)
        u = {b: float(rng.uniform(0.01, 2)) for b in reg.boundary}
        f = solve_dirichlet(DirichletProblem(s, reg, u))
        for v in harnack_sweep(s, reg, f):
            pairs += 1
            violations += not v.holds
    assert violations == 0


def test_minimum_principle_examples():
    s, reg = path_op(5, W=1.0)
    assert minimum_principle_check(s, reg, {x: -1.0 for x in range(1, 6)}) == NOT_APPLICABLE
    assert minimum_principle_check(s, reg, {x: 0.0 for x in range(1, 6)}) == CONSTANT
    lone = path_graph([0, 1])
    with pytest.raises(DomainError):
        minimum_principle_check(SchrodingerData.uniform(lone, W=1.0), region(lone, [0]), {0: 1.0})
    with pytest.raises(DomainError):
        minimum_principle_check(SchrodingerData.uniform(lone), region(lone, [0, 1]), {0: 1.0})


def test_minimum_principle_detects_planted_violation():
    s, reg = path_op(5, W=1.0)
    # P f >= 0 inside with a negative interior minimum cannot happen; a function
    # violating P f >= 0 is reported as not applicable rather than a violation
    f = {1: 1.0, 2: -1.0, 3: 1.0, 4: 1.0, 5: 1.0}
    assert minimum_principle_check(s, reg, f) == NOT_APPLICABLE


def test_minimum_principle_never_violated_by_solutions():
    rng = np.random.default_rng(12)
    for _ in range(100):
        n = int(rng.integers(3, 30))
        g = path_graph(list(range(n + 2)), [float(c) for c in rng.uniform(0.1, 5, n + 1)])
        W = rng.uniform(0.01, 2, n + 2)
        s = SchrodingerData.from_conductance(g, W=lambda x: float(W[x]))
        reg = region(g, range(1, n + 1))
        u = {1: float(rng.uniform(0, 2)), n: float(rng.uniform(0, 2))}
        f = solve_dirichlet(DirichletProblem(s, reg, u), check_positive=False)
        assert minimum_principle_check(s, reg, f, tol=1e-12) != VIOLATION


@given(random_connected_graph(max_vertices=10), st.integers(0, 2**32 - 1))
def test_dirichlet_on_random_graphs(g, seed):
    rng = np.random.default_rng(seed)
    s = SchrodingerData.from_conductance(g, W=lambda x: 0.5)
    r = region(g, g.vertices[: max(2, len(g.vertices) - 2)])
    if interior_connectivity(g, r) != "connected" or not r.boundary:
        return
    u = {b: float(rng.uniform(0.1, 1)) for b in r.boundary}
    f = solve_dirichlet(DirichletProblem(s, r, u))
    assert dirichlet_residual(s, r, f) <= 1e-10 * (1 + max(abs(v) for v in f.values()))
    # positivity holds on interior vertices that touch the boundary data
    assert min(f[x] for x in r.interior) > 0


def test_region_without_boundary():
    g = path_graph(list(range(6)))
    reg = region(g, range(6))
    assert not reg.boundary
    # Laplacian alone: constants sit in the kernel, so the form is only semidefinite
    with pytest.raises(PreconditionError):
        solve_dirichlet(DirichletProblem(SchrodingerData.uniform(g, 1.0, 0.0), reg, {}))
    f = solve_dirichlet(DirichletProblem(SchrodingerData.uniform(g, 1.0, 1.0), reg, {}))
    assert all(v == 0.0 for v in f.values())

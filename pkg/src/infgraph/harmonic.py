"""Positive P-harmonic functions by ball exhaustion, and unitarization.

For a Schrödinger operator ``P`` with positive form, the Dirichlet problem on
the combinatorial ball ``B_n`` with boundary value 1 has a positive solution
``psi_n``; normalising at the anchor gives ``Phi_n``. These are bounded above
and below on any fixed ball by Harnack, and their limit ``Phi`` turns ``P``
into the weighted Laplacian with ``omega = Phi``, ``c = a Phi(x) Phi(y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dirichlet import DirichletProblem, harnack_constant, solve_dirichlet
from .errors import DomainError, InconsistencyError, PreconditionError
from .graph import FiniteGraph, FiniteRegion, bfs_distances, combinatorial_ball
from .operator import SchrodingerData, apply_schrodinger, inner_product_omega, l2_inner, laplacian_of, schrodinger_of

DEFAULT_TOL = 1e-8
CONSECUTIVE = 3


@dataclass
class HarmonicProfile:
    anchor: int
    window: FiniteRegion
    values: dict[int, float]
    residual: float
    converged: bool
    history: list[tuple[int, dict[int, float]]] = field(default_factory=list)
    tol: float = DEFAULT_TOL
    #: last even-n and odd-n iterates when the full sequence did not settle
    accumulation: tuple[dict, dict] | None = None

    @property
    def residual_tol(self) -> float:
        return self.tol * (1.0 + max(self.values.values(), default=0.0))

    @property
    def accepted(self) -> bool:
        return (self.converged and min(self.values.values()) > 0
                and self.values[self.anchor] == 1.0 and self.residual <= self.residual_tol)


def window_residual(s: SchrodingerData, window: FiniteRegion, phi) -> float:
    return max((abs(apply_schrodinger(s, phi, x)) for x in window.interior), default=0.0)


def build_harmonic(s: SchrodingerData, x0: int, n_max: int, window: int,
                   tol: float = DEFAULT_TOL, probes=None) -> HarmonicProfile:
    """Iterate ``Phi_n`` for ``n = window+1 .. n_max`` on the ball of radius ``window``.

    Stops once the sup-difference of consecutive iterates on the window stays
    below ``tol`` for three consecutive ``n``.
    """
    g = s.graph
    win = combinatorial_ball(g, x0, window)
    probes = sorted(win.vertices if probes is None else probes)
    history: list[tuple[int, dict[int, float]]] = []
    prev = None
    streak = 0
    current = None
    converged = False
    for n in range(window + 1, n_max + 1):
        ball = combinatorial_ball(g, x0, n)
        try:
            psi = solve_dirichlet(DirichletProblem(s, ball, {b: 1.0 for b in ball.boundary}))
        except PreconditionError as exc:
            raise PreconditionError(f"positivity fails on the ball of radius {n} around {x0}: {exc}") from exc
        p0 = psi[x0]
        if not p0 > 0:
            raise InconsistencyError(f"psi_{n}({x0}) = {p0} is not positive")
        current = {x: psi[x] / p0 for x in sorted(win.vertices)}
        history.append((n, {x: current[x] for x in probes}))
        if prev is not None:
            diff = max(abs(current[x] - prev[x]) for x in current)
            streak = streak + 1 if diff <= tol else 0
            if streak >= CONSECUTIVE:
                converged = True
                break
        prev = current

    if current is None:
        return HarmonicProfile(x0, win, {}, math.inf, False, history, tol)
    accumulation = None
    if not converged and len(history) >= 2:
        last = {n % 2: vals for n, vals in history}
        accumulation = (last[0], last[1]) if len(last) == 2 else None
    return HarmonicProfile(x0, win, current, window_residual(s, win, current), converged,
                           history, tol, accumulation)


@dataclass(frozen=True)
class HarnackInterval:
    vertex: int
    n0: int
    d: int
    k: float
    lo: float
    hi: float
    within: bool


def harnack_intervals(s: SchrodingerData, profile: HarmonicProfile) -> list[HarnackInterval]:
    """Check every recorded ``Phi_n(x)`` against ``[1/k_{n0}, k_{n0}]``.

    ``n0`` is the first radius whose ball has ``x`` in its interior, and
    ``k_{n0} = k0**d`` with ``d`` the interior distance from ``x`` to the anchor.
    """
    g, x0 = s.graph, profile.anchor
    out = []
    for x in sorted(profile.history[0][1]) if profile.history else []:
        n0 = 1
        while True:
            ball = combinatorial_ball(g, x0, n0)
            if x in ball.interior and x0 in ball.interior:
                break
            n0 += 1
        cert = harnack_constant(s, ball)
        d = bfs_distances(g, [x0], allowed=lambda v: v in ball.interior)[x]
        try:
            k = cert.k0 ** d
        except OverflowError:
            k = math.inf
        lo, hi = 1.0 / k, k
        vals = [vals[x] for n, vals in profile.history if n >= n0]
        out.append(HarnackInterval(x, n0, d, k, lo, hi, all(lo <= v <= hi for v in vals)))
    return out


@dataclass
class UnitarizedLaplacian:
    """``omega = Phi`` and ``c_xy = a_xy Phi(x) Phi(y)`` on a finite window."""

    window: FiniteRegion
    omega: dict[int, float]
    conductance: dict[tuple[int, int], float]

    def as_graph(self) -> FiniteGraph:
        return FiniteGraph(self.window.vertices, self.conductance, self.omega)


def unitarize(s: SchrodingerData, profile: HarmonicProfile) -> UnitarizedLaplacian:
    phi = profile.values
    if not phi or min(phi.values()) <= 0:
        raise DomainError("profile must be strictly positive on its window")
    if profile.residual > profile.residual_tol:
        raise DomainError(f"profile residual {profile.residual:.3e} above {profile.residual_tol:.3e}")
    cond = {}
    for x in sorted(profile.window.vertices):
        for y in sorted(s.graph.neighbors(x)):
            if x < y and y in profile.window.vertices:
                cond[(x, y)] = s.a(x, y) * phi[x] * phi[y]
    return UnitarizedLaplacian(profile.window, dict(phi), cond)


def unitary_form_sides(s: SchrodingerData, ul: UnitarizedLaplacian, g_fn) -> tuple[float, float]:
    """``<Pg, g>`` and ``<Delta_{omega,c}(g/Phi), g/Phi>_omega`` for ``g`` inside the window."""
    if not set(g_fn) <= ul.window.interior:
        raise DomainError("test function must be supported in the window interior")
    lhs = l2_inner(schrodinger_of(s, g_fn), g_fn)
    graph = ul.as_graph()
    f = {x: v / ul.omega[x] for x, v in g_fn.items()}
    rhs = inner_product_omega(graph, laplacian_of(graph, f), f)
    return lhs, rhs

"""Weighted Laplacians, Schrödinger operators and the ground-state gauge.

Functions of finite support are plain ``dict`` objects mapping vertex ids to
floats; missing vertices are zero. Every inner sum runs over neighbours in
ascending id order so results are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

import mpmath
import numpy as np
import scipy.linalg

from .errors import CapacityError, DomainError
from .graph import MP_DPS, FiniteRegion, WeightedGraph

Fn = Mapping[int, float]

#: largest region handed to the dense symmetric eigensolver
DENSE_CAP = 2000


@dataclass(frozen=True)
class SchrodingerData:
    """Edge coefficients ``a`` and potential ``W`` of ``Delta_{1,a} + W`` on ``graph``."""

    graph: WeightedGraph
    a: Callable[[int, int], float]
    W: Callable[[int], float]
    name: str = ""

    @classmethod
    def uniform(cls, graph: WeightedGraph, a: float = 1.0, W: float = 0.0) -> "SchrodingerData":
        a, W = float(a), float(W)
        if not a > 0:
            raise DomainError("edge coefficients must be positive")
        return cls(graph, lambda x, y: a, lambda x: W, name=f"a={a:g}, W={W:g}")

    @classmethod
    def from_conductance(cls, graph: WeightedGraph, W=0.0) -> "SchrodingerData":
        """``Delta_{1,c} + W`` with the graph's own conductances as ``a``."""
        pot = W if callable(W) else (lambda x, v=float(W): v)
        return cls(graph, graph.conductance, pot, name="conductance")

    def with_potential(self, W) -> "SchrodingerData":
        pot = W if callable(W) else (lambda x, v=float(W): v)
        return SchrodingerData(self.graph, self.a, pot, name=self.name)


@dataclass(frozen=True)
class FormBound:
    """Certified ``<Hf, f> >= k ||f||^2`` for ``f`` supported in ``region``."""

    k: float
    region: FiniteRegion


def _val(f: Fn, x: int) -> float:
    return f.get(x, 0.0)


def apply_laplacian(g: WeightedGraph, f: Fn, x: int) -> float:
    """``(Delta_{omega,c} f)(x) = omega_x**-2 * sum_y c_xy (f(x) - f(y))``."""
    fx = _val(f, x)
    total = 0.0
    for y in sorted(g.neighbors(x)):
        total += g.conductance(x, y) * (fx - _val(f, y))
    w = g.omega(x)
    return total / (w * w)


def apply_schrodinger(s: SchrodingerData, f: Fn, x: int) -> float:
    fx = _val(f, x)
    total = 0.0
    for y in sorted(s.graph.neighbors(x)):
        total += s.a(x, y) * (fx - _val(f, y))
    return total + s.W(x) * fx


def _closure(g: WeightedGraph, f: Fn) -> list[int]:
    pts = set(f)
    for x in f:
        pts.update(g.neighbors(x))
    return sorted(pts)


def laplacian_of(g: WeightedGraph, f: Fn) -> dict[int, float]:
    """``Delta_{omega,c} f`` on the support of ``f`` and its neighbours."""
    return {x: apply_laplacian(g, f, x) for x in _closure(g, f)}


def schrodinger_of(s: SchrodingerData, f: Fn) -> dict[int, float]:
    return {x: apply_schrodinger(s, f, x) for x in _closure(s.graph, f)}


def quadratic_form(g: WeightedGraph, f: Fn) -> float:
    """``Q_c(f)``: sum over unordered edges of ``c_xy (f(x) - f(y))**2``."""
    total = 0.0
    for x in sorted(f):
        fx = f[x]
        for y in sorted(g.neighbors(x)):
            if y < x and y in f:
                continue  # already counted from y
            d = fx - _val(f, y)
            total += g.conductance(x, y) * d * d
    return total


def inner_product_omega(g: WeightedGraph, f: Fn, h: Fn) -> float:
    total = 0.0
    for x in sorted(f.keys() & h.keys()):
        w = g.omega(x)
        total += w * w * f[x] * h[x]
    return total


def l2_inner(f: Fn, h: Fn) -> float:
    total = 0.0
    for x in sorted(f.keys() & h.keys()):
        total += f[x] * h[x]
    return total


def conjugate_u_omega(g: WeightedGraph, f: Fn) -> dict[int, float]:
    """``U_omega f = omega f``."""
    return {x: g.omega(x) * v for x, v in f.items()}


def unconjugate_u_omega(g: WeightedGraph, f: Fn) -> dict[int, float]:
    return {x: v / g.omega(x) for x, v in f.items()}


def gauge_to_schrodinger(g: WeightedGraph) -> SchrodingerData:
    """Schrödinger data unitarily equivalent to ``Delta_{omega,c}`` via ``U_omega``.

    ``a_xy = c_xy / (omega_x omega_y)`` and
    ``W(x) = omega_x**-1 * sum_y c_xy (1/omega_x - 1/omega_y)``.
    The potential is a sum of large terms that nearly cancel, so it is
    accumulated in extended precision and rounded once.
    """

    @lru_cache(maxsize=None)
    def _a(x, y):
        return g.conductance(x, y) / (g.omega(x) * g.omega(y))

    def a(x, y):
        return _a(x, y) if x < y else _a(y, x)

    @lru_cache(maxsize=None)
    def W(x):
        with mpmath.workdps(MP_DPS):
            inv_x = 1 / g.omega_mp(x)
            total = mpmath.mpf(0)
            for y in sorted(g.neighbors(x)):
                total += g.conductance_mp(x, y) * (inv_x - 1 / g.omega_mp(y))
            return float(inv_x * total)

    return SchrodingerData(g, a, W, name="gauge")


def form_matrix(s: SchrodingerData, vertices) -> tuple[np.ndarray, list[int]]:
    """Matrix of ``<Hf, f>`` on functions supported in ``vertices``.

    Diagonal entries carry every edge at the vertex, including edges that
    leave the vertex set.
    """
    order = sorted(vertices)
    index = {x: i for i, x in enumerate(order)}
    m = np.zeros((len(order), len(order)))
    for i, x in enumerate(order):
        diag = 0.0
        for y in sorted(s.graph.neighbors(x)):
            axy = s.a(x, y)
            diag += axy
            j = index.get(y)
            if j is not None:
                m[i, j] = -axy
        m[i, i] = diag + s.W(x)
    return m, order


def form_lower_bound(op, reg: FiniteRegion, cap: int = DENSE_CAP) -> FormBound:
    """Smallest eigenvalue of the operator's form restricted to ``reg``.

    ``op`` is either :class:`SchrodingerData` or a :class:`WeightedGraph`
    (taken through :func:`gauge_to_schrodinger`, which preserves the form).
    """
    if len(reg) > cap:
        raise CapacityError(f"region has {len(reg)} vertices, dense cap is {cap}")
    if not len(reg):
        raise DomainError("empty region")
    s = op if isinstance(op, SchrodingerData) else gauge_to_schrodinger(op)
    m, _ = form_matrix(s, reg.vertices)
    k = scipy.linalg.eigvalsh(m, subset_by_index=[0, 0])[0]
    return FormBound(float(k), reg)

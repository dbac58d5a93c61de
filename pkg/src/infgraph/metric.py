"""The path metric with edge lengths ``1/sqrt(a)``, metric balls and completeness.

All searches are label-setting (Dijkstra) over the lazy graph, breaking ties
by vertex id, and stop as soon as the requested quantity is settled.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .errors import BudgetError, UndeterminedError, UnreachableError, UnsupportedError
from .graph import FamilySpec, FiniteRegion, WeightedGraph, build_family, region
from .operator import SchrodingerData, gauge_to_schrodinger

DEFAULT_BUDGET = 2_000_000


class MetricContext:
    """Graph plus edge coefficients ``a``; edge lengths ``1/sqrt(a)`` are cached."""

    def __init__(self, graph: WeightedGraph, a: Callable[[int, int], float]):
        self.graph = graph
        self.a = a

        @lru_cache(maxsize=None)
        def _length(x, y):
            return 1.0 / math.sqrt(a(x, y))

        self._length = _length

    @classmethod
    def from_schrodinger(cls, s: SchrodingerData) -> "MetricContext":
        return cls(s.graph, s.a)

    @classmethod
    def from_graph(cls, g: WeightedGraph) -> "MetricContext":
        """``a = c / (omega_x omega_y)``, the coefficients of the gauge-equivalent operator."""
        return cls(g, gauge_to_schrodinger(g).a)

    def edge_length(self, x: int, y: int) -> float:
        return self._length(x, y) if x < y else self._length(y, x)


def settle(ctx: MetricContext, sources: Iterable[int], budget: int = DEFAULT_BUDGET,
           allowed: Callable[[int], bool] | None = None):
    """Yield ``(vertex, distance)`` in nondecreasing distance order.

    Raises :class:`BudgetError` once more than ``budget`` vertices have been
    settled.
    """
    heap = []
    best = {}
    for s in sources:
        ctx.graph._check_vertex(s)
        best[s] = 0.0
        heap.append((0.0, s))
    heapq.heapify(heap)
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        if len(done) > budget:
            raise BudgetError(f"settled more than {budget} vertices")
        yield x, d
        for y in ctx.graph.neighbors(x):
            if y in done or (allowed is not None and not allowed(y)):
                continue
            nd = d + ctx.edge_length(x, y)
            if nd < best.get(y, math.inf):
                best[y] = nd
                heapq.heappush(heap, (nd, y))


def delta_a(ctx: MetricContext, x: int, y: int, horizon=None, budget: int = DEFAULT_BUDGET) -> float:
    """Weighted distance ``min over paths of sum 1/sqrt(a)``.

    ``horizon`` optionally restricts the search to a vertex set.
    """
    if x == y:
        ctx.graph._check_vertex(x)
        return 0.0
    allowed = None if horizon is None else (lambda v: v in horizon)
    src, dst = min(x, y), max(x, y)  # one search order, so the result is exactly symmetric
    try:
        for v, d in settle(ctx, [src], budget, allowed):
            if v == dst:
                return d
    except BudgetError as exc:
        raise UnreachableError(f"{y} not reached from {x}: {exc}") from exc
    raise UnreachableError(f"{y} is not reachable from {x} within the horizon")


def ball_distances(ctx: MetricContext, x0: int, R: float, budget: int = DEFAULT_BUDGET) -> dict[int, float]:
    out = {}
    if R < 0:
        return out
    for v, d in settle(ctx, [x0], budget):
        if d > R:
            break
        out[v] = d
    return out


def metric_ball(ctx: MetricContext, x0: int, R: float, budget: int = DEFAULT_BUDGET) -> FiniteRegion:
    """``{x : delta_a(x0, x) <= R}``; :class:`BudgetError` if it does not close in budget."""
    return region(ctx.graph, ball_distances(ctx, x0, R, budget))


def distance_to_set(ctx: MetricContext, x: int, S, budget: int = DEFAULT_BUDGET) -> float:
    """``min_{s in S} delta_a(x, s)``; ``S`` is a set or a vertex predicate.

    The empty set is at distance ``+inf``.
    """
    if isinstance(S, (set, frozenset)):
        if not S:
            return math.inf
        member = S.__contains__
    else:
        member = S
    try:
        for v, d in settle(ctx, [x], budget):
            if member(v):
                return d
    except BudgetError as exc:
        raise UndeterminedError(f"no member of S found within budget: {exc}") from exc
    return math.inf  # finite component exhausted without meeting S


def cutoff(ctx: MetricContext, x0: int, R: float, budget: int = DEFAULT_BUDGET) -> dict[int, float]:
    """``f = min(1, delta_a(., V minus B_{R+1}))``: 1 on ``B_R``, 0 off ``B_{R+1}``."""
    outer_ball = ball_distances(ctx, x0, R + 1, budget)
    g = ctx.graph
    outside = set()
    for v in outer_ball:
        outside.update(y for y in g.neighbors(v) if y not in outer_ball)
    f = {}
    if not outside:
        return {v: 1.0 for v in sorted(outer_ball)}
    dist = {}
    for v, d in settle(ctx, sorted(outside), budget=len(outer_ball) + len(outside),
                       allowed=lambda y: y in outer_ball):
        if d > 1.0:
            break
        dist[v] = d
    for v in sorted(outer_ball):
        f[v] = 1.0 if outer_ball[v] <= R else min(1.0, dist.get(v, math.inf))
    return f


# ---------------------------------------------------------------------------
# completeness of ray families


@dataclass
class CompletenessReport:
    family: FamilySpec
    start: int
    partial_sums: np.ndarray  # s_n = delta_a(start, n) for n = start .. n_probe
    verdict: str
    numeric_verdict: str
    closed_form_verdict: str | None
    details: dict = field(default_factory=dict)

    def s(self, n: int) -> float:
        return float(self.partial_sums[n - self.start])


def closed_form_completeness(spec: FamilySpec) -> tuple[str | None, dict]:
    """Exact verdict from the series criterion for families with a closed form."""
    if spec.kind == "half-line-power":
        exponent = spec.alpha - 0.5 * spec.effective_beta
        return ("complete" if exponent <= 1 else "incomplete"), {"alpha_minus_half_beta": exponent}
    if spec.kind == "half-line-log":
        return "complete", {"summand": "~ 1/(k ln k)"}
    if spec.kind == "half-line-table":
        # periodic coefficients are bounded, so edge lengths are bounded below
        return "complete", {"summand": "periodic, bounded below"}
    return None, {}


def _slope(xs, ys) -> float:
    return float(np.polyfit(xs, ys, 1)[0])


def numeric_completeness(lengths: np.ndarray, start: int, total: float, margin: float = 0.05,
                         threshold: float = 1.0) -> tuple[str, dict]:
    """Classify divergence of ``sum lengths`` from its last decade of terms.

    * complete: the total exceeds ``threshold`` and ``k ln k * t_k`` does not
      decay like a power over the tail (comparison with ``sum 1/(k ln k)``);
    * incomplete: the terms decay like ``k**-p`` with ``p >= 1 + margin``, or
      geometrically with ratio at most ``1 - margin``;
    * otherwise undetermined.
    """
    n_last = start + len(lengths)  # one past the last edge index
    lo = max(start + 1, n_last // 10, 2)
    ks = np.unique(np.geomspace(lo, n_last - 1, num=200).astype(np.int64))
    t = lengths[ks - start]
    logk = np.log(ks)
    p = -_slope(logk, np.log(t))
    q = _slope(logk, np.log(ks * np.log(ks) * t))
    tail = lengths[max(0, len(lengths) - 50):]
    ratio = float(np.max(tail[1:] / tail[:-1])) if len(tail) > 1 else math.nan
    details = {"decay_exponent": p, "comparison_slope": q, "tail_ratio": ratio, "margin": margin,
               "threshold": threshold}
    if total > threshold and q >= -margin:
        return "complete", details
    if p >= 1 + margin or ratio <= 1 - margin:
        return "incomplete", details
    return "undetermined", details


def completeness_diagnostic(spec: FamilySpec, n_probe: int = 100_000, margin: float = 0.05,
                            threshold: float = 1.0) -> CompletenessReport:
    """Partial sums ``delta_a(start, n)`` along a ray family and a completeness verdict."""
    if not spec.is_ray:
        raise UnsupportedError(f"completeness diagnostics need a half-line family, got {spec.kind}")
    g = build_family(spec)
    ctx = MetricContext.from_graph(g)
    start = g.start
    if n_probe < start + 20:
        raise UnsupportedError("n_probe too small for a tail estimate")
    lengths = np.array([ctx.edge_length(k, k + 1) for k in range(start, n_probe)])
    sums = np.concatenate([[0.0], np.cumsum(lengths)])
    numeric, details = numeric_completeness(lengths, start, float(sums[-1]), margin, threshold)
    closed, cdetails = closed_form_completeness(spec)
    details.update(cdetails)
    verdict = closed if closed is not None else numeric
    return CompletenessReport(spec, start, sums, verdict, numeric, closed, details)

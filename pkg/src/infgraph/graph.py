"""Locally finite weighted graphs, finite regions and built-in infinite families.

Infinite graphs are only ever queried lazily through ``neighbors``, ``omega``
and ``conductance``; nothing here enumerates the vertex set of an infinite
graph.
"""

from __future__ import annotations

import math
import numbers
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import mpmath

from .errors import ConstructionError, DomainError

#: working precision (decimal digits) for the high-precision weight hooks
MP_DPS = 40


class WeightedGraph:
    """Base class: a locally finite graph with weights ``omega`` and ``c``.

    Subclasses implement :meth:`neighbors`, :meth:`omega`, :meth:`conductance`
    and :meth:`__contains__`. ``max_degree`` is a known valence bound, or
    ``None`` when it has to be found by enumeration.
    """

    max_degree: int | None = None
    is_half_line = False

    def neighbors(self, x: int) -> list[int]:
        raise NotImplementedError

    def omega(self, x: int) -> float:
        raise NotImplementedError

    def conductance(self, x: int, y: int) -> float:
        raise NotImplementedError

    def __contains__(self, x) -> bool:
        raise NotImplementedError

    # High precision hooks. Families with closed forms override these so that
    # quantities with heavy cancellation (the gauge potential) can be
    # evaluated beyond float64.
    def omega_mp(self, x: int):
        return mpmath.mpf(self.omega(x))

    def conductance_mp(self, x: int, y: int):
        return mpmath.mpf(self.conductance(x, y))

    def _check_vertex(self, x):
        if x not in self:
            raise DomainError(f"unknown vertex {x!r}")


def _is_int(x) -> bool:
    return isinstance(x, numbers.Integral) and not isinstance(x, bool)


def _edge_key(x: int, y: int) -> tuple[int, int]:
    return (x, y) if x < y else (y, x)


class FiniteGraph(WeightedGraph):
    """Explicit finite graph.

    ``edges`` maps unordered pairs to conductances; ``omega`` maps vertices to
    weights (missing vertices get weight 1).
    """

    def __init__(self, vertices: Iterable[int] = (), edges=None, omega=None):
        edges = dict(edges or {})
        omega = dict(omega or {})
        verts = set(vertices)
        adj: dict[int, set[int]] = {}
        cond: dict[tuple[int, int], float] = {}
        for (x, y), c in edges.items():
            x, y = int(x), int(y)
            if x == y:
                raise ConstructionError(f"self-loop at vertex {x}")
            if not c > 0:
                raise ConstructionError(f"non-positive conductance {c} on edge {{{x},{y}}}")
            key = _edge_key(x, y)
            if key in cond:
                raise ConstructionError(f"duplicate edge {{{x},{y}}}")
            cond[key] = float(c)
            adj.setdefault(x, set()).add(y)
            adj.setdefault(y, set()).add(x)
            verts.update((x, y))
        for v in verts:
            if v < 0:
                raise ConstructionError(f"vertex ids must be non-negative, got {v}")
        for v, w in omega.items():
            if v not in verts:
                raise ConstructionError(f"weight given for unknown vertex {v}")
            if not w > 0:
                raise ConstructionError(f"non-positive weight {w} at vertex {v}")
        self._adj = {v: sorted(adj.get(v, ())) for v in sorted(verts)}
        self._cond = cond
        self._omega = {v: float(omega.get(v, 1.0)) for v in self._adj}
        self.max_degree = max((len(n) for n in self._adj.values()), default=0)

    @property
    def vertices(self) -> list[int]:
        return list(self._adj)

    def edges(self):
        """Unordered edges ``(x, y, c)`` with ``x < y``, sorted."""
        return [(x, y, c) for (x, y), c in sorted(self._cond.items())]

    def __contains__(self, x) -> bool:
        return x in self._adj

    def neighbors(self, x):
        self._check_vertex(x)
        return list(self._adj[x])

    def omega(self, x):
        self._check_vertex(x)
        return self._omega[x]

    def conductance(self, x, y):
        try:
            return self._cond[_edge_key(x, y)]
        except KeyError:
            raise DomainError(f"{{{x},{y}}} is not an edge") from None


class HalfLine(WeightedGraph):
    """The ray ``start ~ start+1 ~ start+2 ~ ...``.

    ``omega_fn(n)`` gives the vertex weight and ``conductance_fn(n)`` the
    conductance of the edge ``{n, n+1}``. The optional ``*_mp`` callables
    evaluate the same closed forms in mpmath.
    """

    max_degree = 2
    is_half_line = True

    def __init__(self, start: int, omega_fn: Callable, conductance_fn: Callable,
                 omega_mp_fn: Callable | None = None,
                 conductance_mp_fn: Callable | None = None, name: str = "half-line"):
        self.start = int(start)
        self._omega_fn = omega_fn
        self._cond_fn = conductance_fn
        self._omega_mp_fn = omega_mp_fn
        self._cond_mp_fn = conductance_mp_fn
        self.name = name

    def __repr__(self):
        return f"HalfLine({self.name!r}, start={self.start})"

    def __contains__(self, x) -> bool:
        return _is_int(x) and x >= self.start

    def neighbors(self, x):
        self._check_vertex(x)
        if x == self.start:
            return [x + 1]
        return [x - 1, x + 1]

    def omega(self, x):
        self._check_vertex(x)
        w = float(self._omega_fn(x))
        if not w > 0:
            raise ConstructionError(f"{self.name}: non-positive weight {w} at vertex {x}")
        return w

    def _edge_index(self, x, y):
        self._check_vertex(x)
        self._check_vertex(y)
        if abs(x - y) != 1:
            raise DomainError(f"{{{x},{y}}} is not an edge")
        return min(x, y)

    def conductance(self, x, y):
        n = self._edge_index(x, y)
        c = float(self._cond_fn(n))
        if not c > 0:
            raise ConstructionError(f"{self.name}: non-positive conductance {c} on edge {{{n},{n + 1}}}")
        return c

    def omega_mp(self, x):
        if self._omega_mp_fn is None:
            return super().omega_mp(x)
        self._check_vertex(x)
        return self._omega_mp_fn(x)

    def conductance_mp(self, x, y):
        if self._cond_mp_fn is None:
            return super().conductance_mp(x, y)
        return self._cond_mp_fn(self._edge_index(x, y))


class BinaryTree(WeightedGraph):
    """Rooted binary tree in heap numbering: root 1, children ``2x`` and ``2x+1``.

    Weights depend on depth only: ``omega_x = (depth+1)**-alpha`` and the edge
    from ``x`` to its parent has conductance ``depth(x)**-beta``.
    """

    max_degree = 3

    def __init__(self, alpha: float = 0.0, beta: float = 0.0):
        self.alpha = float(alpha)
        self.beta = float(beta)

    def __repr__(self):
        return f"BinaryTree(alpha={self.alpha}, beta={self.beta})"

    def __contains__(self, x) -> bool:
        return _is_int(x) and x >= 1

    @staticmethod
    def depth(x: int) -> int:
        return int(x).bit_length() - 1

    def neighbors(self, x):
        self._check_vertex(x)
        out = [2 * x, 2 * x + 1]
        if x > 1:
            out.insert(0, x // 2)
        return out

    def omega(self, x):
        self._check_vertex(x)
        return (self.depth(x) + 1.0) ** (-self.alpha)

    def conductance(self, x, y):
        self._check_vertex(x)
        self._check_vertex(y)
        child = max(x, y)
        if child // 2 != min(x, y):
            raise DomainError(f"{{{x},{y}}} is not an edge")
        return float(self.depth(child)) ** (-self.beta)

    def omega_mp(self, x):
        self._check_vertex(x)
        return mpmath.power(self.depth(x) + 1, -mpmath.mpf(self.alpha))

    def conductance_mp(self, x, y):
        self.conductance(x, y)
        return mpmath.power(self.depth(max(x, y)), -mpmath.mpf(self.beta))


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class FiniteRegion:
    """A finite vertex set with its interior (all neighbours inside) and boundary."""

    vertices: frozenset
    interior: frozenset
    boundary: frozenset

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, x):
        return x in self.vertices

    def sorted(self) -> list[int]:
        return sorted(self.vertices)


def region(g: WeightedGraph, vertices: Iterable[int]) -> FiniteRegion:
    verts = frozenset(vertices)
    interior = frozenset(x for x in verts if all(y in verts for y in g.neighbors(x)))
    return FiniteRegion(verts, interior, verts - interior)


def neighbors(g: WeightedGraph, x: int) -> list[int]:
    """Adjacent vertices of ``x`` in ascending id order."""
    return sorted(g.neighbors(x))


def valence_bound(g: WeightedGraph, reg: FiniteRegion | None = None) -> int:
    """Largest degree over ``reg`` (or the family's known bound)."""
    if g.is_half_line:
        return 2
    if reg is None:
        if g.max_degree is None:
            raise DomainError("a region is needed for graphs without a known valence bound")
        return g.max_degree
    return max((len(g.neighbors(x)) for x in reg.vertices), default=0)


def combinatorial_ball(g: WeightedGraph, x0: int, n: int) -> FiniteRegion:
    """Vertices within edge-count distance ``n`` of ``x0``."""
    if n < 0:
        raise DomainError("radius must be non-negative")
    return region(g, bfs_distances(g, [x0], limit=n))


def bfs_distances(g: WeightedGraph, sources: Iterable[int], limit: int | None = None,
                  allowed: Callable[[int], bool] | None = None) -> dict[int, int]:
    """Edge-count distances from ``sources``, optionally restricted to ``allowed``."""
    dist = {}
    queue = deque()
    for s in sources:
        g._check_vertex(s)
        dist[s] = 0
        queue.append(s)
    while queue:
        x = queue.popleft()
        if limit is not None and dist[x] >= limit:
            continue
        for y in g.neighbors(x):
            if y not in dist and (allowed is None or allowed(y)):
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def interior_components(g: WeightedGraph, reg: FiniteRegion) -> list[frozenset]:
    left = set(reg.interior)
    comps = []
    while left:
        seed = min(left)
        comp = bfs_distances(g, [seed], allowed=lambda y: y in reg.interior)
        comps.append(frozenset(comp))
        left -= comp.keys()
    return comps


def interior_connectivity(g: WeightedGraph, reg: FiniteRegion) -> str:
    """One of ``"connected"``, ``"disconnected"`` or ``"vacuous"`` (empty interior)."""
    if not reg.interior:
        return "vacuous"
    return "connected" if len(interior_components(g, reg)) == 1 else "disconnected"


def is_connected_interior(g: WeightedGraph, reg: FiniteRegion) -> bool:
    """True iff the interior is connected; an empty interior counts as connected.

    Use :func:`interior_connectivity` to tell the vacuous case apart.
    """
    return interior_connectivity(g, reg) != "disconnected"


# ---------------------------------------------------------------------------
# families

FAMILY_KINDS = ("half-line-power", "half-line-log", "half-line-table", "binary-tree", "finite-file")

_ALIASES = {
    "power": "half-line-power",
    "log": "half-line-log",
    "table": "half-line-table",
    "tree": "binary-tree",
    "file": "finite-file",
}


@dataclass(frozen=True)
class FamilySpec:
    """Parameters of a built-in graph family.

    * ``half-line-power``: ``omega_n = n**-alpha`` and
      ``c_{n,n+1} = (n+shift)**-beta``. Giving ``epsilon`` instead of ``beta``
      selects ``beta = -(2+epsilon)``, i.e. ``c_n = (n+shift)**(2+epsilon)``.
    * ``half-line-log``: ``omega_n = 1/(n ln n)``, ``c = 1``; needs ``start >= 2``.
    * ``half-line-table``: ``(omega, c)`` rows repeated periodically along the ray.
    * ``binary-tree``: see :class:`BinaryTree`.
    * ``finite-file``: an edge-list file at ``path``.
    """

    kind: str
    alpha: float = 0.0
    beta: float | None = None
    epsilon: float | None = None
    start: int | None = None
    shift: float = 0.0
    table: tuple = ()
    path: str | None = None

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in FAMILY_KINDS:
            raise DomainError(f"unknown family {self.kind!r}; expected one of {', '.join(FAMILY_KINDS)}")
        object.__setattr__(self, "kind", kind)
        if self.beta is not None and self.epsilon is not None:
            raise DomainError("give either beta or epsilon, not both")
        object.__setattr__(self, "table", tuple(tuple(map(float, row)) for row in self.table))

    @property
    def effective_beta(self) -> float:
        if self.epsilon is not None:
            return -(2.0 + self.epsilon)
        return 0.0 if self.beta is None else float(self.beta)

    @property
    def effective_start(self) -> int:
        if self.start is not None:
            return int(self.start)
        return 2 if self.kind == "half-line-log" else 1

    @property
    def is_ray(self) -> bool:
        return self.kind.startswith("half-line")

    def as_dict(self) -> dict:
        out = {"family": self.kind, "start": self.effective_start}
        if self.kind == "half-line-power":
            out.update(alpha=self.alpha, beta=self.effective_beta, shift=self.shift)
            if self.epsilon is not None:
                out["epsilon"] = self.epsilon
        elif self.kind == "binary-tree":
            out.update(alpha=self.alpha, beta=self.effective_beta)
        elif self.kind == "half-line-table":
            out["table"] = [list(r) for r in self.table]
        elif self.kind == "finite-file":
            out["path"] = self.path
        return out


def build_family(spec: FamilySpec) -> WeightedGraph:
    """Instantiate the (lazy) graph described by ``spec``."""
    start = spec.effective_start
    if spec.kind == "half-line-power":
        alpha, beta, shift = float(spec.alpha), spec.effective_beta, float(spec.shift)
        if start < 1 or start + shift <= 0:
            raise ConstructionError("power family needs start >= 1 and start + shift > 0")
        a_mp, b_mp, s_mp = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(shift)
        return HalfLine(
            start,
            lambda n: float(n) ** (-alpha),
            lambda n: (n + shift) ** (-beta),
            lambda n: mpmath.power(n, -a_mp),
            lambda n: mpmath.power(n + s_mp, -b_mp),
            name=f"power(alpha={alpha:g}, beta={beta:g}, shift={shift:g})",
        )
    if spec.kind == "half-line-log":
        if start < 2:
            raise ConstructionError("log family needs start >= 2 so that ln n > 0")
        return HalfLine(
            start,
            lambda n: 1.0 / (n * math.log(n)),
            lambda n: 1.0,
            lambda n: 1 / (n * mpmath.log(n)),
            lambda n: mpmath.mpf(1),
            name="log",
        )
    if spec.kind == "half-line-table":
        rows = spec.table
        if not rows:
            raise ConstructionError("table family needs at least one (omega, c) row")
        for i, row in enumerate(rows):
            if len(row) != 2 or not (row[0] > 0 and row[1] > 0):
                raise ConstructionError(f"table row {i} must hold two positive numbers, got {row}")
        p = len(rows)
        return HalfLine(
            start,
            lambda n: rows[(n - start) % p][0],
            lambda n: rows[(n - start) % p][1],
            name=f"table(period={p})",
        )
    if spec.kind == "binary-tree":
        return BinaryTree(spec.alpha, spec.effective_beta)
    if spec.kind == "finite-file":
        from .io import read_edge_list

        if spec.path is None:
            raise DomainError("finite-file family needs a path")
        return read_edge_list(spec.path)
    raise DomainError(spec.kind)  # pragma: no cover


def half_line(start: int, omega: Callable | float = 1.0, conductance: Callable | float = 1.0,
              name: str = "half-line") -> HalfLine:
    """Convenience constructor from callables or constants."""
    w = omega if callable(omega) else (lambda n, v=float(omega): v)
    c = conductance if callable(conductance) else (lambda n, v=float(conductance): v)
    return HalfLine(start, w, c, name=name)


def path_graph(vertices: Sequence[int], conductance=1.0, omega=None) -> FiniteGraph:
    """Finite path through ``vertices`` in the given order."""
    cs = conductance if isinstance(conductance, Sequence) else [conductance] * (len(vertices) - 1)
    edges = {(vertices[i], vertices[i + 1]): cs[i] for i in range(len(vertices) - 1)}
    return FiniteGraph(vertices, edges, omega)

"""Numerical probes of essential self-adjointness on half-lines.

On a ray the equation ``(H - lam) v = 0`` is a three-term recurrence, so the
kernel of ``H* - lam`` is at most one-dimensional and is spanned by the
recurrence solution started from ``v(start) = 1``. Whether that solution is
square summable decides the deficiency at ``lam``; numerics can only give
evidence, never proof, and the reports say so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, DomainError, NumericError, PreconditionError, UnsupportedError, VerificationError
from .graph import FamilySpec, build_family, combinatorial_ball
from .metric import MetricContext, ball_distances, closed_form_completeness, cutoff
from .operator import FormBound, SchrodingerData, apply_schrodinger, form_lower_bound, gauge_to_schrodinger

RESCALE_AT = 1e300
RESIDUAL_TOL = 1e-10
L2_THRESHOLD = 1e12
MIN_TERMS = 50
BLOCK = 5

L2_DIVERGENT = "l2-divergent"
L2_BOUNDED = "l2-bounded"
UNDETERMINED = "undetermined"


@dataclass
class DeficiencySolution:
    """Solution of ``(H - lam) v = 0`` on ``start .. N``.

    Values are stored as ``mantissa * exp(offset)``; the offset stays 0 until
    ``|v|`` first exceeds ``1e300``, so small solutions are held exactly.
    """

    start: int
    lam: float
    v0: float
    mantissa: np.ndarray
    offset: np.ndarray
    residuals: np.ndarray  # relative residual at start .. N-1
    rescaled: bool = False

    def __len__(self):
        return len(self.mantissa)

    @property
    def stop(self) -> int:
        return self.start + len(self.mantissa) - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.stop + 1)

    @property
    def values(self) -> np.ndarray:
        """Float values; ``inf`` where they no longer fit in a double."""
        with np.errstate(over="ignore"):
            return self.mantissa * np.exp(self.offset)

    @property
    def sign(self) -> np.ndarray:
        return np.sign(self.mantissa)

    @property
    def log_abs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.mantissa)) + self.offset

    @property
    def log_partial_l2(self) -> np.ndarray:
        """``log sum_{k <= n} v(k)**2``, ``-inf`` while the sum is zero."""
        return np.logaddexp.accumulate(2.0 * self.log_abs)

    @property
    def partial_l2(self) -> np.ndarray:
        if not self.rescaled:
            return np.cumsum(self.mantissa ** 2)
        with np.errstate(over="ignore"):
            return np.exp(self.log_partial_l2)

    def __getitem__(self, n: int) -> float:
        return float(self.values[n - self.start])

    def scaled_window(self, vertices) -> tuple[dict[int, float], float]:
        """Values on ``vertices`` divided by a common factor ``exp(shift)``."""
        idx = [n - self.start for n in vertices]
        if min(idx, default=0) < 0 or max(idx, default=0) >= len(self):
            raise DomainError("window leaves the computed range of the solution")
        la = self.log_abs[idx]
        finite = la[np.isfinite(la)]
        shift = float(finite.max()) if finite.size else 0.0
        if self.offset[idx].max() == 0 and shift < 700:
            shift = 0.0  # keep exact values when they are representable
        vals = self.sign[idx] * np.exp(la - shift)
        return {n: float(x) for n, x in zip(vertices, vals)}, shift


def _require_ray(s: SchrodingerData):
    if not s.graph.is_half_line:
        raise UnsupportedError("deficiency recurrences are only available on half-line families")


def deficiency_recurrence(s: SchrodingerData, v0: float, N: int, lam: float = -1.0) -> DeficiencySolution:
    """Solve ``(H - lam) v = 0`` on the ray from ``v(start) = v0`` up to index ``N``.

    The endpoint equation fixes ``v(start+1)``; each interior equation then
    determines the next value. Residuals are recorded at every index whose
    equation is fully available.
    """
    _require_ray(s)
    start = s.graph.start
    if N < start + 1:
        raise DomainError(f"N must exceed the start vertex {start}")
    size = N - start + 1
    mant = np.zeros(size)
    offset = np.zeros(size)
    res = np.zeros(size - 1)
    log_off = 0.0
    rescaled = False

    def coeff(n):
        a = s.a(n, n + 1)
        if not (a > 0 and math.isfinite(a)):
            raise NumericError(f"edge coefficient a({n},{n + 1}) = {a} is not a positive finite number")
        return a

    mant[0] = float(v0)
    a_prev = None
    prev = 0.0
    cur = float(v0)
    for i in range(size - 1):
        n = start + i
        a_n = coeff(n)
        q = s.W(n) - lam
        left = 0.0 if a_prev is None else a_prev * (cur - prev)
        nxt = cur + (left + q * cur) / a_n
        if not math.isfinite(nxt):
            raise NumericError(f"recurrence overflowed at index {n + 1}")
        resid = left + a_n * (cur - nxt) + q * cur
        scale = (0.0 if a_prev is None else a_prev * (abs(cur) + abs(prev))) + a_n * (abs(cur) + abs(nxt)) + abs(q * cur)
        res[i] = abs(resid) / scale if scale > 0 else 0.0
        prev, cur, a_prev = cur, nxt, a_n
        if abs(cur) > RESCALE_AT:
            r = abs(cur)
            prev /= r
            cur /= r
            log_off += math.log(r)
            rescaled = True
        mant[i + 1] = cur
        offset[i + 1] = log_off
    sol = DeficiencySolution(start, float(lam), float(v0), mant, offset, res, rescaled)
    bad = np.flatnonzero(res > RESIDUAL_TOL)
    if bad.size:
        raise NumericError(f"residual {res[bad[0]]:.2e} above {RESIDUAL_TOL} at index {start + bad[0]}")
    return sol


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class L2Verdict:
    classification: str
    log_partial: float
    log_threshold: float
    details: dict = field(default_factory=dict)


def classify_l2(sol: DeficiencySolution, threshold: float = L2_THRESHOLD, margin: float = 0.05,
                tail: int = MIN_TERMS) -> L2Verdict:
    """Evidence for ``v`` in or out of ``l2``.

    Divergent when the partial sum passes ``threshold * v0**2`` while the last
    increments ``v(n)**2``, summed in blocks of five, are nondecreasing. Bounded when the tail increments
    decay geometrically (ratio at most ``1 - margin``) or like ``n**-p`` with
    ``p >= 1 + margin``. Anything else is undetermined.
    """
    if len(sol) < MIN_TERMS:
        raise PreconditionError(f"classification needs at least {MIN_TERMS} terms, got {len(sol)}")
    log_inc = 2.0 * sol.log_abs
    nonzero = np.isfinite(log_inc)
    if not nonzero.any():
        return L2Verdict(UNDETERMINED, -math.inf, -math.inf, {"reason": "trivial solution"})
    ref = sol.v0 if sol.v0 != 0 else float(np.exp(0.5 * log_inc[np.argmax(nonzero)]))
    log_threshold = math.log(threshold) + 2.0 * math.log(abs(ref)) if ref != 0 else -math.inf
    log_partial = float(sol.log_partial_l2[-1])

    last = log_inc[-tail:]
    steps = np.diff(last)
    # periodic coefficients make single increments wobble, so compare block sums
    blocks = np.logaddexp.reduce(last[len(last) % BLOCK:].reshape(-1, BLOCK), axis=1)
    nondecreasing = bool(np.all(np.diff(blocks) >= -1e-12 * np.maximum(1.0, np.abs(blocks[1:]))))
    ratio = float(np.exp(steps.max())) if np.all(np.isfinite(steps)) else math.nan
    ns = sol.indices[-tail:].astype(float)
    p = -float(np.polyfit(np.log(ns), last, 1)[0]) if np.all(np.isfinite(last)) else math.nan
    details = {"tail_ratio": ratio, "tail_decay_exponent": p, "tail_nondecreasing": nondecreasing,
               "margin": margin}
    if log_partial > log_threshold and nondecreasing:
        return L2Verdict(L2_DIVERGENT, log_partial, log_threshold, details)
    if ratio <= 1 - margin or p >= 1 + margin:
        return L2Verdict(L2_BOUNDED, log_partial, log_threshold, details)
    return L2Verdict(UNDETERMINED, log_partial, log_threshold, details)


def growth_witness(s: SchrodingerData, sol: DeficiencySolution) -> list[int]:
    """Greedy chain of neighbours along which ``g`` strictly increases.

    At each vertex with ``g > 0`` the equation forces
    ``sum_y a (g(x) - g(y)) = -(W - lam) g(x) < 0``, so some neighbour is
    larger. Starts at the first nonzero index and works with ``-g`` when that
    value is negative. Raises :class:`VerificationError` if the chain stalls.
    """
    _require_ray(s)
    log_abs = sol.log_abs
    sign = sol.sign
    nz = np.flatnonzero(sign != 0)
    if not nz.size:
        raise DomainError("growth witness needs a nonzero solution")
    flip = -1.0 if sign[nz[0]] < 0 else 1.0

    def key(i):  # monotone in the value flip * g
        sg = flip * sign[i]
        return (sg, sg * log_abs[i]) if sg != 0 else (0.0, 0.0)

    i = int(nz[0])
    chain = [sol.start + i]
    last = len(sol) - 1
    while i < last:
        x = sol.start + i
        if not s.W(x) - sol.lam > 0:
            raise PreconditionError(f"W - lambda must be positive along the chain, fails at {x}")
        nbrs = [j for j in (i - 1, i + 1) if 0 <= j <= last]
        j = max(nbrs, key=key)
        if not key(j) > key(i):
            raise VerificationError(f"VIOLATION: no neighbour of {x} increases g", check="growth-witness")
        chain.append(sol.start + j)
        i = j
    return chain


# ---------------------------------------------------------------------------
# Agmon identity and the sandwich inequality


def _edge_terms(s, f, v, verts):
    """Per-edge ``a v(x) v(y) (f(x) - f(y))**2`` over edges touching ``verts``."""
    terms = []
    for x in sorted(verts):
        for y in sorted(s.graph.neighbors(x)):
            if y < x and y in verts:
                continue
            df = f.get(x, 0.0) - f.get(y, 0.0)
            if df:
                terms.append(s.a(x, y) * v[x] * v[y] * df * df)
    return terms


@dataclass(frozen=True)
class AgmonCheck:
    lhs: float
    edge_sum: float
    vertex_sum: float
    scale: float
    log_scale: float  # every value above is in units of exp(log_scale)
    gap: float

    @property
    def holds(self) -> bool:
        return self.gap <= 1e-9


def _check_support(sol: DeficiencySolution, f):
    supp = sorted(x for x, val in f.items() if val != 0)
    if supp and (supp[0] < sol.start or supp[-1] > sol.stop - 1):
        raise PreconditionError(f"supp f must lie in [{sol.start}, {sol.stop - 1}]")
    return supp


def _check_equation(s, lam, v, verts, tol):
    for x in verts:
        r = apply_schrodinger(s, v, x) - lam * v[x]
        scale = sum(s.a(x, y) * (abs(v[x]) + abs(v[y])) for y in s.graph.neighbors(x)) + abs((s.W(x) - lam) * v[x])
        if abs(r) > tol * max(scale, 1e-300):
            raise PreconditionError(f"v does not solve (H - lambda) v = 0 at {x}")


def agmon_identity_check(s: SchrodingerData, lam: float, sol: DeficiencySolution, f) -> AgmonCheck:
    """``<fv, (H-lam)(fv)>`` against the edge sum and the halved vertex sum."""
    supp = _check_support(sol, f)
    if not supp:
        return AgmonCheck(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    window = set(supp)
    for x in supp:
        window.update(s.graph.neighbors(x))
    v, shift = sol.scaled_window(sorted(window))
    _check_equation(s, lam, v, supp, RESIDUAL_TOL)

    fv = {x: f.get(x, 0.0) * v[x] for x in sorted(window)}
    lhs = math.fsum(fv[x] * (apply_schrodinger(s, fv, x) - lam * fv[x]) for x in supp)
    edge_terms = _edge_terms(s, f, v, set(supp))
    edge_sum = math.fsum(edge_terms)
    half = []
    for x in sorted(window):
        fx = f.get(x, 0.0)
        for y in sorted(s.graph.neighbors(x)):
            if y in window:
                df = fx - f.get(y, 0.0)
                half.append(0.5 * v[x] * s.a(x, y) * v[y] * df * df)
    vertex_sum = math.fsum(half)
    scale = math.fsum(abs(t) for t in edge_terms)
    spread = max(lhs, edge_sum, vertex_sum) - min(lhs, edge_sum, vertex_sum)
    gap = spread / scale if scale > 0 else spread
    return AgmonCheck(lhs, edge_sum, vertex_sum, scale, 2.0 * shift, gap)


@dataclass(frozen=True)
class SandwichCertificate:
    """``lower <= middle <= upper`` with two candidate upper bounds.

    ``upper_shell`` is ``(N/2) sum v**2`` over ``B_{R+1}`` minus ``B_R``;
    ``upper_transition`` is the same sum over every endpoint of an edge on
    which the cutoff changes, which is what the edge-by-edge estimate gives.
    """

    R: float
    lam: float
    k: float
    valence: int
    lower: float
    middle: float
    upper_shell: float
    upper_transition: float
    log_scale: float
    lower_holds: bool
    shell_holds: bool
    transition_holds: bool


def sandwich_check(s: SchrodingerData, lam: float, sol: DeficiencySolution, ctx: MetricContext,
                   x0: int, R: float, k, valence: int, rtol: float = 1e-9) -> SandwichCertificate:
    """Evaluate the cutoff sandwich ``sum_{B_R} v**2 <= <fv,(H-lam)fv> <= ...``."""
    kval = k.k if isinstance(k, FormBound) else float(k)
    if not lam < kval - 1:
        raise PreconditionError(f"need lambda < k - 1, got lambda = {lam}, k = {kval}")
    dist = ball_distances(ctx, x0, R + 1)
    f = cutoff(ctx, x0, R)
    if isinstance(k, FormBound) and not set(dist) <= k.region.vertices:
        raise PreconditionError("the form bound does not cover B_{R+1}")
    supp = _check_support(sol, f)
    window = set(dist)
    for x in dist:
        window.update(s.graph.neighbors(x))
    v, shift = sol.scaled_window(sorted(window))
    if supp:
        _check_equation(s, lam, v, supp, RESIDUAL_TOL)

    inner = sorted(x for x, d in dist.items() if d <= R)
    shell = sorted(x for x, d in dist.items() if d > R)
    lower = math.fsum(v[x] ** 2 for x in inner)
    middle = math.fsum(_edge_terms(s, f, v, set(dist)))
    upper_shell = 0.5 * valence * math.fsum(v[x] ** 2 for x in shell)
    moving = set()
    for x in dist:
        for y in s.graph.neighbors(x):
            if f.get(x, 0.0) != f.get(y, 0.0):
                moving.update((x, y))
    upper_transition = 0.5 * valence * math.fsum(v[x] ** 2 for x in sorted(moving))

    def le(p, q):
        return p <= q + rtol * max(abs(p), abs(q))

    return SandwichCertificate(R, lam, kval, valence, lower, middle, upper_shell, upper_transition,
                               2.0 * shift, le(lower, middle), le(middle, upper_shell),
                               le(middle, upper_transition))


# ---------------------------------------------------------------------------
# orchestration

LAPLACIAN = "laplacian"
SHIFTED = "schrodinger-with-shift"


@dataclass
class ProbeReport:
    family: dict
    mode: str
    lam: float
    N: int
    classification: str
    verdict: L2Verdict
    solution: DeficiencySolution
    form_bound: float
    w_min: float
    w_bounded_below: bool
    completeness: str | None
    witness: list[int] | None = None
    certificates: list[SandwichCertificate] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def _w_bounded_below(ws: np.ndarray) -> bool:
    """Heuristic: the second half of the window does not go below the first."""
    half = len(ws) // 2
    return bool(ws[half:].min() >= ws[:half].min())


def _sandwich_series(s, start, v0, radii, notes, budget):
    """Sandwich certificates at ``lam = k - 2`` with the global bound ``k = 0``.

    Gauge data has form ``Q_c >= 0`` on every finitely supported function, so
    ``k = 0`` holds on every ball; regional eigenvalue bounds are only larger.
    """
    ctx = MetricContext.from_schrodinger(s)
    balls = {}
    for R in radii:
        try:
            balls[R] = ball_distances(ctx, start, R + 1, budget=budget)
        except BudgetError:
            notes.append(f"R = {R}: ball B_(R+1) has more than {budget} vertices, skipped")
    if not balls:
        return []
    lam = -2.0
    sol = deficiency_recurrence(s, v0, max(max(b) for b in balls.values()) + 2, lam)
    return [sandwich_check(s, lam, sol, ctx, start, R, 0.0, 2) for R in sorted(balls)]


def esa_probe(spec: FamilySpec, mode: str = LAPLACIAN, N: int = 2000, v0: float = 1.0,
              radii=range(3, 11), form_size: int = 1000, ball_budget: int = 200_000) -> ProbeReport:
    """Run the deficiency recurrence for a ray family and assemble the evidence.

    ``laplacian`` probes ``lam = -1``. ``schrodinger-with-shift`` uses
    ``lam = kappa - 1`` with ``kappa = min W`` over the window when ``W`` looks
    bounded below, and ``lam = k - 2`` (``k`` the form bound) otherwise.
    Sandwich certificates are attached when the metric is complete.
    """
    if not spec.is_ray:
        raise UnsupportedError(f"esa probes need a half-line family, got {spec.kind}")
    if mode not in (LAPLACIAN, SHIFTED):
        raise DomainError(f"unknown probe mode {mode!r}")
    g = build_family(spec)
    s = gauge_to_schrodinger(g)
    start = g.start
    notes = []
    ws = np.array([s.W(n) for n in range(start, N + 1)])
    bounded = _w_bounded_below(ws)
    kappa = float(ws.min())
    reg = combinatorial_ball(g, start, min(form_size, N - start) - 1)
    k = form_lower_bound(s, reg)

    if mode == LAPLACIAN:
        lam = -1.0
    elif bounded:
        lam = kappa - 1.0
        notes.append(f"W >= {kappa:.6g} on the window; shift chosen so that kappa + kappa1 = 1")
    else:
        lam = k.k - 2.0
        notes.append("W appears unbounded below; using lambda = k - 2 from the form bound")

    sol = deficiency_recurrence(s, v0, N, lam)
    verdict = classify_l2(sol)
    if verdict.classification == L2_BOUNDED:
        notes.append("l2-bounded means bounded within the probe horizon; it does not prove a kernel vector")

    witness = None
    omegas = {g.omega(n) for n in range(start, N + 1)}
    if len(omegas) == 1 and np.all(ws - lam > 0):
        witness = growth_witness(s, sol)

    closed, _ = closed_form_completeness(spec)
    certs = []
    if closed == "complete":
        certs = _sandwich_series(s, start, v0, radii, notes, ball_budget)
    return ProbeReport(spec.as_dict(), mode, lam, N, verdict.classification, verdict, sol, k.k, kappa,
                       bounded, closed, witness, certs, notes)

"""Closed graph-sum formulas for H_{g,n} in the z-coordinates.

Bookkeeping used throughout: a graph with ``E`` edges and Betti number
``b = E - n + 1`` contributes to ``H_{g,n}`` only if ``b <= g``.  Every vertex
operator is used in the form ``hbar * U_i`` (so all hbar powers stay
nonnegative) and every edge weight is divided by ``hbar^2``; the genus-``g``
part of a graph is then the coefficient of ``hbar^(2(g - b))``.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .graphs import classify, enumerate_connected
from .model import ModelCache, apply_S_of_QD, gamma, inv_S2_coeff, inv_S_coeff, x_series
from .series import (
    LaurentSeries,
    SeriesContext,
    coeff,
    coeffs_by,
    divided_difference,
    embed,
    exp_series,
    log_series,
    zdz,
    zdz_inverse,
)

log = logging.getLogger(__name__)


# series carrying u_i for vertices not yet eliminated
VertexPolynomial = LaurentSeries


class ResidualPolesError(ArithmeticError):
    """Assembled H_{g,n} still has terms with negative exponents."""


@dataclass(frozen=True)
class TaskSpec:
    g: int
    n: int
    order: int

    def __post_init__(self):
        if self.g < 0 or self.n < 1 or self.order < 1:
            raise ValueError(f"invalid task {self}")

    @property
    def euler(self) -> int:
        """2g - 2 + n, the hbar degree of H_{g,n} in H_n."""
        return 2 * self.g - 2 + self.n

    @property
    def stable(self) -> bool:
        return self.euler > 0


@lru_cache(maxsize=None)
def task_context(n: int, order: int, hbar_cap: int) -> SeriesContext:
    return SeriesContext(n, order, hbar=(0, hbar_cap), aux=tuple(f"u{i}" for i in range(1, n + 1)))


@lru_cache(maxsize=None)
def output_context(n: int, order: int) -> SeriesContext:
    return SeriesContext(n, order)


def constant_c(g: int, n: int, spec) -> Fraction:
    """(-1)^n psi^{(2g-2+n)}(0) [u^{2g}] S(u)^{-2}."""
    k = 2 * g - 2 + n
    if k < 1:
        raise ValueError("constant_c needs 2g - 2 + n >= 1")
    return (-1) ** n * spec.psi_derivative_at_zero(k) * inv_S2_coeff(g)


# ----------------------------------------------------------------------
# building blocks
# ----------------------------------------------------------------------

def edge_weight(cache: ModelCache, ctx: SeriesContext, i: int, j: int, scaled: bool = True) -> LaurentSeries:
    """w_{i,j} = exp(hbar^2 u_i u_j S_i S_j gamma_{i,j}) - 1, or w_{i,j}/hbar^2 if ``scaled``.

    S_i stands for S(u_i hbar z_i d/dz_i).
    """
    a = apply_S_of_QD(apply_S_of_QD(gamma(ctx, i, j), i, f"u{i}"), j, f"u{j}")
    a = a * ctx.var(f"u{i}") * ctx.var(f"u{j}")
    if not scaled:
        return exp_series(a * ctx.var("hbar") ** 2) - 1
    hb2 = ctx.var("hbar") ** 2
    result = ctx.zero()
    term = ctx.one()
    k = 0
    while True:
        k += 1
        term = term * a if k == 1 else term * a * hb2
        if not term:
            return result
        result = result + term.scale(Fraction(1, _fact(k)))


def _fact(k: int) -> int:
    out = 1
    for t in range(2, k + 1):
        out *= t
    return out


def leaf_term(ctx: SeriesContext, i: int, k: int, scaled: bool = True) -> LaurentSeries:
    """hbar u_k S(u_k hbar z_k d/dz_k) z_i/(z_k - z_i) for a leaf ``i`` hanging at ``k``.

    This is D_i^{-1}((1/(hbar Q_i)) [u_i^1] w_{i,k}) in closed form; ``scaled``
    drops the overall hbar (matching the scaled edge weight).
    """
    t = apply_S_of_QD(gamma(ctx, i, k, -1), k, f"u{k}") * ctx.var(f"u{k}")
    return t if scaled else t * ctx.var("hbar")


def vertex_operator(cache: ModelCache, f: LaurentSeries, i: int, jmin: int = 1, slack: int = 0) -> LaurentSeries:
    """hbar * (D_i^{-1} U_i restricted to j >= jmin)... applied to ``f``.

    Computes sum_{j>=jmin} sum_{r>=0} D_i^{j-jmin}( [v^j]L_r / Q_i * [u_i^{r+1}](V_i f) )
    with V_i = e^{u_i(S(u_i hbar z_i d/dz_i) - 1) y_i} / S(u_i hbar).
    ``jmin=1`` is hbar*Ubar_i, ``jmin=0`` is hbar*U_i.  ``slack`` widens the
    r and j loops (the extra terms vanish identically).
    """
    ctx = f.ctx
    u = f"u{i}"
    if not f:
        return f
    if f.min_degree(u) < 1:
        raise ValueError(f"vertex operator needs f divisible by {u}")
    G = cache.at("V", ctx, i) * f
    parts = coeffs_by(G, u)
    rmax = max(parts) - 1
    if slack:
        rmax = (rmax + 1) * (1 + slack)
    jmax = max(cache.v_degree(r) for r in range(rmax + 1))
    if slack:
        jmax = (jmax + 1) * (1 + slack)
    C: dict[int, LaurentSeries] = {}
    for r in range(rmax + 1):
        g = parts.get(r + 1)
        if not g:
            continue
        for j in range(jmin, jmax + 1):
            L = cache.Lj_at(r, j, ctx, i)
            if L:
                t = L * g
                C[j] = C[j] + t if j in C else t
    invQ = cache.at("invQ", ctx, i)
    acc = ctx.zero()
    for j in range(jmax, jmin - 1, -1):
        if acc:
            acc = invQ * zdz(acc, i)
        if j in C:
            acc = acc + invQ * C[j]
    return acc


def _extract(F: LaurentSeries, c: int, out: SeriesContext) -> LaurentSeries:
    return embed(coeff(F, "hbar", c), out)


def negative_part(f: LaurentSeries) -> LaurentSeries:
    """Terms with some negative z-exponent."""
    ctx = f.ctx
    return LaurentSeries(ctx, {k: c for k, c in f.terms.items() if min(ctx.exponents(k)[0], default=0) < 0})


def _assert_power_series(f: LaurentSeries, what: str) -> None:
    neg = negative_part(f)
    if neg:
        raise ResidualPolesError(f"{what}: {len(neg)} terms with negative exponents remain, e.g. {neg!r}")


# ----------------------------------------------------------------------
# dispatch
# ----------------------------------------------------------------------

def make_cache(spec, task: TaskSpec) -> ModelCache:
    return ModelCache(spec, task.order, hbar_cap=2 * task.g)


def compute_H(task: TaskSpec, cache: ModelCache, slack: int = 0, check: bool = True) -> LaurentSeries:
    """H_{g,n} as a power series in z_1..z_n up to total degree ``task.order``."""
    g, n, N = task.g, task.n, task.order
    if cache.order < N or cache.hbar_cap < 2 * g:
        raise ValueError("model cache windows too small for task")
    missing = cache.spec.missing_inputs(N, g, n)
    if missing:
        warnings.warn(f"H_{{{g},{n}}} to order {N} may depend on unsupplied {', '.join(missing)}", stacklevel=2)
    if (g, n) == (0, 1):
        return compute_H01(cache, N)
    if (g, n) == (0, 2):
        return compute_H02(cache, N)
    if n == 1:
        result = _compute_g1(g, cache, N, slack)
    elif n == 2:
        result = _compute_g2(g, cache, N, slack)
    else:
        result = _compute_general(g, n, cache, N, slack)
    result = result + constant_c(g, n, cache.spec)
    if check:
        _assert_power_series(result, f"H_{{{g},{n}}}")
    return result


def compute_H01(cache: ModelCache, order: int | None = None) -> LaurentSeries:
    """H_{0,1} = D^{-1} y(z_1)."""
    out = output_context(1, order or cache.order)
    y = cache.at("y", out, 1)
    return cache.apply_D_inverse(y, 1)


def compute_H02(cache: ModelCache, order: int | None = None) -> LaurentSeries:
    """H_{0,2} = log((z_1^{-1} - z_2^{-1}) / (X_1^{-1} - X_2^{-1})).

    Written as -log((X_2 - X_1)/(z_2 - z_1)) - psi(y_1) - psi(y_2), with the
    divided difference expanded directly (no diagonal division).
    """
    N = order or cache.order
    out = output_context(2, N)
    # the divided difference lowers degree by one, so X is needed to order N + 1
    dd = divided_difference(x_series(cache.spec, N + 1), out, 1, 2)
    psi = cache.psi_deriv(0)
    return -log_series(dd) - cache.at(psi, out, 1) - cache.at(psi, out, 2)


def _compute_g1(g: int, cache: ModelCache, N: int, slack: int) -> LaurentSeries:
    c = 2 * g
    ctx = task_context(1, N, c)
    out = output_context(1, N)
    V = cache.at("V", ctx, 1)
    parts = coeffs_by(V, "u1")
    rmax = max(parts) - 1
    if slack:
        rmax = (rmax + 1) * (1 + slack)
    jmax = max([cache.v_degree(r) for r in range(rmax + 1)] + [cache.v_degree(0) - 1])
    if slack:
        jmax = (jmax + 1) * (1 + slack)
    invQ = cache.at("invQ", ctx, 1)
    Dy = invQ * zdz(cache.at("y", ctx, 1), 1)
    acc = ctx.zero()
    for j in range(jmax, 0, -1):
        if acc:
            acc = invQ * zdz(acc, 1)
        Cj = ctx.zero()
        for r in range(1, rmax + 1):
            part = parts.get(r + 1)
            if part:
                Cj = Cj + cache.Lj_at(r, j, ctx, 1) * part
        acc = acc + invQ * Cj + cache.Lj_at(0, j + 1, ctx, 1) * Dy
    main = _extract(acc, c, out)
    psi_odd = cache.at(cache.psi_deriv(2 * g - 1), out, 1)
    # the psi^{(2g-1)}(0) [u^{2g}] S^{-2} piece is constant_c(g, 1)
    return main + psi_odd.scale(inv_S_coeff(g))


def _compute_g2(g: int, cache: ModelCache, N: int, slack: int) -> LaurentSeries:
    c = 2 * g
    ctx = task_context(2, N, c)
    out = output_context(2, N)
    w = edge_weight(cache, ctx, 1, 2)
    F = vertex_operator(cache, vertex_operator(cache, w, 2, 1, slack), 1, 1, slack)
    F = F + vertex_operator(cache, leaf_term(ctx, 2, 1), 1, 1, slack)
    F = F + vertex_operator(cache, leaf_term(ctx, 1, 2), 2, 1, slack)
    return _extract(F, c, out)


def graph_contribution(g: int, graph, cache: ModelCache, N: int, slack: int = 0) -> LaurentSeries | None:
    """Genus-g contribution of one graph to the explicit n >= 3 formula (None if absent)."""
    n = graph.n
    c = 2 * (g - graph.betti)
    if c < 0:
        return None
    ctx = task_context(n, N, c)
    internal, leaf_edges = classify(graph)
    F = ctx.one()
    for e in graph.edges:
        if e not in leaf_edges:
            F = F * edge_weight(cache, ctx, *e)
    for a, b in leaf_edges:
        leaf, k = (a, b) if graph.degree(a) == 1 else (b, a)
        w = edge_weight(cache, ctx, leaf, k)
        F = F * (vertex_operator(cache, w, leaf, 1, slack) + leaf_term(ctx, leaf, k))
    for v in sorted(internal):
        F = vertex_operator(cache, F, v, 1, slack)
    return _extract(F, c, output_context(n, N))


def _compute_general(g: int, n: int, cache: ModelCache, N: int, slack: int) -> LaurentSeries:
    total = output_context(n, N).zero()
    for graph in enumerate_connected(n):
        term = graph_contribution(g, graph, cache, N, slack)
        if term is not None:
            total = total + term
    return total


def dh_cross_check(task: TaskSpec, cache: ModelCache, slack: int = 0) -> LaurentSeries:
    """D_1...D_n H_{g,n} from the graph sum with the full U_i (no integration)."""
    g, n, N = task.g, task.n, task.order
    if n < 2 or (g, n) == (0, 2):
        raise ValueError("dh_cross_check needs n >= 2 and (g, n) != (0, 2)")
    out = output_context(n, N)
    total = out.zero()
    for graph in enumerate_connected(n):
        c = 2 * (g - graph.betti)
        if c < 0:
            continue
        total = total + _extract(dh_graph_series(graph, cache, N, c, slack), c, out)
    return total


def dh_graph_series(graph, cache: ModelCache, N: int, c: int, slack: int = 0) -> LaurentSeries:
    """(hbar U_n)...(hbar U_1) prod w/hbar^2 for one graph, all hbar orders up to ``c``."""
    ctx = task_context(graph.n, N, c)
    F = ctx.one()
    for e in graph.edges:
        F = F * edge_weight(cache, ctx, *e)
    for v in range(1, graph.n + 1):
        F = vertex_operator(cache, F, v, 0, slack)
    return F


def apply_D_all(cache: ModelCache, f: LaurentSeries) -> LaurentSeries:
    for i in range(1, f.ctx.n + 1):
        f = cache.apply_D(f, i)
    return f


def u_bar_apply(cache: ModelCache, f: LaurentSeries, i: int, slack: int = 0) -> LaurentSeries:
    """hbar * Ubar_i f, i.e. the j >= 1 part of hbar * U_i with one D_i^{-1} taken."""
    return vertex_operator(cache, f, i, 1, slack)


def u_apply(cache: ModelCache, f: LaurentSeries, i: int, slack: int = 0) -> LaurentSeries:
    """hbar * U_i f."""
    return vertex_operator(cache, f, i, 0, slack)


# ----------------------------------------------------------------------
# closed expressions for small (g, n), written out by hand
# ----------------------------------------------------------------------

class _Basic:
    """psi_i^{(k)}, y_i^{[k]}, 1/Q_i re-keyed to vertex i of ``ctx``."""

    def __init__(self, cache: ModelCache, ctx: SeriesContext):
        self.cache = cache
        self.ctx = ctx

    def psi(self, k, i):
        return self.cache.at(self.cache.psi_deriv(k), self.ctx, i)

    def yb(self, k, i):
        return self.cache.at(self.cache.y_bracket(k), self.ctx, i)

    def invQ(self, i):
        return self.cache.at("invQ", self.ctx, i)

    def D(self, f, i):
        return self.cache.apply_D(f, i)


def _ref_11(b: _Basic, spec) -> LaurentSeries:
    p1, p2 = b.psi(1, 1), b.psi(2, 1)
    y1, y2 = b.yb(1, 1), b.yb(2, 1)
    iq = b.invQ(1).scale(Fraction(1, 24))
    out = b.D((p1 * p1 * y2 + p2 * y1) * iq, 1)
    out = out + (p2 * y2 - p1) * iq - p1.scale(Fraction(1, 24))
    return out + spec.psi_derivative_at_zero(1) * Fraction(1, 12)


def _ref_03(b: _Basic, spec) -> LaurentSeries:
    ctx = b.ctx
    out = ctx.zero()
    for i in range(1, 4):
        t = b.psi(1, i) * b.invQ(i)
        for j in range(1, 4):
            if j != i:
                t = t * gamma(ctx, j, i, -1)
        out = out + t
    return out - spec.psi_derivative_at_zero(1)


def _ref_12(b: _Basic, spec) -> LaurentSeries:
    ctx = b.ctx
    out = ctx.zero()
    for i, j in ((1, 2), (2, 1)):
        gl, g1 = gamma(ctx, j, i, -1), gamma(ctx, j, i, 1)
        p1, p2, p3 = b.psi(1, i), b.psi(2, i), b.psi(3, i)
        y2 = b.yb(2, i)
        iq = b.invQ(i).scale(Fraction(1, 24))
        out = out + b.D(b.D(gl * (p2 + p1 * p1 * p1 * y2) * iq, i), i)
        out = out + b.D(p1 * (p1 * (g1 - gl) + gl * p2 * y2 * 3) * iq, i)
        out = out + (p2 * (g1 - gl * 2) + p3 * gl * y2) * iq
    g12 = gamma(ctx, 1, 2)
    out = out + (g12 * g12 * b.psi(1, 1) * b.psi(1, 2) * b.invQ(1) * b.invQ(2)).scale(Fraction(1, 2))
    return out - spec.psi_derivative_at_zero(2) * Fraction(1, 12)


def _ref_04(b: _Basic, spec) -> LaurentSeries:
    from itertools import permutations

    ctx = b.ctx
    out = ctx.zero()
    for k in range(1, 5):
        star = b.invQ(k)
        for i in range(1, 5):
            if i != k:
                star = star * gamma(ctx, i, k, -1)
        p1 = b.psi(1, k)
        out = out + b.D(p1 * p1 * star, k) + b.psi(2, k) * star
    for a, bb, c, d in permutations(range(1, 5)):
        if a > d:
            continue  # each path once
        out = out + (b.psi(1, bb) * b.psi(1, c) * gamma(ctx, a, bb, -1) * gamma(ctx, bb, c)
                     * gamma(ctx, d, c, -1) * b.invQ(bb) * b.invQ(c))
    return out + spec.psi_derivative_at_zero(2)


_REFERENCE = {(1, 1): _ref_11, (0, 3): _ref_03, (1, 2): _ref_12, (0, 4): _ref_04}


def reference_formulas(task: TaskSpec, cache: ModelCache) -> LaurentSeries:
    """Direct evaluation of the known small-(g, n) closed expressions."""
    try:
        fn = _REFERENCE[(task.g, task.n)]
    except KeyError:
        raise ValueError(f"no reference formula for (g, n) = ({task.g}, {task.n})") from None
    return fn(_Basic(cache, output_context(task.n, task.order)), cache.spec)


def g1_slots(g: int, cache: ModelCache, N: int) -> dict[int, LaurentSeries]:
    """The n = 1 assembly split by D-power: {p: A_p} with the main part = sum_p D^p A_p.

    Only the hbar^{2g} part is kept; the psi^{(2g-1)} terms are not included.
    """
    c = 2 * g
    ctx = task_context(1, N, c)
    out = output_context(1, N)
    V = cache.at("V", ctx, 1)
    parts = coeffs_by(V, "u1")
    rmax = max(parts) - 1
    jmax = max([cache.v_degree(r) for r in range(rmax + 1)] + [cache.v_degree(0) - 1])
    invQ = cache.at("invQ", ctx, 1)
    Dy = invQ * zdz(cache.at("y", ctx, 1), 1)
    slots = {}
    for j in range(1, jmax + 1):
        Cj = ctx.zero()
        for r in range(1, rmax + 1):
            part = parts.get(r + 1)
            if part:
                Cj = Cj + cache.Lj_at(r, j, ctx, 1) * part
        Cj = invQ * Cj + cache.Lj_at(0, j + 1, ctx, 1) * Dy
        Cj = _extract(Cj, c, out)
        if Cj:
            slots[j - 1] = Cj
    return slots

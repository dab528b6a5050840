"""Model data (psi, y), the spectral change of variables and the vertex functions."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

from .series import (
    LaurentSeries,
    SeriesContext,
    WindowError,
    coeff,
    coeffs_by,
    derivative,
    embed,
    exp_series,
    invert_unit,
    rational,
    shift_key,
    substitute,
    zdz,
    zdz_inverse,
    zdz_power,
)


# ----------------------------------------------------------------------
# the universal even series S(x) = (e^{x/2} - e^{-x/2}) / x
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def S_coeff(k: int) -> Fraction:
    """[x^{2k}] S(x) = 1 / (2^{2k} (2k+1)!)."""
    return Fraction(1, 4 ** k * factorial(2 * k + 1))


def _even_series_power(power: int, kmax: int) -> tuple[Fraction, ...]:
    """Coefficients of x^{2k}, k <= kmax, of S(x)^power (power may be negative)."""
    base = [S_coeff(k) for k in range(kmax + 1)]
    if power < 0:
        inv = [Fraction(0)] * (kmax + 1)
        inv[0] = Fraction(1)
        for k in range(1, kmax + 1):
            inv[k] = -sum(base[a] * inv[k - a] for a in range(1, k + 1))
        base, power = inv, -power
    out = [Fraction(0)] * (kmax + 1)
    out[0] = Fraction(1)
    for _ in range(power):
        out = [sum(out[a] * base[k - a] for a in range(k + 1)) for k in range(kmax + 1)]
    return tuple(out)


@lru_cache(maxsize=None)
def inv_S_coeff(k: int) -> Fraction:
    """[x^{2k}] 1/S(x)."""
    return _even_series_power(-1, k)[k]


@lru_cache(maxsize=None)
def inv_S2_coeff(k: int) -> Fraction:
    """[x^{2k}] 1/S(x)^2."""
    return _even_series_power(-2, k)[k]


def S_series(arg: LaurentSeries, power: int = 1) -> LaurentSeries:
    """S(arg)^power for a nilpotent ``arg`` (e.g. ``u*hbar``)."""
    ctx = arg.ctx
    sq = arg * arg
    result = ctx.one()
    p = ctx.one()
    k = 0
    while True:
        k += 1
        p = p * sq
        if not p:
            return result
        c = _even_series_power(power, k)[k] if power != 1 else S_coeff(k)
        result = result + p.scale(c)


def apply_S_of_QD(f: LaurentSeries, i, u: str, power: int = 1) -> LaurentSeries:
    """Apply S(u hbar z_i d/dz_i)^power; diagonal on z_i-monomials.

    Each term ``c z_i^a`` becomes ``c S(u hbar a)^power z_i^a`` truncated by
    the hbar window.  (Q_i D_i = z_i d/dz_i.)
    """
    ctx = f.ctx
    fi = ctx._field_of(i)
    step = shift_key(ctx, hbar=2, **{u: 2})
    coeffs = S_coeff if power == 1 else (lambda k: _even_series_power(power, k)[k])
    out: dict[int, Fraction] = {}
    for key, c in f.terms.items():
        a = ctx.field(key, fi) - (ctx.field(key, fi - 1) if fi else 0)
        out[key] = out.get(key, 0) + c
        if not a:
            continue
        k = 1
        nk = key + step
        a2 = a * a
        ak = a2
        while not ctx.above(nk):
            out[nk] = out.get(nk, 0) + c * coeffs(k) * ak
            k += 1
            nk += step
            ak *= a2
    return LaurentSeries(ctx, {k: v for k, v in out.items() if v})


# ----------------------------------------------------------------------
# input data
# ----------------------------------------------------------------------

def _poly_eval_deriv(coeffs: Sequence[Fraction], k: int) -> list[Fraction]:
    """Coefficient list (index = power) of the k-th derivative of sum c_j y^j."""
    return [coeffs[j] * factorial(j) / factorial(j - k) if j >= k else Fraction(0)
            for j in range(len(coeffs))][k:] or [Fraction(0)]


@dataclass(frozen=True)
class ModelSpec:
    """psi(y) = sum_{k>=1} c_k y^k and y(z) = sum_{k>=1} s_k z^k (finite lists).

    ``psi_coeffs[0]`` is c_1.  Missing higher coefficients are zero.
    """

    psi_coeffs: tuple[Fraction, ...]
    y_coeffs: tuple[Fraction, ...]
    name: str = "custom"
    psi_exact: bool = False  # True when psi_coeffs is the complete polynomial
    y_exact: bool = False

    def __post_init__(self):
        object.__setattr__(self, "psi_coeffs", tuple(rational(c) for c in self.psi_coeffs))
        object.__setattr__(self, "y_coeffs", tuple(rational(c) for c in self.y_coeffs))

    @property
    def psi_list(self) -> list[Fraction]:
        """psi as a power-indexed coefficient list (index 0 is the zero constant)."""
        return [Fraction(0)] + list(self.psi_coeffs)

    @property
    def y_list(self) -> list[Fraction]:
        return [Fraction(0)] + list(self.y_coeffs)

    def psi_derivative_at_zero(self, k: int) -> Fraction:
        """psi^{(k)}(0) = k! c_k."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if k > len(self.psi_coeffs):
            if not self.psi_exact:
                warnings.warn(f"psi coefficient c_{k} not supplied; treated as 0", stacklevel=2)
            return Fraction(0)
        return factorial(k) * self.psi_coeffs[k - 1]

    def missing_inputs(self, order: int, g: int, n: int) -> list[str]:
        """Unsupplied coefficients that H_{g,n} up to z-degree ``order`` may depend on.

        h_{g,mu} with |mu| <= d sees c_k for k <= 2g - 2 + n + d and s_k for k <= d.
        """
        out = []
        kpsi = 2 * g - 2 + n + order
        if not self.psi_exact and len(self.psi_coeffs) < kpsi:
            out.append(f"c_{len(self.psi_coeffs) + 1}..c_{kpsi}")
        if not self.y_exact and len(self.y_coeffs) < order:
            out.append(f"s_{len(self.y_coeffs) + 1}..s_{order}")
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "psi": [str(c) for c in self.psi_coeffs],
            "y": [str(s) for s in self.y_coeffs],
            "psi_exact": self.psi_exact,
            "y_exact": self.y_exact,
        }


def psi_derivative_at_zero(spec: ModelSpec, k: int) -> Fraction:
    return spec.psi_derivative_at_zero(k)


# ----------------------------------------------------------------------
# cached vertex functions
# ----------------------------------------------------------------------

class ModelCache:
    """All one-vertex series of a model, exact to z-order ``order`` and hbar^``hbar_cap``.

    Series are built in a single-vertex context with z-variable ``z`` and
    auxiliaries ``u``, ``v``; :meth:`at` re-keys them to vertex ``i`` of a
    task context (``z -> z_i``, ``u -> u_i``).
    """

    def __init__(self, spec: ModelSpec, order: int, hbar_cap: int = 0):
        if order < 1:
            raise ValueError("order must be >= 1")
        self.spec = spec
        self.order = order
        self.hbar_cap = hbar_cap
        self.vctx = SeriesContext(1, order, hbar=(0, hbar_cap), aux=("u", "v"), z_names=("z",))
        ctx = self.vctx
        z = ctx.var("z")
        self.z = z
        self.y = ctx.from_dict({(k,): s for k, s in enumerate(spec.y_list) if k and s})
        self._psi_k: dict[int, LaurentSeries] = {}
        self.Q = ctx.one() - zdz(self.y, "z") * self.psi_deriv(1)
        self.invQ = invert_unit(self.Q)
        self.X = z * exp_series(-self.psi_deriv(0))
        self.V = self._vertex_exponential()
        self._L: list[LaurentSeries] = []
        self._Lj: dict[tuple[int, int], LaurentSeries] = {}
        self._embedded: dict = {}

    # -- basic functions -------------------------------------------------
    def psi_deriv(self, k: int) -> LaurentSeries:
        """psi^{(k)}(y(z)) (k = 0 gives psi(y(z)))."""
        if k not in self._psi_k:
            d = _poly_eval_deriv(self.spec.psi_list, k)
            poly = self.vctx.from_dict({(j,): c for j, c in enumerate(d) if c and j > 0})
            const = d[0] if d else Fraction(0)
            if poly:
                val = substitute(poly, "z", self.y)
            else:
                val = self.vctx.zero()
            self._psi_k[k] = val + const
        return self._psi_k[k]

    def y_bracket(self, k: int) -> LaurentSeries:
        """y^{[k]} = (z d/dz)^k y(z)."""
        return zdz_power(self.y, "z", k)

    def _vertex_exponential(self) -> LaurentSeries:
        """e^{u (S(u hbar z d/dz) - 1) y(z)} / S(u hbar)."""
        ctx = self.vctx
        shifted = apply_S_of_QD(self.y, "z", "u") - self.y
        expo = ctx.var("u") * shifted
        return exp_series(expo) * S_series(ctx.var("u") * ctx.var("hbar"), power=-1)

    # -- L_r -------------------------------------------------------------
    def _build_L(self, rmax: int) -> None:
        """L_r(v, y, hbar) for r <= rmax, built in y then composed with y(z)."""
        N = self.order
        ny = N + rmax
        yctx = SeriesContext(1, ny, hbar=(0, self.hbar_cap), aux=("v",), z_names=("y",))
        psi = self.spec.psi_list
        v = yctx.var("v")
        hb = yctx.var("hbar")

        def psi_deriv_poly(k):
            d = _poly_eval_deriv(psi, k)
            return yctx.from_dict({(j,): c for j, c in enumerate(d) if c})

        # v * (S(v x)/S(x) - 1) psi  with x = hbar d/dy
        expo = yctx.zero()
        kmax = self.hbar_cap // 2
        for k in range(1, kmax + 1):
            rho = yctx.zero()
            for a in range(k + 1):
                rho = rho + (v ** (2 * a)).scale(S_coeff(a) * inv_S_coeff(k - a))
            expo = expo + v * rho * (hb ** (2 * k)) * psi_deriv_poly(2 * k)
        L = exp_series(expo) if expo else yctx.one()
        dpsi = psi_deriv_poly(1)
        Ls = [L]
        for _ in range(rmax):
            L = derivative(L, "y") + v * dpsi * L
            Ls.append(L)
        self._L_y = Ls
        self._yctx = yctx
        y = self.y
        self._L = [substitute(Lr, "y", y) if Lr else self.vctx.zero() for Lr in Ls]
        self._Lj.clear()

    def L_y(self, r: int) -> LaurentSeries:
        """L_r as a series in (v, y, hbar) before substituting y = y(z)."""
        self.L(r)
        return self._L_y[r]

    def L(self, r: int) -> LaurentSeries:
        """L_r(v, y(z), hbar) in the vertex context."""
        if r >= len(self._L):
            self._build_L(max(r, 2 * len(self._L), 4))
        return self._L[r]

    def Lj(self, r: int, j: int) -> LaurentSeries:
        """[v^j] L_r(v, y(z), hbar)."""
        key = (r, j)
        if key not in self._Lj:
            self._Lj[key] = coeff(self.L(r), "v", j)
        return self._Lj[key]

    def v_degree(self, r: int) -> int:
        return self.L(r).max_degree("v")

    # -- embedding into task contexts -------------------------------------
    def at(self, f: LaurentSeries | str, ctx: SeriesContext, i: int) -> LaurentSeries:
        """Re-key a vertex series (or a named cached one) to vertex ``i`` of ``ctx``."""
        if isinstance(f, str):
            key = (f, ctx, i)
            if key not in self._embedded:
                self._embedded[key] = self.at(getattr(self, f), ctx, i)
            return self._embedded[key]
        rename = {"z": ctx.z_names[i - 1], "u": f"u{i}"}
        return embed(f, ctx, rename)

    def Lj_at(self, r: int, j: int, ctx: SeriesContext, i: int) -> LaurentSeries:
        key = ("Lj", r, j, ctx, i)
        if key not in self._embedded:
            self._embedded[key] = self.at(self.Lj(r, j), ctx, i)
        return self._embedded[key]

    # -- operators -------------------------------------------------------
    def apply_D(self, f: LaurentSeries, i: int) -> LaurentSeries:
        """D_i = (1/Q_i) z_i d/dz_i."""
        return self.at("invQ", f.ctx, i) * zdz(f, i)

    def apply_D_inverse(self, f: LaurentSeries, i: int) -> LaurentSeries:
        """D_i^{-1} f = (z_i d/dz_i)^{-1} (Q_i f); Q_i f must have no z_i^0 slice."""
        return zdz_inverse(self.at("Q", f.ctx, i) * f, i)


def x_series(spec: ModelSpec, order: int) -> LaurentSeries:
    """X(z) = z e^{-psi(y(z))} on its own, in a bare one-variable context."""
    ctx = SeriesContext(1, order, z_names=("z",))
    y = ctx.from_dict({(k,): s for k, s in enumerate(spec.y_list) if k and s})
    psi = ctx.from_dict({(k,): c for k, c in enumerate(spec.psi_list) if k and c})
    psi_y = substitute(psi, "z", y) if psi and y else ctx.zero()
    return ctx.var("z") * exp_series(-psi_y)


def phi_m(spec: ModelSpec, m: int, order: int, hbar_cap: int) -> LaurentSeries:
    """phi_m(y, hbar) as a series in (y, hbar); phi_0 = 1, phi_{-m} = 1/phi_m."""
    ctx = SeriesContext(1, order, hbar=(0, hbar_cap), z_names=("y",))
    if m == 0:
        return ctx.one()
    mm = abs(m)
    y = ctx.var("y")
    hb = ctx.var("hbar")
    expo = ctx.zero()
    for i in range(1, mm + 1):
        arg = y + hb.scale(Fraction(2 * i - mm - 1, 2))
        for k, c in enumerate(spec.psi_coeffs, start=1):
            if c:
                expo = expo + (arg ** k).scale(c)
    phi = exp_series(expo)
    return phi if m > 0 else invert_unit(phi)


def gamma(ctx: SeriesContext, i: int, j: int, k: int = 0) -> LaurentSeries:
    """Sector expansions of gamma^{[k]}_{i,j} = (z_i d/dz_i)^k z_i z_j/(z_i - z_j)^2.

    k = -1 gives gamma^{[-1]}_{i,j} = z_i/(z_j - z_i).
    """
    if i == j:
        raise ValueError("gamma needs i != j")
    if k < -1:
        raise ValueError("k must be >= -1")
    small, large = min(i, j), max(i, j)
    data = {}
    if k == -1:
        if i < j:
            ms = range(1, ctx.order + 1)
            sign = 1
        else:
            ms = range(0, ctx.order + 1)
            sign = -1
        for m in ms:
            z = [0] * ctx.n
            z[small - 1], z[large - 1] = m, -m
            data[tuple(z)] = sign
        return ctx.from_dict(data)
    for m in range(1, ctx.order + 1):
        z = [0] * ctx.n
        z[small - 1], z[large - 1] = m, -m
        data[tuple(z)] = m
    g = ctx.from_dict(data)
    return zdz_power(g, i, k) if k else g


# ----------------------------------------------------------------------
# identities used as property checks
# ----------------------------------------------------------------------

def _z_slices(f: LaurentSeries) -> dict[int, LaurentSeries]:
    return coeffs_by(f, "z")


def lagrange_burmann_sides(cache: ModelCache, H: LaurentSeries) -> tuple[LaurentSeries, LaurentSeries]:
    """(sum_m X^m [z^m] e^{m psi(y)} H, H/Q) for a power series H in the vertex context."""
    ctx = cache.vctx
    psi = cache.psi_deriv(0)
    lhs = ctx.zero()
    Xm = ctx.one()
    for m in range(0, ctx.order + 1):
        if m:
            Xm = Xm * cache.X
        slice_m = coeff(exp_series(psi.scale(m)) * H, "z", m)
        if slice_m:
            lhs = lhs + Xm * embed(slice_m, ctx)
    return lhs, H * cache.invQ


def principal_identity_sides(cache: ModelCache, H: LaurentSeries) -> tuple[LaurentSeries, LaurentSeries]:
    """Both sides of the principal identity for a power series H(u, z) (no v).

    left:  sum_{m, r} d_y^r phi_m(0) X^m [z^m u^r] e^{u y(z)} H
    right: sum_{j, r} D^j ([v^j] L_r / Q [u^r] H)
    """
    ctx = cache.vctx
    u = ctx.var("u")
    G = exp_series(u * cache.y) * H
    by_u = coeffs_by(G, "u")
    rmax = max(by_u) if by_u else 0
    lhs = ctx.zero()
    Xm = ctx.one()
    for m in range(0, ctx.order + 1):
        if m:
            Xm = Xm * cache.X
        phi = phi_m(cache.spec, m, rmax, cache.hbar_cap)
        for r, part in by_u.items():
            sl = coeff(part, "z", m)
            if not sl:
                continue
            dphi = coeff(phi, "y", r).scale(factorial(r))
            if dphi:
                lhs = lhs + Xm * embed(dphi, ctx, {"y": "z"}) * embed(sl, ctx)
    rhs = ctx.zero()
    for r, part in coeffs_by(H, "u").items():
        jmax = cache.v_degree(r)
        acc = ctx.zero()
        for j in range(jmax, -1, -1):
            if acc:
                acc = cache.invQ * zdz(acc, "z")
            L = cache.Lj(r, j)
            if L:
                acc = acc + L * cache.invQ * part
        rhs = rhs + acc
    return lhs, rhs


def build_cache(spec: ModelSpec, ctx: SeriesContext) -> ModelCache:
    """A cache matching the z-order and hbar cap of ``ctx``."""
    lo, hi = ctx.hbar_window
    if lo > 0:
        raise WindowError("hbar window must contain hbar^0")
    return ModelCache(spec, ctx.order, hi)


def L_series(cache: ModelCache, r: int, i: int | None = None, ctx: SeriesContext | None = None) -> LaurentSeries:
    """L_r(v, y(z), hbar); re-keyed to vertex ``i`` of ``ctx`` when both are given."""
    L = cache.L(r)
    if i is None:
        return L
    if ctx is None:
        raise ValueError("a target context is needed together with a vertex index")
    return cache.at(L, ctx, i)

"""Brute-force Hurwitz numbers from the Schur expansion of the partition function.

Z = sum_lambda exp(sum_cells psi(hbar * content)) s_lambda(p) s_lambda(p_k = s_k/hbar)

Series in p_1, p_2, ... are stored as ``{(monomial, e): coeff}`` where the
monomial is a weakly increasing tuple of indices (``p_1^2 p_3 -> (1, 1, 3)``)
and ``e`` is the *shifted* hbar exponent, the true exponent plus the p-weight
of the monomial.  Every term of Z has ``e >= 0`` and ``e`` adds under
multiplication, so truncating ``e``, the p-weight and the number of factors
are all exact (ideal) truncations.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .model import ModelSpec, x_series
from .series import LaurentSeries, SeriesContext, embed


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        p = tuple(self.parts)
        if any(a < b for a, b in zip(p, p[1:])) or any(x <= 0 for x in p):
            raise ValueError(f"not a partition: {p}")
        object.__setattr__(self, "parts", p)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > i) for i in range(self.parts[0])))

    def contents(self):
        for i, row in enumerate(self.parts):
            for j in range(row):
                yield j - i


def _partitions_of(m: int, largest: int):
    if m == 0:
        yield ()
        return
    for first in range(min(m, largest), 0, -1):
        for rest in _partitions_of(m - first, first):
            yield (first,) + rest


def partitions_of(m: int) -> list[Partition]:
    return [Partition(p) for p in _partitions_of(m, m)]


def partitions_up_to(W: int) -> list[Partition]:
    """All partitions of weight <= W (the empty one included), by weight."""
    if W < 0:
        raise ValueError("W must be >= 0")
    return [lam for m in range(W + 1) for lam in partitions_of(m)]


# ----------------------------------------------------------------------
# polynomials in p (no hbar): {monomial: coeff}
# ----------------------------------------------------------------------

def _merge(a: tuple, b: tuple) -> tuple:
    return tuple(sorted(a + b))


def _pmul(a: dict, b: dict, nmax: int) -> dict:
    out: dict = defaultdict(Fraction)
    for ma, ca in a.items():
        for mb, cb in b.items():
            if len(ma) + len(mb) <= nmax:
                out[_merge(ma, mb)] += ca * cb
    return {k: c for k, c in out.items() if c}


def _z_mu(mu: tuple) -> int:
    out = 1
    for k in set(mu):
        m = mu.count(k)
        out *= k ** m * factorial(m)
    return out


@lru_cache(maxsize=None)
def h_poly(m: int, nmax: int) -> dict:
    """Complete symmetric function h_m = sum_{mu |- m} p_mu / z_mu (at most nmax factors)."""
    if m < 0:
        return {}
    return {tuple(sorted(mu)): Fraction(1, _z_mu(mu)) for mu in _partitions_of(m, m) if len(mu) <= nmax}


@lru_cache(maxsize=None)
def e_poly(m: int, nmax: int) -> dict:
    """Elementary symmetric function e_m = sum_{mu |- m} sign(mu) p_mu / z_mu."""
    if m < 0:
        return {}
    return {
        tuple(sorted(mu)): Fraction((-1) ** (m - len(mu)), _z_mu(mu))
        for mu in _partitions_of(m, m)
        if len(mu) <= nmax
    }


def _det(rows: list[list[dict]], nmax: int) -> dict:
    """Determinant of a matrix of p-polynomials by Laplace expansion with memo."""
    k = len(rows)
    if k == 0:
        return {(): Fraction(1)}
    memo: dict = {}

    def minor(r: int, cols: frozenset) -> dict:
        # rows r..k-1 against the given set of columns
        if r == k:
            return {(): Fraction(1)}
        key = (r, cols)
        if key in memo:
            return memo[key]
        out: dict = defaultdict(Fraction)
        ordered = sorted(cols)
        for pos, c in enumerate(ordered):
            entry = rows[r][c]
            if not entry:
                continue
            sub = minor(r + 1, cols - {c})
            if not sub:
                continue
            sign = -1 if pos % 2 else 1
            for m, v in _pmul(entry, sub, nmax).items():
                out[m] += sign * v
        res = {m: v for m, v in out.items() if v}
        memo[key] = res
        return res

    return minor(0, frozenset(range(k)))


def schur_in_p(lam: Partition, nmax: int | None = None) -> dict:
    """s_lambda as a polynomial in power sums, via Jacobi-Trudi.

    Uses det(h_{lam_i - i + j}) or the dual det(e_{lam'_i - i + j}), whichever
    matrix is smaller.  Monomials with more than ``nmax`` factors are dropped.
    """
    lam = lam if isinstance(lam, Partition) else Partition(tuple(lam))
    if nmax is None:
        nmax = lam.weight
    conj = lam.conjugate()
    if len(conj) < len(lam):
        parts, gen = conj.parts, e_poly
    else:
        parts, gen = lam.parts, h_poly
    k = len(parts)
    rows = [[gen(parts[i] - i + j, nmax) for j in range(k)] for i in range(k)]
    return _det(rows, nmax)


def schur_at(lam: Partition, values) -> dict[int, Fraction]:
    """s_lambda at p_k = values[k-1] / hbar, as {number of p-factors l: coeff of hbar^-l}."""
    out: dict[int, Fraction] = defaultdict(Fraction)
    for mono, c in schur_in_p(lam).items():
        t = c
        for k in mono:
            t *= values[k - 1] if k <= len(values) else 0
            if not t:
                break
        if t:
            out[len(mono)] += t
    return {k: v for k, v in out.items() if v}


def content_product(lam: Partition, spec: ModelSpec, hbar_cap: int) -> list[Fraction]:
    """exp(sum_cells psi(hbar * content)) as a coefficient list in hbar, up to hbar_cap."""
    expo = [Fraction(0)] * (hbar_cap + 1)
    contents = list(lam.contents())
    for k, ck in enumerate(spec.psi_coeffs, start=1):
        if k > hbar_cap or not ck:
            continue
        expo[k] += ck * sum(c ** k for c in contents)
    # exp of a series with zero constant term: E' = expo' E
    out = [Fraction(0)] * (hbar_cap + 1)
    out[0] = Fraction(1)
    for m in range(1, hbar_cap + 1):
        s = sum(k * expo[k] * out[m - k] for k in range(1, m + 1))
        out[m] = s / m
    return out


# ----------------------------------------------------------------------
# series in p with hbar
# ----------------------------------------------------------------------

class PSeries:
    """Truncated series in p_1.. with Laurent-hbar coefficients (see module docstring)."""

    __slots__ = ("terms", "W", "nmax", "ecap")

    def __init__(self, terms: dict, W: int, nmax: int, ecap: int):
        self.terms = terms
        self.W, self.nmax, self.ecap = W, nmax, ecap

    def _like(self, terms):
        return PSeries(terms, self.W, self.nmax, self.ecap)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._like(out)

    def __mul__(self, other):
        if not isinstance(other, PSeries):
            other = Fraction(other)
            return self._like({k: c * other for k, c in self.terms.items()} if other else {})
        out: dict = defaultdict(Fraction)
        W, nmax, ecap = self.W, self.nmax, self.ecap
        for (ma, ea), ca in self.terms.items():
            wa = sum(ma)
            for (mb, eb), cb in other.terms.items():
                if len(ma) + len(mb) > nmax or wa + sum(mb) > W or ea + eb > ecap:
                    continue
                out[(_merge(ma, mb), ea + eb)] += ca * cb
        return self._like({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def constant(self) -> Fraction:
        return self.terms.get(((), 0), Fraction(0))

    def hbar_coefficients(self, mono: tuple) -> dict[int, Fraction]:
        """{true hbar exponent: coeff} of the given p-monomial."""
        mono = tuple(sorted(mono))
        w = sum(mono)
        return {e - w: c for (m, e), c in self.terms.items() if m == mono}

    def __len__(self):
        return len(self.terms)


def partition_function(spec: ModelSpec, W: int, nmax: int | None = None, emax: int | None = None) -> PSeries:
    """Z truncated to p-weight <= W, at most ``nmax`` p-factors, hbar^(emax) in F_{g,n}.

    ``emax`` bounds the true hbar exponent 2g - 2 + n of the wanted numbers;
    the default keeps everything up to genus 2.
    """
    nmax = W if nmax is None else nmax
    emax = 2 * 2 - 2 + nmax if emax is None else emax
    ecap = emax + W
    s_vals = list(spec.y_coeffs)
    terms: dict = defaultdict(Fraction)
    for lam in partitions_up_to(W):
        sv = schur_at(lam, s_vals)
        if not sv:
            continue
        cp = content_product(lam, spec, ecap)
        sp = schur_in_p(lam, nmax)
        for ell, cs in sv.items():
            # true hbar exponent e - ell, p-weight |lam|: shifted exponent e + |lam| - ell
            shift = lam.weight - ell
            for e, ce in enumerate(cp):
                if ce and e + shift <= ecap:
                    for mono, c in sp.items():
                        terms[(mono, e + shift)] += c * ce * cs
    return PSeries({k: c for k, c in terms.items() if c}, W, nmax, ecap)


def connected_F(Z: PSeries) -> PSeries:
    """F = log Z."""
    if Z.constant() != 1:
        raise ValueError("Z must have constant term 1")
    A = Z + Z._like({((), 0): Fraction(-1)})
    out = Z._like({})
    power = Z._like({((), 0): Fraction(1)})
    for k in range(1, Z.W + 1):
        power = power * A
        if not power.terms:
            break
        out = out + power * Fraction((-1) ** (k + 1), k)
    return out


def exp_P(F: PSeries) -> PSeries:
    """exp of a series with zero constant term."""
    out = F._like({((), 0): Fraction(1)})
    power = out
    for k in range(1, F.W + 1):
        power = power * F * Fraction(1, k)
        if not power.terms:
            break
        out = out + power
    return out


def _multiplicity_factor(mu) -> int:
    out = 1
    for k in set(mu):
        out *= factorial(list(mu).count(k))
    return out


def derivative_at_zero(P: PSeries, mu) -> dict[int, Fraction]:
    """d^n P / dp_{mu_1}..dp_{mu_n} at p = 0, as {hbar exponent: coeff}."""
    f = _multiplicity_factor(mu)
    return {e: c * f for e, c in P.hbar_coefficients(tuple(mu)).items()}


def hurwitz_number(g: int, mu, F: PSeries) -> Fraction:
    """h_{g,mu} = [hbar^{2g-2+n}] d^n F/dp_mu at p = 0 (repeated indices differentiate repeatedly)."""
    mu = tuple(mu)
    n = len(mu)
    if not mu or min(mu) < 1:
        raise ValueError("mu must be a nonempty composition")
    if sum(mu) > F.W or n > F.nmax or 2 * g - 2 + n + sum(mu) > F.ecap:
        raise ValueError("insufficient truncation for requested Hurwitz number")
    return derivative_at_zero(F, mu).get(2 * g - 2 + n, Fraction(0))


def compositions(n: int, max_total: int):
    """Tuples (m_1..m_n), m_i >= 1, sum <= max_total, in graded lexicographic order."""
    def rec(k, budget):
        if k == 0:
            yield ()
            return
        for m in range(1, budget - (k - 1) + 1):
            for rest in rec(k - 1, budget - m):
                yield (m,) + rest
    out = list(rec(n, max_total))
    out.sort(key=lambda t: (sum(t), t))
    return out


def oracle_npoint(g: int, n: int, F: PSeries, spec: ModelSpec, order: int) -> LaurentSeries:
    """sum_m h_{g,m} prod X(z_i)^{m_i} as a power series in z up to total degree ``order``."""
    if order > F.W or n > F.nmax or 2 * g - 2 + n + order > F.ecap:
        raise ValueError("insufficient truncation for oracle_npoint")
    ctx = SeriesContext(n, order)
    X = x_series(spec, order)
    powers = [X.ctx.one()]
    for _ in range(order):
        powers.append(powers[-1] * X)
    at = {}

    def xp(i, m):
        if (i, m) not in at:
            at[(i, m)] = embed(powers[m], ctx, {"z": ctx.z_names[i - 1]})
        return at[(i, m)]

    total = ctx.zero()
    for ms in compositions(n, order):
        h = hurwitz_number(g, ms, F)
        if not h:
            continue
        t = xp(1, ms[0])
        for i, m in enumerate(ms[1:], start=2):
            t = t * xp(i, m)
        total = total + t.scale(h)
    return total


def model_F(spec: ModelSpec, W: int, nmax: int, gmax: int) -> PSeries:
    """F truncated just enough for genus <= gmax, n <= nmax, |mu| <= W."""
    return connected_F(partition_function(spec, W, nmax, 2 * gmax - 2 + nmax))


# ----------------------------------------------------------------------
# inclusion-exclusion
# ----------------------------------------------------------------------

def set_partitions(items: tuple):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1:]
        yield [(first,)] + part


def _hmul(a: dict, b: dict) -> dict:
    out: dict = defaultdict(Fraction)
    for ea, ca in a.items():
        for eb, cb in b.items():
            out[ea + eb] += ca * cb
    return {e: c for e, c in out.items() if c}


def connected_by_inclusion_exclusion(Z: PSeries, mu) -> dict[int, Fraction]:
    """d_mu F from the disconnected derivatives d_mu Z by the Moebius sum over set partitions.

    Exact for hbar exponents <= Z.ecap - |mu|; higher ones are dropped.
    """
    idx = tuple(range(len(mu)))
    total: dict = defaultdict(Fraction)
    for blocks in set_partitions(idx):
        k = len(blocks)
        term = {0: Fraction((-1) ** (k - 1) * factorial(k - 1))}
        for b in blocks:
            term = _hmul(term, derivative_at_zero(Z, tuple(mu[i] for i in b)))
        for e, c in term.items():
            total[e] += c
    top = Z.ecap - sum(mu)
    return {e: c for e, c in total.items() if c and e <= top}


__all__ = [
    "Partition", "PSeries", "partitions_of", "partitions_up_to", "schur_in_p", "schur_at",
    "content_product", "partition_function", "connected_F", "exp_P", "hurwitz_number",
    "oracle_npoint", "model_F", "compositions", "connected_by_inclusion_exclusion",
    "derivative_at_zero", "h_poly", "e_poly", "set_partitions",
]


PSeriesCell = PSeries

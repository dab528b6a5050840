"""Exact truncated multivariate Laurent series in the sector |z_1| << ... << |z_n|.

Every series lives in a :class:`SeriesContext` which fixes the variables and the
truncation.  There are three kinds of variables:

* ``z`` variables ``z_1..z_n`` (sector ordered).  A monomial ``z^a`` is stored by
  its *prefix sums* ``e_k = a_1 + ... + a_k``.  Sector expansions of
  ``z_i/(z_j - z_i)``, ``z_i z_j/(z_i - z_j)^2`` and all power series in the
  ``z_i`` have nonnegative prefix sums, so the window ``-M <= e_k <= N`` is an
  ideal truncation: products and the Euler operators are exact on every stored
  coefficient as long as both operands have nonnegative prefix sums.  With
  negative prefix sums (poles of order ``p``) a product is exact for ``e_k <= N - p``.
* ``hbar``, a Laurent variable with window ``[lo, hi]``.
* auxiliary polynomial variables (``u_i``, ``v``, ...) with degree caps.

Terms above a window are dropped silently; a product falling below a lower
bound raises :class:`WindowError`, since that signals an undersized budget.

Keys are packed into Python integers (16 bits per field) so that monomial
multiplication is one integer addition and the window test is two masks.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

Rational = Fraction

_BITS = 16
_MASK = (1 << _BITS) - 1
_OFF = 1 << 13
_GUARD_BIT = 1 << (_BITS - 1)
_UNCAPPED = 4096


class WindowError(ArithmeticError):
    """A term fell below a lower window bound (budget too small)."""


class ContextMismatch(ValueError):
    pass


def rational(x) -> Fraction:
    """Parse ``x`` (int, Fraction or a ``"p/q"`` string) into an exact rational.

    Floats are rejected: they cannot be represented exactly.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            p, q = s.split("/", 1)
            p, q = int(p), int(q)
            if q == 0:
                raise ZeroDivisionError(f"zero denominator in {x!r}")
            return Fraction(p, q)
        return Fraction(int(s))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class SeriesContext:
    """Variables and windows of a family of series.

    ``n`` z-variables with prefix-sum window ``[-neg_budget, order]``; ``hbar``
    window; auxiliary variables ``aux`` with optional degree caps.
    """

    def __init__(
        self,
        n: int,
        order: int,
        hbar: tuple[int, int] = (0, 0),
        aux: Sequence[str] = (),
        aux_caps: Mapping[str, int] | None = None,
        neg_budget: int = 0,
        z_names: Sequence[str] | None = None,
    ):
        if n < 0:
            raise ValueError("n must be nonnegative")
        if order < 0 or neg_budget < 0:
            raise ValueError("order and neg_budget must be nonnegative")
        if hbar[0] > hbar[1]:
            raise ValueError("empty hbar window")
        if max(order, hbar[1]) >= 12000 or min(-neg_budget, hbar[0]) < -4000:
            raise ValueError("window too large for packed keys")
        self.n = n
        self.order = order
        self.neg_budget = neg_budget
        self.hbar_window = (int(hbar[0]), int(hbar[1]))
        self.z_names = tuple(z_names) if z_names is not None else tuple(f"z{i}" for i in range(1, n + 1))
        if len(self.z_names) != n:
            raise ValueError("z_names must have length n")
        self.aux = tuple(aux)
        caps = dict(aux_caps or {})
        self.aux_caps = tuple(caps.get(a, _UNCAPPED) for a in self.aux)
        names = self.z_names + ("hbar",) + self.aux
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.names = names
        self.index = {name: k for k, name in enumerate(names)}
        self.nfields = len(names)
        lows = [-neg_budget] * n + [self.hbar_window[0]] + [0] * len(self.aux)
        highs = [order] * n + [self.hbar_window[1]] + list(self.aux_caps)
        self.lows = tuple(lows)
        self.highs = tuple(highs)
        self.zero_key = sum(_OFF << (_BITS * f) for f in range(self.nfields))
        self._add = sum((_GUARD_BIT - 1 - (h + _OFF)) << (_BITS * f) for f, h in enumerate(highs))
        self._guard = sum(_GUARD_BIT << (_BITS * f) for f in range(self.nfields))
        self._low = sum((lo + _OFF) << (_BITS * f) for f, lo in enumerate(lows))
        self.checks_low = any(lo < 0 for lo in lows)
        self._sig = (self.names, self.lows, self.highs)

    def __eq__(self, other):
        return isinstance(other, SeriesContext) and self._sig == other._sig

    def __hash__(self):
        return hash(self._sig)

    def __repr__(self):
        return (f"SeriesContext(n={self.n}, order={self.order}, hbar={self.hbar_window}, "
                f"aux={self.aux}, neg_budget={self.neg_budget})")

    # -- key codec -----------------------------------------------------
    def fields(self, key: int) -> list[int]:
        return [((key >> (_BITS * f)) & _MASK) - _OFF for f in range(self.nfields)]

    def field(self, key: int, f: int) -> int:
        return ((key >> (_BITS * f)) & _MASK) - _OFF

    def pack(self, fields: Sequence[int]) -> int:
        key = 0
        for f, v in enumerate(fields):
            key |= (v + _OFF) << (_BITS * f)
        return key

    def above(self, key: int) -> bool:
        return bool((key + self._add) & self._guard)

    def below(self, key: int) -> bool:
        return ((key | self._guard) - self._low) & self._guard != self._guard

    def admit(self, key: int) -> bool:
        if self.above(key):
            return False
        if self.checks_low and self.below(key):
            raise WindowError(f"term {self.describe(key)} below the window of {self!r}")
        return True

    def key_from(self, z: Sequence[int] = (), hbar: int = 0, **aux: int) -> int:
        """Key of ``z^a hbar^h prod aux^k`` with z given as plain exponents."""
        if len(z) not in (0, self.n):
            raise ValueError(f"expected {self.n} z-exponents")
        fields = [0] * self.nfields
        acc = 0
        for k, a in enumerate(z):
            acc += a
            fields[k] = acc
        fields[self.n] = hbar
        for name, e in aux.items():
            if name not in self.index or self.index[name] <= self.n:
                raise KeyError(f"unknown auxiliary variable {name!r}")
            fields[self.index[name]] = e
        return self.pack(fields)

    def exponents(self, key: int) -> tuple[tuple[int, ...], int, tuple[int, ...]]:
        """Unpack a key into (z-exponents, hbar exponent, aux exponents)."""
        fl = self.fields(key)
        z = tuple(fl[k] - (fl[k - 1] if k else 0) for k in range(self.n))
        return z, fl[self.n], tuple(fl[self.n + 1:])

    def describe(self, key: int) -> str:
        z, h, a = self.exponents(key)
        parts = [f"{nm}^{e}" for nm, e in zip(self.z_names, z) if e]
        if h:
            parts.append(f"hbar^{h}")
        parts += [f"{nm}^{e}" for nm, e in zip(self.aux, a) if e]
        return "*".join(parts) or "1"

    # -- constructors --------------------------------------------------
    def zero(self) -> "LaurentSeries":
        return LaurentSeries(self, {})

    def one(self) -> "LaurentSeries":
        return self.const(1)

    def const(self, c) -> "LaurentSeries":
        c = rational(c)
        return LaurentSeries(self, {self.zero_key: c} if c else {})

    def monomial(self, coeff=1, z: Sequence[int] = (), hbar: int = 0, **aux: int) -> "LaurentSeries":
        key = self.key_from(z, hbar, **aux)
        c = rational(coeff)
        if not c or self.above(key):
            return self.zero()
        if self.below(key):
            raise WindowError(f"monomial {self.describe(key)} below window")
        return LaurentSeries(self, {key: c})

    def var(self, name: str) -> "LaurentSeries":
        f = self._field_of(name)
        fields = [0] * self.nfields
        if f < self.n:
            for k in range(f, self.n):
                fields[k] = 1
        else:
            fields[f] = 1
        key = self.pack(fields)
        return LaurentSeries(self, {} if self.above(key) else {key: Fraction(1)})

    def from_dict(self, data: Mapping[tuple, object]) -> "LaurentSeries":
        """Build from ``{(z-exps tuple, hbar, ((aux, e), ...)) : coeff}`` or plain z tuples."""
        out: dict[int, Fraction] = {}
        for spec, c in data.items():
            if isinstance(spec, tuple) and spec and isinstance(spec[0], tuple):
                z, h = spec[0], spec[1]
                aux = dict(spec[2]) if len(spec) > 2 else {}
                key = self.key_from(z, h, **aux)
            else:
                key = self.key_from(spec)
            if self.above(key):
                continue
            if self.below(key):
                raise WindowError(f"monomial {self.describe(key)} below window")
            c = rational(c)
            if c:
                out[key] = out.get(key, 0) + c
        return LaurentSeries(self, {k: v for k, v in out.items() if v})

    def _field_of(self, var) -> int:
        if isinstance(var, int):
            if not 1 <= var <= self.n:
                raise IndexError(f"z index {var} out of range 1..{self.n}")
            return var - 1
        try:
            return self.index[var]
        except KeyError:
            raise KeyError(f"unknown variable {var!r} in {self!r}") from None


class LaurentSeries:
    """Immutable sparse series; ``terms`` maps packed keys to nonzero rationals."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: SeriesContext, terms: dict[int, Fraction]):
        self.ctx = ctx
        self.terms = terms

    # -- basic protocol ------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda kv: self._sort_key(kv[0]))
        shown = [f"{c}*{self.ctx.describe(k)}" for k, c in items[:12]]
        more = " + ..." if len(items) > 12 else ""
        return " + ".join(shown) + more

    def _sort_key(self, key):
        z, h, a = self.ctx.exponents(key)
        return (sum(z), z, h, a)

    def _check(self, other: "LaurentSeries"):
        if self.ctx is not other.ctx and self.ctx != other.ctx:
            raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")

    def __eq__(self, other):
        if isinstance(other, LaurentSeries):
            self._check(other)
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == self.ctx.const(other).terms
        return NotImplemented

    __hash__ = None

    def items(self) -> Iterable[tuple[tuple[tuple[int, ...], int, tuple[int, ...]], Fraction]]:
        """Yield ``((z, hbar, aux), coeff)`` in deterministic graded order."""
        for key in sorted(self.terms, key=self._sort_key):
            yield self.ctx.exponents(key), self.terms[key]

    def to_dict(self) -> dict:
        return dict(self.items())

    def coefficient(self, z: Sequence[int] = (), hbar: int = 0, **aux: int) -> Fraction:
        return self.terms.get(self.ctx.key_from(z, hbar, **aux), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get(self.ctx.zero_key, Fraction(0))

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ctx.const(other)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            if s is None:
                out[k] = c
            else:
                s += c
                if s:
                    out[k] = s
                else:
                    del out[k]
        return LaurentSeries(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.ctx, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ctx.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LaurentSeries":
        c = rational(c)
        if not c:
            return self.ctx.zero()
        return LaurentSeries(self.ctx, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        self._check(other)
        return LaurentSeries(self.ctx, _mul_terms(self.ctx, self.terms, other.terms))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / rational(other))
        if isinstance(other, LaurentSeries):
            return self * invert_unit(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- termwise maps -------------------------------------------------
    def map_terms(self, fn: Callable[[int, Fraction], Fraction]) -> "LaurentSeries":
        out = {}
        for k, c in self.terms.items():
            v = fn(k, c)
            if v:
                out[k] = v
        return LaurentSeries(self.ctx, out)

    def truncate(self, hbar_max: int | None = None) -> "LaurentSeries":
        """Drop terms with hbar exponent above ``hbar_max``."""
        if hbar_max is None:
            return self
        ctx = self.ctx
        f = ctx.n
        return LaurentSeries(ctx, {k: c for k, c in self.terms.items() if ctx.field(k, f) <= hbar_max})

    def max_degree(self, var) -> int:
        """Largest exponent of ``var`` present (-1 for the zero series)."""
        if not self.terms:
            return -1
        return max(exponent(self.ctx, k, var) for k in self.terms)

    def min_degree(self, var) -> int:
        if not self.terms:
            return 0
        return min(exponent(self.ctx, k, var) for k in self.terms)


def _mul_terms(ctx: SeriesContext, a: dict, b: dict) -> dict:
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    out: dict[int, Fraction] = {}
    z0 = ctx.zero_key
    add = ctx._add
    guard = ctx._guard
    get = out.get
    check_low = ctx.checks_low
    bitems = list(b.items())
    for ka, ca in a.items():
        base = ka - z0
        for kb, cb in bitems:
            k = base + kb
            if (k + add) & guard:
                continue
            if check_low and ctx.below(k):
                raise WindowError(f"product term {ctx.describe(k)} below window; raise neg_budget")
            v = get(k)
            out[k] = ca * cb if v is None else v + ca * cb
    return {k: v for k, v in out.items() if v}


def exponent(ctx: SeriesContext, key: int, var) -> int:
    """Exponent of ``var`` (z index / name, ``"hbar"`` or aux name) in ``key``."""
    f = ctx._field_of(var)
    if f < ctx.n:
        return ctx.field(key, f) - (ctx.field(key, f - 1) if f else 0)
    return ctx.field(key, f)


def _with_exponent(ctx: SeriesContext, key: int, f: int, new: int) -> int:
    """Key with the exponent in field ``f`` replaced by ``new``."""
    fields = ctx.fields(key)
    if f < ctx.n:
        old = fields[f] - (fields[f - 1] if f else 0)
        for k in range(f, ctx.n):
            fields[k] += new - old
    else:
        fields[f] = new
    return ctx.pack(fields)


# ----------------------------------------------------------------------
# analytic operations
# ----------------------------------------------------------------------

def _power_sum(f: LaurentSeries, coeffs: Callable[[int], Fraction], start: LaurentSeries,
               max_terms: int = 100000) -> LaurentSeries:
    """``start + sum_{k>=1} coeffs(k) f^k`` until ``f^k`` truncates to zero."""
    result = start
    power = f.ctx.one()
    for k in range(1, max_terms):
        power = power * f
        if not power:
            return result
        result = result + power.scale(coeffs(k))
    raise ArithmeticError("series argument is not nilpotent under the context windows")


def ring_add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    if not isinstance(a, LaurentSeries) or not isinstance(b, LaurentSeries):
        raise TypeError("ring_add expects two LaurentSeries")
    return a + b


def ring_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    if not isinstance(a, LaurentSeries) or not isinstance(b, LaurentSeries):
        raise TypeError("ring_mul expects two LaurentSeries")
    return a * b


def exp_series(f: LaurentSeries) -> LaurentSeries:
    """exp(f) for ``f`` with zero constant term."""
    if f.constant_term():
        raise ValueError("exp_series needs a zero constant term")
    return _power_sum(f, lambda k: Fraction(1, factorial(k)), f.ctx.one())


def log_series(f: LaurentSeries) -> LaurentSeries:
    """log(f) for ``f`` with constant term 1."""
    if f.constant_term() != 1:
        raise ValueError("log_series needs constant term 1")
    g = f - 1
    return _power_sum(g, lambda k: Fraction((-1) ** (k + 1), k), f.ctx.zero())


def invert_unit(f: LaurentSeries) -> LaurentSeries:
    """Multiplicative inverse of a series with nonzero rational constant term."""
    c = f.constant_term()
    if not c:
        raise ZeroDivisionError("invert_unit needs a nonzero constant term")
    h = f.scale(1 / c) - 1
    return _power_sum(-h, lambda k: Fraction(1), f.ctx.one()).scale(1 / c)


def zdz(f: LaurentSeries, i) -> LaurentSeries:
    """Euler operator ``z_i d/dz_i``: multiply every term by its z_i exponent."""
    ctx = f.ctx
    fi = ctx._field_of(i)
    if fi >= ctx.n:
        raise ValueError("zdz acts on z variables only")
    out = {}
    for k, c in f.terms.items():
        a = ctx.field(k, fi) - (ctx.field(k, fi - 1) if fi else 0)
        if a:
            out[k] = c * a
    return LaurentSeries(ctx, out)


def zdz_power(f: LaurentSeries, i, power: int) -> LaurentSeries:
    ctx = f.ctx
    fi = ctx._field_of(i)
    out = {}
    for k, c in f.terms.items():
        a = ctx.field(k, fi) - (ctx.field(k, fi - 1) if fi else 0)
        if a or power == 0:
            out[k] = c * a ** power
    return LaurentSeries(ctx, out)


def zdz_inverse(f: LaurentSeries, i) -> LaurentSeries:
    """Inverse Euler operator; the z_i^0 slice of ``f`` must vanish."""
    ctx = f.ctx
    fi = ctx._field_of(i)
    if fi >= ctx.n:
        raise ValueError("zdz_inverse acts on z variables only")
    out = {}
    for k, c in f.terms.items():
        a = ctx.field(k, fi) - (ctx.field(k, fi - 1) if fi else 0)
        if a == 0:
            raise ValueError(f"nonzero residue: term {ctx.describe(k)} has zero {ctx.names[fi]}-exponent")
        out[k] = c / a
    return LaurentSeries(ctx, out)


def coeff(f: LaurentSeries, var, k: int) -> LaurentSeries:
    """Coefficient of ``var^k`` as a series in the remaining variables."""
    ctx = f.ctx
    fi = ctx._field_of(var)
    out = {}
    for key, c in f.terms.items():
        if exponent(ctx, key, var) == k:
            out[_with_exponent(ctx, key, fi, 0)] = c
    return LaurentSeries(ctx, out)


def coeffs_by(f: LaurentSeries, var) -> dict[int, LaurentSeries]:
    """Split ``f`` into ``{k: [var^k] f}`` in one pass."""
    ctx = f.ctx
    fi = ctx._field_of(var)
    buckets: dict[int, dict[int, Fraction]] = {}
    for key, c in f.terms.items():
        e = exponent(ctx, key, var)
        buckets.setdefault(e, {})[_with_exponent(ctx, key, fi, 0)] = c
    return {e: LaurentSeries(ctx, t) for e, t in buckets.items()}


def embed(f: LaurentSeries, target: SeriesContext, rename: Mapping[str, str] | None = None) -> LaurentSeries:
    """Re-key ``f`` into ``target``, mapping variables by name (after ``rename``).

    Variables of ``f`` absent from ``target`` must not occur in ``f``.
    """
    src = f.ctx
    rename = dict(rename or {})
    mapping = []
    for name in src.names:
        tname = rename.get(name, name)
        mapping.append(target.index.get(tname))
    out: dict[int, Fraction] = {}
    for key, c in f.terms.items():
        z, h, a = src.exponents(key)
        exps = list(z) + [h] + list(a)
        tz = [0] * target.n
        tf = [0] * target.nfields
        for e, t in zip(exps, mapping):
            if not e:
                continue
            if t is None:
                raise ContextMismatch("variable missing in target context")
            if t < target.n:
                tz[t] += e
            else:
                tf[t] += e
        acc = 0
        for k in range(target.n):
            acc += tz[k]
            tf[k] = acc
        tk = target.pack(tf)
        if target.admit(tk):
            out[tk] = out.get(tk, 0) + c
    return LaurentSeries(target, {k: v for k, v in out.items() if v})


def substitute(f: LaurentSeries, var, g: LaurentSeries, rename: Mapping[str, str] | None = None) -> LaurentSeries:
    """Replace ``var`` in ``f`` by ``g``; the result lives in ``g.ctx``.

    ``g`` must have zero constant term and no negative z-powers; ``f`` must be
    a polynomial in ``var`` (truncation makes every stored series one).
    The other variables of ``f`` are mapped into ``g.ctx`` by name.
    """
    if g.constant_term():
        raise ValueError("substitute needs g with zero constant term")
    for key in g.terms:
        if any(e < 0 for e in g.ctx.exponents(key)[0]):
            raise ValueError("substitute needs g without negative powers")
    parts = coeffs_by(f, var)
    if parts and min(parts) < 0:
        raise ValueError(f"negative powers of {var} in f")
    varname = f.ctx.names[f.ctx._field_of(var)]
    rename = {k: v for k, v in (rename or {}).items() if k != varname}
    result = g.ctx.zero()
    power = g.ctx.one()
    for k in range(max(parts, default=-1) + 1):
        if k:
            power = power * g
            if not power:
                break
        if k in parts:
            result = result + embed(parts[k], g.ctx, rename) * power
    return result


def divided_difference(f: LaurentSeries, target: SeriesContext, a, b) -> LaurentSeries:
    """``(f(z_b) - f(z_a)) / (z_b - z_a)`` as a power series in ``target``.

    ``f`` is a power series in its single z-variable.
    """
    src = f.ctx
    if src.n != 1:
        raise ValueError("divided_difference expects a one-variable series")
    fa, fb = target._field_of(a), target._field_of(b)
    out: dict[int, Fraction] = {}
    for key, c in f.terms.items():
        (m,), h, aux = src.exponents(key)
        if m < 0:
            raise ValueError("divided_difference needs a power series")
        auxd = dict(zip(src.aux, aux))
        for p in range(m):
            z = [0] * target.n
            z[fa] += p
            z[fb] += m - 1 - p
            k = target.key_from(z, h, **{n_: e for n_, e in auxd.items() if e})
            if target.admit(k):
                out[k] = out.get(k, 0) + c
    return LaurentSeries(target, {k: v for k, v in out.items() if v})


def diagonal_expand(ctx: SeriesContext, i: int, j: int, p: int = 1) -> LaurentSeries:
    """Sector expansion of ``1/(z_i - z_j)^p`` for p in {1, 2}.

    The smaller-index variable is the small one.  Needs ``neg_budget >= p``.
    """
    if i == j:
        raise ValueError("diagonal_expand needs i != j")
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    small, large = min(i, j), max(i, j)
    sign = -1 if i < j else 1  # 1/(z_i - z_j) = sign / (z_large - ... )
    out = {}
    m = 0
    while m <= ctx.order:
        z = [0] * ctx.n
        z[small - 1] = m
        z[large - 1] = -m - p
        c = Fraction(sign ** p * (m + 1 if p == 2 else 1))
        key = ctx.key_from(z)
        if not ctx.above(key):
            if ctx.below(key):
                raise WindowError("neg_budget too small for diagonal_expand")
            out[key] = c
        m += 1
    return LaurentSeries(ctx, out)


def derivative(f: LaurentSeries, i) -> LaurentSeries:
    """Ordinary derivative ``d/dz_i``."""
    ctx = f.ctx
    fi = ctx._field_of(i)
    if fi >= ctx.n:
        raise ValueError("derivative acts on z variables only")
    out = {}
    for k, c in f.terms.items():
        a = ctx.field(k, fi) - (ctx.field(k, fi - 1) if fi else 0)
        if a:
            nk = _with_exponent(ctx, k, fi, a - 1)
            if ctx.admit(nk):
                out[nk] = c * a
    return LaurentSeries(ctx, out)


def shift_key(ctx: SeriesContext, **deltas: int) -> int:
    """Packed additive delta for aux/hbar exponents (no z)."""
    d = 0
    for name, e in deltas.items():
        f = ctx._field_of(name)
        if f < ctx.n:
            raise ValueError("shift_key is for hbar/aux variables")
        d += e << (_BITS * f)
    return d


def permute_z(f: LaurentSeries, perm: Sequence[int]) -> LaurentSeries:
    """f(z_{perm[0]}, .., z_{perm[n-1]}) for a power series f (perm is 1-based).

    Only power series can be permuted: a Laurent part would have to be
    re-expanded in the new sector.
    """
    ctx = f.ctx
    if sorted(perm) != list(range(1, ctx.n + 1)):
        raise ValueError(f"not a permutation of 1..{ctx.n}: {perm}")
    out = {}
    for key, c in f.terms.items():
        z, h, aux = ctx.exponents(key)
        if min(z, default=0) < 0:
            raise ValueError("permute_z needs a power series")
        new = [0] * ctx.n
        for pos, src in enumerate(perm):
            new[src - 1] = z[pos]
        nk = ctx.key_from(new, h, **dict(zip(ctx.aux, aux)))
        if not ctx.above(nk):
            out[nk] = c
    return LaurentSeries(ctx, out)


def at_zero(f: LaurentSeries, i: int) -> LaurentSeries:
    """f with z_i = 0 (terms free of z_i); f must have no negative z_i powers."""
    ctx = f.ctx
    out = {}
    for key, c in f.terms.items():
        a = ctx.exponents(key)[0][i - 1]
        if a < 0:
            raise ValueError(f"negative power of z_{i}; cannot set it to zero")
        if a == 0:
            out[key] = c
    return LaurentSeries(ctx, out)

"""Named families of psi and y, expanded to exact rational coefficient lists."""
from __future__ import annotations

from fractions import Fraction

from .model import ModelSpec
from .series import rational


def _log_one_plus(poly: list[Fraction], K: int) -> list[Fraction]:
    """Coefficients c_1..c_K of log(1 + a_1 y + a_2 y^2 + ...) given poly = [a_1, a_2, ...]."""
    a = [Fraction(1)] + [rational(c) for c in poly] + [Fraction(0)] * K
    # f' = (log f)' f  ->  k l_k = k a_k - sum_{j<k} j l_j a_{k-j}
    out = [Fraction(0)] * (K + 1)
    for k in range(1, K + 1):
        s = k * a[k] - sum(j * out[j] * a[k - j] for j in range(1, k))
        out[k] = s / k
    return out[1:]


def psi_usual() -> list[Fraction]:
    return [Fraction(1)]


def psi_atlantes(r: int) -> list[Fraction]:
    if r < 1:
        raise ValueError("atlantes needs r >= 1")
    return [Fraction(0)] * (r - 1) + [Fraction(1)]


def psi_monotone(K: int) -> list[Fraction]:
    """-log(1 - y)."""
    return [Fraction(1, k) for k in range(1, K + 1)]


def psi_strictly_monotone(K: int) -> list[Fraction]:
    """log(1 + y)."""
    return _log_one_plus([1], K)


def psi_hypermaps(u, v, K: int) -> list[Fraction]:
    """log((1 + u y)(1 + v y))."""
    u, v = rational(u), rational(v)
    return _log_one_plus([u + v, u * v], K)


def psi_bms(m, K: int) -> list[Fraction]:
    """m log(1 + y)."""
    m = rational(m)
    return [m * c for c in _log_one_plus([1], K)]


def psi_polynomial_weighted(coeffs, K: int) -> list[Fraction]:
    """log(1 + sum_k c_k y^k) for e^psi a polynomial with constant term 1."""
    return _log_one_plus(list(coeffs), K)


def y_simple() -> list[Fraction]:
    return [Fraction(1)]


def y_orbifold(q: int) -> list[Fraction]:
    if q < 1:
        raise ValueError("orbifold needs q >= 1")
    return [Fraction(0)] * (q - 1) + [Fraction(1)]


PSI_PRESETS = {
    "usual": (lambda K, **kw: psi_usual(), True),
    "atlantes": (lambda K, r=2, **kw: psi_atlantes(int(r)), True),
    "monotone": (lambda K, **kw: psi_monotone(K), False),
    "strictly_monotone": (lambda K, **kw: psi_strictly_monotone(K), False),
    "hypermaps": (lambda K, u=1, v=1, **kw: psi_hypermaps(u, v, K), False),
    "bms": (lambda K, m=1, **kw: psi_bms(m, K), False),
}


def truncation_for(order: int, g: int = 2, n: int = 4) -> int:
    """How many psi coefficients a task of this size can see.

    h_{g,mu} with |mu| <= d only sees c_k for k <= 2g - 2 + n + d (the hbar
    degree of the content product that can reach it).
    """
    return order + 2 * g + n - 2


def make_spec(preset: str = "usual", order: int = 8, y=None, g: int = 2, n: int = 4,
              y_is_polynomial: bool = True, **params) -> ModelSpec:
    """A ModelSpec for a named psi family and y(z) (default z).

    ``y`` is either a coefficient list or a dict ``{"orbifold": q}``.
    """
    key = preset.replace("-", "_").replace(" ", "_").lower()
    if key not in PSI_PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PSI_PRESETS)}")
    fn, exact_psi = PSI_PRESETS[key]
    K = truncation_for(order, g, n)
    psi = fn(K, **params)
    y_exact = True
    if y is None:
        ys = y_simple()
    elif isinstance(y, dict) and "orbifold" in y:
        ys = y_orbifold(int(y["orbifold"]))
    else:
        ys = [rational(s) for s in y]
        y_exact = bool(y_is_polynomial)
    label = key if not params else key + "(" + ",".join(f"{k}={v}" for k, v in sorted(params.items())) + ")"
    return ModelSpec(tuple(psi), tuple(ys), name=label, psi_exact=exact_psi, y_exact=y_exact)

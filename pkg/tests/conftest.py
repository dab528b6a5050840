import os
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from hurwitz_npoint.model import ModelSpec

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_rational(rng, lo=-5, hi=5, den=4):
    num = 0
    while num == 0:
        num = rng.randint(lo, hi)
    return Fraction(num, rng.randint(1, den))


def random_spec(seed, n_psi=4, n_y=4, y1_one=False):
    """A ModelSpec with n_psi nonzero c's and n_y nonzero s's (complete polynomials)."""
    rng = random.Random(seed)
    psi = tuple(random_rational(rng) for _ in range(n_psi))
    ys = [random_rational(rng) for _ in range(n_y)]
    if y1_one:
        ys[0] = Fraction(1)
    return ModelSpec(psi, tuple(ys), name=f"random{seed}", psi_exact=True, y_exact=True)


@pytest.fixture
def usual():
    return ModelSpec((Fraction(1),), (Fraction(1),), name="usual", psi_exact=True, y_exact=True)


@pytest.fixture
def trivial():
    return ModelSpec((Fraction(0),), (Fraction(1),), name="zero", psi_exact=True, y_exact=True)

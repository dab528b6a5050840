"""One PASS/FAIL line per acceptance criterion; all comparisons are exact."""
import random
from fractions import Fraction
from itertools import permutations

import pytest

from hurwitz_npoint.closed_form import (
    TaskSpec,
    apply_D_all,
    compute_H,
    constant_c,
    dh_cross_check,
    dh_graph_series,
    make_cache,
    negative_part,
    reference_formulas,
)
from hurwitz_npoint.graphs import enumerate_connected
from hurwitz_npoint.model import ModelCache, ModelSpec, lagrange_burmann_sides, principal_identity_sides
from hurwitz_npoint.oracle import hurwitz_number, model_F, oracle_npoint
from hurwitz_npoint.presets import make_spec
from hurwitz_npoint.series import at_zero, permute_z

from conftest import random_rational

MATRIX = [(0, 1), (0, 2), (1, 1), (0, 3), (1, 2), (2, 1), (0, 4)]


@pytest.fixture
def verdict(capsys):
    def say(num, ok, what, detail=""):
        with capsys.disabled():
            tail = f" ({detail})" if detail else ""
            print(f"\ncriterion {num}: {'PASS' if ok else 'FAIL'} {what}{tail}")
        assert ok, f"criterion {num} failed{tail}"
    return say


def nonzero_spec(seed):
    rng = random.Random(seed)

    def nz():
        while True:
            q = random_rational(rng)
            if q:
                return q

    return ModelSpec(tuple(nz() for _ in range(4)), tuple(nz() for _ in range(4)),
                     name=f"random{seed}", psi_exact=True, y_exact=True)


def test_1_oracle_matrix(verdict):
    bad = []
    checked = 0
    for preset in ("usual", "monotone", "strictly_monotone"):
        for y in (None, [1, 1]):
            spec = make_spec(preset, order=8, y=y, g=2, n=4)
            for g, n in MATRIX:
                N = 8 if n <= 2 else 6
                task = TaskSpec(g, n, N)
                H = compute_H(task, make_cache(spec, task))
                O = oracle_npoint(g, n, model_F(spec, N, n, g), spec, N)
                checked += 1
                if H != O:
                    bad.append((preset, y, g, n))
    verdict(1, not bad, "closed form equals oracle on the preset matrix", f"{checked} cases, mismatches {bad}")


def test_2_golden_formulas(verdict):
    spec = nonzero_spec(2024)
    bad = []
    for g, n in ((1, 1), (0, 3), (1, 2), (0, 4)):
        task = TaskSpec(g, n, 6)
        cache = make_cache(spec, task)
        if compute_H(task, cache) != reference_formulas(task, cache):
            bad.append((g, n))
    verdict(2, not bad, "closed form equals the reference low-genus formulas", f"mismatches {bad}")


def test_3_hand_values(verdict):
    usual = make_spec("usual", order=3, g=1, n=3)
    mono = make_spec("monotone", order=3, g=1, n=3)
    Fu, Fm = model_F(usual, 3, 3, 1), model_F(mono, 3, 3, 1)
    got = [
        hurwitz_number(0, (1,), Fu), hurwitz_number(0, (2,), Fu), hurwitz_number(1, (2,), Fu),
        hurwitz_number(0, (1, 1, 1), Fu), hurwitz_number(1, (2,), Fm),
    ]
    want = [1, Fraction(1, 2), Fraction(1, 12), 1, Fraction(1, 2)]
    verdict(3, got == want, "oracle reproduces the hand-derived Hurwitz numbers", f"got {[str(x) for x in got]}")


def test_4_constants(verdict):
    spec = nonzero_spec(7)
    d = spec.psi_derivative_at_zero
    ok = (constant_c(1, 1, spec) == d(1) / 12 and constant_c(1, 2, spec) == -d(2) / 12
          and constant_c(0, 3, spec) == -d(1))
    verdict(4, ok, "constants of the low-genus formulas")


def test_5_structure(verdict):
    spec = nonzero_spec(5)
    failures = []
    for g in range(3):
        for n in range(1, 4):
            task = TaskSpec(g, n, 6)
            cache = make_cache(spec, task)
            H = compute_H(task, cache)
            if any(permute_z(H, p) != H for p in permutations(range(1, n + 1))):
                failures.append((g, n, "symmetry"))
            if negative_part(H):
                failures.append((g, n, "poles"))
            if any(at_zero(H, i) for i in range(1, n + 1)):
                failures.append((g, n, "z_i = 0"))
            if n >= 2 and (g, n) != (0, 2):
                for graph in enumerate_connected(n):
                    c = 2 * (g - graph.betti)
                    if c < 0:
                        continue
                    F = dh_graph_series(graph, cache, 5, c)
                    ctx = F.ctx
                    for key in F.terms:
                        _, hb, aux = ctx.exponents(key)
                        if hb % 2 or not 0 <= hb <= c or any(aux):
                            failures.append((g, n, "grading"))
                            break
    verdict(5, not failures, "symmetry, no diagonal poles, vanishing at z_i = 0, hbar grading", f"{failures}")


def test_6_route_agreement(verdict):
    spec = nonzero_spec(6)
    bad = []
    for g, n in ((1, 2), (0, 3), (0, 4), (1, 3)):
        task = TaskSpec(g, n, 5)
        cache = make_cache(spec, task)
        if apply_D_all(cache, compute_H(task, cache)) != dh_cross_check(task, cache):
            bad.append((g, n))
    verdict(6, not bad, "integrated and differentiated routes agree", f"mismatches {bad}")


def test_7_principal_identity(verdict):
    bad = 0
    for seed in range(50):
        rng = random.Random(1000 + seed)
        c = ModelCache(nonzero_spec(1000 + seed), 6, hbar_cap=4)
        H = c.vctx.from_dict({((a,), 0, (("u", b),)): random_rational(rng)
                              for a in range(6) for b in range(4) if rng.random() < 0.4})
        lhs, rhs = principal_identity_sides(c, H)
        bad += lhs != rhs
    verdict(7, not bad, "principal identity on 50 random instances", f"{bad} failures")


def test_8_lagrange_burmann(verdict):
    bad = 0
    for seed in range(50):
        rng = random.Random(2000 + seed)
        c = ModelCache(nonzero_spec(2000 + seed), 6)
        H = c.vctx.from_dict({(k,): random_rational(rng) for k in range(7) if rng.random() < 0.7})
        lhs, rhs = lagrange_burmann_sides(c, H)
        bad += lhs != rhs
    verdict(8, not bad, "Lagrange-Burmann inversion on 50 random polynomials", f"{bad} failures")


def test_9_loop_bounds(verdict):
    spec = nonzero_spec(9)
    bad = []
    for g, n in ((1, 1), (2, 1), (1, 2), (0, 3), (2, 2), (0, 4), (1, 3)):
        task = TaskSpec(g, n, 5)
        cache = make_cache(spec, task)
        if compute_H(task, cache, slack=1) != compute_H(task, cache):
            bad.append((g, n))
        if n >= 2 and (g, n) != (0, 2) and dh_cross_check(task, cache, slack=1) != dh_cross_check(task, cache):
            bad.append((g, n, "dh"))
    verdict(9, not bad, "doubling the r/j loop bounds changes nothing", f"changed {bad}")

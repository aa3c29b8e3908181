import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import catalan_numbers, lagrange_reversion
from padicgroups.errors import BadInputError
from padicgroups.padic import PadicInt, PrecisionPolicy, vp
from padicgroups.polyring import RING_Q, PolyMap
from padicgroups.tate import (
    TateMap,
    TateSeries,
    compose,
    congruence_power_levels,
    count_zp_roots,
    distance_exponent,
    gauss_norm,
    invert_diffeo,
    invert_local,
    strassman_bound,
)

P, N, D = 3, 10, 6


def series1(coeffs, p=P, n=N, cap=D):
    return TateSeries.from_rational(p, n, 1, cap, {(k,): c for k, c in coeffs.items()})


def random_perturbation(rng, d=1, level=1, p=P, n=N, cap=D, allow_constant=False):
    """id + u with ||u|| <= p^-level, random window coefficients.

    Constant terms are excluded by default: maps fixing the origin obey the
    window laws exactly, translations only up to tail spread-down.
    """
    comps = []
    for i in range(d):
        coeffs = {tuple(1 if j == i else 0 for j in range(d)): 1}
        for _ in range(rng.randint(1, 4)):
            e = tuple(rng.randint(0, 2) for _ in range(d))
            if sum(e) > cap or (sum(e) == 0 and not allow_constant):
                continue
            c = p**level * rng.randint(0, p**(n - level) - 1)
            coeffs[e] = coeffs.get(e, 0) + c
        comps.append(TateSeries(p, n, d, cap, coeffs))
    return TateMap(comps)


class TestGaussNorm:
    def test_min_of_valuations(self):
        f = TateSeries.from_rational(P, N, 2, D, {(1, 0): 3, (0, 2): 27})
        assert gauss_norm(f) == 1

    def test_zero_window(self):
        assert gauss_norm(TateSeries.zero(P, N, 1, D)) == math.inf

    def test_negative_exponent_with_shift(self):
        # (x^p - x)/p: integral data x^p - x with shift 1
        f = TateSeries(P, N, 1, D, {(P,): 1, (1,): -1}, shift=1)
        assert gauss_norm(f) == -1
        # still maps Z_p into Z_p
        for x in range(0, 12):
            assert f.evaluate((x,)).valuation >= 0


class TestCompose:
    def test_identity_neutral(self):
        g = series1({2: 1, 1: 5})
        ident = TateMap.identity(P, N, 1, D)
        assert compose(g, ident) == g

    def test_square_after_translation(self):
        g = series1({2: 1})
        f = TateMap([series1({1: 1, 0: P})])
        assert compose(g, f) == series1({2: 1, 1: 2 * P, 0: P * P})

    def test_nonintegral_inner_map_rejected(self):
        g = series1({1: 1})
        shifted = TateSeries(P, N, 1, D, {(P,): 1, (1,): -1}, shift=1)
        with pytest.raises(BadInputError, match="integral"):
            compose(g, TateMap([shifted]))

    def test_norm_contraction_random(self):
        rng = random.Random(7)
        for _ in range(50):
            g = series1({rng.randint(0, D): P ** rng.randint(0, 3),
                         rng.randint(0, D): rng.randint(1, 80)})
            f = random_perturbation(rng)
            assert gauss_norm(compose(g, f)) >= gauss_norm(g)

    def test_perturbation_bound_random(self):
        # ||g∘(id+h) - g|| <= ||h||
        rng = random.Random(11)
        ident = TateMap.identity(P, N, 1, D)
        for _ in range(50):
            g = series1({rng.randint(0, D): rng.randint(1, 3**N - 1),
                         rng.randint(0, D): rng.randint(1, 3**N - 1)})
            f = random_perturbation(rng, level=rng.randint(1, 3))
            h_norm = min(
                u.gauss_norm_exponent() for u in f.minus_identity()
            )
            diff = compose(g, f).subtract(compose(g, ident))
            assert diff.gauss_norm_exponent() >= h_norm


class TestSemigroup:
    def test_associativity_random(self):
        rng = random.Random(13)
        for _ in range(25):
            f = random_perturbation(rng, d=2)
            g = random_perturbation(rng, d=2)
            h = random_perturbation(rng, d=2)
            assert h.compose(g).compose(f) == h.compose(g.compose(f))

    def test_associativity_with_translations_up_to_tail_fuzz(self):
        # constant terms let dropped tails spread down, but each pick of a
        # constant costs another factor p^-level
        rng = random.Random(29)
        for _ in range(25):
            f = random_perturbation(rng, d=2, allow_constant=True)
            g = random_perturbation(rng, d=2, allow_constant=True)
            h = random_perturbation(rng, d=2, allow_constant=True)
            left = h.compose(g).compose(f)
            right = h.compose(g.compose(f))
            defect = min(
                a.subtract(b).gauss_norm_exponent()
                for a, b in zip(left.components, right.components)
            )
            assert defect >= 2


class TestInvertLocal:
    def test_catalan_reversion(self):
        phi = PolyMap(1, RING_Q, [{(1,): 1, (2,): 1}])
        report = invert_local(phi, p=P, N=N, degree_cap=10)
        psi = report.inverse_polymap
        cats = catalan_numbers(10)
        for n in range(1, 11):
            expected = Fraction((-1) ** (n - 1) * cats[n - 1])
            assert psi.components[0].get((n,), Fraction(0)) == expected
        # independent oracle route
        oracle = lagrange_reversion([Fraction(0), Fraction(1), Fraction(1)], 10)
        for n in range(1, 11):
            assert psi.components[0].get((n,), Fraction(0)) == oracle[n]
        assert report.norm_bound_ok
        # all coefficients integral: nothing to rescale
        assert report.rescale_exponent == 0
        assert report.inverse_tatemap is not None

    def test_linear_map(self):
        phi = PolyMap.linear([[1, 2], [3, 7]])
        report = invert_local(phi, p=P, N=N, degree_cap=4)
        assert report.inverse_polymap == PolyMap.linear([[7, -2], [-3, 1]])

    def test_norm_bound_audit(self):
        phi = PolyMap(1, RING_Q, [{(1,): 1, (2,): 1}])
        report = invert_local(phi, p=P, N=N, degree_cap=10)
        # ||L^{-1}|| = 1 here, so every homogeneous part must be integral
        assert all(v >= 0 for v in report.degree_norms.values())

    def test_singular_rejected(self):
        phi = PolyMap(2, RING_Q, [{(1, 0): 1}, {(1, 0): 1}])
        with pytest.raises(BadInputError, match="not locally invertible"):
            invert_local(phi, p=P, N=N, degree_cap=4)

    def test_nonzero_origin_rejected(self):
        phi = PolyMap(1, RING_Q, [{(0,): 1, (1,): 1}])
        with pytest.raises(BadInputError, match="fixed origin"):
            invert_local(phi, p=P, N=N, degree_cap=4)


class TestInvertDiffeo:
    def test_translation(self):
        f = TateMap([series1({1: 1, 0: P})])
        g = invert_diffeo(f)
        assert g == TateMap([series1({1: 1, 0: -P})])

    def test_quadratic_perturbation(self):
        f = TateMap([series1({1: 1, 2: P})])
        g = invert_diffeo(f)
        assert f.compose(g) == TateMap.identity(P, N, 1, D)

    def test_below_threshold_rejected(self):
        f = TateMap([series1({1: 2})])  # ||f - id|| = 1
        with pytest.raises(BadInputError, match="below Bell-Poonen"):
            invert_diffeo(f)

    def test_norm_preserved_random(self):
        # ||f^{-1} - id|| = ||f - id|| on 30 random perturbations
        rng = random.Random(17)
        for _ in range(30):
            f = random_perturbation(rng, d=rng.choice([1, 2]), level=rng.randint(1, 3))
            g = invert_diffeo(f)
            assert g.congruence_level() == f.congruence_level()

    def test_isometry_on_points(self):
        rng = random.Random(19)
        for _ in range(20):
            f = random_perturbation(rng, d=2, level=1)
            x = [rng.randint(0, 3**N - 1) for _ in range(2)]
            y = [rng.randint(0, 3**N - 1) for _ in range(2)]
            dist_before = distance_exponent(x, y, P, N)
            fx, fy = f.evaluate(x), f.evaluate(y)
            assert distance_exponent(fx, fy, P, N) == dist_before


class TestCongruencePowers:
    def test_translation_levels(self):
        policy = PrecisionPolicy(N=N, guard=3)
        f = TateMap([series1({1: 1, 0: P})])
        levels = congruence_power_levels(f, policy)
        # f^(3^c) adds 3^c * 3, so the level is c + 1
        assert levels == [c + 1 for c in range(1, policy.zero_threshold + 1)]

    def test_identity_levels_infinite(self):
        policy = PrecisionPolicy(N=N, guard=3)
        ident = TateMap.identity(P, N, 1, D)
        assert all(
            lvl == math.inf for lvl in congruence_power_levels(ident, policy)
        )

    def test_scaling_map_levels(self):
        policy = PrecisionPolicy(N=N, guard=3)
        f = TateMap([series1({1: 1 + P})])
        levels = congruence_power_levels(f, policy)
        for c, lvl in enumerate(levels, start=1):
            assert lvl == vp((1 + P) ** (P**c) - 1, P)
            assert lvl == c + 1

    def test_random_maps_stay_above_line(self):
        rng = random.Random(23)
        policy = PrecisionPolicy(N=N, guard=4)
        for _ in range(50):
            f = random_perturbation(rng, d=1, level=1)
            congruence_power_levels(f, policy)  # raises on violation


class TestStrassman:
    def test_t_squared_minus_t(self):
        f = series1({2: 1, 1: -1})
        assert strassman_bound(f, exact=True) == 2
        assert count_zp_roots([0, -1, 1], P) == 2

    def test_unit_constant(self):
        f = series1({0: 1, 1: P})
        assert strassman_bound(f, exact=True) == 0
        assert count_zp_roots([1, P], P) == 0

    def test_cubic_with_odd_valuation_pair(self):
        f = series1({3: 1, 1: P})
        assert strassman_bound(f, exact=True) == 3
        # roots: t = 0 only, since t^2 = -3 needs even valuation
        assert count_zp_roots([0, P, 0, 1], P) == 1

    def test_requires_exactness_assertion(self):
        with pytest.raises(BadInputError, match="exactness"):
            strassman_bound(series1({1: 1}))

    def test_zero_function_rejected(self):
        with pytest.raises(BadInputError, match="zero function"):
            strassman_bound(TateSeries.zero(P, N, 1, D), exact=True)

    @given(st.lists(st.integers(-40, 40), min_size=2, max_size=6))
    @settings(max_examples=60, deadline=None)
    def test_root_count_never_exceeds_bound(self, coeffs):
        if all(c == 0 for c in coeffs):
            return
        f = series1({i: c for i, c in enumerate(coeffs) if c != 0})
        bound = strassman_bound(f, exact=True)
        assert count_zp_roots(coeffs, P) <= bound


class TestWindowFalsification:
    """A not-indistinguishable-from-zero univariate window of degree <= D
    cannot vanish at more than D points of Z_3: restriction along lines
    keeps precision honest."""

    @given(st.lists(st.integers(-20, 20), min_size=1, max_size=D + 1))
    @settings(max_examples=40, deadline=None)
    def test_degree_bounds_root_count(self, coeffs):
        if all(c == 0 for c in coeffs):
            return
        assert count_zp_roots(coeffs, P) <= len(coeffs) - 1


def test_distance_exponent_basics():
    assert distance_exponent([0], [9], P, N) == 2
    assert distance_exponent([1], [1], P, N) == N


def test_padicint_coefficient_accessor():
    f = series1({1: 6})
    c = f.coefficient((1,))
    assert isinstance(c, PadicInt) and c.valuation == 1

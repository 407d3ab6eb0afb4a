import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rilab.dyadic import StepFunction, basis, constant, prefix_indicator
from rilab.norms import (
    DEFAULT_T_GRID,
    LorentzNorm,
    OrliczNorm,
    builtin_specs,
    check_property_P,
    check_property_P_prime,
    conditional_expectation,
    decreasing_rearrangement,
    dual_norm,
    eval_norm,
    format_norm_spec,
    fundamental_function,
    lorentz,
    lp,
    min_level,
    parse_norm_spec,
    quadratic_orlicz,
)

LORENTZ = lorentz(2, ("0.4", "0.3", "0.2", "0.1"))
ALL_SPECS = list(builtin_specs().values())


def random_step(rng, level=3, scale=4.0):
    return StepFunction(level, tuple((rng.random(2 ** level) * 2 - 1) * scale))


class TestEvalNorm:
    def test_l1_indicator(self):
        assert eval_norm(lp(1), prefix_indicator(Fraction(1, 2))) == 0.5

    def test_linf_indicator(self):
        f = basis(2, 3)  # chi on (1/2, 3/4]
        assert eval_norm(lp(math.inf), f) == 1.0

    def test_lorentz_indicator_rearranges_to_top(self):
        f = basis(2, 3)
        assert eval_norm(LORENTZ, f) == pytest.approx(0.4, abs=1e-15)

    def test_normalization_exact(self):
        for spec in ALL_SPECS:
            assert eval_norm(spec, constant(1)) == pytest.approx(1.0, abs=1e-10)

    def test_l2_value(self):
        f = StepFunction(1, (3, 4))
        assert eval_norm(lp(2), f) == pytest.approx(math.sqrt(12.5), rel=1e-14)

    def test_lorentz_autorefines_coarse_input(self):
        assert eval_norm(LORENTZ, basis(1, 1)) == pytest.approx(0.7, abs=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from(range(len(ALL_SPECS))))
    def test_rearrangement_invariance(self, seed, ispec):
        spec = ALL_SPECS[ispec]
        rng = np.random.Generator(np.random.PCG64(seed))
        f = random_step(rng)
        a = eval_norm(spec, f)
        b = eval_norm(spec, decreasing_rearrangement(f))
        assert a == pytest.approx(b, rel=1e-12, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from(range(len(ALL_SPECS))))
    def test_triangle_and_homogeneity(self, seed, ispec):
        spec = ALL_SPECS[ispec]
        rng = np.random.Generator(np.random.PCG64(seed))
        f, g = random_step(rng), random_step(rng)
        nf, ng = eval_norm(spec, f), eval_norm(spec, g)
        assert eval_norm(spec, f + g) <= nf + ng + 1e-12 * (nf + ng + 1)
        assert eval_norm(spec, -2.5 * f) == pytest.approx(2.5 * nf, rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from(range(len(ALL_SPECS))))
    def test_lattice_monotonicity(self, seed, ispec):
        spec = ALL_SPECS[ispec]
        rng = np.random.Generator(np.random.PCG64(seed))
        f = random_step(rng)
        i = int(rng.integers(len(f.values)))
        raised = list(f.values)
        raised[i] = raised[i] * 3 + (1 if raised[i] >= 0 else -1)
        g = StepFunction(f.level, tuple(raised))
        assert eval_norm(spec, g) >= eval_norm(spec, f) - 1e-11


class TestRearrangement:
    def test_sort(self):
        f = StepFunction(2, (1, 3, 2, 2))
        assert decreasing_rearrangement(f).values == (3, 2, 2, 1)

    def test_modulus(self):
        assert decreasing_rearrangement(StepFunction(1, (-5, 0))).values == (5, 0)

    def test_idempotent(self):
        f = StepFunction(2, (1, -3, 2, 0))
        once = decreasing_rearrangement(f)
        assert decreasing_rearrangement(once) == once


class TestDualNorm:
    def test_l2_self_dual(self):
        rng = np.random.Generator(np.random.PCG64(0))
        g = random_step(rng)
        assert dual_norm(lp(2), g) == pytest.approx(eval_norm(lp(2), g), rel=1e-12)

    def test_l1_dual_is_sup(self):
        g = StepFunction(1, (3, 1))
        assert dual_norm(lp(1), g) == 3.0

    def test_lp4_conjugate_value(self):
        g = prefix_indicator(Fraction(1, 2))
        assert dual_norm(lp(4), g) == pytest.approx(0.5946035575013605, abs=1e-12)

    def test_lorentz_prefix_formula(self):
        g = prefix_indicator(Fraction(1, 2), 2)
        assert dual_norm(LORENTZ, g) == pytest.approx(0.5 / 0.7, rel=1e-12)

    def test_orlicz_close_to_l2(self):
        # quadratic table: the dual pairing sup must reach at least <g,g>/||g||
        rng = np.random.Generator(np.random.PCG64(5))
        spec = quadratic_orlicz()
        g = abs(random_step(rng, level=2))
        lower = (sum(v * v for v in g.values) / 4) / eval_norm(spec, g)
        assert dual_norm(spec, g, tol=1e-9) >= lower - 1e-9

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from(range(len(ALL_SPECS))))
    def test_hoelder_consistency(self, seed, ispec):
        spec = ALL_SPECS[ispec]
        rng = np.random.Generator(np.random.PCG64(seed))
        f, g = random_step(rng, level=2), random_step(rng, level=2)
        pairing = sum(a * b for a, b in zip(f.values, g.values)) / 4
        bound = eval_norm(spec, f) * dual_norm(spec, g, tol=1e-9)
        assert pairing <= bound + 1e-6


class TestConditionalExpectation:
    def test_block_average(self):
        f = StepFunction(2, (1, 3, 2, 2))
        assert conditional_expectation(f, 1).values == (2, 2)

    def test_constants_fixed(self):
        f = constant(Fraction(5, 7), 3)
        assert conditional_expectation(f, 1) == constant(Fraction(5, 7), 1)

    def test_integral_preserved_exactly(self):
        f = StepFunction(3, tuple(Fraction(k, 3) for k in range(8)))
        assert conditional_expectation(f, 1).integral() == f.integral()

    def test_finer_level_rejected(self):
        with pytest.raises(ValueError):
            conditional_expectation(basis(1, 1), 2)

    def test_contractive_on_all_specs(self):
        rng = np.random.Generator(np.random.PCG64(11))
        for spec in ALL_SPECS:
            for _ in range(100):
                f = random_step(rng, level=3)
                ef = conditional_expectation(f, 1)
                assert eval_norm(spec, ef) <= eval_norm(spec, f) + 1e-10


class TestPropertyP:
    def test_l1_margin_exact(self):
        w = check_property_P(lp(1))
        assert w.holds
        # margin at each grid t is exactly t/2; worst grid point is t = 2^-10
        assert w.worst_margin == pytest.approx(2.0 ** -11, abs=1e-15)

    def test_linf_fails_with_flat_witness(self):
        w = check_property_P(lp(math.inf))
        assert not w.holds
        assert w.worst_margin == 0.0
        assert w.worst_t <= 1.0

    def test_l2_holds(self):
        assert check_property_P(lp(2)).holds

    def test_prime_linf_via_dual(self):
        w = check_property_P_prime(lp(math.inf))
        assert w.holds
        assert w.worst_margin == pytest.approx(2.0 ** -11, abs=1e-12)

    def test_prime_l2(self):
        assert check_property_P_prime(lp(2)).holds

    def test_at_least_one_property_everywhere(self):
        for spec in ALL_SPECS:
            assert (check_property_P(spec).holds
                    or check_property_P_prime(spec).holds)

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            check_property_P(lp(2), t_grid=())


class TestFundamentalFunction:
    def test_lp_power_law(self):
        for p in (1.0, 2.0, 3.0):
            for t in (Fraction(1, 8), Fraction(3, 8), Fraction(1, 2)):
                assert fundamental_function(lp(p), t) == pytest.approx(
                    float(t) ** (1 / p), rel=1e-12)

    def test_normalized_at_one(self):
        for spec in ALL_SPECS:
            assert fundamental_function(spec, 1) == pytest.approx(1.0, abs=1e-10)

    def test_lorentz_value(self):
        assert fundamental_function(LORENTZ, Fraction(1, 4)) == pytest.approx(0.4)

    def test_non_dyadic_rejected(self):
        with pytest.raises(ValueError):
            fundamental_function(lp(2), Fraction(1, 3))

    def test_lp_ratio_constant_one(self):
        # phi(t) / t^{1/p} identically 1: the classifier's Lp fingerprint
        for p in (1.0, 2.0, 4.0):
            for k in range(1, 9):
                t = Fraction(k, 8)
                ratio = fundamental_function(lp(p), t) / float(t) ** (1 / p)
                assert ratio == pytest.approx(1.0, rel=1e-12)


class TestSpecFormat:
    def test_roundtrip_lp(self):
        for text in ("lp 2", "lp inf", "lp 1.5"):
            assert format_norm_spec(parse_norm_spec(text)) == text

    def test_roundtrip_lorentz(self):
        spec = parse_norm_spec("lorentz 2 0.4 0.3 0.2 0.1")
        assert spec == LORENTZ
        assert parse_norm_spec(format_norm_spec(spec)) == spec

    def test_roundtrip_orlicz(self):
        spec = quadratic_orlicz()
        assert parse_norm_spec(format_norm_spec(spec)) == spec

    def test_bad_specs(self):
        for text in ("", "lq 2", "orlicz 3 0 0 1 1"):
            with pytest.raises(ValueError):
                parse_norm_spec(text)


class TestSpecValidation:
    def test_lorentz_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            lorentz(1, ("0.5", "0.4"))

    def test_lorentz_weights_must_decrease(self):
        with pytest.raises(ValueError):
            lorentz(1, ("0.3", "0.7"))

    def test_orlicz_must_start_at_origin(self):
        with pytest.raises(ValueError):
            OrliczNorm((0.0, 1.0), (0.5, 1.0))

    def test_orlicz_must_be_convex(self):
        with pytest.raises(ValueError):
            OrliczNorm((0.0, 0.5, 1.0), (0.0, 0.9, 1.0))

    def test_lp_range(self):
        with pytest.raises(ValueError):
            lp(0.5)

    def test_min_level(self):
        assert min_level(LORENTZ) == 2
        assert min_level(lp(2)) == 0

import math
from fractions import Fraction

import numpy as np
import pytest

from rilab.dyadic import StepFunction, basis, constant, pairing, prefix_indicator
from rilab.norms import conditional_expectation, eval_norm, lorentz, lp
from rilab.flinn import (
    FlinnCandidate,
    basis_pair_uniqueness,
    estimate_growth_constant,
    find_separating_sign_vector,
    flinn_defect,
    is_flinn_pair,
    recover_quadratic_weight,
    verify_sign_compatibility,
)
from rilab.operators import (
    adjoint,
    apply,
    invert,
    lamperti_isometry,
    signed_permutation_operator,
)
from tests.test_operators import exact_l2_lamperti_map

LORENTZ = lorentz(2, ("0.4", "0.3", "0.2", "0.1"))


def l2_candidate(u):
    uv = u.to_array()
    f = StepFunction(u.level, tuple(uv / float(uv @ uv / len(uv))))
    return FlinnCandidate(u, f, lp(2))


class TestIsFlinnPair:
    def test_l2_constants(self):
        v = is_flinn_pair(FlinnCandidate(constant(1, 1), constant(1, 1), lp(2)))
        assert v.status == "true" and v.certified
        assert v.upper == pytest.approx(1.0, abs=1e-12)

    def test_l1_pair_accepted_in_its_own_span(self):
        # exhaustive vertex check: the halved-support pair really is accepted
        # over the level-2 space
        v = is_flinn_pair(FlinnCandidate(2 * basis(1, 1), basis(1, 1), lp(1)),
                          level=2)
        assert v.status == "true" and v.certified

    def test_l1_pair_refuted_one_level_deeper(self):
        v = is_flinn_pair(FlinnCandidate(2 * basis(1, 1), basis(1, 1), lp(1)),
                          level=3)
        assert v.status == "false"
        assert v.lower == pytest.approx(1.5, abs=1e-12)
        assert v.witness.values[0] == pytest.approx(8.0)

    def test_l2_skew_projection_refuted(self):
        u = StepFunction(1, (2.0, 0.0))
        f = StepFunction(1, (1.0, 2.0))  # pairing = 1, not parallel to u
        v = is_flinn_pair(FlinnCandidate(u, f, lp(2)))
        assert v.status == "false"
        # Hilbert identity: ||I - P|| = ||f||_2 ||u||_2
        assert v.lower == pytest.approx(
            eval_norm(lp(2), f) * eval_norm(lp(2), u), rel=1e-9)
        x = v.witness
        assert eval_norm(lp(2), apply_proj(u, f, x)) >= (1 + 1e-6) * eval_norm(lp(2), x)

    def test_zero_element_rejected(self):
        with pytest.raises(ValueError):
            is_flinn_pair(FlinnCandidate(0 * basis(1, 1), basis(1, 1), lp(2)))

    def test_bad_pairing_rejected(self):
        with pytest.raises(ValueError):
            is_flinn_pair(FlinnCandidate(basis(1, 1), basis(1, 1), lp(2)))


def apply_proj(u, f, x):
    """(I - f(x)u) x via the integral pairing."""
    m = max(u.level, f.level, x.level)
    c = float(pairing(f, x))
    return x.refine(m) - c * u.refine(m)


class TestFlinnDefect:
    def test_l2_always_zero(self):
        rng = np.random.Generator(np.random.PCG64(0))
        for _ in range(5):
            u = StepFunction(2, tuple(rng.standard_normal(4)))
            res = flinn_defect(lp(2), u, witness_level=4)
            assert res.defect <= 1e-8 and res.certified

    def test_l1_halved_support_value(self):
        # frozen from the exhaustive vertex minimax: with cuts at level 5 the
        # balanced functional is optimal and the value is 2 - 2^{-3}
        res = flinn_defect(lp(1), basis(1, 1), level=2, witness_level=5)
        assert res.certified
        assert res.defect == pytest.approx(0.875, abs=1e-9)
        assert res.lower_bound == pytest.approx(0.875, abs=1e-9)

    def test_l1_constant_value(self):
        res = flinn_defect(lp(1), constant(1, 2), level=2, witness_level=5)
        assert res.defect == pytest.approx(1 - 2.0 ** -4, abs=1e-9)

    def test_intrinsic_level_accepts_basis_elements(self):
        # single-cell elements are accepted within their own span on any spec
        for spec in (lp(1), LORENTZ):
            res = flinn_defect(spec, basis(2, 2), level=2, witness_level=2)
            assert res.defect <= 1e-9

    def test_scale_invariance(self):
        u = StepFunction(2, (1.0, -0.5, 2.0, 0.0))
        a = flinn_defect(lp(1), u, level=2, witness_level=4)
        b = flinn_defect(lp(1), 3.5 * u, level=2, witness_level=4)
        c = flinn_defect(lp(1), -1 * u, level=2, witness_level=4)
        assert b.defect == pytest.approx(a.defect, abs=1e-9)
        assert c.defect == pytest.approx(a.defect, abs=1e-9)

    def test_defect_continuity_proxy(self):
        u = StepFunction(2, (1.0, 1.0, 0.0, 0.0))
        base = flinn_defect(lp(1), u, level=2, witness_level=4).defect
        for eps in (1e-3, 1e-2):
            pert = StepFunction(2, (1.0, 1.0 - eps, eps, 0.0))
            d = flinn_defect(lp(1), pert, level=2, witness_level=4).defect
            assert abs(d - base) <= 40 * eps

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            flinn_defect(lp(1), 0 * basis(1, 1))

    def test_orlicz_fallback_runs(self):
        from rilab.norms import quadratic_orlicz
        res = flinn_defect(quadratic_orlicz(), basis(1, 1), level=1,
                           witness_level=3, max_outer=10)
        assert not res.certified
        assert res.defect >= 0.0


class TestSignCompatibility:
    def test_constant_pair(self):
        ok, worst = verify_sign_compatibility(
            FlinnCandidate(constant(1, 1), constant(1, 1), lp(2)))
        assert ok and worst == 1.0

    def test_mixed_sign_l2_products_are_squares(self):
        rng = np.random.Generator(np.random.PCG64(1))
        for _ in range(20):
            u = StepFunction(2, tuple(rng.standard_normal(4)))
            cand = l2_candidate(u)
            assert is_flinn_pair(cand).status == "true"
            ok, worst = verify_sign_compatibility(cand)
            assert ok and worst >= -1e-12

    def test_violating_pair_detected(self):
        u = StepFunction(1, (1.0, -1.0))
        f = StepFunction(1, (2.0, 0.0))
        ok, worst = verify_sign_compatibility(FlinnCandidate(u, f, lp(2)))
        assert ok  # products are (2, 0): fine
        f2 = StepFunction(1, (0.0, -2.0))
        ok2, worst2 = verify_sign_compatibility(FlinnCandidate(u, f2, lp(2)))
        assert ok2 and worst2 >= 0  # (-1)*(-2) = 2
        f3 = StepFunction(1, (4.0, 2.0))
        ok3, worst3 = verify_sign_compatibility(FlinnCandidate(u, f3, lp(2)))
        assert not ok3 and worst3 == -2.0


class TestTransport:
    def test_isometry_transport_permutation(self):
        rng = np.random.Generator(np.random.PCG64(7))
        u = StepFunction(2, tuple(rng.standard_normal(4)))
        cand = l2_candidate(u)
        assert is_flinn_pair(cand).status == "true"
        U = signed_permutation_operator(2, 3, seed=5)
        uu = apply(U, cand.u)
        ff = apply(invert(adjoint(U)), cand.f)
        moved = FlinnCandidate(uu, ff, lp(2))
        assert abs(float(moved.pairing()) - 1) < 1e-12
        assert is_flinn_pair(moved).status == "true"

    def test_isometry_transport_lamperti(self):
        u = StepFunction(2, (1.0, 2.0, -1.0, 0.5))
        cand = l2_candidate(u)
        U = lamperti_isometry(2, exact_l2_lamperti_map(), (1, -1, 1, 1))
        moved = FlinnCandidate(apply(U, cand.u), apply(invert(adjoint(U)), cand.f),
                               lp(2))
        assert abs(float(moved.pairing()) - 1) < 1e-12
        assert is_flinn_pair(moved, tol=1e-8).status == "true"

    def test_modulus_pair_transport(self):
        u = StepFunction(2, (1.0, -2.0, 3.0, -0.5))
        cand = l2_candidate(u)
        assert is_flinn_pair(cand).status == "true"
        moved = FlinnCandidate(abs(cand.u), abs(cand.f), lp(2))
        assert is_flinn_pair(moved).status == "true"

    def test_averaging_pushforward(self):
        rng = np.random.Generator(np.random.PCG64(9))
        u = StepFunction(4, tuple(1 + rng.random(16)))
        f = l2_candidate(u).f
        for N in (1, 2, 3):
            pu = conditional_expectation(u, N)
            assert abs(float(pairing(f, pu))) > 1e-6  # nonvanishing pairing
            res = flinn_defect(lp(2), pu, level=N, witness_level=N)
            assert res.defect <= 1e-8


class TestWeightRecovery:
    def test_full_support_unit_weight(self):
        rng = np.random.Generator(np.random.PCG64(3))
        xs = [StepFunction(2, tuple(rng.standard_normal(4))) for _ in range(10)]
        rec = recover_quadratic_weight(lp(2), constant(1, 2), xs)
        assert np.allclose(rec.weights, 1.0, atol=1e-10)
        assert rec.residual <= 1e-10

    def test_half_support(self):
        rng = np.random.Generator(np.random.PCG64(4))
        u = basis(1, 1).refine(3)
        xs = [StepFunction(3, tuple(np.concatenate(
            [rng.standard_normal(4), np.zeros(4)]))) for _ in range(12)]
        vs = [StepFunction(3, tuple(np.concatenate(
            [np.zeros(4), rng.standard_normal(4)]))) for _ in range(6)]
        rec = recover_quadratic_weight(lp(2), u, xs, off_support_vs=vs)
        assert np.allclose(rec.weights, 1.0, atol=1e-10)
        assert rec.residual <= 1e-10
        assert rec.mix_discrepancy <= 1e-10

    def test_off_support_sample_rejected(self):
        xs = [constant(1, 2)]
        with pytest.raises(ValueError):
            recover_quadratic_weight(lp(2), basis(1, 1), xs)


class TestBasisPairUniqueness:
    def test_l2_levels(self):
        for n, j in ((1, 1), (2, 3)):
            rep = basis_pair_uniqueness(lp(2), n, j)
            assert rep.found and rep.unique

    def test_l1_level1(self):
        rep = basis_pair_uniqueness(lp(1), 1, 1)
        assert rep.found and rep.unique
        assert rep.max_deviation <= 1e-7

    def test_l1_level2(self):
        rep = basis_pair_uniqueness(lp(1), 2, 2)
        assert rep.found and rep.unique

    def test_symmetry_between_cells(self):
        a = basis_pair_uniqueness(lp(1), 1, 1)
        b = basis_pair_uniqueness(lp(1), 1, 2)
        assert (a.found, a.unique) == (b.found, b.unique)

    def test_requires_strict_property(self):
        with pytest.raises(ValueError):
            basis_pair_uniqueness(lp(math.inf), 1, 1)


class TestGrowthConstant:
    def test_single_coordinate_ratio_one(self):
        rep = estimate_growth_constant(lp(math.inf), p=1.0, n_max=2,
                                       n_candidates=0, seed=0)
        assert rep.constant >= 1.0
        assert rep.n_found >= 6  # all coordinate vectors pass

    def test_bounded_no_growth(self):
        rep = estimate_growth_constant(lp(math.inf), p=1.0, n_max=3,
                                       n_candidates=3, seed=0)
        assert rep.trend_slope <= 0.05
        assert rep.constant < 4.0

    def test_large_p_ratio_tends_to_one(self):
        rep = estimate_growth_constant(lp(math.inf), p=64.0, n_max=2,
                                       n_candidates=2, seed=1)
        assert rep.constant <= 1.2

    def test_hilbert_spec_rejected(self):
        with pytest.raises(ValueError):
            estimate_growth_constant(lp(2), p=1.0, n_max=2)


class TestSeparation:
    def test_proportional_returns_none(self):
        f = StepFunction(1, (1.0, 2.0))
        s = find_separating_sign_vector(f, 3 * f)
        assert s.h is None
        assert s.c == pytest.approx(3.0)
        assert s.residual == pytest.approx(0.0, abs=1e-14)

    def test_hand_example(self):
        f = StepFunction(2, (1, 1, -1, -1))
        g = StepFunction(2, (1, 1, 1, 1))
        s = find_separating_sign_vector(f, g)
        assert s.h is not None
        hf = float(pairing(s.h, f))
        hg = float(pairing(s.h, g))
        assert hf * hg < 0
        # the worked sign vector is one of the violators
        h0 = StepFunction(2, (1, -1, -1, -1))
        assert float(pairing(h0, f)) * float(pairing(h0, g)) < 0

    def test_zero_f_rejected(self):
        with pytest.raises(ValueError):
            find_separating_sign_vector(StepFunction(1, (0, 0)),
                                        StepFunction(1, (1, 1)))

    def test_randomized_path(self):
        rng = np.random.Generator(np.random.PCG64(0))
        f = StepFunction(5, tuple(rng.standard_normal(32)))
        g = StepFunction(5, tuple(rng.standard_normal(32)))
        s = find_separating_sign_vector(f, g, max_cells=16, n_random=200)
        if s.h is not None:
            assert float(pairing(s.h, f)) * float(pairing(s.h, g)) < 0

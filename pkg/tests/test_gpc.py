import itertools
import math

import numpy as np
import pytest

from chuq.gpc import (HermiteGaussian, LegendreUniform, evaluate_expansion,
                      moment_tensors, multivariate_eval, multivariate_indices,
                      multivariate_norm, multivariate_project, norm_factor,
                      poly_eval, project, projection_l2_error, quadrature)

HERMITE = HermiteGaussian(sigma=1.0, max_degree=8)
LEGENDRE = LegendreUniform(max_degree=8)


class TestPolyEval:
    def test_degree_zero_is_one(self):
        for family in (HERMITE, LEGENDRE, HermiteGaussian(sigma=0.3)):
            assert poly_eval(family, 0, 0.37) == 1.0

    def test_hermite_cubic(self):
        # z^3 - 3z at z = 2
        assert poly_eval(HERMITE, 3, 2.0) == pytest.approx(2.0, abs=1e-14)

    def test_hermite_scales_with_sigma(self):
        fam = HermiteGaussian(sigma=0.5)
        # second polynomial is z^2 - sigma^2
        assert poly_eval(fam, 2, 1.0) == pytest.approx(0.75, abs=1e-14)
        assert poly_eval(fam, 1, 0.37) == pytest.approx(0.37)

    def test_legendre_quadratic_at_one(self):
        # (3 z^2 - 1) / 2 at z = 1
        assert poly_eval(LEGENDRE, 2, 1.0) == pytest.approx(1.0, abs=1e-14)

    def test_degree_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            poly_eval(HermiteGaussian(max_degree=2), 3, 0.0)

    def test_array_evaluation(self):
        z = np.linspace(-2, 2, 7)
        np.testing.assert_allclose(poly_eval(HERMITE, 3, z), z ** 3 - 3 * z,
                                   atol=1e-13)


class TestNormFactor:
    def test_degree_zero_is_one(self):
        for family in (HERMITE, LEGENDRE):
            assert norm_factor(family, 0) == 1.0

    def test_legendre_linear(self):
        # uniform density on [-1, 1]: E[z^2] = 1/3
        assert norm_factor(LEGENDRE, 1) == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_hermite_quadratic_against_quadrature(self):
        # E[(z^2 - 1)^2] under N(0,1), checked with an independent Gauss rule
        z, w = quadrature(HERMITE, 12)
        oracle = float((w * (z ** 2 - 1.0) ** 2).sum())
        assert oracle == pytest.approx(2.0, rel=1e-13)
        assert norm_factor(HERMITE, 2) == 2.0

    def test_hermite_sigma_scaling(self):
        fam = HermiteGaussian(sigma=0.5)
        assert norm_factor(fam, 1) == pytest.approx(0.25, rel=1e-15)
        assert norm_factor(fam, 2) == pytest.approx(2 * 0.5 ** 4, rel=1e-15)


class TestQuadrature:
    def test_weights_sum_to_one(self):
        for family in (HERMITE, LEGENDRE):
            for m in (1, 2, 5, 19):
                _, w = quadrature(family, m)
                assert abs(w.sum() - 1.0) <= 1e-13

    def test_gaussian_second_moment_two_nodes(self):
        z, w = quadrature(HERMITE, 2)
        assert (w * z ** 2).sum() == pytest.approx(1.0, rel=1e-14)

    def test_gaussian_fourth_moment_three_nodes(self):
        z, w = quadrature(HERMITE, 3)
        assert (w * z ** 4).sum() == pytest.approx(3.0, rel=1e-13)

    def test_uniform_second_moment(self):
        z, w = quadrature(LEGENDRE, 2)
        assert (w * z ** 2).sum() == pytest.approx(1.0 / 3.0, rel=1e-14)

    def test_shifted_interval(self):
        fam = LegendreUniform(a=2.0, b=4.0)
        z, w = quadrature(fam, 4)
        assert (w * z).sum() == pytest.approx(3.0, rel=1e-14)

    def test_rejects_nonpositive_count(self):
        with pytest.raises(ValueError):
            quadrature(HERMITE, 0)


class TestOrthogonality:
    @pytest.mark.parametrize("family", [HERMITE, LEGENDRE,
                                        HermiteGaussian(sigma=0.5)],
                             ids=["hermite", "legendre", "hermite_half"])
    def test_pairwise(self, family):
        z, w = quadrature(family, 32)
        for m in range(9):
            pm = poly_eval(family, m, z)
            for n in range(m + 1, 9):
                inner = float((w * pm * poly_eval(family, n, z)).sum())
                assert abs(inner) <= 1e-12


class TestMomentTensors:
    def test_gaussian_unit_entries(self):
        t = moment_tensors(HERMITE, 1)
        assert t.e3[0, 0, 0] == pytest.approx(1.0, abs=1e-13)
        assert t.e3[1, 1, 0] == pytest.approx(1.0, abs=1e-13)
        assert t.e3[1, 1, 1] == pytest.approx(0.0, abs=1e-13)
        assert t.e4[1, 1, 1, 1] == pytest.approx(3.0, abs=1e-12)
        assert t.e4[1, 1, 0, 0] == pytest.approx(1.0, abs=1e-13)
        assert t.e4[0, 0, 0, 0] == pytest.approx(1.0, abs=1e-13)

    def test_sigma_scaling(self):
        t = moment_tensors(HermiteGaussian(sigma=0.5), 1)
        # E[Z^2] = sigma^2
        assert t.e3[1, 1, 0] == pytest.approx(0.25, abs=1e-14)

    def test_permutation_symmetry_exact(self):
        t = moment_tensors(HERMITE, 3)
        for perm in itertools.permutations(range(3)):
            assert np.array_equal(t.e3, t.e3.transpose(perm))
        for perm in itertools.permutations(range(4)):
            assert np.array_equal(t.e4, t.e4.transpose(perm))

    def test_pairings_with_constant_mode(self):
        # e_{ij0} = gamma_i * delta_ij since the zeroth polynomial is 1
        for family in (HERMITE, LEGENDRE):
            t = moment_tensors(family, 3)
            for i in range(4):
                for j in range(4):
                    expected = t.gamma[i] if i == j else 0.0
                    assert t.e3[i, j, 0] == pytest.approx(expected, abs=1e-12)

    def test_gamma_positive_and_matches_norms(self):
        for family in (HERMITE, LEGENDRE):
            t = moment_tensors(family, 4)
            assert (t.gamma > 0).all()
            for n in range(5):
                assert t.gamma[n] == pytest.approx(norm_factor(family, n),
                                                   rel=1e-12)


class TestProjection:
    def test_reproduces_polynomials(self):
        rng = np.random.default_rng(8)
        for family in (HERMITE, LEGENDRE):
            for order in (2, 4):
                coeffs_in = rng.uniform(-1, 1, order + 1)
                def f(z):
                    return sum(c * z ** k for k, c in enumerate(coeffs_in))
                proj = project(f, family, order)
                z, _ = quadrature(family, order + 3)
                recon = evaluate_expansion(family, proj, z)
                target = np.array([f(zi) for zi in z])
                assert np.abs(recon - target).max() <= 1e-12 * max(
                    1.0, np.abs(target).max())

    def test_identity_has_single_coefficient(self):
        proj = project(lambda z: z, HERMITE, 4)
        np.testing.assert_allclose(proj, [0, 1, 0, 0, 0], atol=1e-14)

    def test_exponential_error_decays_spectrally(self):
        errors = [projection_l2_error(math.exp, LEGENDRE, n) for n in (2, 4, 6, 8)]
        assert all(a > b for a, b in zip(errors, errors[1:]))
        assert errors[-1] <= 1e-6

    def test_hermite_exponential_decays_too(self):
        errors = [projection_l2_error(math.exp, HERMITE, n) for n in (2, 4, 6, 8)]
        assert all(a > b for a, b in zip(errors, errors[1:]))

    def test_best_approximation_property(self):
        # perturbing any projection coefficient cannot reduce the weighted error
        rng = np.random.default_rng(15)
        for family in (HERMITE, LEGENDRE):
            order = 3
            poly = rng.uniform(-1, 1, order + 3)  # degree order+2
            def f(z):
                return sum(c * z ** k for k, c in enumerate(poly))
            base = project(f, family, order)
            z, w = quadrature(family, 24)
            target = np.array([f(zi) for zi in z])

            def werr(coeffs):
                diff = target - evaluate_expansion(family, coeffs, z)
                return float((w * diff * diff).sum())

            err0 = werr(base)
            for k in range(order + 1):
                for bump in (0.01, -0.01):
                    coeffs = base.copy()
                    coeffs[k] += bump
                    assert werr(coeffs) >= err0

    def test_non_finite_function_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            project(lambda z: float("nan"), HERMITE, 2)


class TestMultivariate:
    def test_index_count(self):
        assert len(multivariate_indices(2, 3)) == math.comb(5, 2)
        assert len(multivariate_indices(3, 2)) == math.comb(5, 3)

    def test_eval_is_product(self):
        fams = (HERMITE, LEGENDRE)
        z = (0.7, -0.2)
        val = multivariate_eval(fams, (2, 1), z)
        assert val == pytest.approx(poly_eval(HERMITE, 2, 0.7)
                                    * poly_eval(LEGENDRE, 1, -0.2), rel=1e-14)

    def test_norm_is_product(self):
        fams = (HERMITE, LEGENDRE)
        assert multivariate_norm(fams, (2, 1)) == pytest.approx(
            norm_factor(HERMITE, 2) * norm_factor(LEGENDRE, 1), rel=1e-14)

    def test_projection_reproduces_bivariate_polynomial(self):
        fams = (HermiteGaussian(max_degree=4), LegendreUniform(max_degree=4))

        def f(z):
            return 1.5 + 0.5 * z[0] - z[1] + 0.25 * z[0] * z[1]

        indices, coeffs = multivariate_project(f, fams, 2)
        rng = np.random.default_rng(3)
        pts = rng.uniform(-1, 1, (20, 2))
        for pt in pts:
            recon = sum(c * multivariate_eval(fams, ix, pt)
                        for ix, c in zip(indices, coeffs))
            assert recon == pytest.approx(f(pt), abs=1e-12)

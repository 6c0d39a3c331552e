import numpy as np
import pytest

from chuq import (InpaintProblem, ScalarField, SolverConfig, SpectralPlan,
                  first_order_variance, ordering_ratio, perturbation_mean,
                  perturbation_step, run_inpaint, run_perturbation)
from chuq.field import dct2, idct2, implicit_symbol
from chuq.perturbation import PerturbationState, initial_state

from conftest import smooth_field, stripe_problem


def all_known_problem(f_values, lambda0=1.0, eps=1.0):
    f = ScalarField(f_values)
    return InpaintProblem(f=f, mask=ScalarField(np.ones(f_values.shape)),
                          lambda0=lambda0, eps=eps)


class TestState:
    def test_grids_must_match(self):
        with pytest.raises(ValueError, match="grid"):
            PerturbationState(ScalarField(np.zeros((8, 8))),
                              ScalarField(np.zeros((16, 16))), 0.1)

    def test_large_delta_warns(self):
        u = ScalarField(np.zeros((8, 8)))
        with pytest.warns(UserWarning, match="first-order"):
            PerturbationState(u, u, 0.5)

    def test_zero_delta_allowed_for_mean(self):
        u0 = ScalarField(smooth_field(8, seed=1))
        u1 = ScalarField(np.ones((8, 8)))
        state = PerturbationState(u0, u1, 0.0)
        np.testing.assert_array_equal(perturbation_mean(state).values, u0.values)


class TestPerturbationStep:
    def test_zero_first_order_stays_zero(self):
        problem = all_known_problem(smooth_field(16, seed=3))
        plan = SpectralPlan.for_field(problem.f)
        state = PerturbationState(problem.f,
                                  ScalarField(np.zeros((16, 16))), 0.1)
        for _ in range(5):
            state = perturbation_step(state, problem, SolverConfig(dt=0.1), plan)
            assert np.abs(state.u1.values).max() == 0.0

    def test_first_order_is_linear(self):
        problem = all_known_problem(smooth_field(16, seed=4))
        plan = SpectralPlan.for_field(problem.f)
        config = SolverConfig(dt=0.1)
        one = initial_state(problem, 0.05)
        double = PerturbationState(one.u0,
                                   ScalarField(2.0 * one.u1.values), 0.05)
        for _ in range(10):
            one = perturbation_step(one, problem, config, plan)
            double = perturbation_step(double, problem, config, plan)
        np.testing.assert_allclose(double.u1.values, 2.0 * one.u1.values,
                                   rtol=1e-12, atol=1e-12)

    def test_constant_well_has_closed_form_update(self):
        # u0 = f = 1 everywhere: W''(1) = 2 and the first-order update is
        # diagonal in transform space, so one step has an explicit formula
        n = 16
        problem = all_known_problem(np.ones((n, n)), lambda0=3.0, eps=0.5)
        plan = SpectralPlan.for_field(problem.f)
        dt = 0.2
        config = SolverConfig(dt=dt)
        rng = np.random.default_rng(5)
        u1 = rng.standard_normal((n, n))
        state = PerturbationState(problem.f, ScalarField(u1), 0.1)
        stepped = perturbation_step(state, problem, config, plan)

        eps, lam0 = problem.eps, problem.lambda0
        c1, c2 = 3.0 / eps, lam0
        ev = plan.eigenvalues
        sym = implicit_symbol(1.0 / dt, eps, c1, c2, plan)
        u1_hat = dct2(u1)
        factor = (1.0 / dt + (2.0 / eps) * ev - lam0 - c1 * ev + c2) / sym
        expected = idct2(factor * u1_hat)
        np.testing.assert_allclose(stepped.u1.values, expected,
                                   rtol=1e-12, atol=1e-12)


class TestRunPerturbation:
    def test_leading_order_is_bitwise_deterministic_run(self):
        problem = stripe_problem(n=32, width=8, hole=6, lambda0=1.0)
        config = SolverConfig(dt=0.1, max_steps=40, tol=0.0)
        state, _ = run_perturbation(problem, 0.05, config)
        u, _ = run_inpaint(problem, config)
        assert np.array_equal(state.u0.values, u.values)

    def test_mean_and_variance_formulas(self):
        u0 = ScalarField(smooth_field(8, seed=6))
        u1 = ScalarField(np.ones((8, 8)))
        state = PerturbationState(u0, u1, 0.2)
        np.testing.assert_allclose(perturbation_mean(state).values,
                                   u0.values + 0.1, rtol=1e-15)
        np.testing.assert_allclose(first_order_variance(state).values,
                                   0.2 ** 2 / 12.0, rtol=1e-15)

    def test_ordering_ratio(self):
        u0 = ScalarField(np.full((8, 8), 2.0))
        u1 = ScalarField(np.full((8, 8), 5.0))
        state = PerturbationState(u0, u1, 0.1)
        assert ordering_ratio(state) == pytest.approx(0.25)

    def test_mean_tracks_uniform_monte_carlo(self):
        from chuq import monte_carlo
        from chuq.uq import NoiseSpec

        problem = stripe_problem(n=32, width=8, hole=6, lambda0=1.0)
        config = SolverConfig(dt=0.01, max_steps=200, tol=0.0)
        delta = 0.01
        state, _ = run_perturbation(problem, delta, config)
        mc = monte_carlo(problem, NoiseSpec("uniform", delta), samples=200,
                         seed=77, config=config)
        err = np.abs(perturbation_mean(state).values - mc.mean.values)
        stderr = mc.stderr.values
        assert (err <= 3 * stderr + 1e-6).mean() >= 0.99

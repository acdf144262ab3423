"""Sampling controller: softmin weights, gain matrix, ensembles, control law."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairsir.costs import CostConfig, trajectory_cost
from fairsir.errors import ConfigurationError, NumericError
from fairsir.model import (
    ModelParams,
    TimeGrid,
    actuated_control_matrix,
    control_matrix,
    make_state,
    rollout_uncontrolled,
)
from fairsir.rng import generator
from fairsir.solver import (
    RolloutEnsemble,
    SolverConfig,
    _rollout_costs_reference,
    gain_matrix,
    pic_control,
    sample_ensemble,
    softmin_weights,
)


def three_group_params(sigma=0.1):
    return ModelParams(
        beta=np.diag([0.2, 0.2, 0.3]),
        gamma=np.full(3, 0.1),
        delta=np.array([0.03, 0.03, 0.05]),
        sigma_v=np.full(3, sigma),
        sigma_l=np.full(3, sigma),
    )


def solver_cfg(samples=64, lam=3.0, horizon=30.0, dt=1.0, **kw):
    return SolverConfig(
        samples=samples, lam=lam, grid=TimeGrid(horizon=horizon, dt=dt), **kw
    )


def cost_cfg(params, weights=(2.0, 1.0, 2.0 / 3.0), eta=0.0, lam=3.0):
    return CostConfig.from_model(np.array(weights), eta, lam, params)


def initial_state(j=3):
    return make_state([0.99] * j, [0.01] * j, [0.0] * j, [0.0] * j)


class TestSoftminWeights:
    def test_equal_costs_uniform(self):
        w = softmin_weights(np.full(8, 3.7), lam=0.5)
        assert np.all(w == w[0])
        np.testing.assert_allclose(w, 1.0 / 8.0)

    def test_two_sample_hand_value(self):
        lam = 0.7
        w = softmin_weights(np.array([0.0, lam * np.log(2.0)]), lam)
        np.testing.assert_allclose(w, [2.0 / 3.0, 1.0 / 3.0], atol=1e-12)

    def test_high_temperature_limit_is_uniform(self):
        costs = np.array([1.0, 5.0, 9.0])
        w = softmin_weights(costs, lam=1e9)
        np.testing.assert_allclose(w, 1.0 / 3.0, atol=1e-8)

    def test_low_temperature_concentrates_on_argmin(self):
        costs = np.array([4.0, 1.0, 9.0])
        w = softmin_weights(costs, lam=1e-4)
        np.testing.assert_allclose(w, [0.0, 1.0, 0.0], atol=1e-12)

    def test_low_temperature_splits_ties(self):
        costs = np.array([1.0, 7.0, 1.0, 3.0])
        w = softmin_weights(costs, lam=1e-6)
        np.testing.assert_allclose(w, [0.5, 0.0, 0.5, 0.0], atol=1e-12)

    def test_shift_invariance(self):
        rng = np.random.default_rng(7)
        costs = rng.uniform(0, 50, size=200)
        w1 = softmin_weights(costs, lam=2.0)
        w2 = softmin_weights(costs + 123.456, lam=2.0)
        assert np.max(np.abs(w1 - w2)) < 1e-12

    def test_huge_costs_do_not_overflow(self):
        w = softmin_weights(np.array([1e6, 1e6 + 1.0]), lam=0.01)
        assert np.isfinite(w).all() and np.isclose(w.sum(), 1.0)

    def test_non_finite_cost_rejected(self):
        with pytest.raises(NumericError):
            softmin_weights(np.array([1.0, np.nan]), lam=1.0)

    def test_decreasing_a_cost_increases_its_weight(self):
        w_before = softmin_weights(np.array([2.0, 3.0]), lam=1.0)
        w_after = softmin_weights(np.array([1.5, 3.0]), lam=1.0)
        assert w_after[0] > w_before[0]

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.floats(-100, 100), min_size=1, max_size=64),
        st.floats(1e-3, 1e3),
    )
    def test_weights_normalized(self, costs, lam):
        w = softmin_weights(np.array(costs), lam)
        assert abs(w.sum() - 1.0) < 1e-12
        assert np.all(w >= 0.0)


class TestGainMatrix:
    def test_single_group_hand_value(self):
        state = make_state([0.5], [0.2], [0.3], [0.0])
        np.testing.assert_allclose(gain_matrix(state), [[-2.0, 0.0], [0.0, -5.0]])

    def test_full_compartments_negated_identity(self):
        state = np.array([[1.0, 1.0, 0.0, 0.0]])
        np.testing.assert_array_equal(gain_matrix(state), -np.eye(2))

    def test_degenerate_infected_row_zeroed(self):
        state = make_state([0.5], [1e-9], [0.5 - 1e-9], [0.0])
        g = gain_matrix(state, epsilon_actuation=1e-6)
        assert g[1, 1] == 0.0 and g[0, 0] == -2.0

    def test_gain_identity_on_random_states(self):
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(100):
            raw = rng.uniform(0.05, 1.0, size=(3, 4))
            state = raw / raw.sum(axis=1, keepdims=True)
            gain = gain_matrix(state)
            g_c = actuated_control_matrix(state)
            worst = max(worst, np.abs(gain @ g_c - np.eye(6)).max())
        assert worst < 1e-10


class TestSampleEnsemble:
    def test_zero_noise_degenerates(self):
        params = three_group_params(sigma=0.0)
        scfg = solver_cfg(samples=16)
        ens = sample_ensemble(
            initial_state(), 0, scfg, cost_cfg(params), params, rng_root=11
        )
        assert np.all(ens.first_noise == 0.0)
        assert np.all(ens.costs == ens.costs[0])

    def test_single_sample(self):
        params = three_group_params()
        ens = sample_ensemble(
            initial_state(), 0, solver_cfg(samples=1), cost_cfg(params), params, 5
        )
        assert ens.costs.shape == (1,)
        assert softmin_weights(ens.costs, 1.0)[0] == 1.0

    def test_reproducible_for_fixed_root(self):
        params = three_group_params()
        scfg = solver_cfg(samples=100)
        a = sample_ensemble(initial_state(), 3, scfg, cost_cfg(params), params, 123)
        b = sample_ensemble(initial_state(), 3, scfg, cost_cfg(params), params, 123)
        np.testing.assert_array_equal(a.costs, b.costs)
        np.testing.assert_array_equal(a.first_noise, b.first_noise)

    def test_costs_match_single_trajectory_oracle(self):
        # replay each trajectory's noise through the plain single-trajectory
        # rollout and re-price it with trajectory_cost
        params = three_group_params()
        scfg = solver_cfg(samples=6, horizon=12.0)
        ccfg = cost_cfg(params, eta=0.05)
        start_step = 2
        ens = sample_ensemble(initial_state(), start_step, scfg, ccfg, params, 42)
        raw = generator(42).standard_normal(
            (scfg.grid.steps - start_step, scfg.samples, 3, 2)
        )
        sigma = params.sigma_channels()
        for m in range(scfg.samples):
            traj, first = rollout_uncontrolled(
                initial_state(), scfg.grid, start_step, raw[:, m] * sigma, params
            )
            np.testing.assert_allclose(first, ens.first_noise[m], atol=1e-15)
            np.testing.assert_allclose(
                trajectory_cost(traj, start_step, scfg.grid, ccfg),
                ens.costs[m],
                atol=1e-9,
            )

    def test_kernel_matches_reference_rollout(self):
        params = three_group_params()
        ccfg = cost_cfg(params, eta=0.08)
        scfg = solver_cfg(samples=40, horizon=25.0)
        state = initial_state()
        fast = sample_ensemble(state, 0, scfg, ccfg, params, 77)
        raw = generator(77).standard_normal((25, 40, 3, 2))
        slow = _rollout_costs_reference(state, raw, 1.0, params, ccfg)
        np.testing.assert_allclose(fast.costs, slow, atol=1e-13)

    def test_custom_unfairness_measure_goes_through_reference_path(self):
        params = three_group_params()
        spread = lambda s: (s[..., 1] + s[..., 3]).std(axis=-1)
        ccfg = CostConfig.from_model(
            np.array([2.0, 1.0, 2.0 / 3.0]), 0.05, 3.0, params, unfairness=spread
        )
        ens = sample_ensemble(initial_state(), 0, solver_cfg(samples=8, horizon=10.0), ccfg, params, 3)
        assert np.all(np.isfinite(ens.costs))

    def test_bad_start_step_rejected(self):
        params = three_group_params()
        with pytest.raises(ConfigurationError):
            sample_ensemble(
                initial_state(), 30, solver_cfg(horizon=30.0), cost_cfg(params), params, 1
            )

    def test_non_finite_costs_rejected_in_ensemble(self):
        with pytest.raises(NumericError):
            RolloutEnsemble(
                costs=np.array([1.0, np.inf]), first_noise=np.zeros((2, 1, 2))
            )


class TestPicControl:
    def test_zero_noise_gives_zero_control(self):
        params = three_group_params(sigma=0.0)
        u = pic_control(
            initial_state(), 0, solver_cfg(samples=32), cost_cfg(params), params, 9
        )
        np.testing.assert_array_equal(u, np.zeros((3, 2)))

    def test_consistency_with_weighted_noise_average(self):
        # away from degenerate compartments the gain cancels the actuated
        # matrix, so the control must equal the weighted first-step noise
        # average over sqrt(dt)
        params = three_group_params()
        scfg = solver_cfg(samples=50, horizon=20.0)
        ccfg = cost_cfg(params, eta=0.02)
        state = initial_state()
        u = pic_control(state, 0, scfg, ccfg, params, 31)
        ens = sample_ensemble(state, 0, scfg, ccfg, params, 31)
        w = softmin_weights(ens.costs, scfg.lam)
        expected = np.einsum("m,mjc->jc", w, ens.first_noise) / np.sqrt(scfg.grid.dt)
        np.testing.assert_allclose(u, expected, atol=1e-12)

    def test_two_sample_hand_example(self):
        # weights (2/3, 1/3) from the softmin example combined with two draws
        lam = 0.5
        weights = softmin_weights(np.array([0.0, lam * np.log(2.0)]), lam)
        eps = np.array([[[0.01, 0.0]], [[-0.02, 0.01]]])  # (M=2, J=1, 2)
        u = np.einsum("m,mjc->jc", weights, eps) / np.sqrt(1.0)
        np.testing.assert_allclose(u, [[0.0, 0.0033333333333333335]], atol=1e-12)

    def test_reproducible_and_deterministic(self):
        params = three_group_params()
        scfg = solver_cfg(samples=64)
        args = (initial_state(), 4, scfg, cost_cfg(params), params, 2024)
        np.testing.assert_array_equal(pic_control(*args), pic_control(*args))

    def test_degenerate_compartment_channel_silenced(self):
        params = three_group_params()
        state = make_state(
            [0.9, 0.9, 0.9], [0.05, 1e-9, 0.05], [0.05, 0.1 - 1e-9, 0.05], [0.0, 0.0, 0.0]
        )
        u = pic_control(state, 0, solver_cfg(samples=32), cost_cfg(params), params, 3)
        assert u[1, 1] == 0.0  # no one to lock down in group 1

    def test_u_max_clamps_into_box(self):
        params = three_group_params()
        scfg = solver_cfg(samples=32, u_max=1e-4)
        u = pic_control(initial_state(), 0, scfg, cost_cfg(params), params, 17)
        assert np.all(u >= 0.0) and np.all(u <= 1e-4)

    def test_zero_cost_control_shrinks_with_samples(self):
        # with q = psi = 0 the weights are uniform and the control is the
        # mean of M draws: its size must drop roughly like 1/sqrt(M)
        params = three_group_params()
        ccfg = cost_cfg(params, weights=(0.0, 0.0, 0.0), eta=0.0)
        sizes = {}
        for m in (16, 1024):
            us = [
                pic_control(initial_state(), 0, solver_cfg(samples=m, horizon=10.0), ccfg, params, seed)
                for seed in range(40)
            ]
            sizes[m] = np.mean([np.abs(u).max() for u in us])
        assert sizes[1024] < sizes[16] / 3.0


class TestPseudoInverseEquivalence:
    """The printed gain uses the S/I/R rows of the control matrix with a
    Moore-Penrose inverse; the reduced square form must give the same control."""

    @staticmethod
    def full_row_gain(state, r_diag):
        j = state.shape[0]
        rows = [4 * g + c for g in range(j) for c in (0, 1, 2)]
        g3 = control_matrix(state)[rows]  # (3J, 2J)
        r_inv = np.diag(1.0 / r_diag)
        middle = np.linalg.pinv(g3 @ r_inv @ g3.T)
        return r_inv @ g3.T @ middle, g3

    def test_matches_reduced_formulation_on_random_states(self):
        rng = np.random.default_rng(12)
        worst = 0.0
        for _ in range(100):
            raw = rng.uniform(0.05, 1.0, size=(3, 4))
            state = raw / raw.sum(axis=1, keepdims=True)
            r_diag = rng.uniform(0.5, 500.0, size=6)
            eps_avg = rng.normal(0.0, 0.1, size=6)
            gain3, g3 = self.full_row_gain(state, r_diag)
            u_full = gain3 @ (g3 @ eps_avg)
            g_c = actuated_control_matrix(state)
            u_reduced = gain_matrix(state) @ (g_c @ eps_avg)
            worst = max(worst, np.abs(u_full - u_reduced).max())
        assert worst < 1e-8

import logging

import numpy as np
import pytest

from deeprff.linalg import assemble_design_x
from deeprff.metropolis import (
    MetropolisConfig, acceptance_ratio, arfm_augmented_train,
    arfm_residual_train, arfm_train, default_gamma, default_step)
from deeprff.testcases import NumericTestCase


def test_defaults_for_dimension():
    assert default_gamma(3) == 7
    assert default_step(2) == pytest.approx(1.44)
    cfg = MetropolisConfig.for_dimension(3, nodes=4, iterations=10)
    assert cfg.gamma == 7
    assert cfg.step == pytest.approx(0.96)


def test_steps_from_sampling_time():
    assert MetropolisConfig(2, sampling_time=2.0, step=1.0).steps == 2
    assert MetropolisConfig(2, sampling_time=0.3, step=0.1).steps == 30
    assert MetropolisConfig(2, iterations=0).steps == 0


@pytest.mark.parametrize('kwargs', [
    {'nodes': 0, 'iterations': 1},
    {'nodes': 1, 'iterations': 1, 'gamma': 0.0},
    {'nodes': 1, 'iterations': 1, 'tikhonov': -0.1},
    {'nodes': 1, 'iterations': 1, 'refresh': 0},
    {'nodes': 1, 'iterations': -1},
    {'nodes': 1},
    {'nodes': 1, 'sampling_time': 0.5, 'step': 1.0},
    {'nodes': 1, 'sampling_time': 1.0, 'step': 0.0},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        MetropolisConfig(**kwargs)


def test_replace_keeps_other_fields():
    cfg = MetropolisConfig(3, iterations=5, gamma=2.0, seed=4)
    other = cfg.replace(nodes=6)
    assert (other.nodes, other.iterations, other.gamma, other.seed) == \
        (6, 5, 2.0, 4)


def test_acceptance_ratio_conventions():
    ratio = acceptance_ratio([2.0, 1.0, 0.0, 3j], [1.0, 0.0, 0.0, 1.0], 2.0)
    np.testing.assert_allclose(ratio, [4.0, np.inf, 0.0, 9.0])


def reference_chain(inputs, targets, k, iterations, step, gamma, tikhonov,
                    seed):
    """Plain loop version of the sampler with normal-equation solves."""
    rng = np.random.default_rng(seed)
    n = len(targets)

    def solve(omega):
        design = assemble_design_x(inputs, omega)
        gram = design.T @ design / n + tikhonov * np.eye(2 * k)
        coef = np.linalg.solve(gram, design.T @ targets / n)
        return coef[0::2] + 1j * coef[1::2]

    omega = np.zeros((k, inputs.shape[1]))
    amp = solve(omega)
    for _ in range(iterations):
        proposal = omega + step * rng.standard_normal(omega.shape)
        proposed = solve(proposal)
        uniforms = rng.random(k)
        for j in range(k):
            if abs(amp[j]) == 0:
                ratio = np.inf if abs(proposed[j]) > 0 else 0.0
            else:
                ratio = (abs(proposed[j]) / abs(amp[j])) ** gamma
            if ratio > uniforms[j]:
                omega[j] = proposal[j]
                amp[j] = proposed[j]
        amp = solve(omega)
    return omega, amp


class TestSampler(NumericTestCase):
    def test_matches_reference_loop(self):
        train, _ = self.make_data(n=3, d=1)
        cfg = MetropolisConfig(1, iterations=12, step=0.8, gamma=2.0,
                               tikhonov=1.1, seed=5)
        layer = arfm_train(train, cfg)
        omega, amp = reference_chain(train.inputs, train.targets, 1, 12, 0.8,
                                     2.0, 1.1, 5)
        self.assert_allclose(layer.freq_x, omega, rtol=1e-10)
        self.assert_allclose(layer.amp_x, amp, rtol=1e-8)

    def test_matches_reference_loop_with_several_nodes(self):
        train, _ = self.make_data(n=30, d=2)
        cfg = MetropolisConfig(4, iterations=20, step=0.7, gamma=4.0,
                               tikhonov=0.5, seed=11)
        layer = arfm_train(train, cfg)
        omega, amp = reference_chain(train.inputs, train.targets, 4, 20, 0.7,
                                     4.0, 0.5, 11)
        self.assert_allclose(layer.freq_x, omega, rtol=1e-10)
        self.assert_allclose(layer.amp_x, amp, rtol=1e-8, atol=1e-12)

    def test_amplitudes_solve_final_ridge_problem(self):
        train, _ = self.make_data(n=50, d=2)
        cfg = MetropolisConfig(5, iterations=15, step=0.5, gamma=3.0,
                               tikhonov=0.1, seed=2)
        layer = arfm_train(train, cfg)
        design = assemble_design_x(train.inputs, layer.freq_x)
        coef = np.empty(10)
        coef[0::2], coef[1::2] = layer.amp_x.real, layer.amp_x.imag
        residual = design @ coef - train.targets
        gradient = design.T @ residual / len(train) + 0.1 * coef
        self.assert_allclose(gradient, 0.0, atol=1e-12)

    def test_zero_step_keeps_frequencies_at_zero(self):
        train, _ = self.make_data(n=20, d=2)
        start = arfm_train(train, MetropolisConfig(3, iterations=0))
        moved = arfm_train(train, MetropolisConfig(3, iterations=6, step=0.0))
        assert not np.any(moved.freq_x)
        assert moved == start

    def test_zero_targets_give_zero_layer(self):
        train, _ = self.make_data(n=20, d=2)
        zero = train.__class__(train.inputs, np.zeros(20), train.norm_stats)
        layer, stats = arfm_train(
            zero, MetropolisConfig(3, iterations=8, step=0.5), with_stats=True)
        self.assert_allclose(layer.amp_x, 0.0, atol=1e-15)
        assert not np.any(layer.freq_x)
        assert stats.acceptance_rate == 0.0

    def test_same_seed_same_layer(self):
        train, _ = self.make_data(n=25, d=2)
        cfg = MetropolisConfig(4, iterations=10, step=0.5, seed=9)
        assert arfm_train(train, cfg) == arfm_train(train, cfg)
        assert arfm_train(train, cfg) != arfm_train(train, cfg.replace(seed=10))

    def test_chain_statistics(self):
        train, _ = self.make_data(n=25, d=2)
        _, stats = arfm_train(
            train, MetropolisConfig(4, iterations=10, step=0.5),
            with_stats=True)
        assert stats.proposals == 10
        assert stats.accepted.shape == (4,)
        assert 0.0 <= stats.acceptance_rate <= 1.0

    def test_refresh_interval(self):
        train, _ = self.make_data(n=25, d=2)
        cfg = MetropolisConfig(3, iterations=9, step=0.5, refresh=3)
        layer = arfm_train(train, cfg)
        assert layer.nodes == 3

    def test_underdetermined_warning(self):
        train, _ = self.make_data(n=4, d=1)
        with self.assertLogs('deeprff.metropolis', logging.WARNING):
            arfm_train(train, MetropolisConfig(3, iterations=1))

    def test_residual_block(self):
        train, _ = self.make_data(n=30, d=2)
        states = self.rng.standard_normal(30)
        residuals = self.rng.standard_normal(30)
        cfg = MetropolisConfig(3, iterations=5, step=0.5, seed=1)
        layer = arfm_residual_train(train, residuals, states, cfg, 42)
        self.assert_allclose(layer.freq_z,
                             np.random.default_rng(42).standard_normal(3))
        assert layer.amp_z.shape == (3,)
        assert layer.freq_x.shape == (3, 2)
        with pytest.raises(ValueError):
            arfm_residual_train(train, residuals[:5], states, cfg, 42)

    def test_augmented_block(self):
        train, _ = self.make_data(n=30, d=2)
        states = self.rng.standard_normal(30)
        cfg = MetropolisConfig(3, iterations=5, step=0.5)
        layer = arfm_augmented_train(train, train.targets, states, cfg)
        assert layer.augmented
        assert layer.freq_x.shape == (3, 3)
        assert layer.freq_z.shape == (0,)

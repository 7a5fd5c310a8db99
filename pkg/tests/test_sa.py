import math

import numpy as np
import pytest

from annealmem import IsingProblem, ProbeSpec, build_problem, ground_set, hebbian_learn
from annealmem.oracle import all_states
from annealmem.sa import SASchedule, chain_state_counts, sa_sample
from conftest import random_memory_set


class TestSASchedule:
    def test_validation(self):
        with pytest.raises(ValueError):
            SASchedule(t_initial=-1.0)
        with pytest.raises(ValueError):
            SASchedule(t_initial=1.0, t_final=2.0)
        with pytest.raises(ValueError):
            SASchedule(sweeps=0)
        with pytest.raises(ValueError):
            SASchedule(interpolation="exponential")

    def test_geometric_betas_monotone(self):
        betas = SASchedule(10.0, 0.1, 50, "geometric").betas()
        assert betas[0] == pytest.approx(0.1)
        assert betas[-1] == pytest.approx(10.0)
        assert np.all(np.diff(betas) > 0)

    def test_linear_betas(self):
        betas = SASchedule(2.0, 1.0, 3, "linear").betas()
        assert np.allclose(betas, [0.5, 1 / 1.5, 1.0])

    def test_infinite_temperature_constant(self):
        betas = SASchedule(math.inf, math.inf, 4).betas()
        assert np.all(betas == 0.0)
        with pytest.raises(ValueError):
            SASchedule(math.inf, 1.0, 4)


class TestSASample:
    def test_convex_landscape(self):
        problem = IsingProblem(np.zeros((10, 10)), np.ones(10))
        result = sa_sample(problem, SASchedule(sweeps=200), restarts=8, seed=0)
        assert np.all(result.best_state == 1)
        assert result.best_energy == pytest.approx(-10.0)

    def test_reference_instance_matches_oracle(self, weights16, probe16, memories16):
        problem = build_problem(weights16, probe16)
        result = sa_sample(problem, SASchedule(sweeps=1000), restarts=100, seed=42)
        assert np.array_equal(result.best_state, memories16[2])
        assert result.best_energy == ground_set(problem).energy

    def test_infinite_temperature_accepts_everything(self):
        rng = np.random.default_rng(0)
        j = rng.normal(size=(8, 8))
        j = (j + j.T) / 2
        np.fill_diagonal(j, 0.0)
        problem = IsingProblem(j, rng.normal(size=8))
        result = sa_sample(problem, SASchedule(math.inf, math.inf, 1), restarts=50, seed=1)
        assert result.acceptance_rate == pytest.approx(1.0, abs=0.01)

    def test_deterministic_under_seed(self, weights16, probe16):
        problem = build_problem(weights16, probe16)
        a = sa_sample(problem, SASchedule(sweeps=50), restarts=10, seed=7)
        b = sa_sample(problem, SASchedule(sweeps=50), restarts=10, seed=7)
        assert a.counts == b.counts
        assert np.array_equal(a.restart_states, b.restart_states)

    def test_best_monotone_in_restarts(self, weights16, probe16):
        problem = build_problem(weights16, probe16)
        result = sa_sample(problem, SASchedule(sweeps=100), restarts=30, seed=5)
        running = np.minimum.accumulate(result.restart_energies)
        assert np.all(np.diff(running) <= 0)
        assert running[-1] == result.best_energy

    def test_counts_sum_to_restarts(self, weights16, probe16):
        problem = build_problem(weights16, probe16)
        result = sa_sample(problem, SASchedule(sweeps=100), restarts=25, seed=3)
        assert sum(result.counts.values()) == 25

    @pytest.mark.parametrize("seed", range(6))
    def test_random_small_instances_reach_oracle_floor(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(6, 13))
        mem = random_memory_set(rng, int(rng.integers(1, 4)), n)
        w = hebbian_learn(mem)
        pattern = (rng.integers(0, 2, size=n) * 2 - 1).astype(np.int8)
        problem = build_problem(w, ProbeSpec(pattern, float(rng.uniform(0.0, 0.5))))
        result = sa_sample(problem, SASchedule(sweeps=300), restarts=30, seed=seed)
        assert result.best_energy == pytest.approx(ground_set(problem).energy, abs=1e-9)


class TestDetailedBalance:
    def test_two_spin_boltzmann(self):
        problem = IsingProblem(np.array([[0.0, 0.7], [0.7, 0.0]]), np.array([0.3, -0.2]))
        beta = 1.1
        counts = chain_state_counts(problem, beta, sweeps=400_000, seed=2, burn_in=1000)
        emp = counts / counts.sum()
        energies = problem.energies(all_states(2))
        boltz = np.exp(-beta * energies)
        boltz /= boltz.sum()
        tv = 0.5 * np.abs(emp - boltz).sum()
        assert tv < 0.02

import numpy as np
import pytest
import scipy.linalg

from annealmem import (
    IsingProblem,
    MemorySet,
    ProbeSpec,
    build_problem,
    ground_set,
    h_max_generic,
    hebbian_learn,
)
from annealmem.oracle import CapExceededError, all_states
from annealmem.quantum import (
    AnnealSchedule,
    _transverse_field_matrix,
    evolve,
    gap_profile,
    load_schedule_table,
    min_gap,
    sample,
)
from conftest import CHI, XI1, XI2, XI3


def dense_reference_evolve(problem, schedule, steps):
    """Independent propagator: dense matrix exponential per midpoint step."""
    n = problem.n
    hi = _transverse_field_matrix(n)
    diag = problem.energies(all_states(n))
    dt = schedule.t_anneal / steps
    psi = np.full(1 << n, 1.0 / np.sqrt(1 << n), dtype=complex)
    for k in range(steps):
        s = (k + 0.5) / steps
        h = float(schedule.a(s)) * hi + np.diag(float(schedule.b(s)) * diag)
        psi = scipy.linalg.expm(-1j * dt * h) @ psi
    return np.abs(psi) ** 2


@pytest.fixture(scope="module")
def ferro2():
    """N=2 single memory (+,+), probe (+,+) at h=0.25; unique gapped ground state."""
    mem = MemorySet.from_vectors([[1, 1]])
    problem = build_problem(hebbian_learn(mem), ProbeSpec([1, 1], 0.25))
    return mem, problem


class TestAnnealSchedule:
    def test_linear_endpoints(self):
        sched = AnnealSchedule.linear(10.0)
        assert sched.a(0.0) == 1.0 and sched.a(1.0) == 0.0
        assert sched.b(0.0) == 0.0 and sched.b(1.0) == 1.0

    def test_monotonicity_enforced(self):
        with pytest.raises(ValueError, match="non-increasing"):
            AnnealSchedule(np.array([[0.0, 0.5], [1.0, 1.0]]),
                           np.array([[0.0, 0.0], [1.0, 1.0]]), 1.0)
        with pytest.raises(ValueError, match="non-decreasing"):
            AnnealSchedule(np.array([[0.0, 1.0], [1.0, 0.0]]),
                           np.array([[0.0, 1.0], [1.0, 0.0]]), 1.0)

    def test_from_tables_normalizes(self):
        sched = AnnealSchedule.from_tables(
            [[0.0, 4.0], [0.5, 1.0], [1.0, 0.0]],
            [[0.0, 0.0], [1.0, 30.0]],
            5.0,
        )
        assert sched.a(0.0) == 1.0
        assert sched.b(1.0) == 1.0
        assert sched.a(0.5) == pytest.approx(0.25)

    def test_from_tables_requires_vanishing_a(self):
        with pytest.raises(ValueError, match="A\\(1\\)"):
            AnnealSchedule.from_tables([[0.0, 1.0], [1.0, 0.5]],
                                       [[0.0, 0.0], [1.0, 1.0]], 1.0)

    def test_schedule_file_round_trip(self, tmp_path):
        path = tmp_path / "a.txt"
        path.write_text("# control\n0.0 1.0\n0.5 0.4\n1.0 0.0\n")
        table = load_schedule_table(path)
        assert table.shape == (3, 2)
        with pytest.raises(ValueError, match="two columns"):
            bad = tmp_path / "bad.txt"
            bad.write_text("0.0 1.0 7\n1.0 0.0\n")
            load_schedule_table(bad)


class TestEvolve:
    def test_pure_transverse_field_stays_uniform(self):
        # B == 0: the uniform state is stationary, outcomes stay at 2^-N
        problem = IsingProblem(np.zeros((4, 4)), np.zeros(4))
        frozen = AnnealSchedule(np.array([[0.0, 1.0], [1.0, 1.0]]),
                                np.array([[0.0, 0.0], [1.0, 0.0]]), 7.0)
        result = evolve(problem, frozen, 200)
        assert np.allclose(result.probabilities, 1 / 16, atol=1e-9)

    def test_two_spin_adiabatic_recall(self, ferro2):
        mem, problem = ferro2
        result = evolve(problem, AnnealSchedule.linear(1000.0), 4000)
        assert result.success_probability(np.array([1, 1])) >= 0.99
        assert result.norm_drift < 1e-8

    def test_matches_dense_reference(self, ferro2):
        _, problem = ferro2
        sched = AnnealSchedule.linear(20.0)
        ref = dense_reference_evolve(problem, sched, 2000)
        result = evolve(problem, sched, 2000)
        assert np.abs(ref - result.probabilities).max() < 1e-6

    def test_truncated_reference_instance_matches_oracle(self):
        # restrict the 16-spin instance to its last 8 sites (the first 8 make
        # two memories coincide) and anneal slowly: modal outcome must equal
        # the exact ground state even though the truncated set is far from
        # orthogonal
        window = slice(8, 16)
        mem = MemorySet.from_vectors([x[window] for x in (XI1, XI2, XI3)])
        weights = hebbian_learn(mem)
        chi = CHI[window]
        dists = [int(np.count_nonzero(chi != m)) for m in mem]
        nearest = int(np.argmin(dists))
        bound = h_max_generic(weights, ProbeSpec(chi, 0.0), mem[nearest])
        problem = build_problem(weights, ProbeSpec(chi, 0.5 * bound))
        exact = ground_set(problem)
        assert exact.states.shape[0] == 1
        result = evolve(problem, AnnealSchedule.linear(300.0), 3000)
        assert np.array_equal(result.modal_state(), exact.states[0])
        assert result.success_probability(exact.states[0]) > 0.99

    def test_zero_field_flip_symmetry(self):
        window = slice(0, 8)
        mem = MemorySet.from_vectors([XI2[window], XI3[window]])
        problem = build_problem(hebbian_learn(mem), ProbeSpec(CHI[window], 0.0))
        result = evolve(problem, AnnealSchedule.linear(30.0), 600)
        probs = result.probabilities
        assert np.abs(probs - probs[::-1]).max() < 1e-6  # complement has mirrored index

    def test_final_energy_above_oracle_floor(self, ferro2):
        _, problem = ferro2
        result = evolve(problem, AnnealSchedule.linear(10.0), 200)
        assert result.expected_problem_energy(problem) >= ground_set(problem).energy - 1e-9

    def test_cap(self):
        problem = IsingProblem(np.zeros((13, 13)), np.zeros(13))
        with pytest.raises(CapExceededError):
            evolve(problem, AnnealSchedule.linear(1.0), 10)


class TestMinGap:
    def test_zero_field_degenerate_at_end(self):
        mem = MemorySet.from_vectors([XI1[:8], XI3[:8]])  # orthogonal 8-site pair
        problem = build_problem(hebbian_learn(mem), ProbeSpec(CHI[:8], 0.0))
        _, gaps = gap_profile(problem, AnnealSchedule.linear(1.0), 5)
        assert gaps[-1] == pytest.approx(0.0, abs=1e-9)
        gap, _ = min_gap(problem, AnnealSchedule.linear(1.0), 5)
        assert gap == pytest.approx(0.0, abs=1e-9)

    def test_two_spin_ferromagnet_gap_positive(self):
        problem = IsingProblem(np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([0.1, 0.1]))
        s_values, gaps = gap_profile(problem, AnnealSchedule.linear(1.0), 51)
        assert np.all(gaps > 0)

    def test_gap_at_start_is_twice_a0(self, ferro2):
        _, problem = ferro2
        _, gaps = gap_profile(problem, AnnealSchedule.linear(1.0), 3)
        assert gaps[0] == pytest.approx(2.0, abs=1e-9)

    def test_cap(self):
        problem = IsingProblem(np.zeros((9, 9)), np.zeros(9))
        with pytest.raises(CapExceededError):
            min_gap(problem, AnnealSchedule.linear(1.0), 3)


class TestSample:
    def test_concentrated_distribution(self):
        result = type("R", (), {})()
        probs = np.zeros(8)
        probs[5] = 1.0
        from annealmem.quantum import AnnealResult

        result = AnnealResult(probs, 3, 1, 0.0)
        counts = sample(result, 50, seed=0)
        assert counts == {5: 50}

    def test_uniform_frequencies(self):
        from annealmem.quantum import AnnealResult

        result = AnnealResult(np.full(4, 0.25), 2, 1, 0.0)
        counts = sample(result, 100_000, seed=1)
        for i in range(4):
            assert counts[i] / 100_000 == pytest.approx(0.25, abs=0.01)

    def test_seed_determinism(self, ferro2):
        _, problem = ferro2
        result = evolve(problem, AnnealSchedule.linear(5.0), 100)
        assert sample(result, 1000, seed=9) == sample(result, 1000, seed=9)
        assert sample(result, 1000, seed=9) != sample(result, 1000, seed=10)

    def test_probabilities_sum_to_one(self, ferro2):
        _, problem = ferro2
        result = evolve(problem, AnnealSchedule.linear(5.0), 100)
        assert abs(result.probabilities.sum() - 1.0) < 1e-8

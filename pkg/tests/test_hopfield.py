import numpy as np
import pytest

from annealmem import (
    MemorySet,
    classical_update,
    energy,
    format_spin_string,
    hamming,
    hebbian_learn,
    parse_spin_string,
    spin_vector,
)
from conftest import CHI, XI1, XI2, XI3, random_memory_set, random_orthogonal_set


def hebbian_reference(memories: MemorySet) -> np.ndarray:
    """Independent double-loop evaluation of the learning rule."""
    n, p = memories.n, memories.p
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            w[i, j] = sum(memories[mu][i] * memories[mu][j] for mu in range(p)) / n
    return w


class TestSpinVector:
    def test_validates_entries(self):
        with pytest.raises(ValueError):
            spin_vector([1, 0, -1])
        with pytest.raises(ValueError):
            spin_vector([])

    def test_read_only(self):
        v = spin_vector([1, -1])
        with pytest.raises(ValueError):
            v[0] = -1

    def test_parse_both_alphabets(self):
        assert np.array_equal(parse_spin_string("+-+"), [1, -1, 1])
        assert np.array_equal(parse_spin_string("101"), [1, -1, 1])
        with pytest.raises(ValueError):
            parse_spin_string("+x-")

    def test_format_round_trip(self):
        s = "+--+-+"
        assert format_spin_string(parse_spin_string(s)) == s


class TestMemorySet:
    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicate"):
            MemorySet.from_vectors([[1, 1, -1, 1], [1, 1, -1, 1]])

    def test_rejects_unequal_lengths(self):
        with pytest.raises(ValueError):
            MemorySet.from_vectors([[1, 1], [1, -1, 1]])

    def test_text_format(self, tmp_path):
        text = """
        # stored patterns
        ++++----   # first
        10101010
        """
        mem = MemorySet.from_text(text)
        assert mem.p == 2 and mem.n == 8
        assert np.array_equal(mem[0], [1, 1, 1, 1, -1, -1, -1, -1])
        assert np.array_equal(mem[1], [1, -1, 1, -1, 1, -1, 1, -1])
        path = tmp_path / "mem.txt"
        mem.dump(path)
        again = MemorySet.load(path)
        assert np.array_equal(mem.memories, again.memories)

    def test_bad_line_reported(self):
        with pytest.raises(ValueError, match="line 2"):
            MemorySet.from_text("++--\n+z--\n")


class TestHamming:
    def test_identity_is_zero(self):
        assert hamming(XI1, XI1) == 0

    def test_reference_distances(self):
        assert [hamming(CHI, xi) for xi in (XI1, XI2, XI3)] == [10, 8, 2]

    def test_global_flip_is_n(self):
        assert hamming(CHI, -CHI) == CHI.size

    def test_mask(self):
        assert hamming(CHI, XI3, mask=(0, 15)) == 2
        assert hamming(CHI, XI3, mask=range(1, 15)) == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            hamming(XI1, XI1[:8])


class TestHebbianLearn:
    def test_reference_coupling_range(self, weights16):
        off = np.abs(weights16[~np.eye(16, dtype=bool)])
        assert off.max() == pytest.approx(3 / 16, abs=0)
        assert off.min() == pytest.approx(1 / 16, abs=0)

    def test_single_memory(self):
        xi = parse_spin_string("+-+-+---")
        w = hebbian_learn(MemorySet.from_vectors([xi]))
        expected = np.outer(xi, xi) / 8.0
        np.fill_diagonal(expected, 0.0)
        assert np.array_equal(w, expected)

    def test_hand_example_p2_n4(self):
        mem = MemorySet.from_vectors([[1, 1, 1, 1], [1, 1, -1, -1]])
        w = hebbian_learn(mem)
        assert w[0, 1] == 0.5
        assert w[0, 2] == 0.0
        assert np.array_equal(w, hebbian_reference(mem))

    @pytest.mark.parametrize("seed", range(5))
    def test_symmetric_zero_diagonal_multiples(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 20))
        mem = random_memory_set(rng, int(rng.integers(1, 6)), n)
        w = hebbian_learn(mem)
        assert np.array_equal(w, w.T)
        assert np.all(np.diag(w) == 0)
        # every entry an integer multiple of 1/N
        assert np.allclose(np.round(w * n), w * n, atol=1e-12)
        assert np.allclose(w, hebbian_reference(mem), atol=1e-15)


class TestEnergy:
    def test_zero_weights_zero_biases(self):
        assert energy(np.zeros((4, 4)), None, [1, -1, 1, 1]) == 0.0

    def test_reference_memory_energy(self, weights16):
        # (N - p)/2 = 6.5 for orthogonal memories
        assert energy(weights16, None, XI1) == pytest.approx(-6.5, abs=1e-12)
        assert energy(weights16, None, XI2) == pytest.approx(-6.5, abs=1e-12)

    def test_reference_probe_energy(self, weights16):
        # (1/2) * ((1/N) * sum (N - 2d)^2 - p) with d = (10, 8, 2)
        assert energy(weights16, None, CHI) == pytest.approx(-3.5, abs=1e-12)

    def test_global_flip_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(2, 12))
            w = rng.normal(size=(n, n))
            w = (w + w.T) / 2
            np.fill_diagonal(w, 0.0)
            s = rng.integers(0, 2, size=n) * 2 - 1
            assert energy(w, None, s) == pytest.approx(energy(w, None, -s), rel=1e-12)

    def test_dimension_mismatch(self, weights16):
        with pytest.raises(ValueError):
            energy(weights16, None, XI1[:8])
        with pytest.raises(ValueError):
            energy(weights16, np.zeros(8), XI1)


class TestClassicalUpdate:
    def test_memory_is_fixed_point(self):
        rng = np.random.default_rng(11)
        for seed in range(5):
            mem = random_orthogonal_set(np.random.default_rng(seed), 3, 16)
            w = hebbian_learn(mem)
            for mu in range(mem.p):
                # (W xi)_i = ((N - p)/N) xi_i, sign-aligned: one quiet sweep
                drive = w @ mem[mu]
                assert np.all(np.sign(drive) == mem[mu])
                state, sweeps, converged = classical_update(w, None, mem[mu], seed=int(rng.integers(1 << 30)))
                assert converged and sweeps == 1
                assert np.array_equal(state, mem[mu])

    def test_negative_biases_decouple(self):
        w = np.zeros((6, 6))
        theta = -np.ones(6)
        state, sweeps, converged = classical_update(w, theta, [-1, 1, -1, 1, -1, -1], seed=0)
        assert converged
        assert np.all(state == 1)

    def test_reference_probe_descends(self, weights16):
        e0 = energy(weights16, None, CHI)
        state, _, converged = classical_update(weights16, None, CHI, seed=5)
        assert converged
        assert energy(weights16, None, state) <= e0

    @pytest.mark.parametrize("seed", range(4))
    def test_energy_never_increases_per_flip(self, seed):
        # replay the dynamics manually, asserting monotonicity per accepted flip
        rng = np.random.default_rng(seed)
        n = 10
        mem = random_memory_set(rng, 3, n)
        w = hebbian_learn(mem)
        s = (rng.integers(0, 2, size=n) * 2 - 1).astype(np.int8)
        replay_rng = np.random.default_rng(seed + 100)
        e = energy(w, None, s)
        for _ in range(30):
            for i in replay_rng.permutation(n):
                local = float(w[i] @ s)
                new = s[i]
                if local > 0:
                    new = 1
                elif local < 0:
                    new = -1
                if new != s[i]:
                    s[i] = new
                    e_new = energy(w, None, s)
                    assert e_new < e + 1e-12
                    e = e_new

    def test_sign_zero_keeps_spin(self):
        # zero weights, zero biases: every local field is 0, nothing may move
        start = np.array([1, -1, 1, -1], dtype=np.int8)
        state, sweeps, converged = classical_update(np.zeros((4, 4)), None, start, seed=1)
        assert converged and sweeps == 1
        assert np.array_equal(state, start)

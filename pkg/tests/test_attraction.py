import numpy as np
import pytest

from annealmem import MemorySet, ProbeSpec, hamming
from annealmem.attraction import basin_check, radius_bound, verify_basin_exhaustive
from conftest import CHI, random_memory_set, random_orthogonal_set


class TestRadiusBound:
    def test_reference_values(self):
        assert radius_bound(16) == 7   # even: (N - 2)/2
        assert radius_bound(17) == 8   # odd: (N - 1)/2
        assert radius_bound(2) == 0

    def test_parity_formulas(self):
        for n in range(2, 40):
            expected = (n - 2) // 2 if n % 2 == 0 else (n - 1) // 2
            assert radius_bound(n) == expected

    def test_domain(self):
        with pytest.raises(ValueError):
            radius_bound(1)


class TestBasinCheck:
    def test_reference_instance(self, memories16, probe16):
        report = basin_check(memories16, probe16)
        assert (report.d_s, report.d_b, report.n) == (2, 10, 16)
        assert report.condition_holds  # 12 <= 15
        assert report.d_of_n == 8      # orthogonal: pairwise distance N/2
        assert report.chain_holds      # 8 <= 12 <= 15
        assert report.nearest_index == 2
        assert not report.nearest_tied

    def test_probe_on_memory_with_complement_stored(self):
        xi = np.array([1, -1, 1, 1, -1, 1, 1, -1])
        mem = MemorySet.from_vectors([xi, -xi])
        report = basin_check(mem, ProbeSpec(xi, 0.0))
        assert report.d_s == 0 and report.d_b == 8
        assert not report.condition_holds  # d_s + d_b = n > n - 1

    def test_single_memory(self):
        xi = np.array([1, 1, -1, 1, -1, 1])
        mem = MemorySet.from_vectors([xi])
        for flips in range(0, 6):
            pattern = xi.copy()
            pattern[:flips] *= -1
            report = basin_check(mem, ProbeSpec(pattern, 0.0))
            assert report.d_s == report.d_b == flips
            assert report.condition_holds == (2 * flips <= 5)

    @pytest.mark.parametrize("seed", range(10))
    def test_chain_lower_bound_two_memories(self, seed):
        # d(n) <= d_s + d_b is a triangle-inequality theorem for p = 2
        # (for p >= 3 the nearest pair need not involve the nearest memory)
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 16))
        mem = random_memory_set(rng, 2, n)
        pattern = (rng.integers(0, 2, size=n) * 2 - 1).astype(np.int8)
        report = basin_check(mem, ProbeSpec(pattern, 0.0))
        assert report.d_of_n <= report.d_s + report.d_b

    @pytest.mark.parametrize("seed", range(10))
    def test_condition_implies_radius(self, seed):
        # condition + d_s <= d_b forces d_s <= floor((n-1)/2) = radius_bound(n)
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(4, 16))
        mem = random_memory_set(rng, int(rng.integers(1, 4)), n)
        pattern = (rng.integers(0, 2, size=n) * 2 - 1).astype(np.int8)
        report = basin_check(mem, ProbeSpec(pattern, 0.0))
        if report.condition_holds:
            assert report.d_s <= radius_bound(report.n)

    def test_masked_distances(self, memories16):
        probe = ProbeSpec(CHI, 0.0, mask=tuple(range(8)))
        report = basin_check(memories16, probe)
        assert report.n == 8
        expected = [hamming(CHI, m, mask=range(8)) for m in memories16]
        assert report.d_s == min(expected)
        assert report.d_b == max(expected)


class TestVerifyBasinExhaustive:
    def test_orthogonal_pair_radius_one(self):
        rng = np.random.default_rng(2)
        mem = random_orthogonal_set(rng, 2, 8)
        result = verify_basin_exhaustive(mem, max_d=1)
        assert result.probes_tested > 0
        assert result.all_recalled

    def test_memories_themselves(self, memories16):
        result = verify_basin_exhaustive(memories16, max_d=0)
        assert result.probes_tested == 3
        assert result.all_recalled

    def test_explicit_h_honored(self):
        rng = np.random.default_rng(3)
        mem = random_orthogonal_set(rng, 2, 8)
        result = verify_basin_exhaustive(mem, h=0.05, max_d=1)
        assert result.all_recalled
        # an over-bound h is skipped rather than tested, except at the
        # memories themselves where the bound is vacuous and any h works
        result_hot = verify_basin_exhaustive(mem, h=50.0, max_d=1)
        assert result_hot.probes_tested == 2
        assert result_hot.no_valid_h > 0
        assert result_hot.all_recalled

    def test_constructed_violation_appears_in_failures(self):
        # orthogonal pair at distance 4; flipping two agreement sites of the
        # first memory gives distances (2, 6): d_s + d_b = n, so the nearest
        # memory ties the far memory's flip and recall must fail
        xi1 = np.ones(8, dtype=np.int8)
        xi2 = np.array([1, 1, 1, 1, -1, -1, -1, -1], dtype=np.int8)
        mem = MemorySet.from_vectors([xi1, xi2])
        result = verify_basin_exhaustive(mem, max_d=2, condition_filter=False)
        violating = [f for f in result.failures if f.d_s + f.d_b == 8]
        assert violating
        assert all(f.classification in ("spurious", "degenerate-mixed") for f in violating)
        # the same probes are filtered out (not failures) under the condition
        filtered = verify_basin_exhaustive(mem, max_d=2)
        assert filtered.all_recalled
        assert filtered.condition_skipped >= len(violating)

    def test_ties_reported_separately(self):
        # equidistant probes need an even memory-pair distance: flipping two
        # of the four divergence sites lands at (2, 2)
        xi1 = np.ones(8, dtype=np.int8)
        xi2 = np.array([1, 1, 1, 1, -1, -1, -1, -1], dtype=np.int8)
        mem = MemorySet.from_vectors([xi1, xi2])
        result = verify_basin_exhaustive(mem, max_d=2)
        assert result.ties_skipped
        for probe in result.ties_skipped:
            d = [hamming(probe, m) for m in mem]
            assert d[0] == d[1]

    def test_workers_match_serial(self):
        rng = np.random.default_rng(4)
        mem = random_orthogonal_set(rng, 2, 8)
        serial = verify_basin_exhaustive(mem, max_d=2)
        threaded = verify_basin_exhaustive(mem, max_d=2, workers=4)
        assert serial.probes_tested == threaded.probes_tested
        assert len(serial.failures) == len(threaded.failures)

    def test_failures_csv(self, tmp_path):
        xi1 = np.ones(8, dtype=np.int8)
        xi2 = np.array([1, 1, 1, 1, -1, -1, -1, -1], dtype=np.int8)
        mem = MemorySet.from_vectors([xi1, xi2])
        result = verify_basin_exhaustive(mem, max_d=2, condition_filter=False)
        path = tmp_path / "failures.csv"
        result.failures_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "probe,d_s,d_b,h,classification"
        assert len(lines) == 1 + len(result.failures)

"""Shared fixtures: the reference 16-spin instance and random-set helpers."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg

from annealmem import MemorySet, ProbeSpec, hebbian_learn

XI1 = np.array([1] * 16, dtype=np.int8)
XI2 = np.array([1] * 8 + [-1] * 8, dtype=np.int8)
XI3 = np.array([1] * 4 + [-1] * 8 + [1] * 4, dtype=np.int8)
CHI = np.array([-1, 1, 1, 1, -1, -1, -1, -1, -1, -1, -1, -1, 1, 1, 1, -1], dtype=np.int8)


@pytest.fixture(scope="session")
def memories16() -> MemorySet:
    """Three mutually orthogonal N=16 memories (distances 10, 8, 2 to the probe)."""
    return MemorySet.from_vectors([XI1, XI2, XI3])


@pytest.fixture(scope="session")
def weights16(memories16) -> np.ndarray:
    return hebbian_learn(memories16)


@pytest.fixture
def probe16():
    """Probe at distances (10, 8, 2); h defaults to 0.5, override via .with_h()."""
    return ProbeSpec(CHI, 0.5)


def random_memory_set(rng: np.random.Generator, p: int, n: int) -> MemorySet:
    """Random balanced memories; redraws on duplicate rows."""
    while True:
        m = rng.integers(0, 2, size=(p, n)) * 2 - 1
        try:
            return MemorySet(m.astype(np.int8))
        except ValueError:
            continue


def random_orthogonal_set(rng: np.random.Generator, p: int, n: int) -> MemorySet:
    """Mutually orthogonal +-1 memories from gauged, permuted Hadamard rows.

    Column sign flips and permutations preserve all pairwise dot products, so
    any p distinct rows remain mutually orthogonal.
    """
    had = scipy.linalg.hadamard(n)
    rows = rng.choice(n, size=p, replace=False)
    gauge = rng.integers(0, 2, size=n) * 2 - 1
    perm = rng.permutation(n)
    m = (had[rows] * gauge)[:, perm]
    return MemorySet(m.astype(np.int8))

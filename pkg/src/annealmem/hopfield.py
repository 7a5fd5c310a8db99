"""Spin-vector primitives, Hebbian learning and classical Hopfield dynamics.

Spins are numpy arrays with entries in {-1, +1}.  A network of N spins learns
a set of p patterns through the Hebbian rule

    W[i][j] = (1/N) * sum_mu  xi^mu_i * xi^mu_j      (i != j, zero diagonal)

and assigns each configuration S the energy

    E(S) = - sum_{i<j} W[i][j] S_i S_j - sum_i theta_i S_i.

Sign conventions: the asynchronous update rule is S_i <- Sign(W_i . S - theta_i)
with Sign(0) resolved as "keep the current spin".  With zero thresholds (the
only case the recall pipeline uses) accepted flips strictly lower E.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "spin_vector",
    "parse_spin_string",
    "format_spin_string",
    "random_spins",
    "MemorySet",
    "hamming",
    "hebbian_learn",
    "energy",
    "classical_update",
    "UpdateResult",
]

# '1'/'0' input maps onto +/- spins; internally everything is +-1.
_CHAR_TO_SPIN = {"+": 1, "1": 1, "-": -1, "0": -1}
_SPIN_TO_CHAR = {1: "+", -1: "-"}


def spin_vector(values: Iterable[int] | np.ndarray) -> np.ndarray:
    """Validate a spin configuration and return it as a read-only int8 array."""
    arr = np.asarray(values)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("a spin vector must be a non-empty 1-d sequence")
    if not np.all(np.abs(arr) == 1):
        raise ValueError("spin entries must be -1 or +1")
    out = arr.astype(np.int8)
    out.setflags(write=False)
    return out


def parse_spin_string(text: str) -> np.ndarray:
    """Parse a pattern string of '+'/'-' or '1'/'0' characters (mixing allowed)."""
    spins = []
    for ch in text.strip():
        try:
            spins.append(_CHAR_TO_SPIN[ch])
        except KeyError:
            raise ValueError(f"invalid spin character {ch!r}") from None
    if not spins:
        raise ValueError("empty pattern string")
    return spin_vector(spins)


def format_spin_string(spins: np.ndarray) -> str:
    """Render spins as a '+'/'-' string (inverse of :func:`parse_spin_string`)."""
    return "".join(_SPIN_TO_CHAR[int(s)] for s in spins)


def random_spins(n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n i.i.d. balanced +-1 spins."""
    return spin_vector(rng.integers(0, 2, size=n) * 2 - 1)


@dataclass(frozen=True)
class MemorySet:
    """An ordered set of p equal-length patterns to be stored.

    Duplicate patterns are rejected: they silently distort capacity
    experiments (the learned weights double-count the pattern while the
    recall statistics treat it as one memory).
    """

    memories: np.ndarray  # (p, N) int8

    def __post_init__(self):
        arr = np.asarray(self.memories)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("memories must form a non-empty (p, N) array")
        if not np.all(np.abs(arr) == 1):
            raise ValueError("memory entries must be -1 or +1")
        arr = arr.astype(np.int8)
        if np.unique(arr, axis=0).shape[0] != arr.shape[0]:
            raise ValueError("duplicate memories are not allowed")
        arr.setflags(write=False)
        object.__setattr__(self, "memories", arr)

    @property
    def p(self) -> int:
        return self.memories.shape[0]

    @property
    def n(self) -> int:
        return self.memories.shape[1]

    def __iter__(self):
        return iter(self.memories)

    def __getitem__(self, idx: int) -> np.ndarray:
        return self.memories[idx]

    @classmethod
    def from_vectors(cls, vectors: Iterable[Iterable[int]]) -> "MemorySet":
        rows = [spin_vector(v) for v in vectors]
        if len({r.size for r in rows}) > 1:
            raise ValueError("all memories must have equal length")
        return cls(np.stack(rows))

    @classmethod
    def from_text(cls, text: str) -> "MemorySet":
        """Parse the memory-set text format.

        One pattern per line in '+'/'-' or '1'/'0' characters, no separators.
        '#' starts a comment; blank lines are ignored.
        """
        rows = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                rows.append(parse_spin_string(line))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        if not rows:
            raise ValueError("no patterns found")
        if len({r.size for r in rows}) > 1:
            raise ValueError("all memories must have equal length")
        return cls(np.stack(rows))

    @classmethod
    def load(cls, path: str | Path) -> "MemorySet":
        return cls.from_text(Path(path).read_text())

    def dump(self, path: str | Path) -> None:
        lines = [format_spin_string(m) for m in self.memories]
        Path(path).write_text("\n".join(lines) + "\n")


def hamming(a: np.ndarray, b: np.ndarray, mask: Iterable[int] | None = None) -> int:
    """Hamming distance between two spin vectors, optionally on a site subset."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    if mask is None:
        return int(np.count_nonzero(a != b))
    idx = np.asarray(sorted(mask), dtype=int)
    if idx.size == 0:
        raise ValueError("mask must be non-empty")
    if idx.min() < 0 or idx.max() >= a.size:
        raise ValueError("mask indices out of range")
    return int(np.count_nonzero(a[idx] != b[idx]))


def hebbian_learn(memories: MemorySet) -> np.ndarray:
    """Hebbian weight matrix of a memory set.

    Entries are integer multiples of 1/N, so for power-of-two N they are
    exactly representable in double precision.
    """
    m = memories.memories.astype(np.int64)
    w = (m.T @ m).astype(np.float64) / memories.n
    np.fill_diagonal(w, 0.0)
    return w


def _check_square(weights: np.ndarray, n: int) -> None:
    if weights.shape != (n, n):
        raise ValueError(f"weight matrix shape {weights.shape} does not match state length {n}")


def energy(weights: np.ndarray, biases: np.ndarray | None, state: np.ndarray) -> float:
    """Configuration energy  -sum_{i<j} W_ij S_i S_j - sum_i theta_i S_i.

    Evaluated literally over the upper triangle; batch code paths elsewhere
    use an algebraically equivalent quadratic form, so this doubles as an
    independent spot-check route.
    """
    s = np.asarray(state, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    _check_square(weights, s.size)
    e = -float(s @ np.triu(weights, 1) @ s)
    if biases is not None:
        biases = np.asarray(biases, dtype=np.float64)
        if biases.shape != s.shape:
            raise ValueError("bias vector length does not match state length")
        e -= float(biases @ s)
    return e


class UpdateResult(NamedTuple):
    state: np.ndarray
    sweeps: int
    converged: bool


def classical_update(
    weights: np.ndarray,
    biases: np.ndarray | None,
    state: np.ndarray,
    seed: int,
    max_sweeps: int = 100,
) -> UpdateResult:
    """Asynchronous threshold dynamics until a sweep produces no flips.

    Each sweep visits all sites in a fresh seeded-random permutation and sets
    S_i <- Sign(sum_j W_ij S_j - theta_i), keeping the current spin when the
    local field is exactly zero (makes fixed points idempotent and avoids
    the 2-cycles synchronous updates can fall into).
    """
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be >= 1")
    s = np.asarray(state, dtype=np.int8).copy()
    w = np.asarray(weights, dtype=np.float64)
    _check_square(w, s.size)
    theta = np.zeros(s.size) if biases is None else np.asarray(biases, dtype=np.float64)
    if theta.shape != (s.size,):
        raise ValueError("bias vector length does not match state length")
    rng = np.random.default_rng(seed)
    for sweep in range(1, max_sweeps + 1):
        flipped = False
        for i in rng.permutation(s.size):
            local = float(w[i] @ s) - theta[i]
            if local > 0 and s[i] < 0:
                s[i] = 1
                flipped = True
            elif local < 0 and s[i] > 0:
                s[i] = -1
                flipped = True
        if not flipped:
            s.setflags(write=False)
            return UpdateResult(s, sweep, True)
    s.setflags(write=False)
    return UpdateResult(s, max_sweeps, False)

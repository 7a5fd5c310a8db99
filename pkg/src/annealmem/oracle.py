"""Exhaustive ground-truth solver over the full 2^N configuration space.

Enumerates every spin configuration in lexicographic order (-1 sorts before
+1, site 0 is the most significant position), evaluates energies in
vectorized blocks and returns the exact ground set, i.e. every state within a
tie tolerance of the minimum.  Recall outcomes are then classified against
the stored memory set.

Hebbian energies are integer multiples of 1/(2N) plus multiples of the field
strength, so true degeneracies are exact and the default tie tolerance of
1e-9 cleanly separates them from floating-point noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hopfield import MemorySet
from .ising import IsingProblem, ProbeSpec

__all__ = [
    "ORACLE_MAX_SPINS",
    "CapExceededError",
    "GroundSet",
    "RecallOutcome",
    "UNIQUE_MEMORY",
    "DEGENERATE_MIXED",
    "SPURIOUS",
    "PROBE_OVERBIAS",
    "index_to_spins",
    "spins_to_index",
    "all_states",
    "ground_set",
    "classify_recall",
]

ORACLE_MAX_SPINS = 24

UNIQUE_MEMORY = "unique-memory"
DEGENERATE_MIXED = "degenerate-mixed"
SPURIOUS = "spurious"
PROBE_OVERBIAS = "probe-overbias"


class CapExceededError(ValueError):
    """A solver was asked for a problem size beyond its hard cap."""


def index_to_spins(index: int, n: int) -> np.ndarray:
    """Spin configuration of an enumeration index (site 0 = most significant bit)."""
    bits = (index >> np.arange(n - 1, -1, -1)) & 1
    return (2 * bits - 1).astype(np.int8)


def spins_to_index(spins: np.ndarray) -> int:
    """Inverse of :func:`index_to_spins`; works for any N via Python integers."""
    out = 0
    for s in np.asarray(spins):
        out = (out << 1) | (1 if s > 0 else 0)
    return out


def all_states(n: int, offset: int = 0, count: int | None = None) -> np.ndarray:
    """Block of spin configurations for indices offset..offset+count, in order."""
    if count is None:
        count = 1 << n
    idx = np.arange(offset, offset + count, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return (2 * bits - 1).astype(np.int8)


@dataclass(frozen=True)
class GroundSet:
    """Exact minimum energy and every state within tie_tol of it."""

    energy: float
    states: np.ndarray  # (k, N) int8, lexicographic order
    total_enumerated: int
    tie_tol: float

    @property
    def degenerate(self) -> bool:
        return self.states.shape[0] > 1

    def contains(self, state: np.ndarray) -> bool:
        state = np.asarray(state, dtype=np.int8)
        return bool(np.any(np.all(self.states == state[None, :], axis=1)))


@dataclass(frozen=True)
class RecallOutcome:
    """Ground set classified against a memory set and probe.

    classification is one of UNIQUE_MEMORY (ground set is exactly one stored
    memory), PROBE_OVERBIAS (the probe pattern itself reached the ground set
    without being a memory), SPURIOUS (some non-memory state present) or
    DEGENERATE_MIXED (several memories tie).  memory_index identifies the
    recalled memory for UNIQUE_MEMORY outcomes.
    """

    classification: str
    ground: GroundSet
    memory_index: int | None = None

    @property
    def success(self) -> bool:
        return self.classification == UNIQUE_MEMORY


def ground_set(problem: IsingProblem, tie_tol: float = 1e-9, block_bits: int = 16) -> GroundSet:
    """Enumerate all 2^N configurations and return the exact ground set."""
    n = problem.n
    if n > ORACLE_MAX_SPINS:
        raise CapExceededError(
            f"exhaustive enumeration capped at N <= {ORACLE_MAX_SPINS}, got N = {n}"
        )
    if tie_tol < 0:
        raise ValueError("tie_tol must be >= 0")
    total = 1 << n
    block = 1 << min(n, block_bits)
    best = np.inf
    kept_states: list[np.ndarray] = []
    kept_energies: list[np.ndarray] = []
    for offset in range(0, total, block):
        states = all_states(n, offset, block)
        energies = problem.energies(states)
        bmin = float(energies.min())
        if bmin < best:
            best = bmin
        mask = energies <= best + tie_tol
        if np.any(mask):
            kept_states.append(states[mask])
            kept_energies.append(energies[mask])
    states = np.concatenate(kept_states)
    energies = np.concatenate(kept_energies)
    final = energies <= best + tie_tol
    out = states[final].copy()
    out.setflags(write=False)
    return GroundSet(energy=best, states=out, total_enumerated=total, tie_tol=tie_tol)


def classify_recall(ground: GroundSet, memories: MemorySet, probe: ProbeSpec) -> RecallOutcome:
    """Classify a ground set as a recall outcome against the stored memories."""
    is_memory = np.zeros(ground.states.shape[0], dtype=bool)
    memory_of = np.full(ground.states.shape[0], -1, dtype=int)
    for mu, mem in enumerate(memories):
        match = np.all(ground.states == mem[None, :], axis=1)
        is_memory |= match
        memory_of[match] = mu
    if ground.states.shape[0] == 1 and is_memory[0]:
        return RecallOutcome(UNIQUE_MEMORY, ground, int(memory_of[0]))
    probe_present = ground.contains(probe.pattern)
    probe_is_memory = any(
        np.array_equal(probe.pattern, mem) for mem in memories
    )
    if probe_present and not probe_is_memory:
        return RecallOutcome(PROBE_OVERBIAS, ground)
    if not np.all(is_memory):
        return RecallOutcome(SPURIOUS, ground)
    return RecallOutcome(DEGENERATE_MIXED, ground)

"""Classical simulated annealing (single-flip Metropolis) on Ising problems.

A scalable recall engine for sizes beyond the quantum simulator's reach and
for embedded hardware-graph problems.  Each restart runs an independent
Metropolis chain from a random configuration under a cooling schedule,
visiting sites in a fresh seeded-random permutation every sweep (the same
asynchronous convention the classical Hopfield dynamics use), and reports its
best-found state.  Restart r uses RNG seed ``seed + r``, so runs are
reproducible and restarts are independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import math

import numpy as np
from numba import njit

from .ising import IsingProblem
from .oracle import spins_to_index

__all__ = ["SASchedule", "SAResult", "sa_sample", "chain_state_counts"]


@dataclass(frozen=True)
class SASchedule:
    """Cooling schedule: initial/final temperature, sweep count, interpolation."""

    t_initial: float = 10.0
    t_final: float = 0.05
    sweeps: int = 1000
    interpolation: str = "geometric"

    def __post_init__(self):
        if not (self.t_initial > 0 and self.t_final > 0):
            raise ValueError("temperatures must be positive")
        if self.t_final > self.t_initial:
            raise ValueError("final temperature must not exceed the initial one")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.interpolation not in ("geometric", "linear"):
            raise ValueError("interpolation must be 'geometric' or 'linear'")
        if math.isinf(self.t_initial) != math.isinf(self.t_final):
            raise ValueError("infinite temperature is only supported as a constant schedule")

    def betas(self) -> np.ndarray:
        """Inverse temperatures per sweep (beta = 0 for infinite temperature)."""
        if self.sweeps == 1 or self.t_initial == self.t_final:
            temps = np.full(self.sweeps, self.t_initial)
        elif self.interpolation == "geometric":
            temps = self.t_initial * (self.t_final / self.t_initial) ** (
                np.arange(self.sweeps) / (self.sweeps - 1)
            )
        else:
            temps = np.linspace(self.t_initial, self.t_final, self.sweeps)
        with np.errstate(divide="ignore"):
            return np.where(np.isinf(temps), 0.0, 1.0 / temps)


@njit(cache=True)
def _metropolis_restart(j, h, betas, seed):  # pragma: no cover - compiled
    np.random.seed(seed)
    n = h.size
    s = np.empty(n, np.float64)
    for i in range(n):
        s[i] = 1.0 if np.random.random() < 0.5 else -1.0
    e = 0.0
    for i in range(n):
        acc = h[i]
        for k in range(i + 1, n):
            acc += j[i, k] * s[k]
        e -= s[i] * acc
    best = s.copy()
    best_e = e
    accepted = 0
    for t in range(betas.size):
        beta = betas[t]
        perm = np.random.permutation(n)
        for p in range(n):
            i = perm[p]
            local = h[i]
            for k in range(n):
                local += j[i, k] * s[k]
            delta = 2.0 * s[i] * local
            if delta <= 0.0 or np.random.random() < np.exp(-beta * delta):
                s[i] = -s[i]
                e += delta
                accepted += 1
                if e < best_e:
                    best_e = e
                    best[:] = s
    return best, accepted


@njit(cache=True)
def _chain_counts(j, h, beta, sweeps, burn_in, seed):  # pragma: no cover - compiled
    np.random.seed(seed)
    n = h.size
    s = np.empty(n, np.float64)
    for i in range(n):
        s[i] = 1.0 if np.random.random() < 0.5 else -1.0
    counts = np.zeros(1 << n, np.int64)
    for t in range(sweeps):
        perm = np.random.permutation(n)
        for p in range(n):
            i = perm[p]
            local = h[i]
            for k in range(n):
                local += j[i, k] * s[k]
            delta = 2.0 * s[i] * local
            if delta <= 0.0 or np.random.random() < np.exp(-beta * delta):
                s[i] = -s[i]
        if t >= burn_in:
            idx = 0
            for i in range(n):
                idx = (idx << 1) | (1 if s[i] > 0 else 0)
            counts[idx] += 1
    return counts


@dataclass
class SAResult:
    """Best state over all restarts plus per-restart outcomes.

    ``counts`` aggregates each restart's best-found state (one returned sample
    per anneal), keyed by enumeration index.
    """

    best_state: np.ndarray
    best_energy: float
    counts: dict = field(repr=False)
    restart_states: np.ndarray = field(repr=False)
    restart_energies: np.ndarray = field(repr=False)
    acceptance_rate: float = 0.0

    @property
    def restarts(self) -> int:
        return self.restart_energies.size


def sa_sample(
    problem: IsingProblem,
    schedule: SASchedule | None = None,
    restarts: int = 100,
    seed: int = 0,
) -> SAResult:
    """Run independent annealing restarts and aggregate best-found states."""
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    schedule = schedule or SASchedule()
    betas = schedule.betas()
    j = np.ascontiguousarray(problem.couplings, dtype=np.float64)
    h = np.ascontiguousarray(problem.fields, dtype=np.float64)
    states = np.empty((restarts, problem.n), dtype=np.int8)
    accepted = 0
    for r in range(restarts):
        s, acc = _metropolis_restart(j, h, betas, seed + r)
        states[r] = s.astype(np.int8)
        accepted += acc
    # recompute energies exactly from the final states (the kernel accumulates
    # deltas, which is fine for search but drifts at the 1e-12 level)
    energies = problem.energies(states)
    best_r = int(np.argmin(energies))
    best = states[best_r].copy()
    best.setflags(write=False)
    counts: dict[int, int] = {}
    for r in range(restarts):
        key = spins_to_index(states[r])
        counts[key] = counts.get(key, 0) + 1
    attempts = restarts * schedule.sweeps * problem.n
    return SAResult(
        best_state=best,
        best_energy=float(energies[best_r]),
        counts=counts,
        restart_states=states,
        restart_energies=energies,
        acceptance_rate=accepted / attempts,
    )


def chain_state_counts(
    problem: IsingProblem,
    beta: float,
    sweeps: int,
    seed: int = 0,
    burn_in: int = 0,
) -> np.ndarray:
    """Visit counts per state of one fixed-temperature chain (one per sweep).

    Diagnostic for equilibrium checks: the long-run distribution should match
    the Boltzmann weights exp(-beta * E).  Capped at N <= 20 (dense counts).
    """
    if problem.n > 20:
        raise ValueError("chain_state_counts is capped at N <= 20")
    if beta < 0:
        raise ValueError("beta must be >= 0")
    j = np.ascontiguousarray(problem.couplings, dtype=np.float64)
    h = np.ascontiguousarray(problem.fields, dtype=np.float64)
    return _chain_counts(j, h, float(beta), int(sweeps), int(burn_in), int(seed))

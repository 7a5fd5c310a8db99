"""Closed-system quantum annealing on the full 2^N state space.

The time-dependent Hamiltonian

    H(s) = A(s) * H_I + B(s) * H_P,      H_I = -sum_i sigma^x_i,

is driven from the transverse-field ground state (the uniform superposition)
at s = 0 to the diagonal problem Hamiltonian H_P at s = 1.  H_P is never
materialized as a matrix: its diagonal is the classical energy functional
evaluated on all configurations, and H_I acts as N single-site bit flips.

The propagator is a Strang splitting with the Hamiltonian frozen at the step
midpoint:

    U(dt) ~ X(A dt/2) * exp(-i dt B E) * X(A dt/2)

where X(theta) applies exp(+i theta sigma^x) on every site.  Both factors are
exactly unitary, so norm is preserved to rounding error, and the splitting is
second-order accurate in the step size.  Durations are in units of inverse
energy of the dimensionless H(s); no attempt is made to map physical
microseconds.

Thermal noise is not modeled: recall success stays near 1 down to arbitrarily
small positive field strengths, unlike open-system hardware where weak probe
fields drown in thermal excitation.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .ising import IsingProblem
from .oracle import CapExceededError, all_states, spins_to_index

__all__ = [
    "EVOLVE_MAX_SPINS",
    "GAP_MAX_SPINS",
    "AnnealSchedule",
    "load_schedule_table",
    "AnnealResult",
    "evolve",
    "gap_profile",
    "min_gap",
    "sample",
]

EVOLVE_MAX_SPINS = 12
GAP_MAX_SPINS = 8


def _check_table(table: np.ndarray, name: str) -> np.ndarray:
    t = np.asarray(table, dtype=np.float64)
    if t.ndim != 2 or t.shape[1] != 2 or t.shape[0] < 2:
        raise ValueError(f"{name} table must be a (k>=2, 2) array of (s, value) rows")
    s = t[:, 0]
    if s[0] != 0.0 or s[-1] != 1.0 or np.any(np.diff(s) <= 0):
        raise ValueError(f"{name} table must have strictly increasing s covering [0, 1]")
    return t


@dataclass(frozen=True)
class AnnealSchedule:
    """Monotone control tables A(s), B(s) over s in [0, 1] plus a duration.

    Interpolation is piecewise linear.  A must be non-increasing and B
    non-decreasing; :meth:`from_tables` additionally normalizes user-supplied
    curves to A(0) = 1 and B(1) = 1.
    """

    a_table: np.ndarray
    b_table: np.ndarray
    t_anneal: float

    def __post_init__(self):
        a = _check_table(self.a_table, "A")
        b = _check_table(self.b_table, "B")
        if np.any(np.diff(a[:, 1]) > 0):
            raise ValueError("A(s) must be monotone non-increasing")
        if np.any(np.diff(b[:, 1]) < 0):
            raise ValueError("B(s) must be monotone non-decreasing")
        if self.t_anneal <= 0:
            raise ValueError("t_anneal must be positive")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a_table", a)
        object.__setattr__(self, "b_table", b)

    def a(self, s) -> np.ndarray | float:
        return np.interp(s, self.a_table[:, 0], self.a_table[:, 1])

    def b(self, s) -> np.ndarray | float:
        return np.interp(s, self.b_table[:, 0], self.b_table[:, 1])

    @classmethod
    def linear(cls, t_anneal: float) -> "AnnealSchedule":
        """The default schedule A(s) = 1 - s, B(s) = s."""
        return cls(np.array([[0.0, 1.0], [1.0, 0.0]]),
                   np.array([[0.0, 0.0], [1.0, 1.0]]), t_anneal)

    @classmethod
    def from_tables(cls, a_table, b_table, t_anneal: float) -> "AnnealSchedule":
        """Build a schedule from user tables, normalizing A(0) -> 1, B(1) -> 1."""
        a = _check_table(np.asarray(a_table), "A")
        b = _check_table(np.asarray(b_table), "B")
        if a[0, 1] <= 0:
            raise ValueError("A(0) must be positive")
        if abs(a[-1, 1]) > 1e-12 * a[0, 1]:
            raise ValueError("A(1) must be zero")
        if b[-1, 1] <= 0:
            raise ValueError("B(1) must be positive")
        a = a.copy()
        b = b.copy()
        a[:, 1] /= a[0, 1]
        a[-1, 1] = 0.0
        b[:, 1] /= b[-1, 1]
        return cls(a, b, t_anneal)


def load_schedule_table(path: str | Path) -> np.ndarray:
    """Read one two-column (s, value) control table; '#' comments allowed."""
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}: line {lineno}: expected two columns")
        rows.append((float(parts[0]), float(parts[1])))
    table = np.asarray(rows, dtype=np.float64)
    return _check_table(table, str(path))


@dataclass(frozen=True)
class AnnealResult:
    """Final computational-basis distribution of one annealing run."""

    probabilities: np.ndarray  # (2^N,), index order matches oracle enumeration
    n: int
    steps: int
    norm_drift: float

    def success_probability(self, target: np.ndarray) -> float:
        """Probability of measuring a target spin configuration."""
        return float(self.probabilities[spins_to_index(target)])

    def modal_state(self) -> np.ndarray:
        """Most probable configuration (lowest index on exact ties)."""
        from .oracle import index_to_spins

        return index_to_spins(int(np.argmax(self.probabilities)), self.n)

    def expected_problem_energy(self, problem: IsingProblem) -> float:
        diag = problem.energies(all_states(problem.n))
        return float(self.probabilities @ diag)


def _apply_x_layer(psi: np.ndarray, n: int, theta: float) -> np.ndarray:
    """Apply exp(+i theta sigma^x) on every site (product of exact unitaries)."""
    c = np.cos(theta)
    s = 1j * np.sin(theta)
    for bit in range(n):
        psi = psi.reshape(-1, 2, 1 << bit)
        lo = psi[:, 0, :].copy()
        hi = psi[:, 1, :]
        psi[:, 0, :] = c * lo + s * hi
        psi[:, 1, :] = s * lo + c * hi
    return psi.reshape(-1)


def evolve(problem: IsingProblem, schedule: AnnealSchedule, steps: int) -> AnnealResult:
    """Propagate the annealing Hamiltonian and return final probabilities.

    Starts in the uniform superposition, applies `steps` Strang-split steps
    with H frozen at each step midpoint, and reads out |amplitude|^2 in the
    computational basis.  Aborts if the norm drifts by more than 1e-6 (it
    should stay at rounding-error level).
    """
    n = problem.n
    if n > EVOLVE_MAX_SPINS:
        raise CapExceededError(
            f"state-vector evolution capped at N <= {EVOLVE_MAX_SPINS}, got N = {n}"
        )
    if steps < 1:
        raise ValueError("steps must be >= 1")
    dim = 1 << n
    diag = problem.energies(all_states(n))
    dt = schedule.t_anneal / steps
    psi = np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)
    for k in range(steps):
        s_mid = (k + 0.5) / steps
        a = float(schedule.a(s_mid))
        b = float(schedule.b(s_mid))
        psi = _apply_x_layer(psi, n, a * dt / 2)
        psi *= np.exp(-1j * dt * b * diag)
        psi = _apply_x_layer(psi, n, a * dt / 2)
    norm = float(np.linalg.norm(psi))
    drift = abs(norm - 1.0)
    if drift > 1e-6:
        raise RuntimeError(
            f"norm drift {drift:.3e} exceeds 1e-6 after {steps} steps "
            f"(dt = {dt:.3e}); the state vector is no longer trustworthy"
        )
    return AnnealResult(np.abs(psi) ** 2, n, steps, drift)


def _transverse_field_matrix(n: int) -> np.ndarray:
    """Dense H_I = -sum_i sigma^x_i in the computational basis."""
    dim = 1 << n
    h = np.zeros((dim, dim))
    for idx in range(dim):
        for bit in range(n):
            h[idx, idx ^ (1 << bit)] = -1.0
    return h


def gap_profile(
    problem: IsingProblem, schedule: AnnealSchedule, s_grid: int
) -> tuple[np.ndarray, np.ndarray]:
    """Instantaneous spectral gap E1(s) - E0(s) on an equally spaced s grid.

    Dense eigensolves of the 2^N x 2^N Hamiltonian at each grid point;
    capped at N <= 8.
    """
    n = problem.n
    if n > GAP_MAX_SPINS:
        raise CapExceededError(
            f"dense gap diagnostics capped at N <= {GAP_MAX_SPINS}, got N = {n}"
        )
    if s_grid < 2:
        raise ValueError("s_grid must be >= 2")
    hi = _transverse_field_matrix(n)
    diag = problem.energies(all_states(n))
    s_values = np.linspace(0.0, 1.0, s_grid)
    gaps = np.empty(s_grid)
    for i, s in enumerate(s_values):
        h = float(schedule.a(s)) * hi + np.diag(float(schedule.b(s)) * diag)
        evals = scipy.linalg.eigvalsh(h, subset_by_index=(0, 1))
        gaps[i] = evals[1] - evals[0]
    return s_values, gaps


def min_gap(problem: IsingProblem, schedule: AnnealSchedule, s_grid: int) -> tuple[float, float]:
    """Minimum of :func:`gap_profile` and the s at which it occurs."""
    s_values, gaps = gap_profile(problem, schedule, s_grid)
    i = int(np.argmin(gaps))
    return float(gaps[i]), float(s_values[i])


def sample(result: AnnealResult, shots: int, seed: int) -> dict[int, int]:
    """Multinomial measurement counts from the final distribution.

    Deterministic under the seed; returns {state index: count} for observed
    outcomes only.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = np.clip(result.probabilities, 0.0, None)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    nz = np.nonzero(counts)[0]
    return {int(i): int(counts[i]) for i in nz}

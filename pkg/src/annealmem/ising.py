"""Probe-biased Ising problems and the field-strength recall bounds.

The recall Hamiltonian couples the Hebbian weights with local fields encoding
a probe pattern chi on a set of active sites:

    E(s) = - sum_{i<j} J_ij s_i s_j - h * sum_{i in mask} chi_i s_i

so a positive field strength h lowers the energy of configurations aligned
with the probe.  For a memory xi at masked Hamming distance d from the probe
the field contributes -h*(n - 2d) (n = number of active sites): memories are
energetically ordered by their distance from the probe.  The globally flipped
(spurious) partner of xi is shifted by +h*(n - 2d), in the reverse order.

Field strengths must stay below a bound or the probe pattern itself undercuts
the target memory ("overbias").  For mutually orthogonal memories the bound
has a closed form (:func:`h_max`); :func:`h_max_generic` evaluates the
defining energy inequality directly and works for arbitrary weights.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .hopfield import MemorySet, energy, format_spin_string, hamming, spin_vector

__all__ = [
    "ProbeSpec",
    "IsingProblem",
    "NonOrthogonalError",
    "EnergyReport",
    "build_problem",
    "probe_energy_shift",
    "spurious_flip_shift",
    "quadratic_form",
    "check_orthogonal",
    "h_max",
    "h_max_per_memory",
    "h_max_generic",
    "energy_report",
    "quantize_hardware",
    "rescale_to_range",
    "J_STEP",
    "H_STEP",
]

# 9-bit conversion grid of the emulated hardware: couplers in [-1, 1] move in
# steps of 2^-8, local fields in [-2, 2] in steps of 2^-7.
J_STEP = 2.0**-8
H_STEP = 2.0**-7
J_RANGE = 1.0
H_RANGE = 2.0


class NonOrthogonalError(ValueError):
    """Raised when a closed-form bound is requested for a non-orthogonal set."""


@dataclass(frozen=True)
class ProbeSpec:
    """A probe pattern, its active-site mask and the field strength h.

    ``mask=None`` means all sites are active.  Pattern entries on inactive
    sites are carried along (the probe is still a full configuration for
    energy comparisons) but contribute no field.
    """

    pattern: np.ndarray
    h: float
    mask: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "pattern", spin_vector(self.pattern))
        if self.h < 0:
            raise ValueError("field strength h must be >= 0")
        if self.mask is not None:
            idx = tuple(sorted(set(int(i) for i in self.mask)))
            if not idx:
                raise ValueError("mask must be non-empty")
            if idx[0] < 0 or idx[-1] >= self.pattern.size:
                raise ValueError("mask indices out of range")
            if len(idx) == self.pattern.size:
                idx = None  # full mask, normalize
            object.__setattr__(self, "mask", idx)

    @property
    def size(self) -> int:
        return self.pattern.size

    @property
    def n_active(self) -> int:
        """n = number of active probe sites."""
        return self.pattern.size if self.mask is None else len(self.mask)

    @property
    def full_mask(self) -> bool:
        return self.mask is None

    def mask_indices(self) -> np.ndarray:
        if self.mask is None:
            return np.arange(self.pattern.size)
        return np.asarray(self.mask, dtype=int)

    def with_h(self, h: float) -> "ProbeSpec":
        return ProbeSpec(self.pattern, h, self.mask)

    def distance_to(self, state: np.ndarray) -> int:
        """Masked Hamming distance from the probe pattern to a state."""
        return hamming(self.pattern, state, self.mask)


@dataclass(frozen=True)
class IsingProblem:
    """Couplings J and local fields h of a classical Ising energy functional.

    ``energy(s) = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i`` is the single
    source of truth for every downstream solver.
    """

    couplings: np.ndarray
    fields: np.ndarray

    def __post_init__(self):
        j = np.asarray(self.couplings, dtype=np.float64)
        h = np.asarray(self.fields, dtype=np.float64)
        if j.ndim != 2 or j.shape[0] != j.shape[1]:
            raise ValueError("couplings must be a square matrix")
        if h.shape != (j.shape[0],):
            raise ValueError("field vector length does not match couplings")
        if not np.array_equal(j, j.T):
            raise ValueError("couplings must be symmetric")
        if np.any(np.diag(j) != 0):
            raise ValueError("couplings must have zero diagonal")
        j.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "couplings", j)
        object.__setattr__(self, "fields", h)

    @property
    def n(self) -> int:
        return self.fields.size

    def energy(self, state: np.ndarray) -> float:
        return energy(self.couplings, self.fields, state)

    def energies(self, states: np.ndarray) -> np.ndarray:
        """Vectorized energies of a (batch, N) block of spin configurations."""
        s = np.asarray(states, dtype=np.float64)
        if s.ndim != 2 or s.shape[1] != self.n:
            raise ValueError("states must be a (batch, N) array")
        return -0.5 * np.einsum("bi,bi->b", s @ self.couplings, s) - s @ self.fields


def build_problem(weights: np.ndarray, probe: ProbeSpec) -> IsingProblem:
    """Assemble the recall problem: J = W, fields h*chi on the active sites."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (probe.size, probe.size):
        raise ValueError("weight matrix does not match probe length")
    hvec = np.zeros(probe.size)
    idx = probe.mask_indices()
    hvec[idx] = probe.h * probe.pattern[idx]
    return IsingProblem(w, hvec)


def probe_energy_shift(probe: ProbeSpec, memory: np.ndarray) -> float:
    """Field-energy of a memory: -h*(n - 2d), d the masked probe distance."""
    d = probe.distance_to(memory)
    return -probe.h * (probe.n_active - 2 * d)


def spurious_flip_shift(probe: ProbeSpec, memory: np.ndarray) -> float:
    """Field-energy of a memory's global flip: +h*(n - 2d), the reverse order."""
    return -probe_energy_shift(probe, memory)


def quadratic_form(weights: np.ndarray, state: np.ndarray) -> float:
    """The half quadratic form  s . (W/2) . s  (coupling energy is its negative)."""
    s = np.asarray(state, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (s.size, s.size):
        raise ValueError("weight matrix does not match state length")
    return 0.5 * float(s @ w @ s)


def check_orthogonal(memories: MemorySet) -> bool:
    """Exact integer check that all pairwise pattern dot products vanish."""
    m = memories.memories.astype(np.int64)
    gram = m @ m.T
    off = gram[~np.eye(memories.p, dtype=bool)]
    return bool(np.all(off == 0))


def _require_orthogonal(memories: MemorySet) -> None:
    if not check_orthogonal(memories):
        raise NonOrthogonalError(
            "memories are not mutually orthogonal (pairwise Hamming distance N/2); "
            "the closed-form bound does not apply, use h_max_generic"
        )


def h_max(memories: MemorySet, probe: ProbeSpec, target_index: int) -> float:
    """Closed-form overbias bound for mutually orthogonal memory sets.

    Returns (1/(4 d_t)) * [N(1-p) + 4*sum_nu d_nu - (4/N)*sum_nu d_nu^2]
    where d_nu are the full-length probe-memory Hamming distances and
    d_t the target's.  The overall recall bound is the max over targets
    (see :func:`h_max_per_memory`); the min is the conservative choice that
    keeps every memory below the probe.
    """
    if not probe.full_mask:
        raise ValueError("closed-form bound requires a full probe mask")
    _require_orthogonal(memories)
    if memories.n != probe.size:
        raise ValueError("probe length does not match memories")
    d = np.array([hamming(probe.pattern, m) for m in memories], dtype=np.float64)
    dt = d[target_index]
    if dt == 0:
        raise ValueError("probe equals the target memory; the bound is vacuous")
    n = float(memories.n)
    p = float(memories.p)
    return float((n * (1 - p) + 4 * d.sum() - (4 / n) * (d**2).sum()) / (4 * dt))


def h_max_per_memory(memories: MemorySet, probe: ProbeSpec) -> np.ndarray:
    """Closed-form bound of every memory; ``.max()`` is the overall recall bound."""
    return np.array([h_max(memories, probe, mu) for mu in range(memories.p)])


def h_max_generic(weights: np.ndarray, probe: ProbeSpec, target: np.ndarray) -> float:
    """Overbias bound from the defining inequality E(target) < E(probe).

    ( <target|W/2|target> - <probe|W/2|probe> ) / (2 d) with d the masked
    probe-target distance.  Valid for arbitrary (also non-orthogonal) weights.
    """
    d = probe.distance_to(target)
    if d == 0:
        raise ValueError("probe equals the target on the mask; the bound is vacuous")
    return (quadratic_form(weights, target) - quadratic_form(weights, probe.pattern)) / (2 * d)


@dataclass(frozen=True)
class EnergyReport:
    """Energies of memories, their flips and the probe state across an h grid."""

    h_values: np.ndarray            # (G,)
    distances: np.ndarray           # (p,) masked probe-memory distances
    memory_coupling: np.ndarray     # (p,)  -<xi|W/2|xi>
    probe_coupling: float           # -<chi|W/2|chi>
    memory_field: np.ndarray        # (G, p) field-energy of each memory
    flip_field: np.ndarray          # (G, p)
    probe_field: np.ndarray         # (G,)
    memory_total: np.ndarray        # (G, p)
    flip_total: np.ndarray          # (G, p)
    probe_total: np.ndarray         # (G,)
    h_max: np.ndarray               # (p,) generic bound per memory

    @property
    def p(self) -> int:
        return self.distances.size

    def to_csv(self, path: str | Path | io.TextIOBase, header_lines: Sequence[str] = ()) -> None:
        """Write rows h, E_probe, E_mem_1.., E_flip_1.. (one per grid point)."""
        cols = ["h", "E_probe"]
        cols += [f"E_mem_{mu + 1}" for mu in range(self.p)]
        cols += [f"E_flip_{mu + 1}" for mu in range(self.p)]
        lines = list(header_lines) + [",".join(cols)]
        for g, h in enumerate(self.h_values):
            row = [repr(float(h)), repr(float(self.probe_total[g]))]
            row += [repr(float(v)) for v in self.memory_total[g]]
            row += [repr(float(v)) for v in self.flip_total[g]]
            lines.append(",".join(row))
        text = "\n".join(lines) + "\n"
        if isinstance(path, io.TextIOBase):
            path.write(text)
        else:
            Path(path).write_text(text)


def energy_report(
    memories: MemorySet, probe: ProbeSpec, h_grid: Iterable[float]
) -> EnergyReport:
    """Tabulate the low-lying recall spectrum (memories, flips, probe) over h."""
    from .hopfield import hebbian_learn

    w = hebbian_learn(memories)
    hs = np.asarray(list(h_grid), dtype=np.float64)
    d = np.array([probe.distance_to(m) for m in memories], dtype=np.float64)
    n = probe.n_active
    mem_coupling = np.array([-quadratic_form(w, m) for m in memories])
    probe_coupling = -quadratic_form(w, probe.pattern)
    mem_field = -np.outer(hs, n - 2 * d)
    flip_field = np.outer(hs, n - 2 * d)
    probe_field = -hs * n
    bounds = np.array([h_max_generic(w, probe, m) if d[mu] > 0 else np.inf
                       for mu, m in enumerate(memories)])
    return EnergyReport(
        h_values=hs,
        distances=d.astype(int),
        memory_coupling=mem_coupling,
        probe_coupling=probe_coupling,
        memory_field=mem_field,
        flip_field=flip_field,
        probe_field=probe_field,
        memory_total=mem_coupling[None, :] + mem_field,
        flip_total=mem_coupling[None, :] + flip_field,
        probe_total=probe_coupling + probe_field,
        h_max=bounds,
    )


def rescale_to_range(problem: IsingProblem) -> IsingProblem:
    """Shrink J and h by one common factor so |J| <= 1 and |h| <= 2.

    A common positive scale leaves the ground set (and the whole energy
    ordering) unchanged.  Problems already in range are returned as-is.
    """
    maxj = float(np.max(np.abs(problem.couplings), initial=0.0))
    maxh = float(np.max(np.abs(problem.fields), initial=0.0))
    scale = 1.0
    if maxj > J_RANGE:
        scale = min(scale, J_RANGE / maxj)
    if maxh > H_RANGE:
        scale = min(scale, H_RANGE / maxh)
    if scale == 1.0:
        return problem
    return IsingProblem(problem.couplings * scale, problem.fields * scale)


def quantize_hardware(problem: IsingProblem, rescale: bool = False) -> IsingProblem:
    """Round J to the nearest multiple of 2^-8 and h to 2^-7 (9-bit emulation).

    Values must satisfy |J| <= 1 and |h| <= 2; enable ``rescale`` to shrink
    out-of-range problems first.  The projection is idempotent.
    """
    if rescale:
        problem = rescale_to_range(problem)
    if np.max(np.abs(problem.couplings), initial=0.0) > J_RANGE + 1e-12:
        raise ValueError("coupling out of range [-1, 1]; pass rescale=True")
    if np.max(np.abs(problem.fields), initial=0.0) > H_RANGE + 1e-12:
        raise ValueError("field out of range [-2, 2]; pass rescale=True")
    j = np.round(problem.couplings / J_STEP) * J_STEP
    h = np.round(problem.fields / H_STEP) * H_STEP
    np.fill_diagonal(j, 0.0)
    return IsingProblem(j, h)

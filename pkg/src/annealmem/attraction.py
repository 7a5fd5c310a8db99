"""Attraction-basin conditions and exhaustive recall verification.

A probe at masked distances d_s (nearest memory) and d_b (furthest memory)
can only recall reliably when the nearest memory's field energy beats the
best spurious flipped memory, which requires

    d_s + d_b <= n - 1         (n = number of active probe sites).

Combined with d_s <= d_b this bounds the guaranteed attraction radius at
floor((n - 1) / 2), i.e. (n - 2)/2 for even n and (n - 1)/2 for odd n.  The
exhaustive verifier enumerates every probe in the Hamming balls around the
stored memories, solves each recall problem exactly, and reports any probe
that does not uniquely recall its nearest memory.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hopfield import MemorySet, format_spin_string, hamming, hebbian_learn
from .ising import ProbeSpec, build_problem, h_max_generic
from .oracle import UNIQUE_MEMORY, classify_recall, ground_set, spins_to_index

__all__ = [
    "BasinReport",
    "ProbeResult",
    "BasinVerification",
    "radius_bound",
    "basin_check",
    "verify_basin_exhaustive",
]


def radius_bound(n: int) -> int:
    """Guaranteed attraction radius: (n-2)/2 for even n, (n-1)/2 for odd n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return (n - 1) // 2


@dataclass(frozen=True)
class BasinReport:
    """Distance diagnostics of one probe against a memory set."""

    d_s: int                  # min masked probe-memory distance
    d_b: int                  # max masked probe-memory distance
    n: int                    # active probe sites
    condition_holds: bool     # d_s + d_b <= n - 1
    d_of_n: int               # max pairwise memory distance on the mask
    radius: int               # radius_bound(n)
    chain_holds: bool         # d_of_n <= d_s + d_b <= n - 1
    nearest_index: int        # argmin distance (first on ties)
    nearest_tied: bool        # more than one memory at distance d_s


def basin_check(memories: MemorySet, probe: ProbeSpec) -> BasinReport:
    """Evaluate the recall condition d_s + d_b <= n - 1 for one probe."""
    if memories.n != probe.size:
        raise ValueError("probe length does not match memories")
    dist = np.array([probe.distance_to(m) for m in memories])
    d_s = int(dist.min())
    d_b = int(dist.max())
    n = probe.n_active
    mask = probe.mask
    d_of_n = 0
    for a, b in itertools.combinations(range(memories.p), 2):
        d_of_n = max(d_of_n, hamming(memories[a], memories[b], mask))
    holds = d_s + d_b <= n - 1
    return BasinReport(
        d_s=d_s,
        d_b=d_b,
        n=n,
        condition_holds=holds,
        d_of_n=d_of_n,
        radius=radius_bound(n) if n >= 2 else 0,
        chain_holds=holds and d_of_n <= d_s + d_b,
        nearest_index=int(dist.argmin()),
        nearest_tied=int((dist == d_s).sum()) > 1,
    )


@dataclass(frozen=True)
class ProbeResult:
    probe: np.ndarray
    d_s: int
    d_b: int
    h: float
    classification: str
    recalled_index: int | None


@dataclass
class BasinVerification:
    """Outcome of the exhaustive basin sweep.  Failures are data, not errors."""

    failures: list[ProbeResult] = field(default_factory=list)
    ties_skipped: list[np.ndarray] = field(default_factory=list)
    condition_skipped: int = 0
    no_valid_h: int = 0
    probes_tested: int = 0

    @property
    def all_recalled(self) -> bool:
        return not self.failures

    def failures_csv(self, path: str | Path, header_lines=()) -> None:
        lines = list(header_lines) + ["probe,d_s,d_b,h,classification"]
        for f in self.failures:
            lines.append(
                f"{format_spin_string(f.probe)},{f.d_s},{f.d_b},{f.h!r},{f.classification}"
            )
        Path(path).write_text("\n".join(lines) + "\n")


def _probe_ball(memory: np.ndarray, max_d: int):
    """All patterns within Hamming distance max_d of a memory."""
    n = memory.size
    for d in range(max_d + 1):
        for sites in itertools.combinations(range(n), d):
            probe = memory.copy()
            probe[list(sites)] *= -1
            yield probe


def _check_one(weights, memories, probe_pattern, dist, h, tie_tol):
    nearest = int(dist.argmin())
    spec = ProbeSpec(probe_pattern, h)
    outcome = classify_recall(ground_set(build_problem(weights, spec), tie_tol), memories, spec)
    ok = outcome.classification == UNIQUE_MEMORY and outcome.memory_index == nearest
    return ProbeResult(
        probe=probe_pattern,
        d_s=int(dist.min()),
        d_b=int(dist.max()),
        h=h,
        classification=outcome.classification,
        recalled_index=outcome.memory_index,
    ), ok


def verify_basin_exhaustive(
    memories: MemorySet,
    h: float | None = None,
    max_d: int = 1,
    condition_filter: bool = True,
    tie_tol: float = 1e-9,
    workers: int | None = None,
) -> BasinVerification:
    """Exact-recall check of every probe within max_d of every memory.

    For each probe (deduplicated across the balls) with the distance condition
    satisfied and a valid field strength, solve the recall problem by full
    enumeration and record any outcome that is not a unique recall of the
    nearest memory.  Probes equidistant from two memories are skipped and
    reported separately.  ``h=None`` selects 0.5 * h_max_generic(nearest) per
    probe (and 1/(2N) when the probe already equals a memory, where any
    positive field works for orthogonal sets).  ``condition_filter=False``
    includes condition-violating probes, useful for exhibiting failures.
    """
    weights = hebbian_learn(memories)
    n = memories.n
    result = BasinVerification()
    seen: set[int] = set()
    jobs = []
    for memory in memories:
        for probe_pattern in _probe_ball(memory, max_d):
            key = spins_to_index(probe_pattern)
            if key in seen:
                continue
            seen.add(key)
            dist = np.array([hamming(probe_pattern, m) for m in memories])
            d_s = int(dist.min())
            if int((dist == d_s).sum()) > 1:
                result.ties_skipped.append(probe_pattern)
                continue
            if condition_filter and d_s + int(dist.max()) > n - 1:
                result.condition_skipped += 1
                continue
            nearest = int(dist.argmin())
            if d_s == 0:
                bound = np.inf
                h_probe = h if h is not None else 1.0 / (2 * n)
            else:
                spec0 = ProbeSpec(probe_pattern, 0.0)
                bound = h_max_generic(weights, spec0, memories[nearest])
                h_probe = h if h is not None else 0.5 * bound
            if not (0.0 < h_probe < bound):
                result.no_valid_h += 1
                continue
            jobs.append((probe_pattern, dist, h_probe))

    def run(job):
        probe_pattern, dist, h_probe = job
        return _check_one(weights, memories, probe_pattern, dist, h_probe, tie_tol)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(job) for job in jobs]
    for probe_result, ok in outcomes:
        result.probes_tested += 1
        if not ok:
            result.failures.append(probe_result)
    return result

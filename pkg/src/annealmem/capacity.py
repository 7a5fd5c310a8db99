"""Storage-capacity formulas and Monte Carlo validation on random memory sets.

For balanced random memories, a probe at distance d_s = N/2 - 1 - x from one
memory is recalled as long as every other memory lies within N/2 + x.  The
probability of that event for one other memory is the binomial tail

    P* = sum_{l <= N/2+x} C(N, l) / 2^N  >=  1 - 0.5 * exp(-x^2 / (N/2 + x)),

and with p independently drawn memories the scheme succeeds with probability
at least (P*)^(p-1).  Demanding success probability gamma bounds the number
of storable memories by p <= 1 + log(gamma)/log(P*); choosing
gamma = 1 - exp(-C2 N) and the small-z approximation log(1-z) ~ -z turns this
into the exponential form p <= 1 + 2 exp(C1 N) with C1 = x'^2/(0.5+x') - C2
(x' = x/N), subject to the exponent budget

    C1 + C2 = (0.5 - f)^2 / (1 - f),      f = R(N)/N,

the tradeoff between capacity growth and attraction-basin size.

Both the un-approximated bound (:func:`capacity_bound`) and the exponential
form (:func:`exponential_capacity`) are exposed; they differ at finite N
because of the small-z step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .hopfield import MemorySet, hamming
from .ising import ProbeSpec, build_problem, h_max_generic
from .oracle import UNIQUE_MEMORY, classify_recall, ground_set

__all__ = [
    "p_star_exact",
    "p_star",
    "capacity_bound",
    "exponential_capacity",
    "tradeoff",
    "hebbian_classical_capacity",
    "CapacityParams",
    "MonteCarloResult",
    "monte_carlo_success",
]

MONTE_CARLO_ORACLE_MAX_SPINS = 20


def _check_nx(n: int, x: int) -> None:
    if n < 2 or n % 2 != 0:
        raise ValueError("N must be a positive even integer")
    if not (0 <= x <= n // 2):
        raise ValueError("x must satisfy 0 <= x <= N/2")


def p_star_exact(n: int, x: int) -> Fraction:
    """Exact binomial tail P[d <= N/2 + x] for d ~ Binomial(N, 1/2).

    Big-integer arithmetic; this is the independent oracle the closed-form
    lower bound is checked against.
    """
    _check_nx(n, x)
    total = sum(math.comb(n, l) for l in range(n // 2 + x + 1))
    return Fraction(total, 1 << n)


def p_star(n: int, x: int) -> tuple[float, float]:
    """(exact tail, closed-form lower bound 1 - 0.5*exp(-x^2/(N/2+x)))."""
    exact = float(p_star_exact(n, x))
    bound = 1.0 - 0.5 * math.exp(-(x**2) / (n / 2 + x))
    return exact, bound


def capacity_bound(gamma: float, p_star_value: float) -> float:
    """Memory-count bound 1 + log(gamma)/log(P*) for target success gamma."""
    if not (0.0 < gamma < 1.0):
        raise ValueError("gamma must lie in (0, 1)")
    if not (0.0 < p_star_value <= 1.0):
        raise ValueError("p_star_value must lie in (0, 1]")
    if p_star_value == 1.0:
        raise ValueError("P* = 1 at this precision: the bound is unbounded")
    return 1.0 + math.log(gamma) / math.log(p_star_value)


def exponential_capacity(n: int, t_frac: float, c2: float) -> float:
    """Exponential capacity form 1 + 2*exp(C1*N), C1 = t^2/(0.5+t) - C2."""
    if not (0.0 <= t_frac < 0.5):
        raise ValueError("t_frac must lie in [0, 0.5)")
    budget = t_frac**2 / (0.5 + t_frac)
    if not (0.0 <= c2 <= budget):
        raise ValueError(f"C2 must lie in [0, {budget}] for t_frac = {t_frac}")
    c1 = budget - c2
    return 1.0 + 2.0 * math.exp(c1 * n)


def tradeoff(f: float) -> float:
    """Exponent budget C1 + C2 = (0.5 - f)^2/(1 - f) of a basin fraction f."""
    if not (0.0 <= f < 0.5):
        raise ValueError("f must lie in [0, 0.5)")
    return (0.5 - f) ** 2 / (1.0 - f)


def hebbian_classical_capacity(n: int) -> float:
    """Classical perfect-recall capacity baseline N / (2 ln N)."""
    if n < 3:
        raise ValueError("N must be >= 3")
    return n / (2.0 * math.log(n))


@dataclass(frozen=True)
class CapacityParams:
    """Joint capacity parameters with the exponent-budget identity enforced.

    x = round(t_frac * N) (ties to even); f uses the finite-N expression
    (N/2 - 1 - x)/N, which approaches 0.5 - t_frac for large N.
    """

    n: int
    t_frac: float
    c2: float
    gamma_n: int | None = None  # N at which gamma = 1 - exp(-C2 N) is evaluated

    def __post_init__(self):
        if not (0.0 <= self.t_frac < 0.5):
            raise ValueError("t_frac must lie in [0, 0.5)")
        budget = self.t_frac**2 / (0.5 + self.t_frac)
        if not (0.0 <= self.c2 <= budget):
            raise ValueError("C2 outside the admissible window")

    @property
    def x(self) -> int:
        return int(round(self.t_frac * self.n))

    @property
    def d_s(self) -> int:
        return self.n // 2 - 1 - self.x

    @property
    def f_finite(self) -> float:
        return (self.n / 2 - 1 - self.x) / self.n

    @property
    def f_asymptotic(self) -> float:
        return 0.5 - self.t_frac

    @property
    def c1(self) -> float:
        return self.t_frac**2 / (0.5 + self.t_frac) - self.c2

    @property
    def gamma(self) -> float:
        n = self.gamma_n or self.n
        return 1.0 - math.exp(-self.c2 * n)


@dataclass
class MonteCarloResult:
    n: int
    p: int
    t_frac: float
    x: int
    d_s: int
    trials: int
    successes: int
    no_valid_h: int
    predicted_lower_bound: float
    p_star_exact: float
    engine: str
    seed: int

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials


def _random_memories(rng: np.random.Generator, p: int, n: int) -> MemorySet:
    while True:
        m = rng.integers(0, 2, size=(p, n)) * 2 - 1
        try:
            return MemorySet(m.astype(np.int8))
        except ValueError:
            continue  # duplicate rows, redraw


def monte_carlo_success(
    n: int,
    p: int,
    t_frac: float,
    trials: int,
    seed: int,
    engine: str = "oracle",
    sa_schedule=None,
    sa_restarts: int = 32,
) -> MonteCarloResult:
    """Empirical recall rate over random memory sets vs the (P*)^(p-1) bound.

    Per trial: draw p i.i.d. balanced memories, flip exactly
    d_s = N/2 - 1 - round(t_frac*N) uniformly chosen sites of memory 1 to
    build the probe, recall at h = 0.5 * h_max_generic(nearest), and count
    success when the nearest memory (whichever it is) is uniquely recalled.
    Trials whose field-strength bound is non-positive count as failures.
    """
    from .hopfield import hebbian_learn

    if engine not in ("oracle", "sa"):
        raise ValueError("engine must be 'oracle' or 'sa'")
    if engine == "oracle" and n > MONTE_CARLO_ORACLE_MAX_SPINS:
        raise ValueError(f"oracle engine capped at N <= {MONTE_CARLO_ORACLE_MAX_SPINS}")
    if n % 2 != 0:
        raise ValueError("N must be even")
    if p < 1:
        raise ValueError("p must be >= 1")
    x = int(round(t_frac * n))
    d_s = n // 2 - 1 - x
    if d_s < 0:
        raise ValueError("t_frac too large: probe distance would be negative")
    successes = 0
    no_valid_h = 0
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        memories = _random_memories(rng, p, n)
        weights = hebbian_learn(memories)
        probe_pattern = memories[0].copy()
        flip_sites = rng.choice(n, size=d_s, replace=False)
        probe_pattern[flip_sites] *= -1
        dist = np.array([hamming(probe_pattern, m) for m in memories])
        d_min = int(dist.min())
        nearest = int(dist.argmin())
        if d_min == 0:
            h = 1.0 / (2 * n)
        else:
            bound = h_max_generic(weights, ProbeSpec(probe_pattern, 0.0), memories[nearest])
            if bound <= 0:
                no_valid_h += 1
                continue
            h = 0.5 * bound
        probe = ProbeSpec(probe_pattern, h)
        problem = build_problem(weights, probe)
        if engine == "oracle":
            outcome = classify_recall(ground_set(problem), memories, probe)
            if outcome.classification == UNIQUE_MEMORY:
                recalled = memories[outcome.memory_index]
                if hamming(probe_pattern, recalled) == d_min:
                    successes += 1
        else:
            from .sa import sa_sample

            result = sa_sample(problem, sa_schedule, restarts=sa_restarts, seed=seed + trial)
            match = [mu for mu in range(p) if np.array_equal(result.best_state, memories[mu])]
            if match and dist[match[0]] == d_min:
                successes += 1
    predicted = float(p_star_exact(n, x)) ** (p - 1)
    return MonteCarloResult(
        n=n,
        p=p,
        t_frac=t_frac,
        x=x,
        d_s=d_s,
        trials=trials,
        successes=successes,
        no_valid_h=no_valid_h,
        predicted_lower_bound=predicted,
        p_star_exact=float(p_star_exact(n, x)),
        engine=engine,
        seed=seed,
    )

"""Hopfield associative memories with recall by (simulated) quantum annealing.

Patterns are learned with the Hebbian rule and recalled by finding the ground
state of an Ising Hamiltonian whose couplings store the memories and whose
local fields encode the (possibly corrupted) probe.  The package provides an
exact enumeration oracle, a closed-system Schroedinger-evolution annealer, a
classical simulated-annealing sampler, the field-strength and attraction-
radius bounds governing when recall succeeds, capacity formulas for random
memory sets, and clique minor embedding onto Chimera hardware graphs.
"""

from .attraction import BasinReport, basin_check, radius_bound, verify_basin_exhaustive
from .capacity import (
    capacity_bound,
    exponential_capacity,
    hebbian_classical_capacity,
    monte_carlo_success,
    p_star,
    p_star_exact,
    tradeoff,
)
from .chimera import (
    ChimeraGraph,
    Embedding,
    EmbeddingError,
    chimera_graph,
    decode,
    embed_clique,
    embed_problem,
    gauge_transform,
    identity_embedding,
    verify_embedding,
)
from .hopfield import (
    MemorySet,
    classical_update,
    energy,
    format_spin_string,
    hamming,
    hebbian_learn,
    parse_spin_string,
    spin_vector,
)
from .ising import (
    EnergyReport,
    IsingProblem,
    NonOrthogonalError,
    ProbeSpec,
    build_problem,
    check_orthogonal,
    energy_report,
    h_max,
    h_max_generic,
    h_max_per_memory,
    probe_energy_shift,
    quantize_hardware,
    quadratic_form,
    rescale_to_range,
    spurious_flip_shift,
)
from .oracle import (
    CapExceededError,
    GroundSet,
    RecallOutcome,
    classify_recall,
    ground_set,
)
from .quantum import AnnealResult, AnnealSchedule, evolve, gap_profile, min_gap, sample
from .sa import SASchedule, sa_sample

__version__ = "0.1.0"

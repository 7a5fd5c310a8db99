"""Chimera hardware graphs and clique minor embedding via ferromagnetic chains.

The hardware graph is an m x m grid of complete-bipartite K_{4,4} cells.
Qubit ids follow the usual linear convention

    id = 8*(row*m + col) + 4*shore + k,      shore 0 vertical, shore 1 horizontal,

with intra-cell couplers between the two shores of a cell, vertical couplers
between shore-0 qubits of vertically adjacent cells and horizontal couplers
between shore-1 qubits of horizontally adjacent cells.  Dead qubits are
removed together with their couplers.

Fully connected problems are embedded with the standard diagonal scheme: the
logical qubit (group c, wire k) owns the horizontal wire of row c from column
c rightwards plus the vertical wire of column c from row c upwards, joined in
the diagonal cell.  On a perfect graph that yields chains of length m'+1 for
a 4m'-clique; on defective graphs a greedy search skips rows/columns whose
wires are broken.  Each logical spin becomes a chain of physical qubits bound
by a ferromagnetic coupling J_F (positive in our energy convention, where
aligned spins lower  -sum J s s).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np

from .ising import IsingProblem

__all__ = [
    "EmbeddingError",
    "ChimeraGraph",
    "chimera_graph",
    "Embedding",
    "identity_embedding",
    "embed_clique",
    "default_chain_strength",
    "embed_problem",
    "decode",
    "gauge_transform",
    "verify_embedding",
    "save_graph",
    "load_graph",
    "save_embedding",
    "load_embedding",
]


class EmbeddingError(Exception):
    """No valid embedding exists (or was found) for the requested problem."""


@dataclass(frozen=True, eq=False)
class ChimeraGraph:
    """An m x m Chimera graph with a set of missing (dead) qubits."""

    m: int
    missing: frozenset[int]
    graph: nx.Graph = field(repr=False)

    @property
    def n_qubits(self) -> int:
        return self.graph.number_of_nodes()

    def qubit_id(self, row: int, col: int, shore: int, k: int) -> int:
        return 8 * (row * self.m + col) + 4 * shore + k

    def coords(self, qubit: int) -> tuple[int, int, int, int]:
        cell, rem = divmod(qubit, 8)
        shore, k = divmod(rem, 4)
        return cell // self.m, cell % self.m, shore, k

    def alive(self, qubit: int) -> bool:
        return qubit in self.graph

    def has_coupler(self, a: int, b: int) -> bool:
        return self.graph.has_edge(a, b)


def chimera_graph(m: int, missing=()) -> ChimeraGraph:
    """Build an m x m Chimera graph, dropping the given dead qubit ids."""
    if m < 1:
        raise ValueError("m must be >= 1")
    dead = frozenset(int(q) for q in missing)
    total = 8 * m * m
    for q in dead:
        if not (0 <= q < total):
            raise ValueError(f"missing qubit id {q} out of range 0..{total - 1}")
    g = nx.Graph()
    g.add_nodes_from(q for q in range(total) if q not in dead)

    def qid(r, c, u, k):
        return 8 * (r * m + c) + 4 * u + k

    for r in range(m):
        for c in range(m):
            for k0 in range(4):
                for k1 in range(4):
                    g.add_edge(qid(r, c, 0, k0), qid(r, c, 1, k1))
            if r + 1 < m:
                for k in range(4):
                    g.add_edge(qid(r, c, 0, k), qid(r + 1, c, 0, k))
            if c + 1 < m:
                for k in range(4):
                    g.add_edge(qid(r, c, 1, k), qid(r, c + 1, 1, k))
    g.remove_nodes_from(dead)
    return ChimeraGraph(m=m, missing=dead, graph=g)


@dataclass(frozen=True, eq=False)
class Embedding:
    """Map from logical qubit index to its chain of physical qubits."""

    chains: dict[int, tuple[int, ...]]
    graph: nx.Graph = field(repr=False)
    chain_strength: float | None = None

    @property
    def n_logical(self) -> int:
        return len(self.chains)

    @property
    def used_qubits(self) -> tuple[int, ...]:
        return tuple(sorted(q for chain in self.chains.values() for q in chain))

    @property
    def n_physical(self) -> int:
        return sum(len(chain) for chain in self.chains.values())

    @property
    def chain_lengths(self) -> dict[int, int]:
        return {i: len(chain) for i, chain in self.chains.items()}

    def with_chain_strength(self, j_f: float) -> "Embedding":
        return Embedding(self.chains, self.graph, j_f)


def identity_embedding(n: int, graph: nx.Graph | None = None) -> Embedding:
    """Every chain a single qubit; defaults to the complete physical graph."""
    if graph is None:
        graph = nx.complete_graph(n)
    return Embedding({i: (i,) for i in range(n)}, graph)


def verify_embedding(embedding: Embedding, logical_edges=None) -> None:
    """Raise EmbeddingError on any violated embedding invariant.

    Checks chain disjointness, chain connectivity in the physical graph and,
    when logical edges are given, that every logical edge is covered by at
    least one physical coupler between the two chains.
    """
    g = embedding.graph
    seen: set[int] = set()
    for logical, chain in embedding.chains.items():
        if not chain:
            raise EmbeddingError(f"chain {logical} is empty")
        cs = set(chain)
        if len(cs) != len(chain):
            raise EmbeddingError(f"chain {logical} repeats a qubit")
        if cs & seen:
            raise EmbeddingError(f"chain {logical} overlaps another chain")
        seen |= cs
        for q in chain:
            if q not in g:
                raise EmbeddingError(f"chain {logical} uses unknown qubit {q}")
        if not nx.is_connected(g.subgraph(cs)):
            raise EmbeddingError(f"chain {logical} is not connected")
    if logical_edges is not None:
        for i, j in logical_edges:
            ci, cj = embedding.chains[i], embedding.chains[j]
            if not any(g.has_edge(a, b) for a in ci for b in cj):
                raise EmbeddingError(f"logical edge ({i}, {j}) has no physical coupler")


def _wire_alive(graph: ChimeraGraph, group: int, k: int, col_span, row_span) -> bool:
    """Check one cross-shaped chain: horizontal + vertical wire + junction."""
    g = graph.graph
    h_qubits = [graph.qubit_id(group, c, 1, k) for c in col_span]
    v_qubits = [graph.qubit_id(r, group, 0, k) for r in row_span]
    for q in h_qubits + v_qubits:
        if q not in g:
            return False
    for a, b in zip(h_qubits, h_qubits[1:]):
        if not g.has_edge(a, b):
            return False
    for a, b in zip(v_qubits, v_qubits[1:]):
        if not g.has_edge(a, b):
            return False
    junction_v = graph.qubit_id(group, group, 0, k)
    junction_h = graph.qubit_id(group, group, 1, k)
    return g.has_edge(junction_v, junction_h)


def embed_clique(n_logical: int, graph: ChimeraGraph, max_subsets: int = 100_000) -> Embedding:
    """Embed an N-clique with the diagonal scheme, skipping broken rows/columns.

    Searches subsets of group indices (4 logical wires per group) in
    lexicographic order for the first one whose wires are all alive, so the
    result is deterministic.  Raises EmbeddingError naming the first logical
    qubit that could not be hosted.
    """
    if n_logical < 1:
        raise ValueError("n_logical must be >= 1")
    m = graph.m
    if n_logical > 4 * m:
        raise EmbeddingError(
            f"logical qubit {4 * m} does not fit: an m={m} graph hosts at most {4 * m}"
        )
    best_capacity = 0
    tried = 0
    for t in range((n_logical + 3) // 4, m + 1):
        for groups in itertools.combinations(range(m), t):
            tried += 1
            if tried > max_subsets:
                raise EmbeddingError(
                    f"subset search budget exhausted; best capacity {best_capacity} "
                    f"leaves logical qubit {best_capacity} unhosted"
                )
            first, last = groups[0], groups[-1]
            alive: list[tuple[int, int]] = []
            for group in groups:
                col_span = range(group, last + 1)
                row_span = range(first, group + 1)
                for k in range(4):
                    if _wire_alive(graph, group, k, col_span, row_span):
                        alive.append((group, k))
            best_capacity = max(best_capacity, len(alive))
            if len(alive) < n_logical:
                continue
            chains: dict[int, tuple[int, ...]] = {}
            for logical, (group, k) in enumerate(alive[:n_logical]):
                horizontal = [graph.qubit_id(group, c, 1, k) for c in range(group, last + 1)]
                vertical = [graph.qubit_id(r, group, 0, k) for r in range(first, group + 1)]
                chains[logical] = tuple(vertical + horizontal)
            embedding = Embedding(chains, graph.graph)
            verify_embedding(embedding, itertools.combinations(range(n_logical), 2))
            return embedding
    raise EmbeddingError(
        f"no embedding found: best capacity {best_capacity} "
        f"leaves logical qubit {best_capacity} unhosted"
    )


def default_chain_strength(problem: IsingProblem, embedding: Embedding) -> float:
    """J_F = 2 * max|J_logical| * max chain length (a standard sufficient scale)."""
    max_len = max(len(chain) for chain in embedding.chains.values())
    scale = float(np.max(np.abs(problem.couplings), initial=0.0))
    if scale == 0.0:
        scale = float(np.max(np.abs(problem.fields), initial=0.0)) or 1.0
    return 2.0 * scale * max_len


def embed_problem(
    problem: IsingProblem, embedding: Embedding, chain_strength: float | None = None
) -> IsingProblem:
    """Build the physical problem over ``embedding.used_qubits`` (sorted order).

    Intra-chain couplers get +J_F (ferromagnetic here: aligned spins lower the
    energy), each logical coupling is split equally over all physical couplers
    between the two chains, and each logical field equally over the chain.
    """
    if problem.n != embedding.n_logical:
        raise EmbeddingError("embedding size does not match the logical problem")
    j_f = chain_strength if chain_strength is not None else embedding.chain_strength
    if j_f is None:
        j_f = default_chain_strength(problem, embedding)
    if j_f <= 0:
        raise ValueError("chain strength must be positive")
    verify_embedding(embedding)
    used = embedding.used_qubits
    pos = {q: i for i, q in enumerate(used)}
    np_phys = len(used)
    j = np.zeros((np_phys, np_phys))
    h = np.zeros(np_phys)
    g = embedding.graph
    for logical, chain in embedding.chains.items():
        share = problem.fields[logical] / len(chain)
        for q in chain:
            h[pos[q]] += share
        for a, b in itertools.combinations(chain, 2):
            if g.has_edge(a, b):
                j[pos[a], pos[b]] += j_f
                j[pos[b], pos[a]] += j_f
    for i, kq in itertools.combinations(range(problem.n), 2):
        coupling = problem.couplings[i, kq]
        if coupling == 0.0:
            continue
        phys_edges = [
            (a, b)
            for a in embedding.chains[i]
            for b in embedding.chains[kq]
            if g.has_edge(a, b)
        ]
        if not phys_edges:
            raise EmbeddingError(f"logical edge ({i}, {kq}) has no physical coupler")
        share = coupling / len(phys_edges)
        for a, b in phys_edges:
            j[pos[a], pos[b]] += share
            j[pos[b], pos[a]] += share
    return IsingProblem(j, h)


def decode(sample: np.ndarray, embedding: Embedding) -> tuple[np.ndarray, int]:
    """Majority-vote chains of a physical sample back to a logical state.

    The sample is indexed in ``embedding.used_qubits`` order.  Exact ties
    resolve to +1 (deterministic); ``broken`` counts chains whose members
    disagree.
    """
    sample = np.asarray(sample)
    used = embedding.used_qubits
    if sample.shape != (len(used),):
        raise ValueError("sample length does not match the embedding's qubit count")
    pos = {q: i for i, q in enumerate(used)}
    logical = np.zeros(embedding.n_logical, dtype=np.int8)
    broken = 0
    for i in range(embedding.n_logical):
        votes = np.array([sample[pos[q]] for q in embedding.chains[i]])
        if np.any(votes != votes[0]):
            broken += 1
        logical[i] = 1 if votes.sum() >= 0 else -1
    logical.setflags(write=False)
    return logical, broken


def gauge_transform(problem: IsingProblem, gauge: np.ndarray) -> IsingProblem:
    """Spin relabeling s_i -> g_i s_i: J' = g g^T * J, h' = g * h.

    Preserves the whole energy spectrum; ground states map by the same
    relabeling.
    """
    g = np.asarray(gauge, dtype=np.float64)
    if g.shape != (problem.n,) or not np.all(np.abs(g) == 1):
        raise ValueError("gauge must be a +-1 vector matching the problem size")
    return IsingProblem(np.outer(g, g) * problem.couplings, g * problem.fields)


def save_graph(graph: ChimeraGraph, path: str | Path) -> None:
    """Write the graph file: 'chimera m=<m>' header, 'dead <id>' lines, edges."""
    lines = [f"chimera m={graph.m}"]
    lines += [f"dead {q}" for q in sorted(graph.missing)]
    lines += [f"{a} {b}" for a, b in sorted(tuple(sorted(e)) for e in graph.graph.edges)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_graph(path: str | Path) -> ChimeraGraph:
    """Read a graph file; listed edges are verified against the generated graph."""
    lines = Path(path).read_text().splitlines()
    header = lines[0].split() if lines else []
    if len(header) != 2 or header[0] != "chimera" or not header[1].startswith("m="):
        raise ValueError(f"{path}: expected header 'chimera m=<m>'")
    m = int(header[1][2:])
    dead = []
    edges = set()
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "dead":
            dead.append(int(parts[1]))
        elif len(parts) == 2:
            a, b = int(parts[0]), int(parts[1])
            edges.add((min(a, b), max(a, b)))
        else:
            raise ValueError(f"{path}: line {lineno}: unrecognized entry")
    graph = chimera_graph(m, dead)
    if edges:
        expected = {tuple(sorted(e)) for e in graph.graph.edges}
        if edges != expected:
            raise ValueError(f"{path}: edge list does not match a chimera m={m} graph")
    return graph


def save_embedding(embedding: Embedding, path: str | Path) -> None:
    """Write 'chain <logical>: <id,id,...>' lines."""
    lines = [
        f"chain {logical}: {','.join(str(q) for q in chain)}"
        for logical, chain in sorted(embedding.chains.items())
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def load_embedding(path: str | Path, graph: nx.Graph) -> Embedding:
    """Read an embedding file; the physical graph provides adjacency context."""
    chains: dict[int, tuple[int, ...]] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not line.startswith("chain ") or ":" not in line:
            raise ValueError(f"{path}: line {lineno}: expected 'chain <logical>: <ids>'")
        head, ids = line.split(":", 1)
        logical = int(head.split()[1])
        chains[logical] = tuple(int(q) for q in ids.strip().split(","))
    if sorted(chains) != list(range(len(chains))):
        raise ValueError(f"{path}: chain indices must be 0..{len(chains) - 1}")
    return Embedding(chains, graph)

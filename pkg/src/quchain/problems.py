"""QUBO builders for common combinatorial problems and Ising conversion.

Every builder returns a :class:`QuboMatrix` in *minimize* form; problems that
are natively maximizations (max cut, set packing) are negated at build time
and record ``sense="max"`` so reports can restore the original objective.
Constant terms are kept in ``offset`` through every conversion, so the chain

    qubo.value(x) == ising.energy(2x - 1) + ising.offset
                  == graph.energy(2x - 1) + graph.offset

holds exactly for all binary assignments ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ModelError
from .graph import WeightGraph


@dataclass
class QuboMatrix:
    """Dense symmetric QUBO: minimize ``x^T q x + offset`` over binary x.

    Asymmetric input is symmetrized as ``(Q + Q^T)/2``, which preserves the
    quadratic form and the diagonal.
    """

    q: np.ndarray
    sense: str = "min"
    offset: float = 0.0

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ModelError(f"QUBO matrix must be square, got shape {q.shape}")
        if q.shape[0] < 1:
            raise ModelError("QUBO needs at least one variable")
        if self.sense not in ("min", "max"):
            raise ModelError(f"sense must be 'min' or 'max', got {self.sense!r}")
        self.q = (q + q.T) / 2.0
        self.offset = float(self.offset)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.q @ x) + self.offset


@dataclass
class IsingModel:
    """Spin Hamiltonian ``sum_{i<j} J_ij s_i s_j + sum_i h_i s_i`` over s=+/-1.

    ``offset`` is the constant dropped by the spin substitution, retained so
    ``energy(s) + offset`` matches the originating QUBO objective.
    """

    n: int
    j: dict[tuple[int, int], float] = field(default_factory=dict)
    h: np.ndarray = None
    offset: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ModelError("Ising model needs at least one spin")
        if self.h is None:
            self.h = np.zeros(self.n)
        self.h = np.asarray(self.h, dtype=float)
        if self.h.shape != (self.n,):
            raise ModelError(f"h must have length {self.n}")
        for (i, jj) in self.j:
            if not 0 <= i < jj < self.n:
                raise ModelError(f"coupling key ({i},{jj}) must satisfy 0 <= i < j < n")

    def energy(self, spins) -> float:
        """Hamiltonian value for a +/-1 assignment, offset excluded."""
        e = sum(c * spins[i] * spins[jj] for (i, jj), c in self.j.items())
        e += sum(self.h[i] * spins[i] for i in range(self.n))
        return float(e)


def _as_edge_list(graph):
    """Accept a networkx graph or an iterable of (u, v[, w]) tuples."""
    if hasattr(graph, "edges"):
        nodes = sorted(graph.nodes)
        edges = []
        for u, v, data in graph.edges(data=True):
            edges.append((u, v, float(data.get("weight", 1.0))))
    else:
        edges = []
        nodes_seen = set()
        for e in graph:
            if len(e) == 2:
                u, v, w = e[0], e[1], 1.0
            else:
                u, v, w = e[0], e[1], float(e[2])
            edges.append((u, v, w))
            nodes_seen.update((u, v))
        nodes = sorted(nodes_seen)
    for u in nodes:
        if not isinstance(u, (int, np.integer)):
            raise ModelError(f"node labels must be integers, got {u!r}")
    if nodes and nodes != list(range(len(nodes))):
        raise ModelError(f"node labels must be 0..n-1, got {nodes}")
    return len(nodes), edges


def qubo_from_maxcut(graph) -> QuboMatrix:
    """Max cut as a minimization: ``sum_(u,v) w_uv (2 x_u x_v - x_u - x_v)``.

    For every assignment the objective equals minus the weight of the cut, so
    minimizing recovers the maximum cut.
    """
    n, edges = _as_edge_list(graph)
    if not edges:
        raise ModelError("max cut needs a graph with at least one edge")
    q = np.zeros((n, n))
    for u, v, w in edges:
        if u == v:
            raise ModelError(f"self loop on node {u}")
        q[u, v] += w
        q[v, u] += w
        q[u, u] -= w
        q[v, v] -= w
    return QuboMatrix(q=q, sense="max")


def qubo_from_number_partition(numbers) -> QuboMatrix:
    """Two-way partition of positive integers, minimizing the squared residue.

    The objective is ``(sum_i n_i s_i)^2`` with ``s = 2x - 1``; expanded over
    binary variables this gives diagonal ``4 n_i^2 - 4 S n_i``, pair
    coefficient ``8 n_i n_j`` and constant ``S^2`` (stored in ``offset``).
    The minimum is 0 exactly when a perfect partition exists.
    """
    numbers = list(numbers)
    if not numbers:
        raise ModelError("number partition needs a non-empty list")
    for v in numbers:
        if not isinstance(v, (int, np.integer)) or v <= 0:
            raise ModelError(f"numbers must be positive integers, got {v!r}")
    n = len(numbers)
    total = float(sum(numbers))
    q = np.zeros((n, n))
    for i in range(n):
        q[i, i] = 4.0 * numbers[i] ** 2 - 4.0 * total * numbers[i]
        for jj in range(i + 1, n):
            q[i, jj] = 4.0 * numbers[i] * numbers[jj]
            q[jj, i] = q[i, jj]
    return QuboMatrix(q=q, sense="min", offset=total * total)


def qubo_from_graph_coloring(graph, k: int) -> QuboMatrix:
    """One-hot k-coloring penalty model with variable layout ``v*k + c``.

    Objective: ``sum_v (1 - sum_c x_{v,c})^2 + sum_{(u,v) in E} sum_c
    x_{u,c} x_{v,c}``; the minimum (after offset) is 0 iff the graph is
    k-colorable.  Variable ``v*k + c`` means "vertex v gets color c".
    """
    if k < 1:
        raise ModelError("color count must be at least 1")
    nv, edges = _as_edge_list(graph)
    if nv < 1:
        raise ModelError("graph coloring needs at least one vertex")
    n = nv * k
    q = np.zeros((n, n))
    for v in range(nv):
        for c in range(k):
            q[v * k + c, v * k + c] -= 1.0
            for c2 in range(c + 1, k):
                q[v * k + c, v * k + c2] += 1.0
                q[v * k + c2, v * k + c] += 1.0
    for u, v, _ in edges:
        for c in range(k):
            q[u * k + c, v * k + c] += 0.5
            q[v * k + c, u * k + c] += 0.5
    return QuboMatrix(q=q, sense="min", offset=float(nv))


def qubo_from_set_packing(universe_size: int, sets, penalty: float = 2.0) -> QuboMatrix:
    """Maximum set packing: ``-sum_i x_i + P * sum_{overlapping i<j} x_i x_j``.

    With ``penalty > 1`` the minimum selects a maximum pairwise-disjoint
    subfamily.  Set elements must be integers in ``[0, universe_size)``.
    """
    if penalty <= 1:
        raise ConfigError(f"penalty must exceed 1 to dominate, got {penalty}")
    sets = [frozenset(s) for s in sets]
    if not sets:
        raise ModelError("set packing needs at least one set")
    for s in sets:
        for e in s:
            if not isinstance(e, (int, np.integer)) or not 0 <= e < universe_size:
                raise ModelError(f"element {e!r} outside universe [0, {universe_size})")
    n = len(sets)
    q = np.zeros((n, n))
    for i in range(n):
        q[i, i] = -1.0
        for jj in range(i + 1, n):
            if sets[i] & sets[jj]:
                q[i, jj] = penalty / 2.0
                q[jj, i] = penalty / 2.0
    return QuboMatrix(q=q, sense="max")


def ising_from_qubo(qubo: QuboMatrix) -> IsingModel:
    """Spin substitution ``s = 2x - 1`` applied to a QUBO.

    ``J_ij = (Q_ij + Q_ji)/4`` for i<j, ``h_i = Q_ii/2 + sum_{j!=i}
    (Q_ij + Q_ji)/4``, ``offset = sum_{i<j} (Q_ij + Q_ji)/4 + sum_i Q_ii/2``
    plus the QUBO's own constant.  The identity
    ``energy(2x-1) + offset == qubo.value(x)`` holds exactly.
    """
    q = qubo.q
    n = qubo.n
    j: dict[tuple[int, int], float] = {}
    h = np.zeros(n)
    offset = qubo.offset
    for i in range(n):
        h[i] += q[i, i] / 2.0
        offset += q[i, i] / 2.0
        for jj in range(i + 1, n):
            c = (q[i, jj] + q[jj, i]) / 4.0
            if c != 0.0:
                j[(i, jj)] = c
            h[i] += c
            h[jj] += c
            offset += c
    return IsingModel(n=n, j=j, h=h, offset=offset)


def weight_graph_from_ising(m: IsingModel) -> WeightGraph:
    """Transcribe an Ising model into its weight graph.

    Biases become node weights (zero-weight nodes retained), nonzero
    couplings become weighted edges.
    """
    nodes = [(i, float(m.h[i])) for i in range(m.n)]
    edges = [(i, jj, c) for (i, jj), c in m.j.items() if c != 0.0]
    return WeightGraph(nodes=nodes, edges=edges, offset=m.offset)


def weight_graph_from_qubo(qubo: QuboMatrix) -> WeightGraph:
    return weight_graph_from_ising(ising_from_qubo(qubo))

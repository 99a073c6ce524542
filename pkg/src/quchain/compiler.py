"""Structured compilation of QAOA circuits onto a 1-D coupled chain.

The compiler is template driven.  A chain of n positions runs a fixed
four-step pattern (i = 0, 1, 2, ...):

    1. RZZ between all (p_2i, p_2i+1)
    2. RZZ between all (p_2i+1, p_2i+2)
    3. SWAP between all (p_2i+1, p_2i+2)
    4. SWAP between all (p_2i, p_2i+1)

Repeating the block brings every pair of initially-placed qubits adjacent in
exactly one RZZ layer; the full pattern takes 2n-2 cycles for even n and
2n-1 for odd n.  Because the pattern is fixed, the cycle at which any two
initial positions meet is a pure function of n (the ExeR table), which turns
initial-mapping selection into a search problem: place high-degree vertices
so that the last graph edge meets as early as possible, then truncate the
template after that cycle.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuits import Gate, QaoaParams
from .errors import CapacityError
from .graph import WeightGraph


@dataclass(frozen=True)
class TemplateLayer:
    kind: str  # "rzz" | "swap"
    pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Template:
    n: int
    layers: tuple[TemplateLayer, ...]

    @property
    def cycle_count(self) -> int:
        return len(self.layers)


@lru_cache(maxsize=256)
def build_template(n: int) -> Template:
    """Fixed RZZ/SWAP interleaving for an n-position chain.

    Even n runs n/2 four-step blocks with the two trailing SWAP layers
    trimmed (they carry no further meetings); odd n runs floor(n/2) blocks
    plus one closing RZZ layer.  Total cycles: 2n-2 / 2n-1.
    """
    if n < 2:
        raise ValueError(f"template needs at least 2 positions, got {n}")
    even_pairs = tuple((i, i + 1) for i in range(0, n - 1, 2))
    odd_pairs = tuple((i, i + 1) for i in range(1, n - 1, 2))
    block = (
        TemplateLayer("rzz", even_pairs),
        TemplateLayer("rzz", odd_pairs),
        TemplateLayer("swap", odd_pairs),
        TemplateLayer("swap", even_pairs),
    )
    layers: list[TemplateLayer] = []
    for _ in range(n // 2):
        layers.extend(block)
    if n % 2 == 0:
        layers = layers[:-2]
    else:
        layers.append(TemplateLayer("rzz", even_pairs))
    return Template(n=n, layers=tuple(layers))


@dataclass(frozen=True, eq=False)
class ExeRTable:
    """Cycle (1-based) at which two initial positions meet for their RZZ."""

    n: int
    table: np.ndarray  # (n, n) int64, symmetric, zero diagonal

    def cycle(self, a: int, b: int) -> int:
        return int(self.table[a, b])


@lru_cache(maxsize=256)
def build_exer_table(n: int) -> ExeRTable:
    """Simulate the template layer by layer and record every meeting cycle."""
    tpl = build_template(n)
    table = np.zeros((n, n), dtype=np.int64)
    item = list(range(n))  # position -> initially-placed index
    for cycle, layer in enumerate(tpl.layers, start=1):
        if layer.kind == "rzz":
            for a, b in layer.pairs:
                table[item[a], item[b]] = cycle
                table[item[b], item[a]] = cycle
        else:
            for a, b in layer.pairs:
                item[a], item[b] = item[b], item[a]
    return ExeRTable(n=n, table=table)


def search_initial_mapping(
    g: WeightGraph,
    n: int | None = None,
    b_max: int = 5,
    mirror_prune: bool = False,
) -> tuple[tuple[int, ...], int]:
    """Heuristic level search for a low-cost initial placement.

    Vertices are placed in descending-degree order (ties by ascending id),
    one tree level per vertex.  A node's cost is the latest RZZ cycle among
    edges to already-placed neighbors, accumulated as a running maximum along
    the path; per level, at most ``b_max`` nodes are retained per distinct
    cost value (insertion order: parent first, then ascending position).

    ``mirror_prune`` restricts the first vertex to positions
    0..ceil(n/2)-1.  That halving is lossless only for even n, where the
    pattern is mirror symmetric; it stays off by default.

    Returns the best mapping (logical -> position) and its predicted last
    RZZ cycle, which equals the last RZZ cycle of the schedule it induces.
    """
    k = g.n
    n = k if n is None else int(n)
    if k > n:
        raise CapacityError(f"graph has {k} nodes but the chain offers only {n}")
    if b_max < 1:
        raise ValueError("b_max must be at least 1")
    if n == 1:
        return (0,), 0
    exer = build_exer_table(n).table
    sentinel = np.int64(10 * n + 7)

    adj = g.adjacency()
    order = sorted(range(k), key=lambda v: (-len(adj[v]), v))
    maps = np.full((1, k), -1, dtype=np.int32)
    costs = np.zeros(1, dtype=np.int64)
    mapped: list[int] = []
    mapped_set: set[int] = set()
    for q in order:
        mnbrs = [m for m in adj[q] if m in mapped_set]
        pcount = maps.shape[0]
        if mnbrs:
            cand = np.empty((pcount, n), dtype=np.int64)
            cols = maps[:, mnbrs].astype(np.int64)
            chunk = max(1, 4_000_000 // max(1, n * len(mnbrs)))
            for s in range(0, pcount, chunk):
                e = min(pcount, s + chunk)
                cand[s:e] = exer[:, cols[s:e]].max(axis=2).T
        else:
            cand = np.zeros((pcount, n), dtype=np.int64)
        np.maximum(cand, costs[:, None], out=cand)
        if not mapped and mirror_prune:
            cand[:, (n + 1) // 2 :] = sentinel
        if mapped:
            occupied = maps[:, mapped].astype(np.int64)
            rows = np.repeat(np.arange(pcount), occupied.shape[1])
            cand[rows, occupied.ravel()] = sentinel
        flat = cand.ravel()  # parent-major, position-minor: the insertion order
        idx = np.argsort(flat, kind="stable")
        vals = flat[idx]
        starts = np.flatnonzero(np.r_[True, vals[1:] != vals[:-1]])
        keep: list[np.ndarray] = []
        for gi, s in enumerate(starts):
            if vals[s] >= sentinel:
                break
            e = starts[gi + 1] if gi + 1 < len(starts) else len(vals)
            keep.append(idx[s : min(e, s + b_max)])
        kept = np.concatenate(keep)
        parents = kept // n
        maps = maps[parents].copy()
        maps[:, q] = (kept % n).astype(np.int32)
        costs = flat[kept]
        mapped.append(q)
        mapped_set.add(q)
    best = int(np.argmin(costs))
    return tuple(int(x) for x in maps[best]), int(costs[best])


def exhaustive_best_mapping(
    g: WeightGraph, n: int | None = None
) -> tuple[tuple[int, ...], int]:
    """Brute-force optimum over all placements; factorial, test oracle only."""
    k = g.n
    n = k if n is None else int(n)
    if n > 9:
        raise ValueError("exhaustive mapping search is limited to n <= 9")
    if n == 1:
        return (0,), 0
    exer = build_exer_table(n).table
    best_map, best_cost = None, None
    for perm in itertools.permutations(range(n), k):
        c = max((exer[perm[u], perm[v]] for u, v, _ in g.edges), default=0)
        if best_cost is None or c < best_cost:
            best_map, best_cost = perm, int(c)
    return tuple(best_map), best_cost


@dataclass
class ScheduledCircuit:
    """Layered RZZ/SWAP/RZ/RX/H circuit over chain positions, pre-decomposition.

    ``cost_cycles`` counts the retained template cycles over all QAOA layers
    (empty RZZ cycles included); this is the pre-decomposition depth metric.
    """

    n: int
    layers: list[list[Gate]]
    final_layout: tuple[int, ...]
    cost_cycles: int
    last_rzz_cycle: int


def schedule(
    g: WeightGraph,
    mapping,
    params: QaoaParams,
    n_positions: int | None = None,
) -> ScheduledCircuit:
    """Place the QAOA circuit onto the template under an initial mapping.

    Layer 1 inserts RZZ(2*gamma_1*J_uv) at the cycle where (u, v) meet and
    keeps every SWAP layer up to the last inserted RZZ; everything after is
    truncated.  Bias rotations RZ(2*gamma_k*h_i) go at each cost block's
    first cycle on the logical qubit's current position (they commute with
    the diagonal block).  Even-indexed blocks replay the retained cycles in
    exact reverse with their own angle, so the chain permutation cancels
    pairwise and the final layout is the identity for even p.
    """
    k = g.n
    mapping = tuple(int(m) for m in mapping)
    if len(mapping) != k or len(set(mapping)) != k:
        raise ValueError(f"mapping must assign {k} distinct positions")
    n = (max(mapping) + 1) if n_positions is None else int(n_positions)
    if any(not 0 <= m < n for m in mapping):
        raise ValueError("mapping position out of range")

    # Walk the template once, recording which graph edges meet at each cycle.
    retained: list[tuple[str, list]] = []
    last_rzz = 0
    if n >= 2 and g.edges:
        tpl = build_template(n)
        edge_w = {(u, v): w for u, v, w in g.edges}
        log_at = [-1] * n
        for logical, pos in enumerate(mapping):
            log_at[pos] = logical
        cycles: list[tuple[str, list]] = []
        for cycle, layer in enumerate(tpl.layers, start=1):
            if layer.kind == "rzz":
                hits = []
                for a, b in layer.pairs:
                    u, v = log_at[a], log_at[b]
                    if u == -1 or v == -1:
                        continue
                    w = edge_w.get((min(u, v), max(u, v)))
                    if w is not None:
                        hits.append((a, b, w))
                cycles.append(("rzz", hits))
                if hits:
                    last_rzz = cycle
            else:
                cycles.append(("swap", list(layer.pairs)))
                for a, b in layer.pairs:
                    log_at[a], log_at[b] = log_at[b], log_at[a]
        retained = cycles[:last_rzz]

    layers: list[list[Gate]] = [[Gate("h", (mapping[l],)) for l in range(k)]]
    pos_of = list(mapping)

    def run_block(block_cycles, gamma):
        for kind, items in block_cycles:
            if kind == "rzz":
                if items:
                    layers.append(
                        [Gate("rzz", (a, b), 2.0 * gamma * w) for a, b, w in items]
                    )
            else:
                layers.append([Gate("swap", (a, b)) for a, b in items])
                inv = {p_: l for l, p_ in enumerate(pos_of)}
                for a, b in items:
                    la, lb = inv.get(a), inv.get(b)
                    if la is not None:
                        pos_of[la] = b
                    if lb is not None:
                        pos_of[lb] = a

    biased = [(i, w) for i, w in g.nodes if w != 0.0]
    for block in range(1, params.p + 1):
        gamma, beta = params.gamma[block - 1], params.beta[block - 1]
        if biased:
            layers.append([Gate("rz", (pos_of[i],), 2.0 * gamma * w) for i, w in biased])
        run_block(retained if block % 2 == 1 else list(reversed(retained)), gamma)
        layers.append([Gate("rx", (pos_of[l],), 2.0 * beta) for l in range(k)])

    return ScheduledCircuit(
        n=n,
        layers=layers,
        final_layout=tuple(pos_of),
        cost_cycles=params.p * last_rzz,
        last_rzz_cycle=last_rzz,
    )


@dataclass
class PhysicalCircuit:
    """Cycle-scheduled gates over chain wires plus the measurement layout.

    ``final_layout[l]`` is the wire that holds logical qubit ``l`` after all
    SWAP permutations; measuring it into classical bit ``l`` hides the chain
    permutation from downstream decoders.  ``depth`` is dependency-DAG depth
    with unit gate cost, independent of how cycles happen to be packed.
    """

    n: int
    cycles: list[list[Gate]]
    final_layout: tuple[int, ...]
    scheduled_cost_cycles: int | None = None
    initial_mapping: tuple[int, ...] | None = None

    def __post_init__(self):
        self.final_layout = tuple(int(x) for x in self.final_layout)
        for c, cycle in enumerate(self.cycles):
            seen: set[int] = set()
            for gate in cycle:
                if gate.kind not in ("h", "rx", "rz", "cnot"):
                    raise ValueError(f"physical circuits cannot hold {gate.kind!r}")
                for q in gate.qubits:
                    if not 0 <= q < self.n:
                        raise ValueError(f"wire {q} outside register of {self.n}")
                    if q in seen:
                        raise ValueError(f"wire {q} used twice in cycle {c}")
                    seen.add(q)

    @property
    def n_logical(self) -> int:
        return len(self.final_layout)

    def gates(self):
        for cycle in self.cycles:
            yield from cycle

    @property
    def gate_count(self) -> int:
        return sum(len(c) for c in self.cycles)

    @property
    def cnot_count(self) -> int:
        return sum(1 for g in self.gates() if g.kind == "cnot")

    @property
    def depth(self) -> int:
        front: dict[int, int] = {}
        depth = 0
        for gate in self.gates():
            c = 1 + max((front.get(q, 0) for q in gate.qubits), default=0)
            for q in gate.qubits:
                front[q] = c
            depth = max(depth, c)
        return depth


def decompose_gates(sched: ScheduledCircuit) -> PhysicalCircuit:
    """Expand RZZ and SWAP layers into the native CNOT/RZ gate set.

    RZZ(t)(a,b) -> CNOT(a,b) RZ(t)(b) CNOT(a,b); SWAP(a,b) -> CNOT(a,b)
    CNOT(b,a) CNOT(a,b); single-qubit gates pass through.
    """
    cycles: list[list[Gate]] = []
    for layer in sched.layers:
        kinds = {g.kind for g in layer}
        if kinds <= {"h", "rx", "rz"}:
            cycles.append(list(layer))
        elif kinds == {"rzz"}:
            cycles.append([Gate("cnot", g.qubits) for g in layer])
            cycles.append([Gate("rz", (g.qubits[1],), g.angle) for g in layer])
            cycles.append([Gate("cnot", g.qubits) for g in layer])
        elif kinds == {"swap"}:
            cycles.append([Gate("cnot", g.qubits) for g in layer])
            cycles.append([Gate("cnot", (g.qubits[1], g.qubits[0])) for g in layer])
            cycles.append([Gate("cnot", g.qubits) for g in layer])
        else:
            raise ValueError(f"mixed scheduled layer kinds {kinds}")
    return PhysicalCircuit(
        n=sched.n,
        cycles=cycles,
        final_layout=sched.final_layout,
        scheduled_cost_cycles=sched.cost_cycles,
    )


def optimize_circuit(pc: PhysicalCircuit) -> PhysicalCircuit:
    """Peephole pass: cancel adjacent identical CNOT pairs, then left-align.

    Two CNOTs with the same control and target cancel when no gate touches
    either wire in between; cancellations cascade.  Surviving gates are
    rescheduled as soon as possible, so the cycle count equals the dependency
    depth.  The unitary is preserved and depth/CNOT count never increase.
    """
    kept: list[list] = []  # [gate, {wire: predecessor index or None}, alive]
    last: dict[int, int] = {}
    for gate in pc.gates():
        if gate.kind == "cnot":
            ia = last.get(gate.qubits[0])
            ib = last.get(gate.qubits[1])
            if ia is not None and ia == ib:
                prev = kept[ia]
                if prev[0].kind == "cnot" and prev[0].qubits == gate.qubits:
                    prev[2] = False
                    for q, pi in prev[1].items():
                        if pi is None:
                            last.pop(q, None)
                        else:
                            last[q] = pi
                    continue
        kept.append([gate, {q: last.get(q) for q in gate.qubits}, True])
        for q in gate.qubits:
            last[q] = len(kept) - 1

    cycles: list[list[Gate]] = []
    front: dict[int, int] = {}
    for gate, _, alive in kept:
        if not alive:
            continue
        c = 1 + max((front.get(q, 0) for q in gate.qubits), default=0)
        while len(cycles) < c:
            cycles.append([])
        cycles[c - 1].append(gate)
        for q in gate.qubits:
            front[q] = c
    return PhysicalCircuit(
        n=pc.n,
        cycles=cycles,
        final_layout=pc.final_layout,
        scheduled_cost_cycles=pc.scheduled_cost_cycles,
        initial_mapping=pc.initial_mapping,
    )


def compile_graph(
    g: WeightGraph,
    params: QaoaParams,
    chain=None,
    b_max: int = 5,
) -> PhysicalCircuit:
    """Full pipeline: mapping search, scheduling, decomposition, peephole.

    ``chain`` lists the physical qubit ids of the target coupled path (its
    first ``g.n`` entries are used); default is the identity chain 0..n-1.
    """
    k = g.n
    if chain is None:
        chain = tuple(range(k))
    chain = tuple(int(c) for c in chain)
    if len(chain) < k:
        raise CapacityError(f"chain of {len(chain)} qubits cannot hold {k} logical qubits")
    chain = chain[:k]
    mapping, _ = search_initial_mapping(g, k, b_max)
    sched = schedule(g, mapping, params, n_positions=k)
    pc = optimize_circuit(decompose_gates(sched))
    cycles = [
        [Gate(gt.kind, tuple(chain[q] for q in gt.qubits), gt.angle) for gt in cyc]
        for cyc in pc.cycles
    ]
    return PhysicalCircuit(
        n=max(chain) + 1,
        cycles=cycles,
        final_layout=tuple(chain[p_] for p_ in pc.final_layout),
        scheduled_cost_cycles=sched.cost_cycles,
        initial_mapping=mapping,
    )


def layout_document(pc: PhysicalCircuit) -> str:
    """Layout JSON consumed by measurement decoders."""
    doc = {
        "logical_to_physical": list(pc.final_layout),
        "measure_order": list(range(pc.n_logical)),
    }
    return json.dumps(doc, indent=2) + "\n"

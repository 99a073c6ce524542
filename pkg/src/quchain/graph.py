"""Node- and edge-weighted graphs encoding Ising Hamiltonians, plus file I/O.

A :class:`WeightGraph` stores one spin Hamiltonian

    H = sum_{(u,v)} J_uv Z_u Z_v + sum_i h_i Z_i

as a graph: vertex ``i`` carries the bias ``h_i``, edge ``(u, v)`` carries
the coupling ``J_uv``.  A constant ``offset`` is kept alongside so that
energies can be reported in the units of the original objective function.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ParseError

#: JSON layout, also the on-disk interchange format:
#: {"offset": r, "nodes": [{"id": i, "w": r}...], "edges": [{"u": a, "v": b, "w": r}...]}
#: nodes sorted by id, edges sorted by (u, v) with u < v, reals written with
#: 17 significant digits.


def _fmt_real(x: float) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # canonical form folds -0.0 into 0.0
    return format(x, ".17g")


@dataclass
class WeightGraph:
    """Undirected weighted graph over nodes ``0..n-1``.

    ``nodes`` is a list of ``(id, weight)`` and ``edges`` a list of
    ``(u, v, weight)``.  The constructor canonicalizes: nodes are sorted by
    id, edges by ``(u, v)`` with ``u < v``.  Zero-weight nodes are retained;
    self loops and duplicate edges are rejected.
    """

    nodes: list[tuple[int, float]]
    edges: list[tuple[int, int, float]] = field(default_factory=list)
    offset: float = 0.0

    def __post_init__(self):
        nodes = sorted((int(i), float(w)) for i, w in self.nodes)
        if not nodes:
            raise ValueError("graph needs at least one node")
        ids = [i for i, _ in nodes]
        if ids != list(range(len(ids))):
            raise ValueError(f"node ids must be exactly 0..{len(ids) - 1}, got {ids}")
        edges = []
        seen = set()
        for u, v, w in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self loop on node {u}")
            if u > v:
                u, v = v, u
            if not (0 <= u < len(ids) and 0 <= v < len(ids)):
                raise ValueError(f"edge ({u},{v}) references a missing node")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            edges.append((u, v, float(w)))
        self.nodes = nodes
        self.edges = sorted(edges)
        self.offset = float(self.offset)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def node_weights(self) -> list[float]:
        return [w for _, w in self.nodes]

    def degree(self, i: int) -> int:
        return sum(1 for u, v, _ in self.edges if i in (u, v))

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {i: [] for i, _ in self.nodes}
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def energy(self, spins) -> float:
        """Hamiltonian value for a +/-1 assignment, offset excluded."""
        if len(spins) != self.n:
            raise ValueError(f"expected {self.n} spins, got {len(spins)}")
        for s in spins:
            if s not in (-1, 1):
                raise ValueError(f"spins must be +/-1, got {s}")
        e = sum(w * spins[u] * spins[v] for u, v, w in self.edges)
        e += sum(w * spins[i] for i, w in self.nodes)
        return float(e)

    def induced_subgraph(self, keep: set[int]) -> tuple["WeightGraph", list[int]]:
        """Induced subgraph on ``keep``, relabeled to 0..k-1.

        Returns the subgraph and the index map (subgraph node -> original id).
        """
        index_map = sorted(keep)
        pos = {orig: i for i, orig in enumerate(index_map)}
        nodes = [(pos[i], w) for i, w in self.nodes if i in keep]
        edges = [(pos[u], pos[v], w) for u, v, w in self.edges if u in keep and v in keep]
        return WeightGraph(nodes=nodes, edges=edges, offset=0.0), index_map


def dumps_graph(g: WeightGraph) -> str:
    """Render the canonical JSON text for ``g`` (deterministic bytes)."""
    lines = ["{", f'  "offset": {_fmt_real(g.offset)},', '  "nodes": [']
    node_rows = [f'    {{"id": {i}, "w": {_fmt_real(w)}}}' for i, w in g.nodes]
    lines.append(",\n".join(node_rows))
    lines.append('  ],')
    lines.append('  "edges": [')
    edge_rows = [f'    {{"u": {u}, "v": {v}, "w": {_fmt_real(w)}}}' for u, v, w in g.edges]
    lines.append(",\n".join(edge_rows))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(line for line in lines if line != "") + "\n"


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str):
    for k in obj:
        if k not in allowed:
            raise ParseError(f"unknown field {k!r}", where)
    for k in required:
        if k not in obj:
            raise ParseError(f"missing field {k!r}", where)


def _real(value, where: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ParseError(f"expected a real number, got {value!r}", where)
    return float(value)


def _intval(value, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError(f"expected an integer, got {value!r}", where)
    return value


def loads_graph(text: str) -> WeightGraph:
    """Parse the JSON interchange format; errors carry a field location."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, col {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "$")
    _require_keys(doc, {"offset", "nodes", "edges"}, {"offset", "nodes", "edges"}, "$")
    offset = _real(doc["offset"], "offset")
    if not isinstance(doc["nodes"], list) or not doc["nodes"]:
        raise ParseError("nodes must be a non-empty list", "nodes")
    nodes = []
    for k, row in enumerate(doc["nodes"]):
        where = f"nodes[{k}]"
        if not isinstance(row, dict):
            raise ParseError("node entry must be an object", where)
        _require_keys(row, {"id", "w"}, {"id", "w"}, where)
        nodes.append((_intval(row["id"], where + ".id"), _real(row["w"], where + ".w")))
    known = {i for i, _ in nodes}
    if len(known) != len(nodes):
        raise ParseError("duplicate node id", "nodes")
    edges = []
    if not isinstance(doc["edges"], list):
        raise ParseError("edges must be a list", "edges")
    for k, row in enumerate(doc["edges"]):
        where = f"edges[{k}]"
        if not isinstance(row, dict):
            raise ParseError("edge entry must be an object", where)
        _require_keys(row, {"u", "v", "w"}, {"u", "v", "w"}, where)
        u = _intval(row["u"], where + ".u")
        v = _intval(row["v"], where + ".v")
        if u not in known:
            raise ParseError(f"endpoint {u} is not a declared node", where + ".u")
        if v not in known:
            raise ParseError(f"endpoint {v} is not a declared node", where + ".v")
        edges.append((u, v, _real(row["w"], where + ".w")))
    try:
        return WeightGraph(nodes=nodes, edges=edges, offset=offset)
    except ValueError as exc:
        raise ParseError(str(exc), "$") from exc


def write_graph(g: WeightGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_graph(g))


def read_graph(path) -> WeightGraph:
    with open(path, encoding="utf-8") as f:
        return loads_graph(f.read())

"""Chip calibration ingestion and fidelity-aware subchain selection.

A subchain is a simple path in the chip's coupling graph; its overall
fidelity is the product of the two-qubit gate fidelities along it.  The
library maps chain length to candidate paths sorted by that product, rebuilt
from scratch on every calibration refresh.  Single-qubit fidelity and
T1/T2 are ingested and reported but do not enter the ranking.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import CapacityError, ConfigError, ParseError


@dataclass(frozen=True)
class Qubit:
    id: int
    t1_us: float
    t2_us: float
    f1q: float


@dataclass(frozen=True)
class Coupler:
    a: int
    b: int
    f2q: float


@dataclass(frozen=True, eq=False)
class ChipModel:
    qubits: tuple[Qubit, ...]
    couplers: tuple[Coupler, ...]

    def __post_init__(self):
        ids = [q.id for q in self.qubits]
        if len(set(ids)) != len(ids):
            raise ParseError("duplicate qubit id", "qubits")
        known = set(ids)
        seen = set()
        for k, c in enumerate(self.couplers):
            where = f"couplers[{k}]"
            if c.a not in known:
                raise ParseError(f"endpoint {c.a} is not a declared qubit", where + ".a")
            if c.b not in known:
                raise ParseError(f"endpoint {c.b} is not a declared qubit", where + ".b")
            if c.a == c.b:
                raise ParseError("coupler endpoints must differ", where)
            key = (min(c.a, c.b), max(c.a, c.b))
            if key in seen:
                raise ParseError(f"duplicate coupler {key}", where)
            seen.add(key)

    @property
    def n(self) -> int:
        return len(self.qubits)

    def adjacency(self) -> dict[int, dict[int, float]]:
        adj: dict[int, dict[int, float]] = {q.id: {} for q in self.qubits}
        for c in self.couplers:
            adj[c.a][c.b] = c.f2q
            adj[c.b][c.a] = c.f2q
        return adj


def _field(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(f"missing field {key!r}", where)
    return obj[key]


def _num(value, where: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ParseError(f"expected a number, got {value!r}", where)
    return float(value)


def _fidelity(value, where: str) -> float:
    f = _num(value, where)
    if not 0.0 <= f <= 1.0:
        raise ParseError(f"fidelity {f} outside [0, 1]", where)
    return f


def loads_calibration(text: str) -> ChipModel:
    """Parse a calibration document; errors carry the offending field path."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, col {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "$")
    qubits = []
    raw_qubits = _field(doc, "qubits", "$")
    if not isinstance(raw_qubits, list) or not raw_qubits:
        raise ParseError("qubits must be a non-empty list", "qubits")
    for k, row in enumerate(raw_qubits):
        where = f"qubits[{k}]"
        if not isinstance(row, dict):
            raise ParseError("qubit entry must be an object", where)
        qubits.append(
            Qubit(
                id=int(_num(_field(row, "id", where), where + ".id")),
                t1_us=_num(_field(row, "t1_us", where), where + ".t1_us"),
                t2_us=_num(_field(row, "t2_us", where), where + ".t2_us"),
                f1q=_fidelity(_field(row, "f1q", where), where + ".f1q"),
            )
        )
    couplers = []
    for k, row in enumerate(doc.get("couplers", [])):
        where = f"couplers[{k}]"
        if not isinstance(row, dict):
            raise ParseError("coupler entry must be an object", where)
        couplers.append(
            Coupler(
                a=int(_num(_field(row, "a", where), where + ".a")),
                b=int(_num(_field(row, "b", where), where + ".b")),
                f2q=_fidelity(_field(row, "f2q", where), where + ".f2q"),
            )
        )
    return ChipModel(qubits=tuple(qubits), couplers=tuple(couplers))


def load_calibration(path) -> ChipModel:
    with open(path, encoding="utf-8") as f:
        return loads_calibration(f.read())


def _canonical(path: tuple[int, ...]) -> tuple[int, ...]:
    # Reversals describe the same chain; keep the lexicographically smaller end first.
    return path if path[0] <= path[-1] else tuple(reversed(path))


def path_fidelity(chip: ChipModel, path) -> float:
    adj = chip.adjacency()
    f = 1.0
    for a, b in zip(path, path[1:]):
        if b not in adj[a]:
            raise ValueError(f"({a},{b}) is not a coupler")
        f *= adj[a][b]
    return f


def enumerate_simple_paths(chip: ChipModel, length: int) -> list[tuple[int, ...]]:
    """All simple paths of ``length`` qubits, deduplicated up to reversal.

    Exponential; the exhaustive oracle for small chips only.
    """
    if chip.n > 12:
        raise CapacityError("exhaustive path enumeration is limited to 12 qubits")
    adj = chip.adjacency()
    out: set[tuple[int, ...]] = set()

    def grow(path: tuple[int, ...]):
        if len(path) == length:
            out.add(_canonical(path))
            return
        for nxt in adj[path[-1]]:
            if nxt not in path:
                grow(path + (nxt,))

    for q in adj:
        grow((q,))
    return sorted(out)


@dataclass(frozen=True, eq=False)
class SubchainLibrary:
    """Chain length -> fidelity-sorted candidate paths, plus build settings.

    Immutable once built; :func:`refresh` returns a brand-new library so
    concurrent readers never observe partial state.
    """

    chip: ChipModel
    entries: dict[int, list[tuple[int, ...]]]
    max_len: int
    beam_width: int
    exhaustive: bool

    def fidelity(self, path) -> float:
        return path_fidelity(self.chip, path)

    def to_json(self) -> str:
        doc = {
            str(k): [
                {"path": list(p), "fidelity": format(self.fidelity(p), ".17g")}
                for p in paths
            ]
            for k, paths in sorted(self.entries.items())
        }
        return json.dumps(doc, indent=2) + "\n"


#: Chips up to this size get the exact per-state search instead of the beam.
EXACT_SEARCH_LIMIT = 12


def _collect_beam(chip: ChipModel, max_len: int, beam_width: int):
    """Greedy beam: extend the best ``beam_width`` paths per length at both
    ends.  Scales to large chips but may miss the global optimum."""
    adj = chip.adjacency()

    def rank(paths):
        return sorted(paths, key=lambda p: (-path_fidelity(chip, p), p))

    entries: dict[int, list[tuple[int, ...]]] = {}
    beam = rank({_canonical((c.a, c.b)) for c in chip.couplers})[:beam_width]
    entries[2] = list(beam)
    for k in range(3, max_len + 1):
        grown: set[tuple[int, ...]] = set()
        for path in beam:
            for nxt in adj[path[-1]]:
                if nxt not in path:
                    grown.add(_canonical(path + (nxt,)))
            for nxt in adj[path[0]]:
                if nxt not in path:
                    grown.add(_canonical((nxt,) + path))
        beam = rank(grown)[:beam_width]
        entries[k] = list(beam)
    return entries


def _collect_exact(chip: ChipModel, max_len: int, beam_width: int):
    """Dynamic program over (vertex set, endpoint pair) states.

    Keeping the best path per state dominates every simple path with the
    same support and ends, so the per-length fidelity argmax is exact; the
    state count is O(2^n n^2), affordable for small chips only.
    """
    adj = chip.adjacency()
    ids = [q.id for q in chip.qubits]
    bit = {qid: 1 << i for i, qid in enumerate(ids)}
    # state key (mask, lo_end, hi_end) -> (fidelity, canonical path)
    frontier: dict[tuple[int, int, int], tuple[float, tuple[int, ...]]] = {}
    for c in chip.couplers:
        lo, hi = min(c.a, c.b), max(c.a, c.b)
        frontier[(bit[lo] | bit[hi], lo, hi)] = (c.f2q, (lo, hi))
    entries: dict[int, list[tuple[int, ...]]] = {}

    def harvest(states):
        ranked = sorted(states.values(), key=lambda t: (-t[0], t[1]))
        return [path for _, path in ranked[:beam_width]]

    entries[2] = harvest(frontier)
    for k in range(3, max_len + 1):
        grown: dict[tuple[int, int, int], tuple[float, tuple[int, ...]]] = {}
        for (mask, lo, hi), (f, path) in frontier.items():
            for end in (path[0], path[-1]):
                for nxt, fe in adj[end].items():
                    if mask & bit[nxt]:
                        continue
                    new_path = (nxt,) + path if end == path[0] else path + (nxt,)
                    new_path = _canonical(new_path)
                    key = (mask | bit[nxt], new_path[0], new_path[-1])
                    cand = (f * fe, new_path)
                    old = grown.get(key)
                    if old is None or (-cand[0], cand[1]) < (-old[0], old[1]):
                        grown[key] = cand
        frontier = grown
        entries[k] = harvest(frontier)
    return entries


def build_subchain_library(
    chip: ChipModel,
    max_len: int | None = None,
    beam_width: int = 64,
    exhaustive: bool = False,
) -> SubchainLibrary:
    """Collect high-fidelity simple paths for every length in [2, max_len].

    Chips of at most :data:`EXACT_SEARCH_LIMIT` qubits use an exact search
    (best path per vertex-set/endpoint state), so the head of every entry is
    the true fidelity argmax; larger chips fall back to a beam search seeded
    from every coupler and extended at both ends, keeping ``beam_width``
    candidates per length (deduplicated up to reversal).  With
    ``exhaustive=True`` all simple paths are enumerated and listed, the
    reference behavior for tests.  Lengths no search can reach map to empty
    lists.
    """
    requested = chip.n if max_len is None else max_len
    if requested > chip.n:
        raise ConfigError(f"max_len {requested} exceeds the {chip.n}-qubit chip")
    if requested < 2:
        raise ConfigError("max_len must be at least 2")

    if exhaustive:
        entries = {
            k: sorted(
                enumerate_simple_paths(chip, k),
                key=lambda p: (-path_fidelity(chip, p), p),
            )
            for k in range(2, requested + 1)
        }
    elif chip.n <= EXACT_SEARCH_LIMIT:
        entries = _collect_exact(chip, requested, beam_width)
    else:
        entries = _collect_beam(chip, requested, beam_width)
    return SubchainLibrary(
        chip=chip,
        entries=entries,
        max_len=requested,
        beam_width=beam_width,
        exhaustive=exhaustive,
    )


def select_subchain(lib: SubchainLibrary, k: int) -> tuple[int, ...]:
    """Best stored chain for k qubits.

    Takes the head entry under the smallest key >= k; when that chain is
    longer than k, the contiguous k-window with the highest fidelity product
    is returned (leftmost on ties).
    """
    if k < 2:
        raise ValueError("subchain selection needs k >= 2")
    keys = sorted(key for key, paths in lib.entries.items() if key >= k and paths)
    if not keys:
        raise CapacityError(f"no stored chain offers {k} qubits")
    chain = lib.entries[keys[0]][0]
    if len(chain) == k:
        return chain
    best, best_f = None, -math.inf
    for s in range(len(chain) - k + 1):
        window = chain[s : s + k]
        f = lib.fidelity(window)
        if f > best_f:
            best, best_f = window, f
    return best


def refresh(lib: SubchainLibrary, chip: ChipModel) -> SubchainLibrary:
    """Rebuild against fresh calibration data; returns a new immutable library."""
    return build_subchain_library(
        chip,
        max_len=min(lib.max_len, chip.n),
        beam_width=lib.beam_width,
        exhaustive=lib.exhaustive,
    )

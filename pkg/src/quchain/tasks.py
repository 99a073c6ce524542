"""Asynchronous sampling jobs over an append-only on-disk store.

Tasks move queued -> running -> completed | failed, one JSON record per line;
on reload the last line per id wins, so the log is crash safe and diffable.
The built-in backend samples exact simulator probabilities with a seeded
generator; a remote backend can be slotted in by implementing ``run``.

Bit convention: measured bit b maps to spin z = 1 - 2b (bit 0 is the +1
eigenstate of Pauli Z).  Count keys are bitstrings in logical order:
character l is classical bit l.
"""

from __future__ import annotations

import json
import queue
import secrets
import threading
import time
from dataclasses import dataclass, replace

from .circuits import Gate
from .compiler import PhysicalCircuit
from .errors import ResultUnavailableError, TaskNotFoundError
from .graph import WeightGraph
from .qasm import emit, parse
from .simulator import sample_counts, simulate_gates

_TRANSITIONS = {
    "queued": {"running"},
    "running": {"completed", "failed"},
    "completed": set(),
    "failed": set(),
}


@dataclass
class TaskRecord:
    id: str
    name: str
    qasm: str
    shots: int
    status: str
    seed: int | None = None
    counts: dict[str, int] | None = None
    error: str | None = None
    created_at: float = 0.0
    updated_at: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "name": self.name,
                "qasm": self.qasm,
                "shots": self.shots,
                "status": self.status,
                "seed": self.seed,
                "counts": self.counts,
                "error": self.error,
                "created_at": self.created_at,
                "updated_at": self.updated_at,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "TaskRecord":
        doc = json.loads(line)
        return cls(**doc)


class TaskStore:
    """JSON-lines record log; one writer, any number of readers."""

    def __init__(self, path):
        self.path = path
        self._lock = threading.Lock()

    def append(self, record: TaskRecord):
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(record.to_json() + "\n")
                f.flush()

    def load(self) -> dict[str, TaskRecord]:
        records: dict[str, TaskRecord] = {}
        try:
            with open(self.path, encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if line:
                        rec = TaskRecord.from_json(line)
                        records[rec.id] = rec
        except FileNotFoundError:
            pass
        return records


class LocalSampler:
    """Samples the exact output distribution of a parsed QASM circuit.

    Only the qubits that carry gates or measurements are simulated; sampled
    basis states are decoded through the measure map so returned bitstrings
    are already in logical order.  Deterministic for a fixed seed.
    """

    def run(self, qasm_text: str, shots: int, seed=None) -> dict[str, int]:
        pc = parse(qasm_text)
        used = sorted(
            {q for g in pc.gates() for q in g.qubits} | set(pc.final_layout)
        )
        index = {q: i for i, q in enumerate(used)}
        gates = [
            Gate(g.kind, tuple(index[q] for q in g.qubits), g.angle)
            for g in pc.gates()
        ]
        state = simulate_gates(len(used), gates)
        counts: dict[str, int] = {}
        for basis, c in sample_counts(state, shots, seed).items():
            bits = "".join(
                str((basis >> index[phys]) & 1) for phys in pc.final_layout
            )
            counts[bits] = counts.get(bits, 0) + c
        return counts


class TaskService:
    """FIFO executor with persistent task records.

    Invalid circuits are rejected at submit time, before anything is
    enqueued.  A capacity or backend failure marks the task failed; the
    service keeps going.  On restart, terminal records are reloaded intact,
    interrupted running tasks are marked failed, and queued ones re-enqueued.
    """

    def __init__(self, store_path, backend=None, read_only: bool = False):
        self.store = TaskStore(store_path)
        self.backend = backend if backend is not None else LocalSampler()
        self.read_only = read_only
        self._lock = threading.Lock()
        self._records = self.store.load()
        self._done: dict[str, threading.Event] = {}
        self._queue: queue.Queue[str] = queue.Queue()
        self._worker = None
        if read_only:
            return
        for rec in list(self._records.values()):
            if rec.status == "running":
                self._transition(rec.id, "failed", error="interrupted by restart")
            elif rec.status == "queued":
                self._done[rec.id] = threading.Event()
                self._queue.put(rec.id)
        self._stop = threading.Event()
        self._worker = threading.Thread(target=self._loop, daemon=True)
        self._worker.start()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._worker is not None:
            self._stop.set()
            self._worker.join(timeout=10.0)

    def drain(self):
        """Block until every queued task reaches a terminal state."""
        with self._lock:
            pending = [r.id for r in self._records.values() if r.status in ("queued", "running")]
        for task_id in pending:
            self.wait(task_id)

    def _transition(self, task_id: str, status: str, counts=None, error=None):
        with self._lock:
            rec = self._records[task_id]
            if status not in _TRANSITIONS[rec.status]:
                raise ValueError(f"illegal transition {rec.status} -> {status}")
            rec = replace(
                rec, status=status, counts=counts, error=error, updated_at=time.time()
            )
            self._records[task_id] = rec
            self.store.append(rec)

    def _loop(self):
        while not self._stop.is_set():
            try:
                task_id = self._queue.get(timeout=0.05)
            except queue.Empty:
                continue
            rec = self._records[task_id]
            self._transition(task_id, "running")
            try:
                counts = self.backend.run(rec.qasm, rec.shots, rec.seed)
                total = sum(counts.values())
                if total != rec.shots:
                    raise ValueError(f"backend returned {total} counts for {rec.shots} shots")
                self._transition(task_id, "completed", counts=counts)
            except Exception as exc:  # failure terminates the task, not the service
                self._transition(task_id, "failed", error=str(exc))
            self._done[task_id].set()

    def submit(self, circuit, shots: int, name: str = "", wait: bool = False, seed=None):
        """Enqueue a sampling job; returns the task id, or the terminal record
        when ``wait`` is set."""
        if self.read_only:
            raise ValueError("service opened read-only")
        if shots < 1:
            raise ValueError(f"shots must be positive, got {shots}")
        if isinstance(circuit, PhysicalCircuit):
            qasm_text = emit(circuit)
        else:
            qasm_text = str(circuit)
        parse(qasm_text)  # reject invalid circuits before enqueueing
        task_id = secrets.token_hex(16)
        rec = TaskRecord(
            id=task_id,
            name=name,
            qasm=qasm_text,
            shots=int(shots),
            status="queued",
            seed=seed,
            created_at=time.time(),
            updated_at=time.time(),
        )
        with self._lock:
            self._records[task_id] = rec
            self._done[task_id] = threading.Event()
            self.store.append(rec)
        self._queue.put(task_id)
        if wait:
            self._done[task_id].wait()
            return self.record(task_id)
        return task_id

    def record(self, task_id: str) -> TaskRecord:
        with self._lock:
            if task_id not in self._records:
                raise TaskNotFoundError(f"unknown task id {task_id!r}")
            return self._records[task_id]

    def status(self, task_id: str) -> str:
        return self.record(task_id).status

    def result(self, task_id: str) -> dict[str, int]:
        rec = self.record(task_id)
        if rec.status == "completed":
            return dict(rec.counts)
        if rec.status == "failed":
            raise ResultUnavailableError(
                f"task failed: {rec.error}", status=rec.status
            )
        raise ResultUnavailableError(
            f"task is {rec.status}, result not ready", status=rec.status
        )

    def wait(self, task_id: str, timeout: float | None = None) -> TaskRecord:
        rec = self.record(task_id)
        if rec.status in ("completed", "failed"):
            return rec
        event = self._done.get(task_id)
        if event is not None:
            event.wait(timeout)
        return self.record(task_id)


@dataclass(frozen=True)
class SolutionRow:
    bitstring: str
    count: int
    energy: float
    objective: float


@dataclass
class RankedSolutions:
    """Sampled bitstrings scored and sorted ascending by Hamiltonian energy."""

    rows: list[SolutionRow]
    top: int

    @property
    def solutions(self) -> list[SolutionRow]:
        return self.rows[: self.top]


def process_results(
    counts: dict[str, int], g: WeightGraph, top: int = 2, sense: str = "min"
) -> RankedSolutions:
    """Score each sampled bitstring by C(z) with z = 1 - 2*bit.

    ``objective`` restores the original problem value: energy plus the
    graph's offset, re-negated for maximization problems.  Rows are sorted by
    (energy, -count); the first ``top`` rows are flagged as solutions.
    """
    rows = []
    for bits, count in counts.items():
        if len(bits) != g.n:
            raise ValueError(f"bitstring {bits!r} does not cover {g.n} qubits")
        z = [1 - 2 * int(b) for b in bits]
        energy = g.energy(z)
        objective = energy + g.offset
        if sense == "max":
            objective = -objective
        rows.append(SolutionRow(bits, int(count), energy, objective))
    rows.sort(key=lambda r: (r.energy, -r.count))
    return RankedSolutions(rows=rows, top=top)

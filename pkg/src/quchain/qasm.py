"""OpenQASM 2.0 emission and parsing, restricted to the compiled gate set.

The subset is exactly ``h``, ``rx``, ``rz``, ``cx`` and ``measure`` over one
quantum and one classical register.  Angles are printed with 17 significant
digits so that parse(emit(c)) reproduces every angle bit for bit.
"""

from __future__ import annotations

import re

from .circuits import Gate
from .compiler import PhysicalCircuit
from .errors import ParseError

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";'


def _fmt_angle(x: float) -> str:
    return format(float(x), ".17g")


def emit(pc: PhysicalCircuit) -> str:
    """Deterministic QASM text: header, registers, gates in schedule order,
    one measurement per logical qubit (``measure q[phys] -> c[logical];``)."""
    lines = [HEADER, f"qreg q[{pc.n}];", f"creg c[{pc.n_logical}];"]
    for gate in pc.gates():
        if gate.kind == "h":
            lines.append(f"h q[{gate.qubits[0]}];")
        elif gate.kind == "rx":
            lines.append(f"rx({_fmt_angle(gate.angle)}) q[{gate.qubits[0]}];")
        elif gate.kind == "rz":
            lines.append(f"rz({_fmt_angle(gate.angle)}) q[{gate.qubits[0]}];")
        elif gate.kind == "cnot":
            lines.append(f"cx q[{gate.qubits[0]}],q[{gate.qubits[1]}];")
        else:
            raise ValueError(f"gate kind {gate.kind!r} is outside the QASM subset")
    for logical, phys in enumerate(pc.final_layout):
        lines.append(f"measure q[{phys}] -> c[{logical}];")
    return "\n".join(lines) + "\n"


_RE_QREG = re.compile(r"^qreg\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]\s*;$")
_RE_CREG = re.compile(r"^creg\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]\s*;$")
_RE_H = re.compile(r"^h\s+q\[(\d+)\]\s*;$")
_RE_ROT = re.compile(r"^(rx|rz)\(([^)]*)\)\s*q\[(\d+)\]\s*;$")
_RE_CX = re.compile(r"^cx\s+q\[(\d+)\]\s*,\s*q\[(\d+)\]\s*;$")
_RE_MEASURE = re.compile(r"^measure\s+q\[(\d+)\]\s*->\s*c\[(\d+)\]\s*;$")
_RE_WORD = re.compile(r"^([A-Za-z_]\w*)")

_KNOWN_GATES = ("h", "rx", "rz", "cx", "measure")


def parse(text: str) -> PhysicalCircuit:
    """Parse a document from the emitted subset back into a circuit.

    Each gate lands in its own cycle, preserving the textual order; the
    measurement map is rebuilt into ``final_layout``.  Errors carry the line
    and column of the offending token.
    """
    lines = text.split("\n")
    stmts = []
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if stripped:
            stmts.append((lineno, raw.index(stripped[0]) + 1, stripped))

    def fail(msg, lineno, col=1):
        raise ParseError(msg, f"line {lineno}, col {col}")

    if not stmts or stmts[0][2] != "OPENQASM 2.0;":
        lineno = stmts[0][0] if stmts else 1
        fail('document must start with "OPENQASM 2.0;"', lineno)
    if len(stmts) < 2 or stmts[1][2] != 'include "qelib1.inc";':
        lineno = stmts[1][0] if len(stmts) > 1 else stmts[0][0]
        fail('expected \'include "qelib1.inc";\'', lineno)

    if len(stmts) < 4:
        fail("missing register declarations", stmts[-1][0])
    lineno, col, stmt = stmts[2]
    m = _RE_QREG.match(stmt)
    if not m:
        fail("expected qreg declaration", lineno, col)
    if m.group(1) != "q":
        fail(f"quantum register must be named 'q', got {m.group(1)!r}", lineno, col)
    nq = int(m.group(2))
    lineno, col, stmt = stmts[3]
    m = _RE_CREG.match(stmt)
    if not m:
        fail("expected creg declaration", lineno, col)
    if m.group(1) != "c":
        fail(f"classical register must be named 'c', got {m.group(1)!r}", lineno, col)
    nc = int(m.group(2))
    if nq < 1 or nc < 1:
        fail("registers must be non-empty", lineno, col)

    gates: list[Gate] = []
    layout: dict[int, int] = {}

    def check_q(q, lineno, col):
        if q >= nq:
            fail(f"q[{q}] outside register of size {nq}", lineno, col)
        return q

    for lineno, col, stmt in stmts[4:]:
        if not stmt.endswith(";"):
            fail("missing ';'", lineno, col + len(stmt))
        word = _RE_WORD.match(stmt)
        name = word.group(1) if word else ""
        if name not in _KNOWN_GATES:
            fail(f"unknown gate {name!r}", lineno, col)
        if name == "h":
            m = _RE_H.match(stmt)
            if not m:
                fail("malformed h statement", lineno, col)
            gates.append(Gate("h", (check_q(int(m.group(1)), lineno, col),)))
        elif name in ("rx", "rz"):
            m = _RE_ROT.match(stmt)
            if not m:
                fail(f"malformed {name} statement", lineno, col)
            try:
                angle = float(m.group(2))
            except ValueError:
                fail(f"malformed real {m.group(2)!r}", lineno, col + len(name) + 1)
            gates.append(
                Gate(name, (check_q(int(m.group(3)), lineno, col),), angle)
            )
        elif name == "cx":
            m = _RE_CX.match(stmt)
            if not m:
                fail("malformed cx statement", lineno, col)
            a = check_q(int(m.group(1)), lineno, col)
            b = check_q(int(m.group(2)), lineno, col)
            if a == b:
                fail("cx operands must differ", lineno, col)
            gates.append(Gate("cnot", (a, b)))
        else:
            m = _RE_MEASURE.match(stmt)
            if not m:
                fail("malformed measure statement", lineno, col)
            q = check_q(int(m.group(1)), lineno, col)
            cbit = int(m.group(2))
            if cbit >= nc:
                fail(f"c[{cbit}] outside register of size {nc}", lineno, col)
            if cbit in layout:
                fail(f"classical bit {cbit} measured twice", lineno, col)
            layout[cbit] = q

    missing = [b for b in range(nc) if b not in layout]
    if missing:
        fail(f"classical bits never assigned: {missing}", stmts[-1][0])
    return PhysicalCircuit(
        n=nq,
        cycles=[[g] for g in gates],
        final_layout=tuple(layout[b] for b in range(nc)),
    )

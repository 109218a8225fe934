"""Line-oriented text format for circuits.

::

    # comment
    QUBITS 3
    H 0
    CNOT 0 2
    PHASE 1 0.52359877559829882
    U 0 <re00> <im00> <re01> <im01> <re10> <im10> <re11> <im11>

Floats are written with 17 significant digits so that parsing a written
circuit reproduces it exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .qsim import Circuit, Gate


def _num(x: float) -> str:
    return format(float(x), ".17g")


def format_gate(g: Gate) -> str:
    parts = [g.name, *map(str, g.qubits)]
    if g.name in ("PHASE", "ROTY"):
        parts.append(_num(g.param))
    elif g.name == "U":
        for z in np.asarray(g.matrix).reshape(-1):
            parts += [_num(z.real), _num(z.imag)]
    return " ".join(parts)


def dumps(c: Circuit) -> str:
    return "\n".join([f"QUBITS {c.num_qubits}", *map(format_gate, c.gates)]) + "\n"


def loads(text: str) -> Circuit:
    num_qubits = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        name = tok[0].upper()
        try:
            if name == "QUBITS":
                num_qubits = int(tok[1])
            elif name == "CNOT":
                gates.append(Gate(name, (int(tok[1]), int(tok[2]))))
            elif name in ("PHASE", "ROTY"):
                gates.append(Gate(name, (int(tok[1]),), float(tok[2])))
            elif name == "U":
                vals = [float(v) for v in tok[2:10]]
                if len(vals) != 8:
                    raise ValueError("U needs 8 numbers")
                m = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
                gates.append(Gate("U", (int(tok[1]),), matrix=m.reshape(2, 2)))
            else:
                gates.append(Gate(name, (int(tok[1]),)))
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}: {exc}") from None
    if num_qubits is None:
        num_qubits = max((max(g.qubits) for g in gates), default=0) + 1
    return Circuit(num_qubits, gates)


def write(c: Circuit, path: str | Path) -> None:
    Path(path).write_text(dumps(c))


def read(path: str | Path) -> Circuit:
    return loads(Path(path).read_text())

"""Circuit containers and their exchange formats.

Two circuit flavors exist.  A :class:`ModelCircuit` is the abstract object a
benchmark run starts from: layers of SU(4) blocks on logical qubits with no
notion of hardware.  A :class:`PhysicalCircuit` is the routed and expanded
form: a flat instruction list over device qubit ids, ending in measurements.

Measurement order carries the classical bit mapping: the j-th Measure
instruction produces output bit j (bitstrings read left to right as bit
0, 1, ...).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .gates import (
    Gate,
    GateKind,
    ONE_QUBIT_KINDS,
    SWAP_MATRIX,
    TWO_QUBIT_KINDS,
    su4,
)


@dataclass(frozen=True)
class ModelCircuit:
    """Layered logical circuit; within a layer gates touch disjoint qubits."""

    width: int
    layers: tuple[tuple[Gate, ...], ...]

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError("circuit width must be positive")
        for t, layer in enumerate(self.layers):
            seen: set[int] = set()
            for g in layer:
                for q in g.qubits:
                    if not 0 <= q < self.width:
                        raise ValueError(f"layer {t}: qubit {q} out of range")
                    if q in seen:
                        raise ValueError(f"layer {t}: qubit {q} used twice")
                    seen.add(q)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def gates(self):
        for layer in self.layers:
            yield from layer

    def gate_count(self) -> int:
        return sum(len(layer) for layer in self.layers)


def consolidate_blocks(circuit: ModelCircuit) -> ModelCircuit:
    """Merge runs of blocks acting on the same qubit pair into one block.

    A block stays open while nothing else touches its qubits; a later gate
    on the same pair composes into it (orientation-aligned), and the merged
    block keeps the earliest layer position.  Layers emptied by merging are
    dropped.  The circuit unitary is unchanged.
    """
    blocks: list[dict] = []  # {"layer", "slot", "qubits", "u"}
    open_on: dict[int, dict | None] = {q: None for q in range(circuit.width)}
    for t, layer in enumerate(circuit.layers):
        for slot, g in enumerate(layer):
            a, b = g.qubits
            u = np.asarray(g.unitary, dtype=complex)
            blk = open_on[a]
            if blk is not None and blk is open_on[b] and set(blk["qubits"]) == {a, b}:
                if blk["qubits"] == (a, b):
                    blk["u"] = u @ blk["u"]
                else:
                    blk["u"] = (SWAP_MATRIX @ u @ SWAP_MATRIX) @ blk["u"]
            else:
                for q in (a, b):
                    if open_on[q] is not None:
                        open_on[q] = None
                blk = {"layer": t, "slot": slot, "qubits": (a, b), "u": u}
                blocks.append(blk)
                open_on[a] = open_on[b] = blk
    per_layer: dict[int, list[dict]] = {}
    for blk in blocks:
        per_layer.setdefault(blk["layer"], []).append(blk)
    layers = []
    for t in sorted(per_layer):
        row = sorted(per_layer[t], key=lambda blk: blk["slot"])
        layers.append(tuple(su4(blk["qubits"], blk["u"]) for blk in row))
    return ModelCircuit(width=circuit.width, layers=tuple(layers))


@dataclass(frozen=True)
class PhysicalCircuit:
    """Flat gate list over device qubit ids.

    ``qubits`` fixes the wire order used by simulation: wire i holds device
    qubit ``qubits[i]`` and is the i-th (most significant first) bit of a
    basis index.  Measure instructions, if present, appear in classical bit
    order.
    """

    qubits: tuple[int, ...]
    ops: tuple[Gate, ...]

    def __post_init__(self) -> None:
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("duplicate qubit id in wire list")
        allowed = set(self.qubits)
        for g in self.ops:
            for q in g.qubits:
                if q not in allowed:
                    raise ValueError(f"gate references qubit {q} outside wire list")

    @property
    def width(self) -> int:
        return len(self.qubits)

    def wire_of(self, qubit_id: int) -> int:
        return self.qubits.index(qubit_id)

    def measure_order(self) -> tuple[int, ...]:
        """Device qubit ids in classical bit order."""
        return tuple(g.qubits[0] for g in self.ops if g.kind is GateKind.MEASURE)


# ---------------------------------------------------------------------------
# JSON exchange format


def _gate_to_json(g: Gate) -> dict:
    d: dict = {"kind": g.kind.value, "qubits": list(g.qubits)}
    if g.kind is GateKind.PHASE:
        d["theta"] = g.theta
    elif g.kind is GateKind.SU4:
        u = np.asarray(g.unitary, dtype=complex).reshape(-1)
        flat: list[float] = []
        for z in u:
            flat.append(float(z.real))
            flat.append(float(z.imag))
        d["u"] = flat
    return d


def _gate_from_json(d: dict) -> Gate:
    kind = GateKind(d["kind"])
    qubits = tuple(int(q) for q in d["qubits"])
    if kind is GateKind.PHASE:
        return Gate(kind, qubits, theta=float(d["theta"]))
    if kind is GateKind.SU4:
        flat = d["u"]
        if len(flat) != 32:
            raise ValueError("su4 entry must carry 32 reals")
        u = np.array(flat[0::2]) + 1j * np.array(flat[1::2])
        return su4(qubits, u.reshape(4, 4))
    return Gate(kind, qubits)


def model_to_json(circuit: ModelCircuit) -> dict:
    return {
        "width": circuit.width,
        "layers": [[_gate_to_json(g) for g in layer] for layer in circuit.layers],
    }


def model_from_json(d: dict) -> ModelCircuit:
    layers = tuple(
        tuple(_gate_from_json(g) for g in layer) for layer in d["layers"]
    )
    return ModelCircuit(width=int(d["width"]), layers=layers)


def physical_to_json(circuit: PhysicalCircuit) -> dict:
    return {
        "qubits": list(circuit.qubits),
        "ops": [_gate_to_json(g) for g in circuit.ops],
    }


def physical_from_json(d: dict) -> PhysicalCircuit:
    return PhysicalCircuit(
        qubits=tuple(int(q) for q in d["qubits"]),
        ops=tuple(_gate_from_json(g) for g in d["ops"]),
    )


def load_circuit(path: str | Path) -> ModelCircuit | PhysicalCircuit:
    with open(path) as f:
        d = json.load(f)
    if "layers" in d:
        return model_from_json(d)
    return physical_from_json(d)


def save_circuit(circuit: ModelCircuit | PhysicalCircuit, path: str | Path) -> None:
    if isinstance(circuit, ModelCircuit):
        d = model_to_json(circuit)
    else:
        d = physical_to_json(circuit)
    with open(path, "w") as f:
        json.dump(d, f, separators=(",", ":"))
        f.write("\n")


def to_text(circuit: PhysicalCircuit) -> str:
    """Flat one-gate-per-line listing; native gates only."""
    lines = []
    for g in circuit.ops:
        if g.kind is GateKind.SU4:
            raise ValueError("text format holds native gates only; expand SU4 first")
        parts = [g.kind.value] + [str(q) for q in g.qubits]
        if g.kind is GateKind.PHASE:
            parts.append(repr(g.theta))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Validation against a device


@dataclass(frozen=True)
class Violation:
    index: int
    gate: Gate
    reason: str


def validate_physical_circuit(circuit: PhysicalCircuit, device) -> list[Violation]:
    """Check every instruction is executable on the device as laid out.

    Returns one record per offending gate; an empty list means the circuit
    is runnable.
    """
    out: list[Violation] = []
    ids = {q.id for q in device.qubits}
    for i, g in enumerate(circuit.ops):
        n = len(g.qubits)
        if g.kind in ONE_QUBIT_KINDS or g.kind is GateKind.MEASURE:
            if n != 1:
                out.append(Violation(i, g, "arity"))
                continue
        elif g.kind in TWO_QUBIT_KINDS:
            if n != 2:
                out.append(Violation(i, g, "arity"))
                continue
        bad_index = [q for q in g.qubits if q not in ids]
        if bad_index:
            out.append(Violation(i, g, f"unknown qubit {bad_index[0]}"))
            continue
        if g.kind in TWO_QUBIT_KINDS:
            if not device.has_edge(g.qubits[0], g.qubits[1]):
                out.append(Violation(i, g, "non-adjacent gate"))
    return out

"""Exact (noise-free) circuit simulation."""

from __future__ import annotations

import numpy as np

from ..circuits import ModelCircuit, PhysicalCircuit
from ..gates import Gate, GateKind
from . import statevec as sv

UNITARY_WIDTH_BOUND = 10
IDEAL_WIDTH_BOUND = 14


def _gate_stream(circuit: ModelCircuit | PhysicalCircuit):
    """Yield (gate, wire tuple) with wires in circuit bit order."""
    if isinstance(circuit, ModelCircuit):
        for g in circuit.gates():
            yield g, g.qubits
    else:
        for g in circuit.ops:
            yield g, tuple(circuit.wire_of(q) for q in g.qubits)


def apply_gate(states: np.ndarray, m: int, gate: Gate, wires: tuple[int, ...]):
    k = gate.kind
    if k in (GateKind.MEASURE, GateKind.BARRIER):
        return states
    if k is GateKind.PHASE:
        return sv.apply_phase(states, m, wires[0], gate.theta)
    if len(wires) == 1:
        return sv.apply_1q(states, m, wires[0], gate.matrix())
    return sv.apply_2q(states, m, wires[0], wires[1], gate.matrix())


def run_states(
    states: np.ndarray, m: int, circuit: ModelCircuit | PhysicalCircuit
) -> np.ndarray:
    for g, wires in _gate_stream(circuit):
        states = apply_gate(states, m, g, wires)
    return states


def unitary_of(circuit: ModelCircuit | PhysicalCircuit) -> np.ndarray:
    """Full-circuit unitary (measure and barrier entries are ignored)."""
    m = circuit.width
    if m > UNITARY_WIDTH_BOUND:
        raise ValueError(f"width {m} exceeds unitary bound {UNITARY_WIDTH_BOUND}")
    dim = 1 << m
    states = np.eye(dim, dtype=complex)
    states = run_states(states, m, circuit)
    # row k of states is U|k>, so the unitary has those as columns
    return states.T.copy()


def simulate_ideal(circuit: ModelCircuit | PhysicalCircuit) -> np.ndarray:
    """Exact output probabilities from |0...0>."""
    m = circuit.width
    if m > IDEAL_WIDTH_BOUND:
        raise ValueError(f"width {m} exceeds simulation bound {IDEAL_WIDTH_BOUND}")
    dim = 1 << m
    states = np.zeros((1, dim), dtype=complex)
    states[0, 0] = 1.0
    states = run_states(states, m, circuit)
    probs = np.abs(states[0]) ** 2
    return probs / probs.sum()

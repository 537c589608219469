"""Exact density-matrix evolution of small scheduled circuits.

Oracle companion to the trajectory sampler: the same channel model
(reset errors at initialization, per-gate depolarizing kicks, idle-gap
dephasing and amplitude damping, readout confusion at the end) evolved
exactly instead of sampled.  Restricted to 3 qubits — beyond that the
trajectory sampler is the production path.

Quasi-static detuning is correlated across a whole shot and therefore
has no fixed per-segment channel; models with quasistatic_sigma > 0 are
rejected.
"""

from __future__ import annotations

import numpy as np

from ..scheduler import Schedule, ScheduleError
from . import statevec as sv
from .exact import apply_gate
from .noise import NoiseError, NoiseModel, qubit_confusion
from .trajectories import _JUMP, _PAULIS, PS_TO_S, _segment_ops

WIDTH_BOUND = 3


def _lift(gate, m: int, wires: tuple[int, ...]) -> np.ndarray:
    """Full 2^m x 2^m embedding of a gate acting on the given wires."""
    states = np.eye(1 << m, dtype=complex)
    states = apply_gate(states, m, gate, wires)
    return states.T.copy()


def _lift_matrix(u: np.ndarray, m: int, wire: int) -> np.ndarray:
    states = np.eye(1 << m, dtype=complex)
    states = sv.apply_1q(states, m, wire, u)
    return states.T.copy()


def _conjugate(rho: np.ndarray, op: np.ndarray) -> np.ndarray:
    return op @ rho @ op.conj().T


def _depol_1q(rho: np.ndarray, m: int, w: int, p: float) -> np.ndarray:
    if p <= 0:
        return rho
    acc = (1.0 - p) * rho
    for pk in _PAULIS:
        acc += (p / 3.0) * _conjugate(rho, _lift_matrix(pk, m, w))
    return acc


def _depol_2q(rho: np.ndarray, m: int, wa: int, wb: int, p: float) -> np.ndarray:
    """Uniform kick over the 15 non-identity two-qubit Paulis."""
    if p <= 0:
        return rho
    acc = (1.0 - p) * rho
    eye = np.eye(1 << m, dtype=complex)
    for k in range(1, 16):
        pa, pb = k >> 2, k & 3
        op = eye
        if pa:
            op = _lift_matrix(_PAULIS[pa - 1], m, wa) @ op
        if pb:
            op = _lift_matrix(_PAULIS[pb - 1], m, wb) @ op
        acc += (p / 15.0) * _conjugate(rho, op)
    return acc


def _idle_channel(rho, noise: NoiseModel, m: int, w: int, qubit: int, gap_ps: int):
    dt_s = gap_ps * PS_TO_S
    rate_phi = noise.pure_dephasing_rate(qubit)
    if rate_phi > 0:
        p_z = 0.5 * (1.0 - np.exp(-dt_s * rate_phi))
        z = _lift_matrix(_PAULIS[2], m, w)
        rho = (1.0 - p_z) * rho + p_z * _conjugate(rho, z)
    rate_1 = noise.relaxation_rate(qubit)
    if rate_1 > 0:
        gamma = 1.0 - np.exp(-dt_s * rate_1)
        k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
        k1 = np.sqrt(gamma) * _JUMP
        rho = _conjugate(rho, _lift_matrix(k0, m, w)) + _conjugate(
            rho, _lift_matrix(k1, m, w)
        )
    return rho


def _evolve(s: Schedule, noise: NoiseModel) -> tuple[np.ndarray, list[int]]:
    m = len(s.qubits)
    if m > WIDTH_BOUND:
        raise ScheduleError(f"density evolution limited to {WIDTH_BOUND} qubits")
    if noise.quasistatic_sigma > 0:
        raise NoiseError("quasi-static detuning has no density-matrix channel form")
    wires = s.qubits

    rho = np.array([[1.0]], dtype=complex)
    for q in wires:
        r = noise.readout[q].reset_error
        rho = np.kron(rho, np.array([[1.0 - r, 0.0], [0.0, r]], dtype=complex))

    measures: list[int] = []
    for step in _segment_ops(s):
        if step[0] == "idle":
            _, w, gap_ps = step
            rho = _idle_channel(rho, noise, m, w, wires[w], gap_ps)
        elif step[0] == "gate":
            entry = step[1]
            g = entry.gate
            gw = tuple(wires.index(q) for q in g.qubits)
            rho = _conjugate(rho, _lift(g, m, gw))
            if len(gw) == 1:
                rho = _depol_1q(rho, m, gw[0], noise.sq_depol)
            else:
                p = noise.edge_depol(g.qubits[0], g.qubits[1])
                rho = _depol_2q(rho, m, gw[0], gw[1], p)
        else:
            measures.append(step[1])
    if not measures:
        raise ScheduleError("schedule has no measurements")
    return rho, measures


def final_density(s: Schedule, noise: NoiseModel) -> np.ndarray:
    """Density matrix just before measurement."""
    rho, _ = _evolve(s, noise)
    return rho


def exact_distribution(s: Schedule, noise: NoiseModel) -> np.ndarray:
    """Reported-bitstring distribution (index = int(bitstring, 2)).

    Bit j of the reported string is the j-th measurement in the schedule,
    passed through that qubit's readout confusion."""
    rho, measures = _evolve(s, noise)
    m = len(s.qubits)
    probs = np.clip(np.real(np.diag(rho)), 0.0, None)
    probs /= probs.sum()

    out = np.zeros(1 << len(measures))
    for idx in np.nonzero(probs)[0]:
        weights = np.array([1.0])
        for w in measures:
            b = (int(idx) >> (m - 1 - w)) & 1
            c = qubit_confusion(noise.readout[s.qubits[w]])
            weights = np.kron(weights, c[b])
        out += probs[idx] * weights
    return out

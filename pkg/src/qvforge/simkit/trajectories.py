"""Monte-Carlo pure-state trajectories over a scheduled circuit.

Each shot carries one statevector.  Per shot the simulator samples a
static detuning per qubit, a possibly-flipped initial state (reset
error), Pauli kicks after gates, and relaxation / dephasing jumps over
every idle gap, then measures once through the readout confusion model.
Idle gaps are read off the schedule (per-qubit time between consecutive
timed entries), so the same circuit scheduled differently decoheres
differently — that is the point of the decoupling comparison.

All shots advance through the schedule together as a (shots, 2^m) batch;
random draws happen in fixed schedule order with a fixed chunk size, so
counts depend only on (schedule, noise, shots, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import rng
from ..gates import GateKind
from ..scheduler import Schedule, ScheduleError
from . import statevec as sv
from .noise import NoiseModel

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULIS = (_X, _Y, _Z)
_JUMP = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|, normalized after

_CHUNK = 16384
PS_TO_S = 1e-12


@dataclass(frozen=True)
class ShotCounts:
    counts: dict[str, int]
    shots: int

    def __post_init__(self) -> None:
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to the shot total")

    def probability(self, bitstring: str) -> float:
        return self.counts.get(bitstring, 0) / self.shots


def _segment_ops(s: Schedule) -> list[tuple]:
    """Flatten the schedule into (kind, payload) steps in execution order.

    Steps: ("idle", wire, gap_ps), ("gate", entry), ("measure", wire).
    Idle steps cover the gap between consecutive activities (timed entries
    or measures) per qubit.  Nothing accrues before a qubit's first
    activity or after its measurement.  Frame updates neither open nor
    close a gap; they commute with every idle-channel operator up to a
    per-shot phase, so applying them at their sort position is exact."""
    wire_of = {q: i for i, q in enumerate(s.qubits)}
    clock: dict[int, int | None] = {q: None for q in s.qubits}
    steps: list[tuple] = []
    for e in s.entries:
        kind = e.gate.kind
        if kind is GateKind.BARRIER:
            continue
        activity = e.duration > 0 or kind is GateKind.MEASURE
        if activity:
            for q in e.gate.qubits:
                last = clock[q]
                if last is not None and e.start > last:
                    steps.append(("idle", wire_of[q], e.start - last))
                clock[q] = e.end
        if kind is GateKind.MEASURE:
            steps.append(("measure", wire_of[e.gate.qubits[0]]))
        else:
            steps.append(("gate", e))
    return steps


def _apply_rows_1q(states, m, wire, u, rows) -> None:
    if rows.size:
        sub = states[rows]
        states[rows] = sv.apply_1q(sub, m, wire, u)


def simulate_noisy(
    s: Schedule, noise: NoiseModel, shots: int, seed: int, stream_index: int = 0
) -> ShotCounts:
    """Trajectory simulation of one schedule; deterministic in the seed."""
    if shots < 1:
        raise ValueError("at least one shot required")
    m = len(s.qubits)
    if m > 14:
        raise ScheduleError("trajectory simulation limited to 14 qubits")
    steps = _segment_ops(s)
    measures = [wire for kind, *rest in steps if kind == "measure" for wire in rest]
    if not measures:
        raise ScheduleError("schedule has no measurements")
    gen = rng.substream(seed, rng.SIM, stream_index)
    counts: dict[str, int] = {}
    done = 0
    while done < shots:
        batch = min(_CHUNK, shots - done)
        for bits in _run_batch(s, noise, steps, batch, gen, m, measures):
            counts[bits] = counts.get(bits, 0) + 1
        done += batch
    return ShotCounts(counts=counts, shots=shots)


def _run_batch(s, noise, steps, batch, gen, m, measures):
    wires = s.qubits
    wire_of = {q: i for i, q in enumerate(wires)}
    dim = 1 << m

    # initial state with per-qubit reset flips
    idx = np.zeros(batch, dtype=np.int64)
    for w, q in enumerate(wires):
        r = noise.readout[q].reset_error
        flip = gen.random(batch) < r
        idx |= flip.astype(np.int64) << (m - 1 - w)
    states = np.zeros((batch, dim), dtype=complex)
    states[np.arange(batch), idx] = 1.0

    # per-shot static detunings (rad/s)
    if noise.quasistatic_sigma > 0:
        delta = gen.normal(0.0, noise.quasistatic_sigma, size=(batch, m))
    else:
        delta = np.zeros((batch, m))

    for step in steps:
        if step[0] == "idle":
            _, w, gap_ps = step
            _idle_segment(states, noise, gen, m, w, wires[w], gap_ps, delta)
        elif step[0] == "gate":
            _gate_step(states, noise, gen, m, wire_of, step[1])
        # measures are deferred: nothing further touches those qubits

    probs = np.abs(states) ** 2
    probs /= probs.sum(axis=1)[:, None]
    u = gen.random(batch)
    outcome = (np.cumsum(probs, axis=1) > u[:, None]).argmax(axis=1)

    bits = np.zeros((batch, len(measures)), dtype=np.int8)
    for j, w in enumerate(measures):
        bits[:, j] = (outcome >> (m - 1 - w)) & 1
    for j, w in enumerate(measures):
        ro = noise.readout[wires[w]]
        u = gen.random(batch)
        zero = bits[:, j] == 0
        flip = np.where(zero, u < ro.p01, u < ro.p10)
        bits[:, j] ^= flip.astype(np.int8)

    digits = bits.astype("U1")
    return ["".join(row) for row in digits]


def _idle_segment(states, noise, gen, m, wire, qubit, gap_ps, delta) -> None:
    dt_s = gap_ps * PS_TO_S
    # deterministic static-detuning rotation, per shot
    if noise.quasistatic_sigma > 0:
        sv.apply_detuning(states, m, wire, delta[:, wire] * dt_s)
    # pure dephasing: random Z with the exact channel probability
    rate_phi = noise.pure_dephasing_rate(qubit)
    if rate_phi > 0:
        p_z = 0.5 * (1.0 - np.exp(-dt_s * rate_phi))
        rows = np.nonzero(gen.random(states.shape[0]) < p_z)[0]
        _apply_rows_1q(states, m, wire, _Z, rows)
    # relaxation: quantum-jump unraveling of amplitude damping
    rate_1 = noise.relaxation_rate(qubit)
    if rate_1 > 0:
        gamma = 1.0 - np.exp(-dt_s * rate_1)
        p1 = sv.population(states, m, wire)
        jump = gen.random(states.shape[0]) < gamma * p1
        # jumped states have the wire in |0>, so the no-jump operator
        # K0 = diag(1, sqrt(1-gamma)) applied to every row acts on them
        # trivially; one full-batch kernel call covers both branches
        _apply_rows_1q(states, m, wire, _JUMP, np.nonzero(jump)[0])
        k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
        states[:] = sv.apply_1q(states, m, wire, k0)
        # branch norms are known in closed form: p1 after a jump,
        # 1 - gamma*p1 without one
        norm_sq = np.where(jump, p1, 1.0 - gamma * p1)
        states *= (1.0 / np.sqrt(norm_sq))[:, None]


def _gate_step(states, noise, gen, m, wire_of, entry) -> None:
    g = entry.gate
    batch = states.shape[0]
    if g.kind is GateKind.PHASE:
        sv.apply_phase(states, m, wire_of[g.qubits[0]], g.theta)
        return
    if len(g.qubits) == 1:
        w = wire_of[g.qubits[0]]
        states[:] = sv.apply_1q(states, m, w, g.matrix())
        p = noise.sq_depol
        if p > 0:
            hit = gen.random(batch) < p
            choice = gen.integers(0, 3, size=batch)
            idx = np.nonzero(hit)[0]
            if idx.size:
                ck = choice[idx]
                for k in range(3):
                    _apply_rows_1q(states, m, w, _PAULIS[k], idx[ck == k])
        return
    wa, wb = wire_of[g.qubits[0]], wire_of[g.qubits[1]]
    states[:] = sv.apply_2q(states, m, wa, wb, g.matrix())
    p = noise.edge_depol(g.qubits[0], g.qubits[1])
    if p > 0:
        hit = gen.random(batch) < p
        choice = gen.integers(1, 16, size=batch)
        idx = np.nonzero(hit)[0]
        if idx.size:
            ck = choice[idx]
            for k in range(1, 16):
                rows = idx[ck == k]
                if rows.size == 0:
                    continue
                pa, pb = k >> 2, k & 3
                if pa:
                    _apply_rows_1q(states, m, wa, _PAULIS[pa - 1], rows)
                if pb:
                    _apply_rows_1q(states, m, wb, _PAULIS[pb - 1], rows)

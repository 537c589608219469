"""Single-qubit resynthesis into the native Phase/SX gate set.

Any U(2) factors as e^{ip} Rz(a) SX Rz(b) SX Rz(c), and the middle angle
collapses to one or zero pulses when the target is axial.  Emission drops
Phase gates with negligible angle, so resynthesizing an already-minimal
run reproduces it unchanged.
"""

from __future__ import annotations

import numpy as np

from ..gates import (
    Gate,
    GateKind,
    ONE_QUBIT_KINDS,
    SX_MATRIX,
    XM_MATRIX,
    XP_MATRIX,
    phase,
    phase_matrix,
    sx,
)

_ATOL = 1e-10
# angle below which a Phase gate is dropped entirely
_ANGLE_EPS = 1e-11


def _wrap(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    w = (theta + np.pi) % (2.0 * np.pi) - np.pi
    if w <= -np.pi + 1e-15:
        w = np.pi
    return float(w)


def zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """Return (alpha, beta, gamma, phi) with u = e^{i phi} Rz(alpha) Ry(beta) Rz(gamma).

    beta lies in [0, pi].
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if np.abs(u @ u.conj().T - np.eye(2)).max() > 1e-9:
        raise ValueError("matrix is not unitary")
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    phi = 0.5 * np.angle(det)
    su = u * np.exp(-1j * phi)
    beta = 2.0 * np.arctan2(np.abs(su[1, 0]), np.abs(su[0, 0]))
    if np.abs(su[1, 0]) < _ATOL:
        alpha = 2.0 * np.angle(su[1, 1])
        gamma = 0.0
    elif np.abs(su[0, 0]) < _ATOL:
        alpha = 2.0 * np.angle(su[1, 0])
        gamma = 0.0
    else:
        apg = 2.0 * np.angle(su[1, 1])
        amg = 2.0 * np.angle(su[1, 0])
        alpha = 0.5 * (apg + amg)
        gamma = 0.5 * (apg - amg)
    return float(alpha), float(beta), float(gamma), float(phi)


def zxzxz_angles(u: np.ndarray) -> tuple[tuple[float, ...], float]:
    """Return (phase_angles, global_phase) realizing u in the Phase/SX set.

    phase_angles lists the Phase-gate angles in matrix-product order with an
    SX between consecutive entries, so len(phase_angles) - 1 pulses are used.
    """
    alpha, beta, gamma, phi = zyz_angles(u)
    if beta < 1e-9:
        angles: tuple[float, ...] = (_wrap(alpha + gamma),)
    elif np.abs(beta - 0.5 * np.pi) < 1e-9:
        angles = (_wrap(alpha + 0.5 * np.pi), _wrap(gamma - 0.5 * np.pi))
    else:
        angles = (_wrap(alpha), _wrap(np.pi - beta), _wrap(gamma - np.pi))
    prod = phase_matrix(angles[0])
    for theta in angles[1:]:
        prod = prod @ SX_MATRIX @ phase_matrix(theta)
    # wrapping shifts Rz-form phases by pi, so recover the phase numerically
    resid = u @ prod.conj().T
    gphase = np.angle(resid[0, 0])
    if np.abs(resid - np.exp(1j * gphase) * np.eye(2)).max() > 1e-9:
        raise ArithmeticError("1q resynthesis failed to reproduce the input")
    return angles, float(gphase)


def emit_1q(u: np.ndarray, qubit: int) -> tuple[list[Gate], float]:
    """Synthesize u on the given wire as Phase/SX gates in circuit order.

    Returns (gates, global_phase); the product of the gates times
    e^{i global_phase} equals u.
    """
    angles, gphase = zxzxz_angles(u)
    ops: list[Gate] = []
    # matrix order P(t0) SX P(t1) ... means the last angle acts first
    for k, theta in enumerate(reversed(angles)):
        if np.abs(theta) > _ANGLE_EPS:
            ops.append(phase(qubit, theta))
        if k < len(angles) - 1:
            ops.append(sx(qubit))
    return ops, float(gphase)


_RUN_MATRICES = {
    GateKind.SX: SX_MATRIX,
    GateKind.XP: XP_MATRIX,
    GateKind.XM: XM_MATRIX,
}


def _gate_matrix_1q(g: Gate) -> np.ndarray:
    if g.kind is GateKind.PHASE:
        return phase_matrix(g.theta)
    return _RUN_MATRICES[g.kind]


def collapse_1q_runs(ops: list[Gate]) -> tuple[list[Gate], float]:
    """Merge every maximal single-qubit run into at most two SX pulses.

    Runs whose product is a pure phase vanish.  Returns the rewritten gate
    list and the accumulated global-phase shift.
    """
    pending: dict[int, np.ndarray] = {}
    out: list[Gate] = []
    total_phase = 0.0

    def flush(q: int) -> None:
        nonlocal total_phase
        mat = pending.pop(q, None)
        if mat is None:
            return
        if np.abs(mat[0, 1]) < _ATOL and np.abs(mat[1, 0]) < _ATOL:
            rel = _wrap(np.angle(mat[1, 1]) - np.angle(mat[0, 0]))
            total_phase += np.angle(mat[0, 0])
            if np.abs(rel) > _ANGLE_EPS:
                out.append(phase(q, rel))
            return
        gates, gp = emit_1q(mat, q)
        out.extend(gates)
        total_phase += gp

    for g in ops:
        if g.kind in ONE_QUBIT_KINDS:
            q = g.qubits[0]
            acc = pending.get(q)
            m = _gate_matrix_1q(g)
            pending[q] = m if acc is None else m @ acc
        else:
            for q in g.qubits:
                flush(q)
            out.append(g)
    for q in sorted(pending):
        flush(q)
    return out, float(_wrap(total_phase))

"""Gate vocabulary shared by every stage.

Conventions used throughout the toolkit:

* Qubit 0 of a gate (or circuit) is the most significant bit of a basis
  index, so a two-qubit matrix acts on the ordered basis 00, 01, 10, 11
  with the first qubit owning the left bit.
* Bitstrings read left to right as qubit 0, 1, ...
* ``Phase(theta)`` is diag(1, e^{i theta}) and costs no pulse time; SX is
  the square root of X and is the unit in which pulse counts are reported.
* ``Xp``/``Xm`` are the +pi and -pi rotations about X used by the
  decoupling sequence; their product is exactly the identity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class GateKind(enum.Enum):
    SU4 = "su4"
    SX = "sx"
    PHASE = "phase"
    XP = "xp"
    XM = "xm"
    CX = "cx"
    ECR = "ecr"
    SWAP = "swap"
    MEASURE = "measure"
    BARRIER = "barrier"


ONE_QUBIT_KINDS = frozenset({GateKind.SX, GateKind.PHASE, GateKind.XP, GateKind.XM})
TWO_QUBIT_KINDS = frozenset({GateKind.SU4, GateKind.CX, GateKind.ECR, GateKind.SWAP})
# Phase is implemented as a frame change; it takes no time and carries no error.
ZERO_DURATION_KINDS = frozenset({GateKind.PHASE, GateKind.BARRIER})

_SQ2 = math.sqrt(2.0)

SX_MATRIX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
# Exact pi rotations about +/- X: e^{∓i pi X / 2}.
XP_MATRIX = np.array([[0, -1j], [-1j, 0]], dtype=complex)
XM_MATRIX = np.array([[0, 1j], [1j, 0]], dtype=complex)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
Y_MATRIX = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z_MATRIX = np.array([[1, 0], [0, -1]], dtype=complex)
H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / _SQ2

CX_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
# Echoed cross-resonance unitary (X ⊗ I − ... form); locally equivalent to CX.
ECR_MATRIX = (np.kron(np.eye(2), X_MATRIX) - np.kron(X_MATRIX, Y_MATRIX)) / _SQ2


def phase_matrix(theta: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """One circuit instruction.

    ``qubits`` are indices into the owning circuit (logical for model
    circuits, physical for routed circuits).  ``theta`` is only meaningful
    for Phase gates and ``unitary`` only for SU4 blocks.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    theta: float = 0.0
    unitary: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        n = len(self.qubits)
        if self.kind in ONE_QUBIT_KINDS and n != 1:
            raise ValueError(f"{self.kind.value} acts on one qubit, got {self.qubits}")
        if self.kind in TWO_QUBIT_KINDS:
            if n != 2:
                raise ValueError(f"{self.kind.value} acts on two qubits, got {self.qubits}")
            if self.qubits[0] == self.qubits[1]:
                raise ValueError("two-qubit gate with repeated qubit")
        if self.kind is GateKind.SU4:
            if self.unitary is None:
                raise ValueError("SU4 gate needs a unitary")
            u = np.asarray(self.unitary)
            if u.shape != (4, 4):
                raise ValueError("SU4 unitary must be 4x4")
            if not np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12):
                raise ValueError("SU4 block is not unitary within 1e-12")

    def matrix(self) -> np.ndarray:
        """Unitary of this gate in its own qubit order (qubit 0 = left bit)."""
        k = self.kind
        if k is GateKind.SU4:
            return np.asarray(self.unitary, dtype=complex)
        if k is GateKind.SX:
            return SX_MATRIX
        if k is GateKind.PHASE:
            return phase_matrix(self.theta)
        if k is GateKind.XP:
            return XP_MATRIX
        if k is GateKind.XM:
            return XM_MATRIX
        if k is GateKind.CX:
            return CX_MATRIX
        if k is GateKind.ECR:
            return ECR_MATRIX
        if k is GateKind.SWAP:
            return SWAP_MATRIX
        raise ValueError(f"{k.value} has no unitary")


def su4(qubits: tuple[int, int], unitary: np.ndarray) -> Gate:
    return Gate(GateKind.SU4, tuple(qubits), unitary=np.asarray(unitary, dtype=complex))


def sx(q: int) -> Gate:
    return Gate(GateKind.SX, (q,))


def phase(q: int, theta: float) -> Gate:
    return Gate(GateKind.PHASE, (q,), theta=float(theta))


def xp(q: int) -> Gate:
    return Gate(GateKind.XP, (q,))


def xm(q: int) -> Gate:
    return Gate(GateKind.XM, (q,))


def cx(control: int, target: int) -> Gate:
    return Gate(GateKind.CX, (control, target))


def ecr(control: int, target: int) -> Gate:
    return Gate(GateKind.ECR, (control, target))


def swap(a: int, b: int) -> Gate:
    return Gate(GateKind.SWAP, (a, b))


def measure(q: int) -> Gate:
    return Gate(GateKind.MEASURE, (q,))


def barrier(*qubits: int) -> Gate:
    return Gate(GateKind.BARRIER, tuple(qubits))

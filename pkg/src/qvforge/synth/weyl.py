"""Two-qubit interaction content: magic-basis decomposition and the Weyl chamber.

Any 4x4 unitary factors as

    U = e^{i phase} (k1a ⊗ k1b) · exp(i (c1 XX + c2 YY + c3 ZZ)) · (k2a ⊗ k2b)

with (c1, c2, c3) unique once folded into the canonical chamber

    pi/4 >= c1 >= c2 >= |c3|,

where c3 may be negative except on the c1 = pi/4 face, whose mirror images
are identified and resolved to c3 >= 0.  The coordinates are invariant
under one-qubit dressing on either side, which is what the router's
fidelity model and the synthesis templates rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SQ2 = math.sqrt(2.0)
QUARTER = math.pi / 4
HALF = math.pi / 2

# Magic (Bell-phase) basis, columns |Phi+>, i|Phi->, i|Psi+>, |Psi->.
MAGIC = (
    np.array(
        [
            [1, 1j, 0, 0],
            [0, 0, 1j, 1],
            [0, 0, 1j, -1],
            [1, -1j, 0, 0],
        ],
        dtype=complex,
    )
    / _SQ2
)
_MAGIC_H = MAGIC.conj().T

# Angle of magic-basis diagonal entry j for exp(i(x XX + y YY + z ZZ)) is
# _AXES[j] . (x, y, z); the same matrix with a leading column of ones maps
# (global, x, y, z) to the four angles.
_AXES = np.array(
    [
        [1, -1, 1],
        [-1, 1, 1],
        [1, 1, -1],
        [-1, -1, -1],
    ],
    dtype=float,
)
_FROM_ANGLES = np.linalg.inv(np.hstack([np.ones((4, 1)), _AXES]))

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULI = {"x": _X, "y": _Y, "z": _Z}
# Conjugating by (Q ⊗ I) negates the two interaction axes that anticommute
# with Q.
_NEGATE_Q = {(0, 1): _Z, (0, 2): _Y, (1, 2): _X}
# Conjugating by (w ⊗ w) exchanges two interaction axes and fixes the third.
_SWAP_W = {
    (0, 1): np.array([[1, 0], [0, 1j]], dtype=complex),
    (1, 2): np.array([[1, -1j], [-1j, 1]], dtype=complex) / _SQ2,
    (0, 2): np.array([[1, -1], [1, 1]], dtype=complex) / _SQ2,
}

_ATOL = 1e-10


def canonical_matrix(c1: float, c2: float, c3: float) -> np.ndarray:
    """exp(i (c1 XX + c2 YY + c3 ZZ)), built diagonally in the magic basis."""
    angles = _AXES @ np.array([c1, c2, c3], dtype=float)
    return (MAGIC * np.exp(1j * angles)) @ _MAGIC_H


@dataclass(frozen=True)
class WeylCoordinates:
    c1: float
    c2: float
    c3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3], dtype=float)


@dataclass(frozen=True)
class KakDecomposition:
    """Full factorization of a two-qubit unitary around its canonical gate."""

    k1a: np.ndarray
    k1b: np.ndarray
    coords: WeylCoordinates
    k2a: np.ndarray
    k2b: np.ndarray
    phase: float

    def canonical(self) -> np.ndarray:
        return canonical_matrix(self.coords.c1, self.coords.c2, self.coords.c3)

    def reconstruct(self) -> np.ndarray:
        return (
            np.exp(1j * self.phase)
            * np.kron(self.k1a, self.k1b)
            @ self.canonical()
            @ np.kron(self.k2a, self.k2b)
        )


def _assert_unitary(u: np.ndarray) -> None:
    if u.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    if not np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12):
        raise ValueError("matrix is not unitary within 1e-12")


def _diagonalize_symmetric_unitary(g: np.ndarray) -> np.ndarray:
    """Real orthogonal P with P.T @ g @ P diagonal, for symmetric unitary g.

    Re(g) and Im(g) commute, so a generic real combination of the two has the
    same eigenvectors; a fixed sweep of mixing angles makes this deterministic.
    """
    re, im = g.real, g.imag
    for t in (0.831235, 0.219374, 1.327840, 0.543216, 1.951331, 0.077713, 2.413975, 1.118033):
        _, p = np.linalg.eigh(math.cos(t) * re + math.sin(t) * im)
        if (
            np.abs(p.T @ re @ p - np.diag(np.diag(p.T @ re @ p))).max() < 1e-9
            and np.abs(p.T @ im @ p - np.diag(np.diag(p.T @ im @ p))).max() < 1e-9
        ):
            return p
    raise ArithmeticError("failed to diagonalize magic-basis Gram matrix")


def _to_orthogonal(m: np.ndarray) -> np.ndarray:
    u, _, vt = np.linalg.svd(m.real)
    return u @ vt


def _split_tensor(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split k ≈ a ⊗ b into one-qubit factors with det(a) = 1."""
    m = k.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vt = np.linalg.svd(m)
    if s[1] > 1e-8:
        raise ArithmeticError("matrix is not a tensor product of one-qubit gates")
    a = u[:, 0].reshape(2, 2) * math.sqrt(s[0])
    b = vt[0, :].reshape(2, 2) * math.sqrt(s[0])
    det = np.linalg.det(a)
    root = np.sqrt(det + 0j)
    a = a / root
    b = b * root
    if not np.allclose(np.kron(a, b), k, atol=1e-8):
        raise ArithmeticError("tensor split failed to reconstruct")
    return a, b


class _Factored:
    """Mutable U = e^{i phase} K1 · A(c) · K2 with K1, K2 as 4x4 locals."""

    __slots__ = ("c", "k1", "k2", "phase")

    def __init__(self, c: np.ndarray, k1: np.ndarray, k2: np.ndarray, phase: float):
        self.c = c
        self.k1 = k1
        self.k2 = k2
        self.phase = phase

    def shift(self, axis: int, steps: int) -> None:
        # c[axis] -> c[axis] - steps*pi/2 absorbs (P ⊗ P)^steps into K2.
        if steps == 0:
            return
        self.c[axis] -= steps * HALF
        p = _PAULI["xyz"[axis]]
        if steps % 2:
            self.k2 = np.kron(p, p) @ self.k2
        self.phase += steps * HALF

    def negate(self, i: int, j: int) -> None:
        q = _NEGATE_Q[(min(i, j), max(i, j))]
        qi = np.kron(q, np.eye(2))
        self.c[i] = -self.c[i]
        self.c[j] = -self.c[j]
        self.k1 = self.k1 @ qi
        self.k2 = qi @ self.k2

    def swap(self, i: int, j: int) -> None:
        w = _SWAP_W[(min(i, j), max(i, j))]
        ww = np.kron(w, w)
        self.c[[i, j]] = self.c[[j, i]]
        self.k1 = self.k1 @ ww.conj().T
        self.k2 = ww @ self.k2


def _canonicalize(f: _Factored) -> None:
    # Fold into [0, pi/2) once; later moves keep magnitudes below pi/2.
    for axis in range(3):
        f.shift(axis, math.floor(f.c[axis] / HALF))
    for _ in range(60):
        # Order by magnitude (descending) with explicit swaps so the local
        # factors stay consistent.
        if abs(f.c[1]) > abs(f.c[0]) + _ATOL:
            f.swap(0, 1)
        if abs(f.c[2]) > abs(f.c[1]) + _ATOL:
            f.swap(1, 2)
        if abs(f.c[1]) > abs(f.c[0]) + _ATOL:
            f.swap(0, 1)
        negatives = [i for i in range(3) if f.c[i] < -_ATOL]
        if len(negatives) >= 2:
            f.negate(negatives[0], negatives[1])
            continue
        if len(negatives) == 1 and negatives[0] != 2:
            f.negate(negatives[0], 2)
            continue
        if f.c[0] > QUARTER + _ATOL:
            # (c1, c3) -> (pi/2 - c1, -c3) keeps the class, pulls c1 inside.
            f.negate(0, 2)
            f.shift(0, -1)
            continue
        if f.c[2] < -_ATOL and f.c[0] >= QUARTER - _ATOL:
            # On the c1 = pi/4 face the sign of c3 is a gauge; fix it >= 0.
            f.negate(0, 2)
            f.shift(0, -1)
            continue
        if _is_canonical(f.c):
            return
    raise ArithmeticError(f"Weyl canonicalization did not converge: {f.c}")


def _is_canonical(c: np.ndarray) -> bool:
    if not (c[0] <= QUARTER + _ATOL and c[0] >= c[1] - _ATOL and c[1] >= abs(c[2]) - _ATOL):
        return False
    if c[1] < -_ATOL:
        return False
    if c[2] < -_ATOL and c[0] >= QUARTER - _ATOL:
        return False
    return True


def kak(u: np.ndarray) -> KakDecomposition:
    """Magic-basis decomposition with coordinates folded to the chamber."""
    u = np.asarray(u, dtype=complex)
    _assert_unitary(u)
    det = np.linalg.det(u)
    us = u * det ** (-0.25)
    m = _MAGIC_H @ us @ MAGIC
    gram = m @ m.T
    p = _diagonalize_symmetric_unitary(gram)
    if np.linalg.det(p) < 0:
        p = p.copy()
        p[:, 3] = -p[:, 3]
    diag = np.diag(p.T @ gram @ p)
    diag = diag / np.abs(diag)
    theta = np.angle(diag) / 2.0
    o2 = (np.exp(-1j * theta)[:, None] * p.T) @ m
    if np.linalg.det(o2).real < 0:
        theta[0] += math.pi
        o2[0, :] = -o2[0, :]
    if np.abs(o2.imag).max() > 1e-8:
        raise ArithmeticError("inner factor is not real orthogonal")
    o2 = _to_orthogonal(o2)

    gxyz = _FROM_ANGLES @ theta
    coords = gxyz[1:].copy()
    k1 = MAGIC @ p @ _MAGIC_H
    k2 = MAGIC @ o2 @ _MAGIC_H

    f = _Factored(coords, k1, k2, 0.0)
    _canonicalize(f)

    k1a, k1b = _split_tensor(f.k1)
    k2a, k2b = _split_tensor(f.k2)
    dec = KakDecomposition(
        k1a=k1a,
        k1b=k1b,
        coords=WeylCoordinates(float(f.c[0]), float(f.c[1]), float(f.c[2])),
        k2a=k2a,
        k2b=k2b,
        phase=0.0,
    )
    # Solve the global phase last: everything else is exact by construction.
    rebuilt = dec.reconstruct()
    phase = float(np.angle(np.trace(rebuilt.conj().T @ u)))
    dec = KakDecomposition(dec.k1a, dec.k1b, dec.coords, dec.k2a, dec.k2b, phase)
    if not np.allclose(dec.reconstruct(), u, atol=1e-9):
        raise ArithmeticError("KAK reconstruction drifted beyond 1e-9")
    return dec


def weyl_coordinates(u: np.ndarray) -> WeylCoordinates:
    """Canonical chamber coordinates of a two-qubit unitary."""
    return kak(u).coords


def local_align(target: np.ndarray, built: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, float]:
    """One-qubit dressings (and phase) turning ``built`` into ``target``.

    Both arguments must share canonical coordinates.  Returns
    (l1a, l1b, l2a, l2b, phase) with
    target = e^{i phase} (l1a ⊗ l1b) @ built @ (l2a ⊗ l2b).
    """
    kt = kak(target)
    kb = kak(built)
    if np.abs(kt.coords.as_array() - kb.coords.as_array()).max() > 1e-8:
        raise ArithmeticError("operands are not locally equivalent")
    l1 = np.kron(kt.k1a, kt.k1b) @ np.kron(kb.k1a, kb.k1b).conj().T
    l2 = np.kron(kb.k2a, kb.k2b).conj().T @ np.kron(kt.k2a, kt.k2b)
    l1a, l1b = _split_tensor(l1)
    l2a, l2b = _split_tensor(l2)
    phase = kt.phase - kb.phase
    return l1a, l1b, l2a, l2b, phase

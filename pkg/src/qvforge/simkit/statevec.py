"""Batched statevector kernels.

All kernels act on an array of shape (batch, 2**m) of complex amplitudes,
updating every batch member with the same gate.  Wire 0 is the most
significant bit of the basis index.  A compiled extension provides the same
entry points; the pure-numpy versions here are the fallback and the
reference.  Set QVFORGE_FORCE_PY=1 to skip the extension.
"""

from __future__ import annotations

import os

import numpy as np


def _views(states: np.ndarray, m: int, wire: int):
    b = states.shape[0]
    left = 1 << wire
    right = 1 << (m - wire - 1)
    return states.reshape(b, left, 2, right)


def apply_1q_py(states: np.ndarray, m: int, wire: int, u: np.ndarray) -> np.ndarray:
    v = _views(states, m, wire)
    out = np.einsum("st,bltr->blsr", u, v)
    return out.reshape(states.shape)


def apply_2q_py(
    states: np.ndarray, m: int, wa: int, wb: int, u: np.ndarray
) -> np.ndarray:
    b = states.shape[0]
    u4 = u.reshape(2, 2, 2, 2)
    lo, hi = (wa, wb) if wa < wb else (wb, wa)
    left = 1 << lo
    mid = 1 << (hi - lo - 1)
    right = 1 << (m - hi - 1)
    v = states.reshape(b, left, 2, mid, 2, right)
    if wa < wb:
        out = np.einsum("pqts,bltmsr->blpmqr", u4, v)
    else:
        out = np.einsum("pqts,blsmtr->blqmpr", u4, v)
    return out.reshape(states.shape)


def apply_phase_py(states: np.ndarray, m: int, wire: int, theta: float) -> np.ndarray:
    v = _views(states, m, wire)
    v[:, :, 1, :] *= np.exp(1j * theta)
    return states


def apply_detuning_py(
    states: np.ndarray, m: int, wire: int, angles: np.ndarray
) -> np.ndarray:
    """Per-batch-member Z rotation: amplitude with wire bit 1 gains e^{i angle}."""
    v = _views(states, m, wire)
    v[:, :, 1, :] *= np.exp(1j * angles)[:, None, None]
    return states


def population_py(states: np.ndarray, m: int, wire: int) -> np.ndarray:
    """Per-batch-member probability of wire being 1."""
    v = _views(states, m, wire)
    sub = v[:, :, 1, :]
    return np.einsum("blr,blr->b", sub, sub.conj()).real


_IMPL = "python"
apply_1q = apply_1q_py
apply_2q = apply_2q_py
apply_phase = apply_phase_py
apply_detuning = apply_detuning_py
population = population_py

if not os.environ.get("QVFORGE_FORCE_PY"):
    try:
        from qvforge._kernels import _statevec as _ext

        apply_1q = _ext.apply_1q
        apply_2q = _ext.apply_2q
        apply_phase = _ext.apply_phase
        apply_detuning = _ext.apply_detuning
        population = _ext.population
        _IMPL = "compiled"
    except ImportError:
        pass


def backend_name() -> str:
    return _IMPL

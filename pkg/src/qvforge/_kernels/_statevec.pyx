# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched statevector kernels.

Drop-in replacements for the numpy fallbacks: same signatures, same
bit convention (wire 0 is the most significant basis-index bit).  These
update the batch in place and return the input array; the callers treat
the return value as the result either way, so both implementations are
interchangeable.
"""

import numpy as np

from libc.math cimport cos, sin

ctypedef double complex dc


def apply_1q(object states_arr, int m, int wire, object u_arr):
    cdef dc[:, ::1] states = states_arr
    cdef dc[:, ::1] u = np.ascontiguousarray(u_arr, dtype=np.complex128)
    cdef Py_ssize_t batch = states.shape[0]
    cdef Py_ssize_t dim = states.shape[1]
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (m - wire - 1)
    cdef dc u00 = u[0, 0], u01 = u[0, 1], u10 = u[1, 0], u11 = u[1, 1]
    cdef Py_ssize_t b, i
    cdef dc a0, a1
    with nogil:
        for b in range(batch):
            for i in range(dim):
                if i & stride:
                    continue
                a0 = states[b, i]
                a1 = states[b, i + stride]
                states[b, i] = u00 * a0 + u01 * a1
                states[b, i + stride] = u10 * a0 + u11 * a1
    return states_arr


def apply_2q(object states_arr, int m, int wa, int wb, object u_arr):
    cdef dc[:, ::1] states = states_arr
    cdef dc[:, ::1] um = np.ascontiguousarray(u_arr, dtype=np.complex128)
    cdef Py_ssize_t batch = states.shape[0]
    cdef Py_ssize_t dim = states.shape[1]
    cdef Py_ssize_t sa = (<Py_ssize_t>1) << (m - wa - 1)
    cdef Py_ssize_t sb = (<Py_ssize_t>1) << (m - wb - 1)
    cdef Py_ssize_t mask = sa | sb
    cdef dc u[4][4]
    cdef Py_ssize_t r, c, b, i, i1, i2, i3
    cdef dc v0, v1, v2, v3
    for r in range(4):
        for c in range(4):
            u[r][c] = um[r, c]
    # amplitude order (v0..v3) = (wa bit, wb bit) = (00, 01, 10, 11),
    # matching the matrix's 2-bit row/column convention
    with nogil:
        for b in range(batch):
            for i in range(dim):
                if i & mask:
                    continue
                i1 = i + sb
                i2 = i + sa
                i3 = i + sa + sb
                v0 = states[b, i]
                v1 = states[b, i1]
                v2 = states[b, i2]
                v3 = states[b, i3]
                states[b, i] = u[0][0] * v0 + u[0][1] * v1 + u[0][2] * v2 + u[0][3] * v3
                states[b, i1] = u[1][0] * v0 + u[1][1] * v1 + u[1][2] * v2 + u[1][3] * v3
                states[b, i2] = u[2][0] * v0 + u[2][1] * v1 + u[2][2] * v2 + u[2][3] * v3
                states[b, i3] = u[3][0] * v0 + u[3][1] * v1 + u[3][2] * v2 + u[3][3] * v3
    return states_arr


def apply_phase(object states_arr, int m, int wire, double theta):
    cdef dc[:, ::1] states = states_arr
    cdef Py_ssize_t batch = states.shape[0]
    cdef Py_ssize_t dim = states.shape[1]
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (m - wire - 1)
    cdef dc f = cos(theta) + 1j * sin(theta)
    cdef Py_ssize_t b, i
    with nogil:
        for b in range(batch):
            for i in range(dim):
                if i & stride:
                    states[b, i] = states[b, i] * f
    return states_arr


def apply_detuning(object states_arr, int m, int wire, object angles_arr):
    cdef dc[:, ::1] states = states_arr
    cdef double[::1] angles = np.ascontiguousarray(angles_arr, dtype=np.float64)
    cdef Py_ssize_t batch = states.shape[0]
    cdef Py_ssize_t dim = states.shape[1]
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (m - wire - 1)
    cdef Py_ssize_t b, i
    cdef dc f
    if angles.shape[0] != batch:
        raise ValueError("one angle per batch member required")
    with nogil:
        for b in range(batch):
            f = cos(angles[b]) + 1j * sin(angles[b])
            for i in range(dim):
                if i & stride:
                    states[b, i] = states[b, i] * f
    return states_arr


def population(object states_arr, int m, int wire):
    cdef dc[:, ::1] states = states_arr
    cdef Py_ssize_t batch = states.shape[0]
    cdef Py_ssize_t dim = states.shape[1]
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (m - wire - 1)
    out = np.empty(batch, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t b, i
    cdef double acc
    cdef dc a
    with nogil:
        for b in range(batch):
            acc = 0.0
            for i in range(dim):
                if i & stride:
                    a = states[b, i]
                    acc += a.real * a.real + a.imag * a.imag
            ov[b] = acc
    return out

"""Modeled fidelities of best few-entangler approximations to an SU(4).

The optimal approximant with a fixed entangler budget is a locally dressed
canonical gate, so its trace against the target depends only on chamber
coordinates and has a closed form per budget.  The table reports the best
achievable with at most i entanglers, which makes it nondecreasing in i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .weyl import WeylCoordinates


def trace_norms(coords: WeylCoordinates) -> np.ndarray:
    """|tr(V_i^dag U)| of the optimal exactly-i-entangler approximant, i = 0..3."""
    a, b, c = coords.c1, coords.c2, coords.c3
    t0 = 4.0 * np.abs(np.cos(a) * np.cos(b) * np.cos(c)
                      + 1j * np.sin(a) * np.sin(b) * np.sin(c))
    t1 = 4.0 * np.abs(np.cos(0.25 * np.pi - a) * np.cos(b) * np.cos(c)
                      - 1j * np.sin(0.25 * np.pi - a) * np.sin(b) * np.sin(c))
    t2 = 4.0 * np.abs(np.cos(c))
    return np.array([t0, t1, t2, 4.0])


@dataclass(frozen=True)
class FidelityTable:
    """Average gate fidelity of the best approximation using at most i entanglers."""

    f_avg: tuple[float, float, float, float]
    # entangler count that attains each table entry
    attained_by: tuple[int, int, int, int]

    def __getitem__(self, i: int) -> float:
        return self.f_avg[i]


def _avg_fidelity(trace_norm: float) -> float:
    return (4.0 + trace_norm * trace_norm) / 20.0


def fidelity_table(coords: WeylCoordinates) -> FidelityTable:
    exact = [_avg_fidelity(t) for t in trace_norms(coords)]
    best: list[float] = []
    by: list[int] = []
    cur, cur_i = -1.0, 0
    for i, f in enumerate(exact):
        if f > cur + 1e-15:
            cur, cur_i = f, i
        best.append(cur)
        by.append(cur_i)
    return FidelityTable(tuple(best), tuple(by))


def best_entangler_count(table: FidelityTable, basis_fidelity: float) -> int:
    """argmax_i f_avg[i] * basis_fidelity^i, smallest i on ties."""
    if not 0.0 < basis_fidelity <= 1.0:
        raise ValueError("basis fidelity must lie in (0, 1]")
    best_i, best_score = 0, -1.0
    for i in range(4):
        score = table.f_avg[i] * basis_fidelity**i
        if score > best_score + 1e-12:
            best_i, best_score = i, score
    # reuse the cheaper realization when a smaller budget attains the optimum
    return table.attained_by[best_i]

"""Random model-circuit generation for the heavy-output benchmark.

A width-m, depth-d circuit is d layers, each a uniformly random permutation
of the m qubits followed by Haar-random SU(4) blocks on consecutive pairs
of the permuted order.  Generation is a pure function of (spec, circuit
index): permutations and unitaries draw from named substreams, so circuits
can be produced in any order or in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .circuits import ModelCircuit
from .gates import su4
from .simkit.exact import simulate_ideal

HEAVY_WIDTH_BOUND = 14


@dataclass(frozen=True)
class QvSpec:
    m: int
    d: int
    seed: int

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ValueError("width must be at least 2")
        if self.d < 1:
            raise ValueError("depth must be at least 1")

    @property
    def quantum_volume(self) -> int:
        return 1 << min(self.m, self.d)


def haar_su4(gen: np.random.Generator) -> np.ndarray:
    """Haar-random SU(4) via QR of a complex Gaussian matrix.

    The triangular factor's diagonal phases are divided out to make the
    distribution left-invariant, then the determinant is normalized away.
    """
    z = gen.standard_normal((4, 4)) + 1j * gen.standard_normal((4, 4))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    u = q * (d / np.abs(d))
    u = u / np.linalg.det(u) ** 0.25
    return u


def _permutation(gen: np.random.Generator, m: int) -> list[int]:
    # Fisher-Yates on the substream
    p = list(range(m))
    for i in range(m - 1, 0, -1):
        j = int(gen.integers(0, i + 1))
        p[i], p[j] = p[j], p[i]
    return p


def generate_qv_circuit(spec: QvSpec, index: int = 0) -> ModelCircuit:
    layers = []
    for layer in range(spec.d):
        perm_gen = rng.substream(spec.seed, rng.GEN_PERM, index, layer)
        su4_gen = rng.substream(spec.seed, rng.GEN_SU4, index, layer)
        perm = _permutation(perm_gen, spec.m)
        gates = []
        for k in range(spec.m // 2):
            pair = (perm[2 * k], perm[2 * k + 1])
            gates.append(su4(pair, haar_su4(su4_gen)))
        layers.append(tuple(gates))
    return ModelCircuit(width=spec.m, layers=tuple(layers))


def ideal_probabilities(circuit: ModelCircuit) -> np.ndarray:
    if circuit.width > HEAVY_WIDTH_BOUND:
        raise ValueError(f"width {circuit.width} exceeds bound {HEAVY_WIDTH_BOUND}")
    return simulate_ideal(circuit)


def heavy_set_of_probs(probs: np.ndarray) -> set[str]:
    """Bitstrings strictly above the median probability.

    The median of the 2^m values is the mean of the two central order
    statistics (2^m is even); ties at the median are excluded.
    """
    m = int(np.log2(len(probs)))
    order = np.sort(probs)
    half = len(probs) // 2
    median = 0.5 * (order[half - 1] + order[half])
    return {
        format(i, f"0{m}b") for i, p in enumerate(probs) if p > median
    }


def ideal_heavy_set(circuit: ModelCircuit) -> set[str]:
    return heavy_set_of_probs(ideal_probabilities(circuit))


def ideal_hop(circuit: ModelCircuit) -> float:
    """Probability mass the ideal distribution itself puts on its heavy set."""
    probs = ideal_probabilities(circuit)
    heavy = heavy_set_of_probs(probs)
    # Sum in index order: set iteration order varies per process (string
    # hash randomization) and would perturb the last ulp.
    idx = sorted(int(s, 2) for s in heavy)
    return float(probs[idx].sum()) if idx else 0.0

"""Noise parameterization for trajectory simulation.

The model keeps one depolarizing kick probability per gate family
(single-qubit scalar, two-qubit per edge), per-qubit relaxation and
dephasing times, a quasi-static detuning spread resampled each shot, and
per-qubit readout confusion with reset error.  Probabilities are the
actual Pauli-kick probabilities applied by the simulator; the builder
adopts the device's reported gate error rates directly as kick
probabilities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..device import DeviceModel, ReadoutModel
from ..gates import GateKind

TWO_PI = 2.0 * np.pi
# free parameter: a 50 kHz (1-sigma) static detuning spread gives QV64-scale
# idle budgets a visible echo-vs-idle contrast without dominating gate error
DEFAULT_QUASISTATIC_SIGMA = TWO_PI * 50e3  # rad/s


class NoiseError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseModel:
    sq_depol: float
    tq_depol: dict[tuple[int, int], float]  # keyed by sorted qubit-id pair
    t1_us: dict[int, float]
    t2_us: dict[int, float]
    quasistatic_sigma: float  # rad/s, std of the per-shot static detuning
    readout: dict[int, ReadoutModel]
    profile: str = "sp"

    def __post_init__(self) -> None:
        if not 0.0 <= self.sq_depol <= 1.0:
            raise NoiseError("sq_depol outside [0, 1]")
        for pair, p in self.tq_depol.items():
            if not 0.0 <= p <= 1.0:
                raise NoiseError(f"tq_depol[{pair}] outside [0, 1]")
            if tuple(sorted(pair)) != tuple(pair):
                raise NoiseError(f"tq_depol key {pair} is not a sorted pair")
        if self.quasistatic_sigma < 0:
            raise NoiseError("quasistatic_sigma must be nonnegative")
        for q, t1 in self.t1_us.items():
            t2 = self.t2_us.get(q)
            if t2 is None:
                raise NoiseError(f"qubit {q} has t1 but no t2")
            if t1 < 0 or t2 < 0:
                raise NoiseError(f"negative coherence time on qubit {q}")
            if t1 > 0 and t2 > 2.0 * t1 + 1e-12:
                raise NoiseError(f"qubit {q}: t2 exceeds 2*t1")
        if self.profile not in ("sp", "esp"):
            raise NoiseError(f"unknown readout profile {self.profile!r}")

    def edge_depol(self, a: int, b: int) -> float:
        key = (min(a, b), max(a, b))
        try:
            return self.tq_depol[key]
        except KeyError:
            raise NoiseError(f"no two-qubit depolarizing entry for edge {key}")

    def pure_dephasing_rate(self, q: int) -> float:
        """1/T_phi in 1/s from 1/T2 − 1/(2·T1); zero when times are zero."""
        t1 = self.t1_us.get(q, 0.0) * 1e-6
        t2 = self.t2_us.get(q, 0.0) * 1e-6
        inv = 0.0
        if t2 > 0:
            inv += 1.0 / t2
        if t1 > 0:
            inv -= 1.0 / (2.0 * t1)
        return max(inv, 0.0)

    def relaxation_rate(self, q: int) -> float:
        t1 = self.t1_us.get(q, 0.0) * 1e-6
        return 1.0 / t1 if t1 > 0 else 0.0


def zero_noise(qubits: tuple[int, ...]) -> NoiseModel:
    clean = ReadoutModel(p01=0.0, p10=0.0, reset_error=0.0)
    pairs = {
        (min(a, b), max(a, b)): 0.0 for a in qubits for b in qubits if a != b
    }
    return NoiseModel(
        sq_depol=0.0,
        tq_depol=pairs,
        t1_us={q: 0.0 for q in qubits},
        t2_us={q: 0.0 for q in qubits},
        quasistatic_sigma=0.0,
        readout={q: clean for q in qubits},
        profile="sp",
    )


def from_device(
    device: DeviceModel,
    profile: str = "sp",
    quasistatic_sigma: float = 0.0,
    entangler_kind: GateKind = GateKind.CX,
) -> NoiseModel:
    """Noise model matching the device's reported error rates.

    ``entangler_kind`` picks which hardware variant's error rate feeds each
    edge's two-qubit kick probability (it should match the gate set the
    simulated schedules were emitted for)."""
    tq = {}
    for e in device.edges:
        v = device.entangler_variant(e.control, e.target, entangler_kind)
        key = (min(e.control, e.target), max(e.control, e.target))
        tq[key] = v.error
    readout = {}
    for q in device.qubits:
        if profile == "esp":
            if q.readout_esp is None:
                raise NoiseError(f"qubit {q.id} carries no esp readout calibration")
            readout[q.id] = q.readout_esp
        else:
            readout[q.id] = q.readout
    return NoiseModel(
        sq_depol=device.mean_sq_error(),
        tq_depol=tq,
        t1_us={q.id: q.t1_us for q in device.qubits},
        t2_us={q.id: q.t2_us for q in device.qubits},
        quasistatic_sigma=quasistatic_sigma,
        readout=readout,
        profile=profile,
    )


def scale_noise(noise: NoiseModel, factor: float) -> NoiseModel:
    """Uniformly scale error magnitudes by ``factor``.

    Kick, readout, and reset probabilities multiply by the factor (capped
    at 1); coherence times scale inversely so idle error rates follow the
    same factor; the detuning spread multiplies directly.  A factor of 0
    turns every noise source off."""
    if factor < 0:
        raise NoiseError("scale factor must be nonnegative")

    def p(x: float) -> float:
        return min(x * factor, 1.0)

    def t(x: float) -> float:
        return x / factor if factor > 0 and x > 0 else 0.0

    readout = {
        q: ReadoutModel(p01=p(r.p01), p10=p(r.p10), reset_error=p(r.reset_error))
        for q, r in noise.readout.items()
    }
    return NoiseModel(
        sq_depol=p(noise.sq_depol),
        tq_depol={pair: p(v) for pair, v in noise.tq_depol.items()},
        t1_us={q: t(v) for q, v in noise.t1_us.items()},
        t2_us={q: t(v) for q, v in noise.t2_us.items()},
        quasistatic_sigma=noise.quasistatic_sigma * factor,
        readout=readout,
        profile=noise.profile,
    )


# ---------------------------------------------------------------------------
# Readout algebra


def qubit_confusion(model: ReadoutModel) -> np.ndarray:
    """Row-stochastic 2x2: row = true state, column = reported bit."""
    return np.array(
        [[1.0 - model.p01, model.p01], [model.p10, 1.0 - model.p10]], dtype=float
    )


def qubit_assignment(model: ReadoutModel) -> np.ndarray:
    """Confusion composed with reset error on the prepared side."""
    r = model.reset_error
    reset = np.array([[1.0 - r, r], [r, 1.0 - r]], dtype=float)
    return reset @ qubit_confusion(model)


def assignment_matrix(noise: NoiseModel, m: int) -> np.ndarray:
    """2^m x 2^m row-stochastic map: prepared index -> reported index.

    Qubit j (bit j, most significant first) is the j-th entry of the noise
    model's readout table, so the order follows the device wire order the
    model was built from."""
    if m > 10:
        raise NoiseError("assignment matrix limited to 10 qubits")
    qubits = list(noise.readout)[:m]
    if len(qubits) < m:
        raise NoiseError(f"noise model carries {len(qubits)} readout entries, need {m}")
    a = np.array([[1.0]])
    for q in qubits:
        a = np.kron(a, qubit_assignment(noise.readout[q]))
    return a


def total_assignment_error(a: np.ndarray) -> float:
    """Mean over prepared states of the misassignment probability."""
    return float(1.0 - np.mean(np.diag(a)))


def prepared_zero_error(a: np.ndarray) -> float:
    """Probability that preparing all zeros reads back anything else."""
    return float(1.0 - a[0, 0])


# ---------------------------------------------------------------------------
# JSON exchange


def noise_to_json(noise: NoiseModel) -> dict:
    return {
        "sq_depol": noise.sq_depol,
        "tq_depol": [
            {"qubits": list(pair), "p": p} for pair, p in sorted(noise.tq_depol.items())
        ],
        "t1_us": {str(q): v for q, v in noise.t1_us.items()},
        "t2_us": {str(q): v for q, v in noise.t2_us.items()},
        "quasistatic_sigma": noise.quasistatic_sigma,
        "readout": {
            str(q): {"p01": r.p01, "p10": r.p10, "reset_error": r.reset_error}
            for q, r in noise.readout.items()
        },
        "profile": noise.profile,
    }


def noise_from_json(data: dict) -> NoiseModel:
    return NoiseModel(
        sq_depol=float(data["sq_depol"]),
        tq_depol={
            (min(e["qubits"]), max(e["qubits"])): float(e["p"])
            for e in data["tq_depol"]
        },
        t1_us={int(q): float(v) for q, v in data["t1_us"].items()},
        t2_us={int(q): float(v) for q, v in data["t2_us"].items()},
        quasistatic_sigma=float(data["quasistatic_sigma"]),
        readout={
            int(q): ReadoutModel(
                p01=float(r["p01"]),
                p10=float(r["p10"]),
                reset_error=float(r["reset_error"]),
            )
            for q, r in data["readout"].items()
        },
        profile=str(data.get("profile", "sp")),
    )


def save_noise(noise: NoiseModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(noise_to_json(noise), indent=1, sort_keys=True))


def load_noise(path: str | Path) -> NoiseModel:
    return noise_from_json(json.loads(Path(path).read_text()))

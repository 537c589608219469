"""Emission of a routed circuit onto device wires.

Every placed block is synthesized in the hardware-native entangler
direction of its edge; mirrored placements absorb a wire exchange into
the block; explicit swaps become exact three-entangler blocks.  A final
global pass merges single-qubit runs across block boundaries, so locals
at the seam of consecutive blocks on the same wire collapse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuits import ModelCircuit, PhysicalCircuit
from ..device import DeviceModel
from ..gates import Gate, GateKind, SWAP_MATRIX, measure
from ..synth import (
    best_approximation,
    best_approximation_mirrored,
    collapse_1q_runs,
    synthesize_mirrored,
    synthesize_pulse_efficient,
)
from .bip import RoutingConfig
from .solve import LayoutSolution, RoutingError

_PULSE_KINDS = frozenset({GateKind.SX, GateKind.XP, GateKind.XM})
_ENTANGLER_KINDS = frozenset({GateKind.CX, GateKind.ECR})


@dataclass(frozen=True)
class EmissionStats:
    entangler_count: int
    sq_pulse_count: int
    phase_count: int
    gate_count: int


def emission_stats(pc: PhysicalCircuit) -> EmissionStats:
    ent = sum(1 for g in pc.ops if g.kind in _ENTANGLER_KINDS)
    pulses = sum(1 for g in pc.ops if g.kind in _PULSE_KINDS)
    phases = sum(1 for g in pc.ops if g.kind is GateKind.PHASE)
    return EmissionStats(ent, pulses, phases, len(pc.ops))


def _edge_natural(device: DeviceModel, ida: int, idb: int) -> bool:
    edge = device.edge_between(ida, idb)
    if edge is None:
        raise RoutingError(f"placement on non-adjacent qubits {ida}, {idb}")
    return edge.control == ida


def apply_layout(
    circuit: ModelCircuit,
    sol: LayoutSolution,
    device: DeviceModel,
    cfg: RoutingConfig,
) -> PhysicalCircuit:
    """Turn a layout solution into a flat physical gate list with measures."""
    ids = device.qubit_ids()
    exact = cfg.basis_fidelity >= 1.0 - 1e-12
    ent = cfg.entangler

    by_layer: dict[int, list] = {}
    for g in sol.placements:
        by_layer.setdefault(g.layer, []).append(g)
    for row in by_layer.values():
        row.sort(key=lambda g: g.slot)
    by_window: dict[int, list] = {}
    for s in sol.swaps:
        by_window.setdefault(s.window, []).append(s)
    for row in by_window.values():
        row.sort(key=lambda s: (s.sublayer, s.pu))

    ops: list[Gate] = []
    gphase = 0.0
    for t in range(circuit.depth):
        for g in by_layer.get(t, ()):
            u = np.asarray(circuit.layers[t][g.slot].unitary, dtype=complex)
            ida, idb = ids[g.pa], ids[g.pb]
            natural = _edge_natural(device, ida, idb)
            if g.mirrored:
                if exact:
                    dec = synthesize_mirrored(u, ent, natural, (ida, idb))
                else:
                    _, dec = best_approximation_mirrored(
                        u, cfg.basis_fidelity, ent, natural, (ida, idb)
                    )
            else:
                if exact:
                    dec = synthesize_pulse_efficient(u, ent, natural, (ida, idb))
                else:
                    _, dec = best_approximation(
                        u, cfg.basis_fidelity, ent, natural, (ida, idb)
                    )
            ops.extend(dec.gates)
            gphase += dec.global_phase
        for s in by_window.get(t, ()):
            idu, idv = ids[s.pu], ids[s.pv]
            natural = _edge_natural(device, idu, idv)
            dec = synthesize_pulse_efficient(SWAP_MATRIX, ent, natural, (idu, idv))
            ops.extend(dec.gates)
            gphase += dec.global_phase

    for q in range(circuit.width):
        ops.append(measure(ids[sol.final_mapping[q]]))

    merged, extra = collapse_1q_runs(ops)
    gphase += extra

    used = {p for mapping in sol.mappings for p in mapping}
    used.update(sol.final_mapping)
    for s in sol.swaps:
        used.update((s.pu, s.pv))
    wires = tuple(ids[p] for p in sorted(used))
    return PhysicalCircuit(qubits=wires, ops=tuple(merged))

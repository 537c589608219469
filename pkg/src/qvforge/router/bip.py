"""Layout and routing as an explicit 0-1 program.

The objective is the log of a product fidelity: each gate contributes the
best approximate-synthesis fidelity of either itself (direct) or itself
composed with a SWAP (mirrored, relabeling the pair's wires afterwards);
each inserted SWAP costs three entangler uses; a depth factor K penalizes
every emitted layer, gate layers and used swap sub-layers alike.

Variable scheme, all binary:

    x[t][q][p]        logical q occupies position p entering layer t
    c[w][s][q][p]     mapping inside window w after swap sub-layer s
                      (s = 0 is the post-mirror mapping; the last chain
                      state is identified with x[t+1])
    z[g][e][o][mir]   gate g realized on edge e with orientation o,
                      directly or mirrored
    y[w][s][e]        SWAP on edge e in sub-layer s of window w
    u[w][s]           sub-layer s of window w is non-empty

Positions are indices into the device qubit list.  The solver exploits the
temporal structure of the model; `assignment_of` and `check_assignment`
tie any solution back to these variables and constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..circuits import ModelCircuit
from ..device import DeviceModel
from ..gates import SWAP_MATRIX
from ..synth import fidelity_table, weyl_coordinates


@dataclass(frozen=True)
class RoutingConfig:
    k: float = 0.995
    basis_fidelity: float = 0.99
    h: int = 1
    time_limit: float = 10.0
    allow_mirroring: bool = True
    entangler: str = "cx"
    swap_distance: int | None = 2

    def __post_init__(self) -> None:
        if not 0.0 < self.k <= 1.0:
            raise ValueError("depth factor k must lie in (0, 1]")
        if not 0.0 < self.basis_fidelity <= 1.0:
            raise ValueError("basis fidelity must lie in (0, 1]")
        if self.h < 0:
            raise ValueError("swap sub-layer count must be non-negative")
        if self.entangler not in ("cx", "ecr"):
            raise ValueError(f"unknown entangler {self.entangler!r}")


def _best_log_fidelity(u: np.ndarray, basis_fidelity: float) -> float:
    table = fidelity_table(weyl_coordinates(u))
    return max(
        math.log(table.f_avg[i]) + i * math.log(basis_fidelity) if table.f_avg[i] > 0 else -math.inf
        for i in range(4)
    )


@dataclass(frozen=True)
class GateCost:
    layer: int
    slot: int
    a: int
    b: int
    direct_logf: float
    mirror_logf: float

    def best(self, allow_mirroring: bool) -> float:
        if allow_mirroring:
            return max(self.direct_logf, self.mirror_logf)
        return self.direct_logf


def build_gate_costs(circuit: ModelCircuit, cfg: RoutingConfig) -> tuple[tuple[GateCost, ...], ...]:
    """Log-fidelity of the best direct and mirrored synthesis of every layer gate."""
    gate_costs = []
    for t, layer in enumerate(circuit.layers):
        row = []
        for slot, g in enumerate(layer):
            u = np.asarray(g.unitary, dtype=complex)
            row.append(
                GateCost(
                    layer=t,
                    slot=slot,
                    a=g.qubits[0],
                    b=g.qubits[1],
                    direct_logf=_best_log_fidelity(u, cfg.basis_fidelity),
                    mirror_logf=_best_log_fidelity(SWAP_MATRIX @ u, cfg.basis_fidelity),
                )
            )
        gate_costs.append(tuple(row))
    return tuple(gate_costs)


@dataclass(frozen=True)
class Constraint:
    terms: tuple[tuple[int, float], ...]
    sense: str  # "<=", ">=", or "=="
    rhs: float


@dataclass
class BipModel:
    circuit: ModelCircuit
    device: DeviceModel
    cfg: RoutingConfig
    m: int
    n: int
    d: int
    edges: tuple[tuple[int, int], ...]  # position pairs, u < v
    gate_costs: tuple[tuple[GateCost, ...], ...]  # per layer
    var_names: list[str] = field(default_factory=list)
    var_index: dict[str, int] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[int, float] = field(default_factory=dict)
    objective_const: float = 0.0

    def var(self, name: str) -> int:
        return self.var_index[name]

    def swap_log_cost(self) -> float:
        return 3.0 * math.log(self.cfg.basis_fidelity)

    def depth_log_cost(self) -> float:
        return math.log(self.cfg.k)

    @property
    def num_vars(self) -> int:
        return len(self.var_names)


def _x(t: int, q: int, p: int) -> str:
    return f"x[{t}][{q}][{p}]"


def _c(w: int, s: int, q: int, p: int) -> str:
    return f"c[{w}][{s}][{q}][{p}]"


def _z(layer: int, slot: int, e: int, o: int, mir: int) -> str:
    return f"z[{layer}.{slot}][{e}][{o}][{mir}]"


def _y(w: int, s: int, e: int) -> str:
    return f"y[{w}][{s}][{e}]"


def _u(w: int, s: int) -> str:
    return f"u[{w}][{s}]"


def build_bip(circuit: ModelCircuit, device: DeviceModel, cfg: RoutingConfig) -> BipModel:
    m, n, d = circuit.width, device.width, circuit.depth
    if m > n:
        raise ValueError(f"circuit width {m} exceeds device width {n}")

    ids = device.qubit_ids()
    pos_of_id = {qid: p for p, qid in enumerate(ids)}
    edges = tuple(
        sorted(
            tuple(sorted((pos_of_id[e.control], pos_of_id[e.target])))
            for e in device.edges
        )
    )

    gate_costs = build_gate_costs(circuit, cfg)

    model = BipModel(
        circuit=circuit,
        device=device,
        cfg=cfg,
        m=m,
        n=n,
        d=d,
        edges=edges,
        gate_costs=tuple(gate_costs),
    )

    def add_var(name: str) -> int:
        model.var_index[name] = len(model.var_names)
        model.var_names.append(name)
        return model.var_index[name]

    def add_con(terms, sense, rhs) -> None:
        model.constraints.append(Constraint(tuple(terms), sense, float(rhs)))

    # --- variables ---------------------------------------------------------
    for t in range(d):
        for q in range(m):
            for p in range(n):
                add_var(_x(t, q, p))
    for w in range(d - 1):
        for s in range(cfg.h):  # c[w][s]; the final chain state is x[w+1]
            for q in range(m):
                for p in range(n):
                    add_var(_c(w, s, q, p))
    for t, layer in enumerate(model.gate_costs):
        for slot, _ in enumerate(layer):
            for e in range(len(edges)):
                for o in (0, 1):
                    mirs = (0, 1) if cfg.allow_mirroring else (0,)
                    for mir in mirs:
                        add_var(_z(t, slot, e, o, mir))
    for w in range(d - 1):
        for s in range(cfg.h):
            for e in range(len(edges)):
                add_var(_y(w, s, e))
            add_var(_u(w, s))

    V = model.var

    def chain_state(w: int, s: int, q: int, p: int) -> int:
        """s in 0..h; state h is x[w+1]."""
        if s == cfg.h:
            return V(_x(w + 1, q, p))
        return V(_c(w, s, q, p))

    # --- constraints -------------------------------------------------------
    all_state_vars = []
    for t in range(d):
        all_state_vars.append(("x", t, None))
    for w in range(d - 1):
        for s in range(cfg.h):
            all_state_vars.append(("c", w, s))

    def state_var(tag, i, s, q, p):
        if tag == "x":
            return V(_x(i, q, p))
        return V(_c(i, s, q, p))

    for tag, i, s in all_state_vars:
        for q in range(m):
            add_con([(state_var(tag, i, s, q, p), 1.0) for p in range(n)], "==", 1.0)
        for p in range(n):
            add_con([(state_var(tag, i, s, q, p), 1.0) for q in range(m)], "<=", 1.0)

    mirs = (0, 1) if cfg.allow_mirroring else (0,)
    for t, layer in enumerate(model.gate_costs):
        for slot, gc in enumerate(layer):
            branch_vars = []
            for e, (pu, pv) in enumerate(edges):
                for o in (0, 1):
                    pa, pb = (pu, pv) if o == 0 else (pv, pu)
                    for mir in mirs:
                        zv = V(_z(t, slot, e, o, mir))
                        branch_vars.append(zv)
                        add_con([(zv, 1.0), (V(_x(t, gc.a, pa)), -1.0)], "<=", 0.0)
                        add_con([(zv, 1.0), (V(_x(t, gc.b, pb)), -1.0)], "<=", 0.0)
                        if t < d - 1:
                            # post-mirror positions of the pair
                            qa = pb if mir else pa
                            qb = pa if mir else pb
                            add_con(
                                [(chain_state(t, 0, gc.a, qa), 1.0), (zv, -1.0)],
                                ">=",
                                0.0,
                            )
                            add_con(
                                [(chain_state(t, 0, gc.b, qb), 1.0), (zv, -1.0)],
                                ">=",
                                0.0,
                            )
            add_con([(v, 1.0) for v in branch_vars], "==", 1.0)

    for w in range(d - 1):
        active = {gc.a for gc in model.gate_costs[w]} | {
            gc.b for gc in model.gate_costs[w]
        }
        for q in range(m):
            if q in active:
                continue
            for p in range(n):
                add_con(
                    [(chain_state(w, 0, q, p), 1.0), (V(_x(w, q, p)), -1.0)],
                    ">=",
                    0.0,
                )
        for s in range(cfg.h):
            for e, (pu, pv) in enumerate(edges):
                yv = V(_y(w, s, e))
                add_con([(yv, 1.0), (V(_u(w, s)), -1.0)], "<=", 0.0)
                for q in range(m):
                    add_con(
                        [
                            (chain_state(w, s + 1, q, pv), 1.0),
                            (chain_state(w, s, q, pu), -1.0),
                            (yv, -1.0),
                        ],
                        ">=",
                        -1.0,
                    )
                    add_con(
                        [
                            (chain_state(w, s + 1, q, pu), 1.0),
                            (chain_state(w, s, q, pv), -1.0),
                            (yv, -1.0),
                        ],
                        ">=",
                        -1.0,
                    )
            for p in range(n):
                touching = [
                    V(_y(w, s, e)) for e, (pu, pv) in enumerate(edges) if p in (pu, pv)
                ]
                add_con([(v, 1.0) for v in touching], "<=", 1.0)
                for q in range(m):
                    # no swap on p this sub-layer => the occupant stays
                    add_con(
                        [(chain_state(w, s + 1, q, p), 1.0)]
                        + [(chain_state(w, s, q, p), -1.0)]
                        + [(v, 1.0) for v in touching],
                        ">=",
                        0.0,
                    )

    # --- objective ---------------------------------------------------------
    for t, layer in enumerate(model.gate_costs):
        for slot, gc in enumerate(layer):
            for e in range(len(edges)):
                for o in (0, 1):
                    for mir in mirs:
                        coef = gc.mirror_logf if mir else gc.direct_logf
                        model.objective[V(_z(t, slot, e, o, mir))] = coef
    for w in range(d - 1):
        for s in range(cfg.h):
            for e in range(len(edges)):
                model.objective[V(_y(w, s, e))] = model.swap_log_cost()
            model.objective[V(_u(w, s))] = model.depth_log_cost()
    model.objective_const = d * model.depth_log_cost()
    return model

"""Device model: qubit coherence data, coupling graph, gate variants.

The on-disk schema is JSON:

    {"dt_ps": int,
     "qubits": [{"id", "t1_us", "t2_us", "sq_error", "sq_duration_ns",
                 "readout": {"p01", "p10", "reset_error"},
                 optional "readout_esp": same shape,
                 optional "readout_duration_ns"}],
     "edges": [{"control", "target",
                "variants": [{"name", "duration_ns", "error"}]}]}

Durations are stored internally as integer picoseconds so schedule
arithmetic is exact.  The control/target order of an edge records the
hardware's natural gate direction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .gates import GateKind

VARIANT_NAMES = ("ecr_cx", "ecr", "direct_cx")


class DeviceError(ValueError):
    pass


def _ps(ns: float) -> int:
    ps = ns * 1000.0
    out = round(ps)
    if abs(ps - out) > 1e-6:
        raise DeviceError(f"duration {ns} ns is not an integer picosecond count")
    return int(out)


@dataclass(frozen=True)
class ReadoutModel:
    p01: float
    p10: float
    reset_error: float

    def __post_init__(self) -> None:
        for name in ("p01", "p10", "reset_error"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DeviceError(f"readout {name}={v} outside [0, 1]")


@dataclass(frozen=True)
class GateVariant:
    name: str
    duration_ps: int
    error: float

    def __post_init__(self) -> None:
        if self.name not in VARIANT_NAMES:
            raise DeviceError(f"unknown gate variant {self.name!r}")
        if self.duration_ps <= 0:
            raise DeviceError(f"variant {self.name}: duration must be positive")
        if not 0.0 <= self.error <= 1.0:
            raise DeviceError(f"variant {self.name}: error outside [0, 1]")


@dataclass(frozen=True)
class QubitSpec:
    id: int
    t1_us: float
    t2_us: float
    sq_error: float
    sq_duration_ps: int
    readout: ReadoutModel
    readout_esp: ReadoutModel | None = None
    readout_duration_ps: int = 0

    def __post_init__(self) -> None:
        if self.t1_us <= 0 or self.t2_us <= 0:
            raise DeviceError(f"qubit {self.id}: T1 and T2 must be positive")
        if self.t2_us > 2.0 * self.t1_us + 1e-12:
            raise DeviceError(f"qubit {self.id}: T2 exceeds the 2*T1 bound")
        if not 0.0 <= self.sq_error <= 1.0:
            raise DeviceError(f"qubit {self.id}: sq_error outside [0, 1]")
        if self.sq_duration_ps <= 0:
            raise DeviceError(f"qubit {self.id}: sq_duration must be positive")


@dataclass(frozen=True)
class Edge:
    control: int
    target: int
    variants: tuple[GateVariant, ...]

    def __post_init__(self) -> None:
        if self.control == self.target:
            raise DeviceError("edge endpoints must differ")
        if not self.variants:
            raise DeviceError(f"edge {self.control}-{self.target}: no gate variants")
        names = [v.name for v in self.variants]
        if len(set(names)) != len(names):
            raise DeviceError(f"edge {self.control}-{self.target}: duplicate variant")

    def variant(self, name: str) -> GateVariant | None:
        for v in self.variants:
            if v.name == name:
                return v
        return None

    def best_fidelity(self) -> float:
        return max(1.0 - v.error for v in self.variants)


@dataclass(frozen=True)
class DeviceModel:
    dt_ps: int
    qubits: tuple[QubitSpec, ...]
    edges: tuple[Edge, ...]
    # when False, a CX resolves to the echoed construction even on edges
    # carrying a dedicated direct calibration (for variant comparisons)
    cx_prefers_direct: bool = True

    def __post_init__(self) -> None:
        if self.dt_ps <= 0:
            raise DeviceError("dt_ps must be positive")
        ids = [q.id for q in self.qubits]
        if len(set(ids)) != len(ids):
            raise DeviceError("duplicate qubit id")
        known = set(ids)
        seen_pairs: set[frozenset[int]] = set()
        for e in self.edges:
            if e.control not in known or e.target not in known:
                raise DeviceError(f"edge {e.control}-{e.target} uses unknown qubit")
            pair = frozenset((e.control, e.target))
            if pair in seen_pairs:
                raise DeviceError(f"edge {e.control}-{e.target} duplicated")
            seen_pairs.add(pair)

    @property
    def width(self) -> int:
        return len(self.qubits)

    def qubit(self, qubit_id: int) -> QubitSpec:
        for q in self.qubits:
            if q.id == qubit_id:
                return q
        raise DeviceError(f"unknown qubit id {qubit_id}")

    def qubit_ids(self) -> tuple[int, ...]:
        return tuple(q.id for q in self.qubits)

    def has_edge(self, a: int, b: int) -> bool:
        return self.edge_between(a, b) is not None

    def edge_between(self, a: int, b: int) -> Edge | None:
        for e in self.edges:
            if {e.control, e.target} == {a, b}:
                return e
        return None

    def neighbors(self, qubit_id: int) -> tuple[int, ...]:
        out = []
        for e in self.edges:
            if e.control == qubit_id:
                out.append(e.target)
            elif e.target == qubit_id:
                out.append(e.control)
        return tuple(sorted(out))

    def entangler_variant(self, a: int, b: int, kind: GateKind) -> GateVariant:
        """Resolve the hardware variant implementing a CX or ECR on edge a-b.

        A CX prefers the dedicated direct calibration when the edge has one
        and otherwise falls back to the echoed construction.
        """
        e = self.edge_between(a, b)
        if e is None:
            raise DeviceError(f"no edge between {a} and {b}")
        if kind is GateKind.ECR:
            v = e.variant("ecr")
            if v is None:
                raise DeviceError(f"edge {a}-{b} has no ecr variant")
            return v
        if kind is GateKind.CX:
            v = e.variant("ecr_cx")
            if self.cx_prefers_direct:
                v = e.variant("direct_cx") or v
            if v is None:
                raise DeviceError(f"edge {a}-{b} has no CX variant")
            return v
        raise DeviceError(f"{kind.value} is not an entangler kind")

    def gate_duration_ps(self, kind: GateKind, qubits: tuple[int, ...]) -> int:
        if kind in (GateKind.PHASE, GateKind.BARRIER):
            return 0
        if kind in (GateKind.SX, GateKind.XP, GateKind.XM):
            return self.qubit(qubits[0]).sq_duration_ps
        if kind is GateKind.MEASURE:
            return self.qubit(qubits[0]).readout_duration_ps
        if kind in (GateKind.CX, GateKind.ECR):
            return self.entangler_variant(qubits[0], qubits[1], kind).duration_ps
        raise DeviceError(f"no duration rule for gate kind {kind.value}")

    def mean_sq_error(self) -> float:
        return sum(q.sq_error for q in self.qubits) / len(self.qubits)

    def mean_tq_error(self, variant: str = "ecr_cx") -> float:
        errs = [e.variant(variant).error for e in self.edges if e.variant(variant)]
        if not errs:
            raise DeviceError(f"no edge carries variant {variant}")
        return sum(errs) / len(errs)


# ---------------------------------------------------------------------------
# Load / save


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise DeviceError(f"{where}: missing field {key!r}")
    return d[key]


def _readout_from_json(d: dict, where: str) -> ReadoutModel:
    return ReadoutModel(
        p01=float(_need(d, "p01", where)),
        p10=float(_need(d, "p10", where)),
        reset_error=float(_need(d, "reset_error", where)),
    )


def packaged_device_path(name: str) -> Path:
    """Path of a device file shipped with the package (e.g. "montreal_chain")."""
    from importlib import resources

    return Path(str(resources.files("qvforge") / "data" / f"{name}.json"))


def resolve_device_path(spec: str | Path) -> Path:
    """Interpret ``spec`` as a filesystem path, falling back to packaged data."""
    p = Path(spec)
    if p.exists():
        return p
    packaged = packaged_device_path(str(spec))
    if packaged.exists():
        return packaged
    raise DeviceError(f"no device file at {spec} and no packaged device by that name")


def load_device(path: str | Path) -> DeviceModel:
    path = resolve_device_path(path)
    try:
        with open(path) as f:
            raw = json.load(f)
    except json.JSONDecodeError as exc:
        raise DeviceError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    qubits = []
    for i, q in enumerate(_need(raw, "qubits", str(path))):
        where = f"qubits[{i}]"
        esp = None
        if "readout_esp" in q:
            esp = _readout_from_json(q["readout_esp"], where + ".readout_esp")
        qubits.append(
            QubitSpec(
                id=int(_need(q, "id", where)),
                t1_us=float(_need(q, "t1_us", where)),
                t2_us=float(_need(q, "t2_us", where)),
                sq_error=float(_need(q, "sq_error", where)),
                sq_duration_ps=_ps(float(_need(q, "sq_duration_ns", where))),
                readout=_readout_from_json(_need(q, "readout", where), where),
                readout_esp=esp,
                readout_duration_ps=_ps(float(q.get("readout_duration_ns", 0.0)))
                if q.get("readout_duration_ns")
                else 0,
            )
        )
    edges = []
    for i, e in enumerate(_need(raw, "edges", str(path))):
        where = f"edges[{i}]"
        variants = tuple(
            GateVariant(
                name=str(_need(v, "name", where)),
                duration_ps=_ps(float(_need(v, "duration_ns", where))),
                error=float(_need(v, "error", where)),
            )
            for v in _need(e, "variants", where)
        )
        edges.append(
            Edge(
                control=int(_need(e, "control", where)),
                target=int(_need(e, "target", where)),
                variants=variants,
            )
        )
    return DeviceModel(
        dt_ps=int(_need(raw, "dt_ps", str(path))),
        qubits=tuple(qubits),
        edges=tuple(edges),
    )


def serialize_device(device: DeviceModel) -> dict:
    def ro(r: ReadoutModel) -> dict:
        return {"p01": r.p01, "p10": r.p10, "reset_error": r.reset_error}

    qubits = []
    for q in device.qubits:
        d = {
            "id": q.id,
            "t1_us": q.t1_us,
            "t2_us": q.t2_us,
            "sq_error": q.sq_error,
            "sq_duration_ns": q.sq_duration_ps / 1000.0,
            "readout": ro(q.readout),
        }
        if q.readout_esp is not None:
            d["readout_esp"] = ro(q.readout_esp)
        if q.readout_duration_ps:
            d["readout_duration_ns"] = q.readout_duration_ps / 1000.0
        qubits.append(d)
    edges = [
        {
            "control": e.control,
            "target": e.target,
            "variants": [
                {"name": v.name, "duration_ns": v.duration_ps / 1000.0, "error": v.error}
                for v in e.variants
            ],
        }
        for e in device.edges
    ]
    return {"dt_ps": device.dt_ps, "qubits": qubits, "edges": edges}


# ---------------------------------------------------------------------------
# Chain selection


def select_chain(device: DeviceModel, length: int) -> list[int]:
    """Best simple path of ``length`` qubits by product fidelity.

    Score = prod over path qubits of (1 - sq_error) times prod over path
    edges of the best variant fidelity.  Ties break toward the
    lexicographically smallest id sequence.
    """
    if length < 1:
        raise DeviceError("chain length must be positive")
    if length > device.width:
        raise DeviceError(f"no path of requested length {length}")
    if length == 1:
        best = max(device.qubits, key=lambda q: (1.0 - q.sq_error, -q.id))
        return [best.id]

    adj: dict[int, tuple[int, ...]] = {q.id: device.neighbors(q.id) for q in device.qubits}
    sq_log = {q.id: math.log1p(-q.sq_error) for q in device.qubits}
    edge_log: dict[frozenset[int], float] = {}
    for e in device.edges:
        edge_log[frozenset((e.control, e.target))] = math.log(e.best_fidelity())

    best_score = -math.inf
    best_path: list[int] | None = None

    def extend(path: list[int], score: float) -> None:
        nonlocal best_score, best_path
        if len(path) == length:
            key = (score, path)
            if score > best_score + 1e-15 or (
                abs(score - best_score) <= 1e-15
                and (best_path is None or path < best_path)
            ):
                best_score = score
                best_path = list(path)
            return
        tail = path[-1]
        for nxt in adj[tail]:
            if nxt in path:
                continue
            extend(
                path + [nxt],
                score + sq_log[nxt] + edge_log[frozenset((tail, nxt))],
            )

    for q in sorted(adj):
        extend([q], sq_log[q])
    if best_path is None:
        raise DeviceError(f"no path of requested length {length}")
    return best_path

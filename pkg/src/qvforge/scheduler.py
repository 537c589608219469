"""Duration-aware scheduling, idle-window extraction, and decoupling.

Times are integer picoseconds.  Entry start times sit on the device ``dt``
grid; durations are the device's native gate lengths and need not be grid
multiples.  Entries are kept in execution order: ascending start, with
zero-duration entries (frame updates, barriers) ahead of timed entries at
the same instant so that per-qubit replay order is unambiguous.

Decoupling fills an idle window of length ``T_idle`` with the symmetric
sequence  delay τ/2 · Xp · delay τ · Xm · delay τ/2  where
τ = (T_idle − 2·T_X) / 2.  Pulse starts are the exact positions rounded
down to the grid, so any rounding remainder lands in the trailing delay
and both pulses stay strictly inside the window.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .circuits import PhysicalCircuit
from .device import DeviceModel
from .gates import Gate, GateKind, xm, xp


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class ScheduleEntry:
    gate: Gate
    start: int  # ps, on the dt grid
    duration: int  # ps

    @property
    def end(self) -> int:
        return self.start + self.duration


@dataclass(frozen=True)
class Schedule:
    qubits: tuple[int, ...]  # wire order, as in the scheduled circuit
    entries: tuple[ScheduleEntry, ...]
    dt_ps: int

    def __post_init__(self) -> None:
        busy: dict[int, int] = {}
        order: dict[int, int] = {}
        for e in self.entries:
            if e.start % self.dt_ps:
                raise ScheduleError(f"start {e.start} off the {self.dt_ps} ps grid")
            if e.duration < 0:
                raise ScheduleError("negative duration")
            for q in e.gate.qubits:
                if e.start < order.get(q, 0):
                    raise ScheduleError(f"entries out of execution order on qubit {q}")
                if e.duration and e.start < busy.get(q, 0):
                    raise ScheduleError(f"overlapping entries on qubit {q}")
                if e.duration:
                    busy[q] = max(busy.get(q, 0), e.end)
                    order[q] = max(order.get(q, 0), e.end)
                else:
                    order[q] = max(order.get(q, 0), e.start)

    @property
    def total_duration(self) -> int:
        return max((e.end for e in self.entries), default=0)

    def on_qubit(self, q: int) -> tuple[ScheduleEntry, ...]:
        return tuple(e for e in self.entries if q in e.gate.qubits)


@dataclass(frozen=True)
class IdleWindow:
    qubit: int
    start: int  # ps
    t_idle: int  # ps

    @property
    def end(self) -> int:
        return self.start + self.t_idle


@dataclass(frozen=True)
class DdPolicy:
    enabled: bool = True
    pulse_duration_ps: int = 21330
    min_window_ps: int = 0  # 0 means the smallest usable window (2·T_X + 4·dt)
    sequence: str = "xp_xm"

    def effective_min_window(self, dt_ps: int) -> int:
        floor = 2 * self.pulse_duration_ps + 4 * dt_ps
        return max(self.min_window_ps, floor)


def default_dd_policy(device: DeviceModel, enabled: bool = True) -> DdPolicy:
    """Policy with the device's longest single-qubit pulse as T_X."""
    t_x = max(q.sq_duration_ps for q in device.qubits)
    return DdPolicy(enabled=enabled, pulse_duration_ps=t_x)


def _grid_ceil(t: int, dt: int) -> int:
    return -(-t // dt) * dt


def _grid_floor(t: int, dt: int) -> int:
    return (t // dt) * dt


def _entry_sort_key(e: ScheduleEntry, index: int):
    return (e.start, 0 if e.duration == 0 else 1, index)


def _execution_order(entries: list[ScheduleEntry]) -> list[ScheduleEntry]:
    indexed = sorted(enumerate(entries), key=lambda p: _entry_sort_key(p[1], p[0]))
    return [e for _, e in indexed]


def schedule_asap(circuit: PhysicalCircuit, device: DeviceModel) -> Schedule:
    """Left-packed schedule: every gate starts at the earliest grid time at
    or after all of its qubits' ready times.

    Measurements are one synchronized event: every measure entry starts at
    the common earliest grid time all measured qubits are ready, which also
    keeps the classical bit order (program order of the measures) intact
    under the execution-order sort."""
    dt = device.dt_ps
    ready: dict[int, int] = {q: 0 for q in circuit.qubits}
    timed: list[ScheduleEntry] = []
    measure_gates = []
    for g in circuit.ops:
        if g.kind is GateKind.MEASURE:
            measure_gates.append(g)
            continue
        dur = device.gate_duration_ps(g.kind, g.qubits)
        start = _grid_ceil(max(ready[q] for q in g.qubits), dt)
        timed.append(ScheduleEntry(gate=g, start=start, duration=dur))
        for q in g.qubits:
            ready[q] = max(ready[q], start + dur)
    measures: list[ScheduleEntry] = []
    if measure_gates:
        t_meas = _grid_ceil(
            max(ready[g.qubits[0]] for g in measure_gates), dt
        )
        for g in measure_gates:
            dur = device.gate_duration_ps(g.kind, g.qubits)
            measures.append(ScheduleEntry(gate=g, start=t_meas, duration=dur))
    return Schedule(
        qubits=circuit.qubits, entries=tuple(_execution_order(timed + measures)), dt_ps=dt
    )


def find_idle_windows(s: Schedule) -> list[IdleWindow]:
    """Maximal gaps between consecutive activities on each qubit.

    Activity means a timed entry or a measurement (so the stretch between
    a qubit's last gate and the synchronized measurement is a window).
    Gaps before a qubit's first activity and after its last are not
    windows; frame updates and barriers never interrupt a window."""
    windows: list[IdleWindow] = []
    for q in s.qubits:
        spans = sorted(
            (e.start, e.end) for e in s.entries
            if q in e.gate.qubits
            and (e.duration > 0 or e.gate.kind is GateKind.MEASURE)
        )
        for (_, end_a), (start_b, _) in zip(spans, spans[1:]):
            if start_b > end_a:
                windows.append(IdleWindow(qubit=q, start=end_a, t_idle=start_b - end_a))
    windows.sort(key=lambda w: (w.start, w.qubit))
    return windows


def dd_pulse_starts(window_start: int, t_idle: int, t_x: int, dt: int) -> tuple[int, int]:
    """Grid positions of the Xp and Xm pulses inside one idle window.

    With τ = (T_idle − 2·T_X)/2 the exact positions are start + τ/2 and
    start + τ/2 + T_X + τ; each is rounded down to the grid."""
    slack = t_idle - 2 * t_x  # = 2τ, so τ/2 = slack / 4
    xp_start = (4 * window_start + slack) // (4 * dt) * dt
    xm_start = (4 * window_start + 3 * slack + 4 * t_x) // (4 * dt) * dt
    return xp_start, xm_start


def insert_dd(s: Schedule, policy: DdPolicy) -> Schedule:
    """Fill every eligible idle window with the symmetric Xp–Xm pair."""
    if not policy.enabled:
        return s
    if policy.sequence != "xp_xm":
        raise ScheduleError(f"unknown decoupling sequence {policy.sequence!r}")
    t_x = policy.pulse_duration_ps
    min_window = policy.effective_min_window(s.dt_ps)
    added: list[ScheduleEntry] = []
    for w in find_idle_windows(s):
        if w.t_idle < min_window:
            continue
        xp_start, xm_start = dd_pulse_starts(w.start, w.t_idle, t_x, s.dt_ps)
        added.append(ScheduleEntry(gate=xp(w.qubit), start=xp_start, duration=t_x))
        added.append(ScheduleEntry(gate=xm(w.qubit), start=xm_start, duration=t_x))
    if not added:
        return s
    return replace(s, entries=tuple(_execution_order(list(s.entries) + added)))


def circuit_duration(s: Schedule) -> float:
    """Total schedule length in nanoseconds."""
    return s.total_duration / 1000.0


# ---------------------------------------------------------------------------
# Exchange formats


def schedule_to_json(s: Schedule) -> dict:
    from .circuits import _gate_to_json

    return {
        "qubits": list(s.qubits),
        "dt_ps": s.dt_ps,
        "entries": [
            {"gate": _gate_to_json(e.gate), "start_ps": e.start, "duration_ps": e.duration}
            for e in s.entries
        ],
    }


def schedule_from_json(data: dict) -> Schedule:
    from .circuits import _gate_from_json

    entries = tuple(
        ScheduleEntry(
            gate=_gate_from_json(e["gate"]),
            start=int(e["start_ps"]),
            duration=int(e["duration_ps"]),
        )
        for e in data["entries"]
    )
    return Schedule(
        qubits=tuple(int(q) for q in data["qubits"]),
        entries=entries,
        dt_ps=int(data["dt_ps"]),
    )


def save_schedule(s: Schedule, path: str | Path) -> None:
    Path(path).write_text(json.dumps(schedule_to_json(s), indent=1, sort_keys=True))


def load_schedule(path: str | Path) -> Schedule:
    return schedule_from_json(json.loads(Path(path).read_text()))


def timeline_rows(s: Schedule) -> list[tuple[int, str, int, int]]:
    """(qubit, kind, start_ps, duration_ps) rows for external plotting."""
    rows = []
    for e in s.entries:
        for q in e.gate.qubits:
            rows.append((q, e.gate.kind.value, e.start, e.duration))
    rows.sort(key=lambda r: (r[0], r[2], r[1]))
    return rows


def write_timeline_csv(s: Schedule, path: str | Path) -> None:
    lines = ["qubit,kind,start_ps,duration_ps"]
    lines += [f"{q},{kind},{start},{dur}" for q, kind, start, dur in timeline_rows(s)]
    Path(path).write_text("\n".join(lines) + "\n")

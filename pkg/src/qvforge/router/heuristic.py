"""Greedy swap-insertion baseline for layout and routing.

A deterministic lookahead router in the style of swap-based search:
three alternating passes (forward, reverse, forward) refine the initial
layout, then the last forward pass is kept.  Movement is chosen one swap
at a time by a decay-weighted sum of edge distances over the remaining
layers.  The baseline never mirrors a gate and pays for every swap with
an explicit three-entangler block, so it bounds the exact router from
above on cost.
"""

from __future__ import annotations

import itertools
import math
import time

from ..circuits import ModelCircuit
from ..device import DeviceModel
from .bip import RoutingConfig, build_gate_costs
from .solve import GatePlacement, LayoutSolution, RoutingError, SwapPlacement

_DECAY = 0.5


def _position_edges(device: DeviceModel) -> list[tuple[int, int]]:
    ids = device.qubit_ids()
    index = {qid: p for p, qid in enumerate(ids)}
    out = set()
    for edge in device.edges:
        u, v = index[edge.control], index[edge.target]
        out.add((min(u, v), max(u, v)))
    return sorted(out)


def _all_pairs_distance(n: int, edges: list[tuple[int, int]]) -> list[list[int]]:
    adj: dict[int, list[int]] = {p: [] for p in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    dist = [[-1] * n for _ in range(n)]
    for s in range(n):
        dist[s][s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for p in frontier:
                for q in adj[p]:
                    if dist[s][q] < 0:
                        dist[s][q] = dist[s][p] + 1
                        nxt.append(q)
            frontier = nxt
    return dist


def _layer_pairs(layers) -> list[list[tuple[int, int]]]:
    return [[(gc.a, gc.b) for gc in layer] for layer in layers]


def _score(
    mapping: list[int],
    pairs: list[list[tuple[int, int]]],
    t: int,
    dist: list[list[int]],
) -> float:
    total = 0.0
    weight = 1.0
    for layer in pairs[t:]:
        total += weight * sum(dist[mapping[a]][mapping[b]] - 1 for a, b in layer)
        weight *= _DECAY
    return total


def _feasible_targets(
    m: int,
    layer: list[tuple[int, int]],
    edges: list[tuple[int, int]],
    n: int,
) -> list[tuple[int, ...]]:
    """All injections logical -> position putting each layer pair on an edge."""
    paired = [q for a, b in layer for q in (a, b)]
    idle = [q for q in range(m) if q not in paired]
    out: list[tuple[int, ...]] = []
    tau = [-1] * m

    def place(i: int, used: set[int]) -> None:
        if i == len(layer):
            free = [p for p in range(n) if p not in used]
            for combo in itertools.permutations(free, len(idle)):
                for q, p in zip(idle, combo):
                    tau[q] = p
                out.append(tuple(tau))
            return
        a, b = layer[i]
        for u, v in edges:
            if u in used or v in used:
                continue
            for pa, pb in ((u, v), (v, u)):
                tau[a], tau[b] = pa, pb
                place(i + 1, used | {u, v})
        tau[a] = tau[b] = -1

    place(0, set())
    return sorted(set(out))


def _is_path(n: int, edges: list[tuple[int, int]]) -> list[int] | None:
    """Position order along the device if it is a simple path, else None."""
    if len(edges) != n - 1:
        return None
    adj: dict[int, list[int]] = {p: [] for p in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    ends = [p for p in range(n) if len(adj[p]) == 1]
    if len(ends) != 2 or any(len(adj[p]) > 2 for p in range(n)):
        return None
    order = [min(ends)]
    prev = -1
    while len(order) < n:
        nxts = [q for q in adj[order[-1]] if q != prev]
        if len(nxts) != 1:
            return None
        prev = order[-1]
        order.append(nxts[0])
    return order


def _sort_to_target(
    mapping: list[int],
    target: tuple[int, ...],
    path_order: list[int],
) -> list[tuple[int, int]]:
    """Adjacent-swap sequence driving ``mapping`` to ``target`` on a path.

    Fixes path positions left to right; bubbling the wanted logical qubit
    leftward never disturbs already-fixed positions."""
    rank = {p: i for i, p in enumerate(path_order)}
    want: dict[int, int | None] = {p: None for p in path_order}
    for q, p in enumerate(target):
        want[p] = q
    seq: list[tuple[int, int]] = []
    inv: dict[int, int | None] = {p: None for p in path_order}
    for q, p in enumerate(mapping):
        inv[p] = q
    for i, p in enumerate(path_order):
        q = want[p]
        if q is None or mapping[q] == p:
            continue
        j = rank[mapping[q]]
        while j > i:
            hi, lo = path_order[j], path_order[j - 1]
            qa, qb = inv[hi], inv[lo]
            seq.append((min(hi, lo), max(hi, lo)))
            inv[hi], inv[lo] = qb, qa
            if qa is not None:
                mapping[qa] = lo
            if qb is not None:
                mapping[qb] = hi
            j -= 1
    return seq


def _route_pass(
    pairs: list[list[tuple[int, int]]],
    mapping: list[int],
    edges: list[tuple[int, int]],
    dist: list[list[int]],
    record: bool,
) -> tuple[list[int], list[list[tuple[int, int]]], list[tuple[int, ...]]]:
    """Make every layer adjacent in order; return final mapping and the
    per-window swap sequences plus the mapping entering each layer."""
    n = len(dist)
    m = len(mapping)
    path_order = _is_path(n, edges)
    window_swaps: list[list[tuple[int, int]]] = []
    entering: list[tuple[int, ...]] = []
    for t, layer in enumerate(pairs):
        swaps_here: list[tuple[int, int]] = []
        visited = {tuple(mapping)}

        def do_swap(u: int, v: int, inv: dict[int, int | None]) -> None:
            qa, qb = inv.get(u), inv.get(v)
            if qa is not None:
                mapping[qa] = v
            if qb is not None:
                mapping[qb] = u
            if t > 0:
                swaps_here.append((u, v))
            # swaps before the first layer only re-pick the free initial layout

        while any(dist[mapping[a]][mapping[b]] != 1 for a, b in layer):
            front = {
                mapping[q]
                for a, b in layer
                if dist[mapping[a]][mapping[b]] != 1
                for q in (a, b)
            }
            candidates = [(u, v) for u, v in edges if u in front or v in front]
            best: tuple[float, tuple[int, int]] | None = None
            inv = {p: q for q, p in enumerate(mapping)}
            for u, v in candidates:
                qa, qb = inv.get(u), inv.get(v)
                if qa is not None:
                    mapping[qa] = v
                if qb is not None:
                    mapping[qb] = u
                fresh = tuple(mapping) not in visited
                s = _score(mapping, pairs, t, dist) if fresh else None
                if qa is not None:
                    mapping[qa] = u
                if qb is not None:
                    mapping[qb] = v
                if not fresh:
                    continue
                if best is None or s < best[0] - 1e-12 or (
                    abs(s - best[0]) <= 1e-12 and (u, v) < best[1]
                ):
                    best = (s, (u, v))
            if best is None:
                # every neighbor state was already seen: finish the layer by
                # sorting straight to the closest feasible target mapping
                if path_order is None:
                    raise RoutingError(
                        "greedy baseline stalled on a non-path device"
                    )
                targets = _feasible_targets(m, layer, edges, n)
                tau = min(
                    targets,
                    key=lambda x: (sum(dist[mapping[q]][x[q]] for q in range(m)), x),
                )
                for u, v in _sort_to_target(mapping, tau, path_order):
                    if t > 0:
                        swaps_here.append((u, v))
                break
            do_swap(*best[1], inv)
            visited.add(tuple(mapping))
        entering.append(tuple(mapping))
        if t > 0:
            window_swaps.append(swaps_here)
    if not record:
        return mapping, [], []
    return mapping, window_swaps, entering


def _pack_sublayers(seq: list[tuple[int, int]]) -> list[tuple[int, int, int]]:
    """Assign sequential swaps to sub-layers, merging a swap into the
    latest sub-layer when it is disjoint from everything already there."""
    sublayers: list[set[int]] = []
    out: list[tuple[int, int, int]] = []
    for u, v in seq:
        if sublayers and not (sublayers[-1] & {u, v}):
            sublayers[-1] |= {u, v}
            out.append((len(sublayers) - 1, u, v))
        else:
            sublayers.append({u, v})
            out.append((len(sublayers) - 1, u, v))
    return out


def route_heuristic(
    circuit: ModelCircuit, device: DeviceModel, cfg: RoutingConfig
) -> LayoutSolution:
    """Route with the greedy baseline.  The sub-layer budget ``cfg.h`` is
    ignored: the baseline spends as many sub-layers as its swap sequences
    need, and reports the maximum in ``h_used``."""
    start = time.monotonic()
    gate_costs = build_gate_costs(circuit, cfg)
    pairs = _layer_pairs(gate_costs)
    edges = _position_edges(device)
    n = device.width
    if circuit.width > n:
        raise RoutingError("circuit is wider than the device")
    dist = _all_pairs_distance(n, edges)

    mapping = list(range(circuit.width))
    mapping, _, _ = _route_pass(pairs, mapping, edges, dist, record=False)
    mapping, _, _ = _route_pass(list(reversed(pairs)), mapping, edges, dist, record=False)
    mapping, window_swaps, entering = _route_pass(pairs, mapping, edges, dist, record=True)

    placements: list[GatePlacement] = []
    for t, layer in enumerate(gate_costs):
        for gc in layer:
            placements.append(
                GatePlacement(
                    layer=t,
                    slot=gc.slot,
                    a=gc.a,
                    b=gc.b,
                    pa=entering[t][gc.a],
                    pb=entering[t][gc.b],
                    mirrored=False,
                    logf=gc.direct_logf,
                )
            )

    swaps: list[SwapPlacement] = []
    h_used = 0
    used_sublayers = 0
    for w, seq in enumerate(window_swaps):
        packed = _pack_sublayers(seq)
        if packed:
            count = max(s for s, _, _ in packed) + 1
            h_used = max(h_used, count)
            used_sublayers += count
        for s, u, v in packed:
            swaps.append(SwapPlacement(window=w, sublayer=s, pu=u, pv=v))

    depth = circuit.depth + used_sublayers
    log_cost = (
        sum(g.logf for g in placements)
        + len(swaps) * 3.0 * math.log(cfg.basis_fidelity)
        + depth * math.log(cfg.k)
    )
    return LayoutSolution(
        mappings=tuple(entering),
        final_mapping=tuple(mapping),
        placements=tuple(placements),
        swaps=tuple(swaps),
        depth=depth,
        log_cost=log_cost,
        optimal=False,
        solve_seconds=time.monotonic() - start,
        method="heuristic",
        h_used=h_used,
    )

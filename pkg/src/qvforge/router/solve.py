"""Exact branch-and-bound solver for the routing program.

Nodes fix the model's variables in temporal blocks: the mapping entering
layer t determines every x up to t, the gate branch variables of earlier
layers, and the swap variables of earlier windows.  The bound adds, for
each remaining layer, the best branch coefficient of each gate under the
assignment relaxation (drop the linking constraints, take zero swaps), so
best-bound selection with per-(layer, mapping) dominance explores the
space exactly.  Escalating the sub-layer budget h is the fallback when a
window admits no legal transition at the configured h.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass

from .bip import BipModel, GateCost, _c, _u, _x, _y, _z


@dataclass(frozen=True)
class GatePlacement:
    layer: int
    slot: int
    a: int
    b: int
    pa: int
    pb: int
    mirrored: bool
    logf: float


@dataclass(frozen=True)
class SwapPlacement:
    window: int
    sublayer: int
    pu: int
    pv: int


@dataclass(frozen=True)
class LayoutSolution:
    mappings: tuple[tuple[int, ...], ...]  # logical -> position entering each layer
    final_mapping: tuple[int, ...]
    placements: tuple[GatePlacement, ...]
    swaps: tuple[SwapPlacement, ...]
    depth: int
    log_cost: float
    optimal: bool
    solve_seconds: float
    method: str
    h_used: int

    @property
    def cost(self) -> float:
        return math.exp(self.log_cost)

    @property
    def swap_count(self) -> int:
        return len(self.swaps)

    @property
    def mirror_count(self) -> int:
        return sum(1 for g in self.placements if g.mirrored)


class RoutingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Structural helpers


def _matchings(edge_list: list[tuple[int, int]]):
    """All subsets of pairwise disjoint edges, the empty set included."""
    out: list[tuple[tuple[int, int], ...]] = []

    def rec(i: int, used: set[int], acc: list[tuple[int, int]]) -> None:
        if i == len(edge_list):
            out.append(tuple(acc))
            return
        rec(i + 1, used, acc)
        u, v = edge_list[i]
        if u not in used and v not in used:
            acc.append((u, v))
            rec(i + 1, used | {u, v}, acc)
            acc.pop()

    rec(0, set(), [])
    return out


def _swap_options(model: BipModel, h: int, edge_list: list[tuple[int, int]]):
    """Net permutation catalog for one window.

    Returns a list of (perm, swaps, cost) with perm a position permutation
    tuple, swaps a tuple of (sublayer, (pu, pv)), and cost the log-domain
    contribution of the swaps plus used sub-layers.  One entry per distinct
    permutation, keeping the cheapest realization.
    """
    n = model.n
    ident = tuple(range(n))
    swap_cost = model.swap_log_cost()
    depth_cost = model.depth_log_cost()
    sub_options = []
    for match in _matchings(edge_list):
        perm = list(ident)
        for u, v in match:
            perm[u], perm[v] = perm[v], perm[u]
        cost = len(match) * swap_cost + (depth_cost if match else 0.0)
        sub_options.append((tuple(perm), match, cost))

    best: dict[tuple[int, ...], tuple[float, tuple]] = {ident: (0.0, ())}
    frontier = {ident: (0.0, ())}
    for s in range(h):
        nxt: dict[tuple[int, ...], tuple[float, tuple]] = {}
        for perm, (cost, swaps) in frontier.items():
            for sperm, match, scost in sub_options:
                if not match:
                    continue
                combined = tuple(sperm[perm[p]] for p in range(n))
                ncost = cost + scost
                nswaps = swaps + tuple((s, e) for e in match)
                cur = nxt.get(combined)
                if cur is None or ncost > cur[0] + 1e-15 or (
                    abs(ncost - cur[0]) <= 1e-15 and nswaps < cur[1]
                ):
                    nxt[combined] = (ncost, nswaps)
        for perm, entry in nxt.items():
            cur = best.get(perm)
            if cur is None or entry[0] > cur[0] + 1e-15 or (
                abs(entry[0] - cur[0]) <= 1e-15 and entry[1] < cur[1]
            ):
                best[perm] = entry
        frontier = nxt
        if not frontier:
            break
    return [(perm, swaps, cost) for perm, (cost, swaps) in sorted(best.items())]


def _feasible_mappings(model: BipModel, layer: tuple[GateCost, ...]):
    """All injections logical -> position placing each gate on an edge."""
    n, m = model.n, model.m
    adj: dict[int, list[int]] = {p: [] for p in range(n)}
    for u, v in model.edges:
        adj[u].append(v)
        adj[v].append(u)
    paired = [q for gc in layer for q in (gc.a, gc.b)]
    idle = [q for q in range(m) if q not in paired]
    results: list[tuple[int, ...]] = []
    mapping = [-1] * m

    def place(i: int, used: set[int]) -> None:
        if i == len(layer):
            free = [p for p in range(n) if p not in used]
            for combo in itertools.permutations(free, len(idle)):
                for q, p in zip(idle, combo):
                    mapping[q] = p
                results.append(tuple(mapping))
            return
        gc = layer[i]
        for u, v in model.edges:
            if u in used or v in used:
                continue
            for pa, pb in ((u, v), (v, u)):
                mapping[gc.a], mapping[gc.b] = pa, pb
                place(i + 1, used | {u, v})
        mapping[gc.a] = mapping[gc.b] = -1

    place(0, set())
    return sorted(set(results))


def _is_adjacent(model: BipModel, layer, mapping) -> bool:
    edge_set = set(model.edges)
    for gc in layer:
        pa, pb = mapping[gc.a], mapping[gc.b]
        if tuple(sorted((pa, pb))) not in edge_set:
            return False
    return True


def _window_edges(model: BipModel, mapping, layer_a, layer_b) -> list[tuple[int, int]]:
    """Candidate swap edges: within swap_distance of any active position."""
    if model.cfg.swap_distance is None:
        return list(model.edges)
    active = {mapping[q] for gc in layer_a for q in (gc.a, gc.b)}
    for gc in layer_b:
        active.add(mapping[gc.a])
        active.add(mapping[gc.b])
    # BFS distances from the active set
    adj: dict[int, list[int]] = {p: [] for p in range(model.n)}
    for u, v in model.edges:
        adj[u].append(v)
        adj[v].append(u)
    dist = {p: 0 for p in active}
    frontier = list(active)
    while frontier:
        nxt = []
        for p in frontier:
            for qq in adj[p]:
                if qq not in dist:
                    dist[qq] = dist[p] + 1
                    nxt.append(qq)
        frontier = nxt
    lim = model.cfg.swap_distance
    return [
        (u, v)
        for u, v in model.edges
        if dist.get(u, math.inf) <= lim and dist.get(v, math.inf) <= lim
    ]


def _mirror_options(model: BipModel, layer, mapping, terminal: bool):
    """(mask, position permutation, cost) choices for one layer's gates."""
    n = model.n
    k = len(layer)
    allow = model.cfg.allow_mirroring
    if terminal:
        # no downstream coupling: each gate independently takes its best branch
        mask = 0
        cost = 0.0
        perm = list(range(n))
        for i, gc in enumerate(layer):
            if allow and gc.mirror_logf > gc.direct_logf + 1e-15:
                mask |= 1 << i
                cost += gc.mirror_logf
                pa, pb = mapping[gc.a], mapping[gc.b]
                perm[pa], perm[pb] = perm[pb], perm[pa]
            else:
                cost += gc.direct_logf
        return [(mask, tuple(perm), cost)]
    masks = range(1 << k) if allow else (0,)
    out = []
    for mask in masks:
        perm = list(range(n))
        cost = 0.0
        for i, gc in enumerate(layer):
            if mask >> i & 1:
                cost += gc.mirror_logf
                pa, pb = mapping[gc.a], mapping[gc.b]
                perm[pa], perm[pb] = perm[pb], perm[pa]
            else:
                cost += gc.direct_logf
        out.append((mask, tuple(perm), cost))
    return out


# ---------------------------------------------------------------------------
# Best-bound search


@dataclass
class _Node:
    t: int  # next layer to leave
    mapping: tuple[int, ...]
    acc: float
    parent: "_Node | None"
    mirror_mask: int  # mirrors applied leaving layer t-1
    swaps: tuple  # ((sublayer, (pu, pv)), ...) in window t-1


def solve_bip(model: BipModel, cfg=None) -> LayoutSolution:
    cfg = cfg or model.cfg
    start = time.monotonic()
    d = model.d
    layers = model.gate_costs

    future = [0.0] * (d + 1)
    for t in range(d - 1, -1, -1):
        future[t] = future[t + 1] + sum(
            gc.best(cfg.allow_mirroring) for gc in layers[t]
        )

    h = cfg.h
    best_complete: tuple[float, _Node] | None = None
    optimal = True
    while True:
        counter = itertools.count()
        heap: list[tuple[float, int, _Node]] = []
        dominance: dict[tuple[int, tuple[int, ...]], float] = {}
        for mapping in _feasible_mappings(model, layers[0]):
            node = _Node(0, mapping, 0.0, None, 0, ())
            dominance[(0, mapping)] = 0.0
            heapq.heappush(heap, (-(0.0 + future[0]), next(counter), node))

        best_complete = None
        timed_out = False
        while heap:
            bound_neg, _, node = heapq.heappop(heap)
            bound = -bound_neg
            if best_complete is not None and bound <= best_complete[0] + 1e-12:
                break
            if time.monotonic() - start > cfg.time_limit:
                timed_out = True
                break
            if node.acc < dominance.get((node.t, node.mapping), -math.inf) - 1e-12:
                continue
            t = node.t
            terminal = t == d - 1
            for mask, mu, mcost in _mirror_options(
                model, layers[t], node.mapping, terminal
            ):
                if terminal:
                    value = node.acc + mcost
                    final = _Node(
                        d,
                        tuple(mu[p] for p in node.mapping),
                        value,
                        node,
                        mask,
                        (),
                    )
                    if best_complete is None or value > best_complete[0] + 1e-15:
                        best_complete = (value, final)
                    continue
                mid = tuple(mu[p] for p in node.mapping)
                edge_list = _window_edges(model, mid, layers[t], layers[t + 1])
                for perm, swaps, scost in _swap_options(model, h, edge_list):
                    nxt = tuple(perm[p] for p in mid)
                    if not _is_adjacent(model, layers[t + 1], nxt):
                        continue
                    acc = node.acc + mcost + scost
                    key = (t + 1, nxt)
                    if acc <= dominance.get(key, -math.inf) + 1e-12:
                        continue
                    dominance[key] = acc
                    child = _Node(t + 1, nxt, acc, node, mask, swaps)
                    heapq.heappush(heap, (-(acc + future[t + 1]), next(counter), child))

        if timed_out and best_complete is None:
            raise RoutingError("time limit reached before any feasible routing")
        if best_complete is not None:
            optimal = not timed_out
            break
        # no transition sequence exists at this h: widen the window budget
        h += 1
        if h > max(3, model.n):
            raise RoutingError("no feasible routing found at any sub-layer budget")

    if best_complete is None:
        raise RoutingError("routing search exhausted without a solution")

    return _reconstruct(
        model, best_complete[1], best_complete[0], optimal, time.monotonic() - start, h
    )


def _reconstruct(
    model: BipModel, leaf: _Node, value: float, optimal: bool, seconds: float, h: int
) -> LayoutSolution:
    chain: list[_Node] = []
    node: _Node | None = leaf
    while node is not None:
        chain.append(node)
        node = node.parent
    chain.reverse()  # chain[t] enters layer t; chain[d] is the closed leaf

    mappings = tuple(chain[t].mapping for t in range(model.d))
    placements: list[GatePlacement] = []
    swaps: list[SwapPlacement] = []
    for t, layer in enumerate(model.gate_costs):
        mask = chain[t + 1].mirror_mask
        mapping = mappings[t]
        for i, gc in enumerate(layer):
            mirrored = bool(mask >> i & 1)
            placements.append(
                GatePlacement(
                    layer=t,
                    slot=i,
                    a=gc.a,
                    b=gc.b,
                    pa=mapping[gc.a],
                    pb=mapping[gc.b],
                    mirrored=mirrored,
                    logf=gc.mirror_logf if mirrored else gc.direct_logf,
                )
            )
        if t + 1 < len(chain):
            for sublayer, (pu, pv) in chain[t + 1].swaps:
                swaps.append(SwapPlacement(t, sublayer, pu, pv))

    used_sublayers = len({(s.window, s.sublayer) for s in swaps})
    return LayoutSolution(
        mappings=mappings,
        final_mapping=chain[model.d].mapping,
        placements=tuple(placements),
        swaps=tuple(swaps),
        depth=model.d + used_sublayers,
        log_cost=value + model.objective_const,
        optimal=optimal,
        solve_seconds=seconds,
        method="bip",
        h_used=h,
    )


# ---------------------------------------------------------------------------
# Tie a solution back to the 0-1 program


def assignment_of(model: BipModel, sol: LayoutSolution) -> dict[int, int]:
    """Binary assignment of every model variable realizing ``sol``."""
    if sol.h_used > model.cfg.h:
        raise ValueError("solution used a larger h than the model carries")
    a = {i: 0 for i in range(model.num_vars)}
    V = model.var
    edge_of = {e: i for i, e in enumerate(model.edges)}

    def set_state(w: int, s: int, mapping) -> None:
        # s == h is x[w+1]
        for q, p in enumerate(mapping):
            if s == model.cfg.h:
                a[V(_x(w + 1, q, p))] = 1
            else:
                a[V(_c(w, s, q, p))] = 1

    for t, mapping in enumerate(sol.mappings):
        for q, p in enumerate(mapping):
            a[V(_x(t, q, p))] = 1

    for g in sol.placements:
        pu, pv = sorted((g.pa, g.pb))
        e = edge_of[(pu, pv)]
        o = 0 if (g.pa, g.pb) == (pu, pv) else 1
        a[V(_z(g.layer, g.slot, e, o, 1 if g.mirrored else 0))] = 1

    swap_by_window: dict[int, list[SwapPlacement]] = {}
    for s in sol.swaps:
        swap_by_window.setdefault(s.window, []).append(s)

    for w in range(model.d - 1):
        mapping = list(sol.mappings[w])
        for g in sol.placements:
            if g.layer == w and g.mirrored:
                mapping[g.a], mapping[g.b] = mapping[g.b], mapping[g.a]
        if model.cfg.h > 0:
            set_state(w, 0, mapping)
        for s in range(model.cfg.h):
            here = [sp for sp in swap_by_window.get(w, []) if sp.sublayer == s]
            if here:
                a[V(_u(w, s))] = 1
            for sp in here:
                a[V(_y(w, s, edge_of[tuple(sorted((sp.pu, sp.pv)))]))] = 1
                inv = {p: q for q, p in enumerate(mapping)}
                qa, qb = inv.get(sp.pu), inv.get(sp.pv)
                if qa is not None:
                    mapping[qa] = sp.pv
                if qb is not None:
                    mapping[qb] = sp.pu
            set_state(w, s + 1, mapping)
        if tuple(mapping) != sol.mappings[w + 1]:
            raise ValueError("swap bookkeeping does not reproduce the next mapping")
    return a


def check_assignment(model: BipModel, a: dict[int, int]) -> float:
    """Verify constraints; return the objective value of the assignment."""
    for con in model.constraints:
        lhs = sum(coef * a[v] for v, coef in con.terms)
        ok = (
            lhs <= con.rhs + 1e-9
            if con.sense == "<="
            else lhs >= con.rhs - 1e-9
            if con.sense == ">="
            else abs(lhs - con.rhs) <= 1e-9
        )
        if not ok:
            raise AssertionError(f"violated: {con} (lhs={lhs})")
    val = model.objective_const + sum(
        coef * a[v] for v, coef in model.objective.items()
    )
    return val

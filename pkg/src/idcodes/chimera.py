"""Chimera hardware graphs, minor embedding, and gauge transformations.

A Chimera graph is an m x n grid of K_{c,c} cells. Qubit ids follow
((row*n)+col)*2c + offset; offsets below c form the vertical shore, the rest
the horizontal shore. Vertical qubits couple to the same offset in the cells
above and below, horizontal qubits to the same offset left and right.
"""

import heapq
import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .ising import IsingModel


class ChimeraGraph:
    """Chimera topology with an optional set of faulty (absent) qubits."""

    def __init__(self, grid_m, grid_n, shore, faulty=()):
        if grid_m < 1 or grid_n < 1 or shore < 1:
            raise ValueError("grid dimensions and shore size must be >= 1")
        self.grid_m = grid_m
        self.grid_n = grid_n
        self.shore = shore
        self.qubit_count = grid_m * grid_n * 2 * shore
        faulty = frozenset(faulty)
        bad = [q for q in faulty if not 0 <= q < self.qubit_count]
        if bad:
            raise ValueError("faulty qubit ids out of range: %r" % (bad,))
        self.faulty = faulty

    def qubit_id(self, row, col, offset):
        return ((row * self.grid_n) + col) * 2 * self.shore + offset

    def position(self, q):
        """(row, col, offset) of a qubit id."""
        cell, offset = divmod(q, 2 * self.shore)
        row, col = divmod(cell, self.grid_n)
        return row, col, offset

    def is_vertical(self, q):
        return q % (2 * self.shore) < self.shore

    def exists(self, q):
        return 0 <= q < self.qubit_count and q not in self.faulty

    def working_qubits(self):
        return [q for q in range(self.qubit_count) if q not in self.faulty]

    def neighbors(self, q):
        """Working neighbors of a working qubit."""
        if not self.exists(q):
            return []
        row, col, offset = self.position(q)
        c = self.shore
        out = []
        if offset < c:  # vertical: K_{c,c} partner shore, cells above/below
            out.extend(self.qubit_id(row, col, o) for o in range(c, 2 * c))
            if row > 0:
                out.append(self.qubit_id(row - 1, col, offset))
            if row + 1 < self.grid_m:
                out.append(self.qubit_id(row + 1, col, offset))
        else:           # horizontal: partner shore, cells left/right
            out.extend(self.qubit_id(row, col, o) for o in range(c))
            if col > 0:
                out.append(self.qubit_id(row, col - 1, offset))
            if col + 1 < self.grid_n:
                out.append(self.qubit_id(row, col + 1, offset))
        return sorted(u for u in out if self.exists(u))

    def is_edge(self, u, v):
        return u != v and self.exists(u) and self.exists(v) and v in self.neighbors(u)

    def edges(self):
        for u in self.working_qubits():
            for v in self.neighbors(u):
                if u < v:
                    yield (u, v)

    def edge_count(self):
        return sum(1 for _ in self.edges())


@dataclass
class EmbedVerdict:
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def verify_embedding(hw, logical, chains):
    """Check chain nonemptiness, disjointness, connectedness, and coverage of
    every nonzero logical coupling. Returns a verdict listing violations."""
    bad = []
    owner = {}
    for v in range(logical.var_count):
        chain = chains.get(v, ())
        if not chain:
            bad.append(("empty_chain", v))
            continue
        for q in chain:
            if not hw.exists(q):
                bad.append(("missing_qubit", v, q))
            elif q in owner:
                bad.append(("overlap", q, owner[q], v))
            else:
                owner[q] = v
        if not _connected(hw, set(chain)):
            bad.append(("disconnected", v))
    for (i, j), val in sorted(logical.J.items()):
        if val == 0:
            continue
        ci, cj = set(chains.get(i, ())), set(chains.get(j, ()))
        if not _chains_coupled(hw, ci, cj):
            bad.append(("uncoupled", i, j))
    return EmbedVerdict(not bad, bad)


def _connected(hw, chain):
    if not chain:
        return False
    start = min(chain)
    seen = {start}
    queue = deque([start])
    while queue:
        q = queue.popleft()
        for u in hw.neighbors(q):
            if u in chain and u not in seen:
                seen.add(u)
                queue.append(u)
    return seen == chain


def _chains_coupled(hw, ca, cb):
    for q in ca:
        for u in hw.neighbors(q):
            if u in cb:
                return True
    return False


def _logical_adjacency(logical):
    nbrs = {v: set() for v in range(logical.var_count)}
    for (i, j), val in logical.J.items():
        if val != 0:
            nbrs[i].add(j)
            nbrs[j].add(i)
    return nbrs


def heuristic_embed(hw, logical, seed=0, tries=32):
    """Randomized two-stage minor embedding: anneal a cell-level placement
    of the variables, seed each variable with a cross-shore qubit pair in
    its home cell, then route every logical coupling with negotiated
    congestion (claiming an already-claimed qubit is priced up sweep after
    sweep until every qubit serves a single chain). Returns a chains dict,
    or None after `tries` failures (not a proof of non-embeddability)."""
    nbrs = _logical_adjacency(logical)
    for t in range(tries):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, t))))
        chains = _try_embed(hw, logical, nbrs, rng)
        if chains is not None and verify_embedding(hw, logical, chains):
            return chains
    return None


_ROUTE_ROUNDS = 200


def _try_embed(hw, logical, nbrs, rng):
    if logical.var_count == 0:
        return {}
    working = hw.working_qubits()
    if not working or logical.var_count > len(working):
        return None
    cells = _cell_map(hw)
    place = _place_cells(nbrs, cells, rng)
    chains = _cross_embed(hw, nbrs, place, rng)
    if chains is None:
        adj = {q: tuple(hw.neighbors(q)) for q in working}
        seeds = _seed_chains(hw, nbrs, cells, place, rng)
        if seeds is None:
            return None
        chains = _route_all(nbrs, seeds, place, adj, rng)
    if chains is None:
        return None
    _trim_chains(hw, nbrs, chains)
    return {v: tuple(sorted(c)) for v, c in chains.items()}


def _cross_embed(hw, nbrs, place, rng):
    """Crossing-style embedding: each variable's chain is a vertical arm in
    its home column plus a horizontal arm in its home row, meeting in the
    home cell. A coupling is realized where one side's horizontal arm and
    the other's vertical arm cross, since every cell couples its shores
    completely. Which side goes horizontal is annealed per coupling to keep
    arms short and at most `shore` deep; offsets then come from interval
    coloring, so overlapping arms in a column or row never collide. Returns
    None when the arms still run deeper than the shore or faults block
    every offset."""
    shore = hw.shore
    edges = sorted({(v, u) if v < u else (u, v) for v in nbrs for u in nbrs[v]})
    harm, varm = _anneal_arms(nbrs, place, shore, edges, rng)

    vitems = {}
    hitems = {}
    for v in sorted(nbrs):
        r, c = place[v]
        if varm[v] is None and harm[v] is None:
            varm[v] = (r, r)            # isolated: a single home qubit
        if varm[v] is not None:
            vitems.setdefault(c, []).append((varm[v][0], varm[v][1], v))
        if harm[v] is not None:
            hitems.setdefault(r, []).append((harm[v][0], harm[v][1], v))

    def v_ok(col, lo, hi, k):
        return all(hw.exists(hw.qubit_id(r, col, k)) for r in range(lo, hi + 1))

    def h_ok(row, lo, hi, k):
        return all(hw.exists(hw.qubit_id(row, c, shore + k))
                   for c in range(lo, hi + 1))

    voffs = {}
    for col, items in sorted(vitems.items()):
        got = _color_intervals(items, shore,
                               lambda lo, hi, k: v_ok(col, lo, hi, k), rng)
        if got is None:
            return None
        voffs.update(got)
    hoffs = {}
    for row, items in sorted(hitems.items()):
        got = _color_intervals(items, shore,
                               lambda lo, hi, k: h_ok(row, lo, hi, k), rng)
        if got is None:
            return None
        hoffs.update(got)

    chains = {}
    for v in sorted(nbrs):
        r, c = place[v]
        chain = set()
        if v in voffs:
            k = voffs[v]
            chain.update(hw.qubit_id(rr, c, k)
                         for rr in range(varm[v][0], varm[v][1] + 1))
        if v in hoffs:
            k = hoffs[v]
            chain.update(hw.qubit_id(r, cc, shore + k)
                         for cc in range(harm[v][0], harm[v][1] + 1))
        chains[v] = chain
    return chains


def _anneal_arms(nbrs, place, shore, edges, rng):
    """Choose which endpoint of every coupling goes horizontal. The arms a
    choice implies are scored by total length plus a steep penalty wherever
    more arms overlap a column or row slot than the shore can color; flips
    anneal toward short, shallow arms. Returns per-variable (lo, hi) arm
    extents (None for an unused side)."""
    hcols = {v: [] for v in nbrs}       # columns v's horizontal arm must hit
    vrows = {v: [] for v in nbrs}       # rows v's vertical arm must hit
    orient = {}
    for (u, w) in edges:
        orient[(u, w)] = bool(rng.integers(2))
        a, b = (u, w) if orient[(u, w)] else (w, u)
        hcols[a].append(place[b][1])    # a horizontal, b vertical
        vrows[b].append(place[a][0])

    def arms(v):
        hc, vr = hcols[v], vrows[v]
        r, c = place[v]
        if hc and vr:                   # both arms meet at the home cell
            return ((min(min(hc), c), max(max(hc), c)),
                    (min(min(vr), r), max(max(vr), r)))
        if hc:
            return ((min(hc), max(hc)), None)
        if vr:
            return (None, (min(vr), max(vr)))
        return (None, None)

    harm = {}
    varm = {}
    vdepth = {}
    hdepth = {}

    def shift(v, sign):
        # add (+1) or remove (-1) v's arms from the depth maps, returning
        # the quadratic overflow change plus arm length change
        delta = 0.0
        r, c = place[v]
        ha, va = harm[v], varm[v]
        if ha is not None:
            for cc in range(ha[0], ha[1] + 1):
                d0 = hdepth.get((r, cc), 0)
                d1 = d0 + sign
                hdepth[(r, cc)] = d1
                o0 = d0 - shore if d0 > shore else 0
                o1 = d1 - shore if d1 > shore else 0
                delta += 8.0 * (o1 * o1 - o0 * o0)
            delta += sign * (ha[1] - ha[0] + 1)
        if va is not None:
            for rr in range(va[0], va[1] + 1):
                d0 = vdepth.get((c, rr), 0)
                d1 = d0 + sign
                vdepth[(c, rr)] = d1
                o0 = d0 - shore if d0 > shore else 0
                o1 = d1 - shore if d1 > shore else 0
                delta += 8.0 * (o1 * o1 - o0 * o0)
            delta += sign * (va[1] - va[0] + 1)
        return delta

    for v in sorted(nbrs):
        harm[v], varm[v] = arms(v)
        shift(v, +1)

    def flip(e):
        u, w = e
        a, b = (u, w) if orient[e] else (w, u)
        delta = shift(u, -1) + shift(w, -1)
        hcols[a].remove(place[b][1])
        vrows[b].remove(place[a][0])
        hcols[b].append(place[a][1])
        vrows[a].append(place[b][0])
        orient[e] = not orient[e]
        harm[u], varm[u] = arms(u)
        harm[w], varm[w] = arms(w)
        return delta + shift(u, +1) + shift(w, +1)

    steps = 160 * len(edges)
    temp = 2.0
    decay = (0.02 / temp) ** (1.0 / max(steps, 1))
    for _ in range(steps):
        e = edges[int(rng.integers(len(edges)))]
        delta = flip(e)
        if delta > 0.0 and rng.random() >= math.exp(-delta / temp):
            flip(e)                     # revert
        temp *= decay
    return harm, varm


def _color_intervals(items, shore, eligible, rng):
    """Greedy interval coloring: sweep by left endpoint, release finished
    offsets, take any eligible free offset. None when a slot runs out."""
    taken = {}
    assign = {}
    for lo, hi, v in sorted(items):
        for k, end in list(taken.items()):
            if end < lo:
                del taken[k]
        options = [k for k in range(shore) if k not in taken and eligible(lo, hi, k)]
        if not options:
            return None
        k = options[int(rng.integers(len(options)))]
        taken[k] = hi
        assign[v] = k
    return assign


def _cell_map(hw):
    """(row, col) -> sorted working qubits of that cell."""
    cells = {}
    for q in hw.working_qubits():
        row, col, _ = hw.position(q)
        cells.setdefault((row, col), []).append(q)
    return cells


def _placement_order(nbrs, rng):
    """Breadth-first order from the highest-degree variable, so the initial
    cell fill lays connected variables down next to each other."""
    remaining = set(nbrs)
    order = []
    while remaining:
        start = min(remaining, key=lambda v: (-len(nbrs[v]), rng.random()))
        queue = deque([start])
        remaining.discard(start)
        while queue:
            v = queue.popleft()
            order.append(v)
            nxt = sorted((u for u in nbrs[v] if u in remaining),
                         key=lambda u: (-len(nbrs[u]), rng.random()))
            for u in nxt:
                remaining.discard(u)
                queue.append(u)
    return order


def _place_cells(nbrs, cells, rng):
    """Assign variables to cells: fill outward from the grid center in
    breadth-first variable order, then anneal single-variable moves that
    shorten coupled variables' Manhattan distances. Crowding is priced so
    variables spread out (routing needs free qubits everywhere), with a
    hard per-cell cap that relaxes only when the grid is small."""
    cell_list = sorted(cells)
    qcount = {rc: len(cells[rc]) for rc in cell_list}
    soft = {rc: max(1, qcount[rc] // 8) for rc in cell_list}
    nvars = len(nbrs)
    hard = dict.fromkeys(cell_list, 1)
    while sum(hard.values()) < nvars:
        hard = {rc: min(qcount[rc], 2 * hard[rc]) for rc in cell_list}
    r0 = sum(rc[0] for rc in cell_list) / len(cell_list)
    c0 = sum(rc[1] for rc in cell_list) / len(cell_list)
    ring = sorted(cell_list, key=lambda rc: (abs(rc[0] - r0) + abs(rc[1] - c0), rc))
    place = {}
    load = dict.fromkeys(cell_list, 0)
    slot = 0
    for v in _placement_order(nbrs, rng):
        while load[ring[slot % len(ring)]] >= hard[ring[slot % len(ring)]]:
            slot += 1
        rc = ring[slot % len(ring)]
        place[v] = rc
        load[rc] += 1
        slot += 1

    def crowd(n, rc):
        over = n - soft[rc]
        return 2.5 * over * over if over > 0 else 0.0

    vkeys = sorted(nbrs)
    steps = 2000 + 320 * nvars
    temp = 3.0
    decay = (0.05 / temp) ** (1.0 / steps)
    for _ in range(steps):
        v = vkeys[int(rng.integers(nvars))]
        old = place[v]
        new = cell_list[int(rng.integers(len(cell_list)))]
        if new == old or load[new] >= hard[new]:
            temp *= decay
            continue
        delta = (crowd(load[old] - 1, old) - crowd(load[old], old)
                 + crowd(load[new] + 1, new) - crowd(load[new], new))
        for u in nbrs[v]:
            pu = place[u]
            delta += (abs(new[0] - pu[0]) + abs(new[1] - pu[1])
                      - abs(old[0] - pu[0]) - abs(old[1] - pu[1]))
        if delta <= 0.0 or rng.random() < math.exp(-delta / temp):
            place[v] = new
            load[old] -= 1
            load[new] += 1
        temp *= decay
    return place


def _seed_chains(hw, nbrs, cells, place, rng):
    """Give every variable a foothold in its home cell: one qubit from each
    shore when possible (a cross-shore pair reaches all four neighboring
    cells and couples directly to every other pair in its own cell), else
    any free qubit, spilling to the nearest cell when the home cell is out
    of qubits."""
    free = {}
    for rc, qs in cells.items():
        free[rc] = {True: [q for q in qs if hw.is_vertical(q)],
                    False: [q for q in qs if not hw.is_vertical(q)]}
    seeds = {}
    for v in sorted(nbrs, key=lambda u: (-len(nbrs[u]), u)):
        rc = place[v]
        fv, fh = free[rc][True], free[rc][False]
        if fv and fh:
            a = fv.pop(int(rng.integers(len(fv))))
            b = fh.pop(int(rng.integers(len(fh))))
            seeds[v] = {a, b}
        elif fv or fh:
            side = fv if fv else fh
            seeds[v] = {side.pop(int(rng.integers(len(side))))}
        else:
            spilled = None
            order = sorted(cells, key=lambda x: (abs(x[0] - rc[0])
                                                 + abs(x[1] - rc[1]), x))
            for rc2 in order:
                side = free[rc2][True] if free[rc2][True] else free[rc2][False]
                if side:
                    spilled = side.pop(int(rng.integers(len(side))))
                    break
            if spilled is None:
                return None
            seeds[v] = {spilled}
    return seeds


def _route_all(nbrs, seeds, place, adj, rng):
    """Incremental negotiated-congestion routing. Chains grow from their
    seeds one coupling at a time; a routed path is split at its midpoint
    between the two endpoint chains. Qubits may be claimed by more than one
    chain at an escalating price; each round tears the offending variables
    back to their seeds and re-routes their couplings until every qubit
    serves a single chain."""
    chains = {v: set(s) for v, s in seeds.items()}
    usage = dict.fromkeys(adj, 0)
    for s in seeds.values():
        for q in s:
            usage[q] += 1
    hist = dict.fromkeys(adj, 0.0)
    base = 1.4
    weight = dict.fromkeys(adj, 1.0)
    pw = [base ** k for k in range(9)]

    def span(a, b):
        pa, pb = place[a], place[b]
        return abs(pa[0] - pb[0]) + abs(pa[1] - pb[1])

    built = set()
    for v in _placement_order(nbrs, rng):
        targets = [u for u in nbrs[v] if u in built]
        if not _reroute_var(v, targets, seeds, chains, usage, weight, pw,
                            adj, span, rng):
            return None
        built.add(v)
    _round_trim(nbrs, chains, usage, seeds, adj)
    for _ in range(_ROUTE_ROUNDS):
        shared = [q for q, n in usage.items() if n > 1]
        if not shared:
            return chains
        for q in shared:
            hist[q] += usage[q] - 1
        base = min(base * 1.12, 6.0)
        weight = {q: 1.0 + 0.35 * hist[q] for q in adj}
        pw = [base ** k for k in range(9)]
        stress = set(shared)
        bad = [v for v in sorted(chains) if chains[v] & stress]
        bad.sort(key=lambda v: (-sum(usage[q] - 1 for q in chains[v]
                                     if usage[q] > 1), v))
        for v in bad:
            if all(usage[q] <= 1 for q in chains[v]):
                continue                # freed by an earlier tear-up
            if not _reroute_var(v, sorted(nbrs[v]), seeds, chains, usage,
                                weight, pw, adj, span, rng):
                return None
        _round_trim(nbrs, chains, usage, seeds, adj)
    return None


def _round_trim(nbrs, chains, usage, seeds, adj):
    """Peel removable qubits off every chain between rounds: a non-seed
    qubit goes when it is a leaf of its chain and not the sole provider of
    any realized coupling, so stale path remnants die from their dangling
    ends. Keeps chains lean enough that real contention stays visible."""
    owners = {}
    for v in sorted(chains):
        for q in chains[v]:
            owners.setdefault(q, []).append(v)
    for v in sorted(chains):
        chain = chains[v]
        if len(chain) <= 1:
            continue
        providers = {}
        for q in chain:
            for x in adj[q]:
                for u in owners.get(x, ()):
                    if u != v and u in nbrs[v]:
                        providers.setdefault(u, set()).add(q)
        prot = {}
        for u, qs in providers.items():
            for q in qs:
                prot.setdefault(q, []).append(u)
        deg = {q: sum(1 for x in adj[q] if x in chain) for q in chain}
        leaves = [q for q in sorted(chain) if deg[q] <= 1 and q not in seeds[v]]
        while leaves:
            q = leaves.pop()
            if len(chain) <= 1 or q not in chain or deg[q] > 1:
                continue
            if any(len(providers[u]) <= 1 for u in prot.get(q, ())):
                continue
            chain.discard(q)
            usage[q] -= 1
            owners[q].remove(v)
            for u in prot.get(q, ()):
                providers[u].discard(q)
            for x in adj[q]:
                if x in chain:
                    deg[x] -= 1
                    if deg[x] <= 1 and x not in seeds[v]:
                        leaves.append(x)


def _reroute_var(v, targets, seeds, chains, usage, weight, pw, adj, span, rng):
    """Tear v's chain back to its seed and re-route its couplings, nearest
    home cells first."""
    for q in chains[v]:
        usage[q] -= 1
    chain = set(seeds[v])
    chains[v] = chain
    for q in chain:
        usage[q] += 1
    for u in sorted(targets, key=lambda u: (span(v, u), rng.random())):
        if not _route_edge(v, u, chains, usage, weight, pw, adj, rng):
            return False
    return True


def _route_edge(v, u, chains, usage, weight, pw, adj, rng):
    """Connect chains v and u by a cheapest path of qubits outside both;
    the near half of the path joins v's chain, the far half u's, and the
    coupler at the split realizes the logical edge. Cost ties break at
    random so repeated re-routes explore different corridors."""
    cv, cu = chains[v], chains[u]
    targets = set()
    for q in cu:
        for x in adj[q]:
            if x in cv:
                return True             # already coupled
            if x not in cu:
                targets.add(x)
    if not targets:
        return False
    dist = {}
    prev = {}
    heap = []
    push = heapq.heappush
    pop = heapq.heappop
    rand = rng.random
    for cq in cv:
        for q in adj[cq]:
            if q in cv or q in cu:
                continue
            c = weight[q] * pw[min(usage[q], 8)]
            if c < dist.get(q, math.inf):
                dist[q] = c
                prev[q] = None          # adjacent to v's chain
                push(heap, (c, rand(), q))
    while heap:
        d, _, q = pop(heap)
        if d > dist[q]:
            continue
        if q in targets:
            path = [q]
            while prev[q] is not None:
                q = prev[q]
                path.append(q)
            path.reverse()
            cut = (len(path) + 1) // 2
            for x in path[:cut]:
                cv.add(x)
                usage[x] += 1
            for x in path[cut:]:
                cu.add(x)
                usage[x] += 1
            return True
        for x in adj[q]:
            if x in cv or x in cu:
                continue
            nd = d + weight[x] * pw[min(usage[x], 8)]
            if nd < dist.get(x, math.inf):
                dist[x] = nd
                prev[x] = q
                push(heap, (nd, rand(), x))
    return False


def _trim_chains(hw, nbrs, chains):
    """Drop chain qubits not needed for connectivity or coupling coverage."""
    changed = True
    while changed:
        changed = False
        for v in sorted(chains):
            chain = chains[v]
            if len(chain) == 1:
                continue
            for q in sorted(chain):
                trial = chain - {q}
                if not _connected(hw, trial):
                    continue
                ok = True
                for u in nbrs[v]:
                    if u in chains and not _chains_coupled(hw, trial, chains[u]):
                        ok = False
                        break
                if ok:
                    chain.discard(q)
                    changed = True
    return chains


def embed_model(hw, logical, chains, j_fm=None):
    """Physical Ising model for an embedding: h split equally over the chain,
    J split equally over the available inter-chain edges, spanning-tree
    intra-chain edges coupled at -j_fm."""
    verdict = verify_embedding(hw, logical, chains)
    if not verdict:
        raise ValueError("invalid embedding: %r" % (verdict.violations[:5],))
    if j_fm is None:
        j_fm = 2.0 * logical.max_abs_coefficient()
    if j_fm <= 0:
        raise ValueError("j_fm must be positive")
    n = hw.qubit_count
    h = [0.0] * n
    J = {}
    for v in range(logical.var_count):
        hv = logical.h[v]
        if hv:
            share = hv / len(chains[v])
            for q in chains[v]:
                h[q] += share
    for (i, j), val in sorted(logical.J.items()):
        if val == 0:
            continue
        between = [(a, b) for a in chains[i] for b in chains[j]
                   if hw.is_edge(a, b)]
        share = val / len(between)
        for a, b in between:
            key = (a, b) if a < b else (b, a)
            J[key] = J.get(key, 0.0) + share
    for v in range(logical.var_count):
        for a, b in _spanning_tree(hw, set(chains[v])):
            key = (a, b) if a < b else (b, a)
            J[key] = J.get(key, 0.0) - j_fm
    return IsingModel(n, h, J, tuple("problem" for _ in range(n)), {}, 0.0,
                      logical.assumptions)


def _spanning_tree(hw, chain):
    start = min(chain)
    seen = {start}
    queue = deque([start])
    edges = []
    while queue:
        q = queue.popleft()
        for u in hw.neighbors(q):
            if u in chain and u not in seen:
                seen.add(u)
                edges.append((q, u))
                queue.append(u)
    return edges


def unembed(state, chains, physical=None):
    """Physical spins to logical spins, one value per chain: unanimous or
    majority vote; ties fall back to the spin favored by the chain's summed
    field (then -1)."""
    n = max(chains) + 1 if chains else 0
    out = []
    for v in range(n):
        chain = chains[v]
        total = sum(state[q] for q in chain)
        if total > 0:
            out.append(1)
        elif total < 0:
            out.append(-1)
        else:
            fsum = sum(physical.h[q] for q in chain) if physical is not None else 0.0
            out.append(1 if fsum < 0 else -1)
    return tuple(out)


def gauge_transform(m, signs):
    """h'_i = G_i h_i and J'_ij = G_i G_j J_ij; an involution per gauge.

    Energies satisfy energy(m, s) == energy(gauge_transform(m, g), g*s), so
    the spectrum is preserved as a multiset.
    """
    if len(signs) != m.var_count:
        raise ValueError("gauge has %d signs, model has %d spins"
                         % (len(signs), m.var_count))
    if any(g not in (-1, 1) for g in signs):
        raise ValueError("gauge entries must be -1 or +1")
    h = [signs[i] * m.h[i] for i in range(m.var_count)]
    J = {(i, j): signs[i] * signs[j] * v for (i, j), v in m.J.items()}
    return IsingModel(m.var_count, h, J, m.roles, dict(m.problem_vertex),
                      m.penalty_lambda, m.assumptions)


def checkerboard_gauge(hw):
    """Alternating gauge: flip the horizontal shore in cells with even
    row+col, the vertical shore in odd cells."""
    signs = []
    for q in range(hw.qubit_count):
        row, col, offset = hw.position(q)
        horizontal = offset >= hw.shore
        flip = horizontal == ((row + col) % 2 == 0)
        signs.append(-1 if flip else 1)
    return signs


def write_embedding(chains, path):
    doc = {"chains": {str(v): sorted(int(q) for q in chains[v])
                      for v in sorted(chains)}}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_embedding(path):
    with open(path) as fh:
        doc = json.load(fh)
    return {int(v): tuple(qs) for v, qs in doc["chains"].items()}

"""Exact minimum hitting set over monotone CNF by branch and bound.

A minimum-cardinality satisfying assignment of a monotone CNF is a minimum
hitting set of its clause family. The solver branches on the variables of a
smallest unsatisfied clause under a partition discipline (the i-th branch
picks variable v_i and forbids v_1..v_{i-1}), which enumerates every optimum
exactly once; pruning uses a greedy disjoint-clause packing lower bound.
"""

import time
from dataclasses import dataclass
from multiprocessing import Pool

from .cnf import build_formula, simplify, choose_pivots, case_split
from .graph import list_to_bits, bits_to_list
from .idcode import INFEASIBLE

_INF = float("inf")


@dataclass
class BnbConfig:
    upper_bound_seed: object = None
    enumerate_all: bool = False
    node_limit: object = None
    workers: int = 1
    iterative_deepening: bool = False
    deadline: object = None             # absolute time.monotonic() cutoff


@dataclass
class BnbResult:
    min_size: object                    # int, or INFEASIBLE
    codes: list
    proven_minimum: bool
    nodes_explored: int
    elapsed: float

    @property
    def infeasible(self):
        return self.min_size == INFEASIBLE


class _Stop(Exception):
    pass


def _mask_clauses(f):
    """Clause bitmasks, deduplicated and subsumption-reduced, shortest first."""
    masks = sorted({list_to_bits(cl) for cl in f.clauses},
                   key=lambda m: (m.bit_count(), bits_to_list(m)))
    kept = []
    for m in masks:
        if any(k & m == k for k in kept):
            continue
        kept.append(m)
    return kept


def _greedy_hitting_set(masks):
    """Any hitting set, built by repeatedly taking a most-frequent variable."""
    chosen = 0
    left = list(masks)
    while left:
        freq = {}
        for m in left:
            for v in bits_to_list(m):
                freq[v] = freq.get(v, 0) + 1
        v = min(freq, key=lambda u: (-freq[u], u))
        chosen |= 1 << v
        left = [m for m in left if not m & chosen]
    return chosen


def _packing(masks, skip_mask, stop_at=None):
    """Greedy pairwise-disjoint clause packing, a lower bound on the number
    of variables still needed. skip_mask bits are unusable (forbidden)."""
    used = 0
    count = 0
    for m in masks:
        eff = m & ~skip_mask
        if eff and not eff & used:
            used |= eff
            count += 1
            if stop_at is not None and count >= stop_at:
                break
    return count


def packing_lower_bound(f, partial=0):
    """Lower bound on variables needed beyond `partial` to satisfy f."""
    if not isinstance(partial, int):
        partial = list_to_bits(partial)
    sat = partial | list_to_bits(f.assumptions)
    unsat = [m for m in _mask_clauses(f) if not m & sat]
    return _packing(unsat, 0)


class _Search:
    def __init__(self, masks, enumerate_all, node_limit, deadline):
        self.masks = masks
        self.enumerate_all = enumerate_all
        self.node_limit = node_limit
        self.deadline = deadline
        self.best = _INF
        self.codes = []
        self.have_code = False
        self.nodes = 0
        self.stopped = False

    def seed(self, size, code=None):
        if size < self.best or (size == self.best and code and not self.have_code):
            self.best = size
            self.codes = [code] if code is not None else []
            self.have_code = code is not None

    def _record(self, chosen, count):
        if count < self.best:
            self.best = count
            self.codes = [chosen]
            self.have_code = True
        elif count == self.best:
            if self.enumerate_all:
                self.codes.append(chosen)
            elif not self.have_code:
                self.codes = [chosen]
                self.have_code = True

    def _tick(self):
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            self.stopped = True
            raise _Stop
        if self.deadline is not None and self.nodes % 1024 == 0 \
                and time.monotonic() > self.deadline:
            self.stopped = True
            raise _Stop

    def run(self, chosen=0, forbidden=0):
        unsat = [m for m in self.masks if not m & chosen]
        try:
            self._node(chosen, chosen.bit_count(), forbidden, unsat)
        except _Stop:
            pass

    def _node(self, chosen, count, forbidden, unsat):
        self._tick()
        # unit propagation: an unsatisfied clause with one usable variable
        # forces it
        while True:
            forced = 0
            for m in unsat:
                eff = m & ~forbidden
                if eff == 0:
                    return                      # clause impossible to hit
                if eff.bit_count() == 1:
                    forced |= eff
            if not forced:
                break
            chosen |= forced
            count += forced.bit_count()
            unsat = [m for m in unsat if not m & chosen]
            if count + (1 if unsat else 0) > self._allowance():
                return
        if not unsat:
            self._record(chosen, count)
            return
        allowance = self._allowance()
        if count + _packing(unsat, forbidden, stop_at=allowance - count + 1) > allowance:
            return
        # branch on a smallest usable clause, lexicographic contents breaking
        # ties; variables ordered by descending frequency over unsatisfied
        # clauses, then index
        best_cl = None
        best_key = None
        freq = {}
        for m in unsat:
            eff = m & ~forbidden
            vs = bits_to_list(eff)
            for v in vs:
                freq[v] = freq.get(v, 0) + 1
            key = (len(vs), vs)
            if best_key is None or key < best_key:
                best_key = key
                best_cl = vs
        order = sorted(best_cl, key=lambda v: (-freq[v], v))
        taken = 0
        for v in order:
            self._node(chosen | (1 << v), count + 1, forbidden | taken,
                       [m for m in unsat if not m & (1 << v)])
            taken |= 1 << v

    def _allowance(self):
        """Largest solution size still worth exploring."""
        if self.best is _INF:
            return _INF
        if self.enumerate_all or not self.have_code:
            return self.best
        return self.best - 1


def _expand_frontier(masks, target):
    """Split the root into independent (chosen, forbidden) subproblems by
    breadth-first branching, preserving the partition discipline."""
    frontier = [(0, 0)]
    while len(frontier) < target:
        grown = []
        expanded = False
        for chosen, forbidden in frontier:
            unsat = [m for m in masks if not m & chosen]
            eff_sets = []
            dead = False
            for m in unsat:
                eff = m & ~forbidden
                if eff == 0:
                    dead = True
                    break
                eff_sets.append(bits_to_list(eff))
            if dead:
                continue
            if not unsat or len(frontier) + len(grown) > 4 * target:
                grown.append((chosen, forbidden))
                expanded = expanded or False
                continue
            vs = min(eff_sets, key=lambda s: (len(s), s))
            taken = 0
            for v in vs:
                grown.append((chosen | (1 << v), forbidden | taken))
                taken |= 1 << v
            expanded = True
        frontier = grown
        if not expanded:
            break
    return frontier


def _solve_subproblem(args):
    masks, chosen, forbidden, enumerate_all, best_seed, node_limit, deadline = args
    s = _Search(masks, enumerate_all, node_limit, deadline)
    s.seed(best_seed)
    s.run(chosen, forbidden)
    return s.best, s.codes, s.have_code, s.nodes, s.stopped


def min_hitting_set(f, cfg=None):
    """Minimum-cardinality satisfying assignment of a monotone CNF.

    The reported size includes the formula's assumptions, and every returned
    code carries the assumption variables. With enumerate_all, all optima are
    returned (each exactly once).
    """
    cfg = cfg or BnbConfig()
    t0 = time.monotonic()
    if any(len(cl) == 0 for cl in f.clauses):
        return BnbResult(INFEASIBLE, [], True, 0, time.monotonic() - t0)
    masks = _mask_clauses(f)
    base = list_to_bits(f.assumptions)
    base_count = len(f.assumptions)
    if not masks:
        return BnbResult(base_count, [base], True, 0, time.monotonic() - t0)

    greedy = _greedy_hitting_set(masks)
    gsize = greedy.bit_count()

    if cfg.iterative_deepening:
        return _solve_iterative(masks, base, base_count, gsize, cfg, t0)

    if cfg.workers > 1:
        return _solve_parallel(masks, base, base_count, greedy, gsize, cfg, t0)

    s = _Search(masks, cfg.enumerate_all, cfg.node_limit, cfg.deadline)
    if cfg.enumerate_all:
        s.seed(gsize)
    else:
        s.seed(gsize, greedy)
    if cfg.upper_bound_seed is not None:
        s.seed(cfg.upper_bound_seed - base_count)
    s.run()
    if not s.codes:
        # an under-shooting upper_bound_seed pruned everything; the greedy
        # set is still a valid answer, just not a proven optimum
        return _result(gsize, [greedy], False, s.nodes, base, base_count, t0)
    return _result(s.best, s.codes, not s.stopped, s.nodes, base, base_count, t0)


def _result(best, codes, proven, nodes, base, base_count, t0):
    if best is _INF:
        return BnbResult(None, [], False, nodes, time.monotonic() - t0)
    out = sorted({c | base for c in codes})
    return BnbResult(int(best) + base_count, out, proven, nodes,
                     time.monotonic() - t0)


def _solve_iterative(masks, base, base_count, gsize, cfg, t0):
    """Feasibility checks at increasing target sizes, mirroring a solver loop
    that re-poses the instance with the code size increased by one."""
    nodes = 0
    lb = _packing(masks, 0)
    for k in range(lb, gsize + 1):
        s = _Search(masks, False, cfg.node_limit, cfg.deadline)
        s.best = k       # without a code the allowance is k: find size <= k
        s.have_code = False
        s.run()
        nodes += s.nodes
        if s.stopped:
            return BnbResult(None, [], False, nodes, time.monotonic() - t0)
        if s.codes:
            if cfg.enumerate_all:
                e = _Search(masks, True, cfg.node_limit, cfg.deadline)
                e.seed(s.best)
                e.run()
                nodes += e.nodes
                if not e.stopped:
                    return _result(e.best, e.codes, True, nodes, base,
                                   base_count, t0)
            return _result(s.best, s.codes, True, nodes, base, base_count, t0)
    return BnbResult(None, [], False, nodes, time.monotonic() - t0)


def _solve_parallel(masks, base, base_count, greedy, gsize, cfg, t0):
    frontier = _expand_frontier(masks, 4 * cfg.workers)
    if not frontier:
        return BnbResult(None, [], False, 0, time.monotonic() - t0)
    per_limit = None
    if cfg.node_limit is not None:
        per_limit = max(1, cfg.node_limit // len(frontier))
    seed = gsize
    if cfg.upper_bound_seed is not None:
        seed = min(seed, cfg.upper_bound_seed - base_count)
    tasks = [(masks, ch, fb, cfg.enumerate_all, seed, per_limit, cfg.deadline)
             for ch, fb in frontier]
    with Pool(cfg.workers) as pool:
        parts = pool.map(_solve_subproblem, tasks)
    best = _INF
    codes = []
    nodes = 0
    stopped = False
    for pbest, pcodes, phave, pnodes, pstopped in parts:
        nodes += pnodes
        stopped = stopped or pstopped
        if not pcodes:
            continue                    # that subtree held nothing in bound
        if pbest < best:
            best, codes = pbest, list(pcodes)
        elif pbest == best:
            if cfg.enumerate_all:
                codes.extend(pcodes)
    if not codes:
        # everything was pruned by the seed; fall back to the greedy set
        return _result(gsize, [greedy], False, nodes, base, base_count, t0)
    if not cfg.enumerate_all:
        codes = codes[:1]
    return _result(best, codes, not stopped, nodes, base, base_count, t0)


def solve_with_case_split(g, cfg=None, max_pivots=2, pivots=None):
    """Build the identifying-code CNF for g, split on up to two pivot
    2-clauses, solve every case, and merge the results."""
    cfg = cfg or BnbConfig()
    elapsed0 = time.monotonic()
    f = simplify(build_formula(g))
    if pivots is None:
        pivots = choose_pivots(f, max_pivots)
    split = case_split(f, pivots)
    nodes = 0
    results = []
    for _, case in split.cases:
        r = min_hitting_set(case, cfg)
        nodes += r.nodes_explored
        results.append(r)
    sizes = [r.min_size for r in results if r.min_size is not None]
    if not sizes:
        return BnbResult(None, [], False, nodes, time.monotonic() - elapsed0)
    best = min(sizes)
    codes = sorted({c for r in results if r.min_size == best for c in r.codes})
    proven = all(r.proven_minimum for r in results)
    return BnbResult(best, codes, proven, nodes, time.monotonic() - elapsed0)

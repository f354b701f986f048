"""Identifying-code verification and the brute-force minimum search.

The search walks subset sizes from small to large. For each size k the rank
space [0, C(n,k)) is cut into contiguous chunks; workers unrank their chunk
(revolving-door or lexicographic order), test every subset, and report hits.
Results are independent of the worker count.
"""

import math
import os
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import NamedTuple, Optional

import numpy as np

from .graph import GraphError, bits_to_list

DEFAULT_CHUNK = 1 << 20
_TILE = 1 << 15  # subsets tested per numpy batch inside a chunk

INFEASIBLE = "infeasible"


class Verdict(NamedTuple):
    ok: bool
    reason: Optional[str]   # None | "domination" | "separation"
    vertices: tuple         # () | (v,) | (u, v)

    def __bool__(self):
        return self.ok


OK = Verdict(True, None, ())


def is_identifying(g, members):
    """Check the two identifying-code conditions for the vertex set `members`.

    members is a bitmask over g's vertices. Returns a Verdict; on failure it
    carries the undominated vertex or the unseparated pair.
    """
    if members >> g.vertex_count:
        raise GraphError("candidate has bits outside the vertex range")
    seen = {}
    for v in range(g.vertex_count):
        t = members & g.ball(v)
        if t == 0:
            return Verdict(False, "domination", (v,))
        if t in seen:
            return Verdict(False, "separation", (seen[t], v))
        seen[t] = v
    return OK


def detect_twins(g):
    """Return a pair (u, v) with ball(u) == ball(v), or None.

    A graph admits an identifying code iff this returns None.
    """
    seen = {}
    for v in range(g.vertex_count):
        b = g.ball(v)
        if b in seen:
            return (seen[b], v)
        seen[b] = v
    return None


# ---------------------------------------------------------------------------
# unranking


def rev_door_unrank(r, k, n):
    """k-subset of {1..n} at rank r in revolving-door order."""
    _check_rank(r, k, n)
    t = [0] * (k + 1)
    x = n
    for i in range(k, 0, -1):
        while math.comb(x, i) > r:
            x -= 1
        t[i] = x + 1
        r = math.comb(x + 1, i) - r - 1
    return tuple(t[1:])


def lex_unrank(r, k, n):
    """k-subset of {1..n} at rank r in lexicographic order."""
    _check_rank(r, k, n)
    out = []
    x = 1
    for i in range(1, k + 1):
        while r >= math.comb(n - x, k - i):
            r -= math.comb(n - x, k - i)
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def _check_rank(r, k, n):
    if not 0 < k <= n:
        raise ValueError("need 0 < k <= n, got k=%d n=%d" % (k, n))
    if not 0 <= r < math.comb(n, k):
        raise ValueError("rank %d out of range [0, C(%d,%d))" % (r, n, k))


def _comb_table(n, k):
    """C(x, i) for x in 0..n+1, i in 0..k, as int64. Caller gates the magnitude."""
    tbl = np.zeros((n + 2, k + 1), dtype=np.int64)
    tbl[:, 0] = 1
    for x in range(1, n + 2):
        hi = min(x, k)
        tbl[x, 1:hi + 1] = tbl[x - 1, :hi] + tbl[x - 1, 1:hi + 1]
    return tbl


def _unrank_batch_lex(ranks, k, n, tbl):
    """Vectorized lex_unrank: ranks (m,) int64 -> (m, k) of 1-based elements."""
    m = ranks.shape[0]
    out = np.empty((m, k), dtype=np.int64)
    r = ranks.copy()
    start = np.ones(m, dtype=np.int64)  # next candidate element x
    for i in range(1, k + 1):
        t = k - i
        # cum(x) = sum_{x'=start..x} C(n-x', t) = C(n-start+1, t+1) - C(n-x, t+1)
        # pick smallest x >= start with cum(x) > r, i.e. C(n-x, t+1) < head - r
        head = tbl[n - start + 1, t + 1]
        thresh = head - r
        # A[x] = C(n-x, t+1) decreases as x grows; scan via searchsorted on
        # the increasing sequence A[n], A[n-1], .. == tbl[0..n, t+1] reversed idx
        col = tbl[: n + 1, t + 1]          # col[j] = C(j, t+1), increasing in j
        # want smallest x with col[n-x] < thresh  <=>  largest j=n-x with col[j] < thresh
        j = np.searchsorted(col, thresh, side="left") - 1
        x = n - j
        r -= head - tbl[n - x + 1, t + 1]  # subtract cum(x-1)
        out[:, i - 1] = x
        start = x + 1
    return out


def _unrank_batch_revdoor(ranks, k, n, tbl):
    """Vectorized rev_door_unrank: ranks (m,) int64 -> (m, k) of 1-based elements."""
    m = ranks.shape[0]
    out = np.empty((m, k), dtype=np.int64)
    r = ranks.copy()
    for i in range(k, 0, -1):
        col = tbl[: n + 1, i]  # C(x, i), nondecreasing in x
        x = np.searchsorted(col, r, side="right") - 1
        out[:, i - 1] = x + 1
        r = tbl[x + 1, i] - r - 1
    return out


_UNRANK_BATCH = {"lex": _unrank_batch_lex, "revdoor": _unrank_batch_revdoor}
UNRANK_SCALAR = {"lex": lex_unrank, "revdoor": rev_door_unrank}


# ---------------------------------------------------------------------------
# brute-force search

@dataclass
class SearchResult:
    min_size: object                 # int, or INFEASIBLE
    codes: list = field(default_factory=list)   # bitmasks
    proven_minimum: bool = False
    elapsed: float = 0.0
    subsets_checked: int = 0

    @property
    def infeasible(self):
        return self.min_size == INFEASIBLE


_WORKER_STATE = {}


def _chunk_init(balls, nv, order, tbl):
    _WORKER_STATE["balls"] = balls
    _WORKER_STATE["nv"] = nv
    _WORKER_STATE["order"] = order
    _WORKER_STATE["tbl"] = tbl


def _test_chunk(args):
    """Test ranks [start, stop) at size k; return bitmasks of hits in rank order."""
    k, start, stop = args
    balls = _WORKER_STATE["balls"]
    nv = _WORKER_STATE["nv"]
    unrank = _UNRANK_BATCH[_WORKER_STATE["order"]]
    tbl = _WORKER_STATE["tbl"]
    hits = []
    for lo in range(start, stop, _TILE):
        hi = min(lo + _TILE, stop)
        ranks = np.arange(lo, hi, dtype=np.int64)
        elems = unrank(ranks, k, nv, tbl) - 1          # 0-based vertices
        sub = np.zeros(hi - lo, dtype=np.uint64)
        for c in range(k):
            sub |= np.uint64(1) << elems[:, c].astype(np.uint64)
        t = sub[:, None] & balls[None, :]
        t.sort(axis=1)
        ok = (t[:, 0] != 0) & (t[:, 1:] != t[:, :-1]).all(axis=1)
        for i in np.flatnonzero(ok):
            hits.append(int(sub[i]))
    return hits


def default_workers():
    env = os.environ.get("IDCODE_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def min_code_bruteforce(g, workers=None, size_floor=1, size_ceiling=None,
                        find_all=False, unrank_order="lex",
                        chunk_size=DEFAULT_CHUNK, deadline=None):
    """Minimum identifying code by exhaustive subset search, smallest size first.

    Within each size the rank space is chunked and tested in order, so the
    outcome does not depend on the worker count. With find_all, every code of
    the minimum size is collected; otherwise the search stops at the first
    chunk containing a hit (the lowest-rank code of that chunk is reported).
    deadline is an absolute time.monotonic() value; passing it makes the
    search stop between chunks and report proven_minimum=False.
    """
    t0 = time.monotonic()
    if unrank_order not in _UNRANK_BATCH:
        raise ValueError("unrank_order must be 'lex' or 'revdoor'")
    twins = detect_twins(g)
    if twins is not None:
        return SearchResult(INFEASIBLE, [], True, time.monotonic() - t0, 0)
    nv = g.vertex_count
    if nv > 64:
        raise GraphError("brute force is limited to 64 vertices, got %d" % nv)
    if workers is None:
        workers = default_workers()
    if size_ceiling is None:
        size_ceiling = nv
    balls = np.array([g.ball(v) for v in range(nv)], dtype=np.uint64)
    tbl = _comb_table(nv, min(size_ceiling, nv))
    checked = 0
    out_of_time = False

    pool = None
    if workers > 1:
        pool = Pool(workers, initializer=_chunk_init,
                    initargs=(balls, nv, unrank_order, tbl))
    else:
        _chunk_init(balls, nv, unrank_order, tbl)
    try:
        for k in range(max(1, size_floor), min(size_ceiling, nv) + 1):
            total = math.comb(nv, k)
            if total >= 1 << 63:
                raise GraphError("rank space C(%d,%d) exceeds capacity" % (nv, k))
            n_chunks = (total + chunk_size - 1) // chunk_size
            if n_chunks > 1 << 18:
                raise GraphError("rank space C(%d,%d) needs %d chunks, beyond any "
                                 "practical budget" % (nv, k, n_chunks))
            tasks = [(k, lo, min(lo + chunk_size, total))
                     for lo in range(0, total, chunk_size)]
            found = []
            if pool is not None:
                results = pool.imap(_test_chunk, tasks)
            else:
                results = map(_test_chunk, tasks)
            for ((_, lo, hi), hits) in zip(tasks, results):
                checked += hi - lo
                if hits:
                    found.extend(hits)
                    if not find_all:
                        break
                if deadline is not None and time.monotonic() > deadline:
                    out_of_time = True
                    break
            if found:
                if not find_all:
                    found = found[:1]
                # a deadline hit mid-collection leaves the find_all list partial
                complete = not (out_of_time and find_all)
                return SearchResult(k, found, complete,
                                    time.monotonic() - t0, checked)
            if out_of_time:
                return SearchResult(None, [], False, time.monotonic() - t0, checked)
    finally:
        if pool is not None:
            pool.terminate()
            pool.join()
    if size_ceiling < nv:
        return SearchResult(None, [], False, time.monotonic() - t0, checked)
    return SearchResult(INFEASIBLE, [], True, time.monotonic() - t0, checked)


def code_vertices(code):
    """Bitmask code to a sorted vertex list."""
    return bits_to_list(code)

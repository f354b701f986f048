"""SAT-to-Ising compilation with k-OR gadgets, plus classical solvers.

A clause OR(S_1..S_k) becomes a balanced tree of 2-input OR gadgets: the
gadget OR(a,b -> z) adds h(a)+=1, h(b)+=1, h(z)-=2 and couplings J(a,b)=+1,
J(a,z)=J(b,z)=-2, whose unique minimum (value -3) forces z = a OR b; the
tree root pair gets the plain 2-OR term uv - u - v. OR subtrees are shared
across clauses (one ancilla per distinct subterm). A penalty lambda on every
problem spin makes smaller codes energetically preferred among satisfying
states.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import list_to_bits

DEFAULT_SWEEPS = 1000
DEFAULT_BETA = (0.1, 5.0)
GROUND_TOL = 1e-9


def _split(n):
    """Size of the left half of a balanced power-of-two reduction of n items."""
    return 1 << ((n - 1).bit_length() - 1)


@dataclass(frozen=True)
class GadgetSpec:
    """Coefficients of one k-OR clause gadget over slots 0..k-1 (problem)
    and k..k+ancillas-1 (ancillas z1, z2, .. in build order)."""

    arity: int
    ancilla_count: int
    h: tuple
    J: dict
    ground_energy: float
    violation_gap: float


def _or_node(h, J, a, b, z):
    h[a] += 1.0
    h[b] += 1.0
    h[z] += -2.0
    _jadd(J, a, b, 1.0)
    _jadd(J, a, z, -2.0)
    _jadd(J, b, z, -2.0)


def _top_pair(h, J, u, v):
    h[u] += -1.0
    h[v] += -1.0
    _jadd(J, u, v, 1.0)


def _jadd(J, i, j, val):
    key = (i, j) if i < j else (j, i)
    J[key] = J.get(key, 0.0) + val


_GADGET_CACHE = {}


def gadget(k):
    """The k-OR gadget, arity 2..6: minimum energy iff some problem spin
    is +1, for the right ancilla setting; strictly positive violation gap."""
    if not 2 <= k <= 6:
        raise ValueError("gadget arity must be in 2..6, got %d" % k)
    if k in _GADGET_CACHE:
        return _GADGET_CACHE[k]
    n_anc = max(k - 2, 0)
    n = k + n_anc
    h = [0.0] * n
    J = {}
    counter = [k]

    def reduce(slots):
        if len(slots) == 1:
            return slots[0]
        a = reduce(slots[: _split(len(slots))])
        b = reduce(slots[_split(len(slots)):])
        z = counter[0]
        counter[0] += 1
        _or_node(h, J, a, b, z)
        return z

    half = _split(k)
    left = reduce(list(range(half)))
    right = reduce(list(range(half, k)))
    _top_pair(h, J, left, right)

    ground, gap = _gadget_gap(k, n, h, J)
    spec = GadgetSpec(k, n_anc, tuple(h), J, ground, gap)
    _GADGET_CACHE[k] = spec
    return spec


def _gadget_gap(k, n, h, J):
    sat_min = None
    unsat_min = None
    for bits in range(1 << n):
        s = [1 if bits >> i & 1 else -1 for i in range(n)]
        e = sum(h[i] * s[i] for i in range(n))
        e += sum(v * s[i] * s[j] for (i, j), v in J.items())
        if any(s[i] > 0 for i in range(k)):
            sat_min = e if sat_min is None else min(sat_min, e)
        else:
            unsat_min = e if unsat_min is None else min(unsat_min, e)
    return sat_min, unsat_min - sat_min


@dataclass
class IsingModel:
    """Ising energy sum(h_i S_i) + sum(J_ij S_i S_j) over spins in {-1,+1}."""

    var_count: int
    h: list
    J: dict                                  # (i, j) with i < j -> coefficient
    roles: tuple = ()                        # "problem" | "ancilla" per spin
    problem_vertex: dict = field(default_factory=dict)  # spin -> CNF variable
    penalty_lambda: float = 0.0
    assumptions: frozenset = frozenset()

    def couplings(self):
        """J items in a fixed (sorted-key) order."""
        return sorted(self.J.items())

    def max_abs_coefficient(self):
        vals = [abs(v) for v in self.h] + [abs(v) for v in self.J.values()]
        return max(vals) if vals else 0.0


def energy(m, s):
    """Energy of one spin state, pairs counted once, fixed term order."""
    if len(s) != m.var_count:
        raise ValueError("state has %d spins, model has %d" % (len(s), m.var_count))
    e = 0.0
    for i in range(m.var_count):
        e += m.h[i] * s[i]
    for (i, j), v in m.couplings():
        e += v * s[i] * s[j]
    return e


def compile_cnf(f, lambda_mode="auto"):
    """Compile a monotone CNF into an Ising model.

    One problem spin per variable occurring in the clauses; every clause of
    arity 2..6 becomes a balanced OR tree with ancillas shared across clauses
    by subterm; the root pair of each clause gets the 2-OR term. lambda_mode:
    "auto" (largest value that provably keeps minimum-cardinality satisfying
    assignments as the exact ground states), or a number (0 disables the
    penalty).
    """
    if not f.clauses:
        raise ValueError("empty formula: nothing to compile")
    for cl in f.clauses:
        if len(cl) < 2:
            raise ValueError("unit clause %r: assign it before compiling" % (cl,))
        if len(cl) > 6:
            raise ValueError("clause arity %d exceeds the 6-OR gadget" % len(cl))
    pvars = f.variables()
    spin_of = {v: i for i, v in enumerate(pvars)}
    h = [0.0] * len(pvars)
    J = {}
    roles = ["problem"] * len(pvars)
    cache = {}

    def reduce(vs):
        if len(vs) == 1:
            key = ("v", vs[0])
            return key, spin_of[vs[0]]
        ka, sa = reduce(vs[: _split(len(vs))])
        kb, sb = reduce(vs[_split(len(vs)):])
        key = frozenset((ka, kb))
        hit = cache.get(key)
        if hit is not None:
            return key, hit
        z = len(h)
        h.append(0.0)
        roles.append("ancilla")
        cache[key] = z
        _or_node(h, J, sa, sb, z)
        return key, z

    for cl in f.clauses:
        half = _split(len(cl))
        _, left = reduce(cl[:half])
        _, right = reduce(cl[half:])
        _top_pair(h, J, left, right)

    if lambda_mode == "auto":
        gap = min(gadget(len(cl)).violation_gap for cl in f.clauses)
        lam = gap / (2.0 * (len(pvars) + 1))
    else:
        lam = float(lambda_mode)
    for i in range(len(pvars)):
        h[i] += lam

    return IsingModel(len(h), h, J, tuple(roles),
                      {i: v for v, i in spin_of.items()}, lam, f.assumptions)


def decode(m, s):
    """Spin state to (variable assignment, code bitmask with assumptions)."""
    if len(s) != m.var_count:
        raise ValueError("state has %d spins, model has %d" % (len(s), m.var_count))
    x = {}
    for spin, var in m.problem_vertex.items():
        x[var] = s[spin] > 0
    code = list_to_bits([v for v, on in x.items() if on])
    code |= list_to_bits(m.assumptions)
    return x, code


def _dense(m):
    W = np.zeros((m.var_count, m.var_count))
    for (i, j), v in m.J.items():
        W[i, j] += v
        W[j, i] += v
    return np.asarray(m.h, dtype=float), W


def exact_ground_states(m, var_limit=26, tol=GROUND_TOL):
    """Global minimum energy and all attaining states, by full enumeration."""
    n = m.var_count
    if n > var_limit:
        raise ValueError("model has %d spins, enumeration limit is %d"
                         % (n, var_limit))
    hv, W = _dense(m)
    pairs = sorted(m.J.items())
    best = math.inf
    states = []
    block = 1 << 20
    arange_n = np.arange(n, dtype=np.uint64)
    for lo in range(0, 1 << n, block):
        hi = min(lo + (1 << 20), 1 << n)
        idx = np.arange(lo, hi, dtype=np.uint64)
        S = (((idx[:, None] >> arange_n[None, :]) & np.uint64(1)).astype(np.int8)
             * 2 - 1).astype(np.float64)
        E = S @ hv
        for (i, j), v in pairs:
            E += v * S[:, i] * S[:, j]
        bmin = float(E.min())
        if bmin < best - tol:
            best = bmin
            states = []
        keep = np.flatnonzero(E <= min(best, bmin) + tol)
        best = min(best, bmin)
        for r in keep:
            states.append(tuple(int(x) for x in S[r]))
    # re-filter against the final minimum (earlier blocks may have been purged)
    states = [s for s in states if _energy_fast(hv, pairs, s) <= best + tol]
    return best, states


def _energy_fast(hv, pairs, s):
    e = float(np.dot(hv, s))
    for (i, j), v in pairs:
        e += v * s[i] * s[j]
    return e


@dataclass
class AnnealResult:
    energy: float
    states: list                  # distinct best states, sorted
    per_restart_energy: list      # best energy each restart reached
    restarts: int


def simulated_annealing(m, sweeps=DEFAULT_SWEEPS, beta_start=DEFAULT_BETA[0],
                        beta_end=DEFAULT_BETA[1], restarts=32, seed=0,
                        batch=64):
    """Metropolis single-spin-flip annealing with a geometric beta ramp.

    Every restart draws from its own generator seeded by (seed, restart
    index), so results are reproducible and independent of batching.
    """
    n = m.var_count
    hv, W = _dense(m)
    if sweeps < 1:
        raise ValueError("need at least one sweep")
    if n == 0:
        return AnnealResult(0.0, [()], [0.0] * restarts, restarts)
    betas = beta_start * (beta_end / beta_start) ** (np.arange(sweeps)
                                                     / max(sweeps - 1, 1))
    best_overall = math.inf
    best_states = set()
    per_restart = []
    for lo in range(0, restarts, batch):
        idxs = range(lo, min(lo + batch, restarts))
        gens = [np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, r))))
                for r in idxs]
        S = np.stack([g.integers(0, 2, n).astype(np.float64) * 2 - 1 for g in gens])
        R = S.shape[0]
        L = S @ W
        E = S @ hv + 0.5 * np.einsum("ri,ri->r", L, S)
        bestE = E.copy()
        bestS = S.copy()
        for t in range(sweeps):
            beta = betas[t]
            U = np.stack([g.random(n) for g in gens])
            for i in range(n):
                # flipping spin i changes the energy by -2 s_i (h_i + L_i)
                dE = -2.0 * S[:, i] * (hv[i] + L[:, i])
                p = np.exp(-beta * np.maximum(dE, 0.0))
                acc = U[:, i] < p
                if not acc.any():
                    continue
                S[acc, i] = -S[acc, i]
                L[acc] += 2.0 * S[acc, i, None] * W[i][None, :]
                E[acc] += dE[acc]
            imp = E < bestE
            bestE[imp] = E[imp]
            bestS[imp] = S[imp]
        # recompute exactly from the stored states, then merge
        for r in range(R):
            st = tuple(int(x) for x in bestS[r])
            e = _energy_fast(hv, sorted(m.J.items()), st)
            per_restart.append(e)
            if e < best_overall - GROUND_TOL:
                best_overall = e
                best_states = {st}
            elif e <= best_overall + GROUND_TOL:
                best_overall = min(best_overall, e)
                best_states.add(st)
    return AnnealResult(best_overall, sorted(best_states), per_restart, restarts)


# ---------------------------------------------------------------------------
# model text format

def write_model(m, path):
    """Text format: "vars N", "h i value", "J i j value", "role i tag" lines,
    then decoding extras (vertex, lambda, assume lines)."""
    with open(path, "w") as fh:
        fh.write(format_model(m))


def format_model(m):
    lines = ["vars %d" % m.var_count]
    for i, v in enumerate(m.h):
        if v != 0.0:
            lines.append("h %d %r" % (i, v))
    for (i, j), v in m.couplings():
        if v != 0.0:
            lines.append("J %d %d %r" % (i, j, v))
    for i, role in enumerate(m.roles):
        lines.append("role %d %s" % (i, role))
    for spin in sorted(m.problem_vertex):
        lines.append("vertex %d %d" % (spin, m.problem_vertex[spin]))
    if m.penalty_lambda:
        lines.append("lambda %r" % m.penalty_lambda)
    for v in sorted(m.assumptions):
        lines.append("assume %d" % v)
    return "\n".join(lines) + "\n"


def read_model(path):
    with open(path) as fh:
        return parse_model(fh.read())


def parse_model(text):
    var_count = None
    h = []
    J = {}
    roles = {}
    vertex = {}
    lam = 0.0
    assume = set()
    for line in text.splitlines():
        tok = line.split()
        if not tok or tok[0].startswith("#"):
            continue
        kind = tok[0]
        if kind == "vars":
            var_count = int(tok[1])
            h = [0.0] * var_count
        elif kind == "h":
            h[int(tok[1])] = float(tok[2])
        elif kind == "J":
            i, j = int(tok[1]), int(tok[2])
            if i >= j:
                raise ValueError("J line must have i < j: %r" % line)
            J[(i, j)] = float(tok[3])
        elif kind == "role":
            roles[int(tok[1])] = tok[2]
        elif kind == "vertex":
            vertex[int(tok[1])] = int(tok[2])
        elif kind == "lambda":
            lam = float(tok[1])
        elif kind == "assume":
            assume.add(int(tok[1]))
        else:
            raise ValueError("unknown model line: %r" % line)
    if var_count is None:
        raise ValueError("missing 'vars' header")
    role_tuple = tuple(roles.get(i, "problem") for i in range(var_count))
    return IsingModel(var_count, h, J, role_tuple, vertex, lam,
                      frozenset(assume))

"""Monotone CNF formulation of the identifying-code problem.

Every clause is a set of positive literals (variable = vertex index), so
minimum-weight satisfaction is a minimum hitting set. One domination clause
per vertex (its ball) and one separation clause per vertex pair (the
symmetric difference of their balls); empty symmetric differences mean twin
vertices and an infeasible instance.
"""

from dataclasses import dataclass, field

from .idcode import detect_twins
from .graph import bits_to_list


class InfeasibleError(Exception):
    """Raised for graphs with twin vertices; carries one offending pair."""

    def __init__(self, pair):
        super().__init__("twin vertices %r admit no identifying code" % (pair,))
        self.pair = pair


def _canon(clauses):
    """Clauses as sorted tuples, ordered by (length, content), deduplicated."""
    seen = set()
    out = []
    for cl in sorted((tuple(sorted(c)) for c in clauses), key=lambda c: (len(c), c)):
        if cl not in seen:
            seen.add(cl)
            out.append(cl)
    return tuple(out)


@dataclass(frozen=True)
class Cnf:
    """Monotone CNF over variables 0..var_count-1, all literals positive."""

    var_count: int
    clauses: tuple                      # sorted tuples in canonical order
    assumptions: frozenset = frozenset()

    def variables(self):
        """Sorted list of variables occurring in clauses."""
        vs = set()
        for cl in self.clauses:
            vs.update(cl)
        return sorted(vs)

    def is_satisfied_by(self, true_vars):
        sat = set(true_vars) | self.assumptions
        return all(any(v in sat for v in cl) for cl in self.clauses)


@dataclass(frozen=True)
class CaseSplit:
    pivots: tuple                       # the pivot clauses used
    cases: tuple                        # of (assumptions frozenset, Cnf)


def build_formula(g):
    """Raw identifying-code CNF for g: ball clauses plus pairwise
    symmetric-difference clauses, over one variable per vertex."""
    twins = detect_twins(g)
    if twins is not None:
        raise InfeasibleError(twins)
    nv = g.vertex_count
    balls = [g.ball(v) for v in range(nv)]
    clauses = [tuple(bits_to_list(b)) for b in balls]
    for i in range(nv):
        for j in range(i + 1, nv):
            clauses.append(tuple(bits_to_list(balls[i] ^ balls[j])))
    return Cnf(nv, _canon(clauses))


def simplify(f):
    """Remove duplicate and subsumed clauses (supersets of other clauses)."""
    kept = []
    kept_sets = []
    for cl in f.clauses:  # canonical order is shortest first
        s = set(cl)
        if any(k <= s for k in kept_sets):
            continue
        kept.append(cl)
        kept_sets.append(s)
    return Cnf(f.var_count, tuple(kept), f.assumptions)


def assign_true(f, vars):
    """Fix variables to true: drop every clause containing one, record them
    as assumptions, and re-simplify."""
    vs = frozenset(vars)
    bad = [v for v in vs if not 0 <= v < f.var_count]
    if bad:
        raise ValueError("variables %r out of range" % (bad,))
    remaining = tuple(cl for cl in f.clauses if not vs & set(cl))
    return simplify(Cnf(f.var_count, remaining, f.assumptions | vs))


def case_split(f, pivot_clauses):
    """Split on 2-clauses: one case per choice of a true literal per pivot.

    Every satisfying assignment hits each pivot clause, so the union of the
    cases' solution sets is the parent's solution set.
    """
    pivots = []
    clause_set = set(f.clauses)
    for p in pivot_clauses:
        cl = tuple(sorted(p))
        if cl not in clause_set:
            raise ValueError("pivot %r is not a clause of the formula" % (p,))
        if len(cl) != 2:
            raise ValueError("pivot %r is not a 2-clause" % (p,))
        pivots.append(cl)
    cases = [(frozenset(), f)] if not pivots else []
    if pivots:
        choices = [()]
        for cl in pivots:
            choices = [prev + (lit,) for prev in choices for lit in cl]
        for chosen in choices:
            cases.append((frozenset(chosen), assign_true(f, chosen)))
    return CaseSplit(tuple(pivots), tuple(cases))


def shared_ancilla_count(clauses):
    """Ancilla spins needed to compile the clauses with one OR node per
    distinct subterm, shared across clauses (see ising.compile_cnf)."""
    nodes = set()

    def reduce(vs):
        if len(vs) == 1:
            return ("v", vs[0])
        half = 1 << (max(len(vs) - 1, 1).bit_length() - 1)
        key = frozenset((reduce(vs[:half]), reduce(vs[half:])))
        nodes.add(key)
        return key

    for cl in clauses:
        if len(cl) >= 3:
            half = 1 << (max(len(cl) - 1, 1).bit_length() - 1)
            reduce(cl[:half])
            reduce(cl[half:])
    return len(nodes)


def compiled_size(f):
    """Total spin count (problem plus shared ancillas) of the Ising
    compilation of f."""
    return len(f.variables()) + shared_ancilla_count(f.clauses)


def choose_pivots(f, max_pivots=2):
    """Pick up to max_pivots pairwise-disjoint 2-clauses to case-split on.

    Among disjoint combinations the one minimizing the summed compiled spin
    count of the resulting cases wins (ties broken by clause content), since
    the point of splitting is to shrink each subproblem.
    """
    twos = [cl for cl in f.clauses if len(cl) == 2]
    if max_pivots <= 0 or not twos:
        return []
    if max_pivots == 1 or len(twos) == 1:
        return [twos[0]]
    best = None
    for a in range(len(twos)):
        for b in range(a + 1, len(twos)):
            p, q = twos[a], twos[b]
            if set(p) & set(q):
                continue
            cost = sum(compiled_size(case) for _, case in case_split(f, [p, q]).cases)
            key = (cost, p, q)
            if best is None or key < best:
                best = key
    if best is None:
        return [twos[0]]
    return [best[1], best[2]]


# ---------------------------------------------------------------------------
# exports

def format_dimacs(f):
    """DIMACS CNF text with 1-based positive literals; assumptions become
    unit clauses."""
    lines = ["p cnf %d %d" % (f.var_count, len(f.clauses) + len(f.assumptions))]
    for v in sorted(f.assumptions):
        lines.append("%d 0" % (v + 1))
    for cl in f.clauses:
        lines.append(" ".join(str(v + 1) for v in cl) + " 0")
    return "\n".join(lines) + "\n"


def export_dimacs(f, path):
    with open(path, "w") as fh:
        fh.write(format_dimacs(f))


def parse_dimacs(path):
    """Read a positive-literal DIMACS file back into a Cnf (unit clauses stay
    clauses; assumption provenance is not recoverable from the format)."""
    var_count = 0
    clauses = []
    with open(path) as fh:
        for line in fh:
            tok = line.split()
            if not tok or tok[0] == "c":
                continue
            if tok[0] == "p":
                var_count = int(tok[2])
                continue
            lits = [int(t) for t in tok]
            if lits[-1] != 0:
                raise ValueError("clause line not 0-terminated: %r" % line)
            if any(l < 0 for l in lits[:-1]):
                raise ValueError("negative literals are not supported")
            clauses.append(tuple(sorted(l - 1 for l in lits[:-1])))
    return Cnf(var_count, _canon(clauses))


def format_smtlib(f, target_size):
    """SMT-LIB2 encoding: one Bool per vertex, the clause assertions, linked
    0/1 integers, and the cardinality equality to target_size."""
    lines = ["(set-logic QF_LIA)"]
    n = f.var_count
    for v in range(n):
        lines.append("(declare-const x%d Bool)" % v)
        lines.append("(declare-const n%d Int)" % v)
        lines.append("(assert (and (>= n%d 0) (<= n%d 1)))" % (v, v))
        lines.append("(assert (= x%d (= n%d 1)))" % (v, v))
    for v in sorted(f.assumptions):
        lines.append("(assert x%d)" % v)
    for cl in f.clauses:
        if len(cl) == 1:
            lines.append("(assert x%d)" % cl[0])
        else:
            lines.append("(assert (or %s))" % " ".join("x%d" % v for v in cl))
    total = "(+ %s)" % " ".join("n%d" % v for v in range(n)) if n else "0"
    lines.append("(assert (= %s %d))" % (total, target_size))
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def export_smtlib(f, target_size, path):
    with open(path, "w") as fh:
        fh.write(format_smtlib(f, target_size))


@dataclass(frozen=True)
class BlockingClause:
    """Constraint excluding exactly one 0/1 assignment over var_count vars."""

    members: frozenset
    var_count: int

    def excludes(self, true_vars):
        """True iff the assignment is the blocked one."""
        return frozenset(true_vars) == self.members

    def allows(self, true_vars):
        return not self.excludes(true_vars)

    def smt(self):
        lits = []
        for v in range(self.var_count):
            lits.append("(not x%d)" % v if v in self.members else "x%d" % v)
        return "(assert (or %s))" % " ".join(lits)


def blocking_clause(code_vars, var_count):
    """Constraint ruling out one solution: at least one variable differs."""
    return BlockingClause(frozenset(code_vars), var_count)

"""Undirected graphs stored as adjacency bit rows, plus de Bruijn construction.

Vertices are integers 0..n-1. Neighborhoods and vertex sets are plain Python
ints used as bitmasks, which keeps set algebra (union, intersection, symmetric
difference) down to single integer ops.
"""

import json

# largest vertex count we are willing to materialize as bit rows
MAX_VERTICES = 1 << 14

WORD_ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyz"


class GraphError(Exception):
    pass


class CapacityError(GraphError):
    pass


class Graph:
    """Immutable undirected graph without self-loops.

    adjacency row of vertex v is an int whose bit u is set iff {u,v} is an
    edge. labels, when given, must be distinct strings, one per vertex.
    """

    __slots__ = ("vertex_count", "adj", "labels")

    def __init__(self, vertex_count, edges=(), labels=None):
        if vertex_count < 0:
            raise GraphError("vertex_count must be non-negative")
        if vertex_count > MAX_VERTICES:
            raise CapacityError("graph too large: %d vertices" % vertex_count)
        adj = [0] * vertex_count
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphError("edge (%r, %r) out of range" % (u, v))
            if u == v:
                raise GraphError("self-loop at vertex %d" % u)
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != vertex_count:
                raise GraphError("label count != vertex_count")
            if len(set(labels)) != vertex_count:
                raise GraphError("labels not pairwise distinct")
        object.__setattr__(self, "vertex_count", vertex_count)
        object.__setattr__(self, "adj", tuple(adj))
        object.__setattr__(self, "labels", labels)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __eq__(self, other):
        return (isinstance(other, Graph)
                and self.vertex_count == other.vertex_count
                and self.adj == other.adj
                and self.labels == other.labels)

    def __hash__(self):
        return hash((self.vertex_count, self.adj, self.labels))

    def __repr__(self):
        return "Graph(%d vertices, %d edges)" % (self.vertex_count, self.edge_count())

    def ball(self, v):
        """Closed neighborhood N(v) | {v} as a bitmask."""
        if not 0 <= v < self.vertex_count:
            raise GraphError("vertex %r out of range" % (v,))
        return self.adj[v] | (1 << v)

    def neighbors(self, v):
        """Sorted list of neighbors of v."""
        return bits_to_list(self.adj[v])

    def degree(self, v):
        return self.adj[v].bit_count()

    def edges(self):
        """All edges as (u, v) pairs with u < v, sorted."""
        out = []
        for u in range(self.vertex_count):
            rest = self.adj[u] >> (u + 1)
            w = u + 1
            while rest:
                if rest & 1:
                    out.append((u, w))
                rest >>= 1
                w += 1
        return out

    def edge_count(self):
        return sum(self.degree(v) for v in range(self.vertex_count)) // 2

    def label_of(self, v):
        return self.labels[v] if self.labels is not None else str(v)

    def index_of(self, label):
        """Vertex index for a label (or for a stringified index when unlabeled)."""
        if self.labels is not None:
            return self.labels.index(label)
        return int(label)


def bits_to_list(mask):
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def list_to_bits(vs):
    mask = 0
    for v in vs:
        mask |= 1 << v
    return mask


def debruijn(d, n):
    """Undirected d-ary de Bruijn graph of order n.

    Vertices are the d^n length-n words over a d-letter alphabet, indexed by
    lexicographic rank. Words x and y are adjacent iff one can be shifted one
    symbol to overlap the other (x[1:] == y[:-1] or y[1:] == x[:-1]) and
    x != y; shift coincidences that would give self-loops are discarded.
    """
    if d < 2:
        raise GraphError("alphabet size d must be >= 2")
    if n < 1:
        raise GraphError("word length n must be >= 1")
    nv = d ** n
    if nv > MAX_VERTICES:
        raise CapacityError("d^n = %d exceeds capacity %d" % (nv, MAX_VERTICES))
    shift = nv // d  # d^(n-1)
    edges = []
    for v in range(nv):
        left = (v * d) % nv
        right = v // d
        for c in range(d):
            u = left + c            # successors: x_2..x_n followed by c
            if u != v:
                edges.append((v, u))
            u = c * shift + right   # predecessors: c followed by x_1..x_{n-1}
            if u != v:
                edges.append((v, u))
    labels = None
    if d <= len(WORD_ALPHABET):
        labels = [_word(v, d, n) for v in range(nv)]
    return Graph(nv, edges, labels)


def _word(v, d, n):
    out = []
    for _ in range(n):
        out.append(WORD_ALPHABET[v % d])
        v //= d
    return "".join(reversed(out))


def modified_adjacency(g):
    """Adjacency matrix plus identity, as a list of 0/1 rows.

    Row v is the indicator vector of ball(v).
    """
    out = []
    for v in range(g.vertex_count):
        b = g.ball(v)
        out.append([(b >> u) & 1 for u in range(g.vertex_count)])
    return out


def write_graph(g, path):
    """Write the JSON graph format: vertex_count, labels, edges with u < v."""
    doc = {"vertex_count": g.vertex_count, "edges": [list(e) for e in g.edges()]}
    if g.labels is not None:
        doc["labels"] = list(g.labels)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_graph(path):
    """Read the JSON graph format; single-direction edge entries are symmetrized."""
    with open(path) as fh:
        doc = json.load(fh)
    try:
        nv = int(doc["vertex_count"])
        raw = doc["edges"]
        labels = doc.get("labels")
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError("malformed graph file %s: %s" % (path, exc)) from exc
    edges = []
    for entry in raw:
        if not isinstance(entry, list) or len(entry) != 2:
            raise GraphError("malformed edge entry %r" % (entry,))
        edges.append((int(entry[0]), int(entry[1])))
    return Graph(nv, edges, labels)

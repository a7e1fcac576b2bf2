"""Geometric pi_1- and H-markings of bordered fatgraphs.

A marking assigns a reduced word to every dart.  Conditions checked by
:func:`validate_marking`, in this order: orientation, vertex, surjectivity,
geometricity.  The univalent tail vertex is exempt from the vertex condition
(its single incoming dart carries the boundary word).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .free_words import EMPTY, Word, product
from .surface_graph import BoundaryOrder, Fatgraph, canonical_form, greedy_tree

__all__ = [
    "Pi1Marking",
    "HMarking",
    "MarkingReport",
    "extend_from_generators",
    "graph_standard_marking",
    "validate_marking",
    "generates_free_group",
    "abelianize",
    "pairing",
    "pairing_matrix",
    "intersection_form",
    "symplectic_product",
    "marked_key",
    "validate_h_marking",
]


@dataclass(frozen=True)
class Pi1Marking:
    labels: tuple[Word, ...]
    genus: int

    @property
    def rank(self) -> int:
        return 2 * self.genus

    def __getitem__(self, d: int) -> Word:
        return self.labels[d]

    def boundary(self, G: Fatgraph) -> Word:
        """Label of the tail dart pointing into the univalent vertex."""
        return self.labels[G.tail ^ 1]

    def replace(self, changes: dict[int, Word]) -> "Pi1Marking":
        labels = list(self.labels)
        for d, w in changes.items():
            labels[d] = w
        return Pi1Marking(tuple(labels), self.genus)


def extend_from_generators(G: Fatgraph, gen_labels: Sequence[Word]) -> Pi1Marking:
    """Fill in tree-edge labels from generator labels using vertex conditions.

    ``gen_labels[i]`` is the label of the i-th greedy generator (preferred
    orientation).  Each tree dart pointing away from the tail gets the
    product of the labels hanging below it, read around its head vertex.
    """
    gs = greedy_tree(G)
    if len(gen_labels) != len(gs.generators):
        raise ValueError(f"expected {len(gs.generators)} generator labels, got {len(gen_labels)}")
    labels: list[Word | None] = [None] * G.num_darts
    for d, w in zip(gs.generators, gen_labels):
        labels[d] = w
        labels[d ^ 1] = w.inverse()
    rank = G.order.rank
    # tree darts oriented away from the tail, children after parents
    down = [d for d in G.order.sequence if (d >> 1) in gs.tree and rank[d] < rank[d ^ 1]]
    for p in reversed(down):
        v = G.vertex_cycles[G.vertex_of[p]]
        if len(v) == 1:
            continue
        i = v.index(p)
        rest = v[i + 1:] + v[:i]
        w = product(labels[y] for y in rest)  # type: ignore[misc]
        labels[p] = w.inverse()
        labels[p ^ 1] = w
    if any(x is None for x in labels):
        raise ValueError("greedy tree did not reach every edge")
    return Pi1Marking(tuple(labels), (len(gen_labels)) // 2)  # type: ignore[arg-type]


def graph_standard_marking(G: Fatgraph) -> Pi1Marking:
    """The marking sending the i-th greedy generator to ``g_i``."""
    n = len(greedy_tree(G).generators)
    return extend_from_generators(G, [Word.gen(i) for i in range(1, n + 1)])


def marked_key(G: Fatgraph, m: Pi1Marking) -> tuple:
    """Isomorphism invariant of a marked fatgraph: the canonical rotation and
    the labels listed in canonical dart order."""
    relabel, H = canonical_form(G)
    labels: list = [None] * G.num_darts
    for d, w in enumerate(m.labels):
        labels[relabel[d]] = w.letters
    return (H.sigma, H.chord_diagram, tuple(labels))


def generates_free_group(words: Sequence[Word], rank: int) -> bool:
    """Stallings folding: do ``words`` generate the free group of ``rank``?"""
    parent: list[int] = [0]
    out_edges: list[dict[int, int]] = [{}]

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pending: list[tuple[int, int, int]] = []

    def add_edge(u: int, a: int, v: int) -> None:
        pending.append((u, a, v))
        pending.append((v, -a, u))

    for w in words:
        if not w.letters:
            continue
        cur = 0
        for j, a in enumerate(w.letters):
            if j == len(w.letters) - 1:
                nxt = 0
            else:
                nxt = len(parent)
                parent.append(nxt)
                out_edges.append({})
            add_edge(cur, a, nxt)
            cur = nxt
    while pending:
        u, a, v = pending.pop()
        u, v = find(u), find(v)
        tgt = out_edges[u].get(a)
        if tgt is None:
            out_edges[u][a] = v
            continue
        tgt = find(tgt)
        if tgt == v:
            continue
        # fold: merge v into tgt, re-queue v's edges
        parent[v] = tgt
        for b, x in out_edges[v].items():
            pending.append((tgt, b, x))
        out_edges[v] = {}
    root = find(0)
    verts = {find(x) for x in range(len(parent))}
    if len(verts) != 1:
        return False
    labels = {a for a, x in out_edges[root].items()}
    return all(i in labels and -i in labels for i in range(1, rank + 1))


@dataclass
class MarkingReport:
    violations: list[tuple[str, object]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first(self) -> tuple[str, object] | None:
        return self.violations[0] if self.violations else None

    def kinds(self) -> set[str]:
        return {k for k, _ in self.violations}


def validate_marking(G: Fatgraph, m: Pi1Marking, boundary: Word | None = None) -> MarkingReport:
    """Check the four compatibility conditions; ``boundary`` is the reference
    boundary word (geometricity is skipped when it is not given)."""
    rep = MarkingReport()
    if len(m.labels) != G.num_darts:
        rep.violations.append(("structure", len(m.labels)))
        return rep
    for d in range(0, G.num_darts, 2):
        if (m.labels[d] * m.labels[d + 1]).letters:
            rep.violations.append(("orientation", d >> 1))
    univalent = G.tail ^ 1
    for cyc in G.vertex_cycles:
        if cyc == (univalent,):
            continue
        if product(m.labels[d] for d in cyc).letters:
            rep.violations.append(("vertex", cyc))
    gens = [m.labels[d] for d in greedy_tree(G).generators]
    if len(gens) != m.rank or not generates_free_group(gens, m.rank):
        rep.violations.append(("surjectivity", tuple(gens)))
    if boundary is not None and m.labels[univalent] != boundary:
        rep.violations.append(("geometricity", m.labels[univalent]))
    return rep


# -- homology ---------------------------------------------------------------


@dataclass(frozen=True)
class HMarking:
    """Dart -> integer vector, with the intersection form it is measured in."""

    labels: tuple[tuple[int, ...], ...]
    form: tuple[tuple[int, ...], ...]

    def dot(self, x: int, y: int) -> int:
        return symplectic_product(self.labels[x], self.labels[y], self.form)


def symplectic_product(u: Sequence[int], v: Sequence[int], form: Sequence[Sequence[int]]) -> int:
    return sum(u[i] * form[i][j] * v[j] for i in range(len(u)) for j in range(len(v)) if form[i][j])


def pairing(order: BoundaryOrder, x: int, y: int) -> int:
    """Skew pairing of darts read from the boundary order.

    ``-1`` when ``x < y < xbar < ybar`` up to cyclic rotation, ``+1`` when
    ``x < ybar < xbar < y`` up to rotation (the antisymmetric completion),
    otherwise 0.  Two darts of the same edge pair to 0.
    """
    if x >> 1 == y >> 1:
        return 0
    r = order.rank
    pts = sorted(((r[x], 0), (r[y], 1), (r[x ^ 1], 2), (r[y ^ 1], 3)))
    seq = [k for _, k in pts]
    i = seq.index(0)
    seq = seq[i:] + seq[:i]
    if seq == [0, 1, 2, 3]:
        return -1
    if seq == [0, 3, 2, 1]:
        return 1
    return 0


def pairing_matrix(order: BoundaryOrder, darts: Sequence[int]) -> list[list[int]]:
    return [[pairing(order, x, y) for y in darts] for x in darts]


def _exact_inverse(M: list[list[int]]) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            raise ValueError("singular matrix")
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [v / piv for v in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [row[n:] for row in A]


def intersection_form(G: Fatgraph, m: Pi1Marking) -> tuple[tuple[int, ...], ...]:
    """Intersection form on ``Z^{2g}`` in the basis of the marking's alphabet.

    With ``M`` the exponent-sum matrix of the generator labels and ``P`` their
    combinatorial pairing matrix, geometricity forces ``M J M^T = P``.
    """
    gens = greedy_tree(G).generators
    M = [list(m.labels[d].exponent_sums(m.rank)) for d in gens]
    P = pairing_matrix(G.order, gens)
    Minv = _exact_inverse(M)
    n = len(M)
    # J = Minv P Minv^T
    MP = [[sum(Minv[i][k] * P[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    J = [[sum(MP[i][k] * Minv[j][k] for k in range(n)) for j in range(n)] for i in range(n)]
    if any(v.denominator != 1 for row in J for v in row):
        raise ValueError("generator labels are not a unimodular basis")
    return tuple(tuple(int(v) for v in row) for row in J)


def abelianize(m: Pi1Marking, form: Sequence[Sequence[int]] | None = None,
               G: Fatgraph | None = None) -> HMarking:
    """Exponent-sum vectors of every label.

    The intersection form is taken from ``form`` or derived from ``G``.
    """
    if form is None:
        if G is None:
            raise ValueError("need an intersection form or the fatgraph")
        form = intersection_form(G, m)
    labels = tuple(w.exponent_sums(m.rank) for w in m.labels)
    return HMarking(labels, tuple(tuple(r) for r in form))


def validate_h_marking(G: Fatgraph, h: HMarking) -> list[tuple[str, object]]:
    """Abelian orientation/vertex/span conditions and pairing geometricity."""
    bad: list[tuple[str, object]] = []
    n = len(h.form)
    for d in range(0, G.num_darts, 2):
        if any(a + b for a, b in zip(h.labels[d], h.labels[d + 1])):
            bad.append(("orientation", d >> 1))
    for cyc in G.vertex_cycles:
        if cyc == (G.tail ^ 1,):
            continue
        if any(sum(h.labels[d][i] for d in cyc) for i in range(n)):
            bad.append(("vertex", cyc))
    gens = greedy_tree(G).generators
    # the generator vectors must be a Z-basis: integral inverse
    try:
        inv = _exact_inverse([list(h.labels[d]) for d in gens])
        det_ok = all(v.denominator == 1 for row in inv for v in row)
    except ValueError:
        det_ok = False
    if not det_ok:
        bad.append(("span", None))
    order = G.order
    for x in range(G.num_darts):
        for y in range(G.num_darts):
            if h.dot(x, y) != pairing(order, x, y):
                bad.append(("geometricity", (x, y)))
    return bad


EMPTY_WORD = EMPTY

"""Dual chord diagrams and integral reduction of geometric homology bases.

The dual of a diagram keeps its oriented chords but lays their endpoints
along the core in boundary order: the endpoint named by an oriented chord
goes to the slot given by that chord's boundary rank.  Every chord of a
dual, in its preferred orientation, therefore points left to right.

A dual marking gives each oriented chord the label it had in the source.
Sliding the endpoint named ``x`` along the endpoint named ``y`` changes the
moving chord: ``x -> x y^-1``.  The chord slid along keeps its label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .chords import (
    ChordDiagram,
    ChordSlide,
    DiagramError,
    MarkedDiagram,
    SlideSequence,
    chord_edge,
    endpoint_ranks,
    generator_chords,
    realize_fatgraph,
    slide_diagram,
)
from .free_words import Word
from .markings import intersection_form, pairing

__all__ = [
    "DualMarkedDiagram",
    "DualHMarkedDiagram",
    "dualize",
    "immediately_precedes",
    "dual_slide_transport",
    "dual_sequence",
    "dual_marking",
    "dual_apply_slide",
    "dual_h_marking",
    "dual_h_apply_slide",
    "crossing_sign",
    "crossing_pairing",
    "order_pairing",
    "GeometricBasis",
    "ReductionError",
    "ReductionResult",
    "symplectic_reduce",
    "SlideReduction",
    "realize_reduction_by_slides",
    "geometric_basis",
    "standard_form",
    "format_matrix",
    "parse_matrix",
]


# -- dual diagrams ------------------------------------------------------------------


def dualize(C: ChordDiagram) -> ChordDiagram:
    if not C.is_bordered():
        raise DiagramError("only bordered diagrams have duals")
    r = endpoint_ranks(C)
    return ChordDiagram(tuple(C.at(s) for s in sorted(r, key=r.__getitem__)))


def immediately_precedes(C: ChordDiagram, x: int, y: int) -> bool:
    """Is the oriented chord ``x`` right before ``y`` in boundary order,
    among oriented chords?"""
    r = endpoint_ranks(C)
    ranked = sorted(r, key=r.__getitem__)
    i = ranked.index(C.slot(x))
    return i + 1 < len(ranked) and C.at(ranked[i + 1]) == y


def dual_slide_transport(C: ChordDiagram, s: ChordSlide) -> ChordSlide:
    """The slide of the dual matching ``s``.

    With ``c`` left of ``d`` on the core, sliding ``c`` along ``d`` matches
    sliding ``-d`` along ``c`` in the dual, and sliding ``d`` along ``c``
    matches sliding ``c`` along ``-d``.
    """
    if abs(s.moving - s.along) != 1 or abs(C.at(s.moving)) == abs(C.at(s.along)):
        raise DiagramError(f"{s} is not a slide")
    D = dualize(C)
    lo, hi = sorted((s.moving, s.along))
    c, d = C.at(lo), C.at(hi)
    if s.moving == lo:
        return ChordSlide(D.slot(-d), D.slot(c))
    return ChordSlide(D.slot(c), D.slot(-d))


def dual_sequence(seq: SlideSequence) -> SlideSequence:
    """Slide-by-slide transport of a slide word to the duals."""
    Cs = seq.diagrams()
    return SlideSequence(dualize(seq.start), tuple(dual_slide_transport(C, s) for C, s in zip(Cs, seq.steps)))


@dataclass(frozen=True)
class DualMarkedDiagram:
    diagram: ChordDiagram
    labels: tuple[Word, ...]

    def label(self, x: int) -> Word:
        w = self.labels[abs(x) - 1]
        return w if x > 0 else w.inverse()

    def key(self) -> tuple:
        return tuple(self.label(x).letters for x in self.diagram.ends)


def dual_marking(M: MarkedDiagram) -> DualMarkedDiagram:
    return DualMarkedDiagram(dualize(M.diagram), M.labels)


def dual_apply_slide(M: DualMarkedDiagram, s: ChordSlide) -> DualMarkedDiagram:
    C = M.diagram
    C2, _ = slide_diagram(C, s)
    x, y = C.at(s.moving), C.at(s.along)
    w = M.label(x) * M.label(y).inverse()
    labels = list(M.labels)
    labels[abs(x) - 1] = w if x > 0 else w.inverse()
    return DualMarkedDiagram(C2, tuple(labels))


@dataclass(frozen=True)
class DualHMarkedDiagram:
    diagram: ChordDiagram
    vectors: tuple[tuple[int, ...], ...]

    def vector(self, x: int) -> tuple[int, ...]:
        v = self.vectors[abs(x) - 1]
        return v if x > 0 else tuple(-a for a in v)

    def with_vector(self, x: int, v: Sequence[int]) -> "DualHMarkedDiagram":
        vecs = list(self.vectors)
        vecs[abs(x) - 1] = tuple(v) if x > 0 else tuple(-a for a in v)
        return DualHMarkedDiagram(self.diagram, tuple(vecs))

    def reverse(self, c: int) -> "DualHMarkedDiagram":
        """Flip the orientation of chord ``c``; its label changes sign."""
        ends = tuple(-x if abs(x) == abs(c) else x for x in self.diagram.ends)
        vecs = list(self.vectors)
        vecs[abs(c) - 1] = tuple(-a for a in vecs[abs(c) - 1])
        return DualHMarkedDiagram(ChordDiagram(ends), tuple(vecs))


def dual_h_marking(M: MarkedDiagram) -> DualHMarkedDiagram:
    return DualHMarkedDiagram(dualize(M.diagram), M.abelian())


def dual_h_apply_slide(H: DualHMarkedDiagram, s: ChordSlide) -> DualHMarkedDiagram:
    C = H.diagram
    C2, _ = slide_diagram(C, s)
    x, y = C.at(s.moving), C.at(s.along)
    w = tuple(a - b for a, b in zip(H.vector(x), H.vector(y)))
    return DualHMarkedDiagram(C2, H.with_vector(x, w).vectors)


# -- pairings ------------------------------------------------------------------------


def crossing_sign(D: ChordDiagram, x: int, y: int) -> int:
    """Sign of the crossing of the oriented chords ``x`` and ``y`` drawn as
    semicircles above the core, 0 when they do not cross.

    +1 when the tangent of ``x`` followed by the tangent of ``y`` is a
    positively oriented basis of the plane at the crossing.
    """
    if abs(x) == abs(y):
        return 0
    p = (D.slot(x), D.slot(-x))
    q = (D.slot(y), D.slot(-y))
    c1, c2 = Fraction(sum(p), 2), Fraction(sum(q), 2)
    r1, r2 = Fraction(abs(p[0] - p[1]), 2), Fraction(abs(q[0] - q[1]), 2)
    if c1 == c2:
        return 0
    # the two circles meet where their power difference vanishes
    u = (r1 * r1 - r2 * r2 - c1 * c1 + c2 * c2) / (2 * (c2 - c1))
    h2 = r1 * r1 - (u - c1) ** 2
    if h2 <= 0 or not (abs(u - c2) < r2):
        return 0
    h = math.sqrt(h2)

    def tangent(src: int, dst: int, c: Fraction) -> tuple[float, float]:
        # left-to-right travel over the top is clockwise about the centre
        t = (h, -float(u - c))
        return t if src < dst else (-t[0], -t[1])

    t1, t2 = tangent(*p, c1), tangent(*q, c2)
    det = t1[0] * t2[1] - t1[1] * t2[0]
    return 1 if det > 0 else -1


def crossing_pairing(D: ChordDiagram, x: int, y: int) -> int:
    """Minus the sum of crossing signs; chords meet at most once."""
    return -crossing_sign(D, x, y)


def order_pairing(C: ChordDiagram, x: int, y: int) -> int:
    """The boundary-order pairing of two oriented chords of ``C``."""
    G = realize_fatgraph(C)

    def dart(z: int) -> int:
        return 2 * chord_edge(C, abs(z), trivalent=False) + (0 if z > 0 else 1)

    return pairing(G.order, dart(x), dart(y))


# -- integral symplectic reduction ----------------------------------------------------


class ReductionError(ValueError):
    pass


def _dot(u: Sequence[int], v: Sequence[int], J: Sequence[Sequence[int]]) -> int:
    return sum(u[i] * J[i][j] * v[j] for i in range(len(u)) if u[i] for j in range(len(v)) if J[i][j] and v[j])


def standard_form(g: int) -> tuple[tuple[int, ...], ...]:
    """Gram matrix of a symplectic basis ``A1, B1, ..., Ag, Bg``."""
    n = 2 * g
    J = [[0] * n for _ in range(n)]
    for k in range(g):
        J[2 * k][2 * k + 1] = 1
        J[2 * k + 1][2 * k] = -1
    return tuple(tuple(r) for r in J)


def _det(M: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    A = [list(r) for r in M]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            p = next((i for i in range(k + 1, n) if A[i][k]), None)
            if p is None:
                return 0
            A[k], A[p] = A[p], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1] if n else 1


@dataclass(frozen=True)
class GeometricBasis:
    """Vectors ``X1..X2g`` in coordinates whose Gram matrix is ``form``."""

    vectors: tuple[tuple[int, ...], ...]
    form: tuple[tuple[int, ...], ...]

    @property
    def pairing_matrix(self) -> list[list[int]]:
        X = self.vectors
        return [[_dot(a, b, self.form) for b in X] for a in X]

    def check(self) -> None:
        n = len(self.vectors)
        if n % 2 or len(self.form) != n or any(len(v) != n for v in (*self.vectors, *self.form)):
            raise ReductionError("need an even number of vectors in matching coordinates")
        P = self.pairing_matrix
        for i in range(n):
            for j in range(n):
                if P[i][j] != -P[j][i]:
                    raise ReductionError("pairing is not skew")
                if P[i][j] not in (-1, 0, 1):
                    raise ReductionError(f"pairing {P[i][j]} between X{i + 1} and X{j + 1} is not geometric")
        if _det(P) != 1:
            raise ReductionError("pairing matrix is degenerate over the integers")


@dataclass
class ReductionResult:
    basis: list[tuple[int, ...]]  # A1, B1, ..., Ag, Bg
    transform: list[list[int]]  # rows: output vectors in terms of the input ones
    divisors: list[int] = field(default_factory=list)
    trace: list[list[tuple[int, ...]]] = field(default_factory=list)  # working basis after each round
    pivots: list[int] = field(default_factory=list)  # input-order index chosen as B in each round


def symplectic_reduce(B: GeometricBasis) -> ReductionResult:
    """Turn a geometric basis into a symplectic one.

    Round ``k``: ``A = X[2k]``; the first later ``X[i]`` pairing nonzero with
    it is divided by that pairing to give ``B`` and moved right after ``A``;
    every later ``X[j]`` becomes ``X[j] - (X[j].B) A + (X[j].A) B``.  Every
    divisor must be a unit.
    """
    B.check()
    J = B.form
    X = [list(v) for v in B.vectors]
    n = len(X)
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    order = list(range(n))
    res = ReductionResult([], [])
    for k in range(n // 2):
        a = 2 * k
        i = next((i for i in range(a + 1, n) if _dot(X[a], X[i], J)), None)
        if i is None:
            raise ReductionError(f"X{a + 1} pairs to zero with every later vector")
        p = _dot(X[a], X[i], J)
        res.divisors.append(p)
        if p not in (1, -1):
            raise ReductionError(f"non-unit divisor {p}")
        res.pivots.append(order[i])
        for M in (X, U, order):
            M.insert(a + 1, M.pop(i))
        X[a + 1] = [v * p for v in X[a + 1]]  # division by a unit
        U[a + 1] = [v * p for v in U[a + 1]]
        A_, B_ = X[a], X[a + 1]
        for j in range(a + 2, n):
            xb, xa = _dot(X[j], B_, J), _dot(X[j], A_, J)
            X[j] = [x - xb * s + xa * t for x, s, t in zip(X[j], A_, B_)]
            U[j] = [x - xb * s + xa * t for x, s, t in zip(U[j], U[a], U[a + 1])]
        res.trace.append([tuple(v) for v in X])
    res.basis = [tuple(v) for v in X]
    res.transform = U
    return res


def geometric_basis(M: MarkedDiagram, form: Sequence[Sequence[int]] | None = None) -> GeometricBasis:
    """H-labels of the generators of a marked diagram, in generator order.

    ``form`` is the intersection form in the marking's alphabet; by default
    it is derived from the diagram.
    """
    if form is None:
        form = intersection_form(M.fatgraph(), M.pi1())
    H = M.abelian()
    vecs = []
    for x in generator_chords(M.diagram):
        v = H[abs(x) - 1]
        vecs.append(v if x > 0 else tuple(-a for a in v))
    return GeometricBasis(tuple(vecs), tuple(tuple(r) for r in form))


# -- the reduction by slides ------------------------------------------------------------


@dataclass
class SlideReduction:
    """Slides on the dual and the chords chosen per round.

    ``pairs[k] = (c, d)``: ``A`` of round ``k`` is the label of ``c`` and
    ``B`` that of ``-d``.  ``flipped`` lists the chords whose reversed
    orientation supplies ``B`` (the pairing divisor was -1).  ``trace[k]``
    holds the working-order labels after round ``k``.
    """

    slides: SlideSequence
    flipped: list[int]
    pairs: list[tuple[int, int]]
    trace: list[list[tuple[int, ...]]]
    final: DualHMarkedDiagram


def _clear_region(H: DualHMarkedDiagram, c: int, d: int, steps: list[ChordSlide]) -> DualHMarkedDiagram:
    """Slide every endpoint strictly between ``c`` and ``-d`` out of that
    stretch of the core; needs ``c < d < -c < -d`` along it."""
    while True:
        D = H.diagram
        sc, sd, scb, sdb = D.slot(c), D.slot(d), D.slot(-c), D.slot(-d)
        if not sc < sd < scb < sdb:
            raise ReductionError("chords are not interleaved as c d -c -d")
        if sd - 1 > sc:
            s = ChordSlide(sd - 1, sd)  # over d, out past -d
        elif scb + 1 < sdb:
            s = ChordSlide(scb + 1, scb)  # over -c, out before c
        elif sd + 1 < scb:
            s = ChordSlide(sd + 1, sd)  # over d, into the stretch after -c
        else:
            return H
        steps.append(s)
        H = dual_h_apply_slide(H, s)


def realize_reduction_by_slides(H: DualHMarkedDiagram, form: Sequence[Sequence[int]]) -> SlideReduction:
    """Run the reduction on the chords of a dual-marked dual diagram.

    Working order starts as the chords' preferred (left-to-right)
    orientations ordered by left endpoint.  Each round picks ``c`` and the
    first later chord ``x`` crossing it, orients ``d = +-x`` so that the
    pairing of ``c`` and ``d`` is -1, and clears the stretch between the
    leftmost of the four endpoints and the last one.  Renaming the pair so
    that the leftmost endpoint comes first leaves ``A`` and ``B`` unchanged.
    """
    D0 = H.diagram
    order = [x for x in D0.ends if D0.slot(x) < D0.slot(-x)]
    start = H.diagram
    steps: list[ChordSlide] = []
    flipped: list[int] = []
    pairs: list[tuple[int, int]] = []
    trace: list[list[tuple[int, ...]]] = []
    n = len(order)

    for k in range(n // 2):
        a = 2 * k
        c = order[a]
        i = next((i for i in range(a + 1, n) if crossing_pairing(H.diagram, c, order[i])), None)
        if i is None:
            raise ReductionError(f"chord {c} crosses no later chord")
        x = order[i]
        p = crossing_pairing(H.diagram, c, x)
        if abs(_dot(H.vector(c), H.vector(x), form)) != 1:
            raise ReductionError("dual labels do not pair like the chords cross")
        d = -x if p == 1 else x
        if p == -1:
            flipped.append(abs(x))
        order.insert(a + 1, order.pop(i))
        order[a + 1] = -d  # B is the label of -d
        pairs.append((c, d))
        # name the four endpoints so that the leftmost comes first
        Dg = H.diagram
        first = min((c, d, -c, -d), key=Dg.slot)
        cc, dd = {c: (c, d), d: (d, -c), -c: (-c, -d), -d: (-d, c)}[first]
        H = _clear_region(H, cc, dd, steps)
        trace.append([H.vector(y) for y in order])
    seq = SlideSequence(start, tuple(steps))
    return SlideReduction(seq, flipped, pairs, trace, H)


# -- matrix text ----------------------------------------------------------------------------


def format_matrix(rows: Sequence[Sequence[int]]) -> str:
    return "".join(" ".join(str(v) for v in r) + "\n" for r in rows)


def parse_matrix(text: str) -> list[list[int]]:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([int(t) for t in line.split()])
        except ValueError:
            raise ValueError(f"not an integer row: {line!r}") from None
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("rows have different lengths")
    return rows

"""The chord-slide groupoid: relation loops, triviality of loops, mapping
classes, pentagon case labels and homology-level markings.

Relations are written with slides named by signed endpoints rather than
slots, because chord identities survive a slide while slots do not.  A step
``((e1, e2, ...), a)`` slides the block of adjacent endpoints ``e1, e2, ...``
(nearest first) along the chord whose endpoint ``a`` they sit next to.  The
inverse of ``((e,), a)`` is ``((e,), -a)``: the moved endpoint now sits next
to the far end.

Two marked diagrams are equal when their endpoint labels agree slot by slot
(``MarkedDiagram.key``); chord numbering and orientation carry no data.
"""

from __future__ import annotations

import os
import random
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .chords import (
    ChordDiagram,
    ChordSlide,
    DiagramError,
    MarkedDiagram,
    SlideSequence,
    apply_slide,
    generator_chords,
    enumerate_bordered,
    format_diagram,
    slide_as_whitehead_pair,
    slide_diagram,
    slides_at,
    standard_marking,
)
from .correspondence import SlideRun, cs_functor
from .free_words import Endomorphism, compose_all, is_identity
from .markings import Pi1Marking, graph_standard_marking
from .surface_graph import Fatgraph
from .whitehead import MoveError, WhiteheadMove, adjacent, apply_whitehead, nielsen_lift

__all__ = [
    "SlideSequence",
    "RelationError",
    "RelationInstance",
    "KINDS",
    "DUAL_KIND",
    "resolve_steps",
    "relation_sites",
    "instantiate_relation",
    "all_instances",
    "verify_loop",
    "loop_rotations",
    "relation_kinds_of",
    "relation_matches",
    "commutator_conditions",
    "AuditRow",
    "audit_relations",
    "MappingClass",
    "mcg_element",
    "path_to",
    "random_mapping_class",
    "slide_lift",
    "sequence_lift",
    "whitehead_loop_image",
    "pentagon_case_label",
    "PENTAGON_TABLE",
    "pentagon_tags",
    "HMarkedDiagram",
    "h_quotient",
    "h_apply_slide",
]

KINDS = ("T", "I", "C", "L", "R", "O", "A", "Square")
# kind of the relation a loop becomes on the dual diagram
DUAL_KIND = {"T": "T", "I": "I", "C": "C", "L": "R", "R": "L", "O": "A", "A": "O", "Square": "Square"}

Step = tuple[tuple[int, ...], int]


class RelationError(ValueError):
    pass


# -- endpoint-named steps -------------------------------------------------------


def _resolve(C: ChordDiagram, step: Step) -> list[ChordSlide]:
    ends, a = step
    try:
        pos = C.slot(a)
        first = C.slot(ends[0])
    except ValueError:
        raise RelationError(f"endpoint missing from {format_diagram(C)}") from None
    side = first - pos
    if side not in (1, -1):
        raise RelationError(f"endpoint {ends[0]} is not next to {a}")
    slots = tuple(pos + side * (j + 1) for j in range(len(ends)))
    n = 2 * C.k
    if not all(1 <= x <= n for x in slots) or tuple(C.at(x) for x in slots) != tuple(ends):
        raise RelationError(f"endpoints {ends} are not a block next to {a}")
    if any(abs(e) == abs(a) for e in ends):
        raise RelationError("cannot slide a chord along itself")
    return list(SlideRun(pos, slots).sequence(C).steps)


def resolve_steps(C: ChordDiagram, steps: Iterable[Step]) -> SlideSequence:
    """Slot-level slide sequence for endpoint-named steps starting at ``C``."""
    out: list[ChordSlide] = []
    cur = C
    for st in steps:
        for s in _resolve(cur, st):
            out.append(s)
            cur = slide_diagram(cur, s)[0]
    return SlideSequence(C, tuple(out))


def _inverse_steps(steps: Sequence[Step]) -> list[Step]:
    # a block slid along a lands, in the same order, next to -a
    return [(ends, -a) for ends, a in reversed(steps)]


def _commutator(s1: Step, s2: Step) -> list[Step]:
    return [s1, s2] + _inverse_steps([s1]) + _inverse_steps([s2])


# -- relations ------------------------------------------------------------------


@dataclass(frozen=True)
class RelationInstance:
    kind: str
    site: tuple
    sequence: SlideSequence
    steps: tuple[Step, ...] = field(default=(), compare=False)

    @property
    def start(self) -> ChordDiagram:
        return self.sequence.start


def _expand(C: ChordDiagram, kind: str, site: tuple) -> list[Step]:
    at = C.at
    n = 2 * C.k

    def single(s) -> Step:
        i, j = s
        if not (1 <= i <= n and 1 <= j <= n) or abs(i - j) != 1 or abs(at(i)) == abs(at(j)):
            raise RelationError(f"{s} is not a slide on {format_diagram(C)}")
        return ((at(i),), at(j))

    if kind in ("T", "I"):
        (m, a) = single(site)
        x, y = m[0], a
        if kind == "I":
            return [((x,), y), ((x,), -y)]
        return [((x,), y), ((-y,), x), ((-x,), -y)]
    if kind in ("C", "O", "A"):
        if len(site) != 2:
            raise RelationError(f"{kind} needs two slides")
        s1, s2 = single(site[0]), single(site[1])
        (m1,), a1 = s1
        (m2,), a2 = s2
        ch = {abs(m1), abs(a1)}
        if kind == "C":
            ok = len(ch | {abs(m2), abs(a2)}) == 4
        elif kind == "O":
            ok = m2 == -m1
        else:
            ok = abs(a1) == abs(a2) and abs(m1) != abs(m2)
        if not ok:
            raise RelationError(f"slides {site} do not form a {kind} site")
        return _commutator(s1, s2)
    if kind in ("L", "R", "Square"):
        (i,) = site
        if not 1 <= i <= n - 2:
            raise RelationError(f"{kind} needs three consecutive slots starting at {i}")
        x, y, z = at(i), at(i + 1), at(i + 2)
        if len({abs(x), abs(y), abs(z)}) != 3:
            raise RelationError("the three endpoints need distinct chords")
        if kind == "Square":
            # the block x y slides along z, then each chord in turn carries the other two
            return [((y, x), z), ((x, -z), y), ((-z, -y), x), ((-y, -x), -z)]
        # one endpoint at a time, or the far one hops over the near one,
        # the near one slides, and the far one hops back over it
        if kind == "L":
            z0, z1, z2 = x, y, z
            one_by_one = [((z1,), z0), ((z2,), z0)]
            around = [((z2,), z1), ((z1,), z0), ((z2,), -z1)]
        else:
            z1, z2, z0 = x, y, z
            one_by_one = [((z2,), z0), ((z1,), z0)]
            around = [((z1,), z2), ((z2,), z0), ((z1,), -z2)]
        return one_by_one + _inverse_steps(around)
    raise RelationError(f"unknown relation kind {kind!r}")


def relation_sites(C: ChordDiagram, kind: str) -> list[tuple]:
    """Every site at which ``kind`` can be instantiated on ``C``."""
    n = 2 * C.k
    slides = [(i, j) for i in range(1, n + 1) for j in (i - 1, i + 1)
              if 1 <= j <= n and abs(C.at(i)) != abs(C.at(j))]
    if kind in ("T", "I"):
        return slides
    if kind in ("C", "O", "A"):
        out = []
        for s1 in slides:
            for s2 in slides:
                if s1[0] == s2[0]:
                    continue
                try:
                    seq = _expand(C, kind, (s1, s2))
                    resolve_steps(C, seq)
                except (RelationError, DiagramError):
                    continue
                out.append((s1, s2))
        return out
    if kind in ("L", "R", "Square"):
        return [(i,) for i in range(1, n - 1)
                if len({abs(C.at(i)), abs(C.at(i + 1)), abs(C.at(i + 2))}) == 3]
    raise RelationError(f"unknown relation kind {kind!r}")


def instantiate_relation(C: ChordDiagram, kind: str, site) -> RelationInstance:
    """Expand a relation at a site.

    Sites: ``T`` and ``I`` take a slide ``(moving, along)`` in slots; ``C``,
    ``O`` and ``A`` take two such slides, both valid on ``C``; ``L``, ``R`` and
    ``Square`` take the first of three consecutive slots.
    """
    site = tuple(tuple(s) if isinstance(s, (list, tuple)) else s for s in site)
    steps = _expand(C, kind, site)
    try:
        seq = resolve_steps(C, steps)
    except DiagramError as exc:
        raise RelationError(str(exc)) from None
    return RelationInstance(kind, site, seq, tuple(steps))


def all_instances(C: ChordDiagram, kinds: Iterable[str] = KINDS) -> list[RelationInstance]:
    return [instantiate_relation(C, k, s) for k in kinds for s in relation_sites(C, k)]


def loop_rotations(seq: SlideSequence) -> Iterable[tuple[ChordDiagram, tuple[ChordSlide, ...]]]:
    """Every cyclic rotation of a loop and of its inverse, with the diagram
    it starts from."""
    for q in (seq, seq.inverse()):
        Ds, st = q.diagrams(), q.steps
        for r in range(len(st)):
            yield Ds[r], st[r:] + st[:r]


@lru_cache(maxsize=4096)
def _instance_steps(D: ChordDiagram, kind: str) -> dict:
    # slide steps of every instance on D, mapped to their sites
    out: dict = {}
    for site in relation_sites(D, kind):
        out.setdefault(instantiate_relation(D, kind, site).sequence.steps, []).append(site)
    return out


def relation_kinds_of(seq: SlideSequence, kinds: Iterable[str] = KINDS) -> set[str]:
    """Kinds having an instance that is a rotation of ``seq`` or of its inverse."""
    rots = list(loop_rotations(seq))
    return {k for k in kinds if any(st in _instance_steps(D, k) for D, st in rots)}


def relation_matches(seq: SlideSequence, kinds: Iterable[str] = KINDS) -> list[tuple[str, ChordDiagram, tuple]]:
    """Every ``(kind, diagram, site)`` whose instance is a rotation of ``seq``
    or of its inverse."""
    rots = list(loop_rotations(seq))
    out = []
    for k in kinds:
        for D, st in rots:
            for site in _instance_steps(D, k).get(st, ()):
                out.append((k, D, site))
    return out


def commutator_conditions(C: ChordDiagram, site: tuple) -> set[str]:
    """Which of the defining conditions of ``C``, ``O`` and ``A`` a pair of
    slides meets.  They overlap: two opposite ends of one chord slid along
    one chord meet both the ``O`` and the ``A`` condition, and such sites
    are listed under ``O`` only."""
    (i1, j1), (i2, j2) = site
    m1, a1, m2, a2 = C.at(i1), C.at(j1), C.at(i2), C.at(j2)
    out = set()
    if len({abs(m1), abs(a1), abs(m2), abs(a2)}) == 4:
        out.add("C")
    if m2 == -m1:
        out.add("O")
    if abs(a1) == abs(a2):
        out.add("A")
    return out


def verify_loop(M: MarkedDiagram, seq: SlideSequence) -> bool:
    """Does ``seq`` carry ``M`` back to itself?"""
    if seq.start != M.diagram:
        raise DiagramError("sequence does not start at the marked diagram")
    cur = M
    for s in seq.steps:
        cur = apply_slide(cur, s)
    return cur.key() == M.key()


# -- audit ------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditRow:
    diagram: str
    kind: str
    site: tuple
    verified: bool

    def to_json(self) -> dict:
        return {"diagram": self.diagram, "kind": self.kind, "site": self.site, "verified": self.verified}


def _audit_one(args) -> list[AuditRow]:
    C, kinds = args
    M = standard_marking(C)
    rows = []
    for k in kinds:
        for site in relation_sites(C, k):
            inst = instantiate_relation(C, k, site)
            rows.append(AuditRow(format_diagram(C), k, site, verify_loop(M, inst.sequence)))
    return rows


def audit_relations(genus: int, kinds: Sequence[str] = KINDS, workers: int | None = None) -> list[AuditRow]:
    """Instantiate ``kinds`` at every site of every bordered diagram of
    ``genus`` and verify each loop.  ``workers`` defaults to the
    ``CHORDMCG_WORKERS`` environment variable (1 when unset)."""
    for k in kinds:
        if k not in KINDS:
            raise RelationError(f"unknown relation kind {k!r}")
    if workers is None:
        workers = int(os.environ.get("CHORDMCG_WORKERS", "1"))
    jobs = [(C, tuple(kinds)) for C in enumerate_bordered(genus)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_audit_one, jobs))
    else:
        parts = [_audit_one(j) for j in jobs]
    return [r for p in parts for r in p]


# -- Nielsen lifts of slides ------------------------------------------------------


def slide_lift(C: ChordDiagram, s: ChordSlide) -> Endomorphism:
    """Composite Nielsen lift of the Whitehead moves realizing ``s``."""
    moves = slide_as_whitehead_pair(C, s)
    return compose_all([nielsen_lift(W) for W in moves], C.k)


def sequence_lift(seq: SlideSequence) -> Endomorphism:
    """Lift of a slide word: sends ``g_i`` to the start's expression of the
    i-th generator of the end diagram."""
    Cs = seq.diagrams()
    return compose_all([slide_lift(C, s) for C, s in zip(Cs, seq.steps)], seq.start.k)


def whitehead_loop_image(G: Fatgraph, moves: Sequence[WhiteheadMove],
                         m: Pi1Marking | None = None) -> tuple[MarkedDiagram, SlideSequence]:
    """Concatenated slide images of consecutive Whitehead moves starting at
    ``G``; returns the reduced start and the slide word."""
    if m is None:
        m = graph_standard_marking(G)
    start = None
    steps: list[ChordSlide] = []
    for W in moves:
        _, seq, M = cs_functor(W, m)
        if start is None:
            start = M
        steps.extend(seq.steps)
        _, m = apply_whitehead(W.source, m, W.edge)
    if start is None:
        raise MoveError("no moves")
    return start, SlideSequence(start.diagram, tuple(steps))


# -- mapping classes -----------------------------------------------------------------


@dataclass(frozen=True)
class MappingClass:
    """A slide word on ``start`` ending at a diagram isomorphic to ``start``.

    Slots are preserved by isomorphisms of linear chord diagrams, so the
    word's slots can be replayed from the end diagram.
    """

    start: ChordDiagram
    sequence: SlideSequence

    def __post_init__(self):
        if self.sequence.start.unoriented() != self.start.unoriented():
            raise DiagramError("sequence starts elsewhere")
        if self.sequence.end.unoriented() != self.start.unoriented():
            raise DiagramError("sequence does not return to an isomorphic diagram")

    @property
    def genus(self) -> int:
        return self.start.k // 2

    def compose(self, other: "MappingClass") -> "MappingClass":
        """``self`` followed by ``other``."""
        if other.start.unoriented() != self.start.unoriented():
            raise DiagramError("elements live on different diagrams")
        tail = SlideSequence(self.sequence.end, other.sequence.steps)
        return MappingClass(self.start, self.sequence.then(tail))

    def invert(self) -> "MappingClass":
        back = self.sequence.inverse()
        return MappingClass(self.start, SlideSequence(self.start, back.steps))

    def transported(self) -> MarkedDiagram:
        M = standard_marking(self.start)
        return self.sequence.apply(M)[-1]

    def is_identity(self) -> bool:
        end = self.transported()
        return end.key() == standard_marking(end.diagram).key()

    def nielsen_image(self) -> Endomorphism:
        if not self.sequence.steps:
            return Endomorphism.identity(self.start.k)
        return sequence_lift(self.sequence)

    def automorphism(self) -> Endomorphism:
        """Generator images read off the transported marking."""
        end = self.transported()
        return Endomorphism(tuple(end.label(x) for x in generator_chords(end.diagram)))


def mcg_element(C: ChordDiagram, seq: SlideSequence | Sequence[ChordSlide] = ()) -> MappingClass:
    if not isinstance(seq, SlideSequence):
        seq = SlideSequence(C, tuple(seq))
    return MappingClass(C, seq)


def path_to(C: ChordDiagram, target: ChordDiagram) -> SlideSequence:
    """Shortest slide word from ``C`` to a diagram isomorphic to ``target``,
    by breadth-first search over unmarked diagrams."""
    goal = target.unoriented()
    start = C.unoriented()
    prev: dict[ChordDiagram, tuple[ChordDiagram, ChordSlide] | None] = {start: None}
    frontier = deque([start])
    while frontier:
        D = frontier.popleft()
        if D == goal:
            steps = []
            while prev[D] is not None:
                D, s = prev[D]  # type: ignore[misc]
                steps.append(s)
            return SlideSequence(C, tuple(reversed(steps)))
        for s in slides_at(D):
            E = slide_diagram(D, s)[0].unoriented()
            if E not in prev:
                prev[E] = (D, s)
                frontier.append(E)
    raise DiagramError("no slide path between the diagrams")


def random_mapping_class(C: ChordDiagram, rng: random.Random, length: int = 6) -> MappingClass:
    """A random slide walk closed up by a shortest path back to ``C``."""
    steps: list[ChordSlide] = []
    cur = C
    for _ in range(length):
        s = rng.choice(list(slides_at(cur)))
        steps.append(s)
        cur = slide_diagram(cur, s)[0]
    back = path_to(cur, C)
    return MappingClass(C, SlideSequence(C, tuple(steps) + back.steps))


# -- pentagon cases --------------------------------------------------------------------


PENTAGON_TABLE: dict[str, frozenset[str]] = {
    label: frozenset(tags.split(","))
    for label, tags in [
        ("13245", "I"), ("14235", "I"), ("15234", "I"),
        ("13254", "I"), ("14253", "T,I"), ("15243", "T,I"),
        ("13425", "A"), ("14325", "T,A"), ("15324", "T,A"),
        ("13452", "I"), ("14352", "R"), ("15342", "R"),
        ("13524", "A"), ("14523", "A"), ("15423", "A"),
        ("13542", "I"), ("14532", "L"), ("15432", "L"),
    ]
}


def _merge(G: Fatgraph, ring: list[int], x: int) -> list[int]:
    # replace the dart x by the rest of the rotation at the far end of x
    s = G.sigma
    rest = []
    y = s[x ^ 1]
    while y != x ^ 1:
        rest.append(y)
        y = s[y]
    i = ring.index(x)
    return ring[:i] + rest + ring[i + 1:]


def pentagon_case_label(G: Fatgraph, e: int, f: int) -> str:
    """Visiting order of the five corners around adjacent ``e`` and ``f``.

    Corners are read in rotation order at the vertex obtained by collapsing
    both edges, starting from the first one visited.  Read this way, a label
    starting ``12`` has at least three moves of type 1 or 2 in its pentagon.
    """
    tail = G.tail >> 1
    if tail in (e, f):
        raise MoveError("cannot use the tail edge")
    ends = {G.vertex_of[2 * e], G.vertex_of[2 * e + 1], G.vertex_of[2 * f], G.vertex_of[2 * f + 1]}
    if not adjacent(G, e, f) or len(ends) != 3:
        raise MoveError("edges must share exactly one vertex")
    for d in (2 * e, 2 * e + 1, 2 * f, 2 * f + 1):
        if G.valence(d) != 3:
            raise MoveError("edges must join trivalent vertices")
    h = 2 * e
    ring = _merge(G, list(G.vertex_cycles[G.vertex_of[h]]), h)
    fd = 2 * f if 2 * f in ring else 2 * f + 1
    ring = _merge(G, ring, fd)
    r = G.order.rank
    seen = [r[x] for x in ring]
    ranks = sorted(seen)
    lab = [ranks.index(v) + 1 for v in seen]
    i = lab.index(1)
    return "".join(map(str, lab[i:] + lab[:i]))


def pentagon_tags(label: str) -> frozenset[str]:
    if label.startswith("12"):
        return frozenset({"I"})
    try:
        return PENTAGON_TABLE[label]
    except KeyError:
        raise MoveError(f"{label} is not a pentagon case") from None


# -- homology level ---------------------------------------------------------------------


@dataclass(frozen=True)
class HMarkedDiagram:
    diagram: ChordDiagram
    vectors: tuple[tuple[int, ...], ...]

    def endpoint_vector(self, slot: int) -> tuple[int, ...]:
        c = self.diagram.at(slot)
        v = self.vectors[abs(c) - 1]
        return v if c > 0 else tuple(-x for x in v)

    def key(self) -> tuple:
        return tuple(self.endpoint_vector(s) for s in range(1, 2 * self.diagram.k + 1))


def h_quotient(M: MarkedDiagram) -> HMarkedDiagram:
    return HMarkedDiagram(M.diagram, M.abelian())


def h_apply_slide(H: HMarkedDiagram, s: ChordSlide) -> HMarkedDiagram:
    """The along endpoint's vector becomes the sum of the two adjacent
    endpoint vectors."""
    C = H.diagram
    C2, _ = slide_diagram(C, s)
    u, v = H.endpoint_vector(s.moving), H.endpoint_vector(s.along)
    w = tuple(a + b for a, b in zip(u, v))
    a = C.at(s.along)
    vecs = list(H.vectors)
    vecs[abs(a) - 1] = w if a > 0 else tuple(-x for x in w)
    return HMarkedDiagram(C2, tuple(vecs))

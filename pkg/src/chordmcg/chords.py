"""Linear chord diagrams, chord slides and their markings.

Slots along the core are numbered ``1..2k`` from the left; the tail sits to
the left of slot 1.  Chords are drawn above the core.  An endpoint is named
by the oriented chord pointing away from it, so the endpoint labels of a
marked diagram multiply, left to right, to the boundary word.
"""

from __future__ import annotations

import itertools
import json
import random
import re
import string
from dataclasses import dataclass
from typing import Iterator, Sequence

from .free_words import Word, product
from .markings import Pi1Marking, extend_from_generators
from .surface_graph import BorderedError, Fatgraph, greedy_tree

__all__ = [
    "DiagramError",
    "ChordDiagram",
    "MarkedDiagram",
    "ChordSlide",
    "SlideSequence",
    "SlideClass",
    "parse_diagram",
    "format_diagram",
    "chord_name",
    "diagram_to_json",
    "diagram_from_json",
    "realize_fatgraph",
    "chord_edge",
    "endpoint_dart",
    "endpoint_ranks",
    "standard_marking",
    "generator_chords",
    "marked_from_generator_labels",
    "boundary_word",
    "slide_diagram",
    "apply_slide",
    "inverse_slide",
    "slides_at",
    "SLIDE_SHAPES",
    "classify_slide",
    "slide_as_whitehead_pair",
    "enumerate_bordered",
    "random_bordered",
    "MAX_ENUMERATION_GENUS",
]

MAX_ENUMERATION_GENUS = 3


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class ChordDiagram:
    """Chord endpoints along the core, left to right.

    ``ends[i] = +c`` marks the endpoint the oriented chord ``c`` points away
    from, ``-c`` its other endpoint.  Chords are numbered ``1..k``.
    """

    ends: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ends", tuple(self.ends))
        k = len(self.ends) // 2
        if len(self.ends) % 2 or sorted(self.ends) != sorted(list(range(1, k + 1)) + list(range(-k, 0))):
            raise DiagramError(f"every chord needs exactly one source and one target end: {self.ends}")

    @property
    def k(self) -> int:
        return len(self.ends) // 2

    def slot(self, end: int) -> int:
        """1-based slot of a signed endpoint."""
        return self.ends.index(end) + 1

    def at(self, slot: int) -> int:
        return self.ends[slot - 1]

    def partner(self, slot: int) -> int:
        return self.slot(-self.at(slot))

    @property
    def genus(self) -> int:
        return realize_fatgraph(self).genus

    def is_bordered(self) -> bool:
        try:
            self.genus
        except BorderedError:
            return False
        return True

    def unoriented(self) -> "ChordDiagram":
        """Flags dropped: every chord points away from its left end, chords
        renumbered by first appearance."""
        names: dict[int, int] = {}
        out = []
        for x in self.ends:
            c = abs(x)
            if c not in names:
                names[c] = len(names) + 1
                out.append(names[c])
            else:
                out.append(-names[c])
        return ChordDiagram(tuple(out))

    def __str__(self) -> str:
        return format_diagram(self)


# -- literals -------------------------------------------------------------------


def chord_name(c: int) -> str:
    return string.ascii_lowercase[c - 1] if c <= 26 else f"c{c}"


_NAME = re.compile(r"~?[A-Za-z_][A-Za-z0-9_]*")


def parse_diagram(text: str) -> ChordDiagram:
    """Parse ``[a b ~a ~b]``: a bare name is the endpoint the chord points
    away from, ``~name`` its other end.  Chords are numbered in order of first
    appearance."""
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise DiagramError(f"diagram literal must be bracketed: {text!r}")
    toks = text[1:-1].replace(",", " ").split()
    ids: dict[str, int] = {}
    ends = []
    for tok in toks:
        if not _NAME.fullmatch(tok):
            raise DiagramError(f"bad endpoint token {tok!r}")
        name = tok.lstrip("~")
        if name not in ids:
            ids[name] = len(ids) + 1
        ends.append(-ids[name] if tok.startswith("~") else ids[name])
    return ChordDiagram(tuple(ends))


def format_diagram(C: ChordDiagram, names: Sequence[str] | None = None) -> str:
    def nm(c):
        return names[c - 1] if names else chord_name(c)
    return "[" + " ".join(nm(x) if x > 0 else "~" + nm(-x) for x in C.ends) + "]"


def diagram_to_json(C: ChordDiagram) -> dict:
    return {"literal": format_diagram(C), "ends": list(C.ends)}


def diagram_from_json(data: dict | str) -> ChordDiagram:
    if isinstance(data, str):
        data = json.loads(data)
    if "ends" in data:
        return ChordDiagram(tuple(data["ends"]))
    if "literal" in data:
        return parse_diagram(data["literal"])
    raise DiagramError("diagram JSON needs 'ends' or 'literal'")


# -- fatgraph realization ---------------------------------------------------------


def chord_edge(C: ChordDiagram, c: int, trivalent: bool = True) -> int:
    """Edge id of chord ``c``; its even dart points away from the source end."""
    return (2 * C.k - 2 if trivalent else 2 * C.k - 1) + c


def realize_fatgraph(C: ChordDiagram, trivalent: bool = False) -> Fatgraph:
    """Fatgraph of the diagram with chords drawn above the core.

    Edge 0 is the tail, edges ``1..`` are core segments (segment ``i`` joins
    slots ``i`` and ``i+1``), then chords.  With ``trivalent`` the rightmost
    core point is smoothed away so the last core segment and the chord at
    slot ``2k`` form one edge; otherwise that point is a bivalent vertex.
    """
    k = C.k
    n = 2 * k
    if k == 0:
        raise DiagramError("a chord diagram needs at least one chord")
    nseg = n - 2 if trivalent else n - 1
    cycles = [[1]]

    def into_slot(i: int) -> int:
        c = C.ends[i - 1]
        return 2 * chord_edge(C, abs(c), trivalent) + (1 if c > 0 else 0)

    def left_in(i: int) -> int:
        return 0 if i == 1 else 2 * (i - 1)

    last = n - 1 if trivalent else n
    for i in range(1, last):
        right = 2 * i + 1 if i <= nseg else None
        if trivalent and i == n - 1:
            right = into_slot(n)
        cycles.append([right, into_slot(i), left_in(i)])
    if trivalent:
        cycles.append([into_slot(n), into_slot(n - 1), left_in(n - 1)])
    else:
        cycles.append([into_slot(n), left_in(n)])
    if trivalent and k == 1:
        raise DiagramError("a one-chord diagram has no trivalent realization")
    return Fatgraph.from_vertex_cycles(cycles, 0, chord_diagram=not trivalent)


def endpoint_dart(C: ChordDiagram, slot: int, trivalent: bool = True) -> int:
    """Dart of the chord at ``slot`` pointing away from that endpoint."""
    c = C.at(slot)
    return 2 * chord_edge(C, abs(c), trivalent) + (0 if c > 0 else 1)


def endpoint_ranks(C: ChordDiagram) -> dict[int, int]:
    """Boundary-order rank of each endpoint (keyed by slot), i.e. of the
    oriented chord pointing away from it."""
    G = realize_fatgraph(C)
    r = G.order.rank
    return {s: r[endpoint_dart(C, s, trivalent=False)] for s in range(1, 2 * C.k + 1)}


# -- marked diagrams ------------------------------------------------------------


@dataclass(frozen=True)
class MarkedDiagram:
    """A diagram with the label of every chord, oriented as in ``diagram``."""

    diagram: ChordDiagram
    labels: tuple[Word, ...]

    @property
    def genus(self) -> int:
        return self.diagram.k // 2

    def endpoint_label(self, slot: int) -> Word:
        c = self.diagram.at(slot)
        w = self.labels[abs(c) - 1]
        return w if c > 0 else w.inverse()

    def endpoint_labels(self) -> list[Word]:
        return [self.endpoint_label(s) for s in range(1, 2 * self.diagram.k + 1)]

    def label(self, chord: int) -> Word:
        """Label of a signed oriented chord."""
        w = self.labels[abs(chord) - 1]
        return w if chord > 0 else w.inverse()

    def key(self) -> tuple:
        """Complete invariant of the marked diagram up to renaming and
        reorienting chords."""
        return tuple(w.letters for w in self.endpoint_labels())

    def fatgraph(self) -> Fatgraph:
        return realize_fatgraph(self.diagram, trivalent=True)

    def pi1(self) -> Pi1Marking:
        """The full dart labeling of the trivalent realization."""
        G = self.fatgraph()
        base = chord_edge(self.diagram, 0)
        gens = []
        for d in greedy_tree(G).generators:
            c = (d >> 1) - base
            w = self.labels[c - 1]
            gens.append(w if d % 2 == 0 else w.inverse())
        return extend_from_generators(G, gens)

    def with_labels(self, changes: dict[int, Word]) -> "MarkedDiagram":
        labels = list(self.labels)
        for c, w in changes.items():
            labels[c - 1] = w
        return MarkedDiagram(self.diagram, tuple(labels))

    def abelian(self) -> tuple[tuple[int, ...], ...]:
        return tuple(w.exponent_sums(self.diagram.k) for w in self.labels)


def generator_chords(C: ChordDiagram) -> list[int]:
    """Signed chords in generator order: the preferred orientation of every
    chord, sorted by the boundary order."""
    G = realize_fatgraph(C, trivalent=True)
    base = chord_edge(C, 0)
    return [((d >> 1) - base) * (1 if d % 2 == 0 else -1) for d in greedy_tree(G).generators]


def standard_marking(C: ChordDiagram) -> MarkedDiagram:
    """The i-th generator (preferred orientation of a chord) gets ``g_i``."""
    if not C.is_bordered():
        raise BorderedError(f"{format_diagram(C)} is not bordered")
    labels: list[Word] = [Word()] * C.k
    for i, x in enumerate(generator_chords(C), 1):
        labels[abs(x) - 1] = Word.gen(i) if x > 0 else Word.gen(-i)
    return MarkedDiagram(C, tuple(labels))


def boundary_word(M: MarkedDiagram) -> Word:
    """Product of the endpoint labels from left to right."""
    return product(M.endpoint_labels())


def marked_from_generator_labels(C: ChordDiagram, gen_labels: Sequence[Word]) -> MarkedDiagram:
    labels: list[Word] = [Word()] * C.k
    for x, w in zip(generator_chords(C), gen_labels):
        labels[abs(x) - 1] = w if x > 0 else w.inverse()
    return MarkedDiagram(C, tuple(labels))


# -- slides ---------------------------------------------------------------------


@dataclass(frozen=True)
class ChordSlide:
    """Slide the endpoint at slot ``moving`` along the chord whose endpoint
    sits at the adjacent slot ``along``."""

    moving: int
    along: int


def _check_slide(C: ChordDiagram, s: ChordSlide) -> None:
    n = 2 * C.k
    if not (1 <= s.moving <= n and 1 <= s.along <= n):
        raise DiagramError(f"slot out of range in {s}")
    if abs(s.moving - s.along) != 1:
        raise DiagramError(f"endpoints at slots {s.moving} and {s.along} are not adjacent")
    if abs(C.at(s.moving)) == abs(C.at(s.along)):
        raise DiagramError("cannot slide a chord along itself")


def slide_diagram(C: ChordDiagram, s: ChordSlide) -> tuple[ChordDiagram, int]:
    """The diagram after the slide and the new slot of the moved endpoint.

    The endpoint travels over the chord and lands next to its far end, on
    the side facing away from where it started: a left neighbour lands just
    right of the far end, a right neighbour just left of it.
    """
    _check_slide(C, s)
    ends = list(C.ends)
    x = ends[s.moving - 1]
    far = C.partner(s.along)
    ends.pop(s.moving - 1)
    j = far - 2 if far > s.moving else far - 1  # 0-based far end after the pop
    ins = j + 1 if s.moving < s.along else j
    ends.insert(ins, x)
    return ChordDiagram(tuple(ends)), ins + 1


def apply_slide(M: MarkedDiagram, s: ChordSlide) -> MarkedDiagram:
    """Slide with marking transport: the chord slid along is relabeled so
    that its endpoint label at ``along`` becomes the product of the two
    adjacent endpoint labels, left to right.  The moving chord keeps its
    label."""
    C = M.diagram
    C2, _ = slide_diagram(C, s)
    lo, hi = sorted((s.moving, s.along))
    w = M.endpoint_label(lo) * M.endpoint_label(hi)
    a = C.at(s.along)
    new = w if a > 0 else w.inverse()
    return MarkedDiagram(C2, M.labels).with_labels({abs(a): new})


def inverse_slide(C: ChordDiagram, s: ChordSlide) -> ChordSlide:
    C2, pos = slide_diagram(C, s)
    along = C2.slot(-C.at(s.along))
    return ChordSlide(pos, along)


@dataclass(frozen=True)
class SlideSequence:
    """A word in chord slides starting at ``start``; each step's slots refer
    to the diagram reached by the previous steps."""

    start: ChordDiagram
    steps: tuple[ChordSlide, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        self.diagrams()  # every step must be valid where it is applied

    def __len__(self) -> int:
        return len(self.steps)

    def diagrams(self) -> list[ChordDiagram]:
        out = [self.start]
        for s in self.steps:
            out.append(slide_diagram(out[-1], s)[0])
        return out

    @property
    def end(self) -> ChordDiagram:
        return self.diagrams()[-1]

    def apply(self, M: "MarkedDiagram") -> list["MarkedDiagram"]:
        """Marked diagrams visited, starting with ``M``."""
        if M.diagram != self.start:
            raise DiagramError("marking is on a different diagram")
        out = [M]
        for s in self.steps:
            out.append(apply_slide(out[-1], s))
        return out

    def then(self, other: "SlideSequence") -> "SlideSequence":
        if other.start != self.end:
            raise DiagramError("slide sequences are not composable")
        return SlideSequence(self.start, self.steps + other.steps)

    def inverse(self) -> "SlideSequence":
        Cs = self.diagrams()
        back = [inverse_slide(C, s) for C, s in zip(Cs, self.steps)]
        return SlideSequence(Cs[-1], tuple(reversed(back)))


def slides_at(C: ChordDiagram) -> Iterator[ChordSlide]:
    """Every valid slide, in slot order."""
    for i in range(1, 2 * C.k):
        if abs(C.at(i)) != abs(C.at(i + 1)):
            yield ChordSlide(i, i + 1)
            yield ChordSlide(i + 1, i)


# -- classification -------------------------------------------------------------

SLIDE_SHAPES = ("cd", "Cd", "dc", "Dc", "cD", "dC")


@dataclass(frozen=True)
class SlideClass:
    type: int
    shape: str
    # generator order after the slide, as indices into the old order (the new
    # generator sits where the old index of the removed one appears)
    order: tuple[int, ...]

    @property
    def permuted(self) -> bool:
        return list(self.order) != sorted(self.order)


def classify_slide(C: ChordDiagram, s: ChordSlide) -> SlideClass:
    """Type ``1..6`` of a slide by the shape of the new generator in terms
    of the moving chord ``c`` and the chord ``d`` slid along, both in their
    preferred orientations (upper case = inverse)."""
    M = standard_marking(C)
    c, d = abs(C.at(s.moving)), abs(C.at(s.along))
    M2 = apply_slide(M, s)
    old = generator_chords(C)
    new = generator_chords(M2.diagram)
    gi = {abs(x): i for i, x in enumerate(old, 1)}
    sym = {gi[c]: "c", -gi[c]: "C", gi[d]: "d", -gi[d]: "D"}
    dprime = next(x for x in new if abs(x) == d)
    word = M2.label(dprime)
    shape = "".join(sym.get(x, "?") for x in word.letters)
    if shape not in SLIDE_SHAPES:
        raise DiagramError(f"unexpected new generator {word} for slide {s}")
    order = tuple(gi[abs(x)] for x in new)
    return SlideClass(SLIDE_SHAPES.index(shape) + 1, shape, order)


def slide_as_whitehead_pair(C: ChordDiagram, s: ChordSlide):
    """Whitehead moves on the trivalent realization giving the slide: first
    the core edge between the two endpoints, then the chord slid along.

    The trivalent realization merges the last core segment into the chord
    at slot ``2k``, and one of the two moves is then absorbed: a slide at
    slot ``2k`` is the single move on the chord slid along, and a slide
    along a chord whose far end is at slot ``2k`` is the single move on the
    core edge.
    """
    from .whitehead import make_move

    _check_slide(C, s)
    G = realize_fatgraph(C, trivalent=True)
    lo = min(s.moving, s.along)
    n = 2 * C.k
    along_edge = chord_edge(C, abs(C.at(s.along)))
    if lo == n - 1:
        return [make_move(G, along_edge)]
    W1 = make_move(G, lo)
    if C.partner(s.along) == n:
        return [W1]
    return [W1, make_move(W1.target, along_edge)]


# -- enumeration ----------------------------------------------------------------


def _pairings(points: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not points:
        yield []
        return
    a = points[0]
    for j in range(1, len(points)):
        b = points[j]
        rest = points[1:j] + points[j + 1:]
        for p in _pairings(rest):
            yield [(a, b)] + p


def _from_pairing(pairs: list[tuple[int, int]], n: int) -> ChordDiagram:
    ends = [0] * n
    for c, (i, j) in enumerate(sorted(pairs), 1):
        ends[i], ends[j] = c, -c
    return ChordDiagram(tuple(ends))


def enumerate_bordered(g: int, bound: int = MAX_ENUMERATION_GENUS) -> list[ChordDiagram]:
    """All bordered diagrams with ``2g`` chords, each chord pointing away from
    its left end and chords numbered left to right."""
    if g < 1:
        raise DiagramError("genus must be at least 1")
    if g > bound:
        raise DiagramError(f"enumeration is limited to genus {bound}")
    n = 4 * g
    out = []
    seen = set()
    for pairs in _pairings(list(range(n))):
        C = _from_pairing(pairs, n)
        if C.ends in seen:
            continue
        seen.add(C.ends)
        if C.is_bordered():
            out.append(C)
    return out


def random_bordered(g: int, rng: random.Random) -> ChordDiagram:
    """Uniform bordered diagram of genus ``g`` by rejection sampling."""
    n = 4 * g
    while True:
        pts = list(range(n))
        rng.shuffle(pts)
        pairs = [tuple(sorted(pts[i:i + 2])) for i in range(0, n, 2)]
        C = _from_pairing(pairs, n)
        if C.is_bordered():
            return C

"""Passing between marked fatgraphs and marked chord diagrams.

Branch reduction flattens the greedy tree onto the core with moves that do
not change the generators; every Whitehead move then becomes a run of chord
slides along a single chord.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .chords import (
    ChordDiagram,
    ChordSlide,
    DiagramError,
    MarkedDiagram,
    SlideSequence,
    endpoint_dart,
    endpoint_ranks,
    format_diagram,
    parse_diagram,
    random_bordered,
    realize_fatgraph,
    slide_diagram,
)
from .markings import Pi1Marking, graph_standard_marking
from .surface_graph import Fatgraph, canonical_form, canonical_key, greedy_tree
from .whitehead import MoveError, WhiteheadMove, apply_whitehead, make_move, whitehead_graph

__all__ = [
    "Reduction",
    "branch_reduce",
    "read_chord_diagram",
    "trunks",
    "Growth",
    "growable",
    "grow_tree",
    "leaves",
    "SlideRun",
    "cs_functor",
    "single_move_realizable",
    "stated_rank_condition",
    "random_trivalent",
    "format_slide_log",
    "parse_slide_log",
    "LogFormatError",
]


class LogFormatError(ValueError):
    """A slide log line that cannot be read."""


@dataclass(frozen=True)
class Reduction:
    diagram: MarkedDiagram
    log: tuple[WhiteheadMove, ...]
    graph: Fatgraph  # the flattened graph, a trivalent chord-diagram realization
    marking: Pi1Marking


def _spine(G: Fatgraph) -> set[int]:
    """Vertices touched by the tree prefix that precedes every generator."""
    gs = greedy_tree(G)
    verts = {G.vertex_of[G.tail ^ 1]}
    for d in gs.prefix:
        verts.add(G.vertex_of[d])
        verts.add(G.vertex_of[d ^ 1])
    return verts


def trunks(G: Fatgraph) -> list[int]:
    """Tree edges hanging off the prefix, in boundary order."""
    gs = greedy_tree(G)
    on = {d >> 1 for d in gs.prefix}
    verts = _spine(G)
    out = []
    for d in G.order.sequence:
        e = d >> 1
        if e in gs.tree and e not in on and e != G.tail >> 1 and d == G.preferred(e):
            if G.vertex_of[d ^ 1] in verts:
                out.append(e)
    return out


def read_chord_diagram(G: Fatgraph, m: Pi1Marking | None = None) -> MarkedDiagram | ChordDiagram:
    """Read a flattened graph as a chord diagram.

    Chords are numbered by the generator order and point along their
    preferred orientation; with a marking each chord carries the label of
    that oriented edge.
    """
    gs = greedy_tree(G)
    if len(gs.prefix) != len(gs.tree):
        raise MoveError("the greedy tree is not a path from the tail")
    num = {d: i for i, d in enumerate(gs.generators, 1)}
    for d in gs.generators:
        num[d ^ 1] = -num[d]
    s = G.sigma
    ends = []
    p = G.tail
    while True:
        q = s[p]
        if (q >> 1) not in gs.tree:
            # last vertex: two chord ends, the one next to the core first
            ends.append(num[s[q] ^ 1])
            ends.append(num[q ^ 1])
            break
        x = s[q]
        ends.append(num[x ^ 1])
        p = q ^ 1
    C = ChordDiagram(tuple(ends))
    if m is None:
        return C
    return MarkedDiagram(C, tuple(m.labels[d] for d in gs.generators))


def branch_reduce(G: Fatgraph, m: Pi1Marking, max_moves: int | None = None) -> Reduction:
    """Move on the leftmost trunk until the greedy tree is the core."""
    if m is None:
        raise ValueError("branch reduction needs a marking")
    log: list[WhiteheadMove] = []
    limit = max_moves if max_moves is not None else 4 * G.num_edges ** 2
    while True:
        ts = trunks(G)
        if not ts:
            break
        before = len(greedy_tree(G).prefix)
        W = make_move(G, ts[0])
        if W.type not in (1, 2):
            raise MoveError(f"trunk move of type {W.type}")
        G2, m = apply_whitehead(G, m, ts[0])
        if len(greedy_tree(G2).prefix) <= before:
            raise MoveError("trunk move did not lengthen the prefix")
        log.append(W)
        G = G2
        if len(log) > limit:
            raise MoveError("branch reduction did not terminate")
    return Reduction(read_chord_diagram(G, m), tuple(log), G, m)


def leaves(G: Fatgraph, e: int) -> list[int]:
    """Leaves of the subtree ``T(e)`` entered by the tree dart ``e``, oriented
    away from it and listed clockwise.  The label of ``e`` in any marking is
    their product in this order."""
    tree = greedy_tree(G).tree
    s = G.sigma
    inv = [0] * G.num_darts
    for d, x in enumerate(s):
        inv[x] = d
    out: list[int] = []

    def visit(p: int) -> None:
        y = inv[p]
        while y != p:
            if (y >> 1) in tree:
                visit(y ^ 1)
            else:
                out.append(y ^ 1)
            y = inv[y]

    visit(e)
    return out


# -- growing planted trees ------------------------------------------------------


@dataclass(frozen=True)
class Growth:
    graph: Fatgraph
    log: tuple[WhiteheadMove, ...]
    trunk: int  # dart entering the grown subtree


def growable(C: ChordDiagram, first: int, last: int) -> bool:
    """Can the endpoints at slots ``first..last`` be gathered into one
    planted subtree by moves that fix the generators?

    The last endpoint of the run must come before every other endpoint of
    the run and before the far end of every chord leaving the run.
    """
    r = endpoint_ranks(C)
    run = range(first, last + 1)
    xk = r[last]
    if any(r[i] < xk for i in run if i != last):
        return False
    return all(xk < r[C.partner(i)] for i in run if not first <= C.partner(i) <= last)


def _isomorphism(G: Fatgraph, H: Fatgraph) -> list[int]:
    """Dart map from ``G`` onto an isomorphic ``H``."""
    rg, _ = canonical_form(G)
    rh, Hc = canonical_form(H)
    back = [0] * H.num_darts
    for d, x in enumerate(rh):
        back[x] = d
    if canonical_key(G) != canonical_key(H):
        raise MoveError("graphs are not isomorphic")
    return [back[x] for x in rg]


def grow_tree(C: ChordDiagram, first: int, last: int) -> Growth:
    """Grow a planted subtree whose leaves, clockwise, are the endpoints at
    slots ``first..last``.  Only moves of type 1 or 2 are used, and branch
    reduction of the result gives back ``C``."""
    n = 2 * C.k
    if not 1 <= first <= last <= n:
        raise DiagramError(f"bad run {first}..{last}")
    G0 = realize_fatgraph(C, trivalent=True)
    if first == last:
        # a single leaf: the subtree is the chord itself
        return Growth(G0, (), endpoint_dart(C, first))
    if not growable(C, first, last):
        raise DiagramError(f"run {first}..{last} fails the rank condition")
    if last == n:
        # the end of the core already is a comb with these leaves
        return Growth(G0, (), 2 * (first - 1))
    # a comb hanging from the left end of the run, deepest leaf on the right
    G = G0
    for e in range(last - 1, first - 1, -1):
        G = whitehead_graph(G, e)
    red = branch_reduce(G, graph_standard_marking(G))
    phi = _isomorphism(red.graph, G0)
    moves = []
    cur = G0
    for W in reversed(red.log):
        M = make_move(cur, phi[2 * W.edge] >> 1)
        moves.append(M)
        cur = M.target
    want = [endpoint_dart(C, i) for i in range(first, last + 1)]
    for e in greedy_tree(cur).tree:
        d = cur.preferred(e)
        if e != cur.tail >> 1 and leaves(cur, d) == want:
            return Growth(cur, tuple(moves), d)
    raise MoveError("grown graph has no subtree with the requested leaves")


# -- Whitehead moves as chord slides -------------------------------------------


@dataclass(frozen=True)
class SlideRun:
    """Endpoints at ``slots`` (consecutive, nearest to ``along`` first) slid
    one after another along the chord whose endpoint is at ``along``."""

    along: int
    slots: tuple[int, ...]

    def sequence(self, C: ChordDiagram) -> SlideSequence:
        steps = []
        cur = C
        a = C.at(self.along)
        side = 1 if self.slots and self.slots[0] > self.along else -1
        for _ in self.slots:
            # the next endpoint of the run is now the along end's neighbour
            pos = cur.slot(a)
            s = ChordSlide(pos + side, pos)
            steps.append(s)
            cur = slide_diagram(cur, s)[0]
        return SlideSequence(C, tuple(steps))


def _letters_set(words) -> frozenset:
    return frozenset(min(w.letters, w.inverse().letters) for w in words)


def cs_functor(W: WhiteheadMove, m: Pi1Marking | None = None) -> tuple[SlideRun, SlideSequence, MarkedDiagram]:
    """Chord slides realizing ``W`` between the branch reductions of its
    source and target.

    Returns the run, the slide sequence on the reduced source diagram and
    the marked diagram it starts from.  The run is found by trying endpoint
    runs next to the chords adjacent to the moved edge and keeping the one
    whose generator labels agree, up to inversion, with the labels carried
    across the move.
    """
    G, e = W.source, W.edge
    if m is None:
        m = graph_standard_marking(G)
    M = branch_reduce(G, m).diagram
    C = M.diagram
    _, m2 = apply_whitehead(G, m, e)
    want = _letters_set(m2.labels[x] for x in greedy_tree(W.target).generators)
    if _letters_set(M.labels) == want:
        return SlideRun(0, ()), SlideSequence(C, ()), M
    gens = greedy_tree(G).generators
    chord_of = {d >> 1: i for i, d in enumerate(gens, 1)}
    # a move drawn backwards slides along the chord of the moved edge itself
    near = set()
    for v in (G.vertex_of[2 * e], G.vertex_of[2 * e + 1]):
        for x in G.vertex_cycles[v]:
            if (x >> 1) in chord_of:
                near.add(chord_of[x >> 1])
    n = 2 * C.k
    for k in range(1, n - 1):
        for c in sorted(near):
            for along in sorted((C.slot(c), C.slot(-c))):
                for side in (-1, 1):
                    slots = tuple(along + side * j for j in range(1, k + 1))
                    if not all(1 <= s <= n and abs(C.at(s)) != c for s in slots):
                        continue
                    run = SlideRun(along, slots)
                    seq = run.sequence(C)
                    end = seq.apply(M)[-1]
                    if _letters_set(end.labels) == want:
                        return run, seq, M
    raise MoveError(f"no slide run along a chord at edge {e} matches the move")


def _check_run(C: ChordDiagram, slots: Sequence[int], along: int) -> list[int]:
    slots = sorted(slots)
    if not slots or slots != list(range(slots[0], slots[-1] + 1)):
        raise DiagramError("slid endpoints must be consecutive")
    if along not in (slots[0] - 1, slots[-1] + 1):
        raise DiagramError("slid endpoints must be next to the along endpoint")
    if any(abs(C.at(s)) == abs(C.at(along)) for s in slots):
        raise DiagramError("cannot slide a chord along itself")
    return slots


def single_move_realizable(C: ChordDiagram, slots: Sequence[int], along: int) -> bool:
    """Is sliding the endpoints at ``slots`` along the chord ending at
    ``along`` the image of one Whitehead move on some graph reducing to
    ``C``?

    One endpoint: yes unless the far end of its chord comes before the
    endpoint, the along endpoint and the far end of the along chord.
    Several endpoints: exactly when they can be grown into a planted
    subtree (see :func:`growable`); the along chord plays no part.
    """
    slots = _check_run(C, slots, along)
    if len(slots) == 1:
        r = endpoint_ranks(C)
        s = slots[0]
        return r[C.partner(s)] > min(r[s], r[along], r[C.partner(along)])
    return growable(C, slots[0], slots[-1])


def stated_rank_condition(C: ChordDiagram, slots: Sequence[int], along: int) -> bool:
    """The rank test ``xbar_0 < x_k < x_i`` (along endpoint on the left) or
    ``x_k < x_i`` (on the right), ``x_k`` the rightmost slid endpoint and
    ``0 <= i < k``.  Kept for comparison with :func:`single_move_realizable`,
    which it does not always match."""
    slots = _check_run(C, slots, along)
    if len(slots) == 1:
        return True
    r = endpoint_ranks(C)
    xk = r[slots[-1]]
    others = [r[along]] + [r[s] for s in slots[:-1]]
    if along < slots[0] and not r[C.partner(along)] < xk:
        return False
    return all(xk < x for x in others)


# -- random graphs and logs -----------------------------------------------------


def random_trivalent(g: int, rng: random.Random, steps: int | None = None) -> Fatgraph:
    """Random trivalent bordered fatgraph: a random walk of Whitehead moves
    from a random chord diagram."""
    G = realize_fatgraph(random_bordered(g, rng), trivalent=True)
    for _ in range(steps if steps is not None else 4 * G.num_edges):
        G = whitehead_graph(G, rng.randrange(1, G.num_edges))
    return G


def format_slide_log(seq: SlideSequence) -> str:
    """One ``diagram<TAB>moving<TAB>along`` record per slide."""
    lines = []
    for C, s in zip(seq.diagrams(), seq.steps):
        lines.append(f"{format_diagram(C)}\t{s.moving}\t{s.along}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_slide_log(C: ChordDiagram, text: str) -> SlideSequence:
    """Read a slide log starting at ``C``; diagram columns, when present, are
    checked against the running diagram.  Records are tab-separated, or just
    ``moving along`` separated by spaces."""
    steps = []
    cur = C
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) == 3:
            # the literal renumbers chords, so compare shapes
            try:
                shape = parse_diagram(parts[0]).unoriented()
            except DiagramError:
                raise LogFormatError(f"bad diagram in slide record {line!r}") from None
            if shape != cur.unoriented():
                raise DiagramError(f"log record does not match the current diagram: {line!r}")
            parts = parts[1:]
        try:
            s = ChordSlide(*map(int, parts))
        except (TypeError, ValueError):
            raise LogFormatError(f"bad slide record {line!r}") from None
        steps.append(s)
        cur = slide_diagram(cur, s)[0]
    return SlideSequence(C, tuple(steps))

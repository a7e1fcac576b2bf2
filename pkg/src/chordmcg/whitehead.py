"""Whitehead moves on trivalent bordered fatgraphs.

A move on edge ``e`` collapses it and re-expands the resulting 4-valent
vertex the other way.  The new edge ``e'`` reuses the dart ids of ``e`` so a
move on ``e`` followed by a move on the same id is the inverse move.

Moves are sorted into six types by the order in which the boundary cycle
visits the four corners around ``e``.  Reading the corners clockwise from the
first one visited gives a pattern; with ``e`` lying in the first corner the
patterns ``1342, 1432, 1234, 1243, 1423, 1324`` are types ``1..6``.  A move
has type ``k`` when it or its inverse has that pattern.
"""

from __future__ import annotations

from dataclasses import dataclass

from .free_words import Endomorphism, Word, compose_all
from .markings import Pi1Marking, graph_standard_marking, marked_key
from .surface_graph import Fatgraph, canonical_key, greedy_tree

__all__ = [
    "MoveError",
    "WhiteheadMove",
    "whitehead_graph",
    "apply_whitehead",
    "sector_pattern",
    "classify_move",
    "make_move",
    "nielsen_lift",
    "nielsen_lift_by_transport",
    "composite_lift",
    "relation_sequence",
    "run_moves",
    "adjacent",
    "format_move_log",
    "parse_move_log",
]

PATTERN_TYPE = {"1342": 1, "1432": 2, "1234": 3, "1243": 4, "1423": 5, "1324": 6}


class MoveError(ValueError):
    pass


def _check_edge(G: Fatgraph, e: int) -> tuple[int, int]:
    if not 0 <= e < G.num_edges:
        raise MoveError(f"no edge {e}")
    if e == G.tail >> 1:
        raise MoveError("cannot move the tail")
    h = 2 * e
    # a loop would give the surface a second boundary cycle
    if G.vertex_of[h] == G.vertex_of[h ^ 1]:
        raise MoveError(f"edge {e} is a loop")
    if G.valence(h) != 3 or G.valence(h ^ 1) != 3:
        raise MoveError(f"edge {e} does not join two trivalent vertices")
    return h, h ^ 1


def _corners(G: Fatgraph, e: int) -> tuple[int, int, int, int]:
    h, hb = _check_edge(G, e)
    s = G.sigma
    a, c = s[h], s[hb]
    return a, s[a], c, s[c]


def whitehead_graph(G: Fatgraph, e: int) -> Fatgraph:
    """Collapse ``e`` and re-expand the other way.

    With ``(h, a, b)`` and ``(hbar, c, d)`` the rotations at the two ends, the
    collapsed vertex reads ``(a, b, c, d)`` and the result has rotations
    ``(h, b, c)`` and ``(hbar, d, a)``.
    """
    h, hb = _check_edge(G, e)
    s = G.sigma
    a, c = s[h], s[hb]
    b, d = s[a], s[c]
    sigma = list(s)
    sigma[h], sigma[b], sigma[c] = b, c, h
    sigma[hb], sigma[d], sigma[a] = d, a, hb
    return Fatgraph(tuple(sigma), G.tail, G.chord_diagram)


def apply_whitehead(G: Fatgraph, m: Pi1Marking | None, e: int) -> tuple[Fatgraph, Pi1Marking | None]:
    """Whitehead move on edge ``e`` with marking transport.

    Only the moved edge changes label; the vertex condition at ``(h, b, c)``
    gives ``label(h) = (label(b) label(c))^-1``.
    """
    G2 = whitehead_graph(G, e)
    if m is None:
        return G2, None
    h = 2 * e
    b = G2.sigma[h]
    c = G2.sigma[b]
    w = (m.labels[b] * m.labels[c]).inverse()
    return G2, m.replace({h: w, h ^ 1: w.inverse()})


def sector_pattern(G: Fatgraph, e: int) -> str:
    """Clockwise visiting order of the four corners around ``e``.

    The corner entered by an incoming dart ``x`` is visited at ``rank(x)``.
    """
    a, b, c, d = _corners(G, e)
    r = G.order.rank
    cw = [r[d], r[c], r[b], r[a]]
    ranks = sorted(cw)
    lab = [ranks.index(x) + 1 for x in cw]
    i = lab.index(1)
    return "".join(map(str, lab[i:] + lab[:i]))


def classify_move(G: Fatgraph, e: int) -> int:
    return PATTERN_TYPE[sector_pattern(G, e)]


@dataclass(frozen=True)
class WhiteheadMove:
    source: Fatgraph
    edge: int
    target: Fatgraph
    type: int

    @property
    def new_edge(self) -> int:
        return self.edge

    @property
    def source_key(self) -> tuple:
        return canonical_key(self.source)

    def inverse(self) -> "WhiteheadMove":
        return make_move(self.target, self.edge)


def make_move(G: Fatgraph, e: int) -> WhiteheadMove:
    return WhiteheadMove(G, e, whitehead_graph(G, e), classify_move(G, e))


# -- Nielsen lift -------------------------------------------------------------


def _frame(G: Fatgraph, e: int):
    """Corners relabeled so the first visited one is entered by ``b`` (the
    move is drawn as in its defining picture) or by ``a`` (it is the inverse
    of such a move).  Returns ``(forward, h, a, b, c, d)``."""
    h = 2 * e
    a, b, c, d = _corners(G, e)
    r = G.order.rank
    first = min((a, b, c, d), key=lambda x: r[x])
    if first in (c, d):
        h, a, b, c, d = h ^ 1, c, d, a, b
    return first == b, h, a, b, c, d


def nielsen_lift(W: WhiteheadMove) -> Endomorphism:
    """Automorphism sending ``g_i`` to the old-generator expression of the
    i-th generator of the target.

    Types 1 and 2 give the identity.  Otherwise one generator is traded:
    drawn forward, the generator on ``a`` (types 3, 4) or ``d`` (types 5, 6)
    leaves and ``e'`` enters with label ``(L(d) L(a))^{+-1}``; drawn backward,
    ``e`` leaves and an edge around it enters with its unchanged label.  The
    new generator is placed after the surviving generators that precede a
    fixed corner in the old boundary order.
    """
    G, e, t = W.source, W.edge, W.type
    gens = greedy_tree(G).generators
    rank = 2 * G.genus
    if t in (1, 2):
        return Endomorphism.identity(rank)
    L = graph_standard_marking(G).labels
    r = G.order.rank
    forward, h, a, b, c, d = _frame(G, e)
    if forward:
        gone = a if t in (3, 4) else d
        word = L[d] * L[a]
        if t == 5:
            word = word.inverse()
        key = d ^ 1 if t == 5 else b ^ 1
    else:
        gone = h
        came = d if t in (3, 4) else c
        word = L[came]
        key = h if t in (3, 4) else d ^ 1
    gone_edge = gone >> 1
    kept = [x for x in gens if x >> 1 != gone_edge]
    if len(kept) != len(gens) - 1:
        raise MoveError(f"edge {gone_edge} was expected to be a generator")
    pos = sum(1 for x in kept if r[x] < r[key])
    images = [Word.gen(gens.index(x) + 1) for x in kept]
    images.insert(pos, word)
    return Endomorphism(tuple(images))


def nielsen_lift_by_transport(W: WhiteheadMove) -> Endomorphism:
    """Independent route: carry the standard marking across the move and read
    off the target's generators."""
    G2, m2 = apply_whitehead(W.source, graph_standard_marking(W.source), W.edge)
    return Endomorphism(tuple(m2.labels[x] for x in greedy_tree(G2).generators))


def composite_lift(moves: list[WhiteheadMove]) -> Endomorphism:
    """Lift of ``W_n o ... o W_1`` as ``N(W_1) o ... o N(W_n)``."""
    if not moves:
        raise ValueError("empty move sequence has no rank; use Endomorphism.identity")
    return compose_all([nielsen_lift(W) for W in moves], 2 * moves[0].source.genus)


# -- relations ----------------------------------------------------------------


def _ends(G: Fatgraph, e: int) -> set[int]:
    return {G.vertex_of[2 * e], G.vertex_of[2 * e + 1]}


def adjacent(G: Fatgraph, e: int, f: int) -> bool:
    return e != f and bool(_ends(G, e) & _ends(G, f))


def relation_sequence(G: Fatgraph, kind: str, site: tuple[int, ...]) -> list[WhiteheadMove]:
    """Moves of an involutivity ``(e,)``, commutativity ``(e, f)`` or
    pentagon ``(e, f)`` relation.  Because moved edges keep their ids, the
    sequences are ``e e``, ``e f e f`` and ``f e f e f``."""
    if kind == "involutivity":
        (e,) = site
        edges = [e, e]
    elif kind == "commutativity":
        e, f = site
        if e == f or adjacent(G, e, f):
            raise MoveError("commutativity needs two non-adjacent edges")
        edges = [e, f, e, f]
    elif kind == "pentagon":
        e, f = site
        if not adjacent(G, e, f) or len(_ends(G, e) | _ends(G, f)) != 3:
            raise MoveError("pentagon needs two edges sharing exactly one vertex")
        edges = [f, e, f, e, f]
    else:
        raise ValueError(f"unknown relation kind {kind!r}")
    moves = []
    cur = G
    for x in edges:
        W = make_move(cur, x)
        moves.append(W)
        cur = W.target
    return moves


def run_moves(G: Fatgraph, m: Pi1Marking | None, edges) -> tuple[Fatgraph, Pi1Marking | None]:
    for e in edges:
        G, m = apply_whitehead(G, m, e)
    return G, m


def same_marked_graph(G: Fatgraph, m: Pi1Marking, H: Fatgraph, n: Pi1Marking) -> bool:
    return marked_key(G, m) == marked_key(H, n)


# -- move log -----------------------------------------------------------------


def format_move_log(moves: list[WhiteheadMove]) -> str:
    """One ``key<TAB>edge<TAB>type`` record per line; the key is the source
    graph's canonical rotation."""
    lines = []
    for W in moves:
        sigma, _ = W.source_key
        lines.append(f"{','.join(map(str, sigma))}\t{W.edge}\t{W.type}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_move_log(G: Fatgraph, text: str) -> list[WhiteheadMove]:
    """Replay a move log from ``G``, checking every recorded key and type."""
    moves = []
    for line in text.splitlines():
        if not line.strip():
            continue
        key, edge, typ = line.split("\t")
        sigma = tuple(int(x) for x in key.split(","))
        if canonical_key(G)[0] != sigma:
            raise MoveError(f"log record does not match the current graph: {line!r}")
        W = make_move(G, int(edge))
        if W.type != int(typ):
            raise MoveError(f"recorded type {typ} but move has type {W.type}")
        moves.append(W)
        G = W.target
    return moves

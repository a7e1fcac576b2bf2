"""Fatgraphs as half-edge combinatorial maps.

Oriented edges ("darts") are the integers ``0 .. 2E-1``; the two orientations
of edge ``k`` are ``2k`` and ``2k+1`` so reversal is ``d ^ 1``.  Every dart
is *incoming* at the vertex it points to, and ``sigma[d]`` is the next
incoming dart at that vertex in its (counterclockwise) cyclic order.  The
boundary successor of ``d`` is ``reverse(sigma[d])``.

A bordered fatgraph carries a distinguished dart ``tail``: the tail edge
oriented away from the univalent vertex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Sequence

__all__ = [
    "Fatgraph",
    "BoundaryOrder",
    "GeneratorSet",
    "BorderedError",
    "MalformedGraph",
    "reverse",
    "edge_of",
    "boundary_cycles",
    "validate_bordered",
    "boundary_order",
    "canonical_form",
    "greedy_tree",
]


class MalformedGraph(ValueError):
    """Pairing / cyclic-order data does not describe a fatgraph."""


class BorderedError(ValueError):
    """A fatgraph fails one of the once-bordered conditions."""


def reverse(d: int) -> int:
    return d ^ 1


def edge_of(d: int) -> int:
    return d >> 1


@dataclass(frozen=True)
class Fatgraph:
    sigma: tuple[int, ...]
    tail: int
    # chord-diagram realizations keep the rightmost core point as a bivalent vertex
    chord_diagram: bool = False

    def __post_init__(self):
        n = len(self.sigma)
        if n == 0 or n % 2:
            raise MalformedGraph("need a positive even number of darts")
        if sorted(self.sigma) != list(range(n)):
            raise MalformedGraph("vertex rotation is not a permutation of the darts")
        if not 0 <= self.tail < n:
            raise MalformedGraph("tail dart out of range")

    # -- construction -------------------------------------------------------
    @classmethod
    def from_vertex_cycles(cls, cycles: Iterable[Sequence[int]], tail: int,
                           chord_diagram: bool = False) -> "Fatgraph":
        cycles = [list(c) for c in cycles]
        n = sum(len(c) for c in cycles)
        sigma = [-1] * n
        for c in cycles:
            for i, d in enumerate(c):
                if not 0 <= d < n or sigma[d] != -1:
                    raise MalformedGraph(f"dart {d} repeated or out of range")
                sigma[d] = c[(i + 1) % len(c)]
        if -1 in sigma:
            raise MalformedGraph("some dart is not incident to any vertex")
        return cls(tuple(sigma), tail, chord_diagram)

    # -- basic structure ----------------------------------------------------
    @property
    def num_darts(self) -> int:
        return len(self.sigma)

    @property
    def num_edges(self) -> int:
        return len(self.sigma) // 2

    def phi(self, d: int) -> int:
        """Boundary successor."""
        return self.sigma[d] ^ 1

    @cached_property
    def vertex_cycles(self) -> tuple[tuple[int, ...], ...]:
        seen = [False] * self.num_darts
        out = []
        for d in range(self.num_darts):
            if seen[d]:
                continue
            cyc = []
            x = d
            while not seen[x]:
                seen[x] = True
                cyc.append(x)
                x = self.sigma[x]
            out.append(tuple(cyc))
        return tuple(out)

    @cached_property
    def vertex_of(self) -> tuple[int, ...]:
        """Index (into ``vertex_cycles``) of the vertex each dart points to."""
        v = [0] * self.num_darts
        for i, cyc in enumerate(self.vertex_cycles):
            for d in cyc:
                v[d] = i
        return tuple(v)

    def valence(self, d: int) -> int:
        return len(self.vertex_cycles[self.vertex_of[d]])

    def is_trivalent(self) -> bool:
        """Trivalent apart from the univalent tail vertex."""
        return all(len(c) == 3 or c == (self.tail ^ 1,) for c in self.vertex_cycles)

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertex_cycles) - self.num_edges

    @cached_property
    def order(self) -> "BoundaryOrder":
        return boundary_order(self)

    @cached_property
    def genus(self) -> int:
        return validate_bordered(self)

    def preferred(self, edge: int) -> int:
        """The dart of ``edge`` that comes first in the boundary order."""
        r = self.order.rank
        return 2 * edge if r[2 * edge] < r[2 * edge + 1] else 2 * edge + 1

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict[str, Any]:
        return {
            "half_edges": list(range(self.num_darts)),
            "pairing": [[2 * k, 2 * k + 1] for k in range(self.num_edges)],
            "vertex_cycles": [list(c) for c in self.vertex_cycles],
            "tail": self.tail,
            "chord_diagram": self.chord_diagram,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any] | str) -> "Fatgraph":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            ids = list(data["half_edges"])
            pairs = [tuple(p) for p in data["pairing"]]
            cycles = data["vertex_cycles"]
            tail = data["tail"]
        except (KeyError, TypeError) as exc:
            raise MalformedGraph(f"missing fatgraph field: {exc}") from None
        if len(set(map(_hashable, ids))) != len(ids):
            raise MalformedGraph("duplicate half-edge id")
        index: dict[Any, int] = {}
        for k, p in enumerate(pairs):
            if len(p) != 2 or p[0] == p[1]:
                raise MalformedGraph(f"bad pair {p!r}")
            for j, h in enumerate(p):
                h = _hashable(h)
                if h in index:
                    raise MalformedGraph(f"half-edge {h!r} paired twice")
                index[h] = 2 * k + j
        if set(index) != set(map(_hashable, ids)):
            raise MalformedGraph("pairing does not cover the half-edges exactly")
        try:
            cyc = [[index[_hashable(h)] for h in c] for c in cycles]
            t = index[_hashable(tail)]
        except KeyError as exc:
            raise MalformedGraph(f"unknown half-edge {exc}") from None
        g = cls.from_vertex_cycles(cyc, t, bool(data.get("chord_diagram", False)))
        # accept either orientation of the tail
        if g.sigma[t] == t and g.sigma[t ^ 1] != t ^ 1:
            g = cls(g.sigma, t ^ 1, g.chord_diagram)
        return g

    def to_dot(self, name: str = "G") -> str:
        """Graphviz text; each edge is annotated with the boundary ranks of its two darts."""
        rank = None
        try:
            rank = self.order.rank
        except BorderedError:
            pass
        lines = [f"graph {name} {{"]
        for i, cyc in enumerate(self.vertex_cycles):
            shape = "point" if len(cyc) == 1 else "circle"
            lines.append(f'  v{i} [shape={shape}, label="{i}"];')
        for k in range(self.num_edges):
            a, b = 2 * k, 2 * k + 1
            # dart a points to vertex_of[a]; it leaves vertex_of[b]
            label = f"e{k}"
            if rank is not None:
                label += f" ({rank[a]},{rank[b]})"
            if a == self.tail or b == self.tail:
                label += " tail"
            lines.append(f'  v{self.vertex_of[b]} -- v{self.vertex_of[a]} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)


def _hashable(x):
    return tuple(x) if isinstance(x, list) else x


def boundary_cycles(G: Fatgraph) -> list[tuple[int, ...]]:
    """All boundary cycles; together they visit every dart exactly once."""
    seen = [False] * G.num_darts
    out = []
    for d in range(G.num_darts):
        if seen[d]:
            continue
        cyc = []
        x = d
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = G.phi(x)
        if x != d:
            raise MalformedGraph("boundary successor is not a permutation")
        out.append(tuple(cyc))
    return out


def validate_bordered(G: Fatgraph) -> int:
    """Return the genus of a once-bordered fatgraph or raise ``BorderedError``."""
    t = G.tail
    if G.sigma[t ^ 1] != t ^ 1:
        raise BorderedError("tail is not incident to a univalent vertex")
    bivalent_seen = False
    for cyc in G.vertex_cycles:
        k = len(cyc)
        if k == 1 and cyc != (t ^ 1,):
            raise BorderedError(f"extra univalent vertex at dart {cyc[0]}")
        if k == 2:
            if not G.chord_diagram or bivalent_seen:
                raise BorderedError(f"bivalent vertex at darts {cyc}")
            bivalent_seen = True
    if G.sigma[t] == t:
        raise BorderedError("tail edge has two univalent ends")
    n = len(boundary_cycles(G))
    if n != 1:
        raise BorderedError(f"{n} boundary cycles, expected 1")
    twice_genus = 2 - n - G.euler_characteristic
    if twice_genus < 0 or twice_genus % 2:
        raise BorderedError(f"non-integral genus from Euler characteristic {G.euler_characteristic}")
    return twice_genus // 2


@dataclass(frozen=True)
class BoundaryOrder:
    sequence: tuple[int, ...]
    rank: tuple[int, ...]

    def lt(self, x: int, y: int) -> bool:
        return self.rank[x] < self.rank[y]


def boundary_order(G: Fatgraph) -> BoundaryOrder:
    """The linear order on darts read off the boundary cycle starting at the tail."""
    validate_bordered(G)
    seq = [G.tail]
    x = G.phi(G.tail)
    while x != G.tail:
        seq.append(x)
        x = G.phi(x)
    rank = [0] * G.num_darts
    for i, d in enumerate(seq):
        rank[d] = i
    return BoundaryOrder(tuple(seq), tuple(rank))


def canonical_form(G: Fatgraph) -> tuple[tuple[int, ...], Fatgraph]:
    """Relabel edges by first appearance along the boundary from the tail.

    Returns ``(relabel, H)`` where ``relabel[d]`` is the new name of dart ``d``
    and ``H`` is the relabeled graph: its tail is dart 0 and every edge's
    preferred dart is even.  Bordered fatgraphs have no nontrivial
    automorphisms, so ``H`` (hashable) is a complete isomorphism invariant.
    """
    order = G.order
    relabel = [-1] * G.num_darts
    nxt = 0
    for d in order.sequence:
        if relabel[d] == -1:
            relabel[d] = nxt
            relabel[d ^ 1] = nxt + 1
            nxt += 2
    sigma = [0] * G.num_darts
    for d in range(G.num_darts):
        sigma[relabel[d]] = relabel[G.sigma[d]]
    return tuple(relabel), Fatgraph(tuple(sigma), 0, G.chord_diagram)


def canonical_key(G: Fatgraph) -> tuple:
    _, H = canonical_form(G)
    return (H.sigma, H.chord_diagram)


@dataclass(frozen=True)
class GeneratorSet:
    """Greedy spanning tree data.

    ``generators`` are the preferred darts of non-tree edges in boundary
    order; ``tree`` holds tree edge ids; ``prefix`` the tree edges whose
    preferred dart precedes every generator.
    """

    generators: tuple[int, ...]
    tree: frozenset[int]
    prefix: tuple[int, ...]  # preferred darts, in boundary order


def greedy_tree(G: Fatgraph) -> GeneratorSet:
    """Greedy maximal tree: an edge is in the tree iff its preferred dart is
    the first dart to reach its head vertex."""
    order = G.order
    rank = order.rank
    first_in = {}
    for d in order.sequence:
        v = G.vertex_of[d]
        if v not in first_in:
            first_in[v] = d
    tree = set()
    for d in first_in.values():
        tree.add(d >> 1)
    gens = []
    for d in order.sequence:
        k = d >> 1
        if k not in tree and rank[d] < rank[d ^ 1]:
            gens.append(d)
    prefix = []
    limit = rank[gens[0]] if gens else G.num_darts
    for d in order.sequence:
        if rank[d] >= limit:
            break
        if (d >> 1) in tree and rank[d] < rank[d ^ 1]:
            prefix.append(d)
    return GeneratorSet(tuple(gens), frozenset(tree), tuple(prefix))

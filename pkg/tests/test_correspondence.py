import random

import pytest
from hypothesis import given, settings, strategies as st

from chordmcg.chords import (
    ChordSlide,
    DiagramError,
    SlideSequence,
    enumerate_bordered,
    random_bordered,
    realize_fatgraph,
    slides_at,
    standard_marking,
)
from chordmcg.correspondence import (
    LogFormatError,
    SlideRun,
    branch_reduce,
    cs_functor,
    format_slide_log,
    grow_tree,
    growable,
    leaves,
    parse_slide_log,
    random_trivalent,
    read_chord_diagram,
    single_move_realizable,
    stated_rank_condition,
    trunks,
)
from chordmcg.free_words import is_identity, product
from chordmcg.markings import graph_standard_marking, validate_marking
from chordmcg.surface_graph import canonical_key, greedy_tree
from chordmcg.whitehead import apply_whitehead, composite_lift, make_move


def test_reading_a_realization_gives_the_diagram_back():
    for C in enumerate_bordered(2):
        G = realize_fatgraph(C, trivalent=True)
        assert trunks(G) == []
        D = read_chord_diagram(G)
        assert D.unoriented() == C.unoriented()
        M = read_chord_diagram(G, graph_standard_marking(G))
        assert M.key() == standard_marking(D).key()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10**6))
def test_branch_reduction(g, seed):
    G = random_trivalent(g, random.Random(seed))
    m = graph_standard_marking(G)
    red = branch_reduce(G, m)
    assert all(W.type in (1, 2) for W in red.log)
    if red.log:
        assert is_identity(composite_lift(list(red.log)))
    # the generators are untouched, so the reduced diagram carries the standard marking
    M = red.diagram
    assert M.key() == standard_marking(M.diagram).key()
    assert canonical_key(red.graph) == canonical_key(realize_fatgraph(M.diagram, trivalent=True))
    assert validate_marking(red.graph, red.marking, m.boundary(G)).ok


def test_leaves_multiply_to_the_tree_label():
    G = random_trivalent(2, random.Random(12))
    m = graph_standard_marking(G)
    gs = greedy_tree(G)
    for e in gs.tree:
        if e == G.tail >> 1:
            continue
        d = G.preferred(e)
        assert product(m.labels[x] for x in leaves(G, d)) == m.labels[d]


def random_moves(count, seed, max_genus=3):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        G = random_trivalent(rng.randint(1, max_genus), rng)
        m = graph_standard_marking(G)
        for _ in range(5):
            e = rng.randrange(G.num_edges)
            if e == G.tail >> 1:
                continue
            out.append((make_move(G, e), m))
            G, m = apply_whitehead(G, m, e)
    return out


def test_cs_functor_lands_on_the_reduced_target():
    for W, m in random_moves(150, 1):
        run, seq, M = cs_functor(W, m)
        # a single chord is slid along
        along = {abs(C.at(s.along)) for C, s in zip(seq.diagrams(), seq.steps)}
        assert len(along) <= 1
        assert (W.type in (1, 2)) == (len(seq) == 0)
        _, m2 = apply_whitehead(W.source, m, W.edge)
        target = branch_reduce(W.target, m2).diagram
        assert seq.apply(M)[-1].key() == target.key()


def test_single_move_realizable_matches_exhaustive_search():
    # every run produced by some move on some graph reducing to C
    for C in enumerate_bordered(2)[::4]:
        G0 = realize_fatgraph(C, trivalent=True)
        seen = {canonical_key(G0)}
        frontier, graphs = [G0], [G0]
        while frontier:
            nxt = []
            for G in frontier:
                for e in range(1, G.num_edges):
                    W = make_move(G, e)
                    if W.type in (1, 2) and canonical_key(W.target) not in seen:
                        seen.add(canonical_key(W.target))
                        nxt.append(W.target)
                        graphs.append(W.target)
            frontier = nxt
        realized = set()
        for G in graphs:
            m = graph_standard_marking(G)
            for e in range(1, G.num_edges):
                W = make_move(G, e)
                if W.type not in (1, 2):
                    run, _, _ = cs_functor(W, m)
                    realized.add((run.along, tuple(sorted(run.slots))))
        n = 2 * C.k
        for along in range(1, n + 1):
            for side in (-1, 1):
                for k in range(1, n):
                    slots = tuple(sorted(along + side * j for j in range(1, k + 1)))
                    if not all(1 <= s <= n and abs(C.at(s)) != abs(C.at(along)) for s in slots):
                        break
                    assert ((along, slots) in realized) == single_move_realizable(C, slots, along)


def test_stated_rank_condition_is_not_the_realizability_test():
    disagree = 0
    for C in enumerate_bordered(2):
        n = 2 * C.k
        for along in range(1, n + 1):
            for first in range(1, n + 1):
                for last in range(first + 1, n + 1):
                    if along not in (first - 1, last + 1):
                        continue
                    slots = range(first, last + 1)
                    if any(abs(C.at(s)) == abs(C.at(along)) for s in slots):
                        continue
                    disagree += stated_rank_condition(C, slots, along) != single_move_realizable(C, slots, along)
    assert disagree > 0


def test_grow_tree():
    for C in enumerate_bordered(2):
        n = 2 * C.k
        for first in range(1, n + 1):
            for last in range(first, n + 1):
                if first < last and not growable(C, first, last):
                    with pytest.raises(DiagramError):
                        grow_tree(C, first, last)
                    continue
                gr = grow_tree(C, first, last)
                assert all(W.type in (1, 2) for W in gr.log)
                red = branch_reduce(gr.graph, graph_standard_marking(gr.graph))
                assert red.diagram.diagram.unoriented() == C.unoriented()


def test_slide_run_sequence():
    C = enumerate_bordered(2)[0]
    for along in range(1, 2 * C.k + 1):
        for side in (-1, 1):
            s = along + side
            if 1 <= s <= 2 * C.k and abs(C.at(s)) != abs(C.at(along)):
                seq = SlideRun(along, (s,)).sequence(C)
                assert seq.steps == (ChordSlide(s, along),)


def test_slide_log_roundtrip():
    rng = random.Random(2)
    C = random_bordered(2, rng)
    steps, D = [], C
    for _ in range(10):
        s = rng.choice(list(slides_at(D)))
        steps.append(s)
        D = SlideSequence(D, (s,)).end
    seq = SlideSequence(C, steps)
    text = format_slide_log(seq)
    assert parse_slide_log(C, text) == seq
    bare = "\n".join(f"{s.moving} {s.along}" for s in steps)
    assert parse_slide_log(C, bare + "\n# comment\n") == seq
    with pytest.raises(LogFormatError):
        parse_slide_log(C, "1 x")
    with pytest.raises(LogFormatError):
        parse_slide_log(C, "1 2 3 4")
    wrong = text.splitlines()
    wrong[1] = wrong[0]
    with pytest.raises(DiagramError):
        parse_slide_log(C, "\n".join(wrong))

import random

import pytest
from hypothesis import given, settings, strategies as st

from chordmcg.chords import (
    SLIDE_SHAPES,
    ChordDiagram,
    ChordSlide,
    DiagramError,
    SlideSequence,
    apply_slide,
    boundary_word,
    classify_slide,
    diagram_from_json,
    diagram_to_json,
    enumerate_bordered,
    format_diagram,
    inverse_slide,
    parse_diagram,
    random_bordered,
    slide_as_whitehead_pair,
    slide_diagram,
    slides_at,
    standard_marking,
)
from chordmcg.markings import marked_key, validate_marking
from chordmcg.whitehead import run_moves


def one_face(ends):
    """Close the core into a circle and count faces of the chord map."""
    n = len(ends)
    mate = {}
    for i, x in enumerate(ends):
        mate[i] = ends.index(-x)
    seen = set()
    faces = 0
    for s in range(n):
        if s in seen:
            continue
        faces += 1
        x = s
        while x not in seen:
            seen.add(x)
            x = (mate[x] + 1) % n
    return faces == 1


def oracle_count(k):
    # every pairing of 2k points with chords numbered left to right
    def pairings(pts):
        if not pts:
            yield []
            return
        a = pts[0]
        for j in range(1, len(pts)):
            for rest in pairings(pts[1:j] + pts[j + 1:]):
                yield [(a, pts[j])] + rest

    count = 0
    total = 0
    for pairs in pairings(list(range(2 * k))):
        total += 1
        ends = [0] * (2 * k)
        for c, (i, j) in enumerate(sorted(pairs), 1):
            ends[i], ends[j] = c, -c
        count += one_face(ends)
    return count, total


def harer_zagier(g, n):
    """One-face gluings of a 2n-gon into genus g, by the Harer-Zagier recursion."""
    if g < 0 or n < 0 or 2 * g > n:
        return 0
    if n == 0:
        return 1 if g == 0 else 0
    if n == 1:
        return 1 if g == 0 else 0
    return (2 * (2 * n - 1) * harer_zagier(g, n - 1)
            + (n - 1) * (2 * n - 1) * (2 * n - 3) * harer_zagier(g - 1, n - 2)) // (n + 1)


def test_oracle_counts():
    assert oracle_count(2) == (1, 3)
    assert oracle_count(4) == (21, 105)
    assert harer_zagier(1, 2) == 1
    assert harer_zagier(2, 4) == 21
    assert harer_zagier(0, 3) == 5  # Catalan


@pytest.mark.parametrize("g,count", [(1, 1), (2, 21)])
def test_enumeration_matches_oracle(g, count):
    diagrams = enumerate_bordered(g)
    assert len(diagrams) == count
    assert len({C.ends for C in diagrams}) == count
    assert all(one_face(list(C.ends)) for C in diagrams)
    assert all(C.k == 2 * g and C.genus == g for C in diagrams)


def test_literals():
    C = parse_diagram("[a b ~a ~b]")
    assert C.ends == (1, 2, -1, -2)
    assert format_diagram(C) == "[a b ~a ~b]"
    assert parse_diagram("[x ~y ~x y]").ends == (1, -2, -1, 2)
    assert diagram_from_json(diagram_to_json(C)) == C
    assert diagram_from_json({"literal": "[a b ~a ~b]"}) == C
    for bad in ["a b ~a ~b", "[a b ~a]", "[a a]", "[a ~a ~a]"]:
        with pytest.raises(DiagramError):
            parse_diagram(bad)
    with pytest.raises(DiagramError):
        ChordDiagram((1, 1))


def test_unbordered_diagrams():
    assert not parse_diagram("[a ~a b ~b]").is_bordered()
    assert not parse_diagram("[a b ~b ~a]").is_bordered()
    with pytest.raises(ValueError):
        standard_marking(parse_diagram("[a ~a b ~b]"))


def test_unoriented_forgets_orientation():
    C = ChordDiagram((-2, 1, 2, -1))
    assert C.unoriented().ends == (1, 2, -1, -2)


def test_slide_positions():
    C = parse_diagram("[a b ~a ~b]")
    # a left neighbour lands just right of the far end
    D, pos = slide_diagram(C, ChordSlide(1, 2))
    assert format_diagram(D) == "[b ~a ~b a]" and pos == 4
    # a right neighbour lands just left of it
    D, pos = slide_diagram(C, ChordSlide(4, 3))
    assert format_diagram(D) == "[~b a b ~a]" and pos == 1
    for s in [ChordSlide(1, 3), ChordSlide(0, 1), ChordSlide(4, 5)]:
        with pytest.raises(DiagramError):
            slide_diagram(C, s)
    with pytest.raises(DiagramError):
        slide_diagram(parse_diagram("[a ~a b ~b]"), ChordSlide(1, 2))


def test_slide_count():
    for C in enumerate_bordered(2):
        assert len(list(slides_at(C))) == 2 * (2 * C.k - 1)


bordered = st.builds(lambda g, seed: random_bordered(g, random.Random(seed)),
                     st.integers(1, 3), st.integers(0, 10**6))


@settings(max_examples=60, deadline=None)
@given(bordered)
def test_slides_preserve_markings(C):
    M = standard_marking(C)
    b = boundary_word(M)
    G0 = M.fatgraph()
    ref = M.pi1().boundary(G0)
    for s in slides_at(C):
        M2 = apply_slide(M, s)
        assert M2.diagram.is_bordered()
        assert boundary_word(M2) == b
        G = M2.fatgraph()
        rep = validate_marking(G, M2.pi1(), ref)
        assert rep.ok, (s, rep.violations)


@settings(max_examples=60, deadline=None)
@given(bordered)
def test_slide_inverse(C):
    M = standard_marking(C)
    for s in slides_at(C):
        M2 = apply_slide(M, s)
        back = apply_slide(M2, inverse_slide(C, s))
        assert back.key() == M.key()
        assert back.diagram == C


@settings(max_examples=30, deadline=None)
@given(bordered, st.integers(0, 10**6))
def test_sequence_inverse(C, seed):
    rng = random.Random(seed)
    steps = []
    D = C
    for _ in range(8):
        s = rng.choice(list(slides_at(D)))
        steps.append(s)
        D = slide_diagram(D, s)[0]
    seq = SlideSequence(C, steps)
    assert seq.end == D
    loop = seq.then(seq.inverse())
    M = standard_marking(C)
    assert loop.apply(M)[-1].key() == M.key()


@settings(max_examples=40, deadline=None)
@given(bordered)
def test_slide_is_a_whitehead_pair(C):
    M = standard_marking(C)
    for s in slides_at(C):
        moves = slide_as_whitehead_pair(C, s)
        assert 1 <= len(moves) <= 2
        G, m = run_moves(M.fatgraph(), M.pi1(), [W.edge for W in moves])
        M2 = apply_slide(M, s)
        assert marked_key(G, m) == marked_key(M2.fatgraph(), M2.pi1())


def test_slide_shapes_all_occur():
    shapes = set()
    for C in enumerate_bordered(2):
        for s in slides_at(C):
            cls = classify_slide(C, s)
            assert cls.shape == SLIDE_SHAPES[cls.type - 1]
            assert sorted(cls.order) == [1, 2, 3, 4]
            shapes.add(cls.shape)
    assert shapes == set(SLIDE_SHAPES)

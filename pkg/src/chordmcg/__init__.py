"""Bordered chord diagrams, chord slides and the Whitehead moves they
correspond to on marked fatgraphs."""

from .chords import ChordDiagram, ChordSlide, MarkedDiagram, SlideSequence, parse_diagram, format_diagram
from .free_words import Word, Endomorphism
from .surface_graph import Fatgraph

__all__ = [
    "ChordDiagram",
    "ChordSlide",
    "MarkedDiagram",
    "SlideSequence",
    "parse_diagram",
    "format_diagram",
    "Word",
    "Endomorphism",
    "Fatgraph",
]

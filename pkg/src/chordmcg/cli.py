"""Command line: ``chordmcg <command> ...``.

Exit status is 0 on success, 1 when the input is well formed but the
requested operation fails (the message names the failing condition) and 2
when an input cannot be read or parsed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .chords import (
    ChordDiagram,
    DiagramError,
    chord_name,
    diagram_from_json,
    diagram_to_json,
    enumerate_bordered,
    format_diagram,
    parse_diagram,
    realize_fatgraph,
    standard_marking,
)
from .correspondence import LogFormatError, cs_functor, format_slide_log, parse_slide_log
from .dual_symplectic import (
    GeometricBasis,
    ReductionError,
    dual_h_marking,
    dualize,
    format_matrix,
    parse_matrix,
    realize_reduction_by_slides,
    standard_form,
    symplectic_reduce,
)
from .free_words import format_word, is_identity
from .groupoid import KINDS, MappingClass, RelationError, audit_relations
from .markings import intersection_form
from .surface_graph import BorderedError, Fatgraph, MalformedGraph, validate_bordered
from .whitehead import MoveError, make_move


class InputError(Exception):
    """Unreadable or unparsable input (exit status 2)."""


DOMAIN_ERRORS = (DiagramError, BorderedError, MalformedGraph, MoveError, RelationError, ReductionError)


def _read(arg: str) -> str:
    try:
        return Path(arg).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {arg}: {exc.strerror}") from None


def load_object(arg: str) -> ChordDiagram | Fatgraph:
    """A diagram literal, or a file holding a literal, diagram JSON or
    fatgraph JSON."""
    text = arg if arg.lstrip().startswith("[") else _read(arg)
    text = text.strip()
    try:
        if text.startswith("["):
            return parse_diagram(text)
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"bad JSON in {arg}: {exc.msg}") from None
    except DiagramError as exc:
        raise InputError(str(exc)) from None
    if not isinstance(data, dict):
        raise InputError(f"{arg}: expected a JSON object")
    if "half_edges" in data:
        try:
            return Fatgraph.from_json(data)
        except MalformedGraph as exc:
            raise InputError(str(exc)) from None
    try:
        return diagram_from_json(data)
    except DiagramError as exc:
        raise InputError(str(exc)) from None


def load_diagram(arg: str) -> ChordDiagram:
    obj = load_object(arg)
    if not isinstance(obj, ChordDiagram):
        raise InputError(f"{arg} is a fatgraph, expected a chord diagram")
    return obj


def _labels(M) -> list[str]:
    return [f"{chord_name(c)} = {format_word(w)}" for c, w in enumerate(M.labels, 1)]


def _slides(C: ChordDiagram, text: str):
    # an impossible slide is a domain error, unparsable text an input error
    try:
        return parse_slide_log(C, text)
    except LogFormatError as exc:
        raise InputError(str(exc)) from None


# -- commands ---------------------------------------------------------------------


def cmd_validate(args, out) -> int:
    obj = load_object(args.object)
    if isinstance(obj, ChordDiagram):
        g = validate_bordered(realize_fatgraph(obj))
        out.write(f"bordered chord diagram {format_diagram(obj)}\ngenus {g}\n")
    else:
        g = validate_bordered(obj)
        trivalent = "trivalent" if obj.is_trivalent() else "not trivalent"
        out.write(f"bordered fatgraph, {obj.num_edges} edges, {trivalent}\ngenus {g}\n")
    return 0


def cmd_enumerate(args, out) -> int:
    diagrams = enumerate_bordered(args.genus)
    for C in diagrams:
        out.write(format_diagram(dualize(C) if args.dual else C) + "\n")
    out.write(f"count {len(diagrams)}\n")
    return 0


def cmd_slide(args, out) -> int:
    C = load_diagram(args.diagram)
    text = _read(args.moves)
    seq = _slides(C, text)
    M = seq.apply(standard_marking(C))[-1]
    if args.log:
        out.write(format_slide_log(seq))
        return 0
    out.write(f"final {format_diagram(M.diagram)}\n")
    for line in _labels(M):
        out.write(line + "\n")
    return 0


def cmd_relations(args, out) -> int:
    kinds = [k for k in args.kinds.split(",") if k] if args.kinds else list(KINDS)
    for k in kinds:
        if k not in KINDS:
            raise InputError(f"unknown relation kind {k!r}; choose from {','.join(KINDS)}")
    rows = audit_relations(args.genus, kinds)
    if args.json:
        for r in rows:
            out.write(json.dumps(r.to_json()) + "\n")
    failed = 0
    for k in kinds:
        mine = [r for r in rows if r.kind == k]
        ok = sum(r.verified for r in mine)
        failed += len(mine) - ok
        if not args.json:
            out.write(f"{k}\tsites {len(mine)}\tverified {ok}\n")
    if not args.json:
        out.write(f"total\tsites {len(rows)}\tverified {len(rows) - failed}\n")
    return 1 if failed else 0


def cmd_cs(args, out) -> int:
    G = load_object(args.fatgraph)
    if not isinstance(G, Fatgraph):
        raise InputError(f"{args.fatgraph} is a chord diagram, expected fatgraph JSON")
    validate_bordered(G)
    W = make_move(G, args.edge)
    run, seq, M = cs_functor(W)
    out.write(f"move on edge {args.edge}, type {W.type}\n")
    out.write(f"reduced source {format_diagram(M.diagram)}\n")
    if run.slots:
        out.write(f"run {' '.join(map(str, run.slots))} along slot {run.along}\n")
    else:
        out.write("run empty\n")
    out.write(format_slide_log(seq))
    return 0


def cmd_trivial(args, out) -> int:
    C = load_diagram(args.diagram)
    seq = _slides(C, _read(args.loop))
    e = MappingClass(C, seq)
    by_marking = e.is_identity()
    by_lift = is_identity(e.nielsen_image())
    out.write(f"trivial {'yes' if by_marking else 'no'}\n")
    out.write(f"nielsen lift {'identity' if by_lift else 'not identity'}\n")
    if by_marking != by_lift:
        out.write("the two decisions disagree\n")
        return 1
    return 0


def cmd_symplectic(args, out) -> int:
    if args.by_slides:
        C = load_diagram(args.by_slides)
        M = standard_marking(C)
        form = intersection_form(M.fatgraph(), M.pi1())
        H = dual_h_marking(M)
        red = realize_reduction_by_slides(H, form)
        out.write(f"dual {format_diagram(H.diagram)}\n")
        out.write(format_slide_log(red.slides))
        out.write("basis\n")
        out.write(format_matrix(red.trace[-1]))
        return 0
    if args.basis is None:
        raise InputError("give a basis file or --by-slides DIAGRAM")
    try:
        rows = parse_matrix(_read(args.basis))
        form = parse_matrix(_read(args.form)) if args.form else None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not rows or len(rows) != len(rows[0]) or len(rows) % 2:
        raise InputError("basis must be 2g square integer rows")
    if form is None:
        form = [list(r) for r in standard_form(len(rows) // 2)]
    B = GeometricBasis(tuple(map(tuple, rows)), tuple(map(tuple, form)))
    res = symplectic_reduce(B)
    out.write("basis\n")
    out.write(format_matrix(res.basis))
    out.write("transform\n")
    out.write(format_matrix(res.transform))
    return 0


def cmd_export(args, out) -> int:
    obj = load_object(args.object)
    if args.dot:
        G = realize_fatgraph(obj) if isinstance(obj, ChordDiagram) else obj
        out.write(G.to_dot() + "\n")
    else:
        data = diagram_to_json(obj) if isinstance(obj, ChordDiagram) else obj.to_json()
        out.write(json.dumps(data, sort_keys=True) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chordmcg", description="Chord diagrams, chord slides and Whitehead moves.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a diagram or fatgraph and print its genus")
    s.add_argument("object", help="diagram literal such as '[a b ~a ~b]', or a JSON file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("enumerate", help="list bordered chord diagrams of a genus")
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--dual", action="store_true", help="print the dual of each diagram")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("slide", help="apply slides to the standard marking")
    s.add_argument("diagram")
    s.add_argument("moves", help="file of 'moving along' slot pairs or a slide log")
    s.add_argument("--log", action="store_true", help="print the replayable slide log instead")
    s.set_defaults(func=cmd_slide)

    s = sub.add_parser("relations", help="audit relation loops on every diagram of a genus")
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--kinds", help=f"comma-separated subset of {','.join(KINDS)}")
    s.add_argument("--json", action="store_true", help="one JSON row per instance")
    s.set_defaults(func=cmd_relations)

    s = sub.add_parser("cs", help="chord slides realizing a Whitehead move")
    s.add_argument("fatgraph", help="fatgraph JSON file")
    s.add_argument("--edge", type=int, required=True)
    s.set_defaults(func=cmd_cs)

    s = sub.add_parser("trivial", help="decide whether a slide loop is the trivial mapping class")
    s.add_argument("diagram")
    s.add_argument("loop", help="slide log of the loop")
    s.set_defaults(func=cmd_trivial)

    s = sub.add_parser("symplectic", help="reduce a geometric basis to a symplectic one")
    s.add_argument("basis", nargs="?", help="file with one basis vector per row")
    s.add_argument("--form", help="Gram matrix of the coordinates (default: standard symplectic)")
    s.add_argument("--by-slides", metavar="DIAGRAM", help="run the reduction as slides on the dual of DIAGRAM")
    s.set_defaults(func=cmd_symplectic)

    s = sub.add_parser("export", help="print a diagram or fatgraph as Graphviz or JSON")
    s.add_argument("object")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--dot", action="store_true")
    g.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_export)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        return args.func(args, out)
    except InputError as exc:
        err.write(f"error: input: {exc}\n")
        return 2
    except DOMAIN_ERRORS as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

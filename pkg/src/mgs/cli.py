"""Command-line interface.

Exit status: 0 success, 1 verified false (not an MGS, nothing found),
2 bad input, 3 internal error.  Results go to stdout (or ``-o``),
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .construction import ConstructionError, construct_closed, construct_with_boundary
from .quiver import (
    FormatError,
    IceQuiver,
    QuiverError,
    apply_green_sequence,
    framed,
    mutate_sequence,
    parse_quiver,
    serialize_quiver,
)
from .search import (
    NotFoundWithin,
    IncompleteCatalog,
    build_catalog,
    default_max_len,
    enumerate_class,
    search_mgs,
)
from .seeds import UnknownSeed, canonical_name, seed
from .surface import (
    ExcludedSurface,
    SurfaceError,
    flip_sequence,
    parse_triangulation,
    quiver_of,
    serialize_triangulation,
)

OK, FALSE, INPUT_ERROR, INTERNAL_ERROR = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def parse_sequence(text: str) -> tuple[int, ...]:
    """Comma- or whitespace-separated positive integers."""
    items = [x for x in text.replace(",", " ").split()]
    if not items:
        raise InputError("empty sequence")
    try:
        seq = tuple(int(x) for x in items)
    except ValueError:
        raise InputError(f"malformed sequence {text.strip()!r}") from None
    if any(k < 1 for k in seq):
        raise InputError("sequence entries must be positive vertex ids")
    return seq


def _fmt(seq: Sequence[int]) -> str:
    return ",".join(map(str, seq))


def _input_and_rest(args: argparse.Namespace, needed: int) -> tuple[str | None, list[str]]:
    rest = list(args.args)
    if args.input is None:
        if not rest:
            raise InputError("no input file given")
        path = rest.pop(0)
    else:
        path = args.input
    if len(rest) != needed:
        raise InputError(f"expected {needed} argument(s) after the input, got {len(rest)}")
    return path, rest


def _check_vertices(q: IceQuiver, seq: Sequence[int]) -> None:
    for k in seq:
        if not 1 <= k <= q.n_mutable:
            raise InputError(f"vertex {k} is not a mutable vertex (1..{q.n_mutable})")


def cmd_mutate(args: argparse.Namespace) -> int:
    path, (seq_text,) = _input_and_rest(args, 1)
    q = parse_quiver(_read(path))
    seq = parse_sequence(seq_text)
    _check_vertices(q, seq)
    _emit(serialize_quiver(mutate_sequence(q, seq)), args.output)
    return OK


def cmd_check(args: argparse.Namespace) -> int:
    if args.seq is not None:
        path, _ = _input_and_rest(args, 0)
        seq = parse_sequence(args.seq)
    else:
        path, (seq_file,) = _input_and_rest(args, 1)
        seq = parse_sequence(_read(seq_file))
    q = parse_quiver(_read(path))
    if q.n_frozen == 0:
        q = framed(q)
    _check_vertices(q, seq)
    trace = apply_green_sequence(q, seq, snapshots=args.trace)
    lines = []
    if args.trace:
        for i, (k, state) in enumerate(trace.steps, 1):
            lines.append(f"step {i}: mutate {k} ({state})")
    lines.append(trace.verdict)
    _emit("\n".join(lines) + "\n", args.output)
    return OK if trace.is_maximal_green else FALSE


def cmd_surface(args: argparse.Namespace) -> int:
    if args.action == "quiver":
        path, _ = _input_and_rest(args, 0)
        t = parse_triangulation(_read(path))
        _emit(serialize_quiver(quiver_of(t)), args.output)
        return OK
    if args.action == "flip":
        path, (seq_text,) = _input_and_rest(args, 1)
        t = parse_triangulation(_read(path))
        seq = parse_sequence(seq_text)
        for a in seq:
            if a not in t.arc_ids:
                raise InputError(f"{a} is not an arc of the triangulation")
        _emit(serialize_triangulation(flip_sequence(t, seq)), args.output)
        return OK
    path, _ = _input_and_rest(args, 0)
    t = parse_triangulation(_read(path))
    try:
        trace = construct_closed(t) if t.surface.is_closed else construct_with_boundary(t)
    except ExcludedSurface as exc:
        raise InputError(str(exc)) from None
    if args.trace:
        _emit(trace.to_json(), args.output)
    else:
        _emit(_fmt(trace.full) + "\n", args.output)
        print(f"{trace.verdict}, {len(trace.full)} mutations", file=sys.stderr)
    return OK if trace.verdict == "ValidMaximalGreen" else FALSE


def _seed(name: str | None) -> tuple[str, IceQuiver]:
    if not name:
        raise InputError("--seed is required")
    try:
        return canonical_name(name), seed(name)
    except UnknownSeed:
        raise InputError(f"unknown seed {name!r}") from None


def cmd_class(args: argparse.Namespace) -> int:
    name, q = _seed(args.seed)
    if args.action == "enumerate":
        reps = enumerate_class(q)
        if args.output:
            Path(args.output).write_text(
                json.dumps([json.loads(serialize_quiver(r)) for r in reps], separators=(",", ":")) + "\n"
            )
        print(len(reps))
        return OK
    max_len = args.max_len if args.max_len is not None else default_max_len(name, q.n_mutable)
    try:
        cat = build_catalog(name, max_len, jobs=args.jobs)
    except IncompleteCatalog as exc:
        print(str(exc), file=sys.stderr)
        return FALSE
    if args.output:
        Path(args.output).write_text(cat.to_json())
    print(f"{name}: {cat.class_size} members, {cat.certified} certificates (max length {max_len})")
    return OK


def cmd_search(args: argparse.Namespace) -> int:
    if args.seed:
        name, q = _seed(args.seed)
    else:
        path, _ = _input_and_rest(args, 0)
        q = parse_quiver(_read(path))
        name = ""
    if q.n_frozen:
        raise InputError("search expects a quiver without frozen vertices")
    max_len = args.max_len if args.max_len is not None else default_max_len(name, q.n_mutable)
    if max_len < 1:
        raise InputError("--max-len must be at least 1")
    res = search_mgs(q, max_len, dedup=args.dedup)
    if isinstance(res, NotFoundWithin):
        _emit(f"NotFoundWithin({res.max_len})\n", args.output)
        print(f"{res.states_explored} states explored ({res.dedup} dedup)", file=sys.stderr)
        return FALSE
    _emit(_fmt(res) + "\n", args.output)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mgs", description="Maximal green sequences for quivers and surfaces.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("-i", "--input", help="input file ('-' for stdin)")
        sp.add_argument("-o", "--output", help="write the result here instead of stdout")
        sp.add_argument("args", nargs="*", help="input file (unless -i) followed by command arguments")

    sp = sub.add_parser("mutate", help="mutate an iceq-v1 quiver along a sequence")
    common(sp)
    sp.set_defaults(func=cmd_mutate)

    sp = sub.add_parser("check", help="check whether a sequence is a maximal green sequence")
    common(sp)
    sp.add_argument("--seq", help="sequence given inline instead of as a file")
    sp.add_argument("--trace", action="store_true", help="print every step")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("surface", help="work with tagtri-v1 triangulations")
    sp.add_argument("action", choices=("quiver", "flip", "construct"))
    common(sp)
    sp.add_argument("--trace", action="store_true", help="emit the staged trace-v1 record")
    sp.set_defaults(func=cmd_surface)

    sp = sub.add_parser("class", help="mutation classes of the named seeds")
    sp.add_argument("action", choices=("enumerate", "catalog"))
    sp.add_argument("--seed", required=False)
    sp.add_argument("--max-len", type=int)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_class)

    sp = sub.add_parser("search", help="breadth-first search for a shortest maximal green sequence")
    common(sp)
    sp.add_argument("--seed")
    sp.add_argument("--max-len", type=int)
    sp.add_argument("--dedup", choices=("labeled", "symmetric"), default="labeled")
    sp.set_defaults(func=cmd_search)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        # positionals may follow options (``construct --trace FILE``); argparse
        # leaves those over, so they are folded back into ``args``
        args, extra = parser.parse_known_args(argv)
        stray = [x for x in extra if x.startswith("-") and x != "-"]
        if stray or (extra and not hasattr(args, "args")):
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
        if extra:
            args.args = list(args.args) + extra
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        return args.func(args)
    except (InputError, FormatError, QuiverError, SurfaceError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except ConstructionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL_ERROR
    except Exception as exc:  # pragma: no cover - last resort
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())

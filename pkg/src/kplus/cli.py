"""Command-line front end.

Exit codes: 0 success, 1 invalid proof or negative verdict, 2 malformed
input, 3 fuel exhausted, 4 usage error.  Reports go to standard output and
diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Sequence

from .cutelim import eliminate_cuts
from .engine import FuelExhausted, regularize, stream_of
from .formula import ParseError, parse_formula
from .hilbert import (
    HilbertFormatError,
    check_derivation,
    dump_derivation,
    hilbert_to_sequent,
    load_derivation,
    sequent_to_hilbert,
)
from .proof import (
    CyclicProof,
    ProofFormatError,
    check_proof,
    class_partition,
    dump_proof,
    fragment_equal,
    infer_annotations,
    load_proof,
    local_height,
    proof_equal,
)
from .sequent import CIRCLE, AnnotationError, annotation_candidates, parse_annotation, print_annotation

__all__ = ["main", "run_cli", "EXIT_OK", "EXIT_INVALID", "EXIT_PARSE", "EXIT_FUEL", "EXIT_USAGE"]

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_FUEL = 3
EXIT_USAGE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _load(path: str) -> CyclicProof:
    return load_proof(_read(path))


def _annotation(text: str | None):
    if text is None or text == "auto":
        return "auto"
    return parse_annotation(text)


def _emit(args, text: str, data: dict) -> None:
    if args.format == "json":
        print(json.dumps(data, sort_keys=True))
    else:
        print(text)


def _verdict(args, p: CyclicProof, ann) -> int:
    verdict = check_proof(p, ann)
    if verdict:
        shown = print_annotation(verdict.root_annotation)
        _emit(args, f"Valid (annotation: {shown})", {"result": "valid", "annotation": shown})
        return EXIT_OK
    text = f"Invalid: {verdict.reason} at node {verdict.node}"
    _emit(args, text, {"result": "invalid", "reason": verdict.reason, "node": verdict.node, "detail": verdict.detail})
    if verdict.detail:
        print(verdict.detail, file=sys.stderr)
    return EXIT_INVALID


def cmd_check(args) -> int:
    return _verdict(args, _load(args.file), _annotation(args.ann))


def cmd_annotate(args) -> int:
    p = _load(args.file)
    ann = _annotation(args.ann)
    if ann == "auto":
        verdict = check_proof(p)
        ann = verdict.root_annotation if verdict else CIRCLE
    try:
        table = infer_annotations(p, ann)
    except AnnotationError as exc:
        print(f"Invalid: AnnotationError: {exc}", file=sys.stderr)
        return EXIT_INVALID
    rows = {nid: print_annotation(a) for nid, a in sorted(table.items())}
    _emit(args, "\n".join(f"{nid}: {a}" for nid, a in rows.items()), {str(k): v for k, v in rows.items()})
    return EXIT_OK


def _require_valid(p: CyclicProof, ann):
    verdict = check_proof(p, ann)
    if not verdict:
        print(f"Invalid: {verdict.reason} at node {verdict.node}", file=sys.stderr)
        return None
    return verdict


def cmd_cutelim(args) -> int:
    p = _load(args.file)
    verdict = _require_valid(p, _annotation(args.ann))
    if verdict is None:
        return EXIT_INVALID
    result = eliminate_cuts(p, verdict.root_annotation, fuel=args.fuel)
    _write(args.output, dump_proof(result))
    return EXIT_OK


def cmd_regularize(args) -> int:
    p = _load(args.file)
    verdict = _require_valid(p, _annotation(args.ann))
    if verdict is None:
        return EXIT_INVALID
    result = regularize(stream_of(p, verdict.root_annotation), fuel=args.fuel)
    _write(args.output, dump_proof(result))
    return EXIT_OK


def _read_sigma(path: str | None) -> list:
    if path is None:
        return []
    text = _read(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    if isinstance(data, list):
        return [parse_formula(item) for item in data]
    if data is not None:
        raise HilbertFormatError("a sigma file holds a JSON list of formulas or one formula per line")
    return [parse_formula(line) for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]


def cmd_translate(args) -> int:
    if args.to == "sequent":
        d = load_derivation(_read(args.file))
        sigma = _read_sigma(args.sigma)
        verdict = check_derivation(d, sigma, ())
        if not verdict:
            print(f"Invalid: {verdict.reason} at node {verdict.node}", file=sys.stderr)
            if verdict.detail:
                print(verdict.detail, file=sys.stderr)
            return EXIT_INVALID
        _write(args.output, dump_proof(hilbert_to_sequent(d, sigma)))
        return EXIT_OK
    p = _load(args.file)
    verdict = _require_valid(p, _annotation(args.ann))
    if verdict is None:
        return EXIT_INVALID
    _write(args.output, dump_derivation(sequent_to_hilbert(p, verdict.root_annotation)))
    return EXIT_OK


def cmd_stats(args) -> int:
    p = _load(args.file)
    verdict = check_proof(p)
    ann = verdict.root_annotation if verdict else CIRCLE
    try:
        classes = len(set(class_partition(p, ann).values()))
    except AnnotationError:
        classes = None
    data = {
        "local_height": local_height(p),
        "nodes": p.node_count(),
        "backlinks": p.backlink_count(),
        "slim": p.is_slim(),
        "cutfree": p.is_cut_free(),
        "classes": classes,
        "candidates": [print_annotation(a) for a in annotation_candidates(p.endsequent)],
    }
    yes = {True: "yes", False: "no"}
    text = (
        f"local_height={data['local_height']} nodes={data['nodes']} backlinks={data['backlinks']} "
        f"slim={yes[data['slim']]} cutfree={yes[data['cutfree']]} classes={classes} "
        f"candidates={','.join(data['candidates'])}"
    )
    _emit(args, text, data)
    return EXIT_OK


def cmd_eq(args) -> int:
    p, q = _load(args.first), _load(args.second)
    if args.fragment is None:
        same = proof_equal(p, q)
    else:
        ann = _annotation(args.ann)
        if ann == "auto":
            verdict = check_proof(p)
            ann = verdict.root_annotation if verdict else CIRCLE
        same = fragment_equal(p, q, ann, args.fragment)
    _emit(args, "equal" if same else "different", {"equal": same})
    return EXIT_OK if same else EXIT_INVALID


def _parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text", help="report format")

    parser = _Parser(prog="kplus", description="Check and transform cyclic proofs for K+.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.set_defaults(handler=handler)
        return cmd

    cmd = add("check", cmd_check, "check a cyclic proof")
    cmd.add_argument("file")
    cmd.add_argument("--ann", default="auto", help="root annotation: a formula, circle or auto")

    cmd = add("annotate", cmd_annotate, "print the annotation of every node")
    cmd.add_argument("file")
    cmd.add_argument("--ann", default="auto")

    cmd = add("cutelim", cmd_cutelim, "eliminate all cuts")
    cmd.add_argument("file")
    cmd.add_argument("-o", "--output")
    cmd.add_argument("--fuel", type=int)
    cmd.add_argument("--ann", default="auto")

    cmd = add("regularize", cmd_regularize, "fold the unfolding back into a cyclic proof")
    cmd.add_argument("file")
    cmd.add_argument("-o", "--output")
    cmd.add_argument("--fuel", type=int)
    cmd.add_argument("--ann", default="auto")

    cmd = add("translate", cmd_translate, "translate between Hilbert derivations and cyclic proofs")
    cmd.add_argument("--to", choices=("sequent", "hilbert"), required=True)
    cmd.add_argument("file")
    cmd.add_argument("--sigma", help="global assumptions: JSON list or one formula per line")
    cmd.add_argument("--ann", default="auto")
    cmd.add_argument("-o", "--output")

    cmd = add("stats", cmd_stats, "report size and shape measures")
    cmd.add_argument("file")

    cmd = add("eq", cmd_eq, "compare two proofs")
    cmd.add_argument("first")
    cmd.add_argument("second")
    cmd.add_argument("--fragment", type=int)
    cmd.add_argument("--ann", default="auto")
    return parser


def run_cli(argv: Sequence[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        if args.command == "translate" and args.to == "sequent" and args.ann != "auto":
            raise UsageError("--ann applies to --to hilbert only")
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ProofFormatError, HilbertFormatError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except AnnotationError as exc:
        print(f"Invalid: AnnotationError: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FuelExhausted as exc:
        print(f"fuel exhausted: {exc}", file=sys.stderr)
        return EXIT_FUEL


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run_cli(argv))

"""Command-line entry point: ``mudt {validate,convert,eval,stats,diff}``.

Exit codes: 0 success/clean, 1 validation errors or threshold unmet,
2 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from functools import partial
from itertools import islice, zip_longest

from . import __version__
from .conllu import iter_sentences, serialize_sentence, build_tree
from .errors import ConlluError, MudtError, PairingError
from .metrics import EvalScores, DivergenceReport, divergence_sentence, fmt, score_sentence
from .schema import load_registry
from .transform import TransformTrace, apply_all, arc_listing, parse_rule_set
from .validator import check_projectivity, validate_sentence

EXIT_OK, EXIT_FINDINGS, EXIT_USAGE = 0, 1, 2
CHUNK = 256


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "tsv", "json"), default="text")
    common.add_argument("--strict", action="store_true", help="abort on the first malformed sentence")
    common.add_argument("--registry", metavar="PATH", help="registry override config")
    common.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
    common.add_argument("--output", "-o", metavar="PATH", help="write to PATH instead of stdout")

    parser = _Parser(prog="mudt", description="Uyghur dependency treebank toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check annotation principles")
    p.add_argument("input")

    p = sub.add_parser("convert", parents=[common], help="convert UD-style trees to MUDT")
    p.add_argument("input")
    p.add_argument("--rules", metavar="R1,R2,...", help="enabled rules (default: all)")
    p.add_argument("--trace", metavar="PATH", help="write the rewrite trace TSV to PATH (default: stderr)")
    p.add_argument("--diff", action="store_true", help="print before/after arcs instead of CoNLL-U")

    p = sub.add_parser("eval", parents=[common], help="attachment scores")
    p.add_argument("gold")
    p.add_argument("pred")
    p.add_argument("--min-las", type=float, metavar="X", help="exit 1 when LAS F1 < X")

    p = sub.add_parser("diff", parents=[common], help="categorized divergence report")
    p.add_argument("gold")
    p.add_argument("pred")

    p = sub.add_parser("stats", parents=[common], help="corpus statistics")
    p.add_argument("input")
    return parser


@contextmanager
def _open_in(path):
    if path == "-":
        yield sys.stdin
    else:
        try:
            f = open(path, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        with f:
            yield f


@contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            yield f


class _Inputs:
    """Streams sentences, reporting malformed blocks on stderr."""

    def __init__(self, strict):
        self.strict = strict
        self.errors = 0

    def sentences(self, stream, name):
        for item in iter_sentences(stream, strict=False):
            if isinstance(item, ConlluError):
                self.errors += 1
                print(f"{name}: {item}", file=sys.stderr)
                if self.strict:
                    raise UsageError(f"{name}: aborting on malformed input (--strict)")
                continue
            yield item


def _chunked(iterable, size):
    it = iter(iterable)
    while chunk := list(islice(it, size)):
        yield chunk


def _pmap(fn, items, jobs):
    """Order-preserving map, optionally across worker processes."""
    if jobs <= 1:
        yield from map(fn, items)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for chunk in _chunked(items, CHUNK):
            yield from pool.map(fn, chunk)


def _numbered(sentences):
    for i, s in enumerate(sentences, 1):
        yield s.sent_id or str(i), s


# -- validate -----------------------------------------------------------------

def _validate_one(item, reg):
    sid, s = item
    return validate_sentence(s, reg, sent_id=sid)


def cmd_validate(args, reg, out):
    inputs = _Inputs(args.strict)
    n_err = n_warn = n_sent = 0
    reports_json = []
    with _open_in(args.input) as f:
        items = _numbered(inputs.sentences(f, args.input))
        for rep in _pmap(partial(_validate_one, reg=reg), items, args.jobs):
            n_sent += 1
            n_err += len(rep.errors)
            n_warn += len(rep.warnings)
            if args.format == "tsv":
                out.write(rep.to_tsv())
            elif args.format == "json":
                reports_json.append(rep.to_dict())
            else:
                for d in rep.diagnostics:
                    ids = ",".join(map(str, d.token_ids)) or "-"
                    out.write(f"{rep.sent_id}\t{d.severity}\t{d.code}\t[{ids}]\t{d.message}\n")
    if args.format == "json":
        out.write(json.dumps({
            "sentences": n_sent, "errors": n_err, "warnings": n_warn,
            "parse_errors": inputs.errors, "reports": reports_json,
        }, ensure_ascii=False, indent=2) + "\n")
    elif args.format == "text":
        out.write(f"{n_sent} sentences, {n_err} errors, {n_warn} warnings")
        out.write(f", {inputs.errors} malformed\n" if inputs.errors else "\n")
    return EXIT_FINDINGS if n_err or inputs.errors else EXIT_OK


# -- convert ------------------------------------------------------------------

def _convert_one(item, reg, rules):
    sid, s = item
    converted, trace = apply_all(s, reg, rules, sent_id=sid)
    return sid, s, converted, trace


def cmd_convert(args, reg, out):
    try:
        rules = parse_rule_set(args.rules)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    inputs = _Inputs(args.strict)
    trace_out = open(args.trace, "w", encoding="utf-8", newline="\n") if args.trace else sys.stderr
    failed = 0
    try:
        with _open_in(args.input) as f:
            items = _numbered(inputs.sentences(f, args.input))
            work = partial(_safe_convert, reg=reg, rules=rules)
            for sid, before, after, trace, problem in _pmap(work, items, args.jobs):
                if problem:
                    # malformed trees pass through unchanged
                    failed += 1
                    print(problem, file=sys.stderr)
                if args.diff:
                    out.write(arc_listing(before, after, sid))
                else:
                    out.write(serialize_sentence(after))
                trace_out.write(trace.to_tsv())
    finally:
        if args.trace:
            trace_out.close()
    if failed or inputs.errors:
        return EXIT_USAGE
    return EXIT_OK


def _safe_convert(item, reg, rules):
    try:
        return (*_convert_one(item, reg, rules), None)
    except MudtError as exc:
        sid, s = item
        return sid, s, s, TransformTrace(sid), f"{sid}: {exc}"


# -- eval / diff --------------------------------------------------------------

def _paired(args, inputs):
    with _open_in(args.gold) as gf, _open_in(args.pred) as pf:
        gold = inputs.sentences(gf, args.gold)
        pred = inputs.sentences(pf, args.pred)
        for g, p in zip_longest(gold, pred):
            if g is None or p is None:
                raise PairingError("gold and prediction have different sentence counts")
            yield g, p


def cmd_eval(args, reg, out):
    inputs = _Inputs(args.strict)
    total = EvalScores()
    for g, p in _paired(args, inputs):
        total = total + score_sentence(g, p, reg)
    if args.format == "tsv":
        out.write(total.to_tsv())
    elif args.format == "json":
        out.write(json.dumps(total.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n")
    else:
        out.write(total.to_text())
    if inputs.errors:
        return EXIT_USAGE
    if args.min_las is not None and total.las_f1 < args.min_las:
        return EXIT_FINDINGS
    return EXIT_OK


def cmd_diff(args, reg, out):
    inputs = _Inputs(args.strict)
    total = DivergenceReport()
    for g, p in _paired(args, inputs):
        total = total + divergence_sentence(g, p)
    if args.format == "tsv":
        out.write(total.to_tsv())
    elif args.format == "json":
        out.write(json.dumps(total.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n")
    else:
        out.write(total.to_text())
    return EXIT_USAGE if inputs.errors else EXIT_OK


# -- stats --------------------------------------------------------------------

def corpus_stats(sentences) -> dict:
    labels, pos, feats = Counter(), Counter(), Counter()
    n_sent = n_tok = trees = projective = depth_sum = 0
    for s in sentences:
        n_sent += 1
        n_tok += len(s)
        for t in s.tokens:
            labels[t.deprel] += 1
            pos[t.pos] += 1
            for k, v in t.feats.items():
                feats[f"{k}={v}"] += 1
        try:
            tree = build_tree(s)
        except MudtError:
            continue
        trees += 1
        depth_sum += tree.depth()
        projective += not check_projectivity(s)
    return {
        "sentences": n_sent,
        "tokens": n_tok,
        "well_formed_trees": trees,
        "projectivity_rate": 100.0 * projective / trees if trees else 0.0,
        "mean_tree_depth": depth_sum / trees if trees else 0.0,
        "labels": dict(sorted(labels.items())),
        "pos": dict(sorted(pos.items())),
        "feats": dict(sorted(feats.items())),
    }


def cmd_stats(args, reg, out):
    inputs = _Inputs(args.strict)
    with _open_in(args.input) as f:
        st = corpus_stats(inputs.sentences(f, args.input))
    if args.format == "json":
        st = dict(st, projectivity_rate=fmt(st["projectivity_rate"]), mean_tree_depth=fmt(st["mean_tree_depth"]))
        out.write(json.dumps(st, ensure_ascii=False, indent=2) + "\n")
    elif args.format == "tsv":
        out.write(f"sentences\t{st['sentences']}\ntokens\t{st['tokens']}\n")
        out.write(f"projectivity_rate\t{fmt(st['projectivity_rate'])}\n")
        out.write(f"mean_tree_depth\t{fmt(st['mean_tree_depth'])}\n")
        for section in ("labels", "pos", "feats"):
            for k, v in st[section].items():
                out.write(f"{section[:-1]}\t{k}\t{v}\n")
    else:
        out.write(f"sentences: {st['sentences']}\ntokens: {st['tokens']}\n")
        out.write(f"projectivity rate: {fmt(st['projectivity_rate'])}%\n")
        out.write(f"mean tree depth: {fmt(st['mean_tree_depth'])}\n")
        for title, section in (("Relations", "labels"), ("POS", "pos"), ("Features", "feats")):
            out.write(f"\n{title}:\n")
            for k, v in sorted(st[section].items(), key=lambda kv: (-kv[1], kv[0])):
                out.write(f"  {k:<20}{v:>8}\n")
    return EXIT_USAGE if inputs.errors else EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "convert": cmd_convert,
    "eval": cmd_eval,
    "diff": cmd_diff,
    "stats": cmd_stats,
}


def run(argv=None) -> int:
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:  # --help / --version
            return exc.code or EXIT_OK
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        try:
            reg = load_registry(args.registry)
        except OSError as exc:
            raise UsageError(f"cannot read registry {args.registry}: {exc.strerror}") from None
        with _open_out(args.output) as out:
            return COMMANDS[args.command](args, reg, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except MudtError as exc:
        print(f"mudt: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())

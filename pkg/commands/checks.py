"""Sub-commands that decide sentences: check, emptiness and fuzz"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict

from config import settings
from models.expressions import SignatureProfile
from models.formulas import Formula
from models.schemas import EngineKind, Family, Language, RunReport, Verdict
from services import corpus
from services.algebra import to_sexpr
from services.closure import emptiness
from services.data_handler import data_handler
from services.engine import as_sentence, check
from services.fuzzer import fuzz

logger = logging.getLogger(__name__)


def _sentence(args: argparse.Namespace, digests: Dict[str, str]) -> Formula:
    """The formula file, or a named sentence from the corpus"""
    if args.sentence:
        return corpus.sentence(args.sentence)
    if not args.formula:
        raise ValueError("A formula file or --sentence NAME is required")
    digests["formula"] = data_handler.digest(args.formula)
    return data_handler.load_formula(args.formula, Language(args.language))


def _print(report: RunReport) -> None:
    sys.stdout.write(data_handler.dump_report(report) + "\n")


def cmd_check(args: argparse.Namespace) -> int:
    digests = {"graph": data_handler.digest(args.graph)}
    G = data_handler.load_graph(args.graph)
    f = _sentence(args, digests)
    D = None
    if args.decomposition:
        digests["decomposition"] = data_handler.digest(args.decomposition)
        D = data_handler.load_decomposition(args.decomposition)
    value, report = check(G, f, args.width, Family(args.family), D, EngineKind(args.engine))
    report.input_digests = digests
    _print(report)
    return 0 if value else 1


def cmd_emptiness(args: argparse.Namespace) -> int:
    digests: Dict[str, str] = {}
    f = as_sentence(_sentence(args, digests))
    profile = SignatureProfile(Family(args.family), args.width, loops=args.loops, n=args.type)
    result = emptiness(f, profile)
    report = RunReport(
        tool=settings.APP_NAME,
        version=settings.APP_VERSION,
        command="emptiness",
        verdict=Verdict.EMPTY if result.empty else Verdict.WITNESS,
        family=profile.family,
        width_bound=profile.k,
        closure_formulas=result.closure_size,
        automaton_states=result.states,
        input_digests=digests,
    )
    if not result.empty:
        report.expression_nodes = result.witness.size
        report.details["witness"] = to_sexpr(result.witness)
        report.details["witness_graph"] = result.graph.summary()
        report.details["verified"] = result.verified
        if args.witness:
            prefix = Path(args.witness)
            data_handler.save_expression(result.witness, prefix.with_suffix(".expr"))
            data_handler.save_graph(result.graph, prefix.with_suffix(".graph.json"))
    _print(report)
    return 1 if result.empty else 0


def cmd_fuzz(args: argparse.Namespace) -> int:
    result = fuzz(args.graphs, args.sentences, args.seed, args.max_vertices,
                  Path(args.out) if args.out else None)
    report = RunReport(
        tool=settings.APP_NAME,
        version=settings.APP_VERSION,
        command="fuzz",
        details=result.summary(),
    )
    _print(report)
    return 0 if result.ok else 1


def _formula_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("formula", nargs="?")
    p.add_argument("--sentence", "-s", help="Use a named sentence instead of a formula file")
    p.add_argument("--language", choices=[l.value for l in Language], default="direct")


def register(subparsers) -> None:
    """Add the checking sub-commands to an argparse sub-parser group"""
    p = subparsers.add_parser("check", help="Decide a sentence on a graph")
    p.add_argument("graph")
    _formula_arguments(p)
    p.add_argument("--width", "-k", type=int, required=True)
    p.add_argument("--family", choices=[f.value for f in Family], default="tree")
    p.add_argument("--decomposition", "-d")
    p.add_argument("--engine", choices=[e.value for e in EngineKind], default="inductive")
    p.set_defaults(handler=cmd_check)

    p = subparsers.add_parser("emptiness", help="Decide whether any width-bounded graph satisfies a sentence")
    _formula_arguments(p)
    p.add_argument("--width", "-k", type=int, required=True)
    p.add_argument("--family", choices=[f.value for f in Family], default="tree")
    p.add_argument("--type", "-n", type=int, default=0)
    p.add_argument("--loops", action="store_true")
    p.add_argument("--witness", "-w", help="File prefix for the witness expression and graph")
    p.set_defaults(handler=cmd_emptiness)

    p = subparsers.add_parser("fuzz", help="Cross-check engines against the brute-force oracle")
    p.add_argument("--graphs", type=int, default=settings.FUZZ_GRAPHS)
    p.add_argument("--sentences", type=int, default=settings.FUZZ_SENTENCES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-vertices", type=int, default=settings.FUZZ_MAX_VERTICES)
    p.add_argument("--out", help="Directory for reproduction files")
    p.set_defaults(handler=cmd_fuzz)

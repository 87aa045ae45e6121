"""Sub-commands that transform graphs, decompositions, expressions and formulas"""
import argparse
import logging
import sys
from typing import Optional

from models.schemas import DecompositionKind, Family, Language
from services import decomposer
from services.algebra import evaluate, locality, to_sexpr
from services.data_handler import data_handler
from services.engine import build_expression
from services.formula_parser import to_text
from services.translation import translate

logger = logging.getLogger(__name__)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def cmd_decompose(args: argparse.Namespace) -> int:
    G = data_handler.load_graph(args.graph)
    kind = DecompositionKind(args.family)
    D = decomposer.decompose(G, args.width, kind, terminals_together=args.verdant)
    if args.verdant:
        D = decomposer.verdurous_root(D, G) if kind == DecompositionKind.PATH else decomposer.verdant_root(D, G)
    if args.nice:
        if D.root is None:
            ends = [node for node in D.nodes if len(D.adjacency[node]) <= 1]
            D = D.rooted_at(ends[0] if kind == DecompositionKind.PATH else D.nodes[0])
        D = decomposer.make_nice(D)
    logger.info("Decomposition of width %d with %d nodes", D.width, len(D.nodes))
    _emit(data_handler.dump_decomposition(D), args.output)
    return 0


def cmd_build_expr(args: argparse.Namespace) -> int:
    G = data_handler.load_graph(args.graph)
    D = data_handler.load_decomposition(args.decomposition) if args.decomposition else None
    family = Family(args.family)
    e, _ = build_expression(G, args.width, family, D)
    logger.info("Expression with %d nodes, out-types %s", e.size, sorted(locality(e)))
    _emit(to_sexpr(e) + "\n", args.output)
    return 0


def cmd_eval_expr(args: argparse.Namespace) -> int:
    e = data_handler.load_expression(args.expression)
    G = evaluate(e, loops=args.loops)
    logger.info("Expression evaluates to %s", G.summary())
    _emit(data_handler.dump_graph(G), args.output)
    return 0


def cmd_translate(args: argparse.Namespace) -> int:
    # Circuitous formulas parse as direct ones and translate to themselves
    f = data_handler.load_formula(args.formula, Language.DIRECT)
    _emit(to_text(translate(f)) + "\n", args.output)
    return 0


def register(subparsers) -> None:
    """Add the graph sub-commands to an argparse sub-parser group"""
    p = subparsers.add_parser("decompose", help="Find a tree- or path-decomposition of bounded width")
    p.add_argument("graph")
    p.add_argument("--width", "-k", type=int, required=True)
    p.add_argument("--family", choices=[k.value for k in DecompositionKind], default="tree")
    p.add_argument("--nice", action="store_true", help="Make the output nice")
    p.add_argument("--verdant", action="store_true", help="Root at a bag holding every terminal")
    p.add_argument("--output", "-o")
    p.set_defaults(handler=cmd_decompose)

    p = subparsers.add_parser("build-expr", help="Compile a graph into an algebra expression")
    p.add_argument("graph")
    p.add_argument("--width", "-k", type=int, default=0)
    p.add_argument("--family", choices=[f.value for f in Family], default="tree")
    p.add_argument("--decomposition", "-d")
    p.add_argument("--output", "-o")
    p.set_defaults(handler=cmd_build_expr)

    p = subparsers.add_parser("eval-expr", help="Evaluate an expression to its graph")
    p.add_argument("expression")
    p.add_argument("--loops", action="store_true", help="Evaluate in loop mode")
    p.add_argument("--output", "-o")
    p.set_defaults(handler=cmd_eval_expr)

    p = subparsers.add_parser("translate", help="Translate a direct formula into the circuitous language")
    p.add_argument("formula")
    p.add_argument("--output", "-o")
    p.set_defaults(handler=cmd_translate)

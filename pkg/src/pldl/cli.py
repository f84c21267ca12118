"""Command-line interface.

Exit codes: 0 for a positive verdict or plain success, 1 for a negative
verdict, 2 for usage and parse errors. Formulas may be given inline or as
``@path`` to read them from a file.
"""
from __future__ import annotations

import argparse
import random
import sys

from . import modelcheck as mc
from . import realizability as real
from .automata.alternating import build_aba, build_parametric_aba, region_bounds
from .automata.breakpoint import counter_breakpoint, mh_to_nba
from .automata.buchi import nba_accepts
from .automata.parity import determinize
from .dot import export_dot
from .formula import FragmentTag, all_variables, classify, negate
from .generate import corpus
from .oracle import all_lassos, models
from .syntax import (
    ParseError, SystemFormatError, format_valuation, parse_formula, parse_lasso,
    parse_system, parse_valuation, print_formula,
)


class UsageError(Exception):
    pass


def _text(arg: str) -> str:
    if arg.startswith("@"):
        try:
            with open(arg[1:], encoding="utf-8") as fh:
                return fh.read().strip()
        except OSError as exc:
            raise UsageError(f"cannot read {arg[1:]}: {exc.strerror}") from None
    return arg


def _formula(args, arg: str):
    return parse_formula(_text(arg), allow_cp=getattr(args, "allow_cp", False))


def _system(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_system(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _names(text: str | None) -> set[str]:
    if not text:
        return set()
    return {p for p in text.replace(",", " ").split() if p}


def _value(v) -> str:
    return "none" if v is None else str(v)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_classify(args) -> int:
    tag = classify(_formula(args, args.formula))
    print(tag.value)
    return 1 if tag is FragmentTag.NOT_WELL_FORMED else 0


def cmd_negate(args) -> int:
    print(print_formula(negate(_formula(args, args.formula))))
    return 0


def _automaton(args):
    phi = _formula(args, args.formula)
    alpha = parse_valuation(args.valuation or "")
    if args.command == "to-aba":
        return build_parametric_aba(phi) if all_variables(phi) else build_aba(phi)
    if all_variables(phi):
        aba = build_parametric_aba(phi)
        nba = counter_breakpoint(aba, region_bounds(aba, alpha))
    else:
        nba = mh_to_nba(build_aba(phi))
    return nba if args.command == "to-nba" else determinize(nba)


def cmd_automaton(args) -> int:
    aut = _automaton(args)
    if args.dot:
        sys.stdout.write(export_dot(aut))
        return 0
    print(f"states {len(aut.delta)}")
    print(f"initial {aut.initial}")
    if hasattr(aut, "accepting"):
        print(f"accepting {len(aut.accepting)}")
    else:
        print(f"colors {len(set(aut.colors))}")
    return 0


def cmd_mc(args) -> int:
    verdict = mc.model_check(_system(args.system), _formula(args, args.formula))
    print(mc.format_verdict(verdict))
    return 0 if verdict.satisfied else 1


def cmd_mc_opt(args) -> int:
    res = mc.mc_optimize(_system(args.system), _formula(args, args.formula), args.objective)
    print(f"VALUE {_value(res.value)}")
    if res.valuation is not None:
        print("VALUATION " + format_valuation(res.valuation))
    return 1 if res.value is None else 0


def cmd_agmc(args) -> int:
    verdict = mc.ag_check(_system(args.system), _formula(args, args.assume),
                          _formula(args, args.guarantee))
    print(mc.format_verdict(verdict))
    return 0 if verdict.satisfied else 1


def cmd_implies(args) -> int:
    props = _names(args.props) or None
    holds = mc.implication(_formula(args, args.assume), _formula(args, args.guarantee), props)
    print("true" if holds else "false")
    return 0 if holds else 1


def _partition(args):
    return _names(args.inputs), _names(args.outputs)


def cmd_realize(args) -> int:
    ins, outs = _partition(args)
    phi = _formula(args, args.formula)
    if args.valuation is not None:
        verdict = real.real_query(phi, ins, outs, parse_valuation(args.valuation))
    else:
        verdict = real.realize(phi, ins, outs)
    if args.dot and verdict.strategy is not None:
        sys.stdout.write(export_dot(verdict.strategy))
        return 0
    print("RESULT " + ("realizable" if verdict.realizable else "unrealizable"))
    if verdict.realizable:
        print("VALUATION " + format_valuation(verdict.valuation))
        sys.stdout.write(real.format_transducer(verdict.strategy))
    return 0 if verdict.realizable else 1


def cmd_realize_opt(args) -> int:
    ins, outs = _partition(args)
    res = real.real_optimize(_formula(args, args.formula), ins, outs, args.objective)
    print(f"VALUE {_value(res.value)}")
    if res.valuation is not None:
        print("VALUATION " + format_valuation(res.valuation))
    if res.strategy is not None:
        sys.stdout.write(real.format_transducer(res.strategy))
    return 1 if res.value is None else 0


def cmd_eval(args) -> int:
    w = parse_lasso(args.lasso)
    phi = _formula(args, args.formula)
    alpha = parse_valuation(args.valuation or "")
    missing = all_variables(phi) - set(alpha)
    if missing:
        raise UsageError(f"unassigned variables: {', '.join(sorted(missing))}")
    holds = models(w, alpha, phi)
    print("true" if holds else "false")
    return 0 if holds else 1


def cmd_selftest(args) -> int:
    """Compare automaton membership with the oracle on random formulas."""
    formulas = corpus(args.count, seed=args.seed, max_size=args.max_size, cp_color="b")
    words = list(all_lassos(["a", "b"], args.length))
    failures = 0
    for phi in formulas:
        nba = mh_to_nba(build_aba(phi, ["a", "b"]))
        for w in words:
            if nba_accepts(nba, w) != models(w, {}, phi):
                failures += 1
                print(f"MISMATCH {print_formula(phi)} on {w}")
                break
    print(f"selftest seed={args.seed} formulas={len(formulas)} words={len(words)} "
          f"failures={failures}")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pldl", description="Parametric linear dynamic logic toolkit")
    parser.add_argument("--allow-cp", action="store_true",
                        help="accept changepoint-bounded operators in formulas")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, *positional, **kw):
        p = sub.add_parser(name, **kw)
        for arg in positional:
            p.add_argument(arg)
        p.add_argument("--allow-cp", action="store_true", default=argparse.SUPPRESS)
        p.set_defaults(func=func)
        return p

    add("classify", cmd_classify, "formula", help="report the fragment of a formula")
    add("negate", cmd_negate, "formula", help="print the negation normal form of the negation")
    kinds = {"to-aba": "alternating Buchi", "to-nba": "nondeterministic Buchi",
             "to-dpa": "deterministic parity"}
    for name, kind in kinds.items():
        p = add(name, cmd_automaton, "formula", help=f"build the {kind} automaton of a formula")
        p.add_argument("--dot", action="store_true", help="emit Graphviz DOT")
        p.add_argument("--valuation", help="variable bounds, e.g. x=2,y=0")
    add("mc", cmd_mc, "system", "formula", help="model check a system")
    p = add("mc-opt", cmd_mc_opt, "system", "formula", help="optimal model-checking valuation")
    p.add_argument("--objective", required=True, choices=mc.OBJECTIVES)
    add("agmc", cmd_agmc, "system", "assume", "guarantee", help="assume-guarantee model checking")
    p = add("implies", cmd_implies, "assume", "guarantee", help="formula implication")
    p.add_argument("--props", help="proposition universe, comma separated")
    p = add("realize", cmd_realize, "formula", help="decide realizability")
    p.add_argument("--inputs", default="")
    p.add_argument("--outputs", default="")
    p.add_argument("--valuation", help="decide at exactly this valuation")
    p.add_argument("--dot", action="store_true", help="emit the strategy as DOT")
    p = add("realize-opt", cmd_realize_opt, "formula", help="optimal realizability valuation")
    p.add_argument("--inputs", default="")
    p.add_argument("--outputs", default="")
    p.add_argument("--objective", required=True, choices=real.OBJECTIVES)
    p = add("eval", cmd_eval, "lasso", "formula", help="evaluate a formula on a lasso word")
    p.add_argument("--valuation", help="variable values, e.g. x=2")
    p = add("selftest", cmd_selftest, help="automaton-versus-oracle check on random formulas")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=30)
    p.add_argument("--max-size", type=int, default=8)
    p.add_argument("--length", type=int, default=3, help="maximal lasso length")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ParseError, SystemFormatError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import yaml

from automata.bounds import OperationId, bound_table, evaluate, write_bound_csv
from automata.core import write_dfa
from automata.witnesses import build, monoid_size, parse_witness
from verifier.harness import RENDERERS, conjecture_scan, exit_code, verify_cell, verify_table
from verifier.oracle import membership_oracle
from verifier.settings import DEFAULT_CONFIG, HarnessSettings, load_settings, parse_pair

logger = logging.getLogger(__name__)

USAGE_ERROR = 2


def parse_range(text: str) -> List[int]:
    """'3..6' -> [3, 4, 5, 6]; '4' -> [4]."""
    low, sep, high = text.partition("..")
    try:
        if not sep:
            return [int(text)]
        values = list(range(int(low), int(high) + 1))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO..HI, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return values


def parse_op(text: str) -> OperationId:
    try:
        return OperationId.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verifier",
        description="Witness DFAs, combined-operation constructions and state-complexity checks.",
    )
    parser.add_argument("--config", type=Path, default=DEFAULT_CONFIG, help="YAML configuration file")
    parser.add_argument("--log-level", help="overrides logging.level from the config")
    verbs = parser.add_subparsers(dest="verb", required=True)

    witness = verbs.add_parser("witness", help="print a witness DFA in text format")
    witness.add_argument("spec", help="e.g. U:n=5:order=dcba")

    complexity = verbs.add_parser("complexity", help="measured state complexity of one cell")
    complexity.add_argument("op", type=parse_op)
    complexity.add_argument("--m", type=int, default=3)
    complexity.add_argument("--n", type=int, required=True)
    complexity.add_argument("--cap", type=int)

    bound = verbs.add_parser("bound", help="closed-form bound value, or the bound table as CSV with 'all'")
    bound.add_argument("op")
    bound.add_argument("--m", type=parse_range, default=[3])
    bound.add_argument("--n", type=parse_range, required=True)

    verify = verbs.add_parser("verify", help="measure cells and compare with the bounds")
    verify.add_argument("op", nargs="?", default="all")
    verify.add_argument("--m", type=parse_range, default=parse_range("3..6"))
    verify.add_argument("--n", type=parse_range, default=parse_range("3..6"))
    verify.add_argument("--format", choices=sorted(RENDERERS))
    verify.add_argument("--cap", type=int)
    verify.add_argument("--jobs", type=int)
    verify.add_argument("--minimizer", choices=["hopcroft", "moore"])
    verify.add_argument("--alternates", action="store_true", help="also measure alternate witness pairs")
    verify.add_argument("--no-timing", action="store_true", help="report 0 ms for byte-identical output")

    oracle = verbs.add_parser("oracle", help="compare pipeline membership with direct semantics")
    oracle.add_argument("op", type=parse_op)
    oracle.add_argument("--m", type=int, default=3)
    oracle.add_argument("--n", type=int, required=True)
    oracle.add_argument("--words", help="number of random words, or 'all' for every word up to --maxlen")
    oracle.add_argument("--maxlen", type=int)
    oracle.add_argument("--seed", type=int)

    conjecture = verbs.add_parser("conjecture", help="scan (K∩L)* with the five-letter witnesses")
    conjecture.add_argument("--pairs", help="e.g. 3:3,3:4,3:5")
    conjecture.add_argument("--cap", type=int)
    conjecture.add_argument("--bit-cap", type=int)
    conjecture.add_argument("--difference", action="store_true", help="also run (K\\L)* with the six-letter pair")
    conjecture.add_argument("--format", choices=sorted(RENDERERS))

    monoid = verbs.add_parser("monoid", help="size of the transition monoid of a witness")
    monoid.add_argument("spec")
    monoid.add_argument("--letters", help="generating letters, default all")

    return parser


# ------------------------------
#            Verbs
# ------------------------------


def _witness(args, settings: HarnessSettings) -> int:
    sys.stdout.write(write_dfa(build(parse_witness(args.spec))))
    return 0


def _complexity(args, settings: HarnessSettings) -> int:
    cell = verify_cell(args.op, args.m, args.n, cap=settings.cap,
                       minimizer=settings.minimizer, measuring=True)
    print(cell.verdict.value if cell.measured is None else cell.measured)
    return 0


def _bound(args, settings: HarnessSettings) -> int:
    if args.op == "all":
        write_bound_csv(bound_table(list(OperationId), args.m, args.n), sys.stdout)
        return 0
    op = OperationId.parse(args.op)
    print(evaluate(op, args.m[0], args.n[0]))
    return 0


def _verify(args, settings: HarnessSettings) -> int:
    ops = list(OperationId) if args.op == "all" else [OperationId.parse(args.op)]
    result = verify_table(
        ops,
        args.m,
        args.n,
        jobs=settings.jobs,
        cap=settings.cap,
        minimizer=settings.minimizer,
        alternates=args.alternates,
        diagnostic_labels=settings.diagnostic_labels,
    )
    render = RENDERERS[settings.report_format]
    sys.stdout.write(render(result.cells, timing=settings.timing and not args.no_timing))
    return result.exit_code


def _oracle(args, settings: HarnessSettings) -> int:
    words = args.words or str(settings.oracle_words)
    exhaustive = words == "all"
    report = membership_oracle(
        args.op,
        args.m,
        args.n,
        count=0 if exhaustive else int(words),
        maxlen=settings.oracle_maxlen if args.maxlen is None else args.maxlen,
        seed=settings.seed if args.seed is None else args.seed,
        exhaustive=exhaustive,
        minimizer=settings.minimizer,
        cap=settings.cap,
    )
    print(report.model_dump_json(indent=2))
    return 0 if report.ok else 1


def _conjecture(args, settings: HarnessSettings) -> int:
    pairs = [parse_pair(p) for p in args.pairs.split(",")] if args.pairs else settings.conjecture_pairs
    cells = conjecture_scan(
        pairs,
        bit_cap=settings.bit_cap,
        cap=settings.cap,
        minimizer=settings.minimizer,
        difference=args.difference,
    )
    render = RENDERERS[settings.report_format]
    sys.stdout.write(render(cells, timing=settings.timing))
    return exit_code(cells)


def _monoid(args, settings: HarnessSettings) -> int:
    spec = parse_witness(args.spec)
    d = build(spec)
    letters = args.letters or "".join(d.alphabet)
    print(monoid_size(d, letters))
    return 0


# command-line flag -> settings field
_OVERRIDES = {
    "cap": "cap",
    "jobs": "jobs",
    "bit_cap": "bit_cap",
    "minimizer": "minimizer",
    "format": "report_format",
}


def with_overrides(args, settings: HarnessSettings) -> HarnessSettings:
    """Flags given on the command line replace config values and go through the same validation."""
    overrides = {
        field: getattr(args, flag)
        for flag, field in _OVERRIDES.items()
        if getattr(args, flag, None) is not None
    }
    if not overrides:
        return settings
    return HarnessSettings(**{**settings.model_dump(), **overrides})


VERBS = {
    "witness": _witness,
    "complexity": _complexity,
    "bound": _bound,
    "verify": _verify,
    "oracle": _oracle,
    "conjecture": _conjecture,
    "monoid": _monoid,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = load_settings(args.config)
    except (OSError, ValueError, yaml.YAMLError) as e:
        print(f"error: cannot load configuration: {e}", file=sys.stderr)
        return USAGE_ERROR

    logging.basicConfig(level=(args.log_level or settings.log_level).upper())
    try:
        return VERBS[args.verb](args, with_overrides(args, settings))
    except ValueError as e:
        logger.error(f"{args.verb} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``eisen split | analytic | empirical | compare``.

Exit codes: 0 ok, 1 comparison failed, 2 field rejected, 3 divergent or
undefined quantity, 4 budget, 5 factoring, 64 usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import Optional

from .eisenstein import FLAVORS, PLAIN, SHIFTED
from .errors import (
    BudgetExceeded,
    DensityZero,
    FactorTooHard,
    FieldRejected,
    ParseError,
    ResidueFieldTooLarge,
    TailDiverges,
)
from .lab import DEFAULT_BUDGET, DEFAULT_SEED, EXHAUSTIVE, MONTECARLO, BoxSpec, compare, exhaustive_scan, monte_carlo_scan
from .moments import D2_NOTE, analyze
from .numberfield import NumberField, read_field_descriptor
from . import report

EXIT_OK = 0
EXIT_COMPARE_FAILED = 1
EXIT_FIELD = 2
EXIT_DIVERGENT = 3
EXIT_BUDGET = 4
EXIT_FACTOR = 5
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    field_source: str
    from_file: bool = False
    d: int = 2
    flavor: str = PLAIN
    M: int = 1000
    H: int = 10
    order: Optional[int] = None
    mode: str = MONTECARLO
    samples: int = 100_000
    seed: int = DEFAULT_SEED
    tolerance: float = 0.01
    fmt: str = "text"
    threads: Optional[int] = None
    budget: int = DEFAULT_BUDGET
    precision: int = report.DEFAULT_PRECISION
    method: str = "auto"

    def validate(self):
        if self.d < 2:
            raise UsageError("d must be >= 2")
        if self.flavor not in FLAVORS:
            raise UsageError(f"flavor must be one of {FLAVORS}")
        for name in ("M", "H", "samples", "budget"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be >= 1")
        if self.order is not None and not 1 <= self.order <= 20:
            raise UsageError("moment order must be in 1..20")
        if self.tolerance < 0:
            raise UsageError("tolerance must be >= 0")
        if self.precision < 0:
            raise UsageError("precision must be >= 0")

    @property
    def moments_blocked(self) -> bool:
        return self.flavor == SHIFTED and self.d == 2

    def analytic_order(self) -> Optional[int]:
        """Order to request from the analytic engine; None means density only."""
        if self.moments_blocked:
            if self.order is not None:
                raise TailDiverges(f"moments requested for {D2_NOTE}")
            return None
        return 2 if self.order is None else self.order

    def field(self) -> NumberField:
        if self.from_file:
            try:
                poly = read_field_descriptor(self.field_source)
            except OSError as exc:
                raise UsageError(f"cannot read field file: {exc}") from exc
        else:
            poly = self.field_source
        return NumberField(poly)


def _add_field(p):
    g = p.add_argument_group("field")
    x = g.add_mutually_exclusive_group(required=True)
    x.add_argument("--field", help='defining polynomial, e.g. "x^2+1"')
    x.add_argument("--field-file", help="descriptor file with a line f = ...")


def _add_output(p):
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--precision", type=int, default=report.DEFAULT_PRECISION, help="decimal places")


def _add_system(p, order_help="highest moment order"):
    p.add_argument("-d", type=int, default=2, help="polynomial degree")
    p.add_argument("--flavor", choices=FLAVORS, default=PLAIN)
    p.add_argument("-n", dest="order", type=int, default=None, help=order_help)


def _add_analytic(p):
    p.add_argument("-M", type=int, default=1000, help="rational-prime cutoff")


def _add_empirical(p):
    p.add_argument("-H", type=int, default=10, help="box half-width")
    p.add_argument("--mode", choices=(EXHAUSTIVE, MONTECARLO), default=MONTECARLO)
    p.add_argument("--method", choices=("auto", "factored", "naive"), default="auto")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threads", type=int, default=None, help="worker cap (fallback: EISEN_THREADS)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max tuples for exhaustive scans")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="eisen", description="Densities and moments of Eisenstein polynomials over number fields.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("split", help="list prime ideals above p <= M")
    _add_field(p)
    p.add_argument("-M", type=int, default=100)
    _add_output(p)

    p = sub.add_parser("analytic", help="enclosures of density and moments")
    _add_field(p)
    _add_system(p)
    _add_analytic(p)
    _add_output(p)

    p = sub.add_parser("empirical", help="box counts, exhaustive or Monte Carlo")
    _add_field(p)
    _add_system(p)
    _add_empirical(p)
    _add_output(p)

    p = sub.add_parser("compare", help="empirical vs analytic, PASS/FAIL per quantity")
    src = p.add_argument_group("inputs (either a field or two saved JSON reports)")
    x = src.add_mutually_exclusive_group()
    x.add_argument("--field")
    x.add_argument("--field-file")
    src.add_argument("--analytic-report", help="saved analytic JSON report")
    src.add_argument("--empirical-report", help="saved empirical JSON report")
    _add_system(p)
    _add_analytic(p)
    _add_empirical(p)
    p.add_argument("--tolerance", type=float, default=0.01)
    _add_output(p)
    return ap


def config_from_args(args) -> RunConfig:
    field_source = args.field if getattr(args, "field", None) is not None else getattr(args, "field_file", None)
    cfg = RunConfig(field_source=field_source, from_file=getattr(args, "field", None) is None)
    for name in ("d", "flavor", "M", "H", "order", "mode", "samples", "seed", "tolerance",
                 "threads", "budget", "precision", "method"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    cfg.fmt = args.format
    cfg.validate()
    return cfg


def cmd_split(cfg: RunConfig) -> tuple[dict, int]:
    F = cfg.field()
    return report.split_document(str(F), cfg.M, F.primes_up_to(cfg.M)), EXIT_OK


def _analytic_doc(cfg: RunConfig, F: NumberField) -> dict:
    rep = analyze(F, cfg.d, cfg.flavor, cfg.M, cfg.analytic_order())
    return report.analytic_document(rep, cfg.precision)


def cmd_analytic(cfg: RunConfig) -> tuple[dict, int]:
    return _analytic_doc(cfg, cfg.field()), EXIT_OK


def _empirical_doc(cfg: RunConfig, F: NumberField) -> dict:
    box = BoxSpec(F, cfg.H, cfg.d)
    order = cfg.order or 2
    if cfg.mode == EXHAUSTIVE:
        rep = exhaustive_scan(box, cfg.flavor, order, cfg.budget, cfg.threads, cfg.method)
    else:
        rep = monte_carlo_scan(box, cfg.flavor, cfg.samples, cfg.seed, order, cfg.threads)
    return report.empirical_document(rep, cfg.precision)


def cmd_empirical(cfg: RunConfig) -> tuple[dict, int]:
    return _empirical_doc(cfg, cfg.field()), EXIT_OK


def _load(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read report {path}: {exc}") from exc


def cmd_compare(cfg: RunConfig, args) -> tuple[dict, int]:
    if args.analytic_report or args.empirical_report:
        if not (args.analytic_report and args.empirical_report):
            raise UsageError("--analytic-report and --empirical-report go together")
        a_doc, e_doc = _load(args.analytic_report), _load(args.empirical_report)
        if a_doc.get("kind") != "analytic" or e_doc.get("kind") != "empirical":
            raise UsageError("expected one analytic and one empirical report")
        for key in ("field", "d", "flavor"):
            if a_doc[key] != e_doc[key]:
                raise UsageError(f"reports disagree on {key}: {a_doc[key]!r} vs {e_doc[key]!r}")
    else:
        if cfg.field_source is None:
            raise UsageError("give --field/--field-file or two saved reports")
        F = cfg.field()
        a_doc = _analytic_doc(cfg, F)
        e_doc = _empirical_doc(cfg, F)
    verdict = compare(report.analytic_from_document(a_doc), report.empirical_from_document(e_doc), cfg.tolerance)
    doc = report.comparison_document(verdict, a_doc, e_doc, cfg.precision)
    doc["notes"] = list(a_doc.get("notes", []))
    return doc, EXIT_OK if verdict.passed else EXIT_COMPARE_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = config_from_args(args)
        if args.command == "split":
            doc, code = cmd_split(cfg)
        elif args.command == "analytic":
            doc, code = cmd_analytic(cfg)
        elif args.command == "empirical":
            doc, code = cmd_empirical(cfg)
        else:
            doc, code = cmd_compare(cfg, args)
    except (UsageError, ParseError) as exc:
        return _fail(EXIT_USAGE, exc)
    except FieldRejected as exc:
        return _fail(EXIT_FIELD, exc)
    except (TailDiverges, DensityZero) as exc:
        return _fail(EXIT_DIVERGENT, exc)
    except (BudgetExceeded, ResidueFieldTooLarge) as exc:
        return _fail(EXIT_BUDGET, exc)
    except FactorTooHard as exc:
        return _fail(EXIT_FACTOR, exc)
    sys.stdout.write(report.render(doc, cfg.fmt))
    sys.stdout.flush()
    return code


def _fail(code: int, exc: Exception) -> int:
    print(f"eisen: error: {exc}", file=sys.stderr)
    return code


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()

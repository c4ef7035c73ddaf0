"""JSON / CSV / text rendering of analytic, empirical, comparison and split reports.

Reports are first turned into a plain dict (the JSON document); CSV and text
are rendered from that dict so all three formats carry the same numbers.
Rationals are written as a decimal string plus exact numerator/denominator.
"""

from __future__ import annotations

import csv
import io
import json
from importlib import resources
from typing import Optional

import gmpy2
from gmpy2 import mpq, mpz

from .lab import ComparisonVerdict, EmpiricalReport
from .moments import AnalyticReport, EnclosedValue

DEFAULT_PRECISION = 20
FLOOR, CEIL, NEAREST = "floor", "ceil", "nearest"


def decimal_string(x, digits: int = DEFAULT_PRECISION, mode: str = NEAREST) -> str:
    """x rounded to ``digits`` places: down for FLOOR, up for CEIL."""
    q = mpq(x)
    scaled = q * mpz(10) ** digits
    if mode == FLOOR:
        n = gmpy2.f_div(scaled.numerator, scaled.denominator)
    elif mode == CEIL:
        n = gmpy2.c_div(scaled.numerator, scaled.denominator)
    else:
        n = gmpy2.f_div(2 * scaled.numerator + scaled.denominator, 2 * scaled.denominator)
    sign = "-" if n < 0 else ""
    s = str(abs(n)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + s
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def rational(x, digits: int = DEFAULT_PRECISION, mode: str = NEAREST) -> dict:
    q = mpq(x)
    return {
        "decimal": decimal_string(q, digits, mode),
        "num": str(q.numerator),
        "den": str(q.denominator),
    }


def parse_rational(obj: dict) -> mpq:
    return mpq(mpz(obj["num"]), mpz(obj["den"]))


def enclosure_row(name: str, v: EnclosedValue, digits: int) -> dict:
    return {
        "quantity": name,
        "lo": rational(v.lo, digits, FLOOR),
        "hi": rational(v.hi, digits, CEIL),
        "width": rational(v.width, digits, CEIL),
    }


def analytic_document(rep: AnalyticReport, digits: int = DEFAULT_PRECISION) -> dict:
    doc = {
        "kind": "analytic",
        "field": rep.field,
        "d": rep.d,
        "flavor": rep.flavor,
        "M": rep.M,
        "divergent": rep.divergent is not None,
        "notes": list(rep.notes),
        "quantities": [enclosure_row(k, v, digits) for k, v in rep.quantities.items()],
    }
    if rep.divergent is not None:
        one = EnclosedValue.exact(rep.divergent.value)
        doc["quantities"].insert(0, enclosure_row("density", one, digits))
        doc["partial_density"] = rational(rep.divergent.partial, digits, FLOOR)
    return doc


def empirical_document(rep: EmpiricalReport, digits: int = DEFAULT_PRECISION) -> dict:
    rows = [
        {"quantity": k, "value": rational(e.value, digits), "standard_error": e.standard_error}
        for k, e in rep.quantities().items()
    ]
    return {
        "kind": "empirical",
        "field": rep.field,
        "d": rep.d,
        "flavor": rep.flavor,
        "H": rep.H,
        "mode": rep.mode,
        "method": rep.method,
        "samples": rep.samples,
        "seed": rep.seed,
        "order": rep.order,
        "total": str(rep.total),
        "in_target": str(rep.in_target),
        "power_sums": [str(s) for s in rep.power_sums],
        "quantities": rows,
    }


def comparison_document(
    verdict: ComparisonVerdict, analytic: dict, empirical: dict, digits: int = DEFAULT_PRECISION
) -> dict:
    rows = []
    for r in verdict.rows:
        rows.append(
            {
                "quantity": r.quantity,
                "empirical": rational(r.empirical, digits),
                "standard_error": r.standard_error,
                "lo": rational(r.lo, digits, FLOOR),
                "hi": rational(r.hi, digits, CEIL),
                "delta": r.delta,
                "allowed": r.allowed,
                "verdict": "PASS" if r.passed else "FAIL",
            }
        )
    return {
        "kind": "compare",
        "field": analytic["field"],
        "d": analytic["d"],
        "flavor": analytic["flavor"],
        "M": analytic["M"],
        "H": empirical["H"],
        "tolerance": verdict.tolerance,
        "passed": verdict.passed,
        "rows": rows,
        "analytic": analytic,
        "empirical": empirical,
    }


def split_document(field_name: str, M: int, primes) -> dict:
    return {
        "kind": "split",
        "field": field_name,
        "M": M,
        "primes": [
            {"p": P.p, "g": str(P.g), "e": P.e, "deg": P.residue_degree, "norm": str(P.norm)} for P in primes
        ],
    }


def analytic_from_document(doc: dict) -> dict[str, EnclosedValue]:
    return {r["quantity"]: EnclosedValue(parse_rational(r["lo"]), parse_rational(r["hi"])) for r in doc["quantities"]}


def empirical_from_document(doc: dict) -> EmpiricalReport:
    return EmpiricalReport(
        doc["field"], doc["d"], doc["flavor"], doc["H"], doc["mode"], doc["order"],
        int(doc["total"]), int(doc["in_target"]), tuple(int(s) for s in doc["power_sums"]),
        samples=doc.get("samples"), seed=doc.get("seed"), method=doc.get("method", ""),
    )


# ---------------------------------------------------------------------------
# rendering

CSV_COLUMNS = [
    "kind", "field", "d", "flavor", "M", "H", "mode", "samples", "seed",
    "quantity", "lo", "hi", "width", "value", "standard_error", "verdict",
]
SPLIT_COLUMNS = ["field", "p", "g", "e", "deg", "norm"]


def _fmt_se(se: Optional[float]) -> str:
    return "" if se is None else repr(se)


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    if doc["kind"] == "split":
        w = csv.DictWriter(buf, SPLIT_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in doc["primes"]:
            w.writerow({"field": doc["field"], **r})
        return buf.getvalue()
    w = csv.DictWriter(buf, CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    base = {k: doc.get(k, "") for k in ("kind", "field", "d", "flavor", "M", "H", "mode", "samples", "seed")}
    base = {k: ("" if v is None else v) for k, v in base.items()}
    if doc["kind"] == "analytic":
        for r in doc["quantities"]:
            w.writerow({**base, "quantity": r["quantity"], "lo": r["lo"]["decimal"],
                        "hi": r["hi"]["decimal"], "width": r["width"]["decimal"]})
    elif doc["kind"] == "empirical":
        for r in doc["quantities"]:
            w.writerow({**base, "quantity": r["quantity"], "value": r["value"]["decimal"],
                        "standard_error": _fmt_se(r["standard_error"])})
    else:
        base.update(mode=doc["empirical"]["mode"], samples=doc["empirical"]["samples"] or "",
                    seed=doc["empirical"]["seed"] or "")
        for r in doc["rows"]:
            w.writerow({**base, "quantity": r["quantity"], "lo": r["lo"]["decimal"], "hi": r["hi"]["decimal"],
                        "value": r["empirical"]["decimal"], "standard_error": _fmt_se(r["standard_error"]),
                        "verdict": r["verdict"]})
    return buf.getvalue()


def _table(header, rows) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).ljust(w) for x, w in zip(line, widths)).rstrip() for line in [header, *rows]]
    return "\n".join(lines) + "\n"


def to_text(doc: dict) -> str:
    kind = doc["kind"]
    if kind == "split":
        rows = [(r["p"], r["g"], r["e"], r["deg"], r["norm"]) for r in doc["primes"]]
        return f"field {doc['field']}, primes above p <= {doc['M']}\n" + _table(("p", "g", "e", "deg", "N(P)"), rows)
    if kind == "analytic":
        head = f"field {doc['field']}, d = {doc['d']}, {doc['flavor']}, M = {doc['M']}\n"
        rows = [(r["quantity"], r["lo"]["decimal"], r["hi"]["decimal"], r["width"]["decimal"]) for r in doc["quantities"]]
        out = head + _table(("quantity", "lo", "hi", "width"), rows)
        if "partial_density" in doc:
            out += f"partial product at M: {doc['partial_density']['decimal']}\n"
    elif kind == "empirical":
        head = f"field {doc['field']}, d = {doc['d']}, {doc['flavor']}, H = {doc['H']}, {doc['mode']}"
        if doc["mode"] == "montecarlo":
            head += f" ({doc['samples']} samples, seed {doc['seed']})"
        head += f"\ntuples {doc['total']}, in target {doc['in_target']}\n"
        rows = [(r["quantity"], r["value"]["decimal"], _fmt_se(r["standard_error"])) for r in doc["quantities"]]
        out = head + _table(("quantity", "value", "std.err"), rows)
    else:
        head = f"field {doc['field']}, d = {doc['d']}, {doc['flavor']}, M = {doc['M']}, H = {doc['H']}, tolerance {doc['tolerance']}\n"
        rows = [
            (r["quantity"], r["empirical"]["decimal"], r["lo"]["decimal"], r["hi"]["decimal"],
             f"{r['delta']:.3g}", f"{r['allowed']:.3g}", r["verdict"])
            for r in doc["rows"]
        ]
        out = head + _table(("quantity", "empirical", "lo", "hi", "delta", "allowed", "verdict"), rows)
        out += "overall: " + ("PASS" if doc["passed"] else "FAIL") + "\n"
    for note in doc.get("notes", []):
        out += f"note: {note}\n"
    return out


def render(doc: dict, fmt: str) -> str:
    return {"json": to_json, "csv": to_csv, "text": to_text}[fmt](doc)


def load_schema() -> dict:
    return json.loads(resources.files("eisen").joinpath("schema/report.schema.json").read_text())

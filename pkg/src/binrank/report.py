"""JSON and CSV serialization shared by the sampler and the command line.

Rationals are written as ``"p"`` or ``"p/q"`` strings so that nothing is
lost to floating point.  Keys are sorted on output, so equal reports are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from decimal import ROUND_CEILING, Context, Decimal
from fractions import Fraction
from importlib import resources
from typing import Iterable

from .exact import GaussianRational
from .realrank import Label, LabelSet, RankBound, RankReport

CSV_COLUMNS = ("index", "coefficients", "complex", "admissible", "real", "labels", "flags")


def rational_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def gaussian_json(z) -> dict:
    z = z if isinstance(z, GaussianRational) else GaussianRational(z)
    return {"re": rational_str(z.re), "im": rational_str(z.im)}


def upper_sci(x, digits: int = 3) -> str:
    """Decimal upper bound of ``x`` with ``digits`` significant digits."""
    x = Fraction(x)
    if x == 0:
        return "0"
    ctx = Context(prec=digits, rounding=ROUND_CEILING)
    q = ctx.divide(Decimal(x.numerator), Decimal(x.denominator))
    return f"{q:.{digits - 1}E}"


def label_json(lab: Label) -> list[int]:
    return [lab.s, lab.a]


def coeffs_json(form) -> list[str]:
    return [rational_str(c) for c in form]


def label_set_json(ls: LabelSet) -> dict:
    return {
        "s": ls.s,
        "labels": [label_json(l) for l in ls.sorted()],
        "exactness": ls.exactness.value,
        "method": ls.method,
        "non_normative": ls.non_normative,
        "witnesses": [{"label": label_json(l), "coeffs": coeffs_json(ls.witnesses[l])}
                      for l in ls.sorted()],
    }


def rank_bound_json(rb: RankBound) -> dict:
    return {"value": rb.value, "lo": rb.lo, "hi": rb.hi, "exact": rb.exact,
            "text": str(rb)}


def form_json(form) -> dict:
    return {"degree": form.degree, "coeffs": coeffs_json(form), "text": str(form)}


def rank_report_json(r: RankReport) -> dict:
    return {
        "form": form_json(r.form),
        "complex_rank": r.complex_rank,
        "admissible_rank": r.admissible_rank,
        "real_rank": rank_bound_json(r.real_rank),
        "labels": label_set_json(r.labels),
        "complex_witness": coeffs_json(r.complex_witness),
        "admissible_witness": coeffs_json(r.admissible_witness),
        "extra_levels": [label_set_json(ls) for ls in r.extra_levels],
    }


def decomposition_json(S) -> dict:
    from .witness import EXACT

    pts = []
    for p in S.points:
        entry = {"alpha": gaussian_json(p.alpha), "beta": gaussian_json(p.beta), "kind": p.kind}
        if p.kind != EXACT:
            entry["radius"] = rational_str(p.radius)
        pts.append(entry)
    return {
        "kind": S.kind,
        "points": pts,
        "pairing": list(S.pairing),
        "coefficients": [gaussian_json(c) for c in S.coefficients],
        "residual_bound": rational_str(S.residual_bound),
        "residual_bound_decimal": upper_sci(S.residual_bound),
        "label": label_json(S.label),
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def csv_text(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: _csv_cell(row.get(k)) for k in CSV_COLUMNS})
    return buf.getvalue()


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_cell(x) if not isinstance(x, (list, tuple))
                        else "(" + ",".join(str(y) for y in x) + ")" for x in v)
    return str(v)


def load_schema() -> dict:
    text = resources.files("binrank").joinpath("schema/report.schema.json").read_text("utf-8")
    return json.loads(text)


def validate(obj, definition: str) -> None:
    """Raise ``jsonschema.ValidationError`` unless ``obj`` matches."""
    import jsonschema

    schema = load_schema()
    sub = {"$ref": f"#/$defs/{definition}", "$defs": schema["$defs"]}
    jsonschema.validate(obj, sub)

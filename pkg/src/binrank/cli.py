"""Command line: ranks, labels, decompositions, sampling and theorem checks.

Coefficients are given as ``c_0,...,c_d`` with ``c_i`` multiplying
``x^(d-i) y^i``; each entry is an integer ``p`` or a fraction ``p/q``.

Exit codes: 0 success or PASS, 1 input error, 2 inconclusive result or
certification failure, 3 theorem-verification FAIL.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .apolarity import BinaryForm, apolar_profile
from .realrank import DEFAULT_SAMPLES, Exactness, Label, admissible_rank, label_of_form, labels_at, rank_report
from .report import (
    coeffs_json,
    csv_text,
    decomposition_json,
    dumps,
    form_json,
    label_set_json,
    rank_report_json,
)
from .sampler import (
    SampleConfig,
    a_rank_survey,
    default_jobs,
    empirical_distribution,
    verify_claim_even,
    verify_generic_admissible,
    verify_label_bound,
    verify_labels_odd,
)
from .witness import DEFAULT_TOL, CertificationFailed, decompose

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_FAIL = 0, 1, 2, 3
COEFF_ORDER = "c_i multiplies x^(d-i) y^i"


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Bad flags exit with the input-error code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def parse_form(text: str, degree: int | None = None) -> BinaryForm:
    try:
        parts = [p.strip() for p in text.split(",")]
        coeffs = tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse coefficients {text!r}: {exc}") from None
    if degree is not None and len(coeffs) != degree + 1:
        raise InputError(f"degree {degree} needs {degree + 1} coefficients, got {len(coeffs)}")
    try:
        return BinaryForm(coeffs)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def parse_label(text: str) -> Label:
    try:
        s, a = (int(x) for x in text.split(","))
        return Label(s, a)
    except ValueError as exc:
        raise InputError(f"bad label {text!r}: expected 's,a' with 0 <= 2a <= s ({exc})") from None


def _emit(obj: dict, out: str | None) -> None:
    text = dumps(obj)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _envelope(command: str, body: dict) -> dict:
    return {"command": command, "coefficient_order": COEFF_ORDER, **body}


def cmd_rank(args) -> int:
    f = parse_form(args.coeffs, args.degree)
    r = rank_report(f, all_levels=args.all_levels, samples=args.samples)
    _emit(_envelope("rank", rank_report_json(r)), args.out)
    if args.strict and (not r.real_rank.exact or r.labels.exactness is not Exactness.COMPLETE):
        print("inconclusive: real rank is a bracket or the label set is partial",
              file=sys.stderr)
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_labels(args) -> int:
    f = parse_form(args.coeffs, args.degree)
    p = apolar_profile(f)
    ar, _ = admissible_rank(f)
    if args.at is None:
        ls = labels_at(p, ar, samples=args.samples)
    else:
        if args.at < 1:
            raise InputError("--at must be >= 1")
        if args.at <= f.degree and not p.kernel(args.at):
            raise InputError(f"apolar kernel is trivial in degree {args.at}")
        ls = labels_at(p, args.at, samples=args.samples, non_normative=True)
    body = {"form": form_json(f), "admissible_rank": ar, "label_set": label_set_json(ls)}
    _emit(_envelope("labels", body), args.out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    f = parse_form(args.coeffs, args.degree)
    try:
        tol = Fraction(args.tol)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad tolerance {args.tol!r}") from None
    if tol <= 0:
        raise InputError("tolerance must be positive")
    if args.label is None:
        _, g = admissible_rank(f)
        label = label_of_form(g)
    else:
        label = parse_label(args.label)
        p = apolar_profile(f)
        if label.s <= f.degree and not p.kernel(label.s):
            raise InputError(f"label {label} not achievable: trivial kernel")
        ls = labels_at(p, label.s, samples=args.samples)
        if label not in ls.labels:
            if ls.exactness is Exactness.COMPLETE:
                raise InputError(f"label {label} not achievable")
            print(f"label {label} not found; the label set at {label.s} is partial",
                  file=sys.stderr)
            return EXIT_INCONCLUSIVE
        g = ls.witnesses[label]
    try:
        S = decompose(f, g, tol)
    except CertificationFailed as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INCONCLUSIVE
    body = {"form": form_json(f), "witness": coeffs_json(g),
            "requested_label": [label.s, label.a], "decomposition": decomposition_json(S)}
    _emit(_envelope("decompose", body), args.out)
    return EXIT_OK


def _write_report(obj: dict, rows: list, args) -> None:
    if args.report == "csv":
        text = csv_text(rows)
    else:
        text = dumps(obj)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _summary(line: str, args) -> None:
    print(line, file=sys.stdout if args.out else sys.stderr)


def cmd_sample(args) -> int:
    config = _config(args)
    rep = empirical_distribution(config, jobs=args.jobs, samples=args.samples,
                                 check_witnesses=args.witnesses, elide=args.elide)
    obj = {"command": "sample", "coefficient_order": COEFF_ORDER, **rep.as_json()}
    _write_report(obj, rep.samples, args)
    tables = "; ".join(f"{k}: {v}" for k, v in rep.tables.items() if k != "labels")
    status = "FAIL" if rep.violations else "OK"
    _summary(f"sample d={config.degree} N={config.count}: {status} ({tables}; "
             f"violations={len(rep.violations)})", args)
    return EXIT_FAIL if rep.violations else EXIT_OK


def _config(args) -> SampleConfig:
    try:
        return SampleConfig(args.degree, args.count, args.bound, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_verify(args) -> int:
    check = args.check
    kw = {"bound": args.bound, "jobs": args.jobs}
    try:
        if check == "generic-admissible":
            rep = verify_generic_admissible(args.degree, args.count, args.seed, **kw)
        elif check == "labels-odd":
            rep = verify_labels_odd(args.degree, args.count, args.seed, **kw)
        elif check == "claim-even":
            rep = verify_claim_even(args.degree, args.count, args.seed, **kw)
        elif check == "label-bound":
            if args.corpus:
                lines = Path(args.corpus).read_text(encoding="utf-8").splitlines()
                forms = [parse_form(x) for x in lines if x.strip() and not x.startswith("#")]
                rep = verify_label_bound(forms, jobs=args.jobs)
            else:
                rep = verify_label_bound(_config(args), jobs=args.jobs)
        else:
            rep = a_rank_survey(args.degree, args.a, args.count, args.seed,
                                samples=args.samples, **kw)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    except OSError as exc:
        raise InputError(f"cannot read corpus: {exc}") from None
    obj = {"command": "verify", "coefficient_order": COEFF_ORDER, **rep.as_json()}
    _write_report(obj, rep.samples, args)
    _summary(rep.summary_line(), args)
    return EXIT_OK if rep.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="binrank", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def form_args(p):
        p.add_argument("--coeffs", required=True,
                       help="c_0,...,c_d where c_i multiplies x^(d-i) y^i; 'p' or 'p/q'")
        p.add_argument("--degree", type=int, help="optional check on the coefficient count")
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                       help="random members tried per kernel of dimension >= 3")
        p.add_argument("--out", help="write JSON here instead of standard output")

    p = sub.add_parser("rank", help="complex, admissible and real rank with labels")
    form_args(p)
    p.add_argument("--strict", action="store_true",
                   help="exit 2 when the real rank is only bracketed")
    p.add_argument("--all-levels", action="store_true",
                   help="also list labels above the admissible rank (non-normative)")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("labels", help="label set at the admissible rank or at --at")
    form_args(p)
    p.add_argument("--at", type=int, help="degree s; the output is marked non-normative")
    p.set_defaults(func=cmd_labels)

    p = sub.add_parser("decompose", help="points and coefficients of a decomposition")
    form_args(p)
    p.add_argument("--label", help="'s,a': decompose with this label")
    p.add_argument("--tol", default=str(DEFAULT_TOL), help="relative residual tolerance")
    p.set_defaults(func=cmd_decompose)

    def sample_args(p, need_degree=True):
        p.add_argument("--degree", type=int, required=need_degree)
        p.add_argument("--count", type=int, default=200)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--bound", type=int, default=100, help="coefficients in [-B, B]")
        p.add_argument("--report", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="report path (default: standard output)")
        p.add_argument("--jobs", type=int, default=default_jobs(),
                       help="worker processes (default from BINRANK_JOBS); never changes results")
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)

    p = sub.add_parser("sample", help="empirical rank and label distribution")
    sample_args(p)
    p.add_argument("--witnesses", action="store_true", help="round-trip every label witness")
    p.add_argument("--elide", action="store_true", help="omit per-sample records from JSON")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="theorem checks over a seeded sample")
    p.add_argument("check", choices=("generic-admissible", "labels-odd", "claim-even",
                                     "label-bound", "a-rank"))
    sample_args(p, need_degree=False)
    p.add_argument("--a", type=int, default=0, help="pair count for a-rank")
    p.add_argument("--corpus", help="label-bound: file with one coefficient list per line")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    if args.command == "verify" and args.degree is None and not (
            args.check == "label-bound" and args.corpus):
        parser.error("--degree is required")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"binrank: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

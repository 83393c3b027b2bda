"""Seeded Monte-Carlo harness over random integer binary forms.

Sample ``i`` of a configuration depends only on ``(seed, i)``, so reports
are identical whatever the number of worker processes.  Every verdict
comes with the reproduction data (index, coefficients) of each exception.
Non-generic samples, whose kernels or discriminants degenerate, are put in
a quarantine list and never dropped silently.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .apolarity import BinaryForm, apolar_profile, squarefree_exists
from .realrank import (
    DEFAULT_SAMPLES,
    Exactness,
    Label,
    a_rank,
    admissible_rank,
    label_of_form,
    labels_at,
    rank_report,
)
from .report import coeffs_json, label_json, upper_sci
from .witness import DEFAULT_TOL, EXACT, CertificationFailed, decompose, verify_decomposition

SEED_RULE = ("coefficients of sample i are drawn from numpy PCG64 seeded with "
             "SeedSequence(entropy=seed, spawn_key=(i,)); each of c_0..c_d is uniform "
             "on the integers in [-bound, bound]; an all-zero draw is redrawn from "
             "the same generator")

# implementer-chosen acceptance thresholds, not values taken from theory
DEFAULT_FLOORS = {
    "min_label_frequency": 0.01,
    "min_unique_fraction": 0.99,
    "max_quarantine_fraction": 0.01,
    "min_support_frequency": 0.01,
}


@dataclass(frozen=True)
class SampleConfig:
    degree: int
    count: int
    bound: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.bound < 1:
            raise ValueError("bound must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def sample(self, i: int) -> BinaryForm:
        rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(i,)))
        while True:
            c = rng.integers(-self.bound, self.bound, size=self.degree + 1, endpoint=True)
            if c.any():
                return BinaryForm(tuple(int(x) for x in c))

    def as_json(self) -> dict:
        return asdict(self)


def sample_forms(config: SampleConfig) -> Iterator[BinaryForm]:
    for i in range(config.count):
        yield config.sample(i)


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("BINRANK_JOBS", "1")))
    except ValueError:
        return 1


def _parallel_map(fn: Callable, items: Sequence, jobs: int) -> list:
    """``list(map(fn, items))``, fanned out over ``jobs`` processes."""
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def _base_record(config: SampleConfig, i: int, f: BinaryForm) -> dict:
    return {"index": i, "coefficients": coeffs_json(f)}


def _witness_check(f: BinaryForm, g: BinaryForm, label: Label | None = None) -> dict:
    try:
        S = decompose(f, g)
    except CertificationFailed as exc:
        return {"witness": coeffs_json(g), "passed": False, "error": str(exc)}
    rep = verify_decomposition(f, S, DEFAULT_TOL, expected_label=label, witness=g)
    return {
        "witness": coeffs_json(g),
        "kind": S.kind,
        "label": label_json(S.label),
        "residual": upper_sci(S.residual_bound),
        "residual_below_tol": S.residual_bound < DEFAULT_TOL,
        "zero_if_exact": S.kind != EXACT or S.residual_bound == 0,
        "passed": rep.passed,
        "failed_checks": sorted(k for k, v in rep.checks.items() if not v),
    }


def _witnesses_ok(checks: Iterable[dict]) -> bool:
    return all(c["passed"] for c in checks)


# ---------------------------------------------------------------------------
# empirical distributions
# ---------------------------------------------------------------------------

def _distribution_task(config: SampleConfig, samples: int, check_witnesses: bool, i: int) -> dict:
    f = config.sample(i)
    r = rank_report(f, samples=samples)
    rec = _base_record(config, i, f)
    d = f.degree
    flags = []
    if r.labels.exactness is Exactness.SOUND_PARTIAL:
        flags.append("SOUND-PARTIAL")
    if not r.real_rank.exact:
        flags.append("REAL-BRACKET")
    generic, why = _generic_certificate(f)
    if not generic:
        flags.append("NON-GENERIC")
    violations = []
    if r.admissible_rank > d:
        violations.append("label-bound")
    if generic and r.admissible_rank != (d + 2) // 2:
        violations.append("generic-admissible")
    rec.update({
        "complex": r.complex_rank,
        "admissible": r.admissible_rank,
        "real": str(r.real_rank),
        "labels": [label_json(l) for l in r.labels.sorted()],
        "label_exactness": r.labels.exactness.value,
        "flags": flags,
        "violations": violations,
    })
    if check_witnesses:
        rec["witness_checks"] = [_witness_check(f, r.labels.witnesses[l], l)
                                 for l in r.labels.sorted()]
        if not _witnesses_ok(rec["witness_checks"]):
            rec["violations"].append("witness-round-trip")
    return rec


def _table(values: Iterable) -> dict:
    c = Counter(values)
    return {k: c[k] for k in sorted(c, key=_sort_key)}


def _sort_key(k):
    return (len(k), k) if isinstance(k, str) else (0, str(k))


def _frequency(table: dict, key, n: int) -> float:
    return table.get(key, 0) / n


@dataclass
class DistributionReport:
    config: SampleConfig
    samples: list
    tables: dict
    sound_partial: int
    violations: list
    elided: bool = False

    def frequency(self, table: str, key) -> float:
        return _frequency(self.tables[table], str(key), self.config.count)

    def as_json(self) -> dict:
        return {
            "kind": "distribution",
            "config": self.config.as_json(),
            "seed_rule": SEED_RULE,
            "tables": self.tables,
            "sound_partial": self.sound_partial,
            "violations": self.violations,
            "samples": None if self.elided else self.samples,
        }


def empirical_distribution(config: SampleConfig, *, jobs: int = 1,
                           samples: int = DEFAULT_SAMPLES,
                           check_witnesses: bool = False,
                           elide: bool = False) -> DistributionReport:
    task = partial(_distribution_task, config, samples, check_witnesses)
    recs = _parallel_map(task, range(config.count), jobs)
    tables = {
        "complex": _table(str(r["complex"]) for r in recs),
        "admissible": _table(str(r["admissible"]) for r in recs),
        "real": _table(r["real"] for r in recs),
        "labels": _table(" ".join(f"({s},{a})" for s, a in r["labels"]) or "none"
                         for r in recs),
    }
    violations = [_violation(r, v) for r in recs for v in r["violations"]]
    partial_count = sum(1 for r in recs if "SOUND-PARTIAL" in r["flags"])
    return DistributionReport(config, recs, tables, partial_count, violations, elide)


def _violation(rec: dict, theorem: str) -> dict:
    return {"theorem": theorem, "index": rec["index"], "coefficients": rec["coefficients"]}


# ---------------------------------------------------------------------------
# theorem checks
# ---------------------------------------------------------------------------

@dataclass
class TheoremReport:
    name: str
    config: SampleConfig
    verdict: str
    expected: dict
    summary: dict
    samples: list
    exceptions: list = field(default_factory=list)
    quarantined: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    floors: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def as_json(self) -> dict:
        return {
            "kind": "verification",
            "check": self.name,
            "config": self.config.as_json(),
            "seed_rule": SEED_RULE,
            "verdict": self.verdict,
            "expected": self.expected,
            "summary": self.summary,
            "exceptions": self.exceptions,
            "quarantined": self.quarantined,
            "flags": self.flags,
            "floors": self.floors,
            "samples": self.samples,
        }

    def summary_line(self) -> str:
        bits = ", ".join(f"{k}={v}" for k, v in sorted(self.summary.items())
                         if not isinstance(v, (dict, list)))
        return f"{self.name}: {self.verdict} ({bits})"


def _generic_certificate(f: BinaryForm) -> tuple[bool, str]:
    """Does ``f`` have the generic apolar profile?

    Generic means the lower generator sits in degree ``floor(d/2) + 1`` and
    the kernel there holds a square-free form (for odd ``d`` that kernel is
    spanned by the generator itself).
    """
    p = apolar_profile(f)
    d = p.degree
    s = d // 2 + 1
    if p.r1 != s:
        return False, f"lower generator in degree {p.r1}, expected {s}"
    if not squarefree_exists(p.kernel(s))[0]:
        return False, f"no square-free apolar form in degree {s}"
    return True, ""


def _quarantine(rec: dict, why: str) -> dict:
    return {"index": rec["index"], "coefficients": rec["coefficients"], "reason": why}


def _run(config, task, jobs):
    return _parallel_map(partial(task, config), range(config.count), jobs)


def _generic_admissible_task(config: SampleConfig, i: int) -> dict:
    f = config.sample(i)
    rec = _base_record(config, i, f)
    generic, why = _generic_certificate(f)
    ar, w = admissible_rank(f)
    rec.update({"admissible": ar, "generic": generic, "reason": why,
                "witness_checks": [_witness_check(f, w, label_of_form(w))]})
    return rec


def verify_generic_admissible(d: int, N: int, seed: int, *, bound: int = 100,
                              jobs: int = 1, floors: dict | None = None) -> TheoremReport:
    """Generic forms of degree ``d`` have admissible rank ``ceil((d+1)/2)``."""
    if d < 2:
        raise ValueError("degree must be >= 2")
    floors = {**DEFAULT_FLOORS, **(floors or {})}
    config = SampleConfig(d, N, bound, seed)
    target = (d + 2) // 2
    recs = _run(config, _generic_admissible_task, jobs)
    quarantined = [_quarantine(r, r["reason"]) for r in recs if not r["generic"]]
    exceptions = [_violation(r, "generic-admissible") | {"admissible": r["admissible"]}
                  for r in recs if r["generic"] and r["admissible"] != target]
    exceptions += _witness_exceptions(recs)
    qfrac = len(quarantined) / N
    ok = not exceptions and qfrac < floors["max_quarantine_fraction"]
    summary = {
        "expected_admissible_rank": target,
        "generic": N - len(quarantined),
        "matching": sum(1 for r in recs if r["generic"] and r["admissible"] == target),
        "quarantined": len(quarantined),
        "quarantine_fraction": qfrac,
        "admissible_table": _table(str(r["admissible"]) for r in recs),
        "witnesses_checked": sum(len(r["witness_checks"]) for r in recs),
    }
    return TheoremReport("generic-admissible", config, "PASS" if ok else "FAIL",
                         {"admissible_rank": target}, summary, recs, exceptions,
                         quarantined, [], _pick(floors, "max_quarantine_fraction"))


def _witness_exceptions(recs) -> list:
    return [_violation(r, "witness-round-trip") | {"witness": c["witness"]}
            for r in recs for c in r.get("witness_checks", []) if not c["passed"]]


def _pick(floors: dict, *keys) -> dict:
    return {k: floors[k] for k in keys}


def _labels_odd_task(config: SampleConfig, i: int) -> dict:
    f = config.sample(i)
    rec = _base_record(config, i, f)
    d = f.degree
    s = (d + 1) // 2
    p = apolar_profile(f)
    dim = p.kernel_dim(s)
    rec["kernel_dim"] = dim
    if dim == 0:
        rec.update({"labels": [], "label_exactness": Exactness.COMPLETE.value,
                    "witness_checks": []})
        return rec
    ls = labels_at(p, s)
    rec["labels"] = [label_json(l) for l in ls.sorted()]
    rec["label_exactness"] = ls.exactness.value
    rec["witness_checks"] = [_witness_check(f, ls.witnesses[l], l) for l in ls.sorted()]
    return rec


def verify_labels_odd(d: int, N: int, seed: int, *, bound: int = 100, jobs: int = 1,
                      floors: dict | None = None) -> TheoremReport:
    """For odd ``d`` each label ``((d+1)/2, a)`` is attained with positive
    frequency, and the deciding kernel is almost always a single form."""
    if d < 3 or d % 2 == 0:
        raise ValueError("degree must be odd and >= 3")
    floors = {**DEFAULT_FLOORS, **(floors or {})}
    config = SampleConfig(d, N, bound, seed)
    s = (d + 1) // 2
    recs = _run(config, _labels_odd_task, jobs)
    unique = [r for r in recs if r["kernel_dim"] == 1 and len(r["labels"]) == 1]
    counts = Counter(tuple(lab) for r in recs for lab in r["labels"])
    freqs = {f"({s},{a})": counts[(s, a)] / N for a in range(s // 2 + 1)}
    missing = [k for k, v in freqs.items() if v < floors["min_label_frequency"]]
    unique_frac = len(unique) / N
    exceptions = [_quarantine(r, f"kernel dimension {r['kernel_dim']}, "
                                 f"{len(r['labels'])} labels")
                  for r in recs if r not in unique]
    witness_fail = _witness_exceptions(recs)
    ok = (not missing and unique_frac >= floors["min_unique_fraction"] and not witness_fail)
    summary = {
        "s": s,
        "label_frequencies": freqs,
        "labels_below_floor": missing,
        "unique_fraction": unique_frac,
        "witnesses_checked": sum(len(r["witness_checks"]) for r in recs),
    }
    return TheoremReport("labels-odd", config, "PASS" if ok else "FAIL",
                         {"labels": [[s, a] for a in range(s // 2 + 1)]}, summary, recs,
                         witness_fail, exceptions, [],
                         _pick(floors, "min_label_frequency", "min_unique_fraction"))


def _claim_even_task(config: SampleConfig, i: int) -> dict:
    f = config.sample(i)
    rec = _base_record(config, i, f)
    d = f.degree
    s = 1 + d // 2
    generic, why = _generic_certificate(f)
    rec.update({"generic": generic, "reason": why})
    if not generic:
        rec.update({"labels": [], "witness_checks": []})
        return rec
    ls = labels_at(apolar_profile(f), s)
    good = [l for l in ls.sorted() if 4 * l.a <= d]
    rec.update({
        "labels": [label_json(l) for l in ls.sorted()],
        "label_exactness": ls.exactness.value,
        "claim_holds": bool(good) and ls.exactness is Exactness.COMPLETE,
        "witness_checks": [_witness_check(f, ls.witnesses[l], l) for l in ls.sorted()],
    })
    return rec


def verify_claim_even(d: int, N: int, seed: int, *, bound: int = 100, jobs: int = 1,
                      floors: dict | None = None) -> TheoremReport:
    """For even ``d`` each generic form has a label ``(1 + d/2, a)`` with
    ``2a <= d/2`` in its complete label set."""
    if d < 2 or d % 2:
        raise ValueError("degree must be even and >= 2")
    floors = {**DEFAULT_FLOORS, **(floors or {})}
    config = SampleConfig(d, N, bound, seed)
    s = 1 + d // 2
    recs = _run(config, _claim_even_task, jobs)
    quarantined = [_quarantine(r, r["reason"]) for r in recs if not r["generic"]]
    exceptions = [_violation(r, "claim-even") | {"labels": r["labels"]}
                  for r in recs if r["generic"] and not r["claim_holds"]]
    exceptions += _witness_exceptions(recs)
    qfrac = len(quarantined) / N
    ok = not exceptions and qfrac < floors["max_quarantine_fraction"]
    summary = {
        "s": s,
        "max_pairs": d // 4,
        "generic": N - len(quarantined),
        "quarantined": len(quarantined),
        "quarantine_fraction": qfrac,
        "label_sets": _table(" ".join(f"({x},{y})" for x, y in r["labels"]) or "none"
                             for r in recs),
        "witnesses_checked": sum(len(r["witness_checks"]) for r in recs),
    }
    return TheoremReport("claim-even", config, "PASS" if ok else "FAIL",
                         {"s": s, "max_pairs": d // 4}, summary, recs, exceptions,
                         quarantined, [], _pick(floors, "max_quarantine_fraction"))


def _label_bound_record(i: int, f: BinaryForm) -> dict:
    ar, _ = admissible_rank(f)
    return {"index": i, "coefficients": coeffs_json(f), "degree": f.degree, "admissible": ar}


def _label_bound_task(config: SampleConfig, i: int) -> dict:
    return _label_bound_record(i, config.sample(i))


def _corpus_task(pair) -> dict:
    return _label_bound_record(*pair)


def verify_label_bound(source, *, jobs: int = 1) -> TheoremReport:
    """Every form has admissible rank at most its degree.

    ``source`` is a ``SampleConfig`` or an iterable of forms.
    """
    if isinstance(source, SampleConfig):
        config = source
        recs = _run(config, _label_bound_task, jobs)
    else:
        forms = [f if isinstance(f, BinaryForm) else BinaryForm(tuple(f)) for f in source]
        if not forms:
            raise ValueError("empty corpus")
        config = SampleConfig(max(f.degree for f in forms), len(forms), 1, 0)
        recs = _parallel_map(_corpus_task, list(enumerate(forms)), jobs)
    exceptions = [_violation(r, "label-bound") | {"admissible": r["admissible"]}
                  for r in recs if r["admissible"] > r["degree"]]
    summary = {
        "tested": len(recs),
        "at_bound": sum(1 for r in recs if r["admissible"] == r["degree"]),
        "admissible_table": _table(str(r["admissible"]) for r in recs),
    }
    return TheoremReport("label-bound", config, "FAIL" if exceptions else "PASS",
                         {"admissible_rank_at_most": "degree"}, summary, recs, exceptions)


def _a_rank_task(config: SampleConfig, a: int, samples: int, i: int) -> dict:
    f = config.sample(i)
    rec = _base_record(config, i, f)
    rb = a_rank(f, a, samples=samples)
    rec.update({"a_rank": str(rb), "exact": rb.exact})
    return rec


def a_rank_survey(d: int, a: int, N: int, seed: int, *, bound: int = 100, jobs: int = 1,
                  samples: int = DEFAULT_SAMPLES, floors: dict | None = None) -> TheoremReport:
    """Distribution of ``a_rank(f, a)`` with a contiguity check on its support."""
    if a < 0:
        raise ValueError("pair count must be non-negative")
    floors = {**DEFAULT_FLOORS, **(floors or {})}
    config = SampleConfig(d, N, bound, seed)
    recs = _parallel_map(partial(_a_rank_task, config, a, samples), range(N), jobs)
    table = _table(r["a_rank"] for r in recs)
    support = sorted(int(k) for k, v in table.items()
                     if not k.startswith("[") and v / N >= floors["min_support_frequency"])
    gaps = [c for c in range(support[0], support[-1] + 1) if c not in support] if support else []
    brackets = sum(1 for r in recs if not r["exact"])
    flags = []
    verdict = "PASS"
    if gaps:
        if brackets:
            flags.append("GAP-WITH-BRACKETS")
        else:
            verdict = "FAIL"
    summary = {"a": a, "table": table, "support": support, "gaps": gaps,
               "brackets": brackets}
    exceptions = [] if verdict == "PASS" else [{"theorem": "a-rank-contiguity", "gaps": gaps}]
    return TheoremReport("a-rank", config, verdict, {"support": "contiguous"}, summary,
                         recs, exceptions, [], flags, _pick(floors, "min_support_frequency"))

"""Admissible rank, real rank, a-ranks and label sets of real binary forms.

A conjugation-stable set of ``s`` points on the rational normal curve whose
span contains ``f`` is the root set of a real square-free apolar form of
degree ``s``.  Its label ``(s, a)`` records the number ``a`` of conjugate
pairs, so ``s - 2a`` is the number of real roots of that form.

How a label set at degree ``s`` is decided depends on the kernel:

* one-dimensional: count the real roots of the single member;
* a pencil ``g1 + t g2``: the real-root count is constant on the open cells
  of the ``t``-line cut out by the real roots of the discriminant, so one
  sample per cell plus ``t = infinity`` decides everything;
* below the second generator degree the kernel is ``g1 * (forms)`` and the
  labels follow from the roots of ``g1``;
* above ``d`` every form is apolar;
* anything else is explored by seeded sampling and flagged as partial.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .apolarity import (
    ApolarProfile,
    BinaryForm,
    apolar_profile,
    combine,
    complex_rank,
    form_product,
    squarefree_exists,
)
from .exact import (
    dehomogenize,
    form_discriminant,
    form_is_square_free,
    interpolate,
    isolate_real_roots,
    poly_divmod,
    poly_eval,
    projective_root_profile,
    refine_root,
    squarefree_part,
)
from .linalg import integer_vector, nullspace

DEFAULT_SAMPLES = 24


class Exactness(str, Enum):
    COMPLETE = "COMPLETE"
    SOUND_PARTIAL = "SOUND-PARTIAL"


@dataclass(frozen=True, order=True)
class Label:
    s: int
    a: int

    def __post_init__(self):
        if self.a < 0 or 2 * self.a > self.s:
            raise ValueError(f"invalid label ({self.s},{self.a})")

    @property
    def real_points(self) -> int:
        return self.s - 2 * self.a

    def __str__(self):
        return f"({self.s},{self.a})"


@dataclass(frozen=True)
class LabelSet:
    s: int
    labels: frozenset
    exactness: Exactness
    witnesses: Mapping = field(default_factory=dict, compare=False)
    method: str = ""
    non_normative: bool = False

    def sorted(self) -> list[Label]:
        return sorted(self.labels)

    def has_a(self, a: int) -> bool:
        return Label(self.s, a) in self.labels if 2 * a <= self.s else False


@dataclass(frozen=True)
class RankBound:
    """An exact rank (``lo == hi``) or a bracket; ``hi`` is None if unknown."""

    lo: int
    hi: int | None
    witness: BinaryForm | None = None

    @property
    def exact(self) -> bool:
        return self.hi is not None and self.lo == self.hi

    @property
    def value(self) -> int | None:
        return self.lo if self.exact else None

    def __str__(self):
        if self.exact:
            return str(self.lo)
        return f"[{self.lo},{'?' if self.hi is None else self.hi}]"


def label_of_form(g: Sequence) -> Label | None:
    """Label of the root set of ``g``, or None when ``g`` is not square-free."""
    if not form_is_square_free(g):
        return None
    s = len(g) - 1
    total, real = projective_root_profile(g)
    return Label(s, (s - real) // 2)


# ---------------------------------------------------------------------------
# pencils
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PencilCell:
    """Open interval of the parameter line (None = unbounded) and its sample."""

    lo: Fraction | None
    hi: Fraction | None
    sample: Fraction


def pencil_discriminant(g1: Sequence, g2: Sequence) -> list:
    """``disc(g1 + t g2)`` as a polynomial in ``t`` (degree <= 2s - 2)."""
    s = len(g1) - 1
    xs = [Fraction(t) for t in range(2 * s - 1)]
    ys = [form_discriminant(combine((g1, g2), (1, t))) for t in xs]
    return interpolate(xs, ys)


def pencil_cells(g1: Sequence, g2: Sequence) -> tuple[list, list[PencilCell]]:
    """Discriminant of the pencil and the open cells of the affine ``t``-line."""
    disc = pencil_discriminant(g1, g2)
    if not disc:
        return disc, []
    roots = isolate_real_roots(squarefree_part(disc)) if len(disc) > 1 else []
    if not roots:
        return disc, [PencilCell(None, None, Fraction(0))]
    cells = [PencilCell(None, roots[0].lo, roots[0].lo - 1)]
    for i in range(len(roots) - 1):
        left, right = roots[i], roots[i + 1]
        pt = (left.hi + right.lo) / 2
        while poly_eval(disc, pt) == 0:  # midpoint hit a root: refine and retry
            left = refine_root(disc, left, left.width / 2 or 1)
            right = refine_root(disc, right, right.width / 2 or 1)
            pt = (left.hi + right.lo) / 2
        cells.append(PencilCell(left.hi, right.lo, pt))
    cells.append(PencilCell(roots[-1].hi, None, roots[-1].hi + 1))
    return disc, cells


def _pencil_labels(basis, s) -> LabelSet:
    g1, g2 = basis
    disc, cells = pencil_cells(g1, g2)
    # one sample per cell decides the set; the simple members only give
    # nicer witnesses
    cands = [g1, g2, combine(basis, (1, 1)), combine(basis, (1, -1))]
    cands += [combine((g1, g2), (1, cell.sample)) for cell in cells]
    found: dict[Label, BinaryForm] = {}
    for g in cands:
        lab = label_of_form(g)
        if lab is None:
            continue
        g = BinaryForm(g)
        if lab not in found or _height(g) < _height(found[lab]):
            found[lab] = g
    return LabelSet(s, frozenset(found), Exactness.COMPLETE, found, "pencil")


def _height(g: BinaryForm) -> int:
    return max(abs(c) for c in g.coeffs)


# ---------------------------------------------------------------------------
# explicit constructions
# ---------------------------------------------------------------------------

def _linear_candidates():
    t = 0
    yield (1, 0)  # X, root (0:1)
    while True:
        yield (1, -t - 1)
        yield (1, t + 1)
        t += 1


def _extend_square_free(base: tuple, real: int, pairs: int) -> tuple:
    """Multiply ``base`` by ``real`` real linear and ``pairs`` irreducible
    quadratic factors keeping the product square-free."""
    g = base
    lin = _linear_candidates()
    for _ in range(real):
        while True:
            cand = form_product(g, next(lin))
            if form_is_square_free(cand):
                g = cand
                break
    u = 1
    for _ in range(pairs):
        while True:
            cand = form_product(g, (1, 0, u * u))
            u += 1
            if form_is_square_free(cand):
                g = cand
                break
    return g


def _all_labels(s: int) -> LabelSet:
    found = {}
    for a in range(s // 2 + 1):
        found[Label(s, a)] = BinaryForm(_extend_square_free((1,), s - 2 * a, a))
    return LabelSet(s, frozenset(found), Exactness.COMPLETE, found, "all")


def _multiples_labels(profile: ApolarProfile, s: int) -> LabelSet:
    """Kernel ``g1 * (forms of degree s - r1)`` for ``r1 <= s < r2``."""
    g1 = profile.g1
    base = label_of_form(g1)
    if base is None:
        return LabelSet(s, frozenset(), Exactness.COMPLETE, {}, "multiples")
    m = s - profile.r1
    found = {}
    for real in range(m, -1, -2):
        pairs = (m - real) // 2
        w = _extend_square_free(tuple(g1), real, pairs)
        found[Label(s, base.a + pairs)] = BinaryForm(w)
    return LabelSet(s, frozenset(found), Exactness.COMPLETE, found, "multiples")


# ---------------------------------------------------------------------------
# sampling for kernels of dimension >= 3
# ---------------------------------------------------------------------------

def _rng(form: BinaryForm, s: int, tag) -> random.Random:
    key = f"{form.coeffs}|{s}|{tag}".encode()
    return random.Random(int.from_bytes(hashlib.sha256(key).digest()[:8], "big"))


def _point_row(basis, p: int, q: int) -> list[int]:
    s = len(basis[0]) - 1
    pows = [p ** (s - j) * q ** j for j in range(s + 1)]
    return [sum(b * w for b, w in zip(g, pows)) for g in basis]


def _quadratic_rows(basis, u: Fraction, v: Fraction) -> list[list]:
    # g(t, 1) mod (t^2 - 2u t + u^2 + v^2); two linear conditions
    quad = [u * u + v * v, -2 * u, Fraction(1)]
    rems = []
    for g in basis:
        f, _ = dehomogenize(g) if any(g) else ([], 0)
        r = poly_divmod(f, quad)[1] if f else []
        r = list(r) + [Fraction(0)] * (2 - len(r))
        rems.append(r)
    return [[r[0] for r in rems], [r[1] for r in rems]]


def _constrained_member(basis, rng: random.Random, real: int, pairs: int):
    n = 64
    rows = []
    for _ in range(real):
        t = rng.randint(-n, n)
        rows.append(_point_row(basis, n * n - t * t, 2 * t * n))
    for _ in range(pairs):
        u = Fraction(rng.randint(-2 * n, 2 * n), n)
        v = Fraction(rng.randint(1, 2 * n), n)
        rows.extend(_quadratic_rows(basis, u, v))
    null = nullspace(rows, len(basis))
    if not null:
        return None
    return combine(basis, integer_vector(null[0]))


def _sampled_labels(profile: ApolarProfile, s: int, wanted_a: int | None = None,
                    samples: int = DEFAULT_SAMPLES) -> LabelSet:
    basis = profile.kernel(s)
    k = len(basis)
    found: dict[Label, BinaryForm] = {}

    def consider(g):
        if not any(g):
            return False
        lab = label_of_form(g)
        if lab is not None and lab not in found:
            found[lab] = BinaryForm(g)
        return wanted_a is not None and Label(s, wanted_a) in found

    done = False
    for v in basis:
        done = done or consider(v)
    for i in range(k):
        for j in range(i + 1, k):
            if done:
                break
            done = consider(combine(basis, [int(x == i) + int(x == j) for x in range(k)]))
            done = done or consider(combine(basis, [int(x == i) - int(x == j) for x in range(k)]))
    max_pairs = (k - 1) // 2
    if wanted_a is not None:
        configs = [min(wanted_a, max_pairs)]
    else:
        configs = list(range(max_pairs + 1))
    for pairs in configs:
        rng = _rng(profile.form, s, pairs)
        for _ in range(samples):
            if done:
                break
            g = _constrained_member(basis, rng, k - 1 - 2 * pairs, pairs)
            if g is not None:
                done = consider(g)
    # every conceivable label seen: nothing left to miss
    complete = len(found) == s // 2 + 1
    return LabelSet(s, frozenset(found),
                    Exactness.COMPLETE if complete else Exactness.SOUND_PARTIAL,
                    found, "sampled")


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def labels_at(profile: ApolarProfile, s: int, *, samples: int = DEFAULT_SAMPLES,
              non_normative: bool = False) -> LabelSet:
    """Labels ``(s, a)`` realised by square-free real apolar forms of degree ``s``."""
    d = profile.degree
    if s > d:
        out = _all_labels(s)
    else:
        basis = profile.kernel(s)
        if not basis:
            raise ValueError(f"apolar kernel of {profile.form} is trivial in degree {s}")
        if len(basis) == 1:
            lab = label_of_form(basis[0])
            found = {lab: BinaryForm(basis[0])} if lab is not None else {}
            out = LabelSet(s, frozenset(found), Exactness.COMPLETE, found, "single")
        elif len(basis) == 2:
            out = _pencil_labels(basis, s)
        elif s < profile.r2:
            out = _multiples_labels(profile, s)
        else:
            out = _sampled_labels(profile, s, samples=samples)
    if non_normative:
        out = LabelSet(out.s, out.labels, out.exactness, out.witnesses, out.method, True)
    return out


def _find_label(profile: ApolarProfile, s: int, a: int, samples: int):
    """``(status, witness)`` with status ``found``, ``absent`` or ``unknown``."""
    if 2 * a > s:
        return "absent", None
    if s <= profile.degree and not profile.kernel(s):
        return "absent", None
    if s <= profile.degree and len(profile.kernel(s)) >= 3 and s >= profile.r2:
        ls = _sampled_labels(profile, s, wanted_a=a, samples=samples)
    else:
        ls = labels_at(profile, s)
    lab = Label(s, a)
    if lab in ls.labels:
        return "found", ls.witnesses[lab]
    return ("absent" if ls.exactness is Exactness.COMPLETE else "unknown"), None


def admissible_rank(f: BinaryForm) -> tuple[int, BinaryForm]:
    """Least ``s`` whose real apolar kernel contains a square-free form."""
    p = apolar_profile(f)
    start, witness = complex_rank(f)
    # a square-free complex witness spans a Zariski-open set of the rational
    # kernel, so the scan below ends at its first step
    for s in range(start, p.degree + 2):
        ok, w = squarefree_exists(p.kernel(s))
        if ok:
            return s, w
    raise RuntimeError("unreachable: every form of degree d + 1 is apolar")  # pragma: no cover


def a_rank(f: BinaryForm, a: int, *, samples: int = DEFAULT_SAMPLES) -> RankBound:
    """Least ``c`` with a decomposition of ``a`` conjugate pairs and ``c``
    real points.  Scans ``s = 2a + c`` up to ``d + 2a``."""
    if a < 0:
        raise ValueError("pair count must be non-negative")
    p = apolar_profile(f)
    d = p.degree
    lo = None
    for s in range(max(2 * a, 1), d + 2 * a + 1):
        status, w = _find_label(p, s, a, samples)
        if status == "found":
            c = s - 2 * a
            return RankBound(c if lo is None else lo, c, w)
        if status == "unknown" and lo is None:
            lo = s - 2 * a
    # every square-free form of degree >= d + 1 is apolar
    top = max(d + 1, 2 * a)
    _, w = _find_label(p, top, a, samples)
    c = top - 2 * a
    return RankBound(c if lo is None else lo, c, w)


def real_rank(f: BinaryForm, *, samples: int = DEFAULT_SAMPLES) -> RankBound:
    """Least ``s`` with an all-real decomposition, or a bracket."""
    return a_rank(f, 0, samples=samples)


@dataclass(frozen=True)
class RankReport:
    form: BinaryForm
    complex_rank: int
    admissible_rank: int
    real_rank: RankBound
    labels: LabelSet
    complex_witness: BinaryForm
    admissible_witness: BinaryForm
    extra_levels: tuple = ()

    @property
    def witnesses(self) -> Mapping:
        return self.labels.witnesses


def rank_report(f: BinaryForm, *, all_levels: bool = False,
                samples: int = DEFAULT_SAMPLES) -> RankReport:
    cr, cw = complex_rank(f)
    ar, aw = admissible_rank(f)
    rr = real_rank(f, samples=samples)
    p = apolar_profile(f)
    labels = labels_at(p, ar, samples=samples)
    extra = ()
    if all_levels:
        extra = tuple(labels_at(p, s, samples=samples, non_normative=True)
                      for s in range(ar + 1, p.degree + 1) if p.kernel(s))
    if not cr <= ar <= rr.lo:
        raise AssertionError(f"rank chain violated for {f}: {cr}, {ar}, {rr}")
    return RankReport(f, cr, ar, rr, labels, cw, aw, extra)

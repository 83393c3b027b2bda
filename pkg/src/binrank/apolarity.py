"""Binary forms, the apolarity action and Sylvester's complex rank.

A form ``g = sum b_j X^(s-j) Y^j`` acts on ``f = sum c_i x^(d-i) y^i`` as
the differential operator obtained from ``X -> d/dx``, ``Y -> d/dy``.  The
square-free members of the degree-``s`` kernel of this action are exactly
the ``s``-point decompositions of ``f`` on the rational normal curve: a
root ``(a:b)`` of ``g`` contributes the power ``(a x + b y)^d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import gcd, perm
from typing import Iterator, Sequence

from .exact import form_is_square_free
from .linalg import integer_vector, nullspace, rank

Coeffs = tuple  # c_0..c_d of a binary form in the monomial basis


@dataclass(frozen=True)
class BinaryForm:
    """A real binary form up to scale: a point of P^d(Q).

    ``coeffs`` holds the canonical representative, coprime integers with
    the first nonzero entry positive.  ``c_i`` multiplies ``x^(d-i) y^i``.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self):
        raw = [Fraction(c) for c in self.coeffs]
        if len(raw) < 2:
            raise ValueError("a binary form needs degree >= 1")
        if not any(raw):
            raise ValueError("the zero form is not a point of P^d")
        object.__setattr__(self, "coeffs", integer_vector(raw))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __str__(self):
        return _format_form(self.coeffs, "x", "y")

    @classmethod
    def parse(cls, text: str) -> "BinaryForm":
        """Build from ``"c0,c1,...,cd"`` with entries ``p`` or ``p/q``."""
        parts = [p.strip() for p in text.split(",")]
        if any(not p for p in parts):
            raise ValueError(f"malformed coefficient list: {text!r}")
        return cls(tuple(Fraction(p) for p in parts))

    def substitute(self, a, b, c, d) -> "BinaryForm":
        """The form ``f(a x + b y, c x + d y)``."""
        deg = self.degree
        lin_x = [a, b]
        lin_y = [c, d]
        out = [Fraction(0)] * (deg + 1)
        for i, ci in enumerate(self.coeffs):
            if not ci:
                continue
            term = [Fraction(ci)]
            for _ in range(deg - i):
                term = _mul_linear(term, lin_x)
            for _ in range(i):
                term = _mul_linear(term, lin_y)
            for k, v in enumerate(term):
                out[k] += v
        return BinaryForm(tuple(out))


def _mul_linear(p, lin):
    # p has coefficients of x^(n-k) y^k; lin = (coef of x, coef of y)
    out = [Fraction(0)] * (len(p) + 1)
    for k, v in enumerate(p):
        out[k] += v * lin[0]
        out[k + 1] += v * lin[1]
    return out


def _format_form(coeffs, xv, yv) -> str:
    d = len(coeffs) - 1
    terms = []
    for i, c in enumerate(coeffs):
        if not c:
            continue
        mono = []
        if d - i:
            mono.append(xv if d - i == 1 else f"{xv}^{d - i}")
        if i:
            mono.append(yv if i == 1 else f"{yv}^{i}")
        m = "*".join(mono)
        if m and c == 1:
            terms.append(m)
        elif m and c == -1:
            terms.append(f"-{m}")
        else:
            terms.append(f"{c}*{m}" if m else f"{c}")
    return " + ".join(terms).replace("+ -", "- ") or "0"


def form_product(g: Sequence, h: Sequence) -> tuple:
    """Product of two binary forms in coefficient representation."""
    out = [0] * (len(g) + len(h) - 1)
    for i, a in enumerate(g):
        if a:
            for j, b in enumerate(h):
                out[i + j] += a * b
    return tuple(out)


def apolar_action(g: Sequence, f: Sequence) -> tuple:
    """Apply ``g(d/dx, d/dy)`` to ``f``; coefficients of a degree ``d - s`` form."""
    s, d = len(g) - 1, len(f) - 1
    if s > d:
        raise ValueError(f"operator degree {s} exceeds form degree {d}")
    out = []
    for k in range(d - s + 1):
        acc = 0
        for j, b in enumerate(g):
            if b:
                acc += b * f[k + j] * perm(d - k - j, s - j) * perm(k + j, j)
        out.append(acc)
    return tuple(out)


def catalecticant(f: Sequence, s: int) -> list[list[int]]:
    """Matrix of ``g -> g o f`` on degree-``s`` forms, monomial bases."""
    d = len(f) - 1
    return [[f[k + j] * perm(d - k - j, s - j) * perm(k + j, j) for j in range(s + 1)]
            for k in range(d - s + 1)]


def catalecticant_kernel(f: Sequence, s: int) -> tuple[tuple[int, ...], ...]:
    """Integer basis of the degree-``s`` apolar kernel, ``1 <= s <= d + 1``."""
    d = len(f) - 1
    if not 1 <= s <= d + 1:
        raise ValueError(f"kernel degree {s} outside 1..{d + 1}")
    if s == d + 1:
        return tuple(tuple(int(i == j) for i in range(s + 1)) for j in range(s + 1))
    basis = nullspace(catalecticant(f, s), s + 1)
    return tuple(integer_vector(v) for v in basis)


@dataclass(frozen=True)
class ApolarProfile:
    """Apolar kernels of one form plus the two ideal generators.

    Kernels are computed on first use and cached.
    """

    form: BinaryForm
    kernels: dict = field(repr=False, compare=False)
    g1: tuple

    @property
    def degree(self) -> int:
        return self.form.degree

    @property
    def r1(self) -> int:
        return len(self.g1) - 1

    @property
    def r2(self) -> int:
        return self.degree + 2 - self.r1

    @cached_property
    def g2(self) -> tuple:
        """First degree-``r2`` kernel vector outside ``g1 * (forms)``."""
        r1, r2 = self.r1, self.r2
        if r2 == r1:
            return self.kernel(r1)[1]
        m = r2 - r1
        multiples = [form_product(self.g1, tuple(int(i == j) for i in range(m + 1)))
                     for j in range(m + 1)]
        base_rank = rank(multiples)
        return next(v for v in self.kernel(r2) if rank(multiples + [v]) > base_rank)

    def kernel(self, s: int) -> tuple:
        """Kernel basis at degree ``s``; every form is apolar once ``s > d``."""
        if s < 1:
            raise ValueError("kernel degree must be positive")
        if s > self.degree + 1:
            return tuple(tuple(int(i == j) for i in range(s + 1)) for j in range(s + 1))
        if s not in self.kernels:
            self.kernels[s] = catalecticant_kernel(self.form.coeffs, s)
        return self.kernels[s]

    def kernel_dim(self, s: int) -> int:
        return len(self.kernel(s))

    def expected_dim(self, s: int) -> int:
        return max(0, s - self.r1 + 1) + max(0, s - self.r2 + 1)


@lru_cache(maxsize=4096)
def apolar_profile(f: BinaryForm) -> ApolarProfile:
    d = f.degree
    kernels = {}
    for s in range(1, d + 2):
        kernels[s] = catalecticant_kernel(f.coeffs, s)
        if kernels[s]:
            return ApolarProfile(f, kernels, kernels[s][0])
    raise AssertionError("unreachable: the degree d + 1 kernel is everything")  # pragma: no cover


def apolar_generators(f: BinaryForm) -> tuple[tuple, tuple]:
    p = apolar_profile(f)
    return p.g1, p.g2


def combine(basis: Sequence[Sequence], weights: Sequence) -> tuple:
    """``sum w_j basis_j`` as a coefficient tuple."""
    n = len(basis[0])
    return tuple(sum(w * v[i] for w, v in zip(weights, basis) if w) for i in range(n))


def _graded_grid(k: int, top: int) -> Iterator[tuple[int, ...]]:
    """Nonzero points of ``{0..top}^k`` ordered by coordinate sum."""
    def compositions(total, parts):
        if parts == 1:
            if total <= top:
                yield (total,)
            return
        for first in range(min(total, top), -1, -1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    for total in range(1, k * top + 1):
        yield from compositions(total, k)


def squarefree_exists(basis: Sequence[Sequence]) -> tuple[bool, BinaryForm | None]:
    """Does the span of ``basis`` contain a square-free binary form?

    The discriminant of ``sum t_j g_j`` is homogeneous of degree ``2s - 2``
    in the ``t_j``, so it vanishes identically iff it vanishes on the grid
    ``{0..2s-2}^k``.  The grid is walked in order of coordinate sum, so
    generic spans answer after a handful of evaluations.
    """
    if not basis:
        return False, None
    s = len(basis[0]) - 1
    if s == 0:
        return False, None
    for v in basis:
        if form_is_square_free(v):
            return True, BinaryForm(v)
    if len(basis) == 1:
        return False, None
    for w in _graded_grid(len(basis), 2 * s - 2):
        if sum(1 for x in w if x) < 2:
            continue  # single basis vectors (and their multiples) done above
        g = combine(basis, w)
        if any(g) and form_is_square_free(g):
            return True, BinaryForm(g)
    return False, None


def complex_rank(f: BinaryForm) -> tuple[int, BinaryForm]:
    """Sylvester's algorithm: ``r1`` if the bottom kernel has a square-free
    member, otherwise ``d + 2 - r1``.  Returns the rank and a witness."""
    p = apolar_profile(f)
    ok, w = squarefree_exists(p.kernel(p.r1))
    if ok:
        return p.r1, w
    ok, w = squarefree_exists(p.kernel(p.r2))
    if not ok:  # pragma: no cover - g1, g2 have no common root
        raise RuntimeError(f"no square-free apolar form at degree {p.r2} for {f}")
    return p.r2, w

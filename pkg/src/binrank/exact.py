"""Exact scalars and univariate polynomials over Q and Q(i).

Rationals are :class:`fractions.Fraction`.  Gaussian rationals carry the
complex conjugation.  A univariate polynomial is a plain list of
coefficients where index = degree; lists are kept trimmed so the last entry
is nonzero and the zero polynomial is ``[]``.

Binary forms enter this module only as coefficient sequences
``c_0..c_d`` meaning ``sum c_i x^(d-i) y^i``.  They are dehomogenized at
``y = 1``; the root ``(1:0)`` is tracked separately through the degree drop.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence

__all__ = [
    "GaussianRational",
    "RootInterval",
    "conjugate",
    "trim",
    "degree",
    "poly_add",
    "poly_sub",
    "poly_mul",
    "poly_scale",
    "poly_divmod",
    "poly_eval",
    "derivative",
    "poly_gcd",
    "squarefree_part",
    "resultant",
    "discriminant",
    "form_discriminant",
    "is_square_free",
    "form_is_square_free",
    "dehomogenize",
    "integer_primitive",
    "sturm_sequence",
    "sturm_count",
    "isolate_real_roots",
    "refine_root",
    "projective_root_profile",
    "sqrt_upper",
    "interpolate",
]


class GaussianRational:
    """An element ``re + im*i`` of Q(i), stored exactly."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(i)")
            return GaussianRational(self.re / other, self.im / other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational((self.re * other.re + self.im * other.im) / n,
                                (self.im * other.re - self.re * other.im) / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, n: int):
        if n < 0:
            return GaussianRational(1) / (self ** -n)
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus ``re^2 + im^2``."""
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0


def conjugate(x):
    """Apply the conjugation fixing Q and sending i to -i.

    Works on scalars, on polynomials (coefficient lists) and on projective
    points (coefficient tuples); containers keep their type.
    """
    if isinstance(x, GaussianRational):
        return x.conjugate()
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, tuple):
        return tuple(conjugate(v) for v in x)
    if isinstance(x, list):
        return [conjugate(v) for v in x]
    raise TypeError(f"cannot conjugate {type(x).__name__}")


# ---------------------------------------------------------------------------
# dense univariate polynomials over a field
# ---------------------------------------------------------------------------

def trim(p: Iterable) -> list:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def degree(p: Sequence) -> int:
    """Degree of a trimmed polynomial; -1 for the zero polynomial."""
    return len(p) - 1


def poly_add(f, g):
    n = max(len(f), len(g))
    return trim((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)
                for i in range(n))


def poly_sub(f, g):
    n = max(len(f), len(g))
    return trim((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)
                for i in range(n))


def poly_mul(f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if not a:
            continue
        for j, b in enumerate(g):
            out[i + j] += a * b
    return trim(out)


def poly_scale(f, c):
    return trim(a * c for a in f)


def poly_divmod(f, g):
    """Quotient and remainder over the coefficient field."""
    f, g = trim(f), trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    lead = g[-1]
    if type(lead) is int and lead != 1:
        lead = Fraction(lead)
    r = list(f)
    q = [0] * max(len(f) - len(g) + 1, 0)
    dg = len(g) - 1
    for k in range(len(f) - len(g), -1, -1):
        coef = r[k + dg]
        if coef:
            if lead != 1:
                coef = coef / lead
            q[k] = coef
            for j in range(dg + 1):
                r[k + j] -= coef * g[j]
    return trim(q), trim(r[:dg])


def poly_rem(f, g):
    return poly_divmod(f, g)[1]


def poly_eval(f, x):
    acc = 0
    for a in reversed(f):
        acc = acc * x + a
    return acc


def derivative(f):
    return trim(i * f[i] for i in range(1, len(f)))


def _monic(f):
    lead = f[-1]
    if lead == 1:
        return list(f)
    return [a / lead for a in f]


def _to_field(f):
    return [a if not isinstance(a, int) else Fraction(a) for a in f]


def poly_gcd(f, g):
    """Monic gcd over the coefficient field; rejects two zero inputs."""
    f, g = trim(f), trim(g)
    if not f and not g:
        raise ValueError("gcd of two zero polynomials is undefined")
    f, g = _to_field(f), _to_field(g)
    while g:
        f, g = g, poly_rem(f, g)
    return _monic(f)


def squarefree_part(f):
    """``f / gcd(f, f')``, made monic."""
    f = trim(f)
    if not f:
        raise ValueError("zero polynomial has no square-free part")
    if len(f) == 1:
        return [Fraction(1)]
    if any(isinstance(a, GaussianRational) for a in f):
        g = poly_gcd(f, derivative(f))
        q, r = poly_divmod(_to_field(f), g)
        return _monic(q)
    zf = integer_primitive(f)
    g = _zz_gcd(zf, derivative(zf))
    if len(g) == 1:
        return _monic(_to_field(zf))
    q, r = poly_divmod(zf, g)
    return _monic(q)


def resultant(f, g):
    """Resultant of two polynomials via the Euclidean remainder sequence."""
    f, g = _to_field(trim(f)), _to_field(trim(g))
    if not f or not g:
        return Fraction(0)
    res = Fraction(1)
    while True:
        m, n = len(f) - 1, len(g) - 1
        if n == 0:
            return res * g[0] ** m
        r = poly_rem(f, g)
        if not r:
            return Fraction(0)
        k = len(r) - 1
        if (m * n) % 2:
            res = -res
        res *= g[-1] ** (m - k)
        f, g = g, r


def discriminant(f):
    """Discriminant with the usual normalization ``disc(at^2+bt+c) = b^2-4ac``."""
    f = trim(f)
    n = len(f) - 1
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    if n == 1:
        return Fraction(1)
    r = resultant(f, derivative(f))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * r / f[-1]


def dehomogenize(c: Sequence):
    """``F(t, 1)`` as a trimmed polynomial and the multiplicity of ``(1:0)``."""
    d = len(c) - 1
    f = trim(reversed(c))
    if not f:
        raise ValueError("zero form")
    return f, d - (len(f) - 1)


def _shear(c: Sequence, k) -> list:
    """Coefficients of ``F(X, Y + kX)`` (determinant one substitution)."""
    d = len(c) - 1
    out = [0] * (d + 1)
    # (Y + kX)^i X^(d-i) contributes binom(i, j) k^(i-j) X^(d-j) Y^j
    for i, ci in enumerate(c):
        if not ci:
            continue
        binom = 1
        for j in range(i, -1, -1):
            # j runs downward; binom = C(i, j)
            out[j] += ci * binom * k ** (i - j)
            binom = binom * j // (i - j + 1)
    return out


def form_discriminant(c: Sequence):
    """Discriminant of the binary form ``sum c_i x^(d-i) y^i``.

    Invariant under SL2, and zero exactly when the form has a repeated
    projective root (including at ``(1:0)``).
    """
    if not any(c):
        raise ValueError("zero form")
    d = len(c) - 1
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if not c[0]:
        for k in range(1, d + 2):
            sheared = _shear(c, k)
            if sheared[0]:
                c = sheared
                break
    return discriminant(list(reversed(c)))


# ---------------------------------------------------------------------------
# integer polynomials: square-freeness and Sturm sequences
# ---------------------------------------------------------------------------

def integer_primitive(f) -> list[int]:
    """Positive rational multiple of ``f`` with coprime integer coefficients."""
    f = trim(f)
    if not f:
        return []
    den = 1
    for a in f:
        if type(a) is not int:
            a = Fraction(a)
            den = den * a.denominator // gcd(den, a.denominator)
    ints = [int(a * den) for a in f]
    g = 0
    for a in ints:
        g = gcd(g, a)
    return [a // g for a in ints]


def _zz_content_free(f: list[int]) -> list[int]:
    g = 0
    for a in f:
        g = gcd(g, a)
    if g > 1:
        return [a // g for a in f]
    return f


def _zz_gcd_degree(f: list[int], g: list[int]) -> int:
    """Degree of gcd(f, g) over Q via a primitive remainder sequence."""
    f, g = trim(f), trim(g)
    if len(f) < len(g):
        f, g = g, f
    if not g:
        return len(f) - 1
    while True:
        r = trim(_prem_plain(f, g))
        if not r:
            return len(g) - 1
        if len(r) == 1:
            return 0
        f, g = g, _zz_content_free(r)


def _zz_gcd(f: list[int], g: list[int]) -> list[int]:
    """Primitive integer gcd via a primitive remainder sequence."""
    f, g = _zz_content_free(trim(f)), _zz_content_free(trim(g))
    if len(f) < len(g):
        f, g = g, f
    while g:
        r = trim(_prem_plain(f, g))
        f, g = g, _zz_content_free(r)
    f = _zz_content_free(f)
    return [-a for a in f] if f[-1] < 0 else f


def _prem_plain(f: list[int], g: list[int]) -> list[int]:
    """Pseudo-remainder with multiplier exactly ``lc(g)^(deg f - deg g + 1)``."""
    dg = len(g) - 1
    if len(f) - 1 < dg:
        return list(f)
    r = list(f)
    lead = g[-1]
    for top in range(len(f) - 1, dg - 1, -1):
        coef = r[top]
        if lead != 1:
            r = [a * lead for a in r]
        if coef:
            shift = top - dg
            for j in range(dg + 1):
                r[shift + j] -= coef * g[j]
    return trim(r[:dg])


def _field_is_square_free(f) -> bool:
    return len(poly_gcd(f, derivative(f))) == 1


def is_square_free(f, homogeneous: bool = False) -> bool:
    """True iff ``f`` has no repeated root.

    With ``homogeneous=True``, ``f`` is a binary form ``c_0..c_d`` and the
    test is projective: a root at ``(1:0)`` of multiplicity >= 2 counts.
    """
    if homogeneous:
        return form_is_square_free(f)
    f = trim(f)
    if not f:
        raise ValueError("zero polynomial")
    if len(f) <= 2:
        return True
    if any(isinstance(a, GaussianRational) for a in f):
        return _field_is_square_free(f)
    zf = integer_primitive(f)
    return _zz_gcd_degree(zf, derivative(zf)) == 0


def form_is_square_free(c: Sequence) -> bool:
    if not any(c):
        raise ValueError("zero form")
    f, inf_mult = dehomogenize(c)
    if inf_mult > 1:
        return False
    return is_square_free(f)


# -- Sturm ------------------------------------------------------------------

def sturm_sequence(f) -> list[list[int]]:
    """Sturm sequence of the square-free part of ``f`` with integer entries.

    Entries are positive multiples of the classical signed remainders, so
    sign patterns agree with the textbook sequence.
    """
    f = trim(f)
    if not f:
        raise ValueError("zero polynomial")
    p0 = integer_primitive(f)
    if len(p0) > 2 and not is_square_free(p0):
        p0 = integer_primitive(squarefree_part(p0))
    seq = [p0]
    if len(p0) == 1:
        return seq
    seq.append(_zz_content_free(derivative(p0)))
    while len(seq[-1]) > 1:
        a, b = seq[-2], seq[-1]
        r = _prem_plain(a, b)
        if not r:
            break
        delta = len(a) - len(b)
        # r = lc(b)^(delta+1) * rem(a, b); next entry is -rem scaled positively
        neg = b[-1] < 0 and (delta + 1) % 2 == 1
        r = _zz_content_free(r)
        seq.append(r if neg else [-x for x in r])
    return seq


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _variations(signs: Iterable[int]) -> int:
    last = 0
    count = 0
    for s in signs:
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def _variations_at(seq, x) -> int:
    if x is None:
        raise ValueError("use _variations_at_inf for infinite points")
    return _variations(_sign(poly_eval(p, x)) for p in seq)


def _variations_at_inf(seq, positive: bool) -> int:
    if positive:
        return _variations(_sign(p[-1]) for p in seq)
    return _variations(_sign(p[-1]) * (-1 if (len(p) - 1) % 2 else 1) for p in seq)


def sturm_count(f, lo=None, hi=None, seq=None) -> int:
    """Number of distinct real roots in the open interval ``(lo, hi)``.

    ``None`` stands for -infinity / +infinity.
    """
    if seq is None:
        seq = sturm_sequence(f)
    if lo is not None and hi is not None and lo >= hi:
        return 0
    v_lo = _variations_at_inf(seq, False) if lo is None else _variations_at(seq, lo)
    v_hi = _variations_at_inf(seq, True) if hi is None else _variations_at(seq, hi)
    count = v_lo - v_hi
    if hi is not None and poly_eval(seq[0], hi) == 0:
        count -= 1
    return count


@dataclass(frozen=True)
class RootInterval:
    """Isolating interval for one real root.

    ``lo == hi`` marks an exact rational root; otherwise the root lies in
    the open interval ``(lo, hi)`` and neither endpoint is a root.
    """

    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        if self.exact:
            return x == self.lo
        return self.lo < x < self.hi


def _cauchy_bound(f: list[int]) -> Fraction:
    lead = abs(f[-1])
    m = max(abs(a) for a in f[:-1]) if len(f) > 1 else 0
    bound = 1 + Fraction(m, lead)
    p = Fraction(1)
    while p <= bound:
        p *= 2
    return p


def isolate_real_roots(f) -> list[RootInterval]:
    """Disjoint dyadic isolating intervals, one per real root, increasing.

    ``f`` must be square-free (pass the square-free part).
    """
    f = trim(f)
    if not f:
        raise ValueError("zero polynomial")
    zf = integer_primitive(f)
    if len(zf) > 2 and not is_square_free(zf):
        raise ValueError("isolate_real_roots needs a square-free polynomial")
    if len(zf) == 1:
        return []
    seq = sturm_sequence(zf)
    bound = _cauchy_bound(zf)
    out: list[RootInterval] = []

    def split(lo, hi, n):
        # exactly n roots in the open interval (lo, hi); lo, hi non-roots
        if n == 0:
            return
        if n == 1:
            out.append(RootInterval(lo, hi))
            return
        mid = (lo + hi) / 2
        left = sturm_count(zf, lo, mid, seq)
        if poly_eval(zf, mid) == 0:
            # keep neighbouring endpoints off the exact root
            eps = (hi - lo) / 4
            while (poly_eval(zf, mid - eps) == 0 or poly_eval(zf, mid + eps) == 0
                   or sturm_count(zf, mid - eps, mid + eps, seq) != 1):
                eps /= 2
            split(lo, mid - eps, left - sturm_count(zf, mid - eps, mid, seq))
            out.append(RootInterval(mid, mid))
            split(mid + eps, hi, n - left - 1 - sturm_count(zf, mid, mid + eps, seq))
        else:
            split(lo, mid, left)
            split(mid, hi, n - left)

    split(-bound, bound, sturm_count(zf, -bound, bound, seq))
    return out


def refine_root(f, interval: RootInterval, width) -> RootInterval:
    """Bisect an isolating interval of a square-free ``f`` below ``width``."""
    if interval.exact:
        return interval
    zf = integer_primitive(f)
    lo, hi = interval.lo, interval.hi
    s_lo = _sign(poly_eval(zf, lo))
    while hi - lo >= width:
        mid = (lo + hi) / 2
        s_mid = _sign(poly_eval(zf, mid))
        if s_mid == 0:
            return RootInterval(mid, mid)
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return RootInterval(lo, hi)


def projective_root_profile(c: Sequence) -> tuple[int, int]:
    """``(distinct projective roots, distinct real ones)`` of a binary form."""
    if not any(c):
        raise ValueError("zero form")
    f, inf_mult = dehomogenize(c)
    at_inf = 1 if inf_mult > 0 else 0
    if len(f) == 1:
        return at_inf, at_inf
    sqf = squarefree_part(f)
    total = len(sqf) - 1 + at_inf
    real = sturm_count(sqf) + at_inf
    return total, real


def sqrt_upper(x: Fraction, bits: int = 64) -> Fraction:
    """Dyadic upper bound for ``sqrt(x)`` with ``bits`` fractional bits."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative argument")
    if x == 0:
        return Fraction(0)
    scale = 1 << (2 * bits)
    num = x.numerator * scale
    q = -(-num // x.denominator)  # ceil(x * 4^bits)
    r = isqrt(q)
    if r * r < q:
        r += 1
    return Fraction(r, 1 << bits)


def interpolate(xs: Sequence, ys: Sequence) -> list:
    """Coefficients of the polynomial through ``(xs[i], ys[i])`` (Newton form)."""
    n = len(xs)
    dd = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
    poly: list = [dd[-1]]
    for i in range(n - 2, -1, -1):
        # poly = poly * (t - xs[i]) + dd[i]
        shifted = [Fraction(0)] + poly
        for k in range(len(poly)):
            shifted[k] -= xs[i] * poly[k]
        shifted[0] += dd[i]
        poly = shifted
    return trim(poly)

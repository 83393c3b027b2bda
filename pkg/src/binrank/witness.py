"""Conjugation-stable point sets on the rational normal curve.

A point ``(a:b)`` of P^1 sits on the curve as ``(a x + b y)^d``.  Given a
square-free apolar form ``g`` of degree ``s``, its roots are the points of
an ``s``-term decomposition ``f = sum lambda_i (a_i x + b_i y)^d``.

When every root of ``g`` lies in Q(i) the decomposition is solved exactly.
Otherwise the roots are enclosed in boxes certified by Weierstrass
inclusion discs, the coefficients are computed at the box centres, and the
reported residual bound holds for every choice of points inside the boxes,
the true roots included.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd
from typing import Sequence

import mpmath
import numpy as np

from .apolarity import BinaryForm, apolar_action
from .exact import (
    GaussianRational,
    conjugate,
    form_is_square_free,
    poly_eval,
    sqrt_upper,
    sturm_count,
    trim,
)
from .linalg import rank, solve
from .realrank import Label

EXACT = "EXACT"
BOXED = "BOXED"
DEFAULT_TOL = Fraction(1, 10**9)
START_BITS = 64
BITS_STEP = 64
MAX_HALVINGS = 256


class CertificationFailed(RuntimeError):
    """The residual could not be certified below the tolerance in budget."""


def _gq(x) -> GaussianRational:
    return x if isinstance(x, GaussianRational) else GaussianRational(x)


@dataclass(frozen=True)
class CurvePoint:
    """The curve point ``(alpha x + beta y)^d`` with ``(alpha:beta)`` canonical.

    For BOXED points ``alpha == 1`` and the true ``beta`` lies in the square
    of half-width ``radius`` centred at the stored ``beta``.
    """

    alpha: GaussianRational
    beta: GaussianRational
    kind: str = EXACT
    radius: Fraction = Fraction(0)

    def __post_init__(self):
        a, b = _gq(self.alpha), _gq(self.beta)
        if not a and not b:
            raise ValueError("(0:0) is not a projective point")
        if a:
            a, b = GaussianRational(1), b / a
        else:
            b = GaussianRational(1)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "radius", Fraction(self.radius))

    @property
    def key(self) -> tuple:
        return (self.alpha.re, self.alpha.im, self.beta.re, self.beta.im)

    def conjugate(self) -> "CurvePoint":
        return CurvePoint(self.alpha.conjugate(), self.beta.conjugate(), self.kind, self.radius)

    def is_real(self) -> bool:
        return self.alpha.is_real() and self.beta.is_real()

    def power_coeffs(self, d: int) -> list[GaussianRational]:
        """Monomial coefficients of ``(alpha x + beta y)^d``."""
        return [comb(d, k) * self.alpha ** (d - k) * self.beta ** k for k in range(d + 1)]


@dataclass(frozen=True)
class DecompositionSet:
    points: tuple
    pairing: tuple
    coefficients: tuple | None = None
    residual_bound: Fraction = Fraction(0)
    kind: str = EXACT
    precision_bits: int = 0

    @property
    def label(self) -> Label:
        return label_of_set(self)

    @property
    def fixed_points(self) -> int:
        return sum(1 for i, j in enumerate(self.pairing) if i == j)


def _as_point(p) -> CurvePoint:
    if isinstance(p, CurvePoint):
        return p
    a, b = p
    return CurvePoint(_gq(a), _gq(b))


def is_conjugation_stable(points: Sequence) -> tuple[bool, tuple | None]:
    """Does conjugation permute ``points``?  Returns the pairing if so."""
    pts = [_as_point(p) for p in points]
    index = {}
    for i, p in enumerate(pts):
        if p.key in index:
            raise ValueError(f"duplicate point at positions {index[p.key]} and {i}")
        index[p.key] = i
    pairing = []
    for p in pts:
        j = index.get(p.conjugate().key)
        if j is None:
            return False, None
        pairing.append(j)
    return True, tuple(pairing)


def label_of_set(S) -> Label:
    """``(#S, number of conjugate pairs)``."""
    if isinstance(S, DecompositionSet):
        pairing = S.pairing
    else:
        ok, pairing = is_conjugation_stable(S)
        if not ok:
            raise ValueError("set is not stable under conjugation")
    s = len(pairing)
    fixed = sum(1 for i, j in enumerate(pairing) if i == j)
    return Label(s, (s - fixed) // 2)


def in_span(P: Sequence, S) -> bool:
    """Exact test that ``P`` lies in the span of the curve points ``S``."""
    pts = S.points if isinstance(S, DecompositionSet) else [_as_point(p) for p in S]
    if any(p.kind != EXACT for p in pts):
        raise ValueError("in_span needs exact points")
    d = len(P) - 1
    rows = [p.power_coeffs(d) for p in pts]
    base = rank(rows, d + 1) if rows else 0
    return rank(rows + [[_gq(x) for x in P]], d + 1) == base


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------

def _to_fraction(x) -> Fraction:
    """Exact value of a float or mpf (both are dyadic)."""
    if isinstance(x, mpmath.mpf):
        sign, man, exp, _ = x._mpf_
        man = -int(man) if sign else int(man)
        return Fraction(man * (1 << exp)) if exp >= 0 else Fraction(man, 1 << -exp)
    return Fraction(float(x))


def _approx_roots(h: list, bits: int) -> list | None:
    """Approximate roots of ``h``: doubles at 64 bits, Newton-refined beyond."""
    n = len(h) - 1
    with np.errstate(all="ignore"):
        r = np.roots([float(c) for c in reversed(h)])
    if len(r) != n or not np.all(np.isfinite(r)):
        return _polyroots(h, bits)
    if bits <= 64:
        return [(float(z.real), float(z.imag)) for z in r]
    out = []
    with mpmath.workprec(bits + 32):
        coeffs = [mpmath.mpf(int(c)) for c in reversed(h)]
        dcoeffs = [c * (n - i) for i, c in enumerate(coeffs[:-1])]
        tiny = mpmath.mpf(2) ** -(bits + 8)
        for z in r:
            z = mpmath.mpc(complex(z))
            for _ in range(bits.bit_length() + 4):
                slope = mpmath.polyval(dcoeffs, z)
                if not slope:
                    return _polyroots(h, bits)
                step = mpmath.polyval(coeffs, z) / slope
                z -= step
                if abs(step) <= tiny * max(1, abs(z)):
                    break
            out.append((z.real, z.imag))
    return out


def _polyroots(h: list, bits: int) -> list | None:
    coeffs = [int(c) for c in reversed(h)]
    with mpmath.workprec(bits + 32):
        for steps in (100, 400, 1600):
            try:
                r = mpmath.polyroots(coeffs, maxsteps=steps, extraprec=bits + 32)
            except mpmath.libmp.NoConvergence:
                continue
            r = [mpmath.mpc(z) for z in r]
            return [(z.real, z.imag) for z in r]
    return None


def _centres(h: list, approx: list) -> list[GaussianRational] | None:
    """Snap the Sturm-counted real roots to the axis and mirror the rest."""
    n_real = sturm_count(h)
    approx = sorted(approx, key=lambda z: abs(z[1]))
    centres = [GaussianRational(_to_fraction(z[0])) for z in approx[:n_real]]
    rest = approx[n_real:]
    upper = [GaussianRational(_to_fraction(z[0]), _to_fraction(z[1])) for z in rest if z[1] > 0]
    if 2 * len(upper) != len(rest):
        return None
    return centres + upper + [z.conjugate() for z in upper]


def _sorted_points(roots: list, at_infinity: bool) -> list[CurvePoint]:
    """Real roots ascending, then conjugate pairs (upper member first)."""
    real = sorted((z for z in roots if z.im == 0), key=lambda z: z.re)
    upper = sorted((z for z in roots if z.im > 0), key=lambda z: (z.re, z.im))
    pts = [CurvePoint(GaussianRational(1), z) for z in real]
    for z in upper:
        pts.append(CurvePoint(GaussianRational(1), z))
        pts.append(CurvePoint(GaussianRational(1), z.conjugate()))
    if at_infinity:
        pts.append(CurvePoint(GaussianRational(0), GaussianRational(1)))
    return pts


def _common_scale(values: Sequence[GaussianRational]) -> tuple[list[tuple[int, int]], int]:
    """Gaussian integers ``Z`` and ``q`` with ``values[i] == Z[i] / q``."""
    q = 1
    for v in values:
        for part in (v.re, v.im):
            q = q * part.denominator // gcd(q, part.denominator)
    return [(int(v.re * q), int(v.im * q)) for v in values], q


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gnorm(a) -> int:
    return a[0] * a[0] + a[1] * a[1]


def _weierstrass_radii(h: list, centres: list, bits: int) -> list[Fraction]:
    """Radii ``n |W_i|`` of the Weierstrass inclusion discs of ``h``.

    ``W_i = h(z_i) / (lc(h) prod_{j != i} (z_i - z_j))``.  Pairwise disjoint
    discs each hold exactly one root.  Empty when two centres coincide.
    """
    n = len(h) - 1
    Z, q = _common_scale(centres)
    lead = int(h[-1])
    radii = []
    for i, z in enumerate(Z):
        acc = (0, 0)  # Horner for h(z) * q^n
        qpow = 1
        for j in range(n, -1, -1):
            acc = _gmul(acc, z)
            acc = (acc[0] + int(h[j]) * qpow, acc[1])
            qpow *= q
        den = lead * lead * q * q
        for j, w in enumerate(Z):
            if j != i:
                dz = _gnorm((z[0] - w[0], z[1] - w[1]))
                if dz == 0:
                    return []
                den *= dz
        radii.append(sqrt_upper(Fraction(n * n * _gnorm(acc), den), bits))
    return radii


def _boxes_disjoint(pts: Sequence[CurvePoint]) -> bool:
    finite = [p for p in pts if p.alpha == 1]
    for i in range(len(finite)):
        for j in range(i + 1, len(finite)):
            p, q = finite[i], finite[j]
            gap = p.radius + q.radius
            if abs(p.beta.re - q.beta.re) <= gap and abs(p.beta.im - q.beta.im) <= gap:
                return False
    return True


def _abs_upper(z: GaussianRational, bits: int = 64) -> Fraction:
    return sqrt_upper(z.norm(), bits)


def residual_bound(f: Sequence, S: DecompositionSet, bits: int = 64) -> Fraction:
    """Upper bound on ``max_k |f_k - sum lambda_i v_i(k)| / max_k |f_k|``.

    The bound covers every choice of points inside the boxes of ``S``.
    """
    d = len(f) - 1
    pts, lam = S.points, S.coefficients
    Z, q = _common_scale([p.beta for p in pts] + list(lam))
    B, L = Z[:len(pts)], Z[len(pts):]
    top = q ** (d + 1)
    res = [(int(Fraction(c) * top), 0) for c in f]
    if any(Fraction(c) * top != r[0] for c, r in zip(f, res)):
        raise ValueError("form coefficients must be integers")
    for p, b, l in zip(pts, B, L):
        if p.alpha == 0:  # the point (0:1) contributes l * y^d
            res[d] = (res[d][0] - l[0] * q ** d, res[d][1] - l[1] * q ** d)
            continue
        power = (1, 0)
        for k in range(d + 1):
            t = _gmul(power, l)
            w = comb(d, k) * q ** (d - k)
            res[k] = (res[k][0] - w * t[0], res[k][1] - w * t[1])
            power = _gmul(power, b)
    centre_err = max(sqrt_upper(Fraction(_gnorm(r), top * top), bits) for r in res)
    pert = Fraction(0)
    for p, l in zip(pts, lam):
        if not p.radius:
            continue
        delta = sqrt_upper(2 * p.radius * p.radius, bits)
        mod = _abs_upper(p.beta, bits) + delta
        worst = max(comb(d, k) * k * mod ** (k - 1) for k in range(1, d + 1))
        pert += _abs_upper(l, bits) * worst * delta
    scale = max(abs(Fraction(c)) for c in f)
    return (centre_err + pert) / scale


def _exact_decomposition(f, pts) -> DecompositionSet:
    d = len(f) - 1
    cols = [p.power_coeffs(d) for p in pts]
    rows = [[cols[i][k] for i in range(len(pts))] for k in range(d + 1)]
    lam = solve(rows, [GaussianRational(c) for c in f])
    if lam is None:
        raise ValueError("form is not in the span of the apolar roots")
    ok, pairing = is_conjugation_stable(pts)
    assert ok
    return DecompositionSet(tuple(pts), pairing, tuple(_gq(x) for x in lam), Fraction(0), EXACT)


def _gaussian_candidate(z: GaussianRational, radius: Fraction, lead: int):
    """The only Gaussian rational root of ``h`` that can lie in the box, if
    the box is small enough to decide; ``False`` when undecidable.

    A Gaussian rational root of an integer polynomial with leading
    coefficient ``L`` has coordinates with denominators at most ``2L``;
    distinct such values are ``1/(4L^2)`` apart.
    """
    den = 2 * abs(lead)
    if radius * 8 * lead * lead >= 1:
        return False
    return GaussianRational(z.re.limit_denominator(den), z.im.limit_denominator(den))


def _numeric_coefficients(f, pts, bits):
    d = len(f) - 1
    if bits <= 64:
        V = np.array([[complex(float(c.re), float(c.im)) for c in p.power_coeffs(d)]
                      for p in pts]).T
        with np.errstate(all="ignore"):
            lam = np.linalg.lstsq(V, np.array([float(c) for c in f], dtype=complex),
                                  rcond=None)[0]
        if not np.all(np.isfinite(lam)):
            return None
        return [GaussianRational(Fraction(float(l.real)), Fraction(float(l.imag))) for l in lam]
    with mpmath.workprec(bits + 32):
        cols = []
        for p in pts:
            if p.alpha == 0:
                cols.append([mpmath.mpc(0)] * d + [mpmath.mpc(1)])
                continue
            b = mpmath.mpc(mpmath.mpf(p.beta.re.numerator) / p.beta.re.denominator,
                           mpmath.mpf(p.beta.im.numerator) / p.beta.im.denominator)
            cols.append([comb(d, k) * b ** k for k in range(d + 1)])
        V = mpmath.matrix([[cols[i][k] for i in range(len(pts))] for k in range(d + 1)])
        VH = V.H
        try:
            lam = mpmath.lu_solve(VH * V, VH * mpmath.matrix([mpmath.mpf(int(c)) for c in f]))
        except ZeroDivisionError:
            return None
        return [GaussianRational(_to_fraction(mpmath.mpc(l).real), _to_fraction(mpmath.mpc(l).imag))
                for l in lam]


def _boxed_attempt(f, h, at_infinity, bits, final):
    """One refinement level: an exact set, a certified boxed set, or None."""
    approx = _approx_roots(h, bits)
    if approx is None:
        return None
    centres = _centres(h, approx)
    if centres is None:
        return None
    rbits = 2 * bits + 64
    radii = _weierstrass_radii(h, centres, rbits)
    if not radii:
        return None
    radius_of = {(z.re, z.im): r for z, r in zip(centres, radii)}
    pts = []
    for p in _sorted_points(centres, at_infinity):
        if p.alpha == 1:
            # mirror images share one box size
            r = max(radius_of[(p.beta.re, p.beta.im)], radius_of[(p.beta.re, -p.beta.im)])
            p = CurvePoint(p.alpha, p.beta, BOXED, r)
        pts.append(p)
    if not _boxes_disjoint(pts):
        return None
    lead = int(h[-1])
    exact, decided = [], True
    for p in pts:
        if p.alpha == 0:
            continue
        cand = _gaussian_candidate(p.beta, p.radius, lead)
        if cand is False:
            decided = False
        elif poly_eval(h, cand) != 0:
            exact = None
            break
        else:
            exact.append(cand)
    if exact is not None:
        if decided:
            return _exact_decomposition(f, _sorted_points(exact, at_infinity))
        if not final:
            return None
    lam = _numeric_coefficients(f, pts, bits)
    if lam is None:
        return None
    pairing = _pairing_by_centres(pts)
    for i, j in enumerate(pairing):
        if i == j:
            lam[i] = GaussianRational(lam[i].re)
        elif i < j:
            lam[j] = lam[i].conjugate()
    S = DecompositionSet(tuple(pts), pairing, tuple(lam), Fraction(0), BOXED, bits)
    return DecompositionSet(S.points, S.pairing, S.coefficients,
                            residual_bound(f, S), BOXED, bits)


def _pairing_by_centres(pts) -> tuple:
    index = {p.key: i for i, p in enumerate(pts)}
    return tuple(index[p.conjugate().key] for p in pts)


def decompose(f: BinaryForm, g, tol=DEFAULT_TOL) -> DecompositionSet:
    """Points and coefficients of the decomposition of ``f`` read off the
    square-free apolar form ``g``."""
    tol = Fraction(str(tol)) if isinstance(tol, float) else Fraction(tol)
    fc = tuple(f.coeffs) if isinstance(f, BinaryForm) else BinaryForm(tuple(f)).coeffs
    gc = tuple(g.coeffs) if isinstance(g, BinaryForm) else BinaryForm(tuple(g)).coeffs
    d, s = len(fc) - 1, len(gc) - 1
    if s > d:
        raise ValueError(f"witness degree {s} exceeds form degree {d}")
    if any(apolar_action(gc, fc)):
        raise ValueError("witness is not apolar to the form")
    if not form_is_square_free(gc):
        raise ValueError("witness is not square-free")
    h = list(trim(gc))  # g(1, u) = sum b_j u^j
    at_infinity = len(h) - 1 < s
    if len(h) == 1:
        return _exact_decomposition(fc, _sorted_points([], at_infinity))
    last = None
    # boxes must shrink below 1/(8 lc^2) before Gaussian rational roots are decidable
    need = 2 * abs(int(h[-1])).bit_length() + 16
    bits = max(START_BITS, -(-need // BITS_STEP) * BITS_STEP)
    stop = bits + MAX_HALVINGS
    while bits <= stop:
        S = _boxed_attempt(fc, h, at_infinity, bits, bits + BITS_STEP > stop)
        if S is not None:
            if S.kind == EXACT or S.residual_bound < tol:
                return S
            last = S
        bits += BITS_STEP
    detail = f"best bound {float(last.residual_bound):.3e}" if last else "no certified boxes"
    raise CertificationFailed(f"CERTIFICATION-FAILED for witness {gc}: {detail}")


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    checks: dict = field(default_factory=dict)
    label: Label | None = None
    residual_bound: Fraction | None = None

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def verify_decomposition(f, S: DecompositionSet, tol=DEFAULT_TOL, *,
                         expected_label: Label | None = None,
                         witness=None) -> VerificationReport:
    tol = Fraction(str(tol)) if isinstance(tol, float) else Fraction(tol)
    fc = tuple(f.coeffs) if isinstance(f, BinaryForm) else tuple(f)
    checks: dict[str, bool] = {}
    pts = list(S.points)
    keys = [p.key for p in pts]
    checks["distinct"] = len(set(keys)) == len(keys) and (
        S.kind == EXACT or _boxes_disjoint(pts))

    pairing = S.pairing
    stable = len(pairing) == len(pts) and all(pairing[pairing[i]] == i for i in range(len(pts)))
    if stable:
        for i, j in enumerate(pairing):
            p, q = pts[i], pts[j]
            if i == j:
                stable &= p.is_real()
            else:
                stable &= (not p.is_real() and q.key == p.conjugate().key
                           and q.radius == p.radius)
    if stable and S.kind == EXACT:
        ok, exact_pairing = is_conjugation_stable(pts) if checks["distinct"] else (False, None)
        stable = ok and exact_pairing == tuple(pairing)
    checks["conjugation_stable"] = bool(stable)

    lam = S.coefficients
    coef_ok = lam is not None and len(lam) == len(pts)
    if coef_ok and stable:
        for i, j in enumerate(pairing):
            if i == j:
                coef_ok &= _gq(lam[i]).is_real()
            else:
                coef_ok &= _gq(lam[j]) == conjugate(_gq(lam[i]))
    checks["coefficients_conjugate"] = bool(coef_ok)

    bound = None
    if coef_ok:
        if S.kind == EXACT:
            d = len(fc) - 1
            res = [_gq(c) for c in fc]
            for p, l in zip(pts, lam):
                for k, v in enumerate(p.power_coeffs(d)):
                    res[k] = res[k] - l * v
            bound = Fraction(0) if not any(res) else residual_bound(fc, S)
            checks["span"] = in_span(fc, S) and bound == 0
        else:
            bound = residual_bound(fc, S)
            checks["span"] = bound <= tol
    else:
        checks["span"] = False

    label = None
    if stable:
        label = label_of_set(S)
        lab_ok = label.real_points == S.fixed_points
        if expected_label is not None:
            lab_ok &= label == expected_label
        checks["label"] = lab_ok
    else:
        checks["label"] = False

    if witness is not None:
        checks["roots_enclosed"] = _roots_enclosed(witness, S)
    return VerificationReport(checks, label, bound)


def _roots_enclosed(witness, S: DecompositionSet) -> bool:
    gc = tuple(witness.coeffs) if isinstance(witness, BinaryForm) else tuple(witness)
    h = trim(gc)
    finite = [p for p in S.points if p.alpha == 1]
    infinite = [p for p in S.points if p.alpha == 0]
    if len(finite) != len(h) - 1 or len(infinite) != len(gc) - len(h):
        return False
    if S.kind == EXACT:
        return all(poly_eval(h, p.beta) == 0 for p in finite)
    centres = [p.beta for p in finite]
    radii = _weierstrass_radii(h, centres, 2 * max(S.precision_bits, START_BITS) + 64)
    if not radii:
        return False
    return all(r <= p.radius for r, p in zip(radii, finite)) and _boxes_disjoint(finite)

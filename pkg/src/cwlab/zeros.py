"""Zeros of the two-saddle approximation Psi_N and of the exact Z near beta = 1.

    Psi_N(beta) = 1/sqrt(1 - beta) + 2 sqrt(beta / (beta - beta^2 + u_beta^2)) exp(-N h_beta(u_beta))

Psi_N vanishes where

    h_beta(u_beta) = -(1/N) L(beta) + 2 pi i k / N,
    L(beta) = log(-(1/2) sqrt((beta - beta^2 + u_beta^2) / (beta - beta^2))),

which is solved per k on each half plane.  Zeros of Z itself are isolated
with the argument principle (phase tracking along cell boundaries), then
polished by Newton with the exact derivative.

On the upper branch of Gamma, Im h_beta(u_beta) is negative and decreasing,
so the zero-counting measure uses |Delta Im h| / 2 pi.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import gmpy2
from gmpy2 import mpc, mpfr

from .critical import CurveSegment, CurvePoint, gamma_im_h_at_radius, gamma_point_with_im_h
from .errors import CoverageError, DomainError, NumericalError, SingularityProximityError
from .model import ComplexBeta, as_beta, largest_summand, z_and_derivative, z_binomial
from .numerics import Precision, as_precision, principal_sqrt, required_precision, workprec
from .saddle import SADDLE_DIGITS, SADDLE_RADIUS, find_u_beta

log = logging.getLogger(__name__)

SINGULAR_RADIUS = 0.005
PSI_DIGITS = 40
MAX_PHASE_DEPTH = 24
MAX_CELL_DEPTH = 14


@dataclass(frozen=True)
class Annulus:
    delta: float
    c_max: float

    def contains(self, beta: complex) -> bool:
        d = abs(beta - 1)
        return self.delta <= d <= self.c_max


@dataclass
class ZeroSet:
    n: int
    zeros: List[mpc]
    source: str  # exact-Z | psi
    residuals: List[float]
    region: Annulus
    unresolved: List[dict] = field(default_factory=list)
    log: List[str] = field(default_factory=list)

    def as_complex(self) -> List[complex]:
        return [complex(float(z.real), float(z.imag)) for z in self.zeros]

    def min_separation(self) -> float:
        zs = self.as_complex()
        best = math.inf
        for i in range(len(zs)):
            for j in range(i + 1, len(zs)):
                best = min(best, abs(zs[i] - zs[j]))
        return best

    def rows(self):
        return [{"re": float(z.real), "im": float(z.imag), "residual": r, "source": self.source, "n": self.n}
                for z, r in zip(self.zeros, self.residuals)]


def _sorted(zeros, residuals):
    order = sorted(range(len(zeros)), key=lambda i: (float(zeros[i].real), float(zeros[i].imag)))
    return [zeros[i] for i in order], [residuals[i] for i in order]


# ---------------------------------------------------------------------------
# Psi_N


def _psi_parts(b: mpc, n: int, radius: float, prec: Precision):
    beta = ComplexBeta.from_value(b)
    d = find_u_beta(beta, prec, radius)
    u2 = d.u_beta ** 2
    first = 1 / principal_sqrt(1 - b)
    amp = 2 * principal_sqrt(b / (b - b * b + u2))
    second = amp * gmpy2.exp(-n * d.h_at_saddle)
    return first, second, d, u2


def _check_psi_domain(b: complex, radius: float):
    dist = abs(b - 1)
    if dist < SINGULAR_RADIUS:
        raise SingularityProximityError(f"|beta - 1| = {dist:.3g} < {SINGULAR_RADIUS}")
    if dist > radius * (1 + 1e-12):
        raise DomainError(f"|beta - 1| = {dist:.3g} outside the saddle radius {radius}")


def psi_terms(beta, n: int, precision=PSI_DIGITS, radius: float = SADDLE_RADIUS):
    """The two terms of Psi_N separately."""
    beta = as_beta(beta)
    _check_psi_domain(complex(beta), radius)
    prec = as_precision(precision)
    with workprec(prec):
        first, second, _, _ = _psi_parts(beta.to_bigc(), n, radius, prec)
    return first, second


def psi(beta, n: int, precision=PSI_DIGITS, radius: float = SADDLE_RADIUS) -> mpc:
    first, second = psi_terms(beta, n, precision, radius)
    with workprec(precision):
        return first + second


def _psi_at(b: mpc, n: int, radius: float, prec: Precision) -> mpc:
    first, second, _, _ = _psi_parts(b, n, radius, prec)
    return first + second


def _zero_condition(b: mpc, n: int, k: int, radius: float, prec: Precision) -> mpc:
    _, _, d, u2 = _psi_parts(b, n, radius, prec)
    ratio = (b - b * b + u2) / (b - b * b)
    big_l = gmpy2.log(-principal_sqrt(ratio) / 2)
    return d.h_at_saddle + big_l / n - 2 * gmpy2.const_pi() * mpc(0, 1) * k / n


def _newton_fd(func, b: mpc, prec: Precision, tol, max_iter=60):
    """Newton with a centred finite-difference derivative."""
    step_size = mpfr(10) ** (-(prec.decimal_digits // 3))
    for _ in range(max_iter):
        g = func(b)
        dg = (func(b + step_size) - func(b - step_size)) / (2 * step_size)
        if dg == 0:
            return None
        step = g / dg
        if abs(step) > 0.05:
            step = step / abs(step) * mpfr("0.05")
        b = b - step
        if abs(step) <= tol:
            return b
    return None


def psi_zero_for_k(n: int, k: int, precision=PSI_DIGITS, radius: float = SADDLE_RADIUS) -> Optional[mpc]:
    """Upper-half-plane zero tilde-beta_k of Psi_N, seeded on Gamma.

    Near beta = 1 the prefactor log L has Im L close to -pi/2 on the upper
    branch, so the seed sits at Im h = -(2 pi k - pi/2) / N rather than
    -2 pi k / N.  Returns None when Newton leaves the saddle neighbourhood.
    """
    prec = as_precision(precision)
    target = -(2 * math.pi * k - math.pi / 2) / n
    if target >= 0:
        return None
    try:
        seed = gamma_point_with_im_h(target, prec, radius).to_bigc(prec)
    except NumericalError:
        return None
    tol = mpfr(10) ** (-(prec.decimal_digits - 10))

    def g(b):
        _check_psi_domain(complex(b), radius)
        return _zero_condition(b, n, -k, radius, prec)

    def p(b):
        _check_psi_domain(complex(b), radius)
        return _psi_at(b, n, radius, prec)

    with workprec(prec):
        try:
            b = _newton_fd(g, seed, prec, tol)
            if b is None:
                return None
            b = _newton_fd(p, b, prec, tol)
        except NumericalError:
            return None
    return b


def psi_zeros(n: int, annulus: Annulus, precision=PSI_DIGITS, radius: float = SADDLE_RADIUS) -> ZeroSet:
    """All zeros of Psi_N in the annulus (both half planes)."""
    if not (SINGULAR_RADIUS <= annulus.delta <= annulus.c_max <= radius * (1 + 1e-12)):
        raise DomainError(f"annulus must lie within [{SINGULAR_RADIUS}, {radius}]")
    prec = as_precision(precision)
    t_top = gamma_im_h_at_radius(annulus.c_max, prec, radius)
    k_max = int(math.floor(n * abs(t_top) / (2 * math.pi))) + 1
    zeros, residuals, notes = [], [], []
    thresh = mpfr(10) ** (-(prec.decimal_digits // 2))
    for k in range(1, k_max + 1):
        z = psi_zero_for_k(n, k, prec, radius)
        if z is None:
            notes.append(f"k={k}: Newton left the saddle neighbourhood; dropped")
            continue
        zc = complex(z)
        if not annulus.contains(zc):
            notes.append(f"k={k}: zero at {zc} outside the annulus")
            continue
        with workprec(prec):
            res = abs(_psi_at(z, n, radius, prec))
        if res > thresh:
            notes.append(f"k={k}: residual {float(res):.3g} above threshold; dropped")
            continue
        for w in (z, z.conjugate()):
            if all(abs(complex(w) - complex(o)) > 1e-12 for o in zeros):
                zeros.append(w)
                residuals.append(float(res))
    for msg in notes:
        log.info(msg)
    zeros, residuals = _sorted(zeros, residuals)
    return ZeroSet(n, zeros, "psi", residuals, annulus, [], notes)


# ---------------------------------------------------------------------------
# exact zeros by the argument principle


class _ZField:
    """Memoised Z evaluations on a fixed precision."""

    def __init__(self, n: int, prec: Precision):
        self.n = n
        self.prec = prec
        self.cache: Dict[Tuple[float, float], mpc] = {}
        self.evals = 0

    def __call__(self, re: float, im: float) -> mpc:
        key = (re, im)
        v = self.cache.get(key)
        if v is None:
            with workprec(self.prec):
                b = mpc(mpfr(re), mpfr(im))
                v = z_binomial(ComplexBeta.from_value(b), self.n, self.prec).value
            self.cache[key] = v
            self.evals += 1
        return v


def _arg_ratio(a: mpc, b: mpc) -> float:
    return float(gmpy2.phase(b / a))


def _edge_phase(zf: _ZField, p: complex, q: complex, depth: int = 0) -> float:
    za = zf(p.real, p.imag)
    zb = zf(q.real, q.imag)
    if za == 0 or zb == 0:
        raise NumericalError("Z vanishes on a cell boundary")
    d = _arg_ratio(za, zb)
    if abs(d) < math.pi / 2:
        return d
    if depth >= MAX_PHASE_DEPTH:
        raise NumericalError("phase tracking did not resolve")
    m = (p + q) / 2
    return _edge_phase(zf, p, m, depth + 1) + _edge_phase(zf, m, q, depth + 1)


def winding_number(zf: _ZField, lo: complex, hi: complex, samples_per_edge: int = 8) -> int:
    """Zeros of Z in the rectangle [lo, hi] from the phase change along its boundary."""
    corners = [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag), lo]
    total = 0.0
    for a, b in zip(corners[:-1], corners[1:]):
        for j in range(samples_per_edge):
            p = a + (b - a) * j / samples_per_edge
            q = a + (b - a) * (j + 1) / samples_per_edge
            total += _edge_phase(zf, p, q)
    w = total / (2 * math.pi)
    if abs(w - round(w)) > 0.1:
        raise NumericalError(f"non-integer winding {w:.3f}")
    return int(round(w))


def _newton_z(beta0: complex, n: int, prec: Precision, max_iter: int = 60):
    with workprec(prec):
        b = mpc(mpfr(beta0.real), mpfr(beta0.imag))
        tol = mpfr(10) ** (-(prec.decimal_digits - 10))
        for _ in range(max_iter):
            z, dz = z_and_derivative(ComplexBeta.from_value(b), n, prec)
            if dz == 0:
                return None
            step = z / dz
            b = b - step
            if abs(step) <= tol:
                z, _ = z_and_derivative(ComplexBeta.from_value(b), n, prec)
                return b, abs(z)
    return None


def _split_point(lo: float, hi: float) -> float:
    # slightly off-centre so zeros on symmetry lines do not sit on cell edges
    return lo + (hi - lo) * 0.5031


def _isolate(zf: _ZField, lo: complex, hi: complex, count: int, depth: int, found, unresolved):
    if count == 0:
        return
    if count == 1:
        centre = (lo + hi) / 2
        res = _newton_z(centre, zf.n, zf.prec)
        if res is not None:
            b, r = res
            bc = complex(b)
            pad = 1e-9
            if lo.real - pad <= bc.real <= hi.real + pad and lo.imag - pad <= bc.imag <= hi.imag + pad:
                found.append((b, r))
                return
    if depth >= MAX_CELL_DEPTH:
        unresolved.append({"lo": [lo.real, lo.imag], "hi": [hi.real, hi.imag], "count": count})
        return
    xm = _split_point(lo.real, hi.real)
    ym = _split_point(lo.imag, hi.imag)
    cells = [(lo, complex(xm, ym)), (complex(xm, lo.imag), complex(hi.real, ym)),
             (complex(lo.real, ym), complex(xm, hi.imag)), (complex(xm, ym), hi)]
    for a, b in cells:
        try:
            c = winding_number(zf, a, b)
        except NumericalError as exc:
            unresolved.append({"lo": [a.real, a.imag], "hi": [b.real, b.imag], "error": str(exc)})
            continue
        _isolate(zf, a, b, c, depth + 1, found, unresolved)


def zeros_in_rectangle(n: int, lo: complex, hi: complex, precision=None):
    """(zeros with residuals, unresolved cells) of Z inside one rectangle."""
    if n > 400:
        raise DomainError("exact zero search is limited to n <= 400")
    lo, hi = complex(lo), complex(hi)
    # closest point of the rectangle to beta = 1
    cx = min(max(1.0, lo.real), hi.real)
    cy = min(max(0.0, lo.imag), hi.imag)
    if abs(complex(cx, cy) - 1) < SINGULAR_RADIUS:
        raise SingularityProximityError("rectangle reaches |beta - 1| < 0.005")
    corner = max((complex(x, y) for x in (lo.real, hi.real) for y in (lo.imag, hi.imag)),
                 key=lambda z: z.real)
    prec = as_precision(precision) if precision is not None else required_precision(corner, n)
    zf = _ZField(n, prec)
    found, unresolved = [], []
    try:
        count = winding_number(zf, lo, hi)
    except NumericalError as exc:
        return [], [{"lo": [lo.real, lo.imag], "hi": [hi.real, hi.imag], "error": str(exc)}], prec
    _isolate(zf, lo, hi, count, 0, found, unresolved)
    return found, unresolved, prec


def annulus_tiles(annulus: Annulus):
    """Four rectangles covering the annulus around beta = 1 minus an inscribed inner square."""
    c, s = annulus.c_max, annulus.delta / math.sqrt(2)
    return [
        (complex(1 - c, -c), complex(1 + c, -s)),
        (complex(1 - c, s), complex(1 + c, c)),
        (complex(1 - c, -s), complex(1 - s, s)),
        (complex(1 + s, -s), complex(1 + c, s)),
    ]


def z_zeros(n: int, region, precision=None) -> ZeroSet:
    """Zeros of Z_{beta, n} in an annulus (tiled) or a rectangle given as (lo, hi)."""
    if isinstance(region, Annulus):
        tiles = annulus_tiles(region)
        annulus = region
    else:
        lo, hi = region
        tiles = [(complex(lo), complex(hi))]
        annulus = Annulus(0.0, math.inf)
    zeros, residuals, unresolved = [], [], []
    prec_used = None
    for lo, hi in tiles:
        found, bad, prec_used = zeros_in_rectangle(n, lo, hi, precision)
        unresolved.extend(bad)
        for b, r in found:
            if isinstance(region, Annulus) and not region.contains(complex(b)):
                continue
            if all(abs(complex(b) - complex(o)) > 1e-10 for o in zeros):
                zeros.append(b)
                residuals.append(float(r))
    zeros, residuals = _sorted(zeros, residuals)
    zs = ZeroSet(n, zeros, "exact-Z", residuals, annulus, unresolved)
    if prec_used is not None:
        zs.log.append(f"precision {prec_used.decimal_digits} digits")
    return zs


def residual_certificate(beta, n: int, precision) -> float:
    """10^-(digits/2) times the largest summand of the binomial sum."""
    prec = as_precision(precision)
    return 10.0 ** (-(prec.decimal_digits / 2)) * math.exp(largest_summand(beta, n))


# ---------------------------------------------------------------------------
# matching and measures


@dataclass
class MatchReport:
    n: int
    pairs: List[Tuple[complex, complex, float]]
    unmatched_a: List[complex]
    unmatched_b: List[complex]
    ties: List[complex] = field(default_factory=list)

    @property
    def max_distance(self) -> float:
        return max((d for _, _, d in self.pairs), default=0.0)

    @property
    def max_scaled_distance(self) -> float:
        return self.max_distance * self.n ** 2

    def to_dict(self):
        return {
            "n": self.n,
            "pairs": [{"a": [a.real, a.imag], "b": [b.real, b.imag], "distance": d} for a, b, d in self.pairs],
            "unmatched_a": [[z.real, z.imag] for z in self.unmatched_a],
            "unmatched_b": [[z.real, z.imag] for z in self.unmatched_b],
            "ties": [[z.real, z.imag] for z in self.ties],
            "max_scaled_distance": self.max_scaled_distance,
        }


def match_zeros(a: ZeroSet, b: ZeroSet, max_distance: Optional[float] = None) -> MatchReport:
    """Mutual-nearest pairing of two zero sets.

    Pairs farther apart than ``max_distance`` (default 1/N, the zero spacing
    scale) stay unmatched.
    """
    if a.n != b.n:
        raise ValueError("zero sets must share n")
    gate = 1.0 / a.n if max_distance is None else max_distance
    za, zb = a.as_complex(), b.as_complex()

    def nearest(z, pool):
        if not pool:
            return None, False
        ds = sorted((abs(z - w), j) for j, w in enumerate(pool))
        tie = len(ds) > 1 and ds[1][0] - ds[0][0] <= 1e-15 * max(1.0, ds[0][0])
        return ds[0][1], tie

    pairs, ties = [], []
    used_b = set()
    matched_a = set()
    for i, z in enumerate(za):
        j, tie = nearest(z, zb)
        if j is None:
            continue
        back, tie_b = nearest(zb[j], za)
        if tie or tie_b:
            ties.append(z)
            continue
        if back == i and abs(z - zb[j]) <= gate:
            pairs.append((z, zb[j], abs(z - zb[j])))
            used_b.add(j)
            matched_a.add(i)
    unmatched_a = [z for i, z in enumerate(za) if i not in matched_a]
    unmatched_b = [w for j, w in enumerate(zb) if j not in used_b]
    return MatchReport(a.n, pairs, unmatched_a, unmatched_b, ties)


@dataclass
class MeasurePair:
    """mu_n: atoms 1/N at each zero; mu_limit: nodes on Gamma with weight |Delta Im h| / 2 pi."""

    n: int
    mu_n: List[Tuple[complex, float]]
    mu_limit: List[Tuple[complex, float]]

    def integrate(self, f) -> Tuple[float, float]:
        a = sum(w * f(z) for z, w in self.mu_n)
        b = sum(w * f(z) for z, w in self.mu_limit)
        return a, b

    @property
    def mass_n(self) -> float:
        return sum(w for _, w in self.mu_n)

    @property
    def mass_limit(self) -> float:
        return sum(w for _, w in self.mu_limit)


def gamma_for_annulus(annulus: Annulus, nodes: int = 200, precision=SADDLE_DIGITS,
                      radius: float = SADDLE_RADIUS) -> CurveSegment:
    """Upper Gamma between the two annulus radii, uniform in Im h (edges and midpoints)."""
    t_in = gamma_im_h_at_radius(annulus.delta, precision, radius)
    t_out = gamma_im_h_at_radius(annulus.c_max, precision, radius)
    pts = []
    for j in range(2 * nodes + 1):
        t = t_in + (t_out - t_in) * j / (2 * nodes)
        b = gamma_point_with_im_h(t, precision, radius)
        pts.append(CurvePoint(b, t, float(b.epsilon), float(b.r)))
    return CurveSegment(pts, "gamma")


def build_measures(zeroset: ZeroSet, gamma: CurveSegment) -> MeasurePair:
    """Pair mu_N with the limiting measure on Gamma (extended by conjugation).

    ``gamma`` holds alternating edge/midpoint samples of the upper branch in
    increasing |Im h| (as produced by gamma_for_annulus).
    """
    pts = gamma.points
    if len(pts) < 3 or len(pts) % 2 == 0:
        raise ValueError("gamma needs an odd number (>= 3) of alternating edge/midpoint samples")
    radii = [abs(complex(p.beta) - 1) for p in pts]
    lo, hi = min(radii), max(radii)
    for z in zeroset.as_complex():
        if not lo - 1e-9 <= abs(z - 1) <= hi + 1e-9:
            raise CoverageError(f"zero {z} outside the range of the traced curve")
    limit = []
    for j in range(1, len(pts), 2):
        w = abs(pts[j + 1].im_h - pts[j - 1].im_h) / (2 * math.pi)
        b = complex(pts[j].beta)
        limit.append((b, w))
        limit.append((b.conjugate(), w))
    atoms = [(z, 1.0 / zeroset.n) for z in zeroset.as_complex()]
    return MeasurePair(zeroset.n, atoms, limit)


TEST_FUNCTIONS = {
    "one": lambda z: 1.0,
    "re": lambda z: (z - 1).real,
    "im": lambda z: (z - 1).imag,
    "abs2": lambda z: abs(z - 1) ** 2,
}

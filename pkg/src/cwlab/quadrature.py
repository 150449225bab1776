"""Z from its one-dimensional integral representation.

For Re beta > 0,

    Z = sqrt(beta N / 2 pi) * int exp(-N f_beta(u)) du
      = sqrt(N / (2 pi beta)) * int exp(-N h_beta(u)) du,

both over the real line.  The integrand is even, so only [0, U] is
integrated, with U from the truncation bound.  Panels use 16-point
Gauss-Legendre, refined by bisection until a panel and its two halves agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import AccuracyError, DomainError
from .landscape import truncation_radius, truncation_radius_h
from .model import as_beta
from .numerics import GUARD_DIGITS, LN10, Precision, as_precision, principal_sqrt, required_precision, workprec

GL_ORDER = 16
MAX_DEPTH = 40
MAX_PANELS = 400_000
PHASE_PER_PANEL = 6.0
H_FORM_MAX_DIGITS = 600


@dataclass(frozen=True)
class QuadratureResult:
    value: mpc
    panels: int
    truncation: float
    est_error: float   # relative to |value|
    form: str = "f"


@lru_cache(maxsize=16)
def gauss_legendre(order: int, bits: int):
    """Nodes and weights on [-1, 1] at ``bits`` of precision (Newton-polished)."""
    x0, _ = np.polynomial.legendre.leggauss(order)
    with gmpy2.context(gmpy2.get_context(), precision=bits + 16):
        tol = mpfr(2) ** (-(bits + 8))
        nodes, weights = [], []
        for guess in x0:
            x = mpfr(float(guess))
            for _ in range(100):
                p0, p1 = mpfr(1), x
                for k in range(2, order + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = order * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < tol:
                    break
            p0, p1 = mpfr(1), x
            for k in range(2, order + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = order * (x * p1 - p0) / (x * x - 1)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        return tuple(mpfr(x) for x in nodes), tuple(mpfr(w) for w in weights)


class _Integrator:
    """Adaptive bisection over panels with a fixed Gauss-Legendre rule."""

    def __init__(self, integrand, bits):
        self.g = integrand
        self.nodes, self.weights = gauss_legendre(GL_ORDER, bits)
        self.evals = 0

    def rule(self, a: mpfr, b: mpfr) -> mpc:
        half = (b - a) / 2
        mid = (a + b) / 2
        acc = mpc(0)
        for x, w in zip(self.nodes, self.weights):
            acc += w * self.g(mid + half * x)
        self.evals += GL_ORDER
        return acc * half

    def integrate(self, edges, tol_abs, total_width):
        """Returns (value, error estimate, accepted panel count)."""
        value = mpc(0)
        err = mpfr(0)
        count = 0
        for a, b in zip(edges[:-1], edges[1:]):
            stack = [(a, b, self.rule(a, b), 0)]
            while stack:
                lo, hi, whole, depth = stack.pop()
                mid = (lo + hi) / 2
                left, right = self.rule(lo, mid), self.rule(mid, hi)
                diff = abs(whole - left - right)
                local_tol = tol_abs * (hi - lo) / total_width
                if diff <= local_tol or depth >= MAX_DEPTH:
                    if depth >= MAX_DEPTH and diff > local_tol:
                        raise AccuracyError("panel refinement hit the depth limit", best=value)
                    value += left + right
                    err += diff
                    count += 2
                    if count > MAX_PANELS:
                        raise AccuracyError("too many panels", best=value)
                else:
                    # right first so the left half is processed first (fixed order)
                    stack.append((mid, hi, right, depth + 1))
                    stack.append((lo, mid, left, depth + 1))
        return value, err, count


def _panel_edges(b: mpc, n: int, upper: float, local_rate):
    """March from 0 to ``upper`` with widths set by the local rate of change of -N f."""
    edges = [0.0]
    x = 0.0
    while x < upper:
        rate = n * local_rate(x) + 1.0
        w = min(0.5, PHASE_PER_PANEL / rate)
        x = min(upper, x + w)
        edges.append(x)
    return edges


def _run(integrand, prefactor, edges, upper, requested_digits, bits, form):
    with gmpy2.context(gmpy2.get_context(), precision=bits, real_prec=bits, imag_prec=bits):
        integ = _Integrator(integrand, bits)
        medges = [mpfr(e) for e in edges]
        width = medges[-1]
        # coarse pass sets the scale for the absolute tolerance
        coarse = mpc(0)
        l1 = mpfr(0)
        for a, b in zip(medges[:-1], medges[1:]):
            half = (b - a) / 2
            mid = (a + b) / 2
            for x, w in zip(integ.nodes, integ.weights):
                gx = integ.g(mid + half * x)
                coarse += w * half * gx
                l1 += w * half * abs(gx)
        floor = l1 * mpfr(10) ** (-(int(bits / 3.33) - requested_digits - 10))
        scale = max(abs(coarse), floor)
        target = mpfr(10) ** (-requested_digits)
        for _ in range(4):
            tol = target * scale / 100
            value, err, count = integ.integrate(medges, tol, width)
            scale_now = max(abs(value), floor)
            if err <= target * scale_now / 10 or scale_now >= scale:
                break
            scale = scale_now
        rel = err / max(abs(value), floor)
        total = prefactor * 2 * value
        if rel > target:
            raise AccuracyError(f"quadrature reached only {float(rel):.3g} relative accuracy",
                                best=total)
    return QuadratureResult(total, count, float(upper), float(rel), form)


def z_integral_f(beta, n: int, requested_digits: int = 12, precision=None) -> QuadratureResult:
    """Z via the f-form integral."""
    beta = as_beta(beta)
    if float(beta.re) <= 0:
        raise DomainError("the integral representation needs Re beta > 0")
    prec = as_precision(precision) if precision is not None else required_precision(beta, n)
    prec = prec.plus(requested_digits)
    upper = truncation_radius(beta, n, prec)
    bc = complex(beta)

    def rate(x):
        # |d/du f| = |beta (u - tanh(beta u))|, bounded by |beta| (u + 1)
        return abs(bc * (x - np.tanh(bc * x))) if x < 50 else abs(bc) * (x + 1)

    edges = _panel_edges(bc, n, upper, rate)
    with workprec(prec):
        b = beta.to_bigc()
        nn = mpfr(n)
        coef = -nn * b / 2

        def integrand(u):
            bu = b * u
            return gmpy2.exp(coef * u * u + nn * gmpy2.log(gmpy2.cosh(bu)))

        prefactor = principal_sqrt(b * nn / (2 * gmpy2.const_pi()))
    return _run(integrand, prefactor, edges, upper, requested_digits, prec.bits, "f")


def h_form_precision(beta, n: int, guard: int = GUARD_DIGITS) -> Precision:
    """Digits covering max_u N (log cosh u - Re(1/beta) u^2/2) <= N / (2 Re(1/beta))."""
    a = (1 / complex(as_beta(beta))).real
    if a <= 0:
        raise DomainError("h-form needs Re(1/beta) > 0")
    return Precision(math.ceil(n / (2 * a * LN10)) + guard)


def z_integral_h(beta, n: int, requested_digits: int = 12, precision=None,
                 max_digits: int = H_FORM_MAX_DIGITS) -> QuadratureResult:
    """Z via the h-form integral (needs Re(1/beta) > 0 as well).

    The h-form integrand peaks near exp(N / (2 Re(1/beta))), so the working
    precision grows without bound as Re(1/beta) -> 0; beyond ``max_digits``
    the call is refused.
    """
    beta = as_beta(beta)
    bc = complex(beta)
    if bc.real <= 0 or (1 / bc).real <= 0:
        raise DomainError("the h-form integral needs Re beta > 0 and Re(1/beta) > 0")
    prec = as_precision(precision) if precision is not None else h_form_precision(beta, n)
    if prec.decimal_digits > max_digits:
        raise AccuracyError(f"h-form needs {prec.decimal_digits} digits (> {max_digits}); use the f-form")
    prec = prec.plus(requested_digits)
    upper = truncation_radius_h(beta, n, prec)

    def rate(x):
        return abs(x / bc - np.tanh(x)) if x < 50 else abs(x / bc) + 1

    edges = _panel_edges(bc, n, upper, rate)
    with workprec(prec):
        b = beta.to_bigc()
        nn = mpfr(n)
        coef = -nn / (2 * b)

        def integrand(u):
            return gmpy2.exp(coef * u * u + nn * gmpy2.log(gmpy2.cosh(u)))

        prefactor = principal_sqrt(nn / (2 * gmpy2.const_pi() * b))
    return _run(integrand, prefactor, edges, upper, requested_digits, prec.bits, "h")

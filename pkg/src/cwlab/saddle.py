"""Nontrivial saddle u_beta of h_beta near beta = 1 and the derived xi(beta).

Near beta = 1, h'_beta has exactly three zeros close to the origin: 0 and
+-u_beta with u_beta^2 ~ 3(beta - 1).  Everything here is restricted to a
fixed neighbourhood 0 < |beta - 1| <= SADDLE_RADIUS.  That radius is an
engineering choice; the underlying existence statement has no explicit
constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import BranchAmbiguityError, DegenerateSaddleError, DomainError, NoSaddleError
from .model import ComplexBeta, as_beta
from .numerics import Precision, as_precision, principal_sqrt, workprec

SADDLE_RADIUS = 0.1
DISC_CONSTANT = 241
MAX_NEWTON = 200
SADDLE_DIGITS = 40
XI_PRIME_AT_ONE = math.sqrt(1.5)


@dataclass(frozen=True)
class SaddleData:
    beta: ComplexBeta
    u_beta: mpc
    h_at_saddle: mpc
    xi: mpc
    disc_radius: float
    residual: float
    iterations: int = 0

    @property
    def precision(self) -> int:
        return self.u_beta.precision[0]


def _check_neighbourhood(b: mpc, radius: float):
    d = abs(b - 1)
    if d == 0:
        raise DegenerateSaddleError("beta = 1: the three critical points of h coincide")
    # tolerance so decimal inputs such as 1.1 are not rejected by binary rounding
    if d > radius * (1 + 1e-12):
        raise DomainError(f"|beta - 1| = {float(d):.4g} exceeds the saddle radius {radius}")


def seed(beta, precision=None, radius: float = SADDLE_RADIUS) -> mpc:
    """sqrt(3(1 - 1/beta)), in the same half plane as beta."""
    beta = as_beta(beta)
    with workprec(precision if precision is not None else SADDLE_DIGITS):
        b = beta.to_bigc()
        _check_neighbourhood(b, radius)
        s = principal_sqrt(3 * (1 - 1 / b))
        if (b.imag >= 0 and s.imag < 0) or (b.imag < 0 and s.imag > 0):
            s = -s
        return s


def disc_radius(beta) -> float:
    return DISC_CONSTANT * abs(complex(as_beta(beta)) - 1) ** 1.5


def newton_critical_point(b: mpc, u0: mpc, prec: Precision, max_iter: int = MAX_NEWTON):
    """Newton on h'(u) = u/b - tanh u from u0, in the active context.

    Returns (u, residual, iterations); raises NoSaddleError on failure.
    """
    tol = mpfr(10) ** (-(prec.decimal_digits - 8))
    u = mpc(u0)
    inv_b = 1 / b
    for it in range(1, max_iter + 1):
        th = gmpy2.tanh(u)
        g = u * inv_b - th
        dg = inv_b - 1 + th * th
        if dg == 0:
            raise NoSaddleError("h'' vanished during Newton iteration")
        step = g / dg
        u = u - step
        if not (gmpy2.is_finite(u.real) and gmpy2.is_finite(u.imag)):
            raise NoSaddleError("Newton iteration diverged")
        if abs(step) <= tol:
            res = abs(u * inv_b - gmpy2.tanh(u))
            if res <= tol:
                return u, res, it
    raise NoSaddleError(f"Newton did not converge in {max_iter} iterations")


@lru_cache(maxsize=4096)
def _find(beta: ComplexBeta, digits: int, radius: float) -> SaddleData:
    prec = Precision(digits)
    with workprec(prec):
        b = beta.to_bigc()
        s = seed(beta, prec, radius)
        u, res, its = newton_critical_point(b, s, prec)
        rad = DISC_CONSTANT * abs(b - 1) ** mpfr(1.5)
        if abs(u - s) > rad:
            raise NoSaddleError(f"Newton left the saddle disc for beta={beta!r}")
        h = u * u / (2 * b) - gmpy2.log(gmpy2.cosh(u))
        xi = _xi_branch(b, h)
    return SaddleData(beta, u, h, xi, float(rad), float(res), its)


def find_u_beta(beta, precision=None, radius: float = SADDLE_RADIUS) -> SaddleData:
    """Locate the saddle u_beta in the disc around sqrt(3(1 - 1/beta))."""
    prec = as_precision(precision if precision is not None else SADDLE_DIGITS)
    return _find(as_beta(beta), prec.decimal_digits, float(radius))


def h_at_saddle(beta, precision=None, radius: float = SADDLE_RADIUS) -> mpc:
    return find_u_beta(beta, precision, radius).h_at_saddle


def _xi_branch(b: mpc, h: mpc) -> mpc:
    r = principal_sqrt(-2 * h)
    ref = mpfr(XI_PRIME_AT_ONE) * (b - 1)
    dot = (r * ref.conjugate()).real
    if abs(dot) <= mpfr(1e-6) * abs(r) * abs(ref):
        raise BranchAmbiguityError("both roots of -2h are orthogonal to sqrt(3/2)(beta - 1)")
    return r if dot > 0 else -r


def xi(beta, precision=None, radius: float = SADDLE_RADIUS) -> mpc:
    """sqrt(-2 h_beta(u_beta)) on the branch continuous with sqrt(3/2)(beta - 1)."""
    return find_u_beta(beta, precision, radius).xi


def critical_points(beta, precision=None, radius: float = SADDLE_RADIUS):
    """Newton runs seeded at 0, +seed and -seed; returns three (u, residual) pairs."""
    beta = as_beta(beta)
    prec = as_precision(precision if precision is not None else SADDLE_DIGITS)
    with workprec(prec):
        b = beta.to_bigc()
        s = seed(beta, prec, radius)
        out = []
        for u0 in (mpc(0), s, -s):
            u, res, _ = newton_critical_point(b, u0, prec)
            out.append((u, float(res)))
    return out


def in_disc(u, centre, beta) -> bool:
    return abs(complex(u) - complex(centre)) <= disc_radius(beta)

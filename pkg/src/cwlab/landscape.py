"""The saddle landscapes f_beta and h_beta, their Taylor models and bounds.

    f_beta(u) = beta u^2 / 2 - log cosh(beta u)
    h_beta(u) = u^2 / (2 beta) - log cosh(u)

with the identity f_beta(u) = h_beta(beta u).  Logarithms use the principal
branch; callers integrating exp(-N f) rely on N being an integer, so the
2*pi*i ambiguity of the log drops out of the integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import DomainError, PoleError
from .model import as_beta
from .numerics import LN10, Precision, as_precision, workprec

# |h^(6)| <= 512 on |u| <= pi/4, giving |h' - P4'| <= 512/5! |u|^5 <= 5 |u|^5
SIXTH_DERIVATIVE_BOUND = 512
QUINTIC_REMAINDER_CONST = 5


@dataclass(frozen=True)
class LandscapeEval:
    u: mpc
    value: mpc
    d1: mpc
    d2: mpc
    form: str  # "f" or "h"


def _pole_check(c: mpc, prec: Precision, what: str):
    if abs(c) < mpfr(10) ** (-(prec.decimal_digits // 2)):
        raise PoleError(f"cosh({what}) vanishes to working precision")


def f_eval(beta, u, precision=None) -> LandscapeEval:
    prec = as_precision(precision)
    with workprec(prec):
        b = as_beta(beta).to_bigc()
        u = mpc(u)
        x = b * u
        c = gmpy2.cosh(x)
        _pole_check(c, prec, "beta*u")
        th = gmpy2.tanh(x)
        value = b * u * u / 2 - gmpy2.log(c)
        d1 = b * (u - th)
        d2 = b - b * b * (1 - th * th)
    return LandscapeEval(u, value, d1, d2, "f")


def h_eval(beta, u, precision=None) -> LandscapeEval:
    """Evaluate h_beta; complex u must satisfy |u| < pi/2."""
    prec = as_precision(precision)
    with workprec(prec):
        b = as_beta(beta).to_bigc()
        u = mpc(u)
        if u.imag != 0 and abs(u) >= gmpy2.const_pi() / 2:
            raise DomainError("h_beta is only defined for |u| < pi/2 off the real axis")
        c = gmpy2.cosh(u)
        _pole_check(c, prec, "u")
        th = gmpy2.tanh(u)
        value = u * u / (2 * b) - gmpy2.log(c)
        d1 = u / b - th
        d2 = 1 / b - 1 + th * th
    return LandscapeEval(u, value, d1, d2, "h")


def f_value(b: mpc, u) -> mpc:
    """Bare f_beta(u) in the active context (no checks)."""
    return b * u * u / 2 - gmpy2.log(gmpy2.cosh(b * u))


def h_value(b: mpc, u) -> mpc:
    return u * u / (2 * b) - gmpy2.log(gmpy2.cosh(u))


def re_f_real_axis(eps, r, u) -> mpfr:
    """Re f_beta(u) for real u, from |cosh(x+iy)|^2 = cosh(x)^2 - sin(y)^2."""
    a = 1 + mpfr(eps)
    u = mpfr(u)
    return a * u * u / 2 - gmpy2.log(gmpy2.cosh(u * a) ** 2 - gmpy2.sin(u * mpfr(r)) ** 2) / 2


@dataclass(frozen=True)
class TaylorModels:
    p2: mpc
    p4: mpc
    ptilde2: Optional[mpc]


def taylor_models(beta, u, precision=None) -> TaylorModels:
    """Quadratic model of f at 0, quartic model of h at 0, quadratic model of f at pi/R."""
    beta = as_beta(beta)
    with workprec(precision):
        b = beta.to_bigc()
        u = mpc(u)
        p2 = (b - b * b) * u * u / 2
        p4 = (1 / b - 1) * u * u / 2 + u ** 4 / 12
        r = mpfr(beta.r)
        ptilde2 = None
        if r != 0:
            u0 = gmpy2.const_pi() / r
            curv = b - b * b / gmpy2.cosh((1 + mpfr(beta.epsilon)) * u0) ** 2
            ptilde2 = f_value(b, mpc(u0)) + curv * (u - u0) ** 2 / 2
    return TaylorModels(p2, p4, ptilde2)


def quartic_critical_points(beta, precision=None):
    """Zeros of P4': 0 and +-sqrt(3(1 - 1/beta)) (principal root first)."""
    from .numerics import principal_sqrt

    with workprec(precision):
        b = as_beta(beta).to_bigc()
        s = principal_sqrt(3 * (1 - 1 / b))
        return mpc(0), s, -s


# ---------------------------------------------------------------------------
# explicit lower bounds on Re f along the real axis


@dataclass(frozen=True)
class InequalityReport:
    eps: float
    r: float
    near_origin_margin: float   # min of Re f - eps u^2/2 over 0 <= u <= sqrt(8 eps)
    far_field_margin: float     # min of Re f - eps^2 u^2/2 over u >= sqrt(8 eps)
    cosh_bound_margin: float    # min of exp((1-eps) t^2/2) - cosh t over t >= (1+eps) sqrt(8 eps)
    points_checked: int

    @property
    def min_margin(self) -> float:
        return min(self.near_origin_margin, self.far_field_margin, self.cosh_bound_margin)

    @property
    def ok(self) -> bool:
        return self.min_margin >= 0


def near_origin_window(eps: float):
    """R-range on which the quadratic lower bound near u = 0 is asserted."""
    return math.sqrt(24 * eps), math.pi / math.sqrt(128 * eps)


def _check_eps(eps):
    if not 0 < eps <= 1 / 9:
        raise DomainError(f"lower bounds require 0 < eps <= 1/9, got {eps}")


def near_origin_margins(eps, r, u_grid, precision=50) -> np.ndarray:
    """Re f_beta(u) - eps u^2/2 on grid points 0 <= u <= sqrt(8 eps)."""
    _check_eps(eps)
    lo, hi = near_origin_window(eps)
    if not lo <= abs(r) <= hi:
        raise DomainError(f"|R| = {abs(r)} outside [{lo}, {hi}] for eps = {eps}")
    umax = math.sqrt(8 * eps)
    out = []
    with workprec(precision):
        e = mpfr(eps)
        for u in u_grid:
            if not 0 <= u <= umax * (1 + 1e-15):
                raise DomainError(f"u = {u} outside [0, sqrt(8 eps)]")
            u = mpfr(u)
            out.append(float(re_f_real_axis(e, r, u) - e * u * u / 2))
    return np.array(out)


def far_field_margins(eps, r, u_grid, precision=50) -> np.ndarray:
    """Re f_beta(u) - eps^2 u^2/2 on grid points u >= sqrt(8 eps)."""
    _check_eps(eps)
    umin = math.sqrt(8 * eps)
    out = []
    with workprec(precision):
        e = mpfr(eps)
        for u in u_grid:
            if u < umin * (1 - 1e-15):
                raise DomainError(f"u = {u} below sqrt(8 eps)")
            u = mpfr(u)
            out.append(float(re_f_real_axis(e, r, u) - e * e * u * u / 2))
    return np.array(out)


def cosh_bound_margins(eps, t_grid, precision=50) -> np.ndarray:
    """exp((1-eps) t^2/2) - cosh t, relative to cosh t, for t >= (1+eps) sqrt(8 eps)."""
    _check_eps(eps)
    tmin = (1 + eps) * math.sqrt(8 * eps)
    out = []
    with workprec(precision):
        e = mpfr(eps)
        for t in t_grid:
            if t < tmin * (1 - 1e-15):
                raise DomainError(f"t = {t} below (1+eps) sqrt(8 eps)")
            t = mpfr(t)
            c = gmpy2.cosh(t)
            out.append(float((gmpy2.exp((1 - e) * t * t / 2) - c) / c))
    return np.array(out)


def inequality_suite(eps, r, u_grid, u_max: float = 10.0) -> InequalityReport:
    """Check all three real-axis bounds for one (eps, R).

    ``u_grid`` is split at sqrt(8 eps): points below feed the near-origin
    bound, points above feed the far-field bound; the cosh bound is checked at
    t = (1 + eps) u for the far-field points.
    """
    u_grid = np.asarray(sorted(float(u) for u in u_grid if u >= 0))
    split = math.sqrt(8 * eps)
    near = u_grid[u_grid <= split]
    far = u_grid[u_grid >= split]
    far = far[far <= u_max]
    m_near = near_origin_margins(eps, r, near) if len(near) else np.array([np.inf])
    m_far = far_field_margins(eps, r, far) if len(far) else np.array([np.inf])
    m_cosh = cosh_bound_margins(eps, (1 + eps) * far) if len(far) else np.array([np.inf])
    return InequalityReport(float(eps), float(r), float(m_near.min()), float(m_far.min()),
                            float(m_cosh.min()), len(near) + 2 * len(far))


# ---------------------------------------------------------------------------
# quadrature truncation


def truncation_radius(beta, n: int, precision) -> float:
    """U with exp(-n Re f_beta(u)) < 10^-digits for every real |u| >= U.

    Uses |cosh(beta u)| <= exp(Re(beta) |u|), hence
    Re f_beta(u) >= a u^2/2 - a |u| with a = Re beta, increasing for |u| >= 1.
    """
    beta = as_beta(beta)
    a = float(beta.re)
    if a <= 0:
        raise DomainError("truncation radius needs Re beta > 0")
    digits = as_precision(precision).decimal_digits
    target = digits * LN10 / n
    return 1.0 + math.sqrt(1.0 + 2.0 * target / a)


def truncation_radius_h(beta, n: int, precision) -> float:
    """Same bound for exp(-n h_beta(u)): Re h >= a u^2/2 - |u| with a = Re(1/beta)."""
    b = complex(as_beta(beta))
    a = (1 / b).real
    if b.real <= 0 or a <= 0:
        raise DomainError("h-form truncation needs Re beta > 0 and Re(1/beta) > 0")
    digits = as_precision(precision).decimal_digits
    target = digits * LN10 / n
    return (1.0 + math.sqrt(1.0 + 2.0 * a * target)) / a

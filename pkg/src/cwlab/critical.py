"""Critical curves in the complex beta plane.

* ``gamma``: the local critical curve near beta = 1 where Re h_beta(u_beta) = 0,
  parametrised as R = R0(eps).
* ``theorem2``: the explicit curve 1 + eps = (R / 2pi) log((1 + pi/R) / (1 - pi/R)),
  R > pi, on which u = +-pi/R are saddles of f_beta.
* ``conjectured``: the proposed global phase boundary Re f_beta(u*(beta)) = 0,
  where u*(beta) is the root of u = tanh(beta u) continued from u*(1) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import BracketError, ContinuationError, DomainError, NumericalError
from .landscape import f_eval, f_value
from .model import ComplexBeta, as_beta
from .numerics import Precision, principal_sqrt, workprec
from .saddle import SADDLE_DIGITS, SADDLE_RADIUS, find_u_beta

GAMMA_EPS_MAX = 0.05
# bracket endpoints reach |beta - 1| = sqrt(5) * eps, a little past SADDLE_RADIUS
BRACKET_RADIUS = 0.25
USTAR_RE_MAX = 1.4


@dataclass(frozen=True)
class CurvePoint:
    beta: ComplexBeta
    im_h: float
    eps: float
    r: float


@dataclass
class CurveSegment:
    points: List[CurvePoint]
    kind: str  # gamma | theorem2 | conjectured
    failures: List[dict] = field(default_factory=list)

    def conjugate(self) -> "CurveSegment":
        pts = [CurvePoint(p.beta.conjugate(), -p.im_h, p.eps, -p.r) for p in self.points]
        return CurveSegment(pts, self.kind, list(self.failures))

    def betas(self) -> List[complex]:
        return [complex(p.beta) for p in self.points]

    def rows(self):
        return [{"eps": p.eps, "r": p.r, "im_h": p.im_h, "kind": self.kind} for p in self.points]


# ---------------------------------------------------------------------------
# local critical curve


def re_h_at_saddle(eps, r, precision=SADDLE_DIGITS, radius=SADDLE_RADIUS) -> float:
    d = find_u_beta(ComplexBeta(eps, r), precision, radius)
    return float(d.h_at_saddle.real)


def r0_of_eps(eps: float, precision=SADDLE_DIGITS, tol: float = 1e-15) -> float:
    """R > 0 with Re h_{1+eps+iR}(u_beta) = 0, by bisection on [eps/2, 2 eps]."""
    if not 0 < eps <= GAMMA_EPS_MAX:
        raise DomainError(f"R0(eps) is traced for 0 < eps <= {GAMMA_EPS_MAX}, got {eps}")

    def g(r):
        return re_h_at_saddle(eps, r, precision, BRACKET_RADIUS)

    lo, hi = eps / 2, 2 * eps
    glo, ghi = g(lo), g(hi)
    if not (glo < 0 < ghi):
        lo, hi = eps / 4, 4 * eps
        glo, ghi = g(lo), g(hi)
        if not (glo < 0 < ghi):
            raise BracketError(f"no sign change of Re h on [eps/4, 4 eps] for eps={eps}")
    mid = (lo + hi) / 2
    for _ in range(200):
        mid = (lo + hi) / 2
        gm = g(mid)
        if abs(gm) <= tol or hi - lo <= 4e-16 * hi:
            break
        if gm < 0:
            lo = mid
        else:
            hi = mid
    return mid


def gamma_point_with_im_h(target: float, precision=SADDLE_DIGITS, radius=SADDLE_RADIUS) -> ComplexBeta:
    """The point of Gamma where h_beta(u_beta) = i * target.

    On Gamma h_beta(u_beta) is purely imaginary and negative-imaginary on the
    upper branch, so target < 0 selects Im beta > 0.  Newton in beta uses
    d/dbeta h_beta(u_beta) = -u_beta^2 / (2 beta^2).
    """
    if target == 0:
        return ComplexBeta(0.0, 0.0)
    prec = Precision(precision) if not isinstance(precision, Precision) else precision
    with workprec(prec):
        t = mpfr(target)
        tgt = mpc(0, t)
        b = 1 + principal_sqrt(-mpfr(4) / 3 * tgt)
        if (t < 0 and b.imag < 0) or (t > 0 and b.imag > 0):
            b = 2 - b
        tol = mpfr(10) ** (-(prec.decimal_digits - 10))
        for _ in range(60):
            beta = ComplexBeta.from_value(b)
            # iterates may overshoot the radius; only the converged point is checked
            d = find_u_beta(beta, prec, 1.25 * radius)
            with workprec(prec):
                gval = d.h_at_saddle - tgt
                dg = -d.u_beta ** 2 / (2 * b * b)
                step = gval / dg
                b = b - step
            if abs(step) <= tol:
                if abs(b - 1) > radius * (1 + 1e-9):
                    raise DomainError(f"Gamma point with Im h = {target} lies beyond radius {radius}")
                return ComplexBeta.from_value(b)
    raise NumericalError(f"Gamma point with Im h = {target} did not converge")


def trace_gamma(eps_max: float, step: float, precision=SADDLE_DIGITS) -> CurveSegment:
    """Upper branch of Gamma at eps = step, 2 step, ..., eps_max."""
    if not 0 < step <= eps_max <= GAMMA_EPS_MAX:
        raise DomainError("need 0 < step <= eps_max <= 0.05")
    count = int(round(eps_max / step))
    pts = []
    for j in range(1, count + 1):
        eps = min(j * step, eps_max)
        r = r0_of_eps(eps, precision)
        beta = ComplexBeta(eps, r)
        d = find_u_beta(beta, precision, BRACKET_RADIUS)
        pts.append(CurvePoint(beta, float(d.h_at_saddle.imag), eps, r))
    return CurveSegment(pts, "gamma")


def trace_gamma_by_im_h(im_h_values, precision=SADDLE_DIGITS, radius=SADDLE_RADIUS) -> CurveSegment:
    """Gamma sampled at prescribed values of Im h (negative: upper branch)."""
    pts = []
    for t in im_h_values:
        beta = gamma_point_with_im_h(t, precision, radius)
        pts.append(CurvePoint(beta, float(t), float(beta.epsilon), float(beta.r)))
    return CurveSegment(pts, "gamma")


def gamma_im_h_at_radius(rho: float, precision=SADDLE_DIGITS, radius=SADDLE_RADIUS) -> float:
    """Im h_beta(u_beta) where the upper branch of Gamma meets |beta - 1| = rho."""
    # |h| ~ (3/4) rho^2 on Gamma; bisect on the monotone map t -> |beta(t) - 1|
    lo, hi = -0.5 * rho * rho, -1.2 * rho * rho
    for _ in range(200):
        mid = (lo + hi) / 2
        b = complex(gamma_point_with_im_h(mid, precision, max(radius, 1.5 * rho)))
        if abs(b - 1) < rho:
            lo = mid
        else:
            hi = mid
        if abs(hi - lo) <= 1e-15 * abs(hi):
            break
    return (lo + hi) / 2


# ---------------------------------------------------------------------------
# explicit positive-free-energy curve


def theorem2_eps_exact(r, precision=50) -> mpfr:
    with workprec(precision):
        r = mpfr(r)
        if r <= gmpy2.const_pi():
            raise DomainError(f"the curve needs R > pi, got {float(r)}")
        x = gmpy2.const_pi() / r
        return r / (2 * gmpy2.const_pi()) * gmpy2.log((1 + x) / (1 - x)) - 1


def theorem2_eps(r: float, precision=50) -> float:
    """eps(R) = (R / 2pi) log((1 + pi/R) / (1 - pi/R)) - 1, checked against f'(pi/R) = 0."""
    eps = theorem2_eps_exact(r, precision)
    with workprec(precision):
        u0 = gmpy2.const_pi() / mpfr(r)
        d1 = f_eval(ComplexBeta(eps, 0), u0, precision).d1
        if abs(d1) > 1e-12:
            raise NumericalError(f"f'(pi/R) = {float(abs(d1)):.3g} on the curve at R={r}")
    return float(eps)


def theorem2_point(r, precision=50) -> ComplexBeta:
    return ComplexBeta(theorem2_eps_exact(r, precision), mpfr(r, Precision(precision).bits))


def theorem2_curve(r_grid, precision=50) -> CurveSegment:
    pts = []
    for r in r_grid:
        beta = theorem2_point(r, precision)
        with workprec(precision):
            val = f_value(beta.to_bigc(), gmpy2.const_pi() / mpfr(r))
        pts.append(CurvePoint(beta, float(val.imag), float(beta.epsilon), float(r)))
    return CurveSegment(pts, "theorem2")


# ---------------------------------------------------------------------------
# saddle branch u*(beta) of f'_beta(u) = beta (u - tanh(beta u)) = 0


@dataclass(frozen=True)
class BranchPoint:
    u_star: mpc
    k: int
    beta: ComplexBeta
    residual: float = 0.0
    k_history: tuple = ()


def branch_index(b: mpc, u: mpc) -> int:
    """k in beta = (1/2u) [log((1+u)/(1-u)) + 2 pi i k], principal log."""
    val = (2 * b * u - gmpy2.log((1 + u) / (1 - u))) / (2 * gmpy2.const_pi())
    return int(gmpy2.rint(val.imag))


def _newton_ustar(b: mpc, u: mpc, tol, max_iter=40):
    for _ in range(max_iter):
        th = gmpy2.tanh(b * u)
        g = u - th
        dg = 1 - b * (1 - th * th)
        if dg == 0:
            return None
        step = g / dg
        u = u - step
        if not (gmpy2.is_finite(u.real) and gmpy2.is_finite(u.imag)):
            return None
        if abs(step) <= tol:
            return u
    return None


def u_star(beta, precision=SADDLE_DIGITS, re_max: float = USTAR_RE_MAX) -> BranchPoint:
    """Continue the root of u = tanh(beta u) from u*(1) = 0 along the segment [1, beta]."""
    beta = as_beta(beta)
    bc = complex(beta)
    if not (0 < bc.real <= re_max + 1e-12):
        raise DomainError(f"u* is supported for 0 < Re beta <= {re_max}, got {bc.real}")
    if bc.imag < 0:
        bp = u_star(beta.conjugate(), precision, re_max)
        return BranchPoint(bp.u_star.conjugate(), -bp.k, beta, bp.residual, tuple(-k for k in bp.k_history))
    prec = Precision(precision) if not isinstance(precision, Precision) else precision
    with workprec(prec):
        target = beta.to_bigc()
        if target == 1:
            return BranchPoint(mpc(0), 0, beta, 0.0, (0,))
        delta = target - 1
        tol = mpfr(10) ** (-(prec.decimal_digits - 8))
        dist = abs(delta)
        t = min(mpfr(1), mpfr("1e-3") / dist)

        def seed_at(tt):
            bb = 1 + tt * delta
            s = principal_sqrt(3 * (bb - 1) / bb ** 3)
            return s if s.real >= 0 or (s.real == 0 and s.imag >= 0) else -s

        b = 1 + t * delta
        u = _newton_ustar(b, seed_at(t), tol)
        if u is None or abs(u) < mpfr("1e-6"):
            raise ContinuationError("could not start the u* continuation near beta = 1")
        history = [branch_index(b, u)]
        prev_t, prev_u = mpfr(0), mpc(0)
        dt = min(mpfr("0.02"), 1 - t)
        while t < 1:
            new_t = min(mpfr(1), t + dt)
            # secant predictor in t
            slope = (u - prev_u) / (t - prev_t) if t > prev_t else mpc(0)
            guess = u + slope * (new_t - t)
            b = 1 + new_t * delta
            v = _newton_ustar(b, guess, tol)
            jump_ok = v is not None and abs(v - guess) <= mpfr("0.1") * (abs(u) + mpfr("0.05"))
            if not jump_ok:
                dt /= 2
                if dt < mpfr("1e-10"):
                    raise ContinuationError(f"u* continuation stalled at t={float(t):.6g}")
                continue
            prev_t, prev_u = t, u
            t, u = new_t, v
            k = branch_index(b, u)
            if k != history[-1]:
                history.append(k)
            dt = min(dt * mpfr("1.5"), mpfr("0.05"))
        res = abs(target * u - target * gmpy2.tanh(target * u))
        k = branch_index(target, u)
    if res > 1e-12:
        raise ContinuationError(f"u* residual {float(res):.3g} too large")
    return BranchPoint(u, k, beta, float(res), tuple(history))


def re_f_at_ustar(eps, r, precision=SADDLE_DIGITS) -> float:
    beta = ComplexBeta(eps, r)
    bp = u_star(beta, precision)
    with workprec(precision):
        return float(f_value(beta.to_bigc(), bp.u_star).real)


def conjectured_eps0(r: float, precision=SADDLE_DIGITS, eps_lo: float = 0.0,
                     eps_hi: float = USTAR_RE_MAX - 1, scan_step: float = 0.01,
                     tol: float = 1e-12) -> float:
    """eps0(R): first sign change (+ to -) of Re f_beta(u*(beta)) in eps, refined by Illinois secant."""
    if r <= 0:
        raise DomainError("conjectured curve is traced for R > 0")

    def g(e):
        return re_f_at_ustar(e, r, precision)

    # finer scan near eps = 0 where eps0 ~ R for small R
    grid = []
    e = eps_lo
    step0 = min(scan_step, max(r / 20, 1e-4))
    while e < eps_hi - 1e-15:
        grid.append(e)
        e += step0 if e < 5 * step0 * 20 else scan_step
    grid.append(eps_hi)
    a, ga = None, None
    for e in grid:
        try:
            ge = g(e)
        except NumericalError:
            a, ga = None, None
            continue
        if a is not None and ga > 0 >= ge:
            return _illinois(g, a, e, ga, ge, tol)
        a, ga = e, ge
    raise BracketError(f"no sign change of Re f(u*) in eps in [{eps_lo}, {eps_hi}] at R={r}")


def _illinois(g, a, b, ga, gb, tol):
    side = 0
    c = b
    for _ in range(200):
        c = (a * gb - b * ga) / (gb - ga)
        gc = g(c)
        if abs(gc) <= tol or abs(b - a) <= 1e-15:
            return c
        if gc * gb > 0:
            b, gb = c, gc
            if side == -1:
                ga /= 2
            side = -1
        else:
            a, ga = c, gc
            if side == 1:
                gb /= 2
            side = 1
    return c


def conjectured_curve(r_grid, precision=SADDLE_DIGITS) -> CurveSegment:
    pts, failures = [], []
    for r in r_grid:
        try:
            eps0 = conjectured_eps0(r, precision)
        except NumericalError as exc:
            failures.append({"r": float(r), "error": str(exc)})
            continue
        beta = ComplexBeta(eps0, r)
        bp = u_star(beta, precision)
        with workprec(precision):
            val = f_value(beta.to_bigc(), bp.u_star)
        pts.append(CurvePoint(beta, float(val.imag), float(eps0), float(r)))
    return CurveSegment(pts, "conjectured", failures)

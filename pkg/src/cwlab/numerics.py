"""Precision policy and high-precision complex primitives.

Complex numbers are ``gmpy2.mpc`` values (MPFR/MPC backed), referred to as
BigC throughout the package.  Every mpc carries its own binary precision, and
results of arithmetic take the precision of the active gmpy2 context, so all
evaluation code runs inside :func:`workprec`.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from numbers import Number

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import PrecisionMismatchError

GUARD_DIGITS = 30
LOG2_10 = math.log2(10.0)
LN10 = math.log(10.0)


@dataclass(frozen=True, order=True)
class Precision:
    """Working precision expressed in decimal digits."""

    decimal_digits: int = GUARD_DIGITS

    def __post_init__(self):
        if int(self.decimal_digits) != self.decimal_digits:
            raise ValueError("decimal_digits must be an integer")
        if self.decimal_digits < 30:
            raise ValueError(f"decimal_digits must be >= 30, got {self.decimal_digits}")

    @property
    def bits(self) -> int:
        return math.ceil(self.decimal_digits * LOG2_10)

    def plus(self, extra: int) -> "Precision":
        return Precision(self.decimal_digits + int(extra))

    def eps(self) -> mpfr:
        """10**-digits as an mpfr at this precision."""
        with workprec(self):
            return mpfr(10) ** (-self.decimal_digits)


def as_precision(p) -> Precision:
    if isinstance(p, Precision):
        return p
    if p is None:
        return Precision()
    return Precision(int(p))


@contextlib.contextmanager
def workprec(precision):
    """Run the body with gmpy2 arithmetic at ``precision``."""
    prec = as_precision(precision)
    with gmpy2.context(gmpy2.get_context(), precision=prec.bits,
                       real_prec=prec.bits, imag_prec=prec.bits):
        yield prec


def _real_part(x) -> float:
    if hasattr(x, "re") and not isinstance(x, Number):
        return float(x.re)
    return complex(x).real


def required_precision(beta, n: int, guard: int = GUARD_DIGITS) -> Precision:
    """Digits needed to resolve Z when its largest summand is exp(n*Re(beta)/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    re = max(_real_part(beta), 0.0)
    return Precision(math.ceil(n * re / (2.0 * LN10)) + int(guard))


def bigc(x, precision=None) -> mpc:
    """Round ``x`` into a BigC at ``precision`` (defaults to the active context)."""
    if isinstance(x, tuple):
        x = (mpfr(x[0]) if isinstance(x[0], str) else x[0],
             mpfr(x[1]) if isinstance(x[1], str) else x[1])
    elif hasattr(x, "to_bigc"):
        return x.to_bigc(precision)
    if precision is None:
        return mpc(*x) if isinstance(x, tuple) else mpc(x)
    with workprec(precision):
        return mpc(*x) if isinstance(x, tuple) else mpc(x)


def bigr(x, precision=None) -> mpfr:
    if precision is None:
        return mpfr(x)
    with workprec(precision):
        return mpfr(x)


def precision_of(z) -> int:
    """Binary precision of a BigC; raises if real and imaginary parts differ."""
    if isinstance(z, mpc):
        re_bits, im_bits = z.precision
        if re_bits != im_bits:
            raise PrecisionMismatchError("real and imaginary precisions differ")
        return re_bits
    if isinstance(z, mpfr):
        return z.precision
    raise TypeError(f"not a BigC: {type(z).__name__}")


def stable_sum(terms) -> mpc:
    """Sum BigC terms, rounding once to the shared working precision.

    Real and imaginary parts are accumulated with MPFR's exact summation, so
    the result is the correctly rounded exact sum regardless of cancellation.
    """
    terms = list(terms)
    if not terms:
        return mpc(0)
    bits = precision_of(terms[0])
    for t in terms:
        if precision_of(t) != bits:
            raise PrecisionMismatchError(
                f"stable_sum needs a single precision, got {bits} and {precision_of(t)} bits")
    with gmpy2.context(gmpy2.get_context(), precision=bits, real_prec=bits, imag_prec=bits):
        re = gmpy2.fsum([t.real for t in terms])
        im = gmpy2.fsum([t.imag for t in terms])
        return mpc(re, im)


def principal_sqrt(z) -> mpc:
    """Principal square root: Re >= 0, and Im > 0 on the negative real axis."""
    if not isinstance(z, mpc):
        z = mpc(z)
    if z.imag == 0 and z.real < 0:
        z = mpc(z.real, mpfr(0))
    return gmpy2.sqrt(z)


def to_complex(z) -> complex:
    return complex(float(z.real), float(z.imag)) if isinstance(z, mpc) else complex(z)


def fmt(x, digits: int = 17) -> str:
    """Render a real or BigC with an explicit number of significant digits."""
    if isinstance(x, mpc):
        return f"{fmt(x.real, digits)}{'+' if x.imag >= 0 else '-'}{fmt(abs(x.imag), digits)}i"
    if isinstance(x, mpfr):
        if not gmpy2.is_finite(x):
            return str(x)
        if x == 0:
            return "0." + "0" * (digits - 1) + "e+00"
        # mpfr.__format__ is unreliable across gmpy2 builds; assemble by hand
        mant, exp, _ = x.digits(10, digits)
        sign = "-" if mant.startswith("-") else ""
        mant = mant.lstrip("-")
        e = exp - 1
        return f"{sign}{mant[0]}.{mant[1:]}e{'+' if e >= 0 else '-'}{abs(e):02d}"
    return format(float(x), f".{digits - 1}e")

"""Finite-N Curie-Weiss objects: Hamiltonian, partition function, free energy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from numbers import Number

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import OracleRangeError, ZeroProximityError
from .numerics import Precision, as_precision, required_precision, stable_sum, workprec

ENUMERATION_MAX_N = 20


@dataclass(frozen=True)
class ComplexBeta:
    """Inverse temperature beta = 1 + epsilon + i*r.

    ``epsilon`` and ``r`` may be floats or mpfr values of any precision; the
    complex value is rebuilt exactly at whatever precision is requested.
    """

    epsilon: object = 0.0
    r: object = 0.0

    @classmethod
    def from_value(cls, z) -> "ComplexBeta":
        if isinstance(z, ComplexBeta):
            return z
        if isinstance(z, mpc):
            # keep every bit of the incoming value
            with gmpy2.context(gmpy2.get_context(), precision=max(z.precision[0], 64) + 8):
                return cls(z.real - 1, mpfr(z.imag))
        if isinstance(z, mpfr):
            with gmpy2.context(gmpy2.get_context(), precision=max(z.precision, 64) + 8):
                return cls(z - 1, 0.0)
        z = complex(z)
        # enough bits that re - 1 is exact, so 1 + epsilon gives back re
        e = math.frexp(z.real)[1] if z.real else 0
        bits = max(80, max(e, 1) - min(e - 53, 0) + 2)
        with gmpy2.context(gmpy2.get_context(), precision=bits):
            return cls(mpfr(z.real) - 1, z.imag)

    @property
    def re(self):
        return 1 + mpfr(self.epsilon, _bits_of(self.epsilon) + 64)

    @property
    def im(self):
        return self.r

    def conjugate(self) -> "ComplexBeta":
        return ComplexBeta(self.epsilon, -self.r)

    def to_bigc(self, precision=None) -> mpc:
        if precision is None:
            return mpc(1 + mpfr(self.epsilon), mpfr(self.r))
        with workprec(precision):
            return mpc(1 + mpfr(self.epsilon), mpfr(self.r))

    def __complex__(self):
        return complex(float(self.re), float(self.r))

    def __repr__(self):
        return f"ComplexBeta(epsilon={float(self.epsilon)!r}, r={float(self.r)!r})"


def _bits_of(x) -> int:
    return x.precision if isinstance(x, mpfr) else 53


def as_beta(beta) -> ComplexBeta:
    if isinstance(beta, ComplexBeta):
        return beta
    if isinstance(beta, (Number, mpc, mpfr)):
        return ComplexBeta.from_value(beta)
    raise TypeError(f"cannot interpret {beta!r} as an inverse temperature")


@dataclass(frozen=True)
class PartitionValue:
    value: mpc
    n: int
    method: str
    precision_used: Precision

    def __complex__(self):
        return complex(float(self.value.real), float(self.value.imag))


def hamiltonian(config) -> float:
    """Energy -(N/2) m^2 of a spin configuration."""
    spins = list(config)
    if not spins:
        raise ValueError("configuration must be nonempty")
    if any(s not in (1, -1) for s in spins):
        raise ValueError("spins must be +1 or -1")
    s = sum(spins)
    return -(s * s) / (2.0 * len(spins))


def _spin_sums(n: int) -> np.ndarray:
    """Total spin of every configuration, lexicographic with -1 < +1."""
    idx = np.arange(1 << n, dtype=np.int64)
    ups = np.zeros_like(idx)
    for bit in range(n):
        ups += (idx >> bit) & 1
    return 2 * ups - n


def z_enumerate(beta, n: int, precision=None) -> PartitionValue:
    """Brute-force Z over all 2**n configurations (oracle, n <= 20).

    Boltzmann weights are memoised per distinct energy; each configuration
    still contributes its own term to the sum.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > ENUMERATION_MAX_N:
        raise OracleRangeError(f"enumeration limited to n <= {ENUMERATION_MAX_N}, got {n}")
    beta = as_beta(beta)
    prec = as_precision(precision) if precision is not None else required_precision(beta, n)
    with workprec(prec):
        b = beta.to_bigc()
        scale = mpfr(2) ** (-n)
        weights = {}
        for s in range(-n, n + 1, 2):
            # -beta*H = beta * s^2 / (2n)
            weights[s] = gmpy2.exp(b * (mpfr(s * s) / (2 * n))) * scale
        terms = [weights[s] for s in _spin_sums(n).tolist()]
        value = stable_sum(terms)
    return PartitionValue(value, n, "enumeration", prec)


@lru_cache(maxsize=64)
def _binomial_weights(n: int, bits: int):
    with gmpy2.context(gmpy2.get_context(), precision=bits, real_prec=bits, imag_prec=bits):
        out = []
        for k in range(n + 1):
            w = mpfr(gmpy2.comb(n, k)) / (mpz_pow2(n))
            q = mpfr((n - 2 * k) ** 2) / (2 * n)
            out.append((w, q))
        return tuple(out)


def mpz_pow2(n: int):
    return gmpy2.mpz(1) << n


def _binomial_terms(b: mpc, n: int, bits: int, derivative: bool = False):
    terms = []
    for w, q in _binomial_weights(n, bits):
        t = gmpy2.exp(b * q) * w
        terms.append(t * q if derivative else t)
    return terms


def z_binomial(beta, n: int, precision=None) -> PartitionValue:
    """Z = sum_k C(n,k) 2^-n exp(beta * (n-2k)^2 / (2n))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    beta = as_beta(beta)
    prec = as_precision(precision) if precision is not None else required_precision(beta, n)
    with workprec(prec):
        value = stable_sum(_binomial_terms(beta.to_bigc(), n, prec.bits))
    return PartitionValue(value, n, "binomial", prec)


def z_derivative(beta, n: int, precision=None) -> mpc:
    """dZ/dbeta, summed term by term."""
    if n < 1:
        raise ValueError("n must be >= 1")
    beta = as_beta(beta)
    prec = as_precision(precision) if precision is not None else required_precision(beta, n)
    with workprec(prec):
        return stable_sum(_binomial_terms(beta.to_bigc(), n, prec.bits, derivative=True))


def z_and_derivative(beta, n: int, precision=None):
    """(Z, dZ/dbeta) sharing one set of exponentials."""
    beta = as_beta(beta)
    prec = as_precision(precision) if precision is not None else required_precision(beta, n)
    with workprec(prec):
        b = beta.to_bigc()
        zs, ds = [], []
        for w, q in _binomial_weights(n, prec.bits):
            t = gmpy2.exp(b * q) * w
            zs.append(t)
            ds.append(t * q)
        return stable_sum(zs), stable_sum(ds)


def largest_summand(beta, n: int) -> float:
    """log of the largest |term| in the binomial sum (natural log)."""
    beta = as_beta(beta)
    re = float(beta.re)
    best = -math.inf
    for k in range(n + 1):
        lw = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1) - n * math.log(2)
        best = max(best, lw + re * (n - 2 * k) ** 2 / (2 * n))
    return best


def free_energy_estimate(beta, n: int, precision=None) -> float:
    """(1/n) log|Z_{beta,n}|."""
    z = z_binomial(beta, n, precision)
    with workprec(z.precision_used):
        mod = abs(z.value)
        if mod == 0:
            raise ZeroProximityError(f"Z vanishes at working precision for beta={as_beta(beta)!r}, n={n}")
        return float(gmpy2.log(mod)) / n

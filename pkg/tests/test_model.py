import cmath

import gmpy2

import pytest
from gmpy2 import mpc, mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from cwlab.errors import OracleRangeError, ZeroProximityError
from cwlab.model import (ComplexBeta, as_beta, free_energy_estimate, hamiltonian, z_binomial,
                         z_derivative, z_enumerate)
from cwlab.numerics import Precision, workprec


def rel(a, b):
    with workprec(60):
        return float(abs(mpc(a) - mpc(b)) / abs(mpc(b)))


@pytest.mark.parametrize("config,energy", [((1,), -0.5), ((1, -1), 0.0), ((1, 1, 1, -1), -0.5)])
def test_hamiltonian_examples(config, energy):
    assert hamiltonian(config) == energy


def test_hamiltonian_rejects_bad_spins():
    with pytest.raises(ValueError):
        hamiltonian((1, 0, -1))


def test_complex_beta_roundtrip():
    b = ComplexBeta.from_value(1.05 + 1.5j)
    assert complex(b) == 1.05 + 1.5j
    assert complex(b.conjugate()) == 1.05 - 1.5j
    assert as_beta(b) is b
    with pytest.raises(TypeError):
        as_beta("1+i")


@pytest.mark.parametrize("beta", [0.3, 1 + 1j, 2.5 - 0.7j])
def test_enumerate_small_closed_forms(beta):
    with workprec(40):
        b = mpc(beta)
        one = gmpy2.exp(b / 2)
        two = (gmpy2.exp(b) + 1) / 2
    assert rel(z_enumerate(beta, 1, 40).value, one) < 1e-30
    assert rel(z_enumerate(beta, 2, 40).value, two) < 1e-30


def test_enumerate_beta_zero():
    assert rel(z_enumerate(0, 12).value, 1) < 1e-28


def test_enumerate_range():
    with pytest.raises(OracleRangeError):
        z_enumerate(1.0, 21)


def test_binomial_closed_form():
    with workprec(40):
        expected = (gmpy2.exp(mpc(1 + 1j)) + 1) / 2
    assert rel(z_binomial(1 + 1j, 2, 40).value, expected) < 1e-30


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2), st.floats(0, 2 * cmath.pi))
def test_binomial_matches_enumeration(rad, ang):
    beta = 1 + rad * cmath.exp(1j * ang)
    assert rel(z_binomial(beta, 16).value, z_enumerate(beta, 16).value) < 1e-12


def test_binomial_two_precision_consistency():
    a = z_binomial(1.5, 100)
    b = z_binomial(1.5, 100, a.precision_used.plus(20))
    assert a.value.imag == 0 and a.value.real > 0
    assert rel(a.value, b.value) < 1e-25


def test_derivative_examples():
    assert rel(z_derivative(0, 2), 0.5) < 1e-28
    p = Precision(50)
    with workprec(p):
        b, h = mpc(0.7 + 0.3j), mpfr(10) ** -15
        fd = (z_binomial(b + h, 14, p).value - z_binomial(b - h, 14, p).value) / (2 * h)
    assert rel(z_derivative(0.7 + 0.3j, 14, p), fd) < 1e-10
    assert z_derivative(1.3, 30).imag == 0


def test_conjugation_symmetry():
    a = z_binomial(1.1 + 0.4j, 50).value
    b = z_binomial(1.1 - 0.4j, 50).value
    assert a.real == b.real and a.imag + b.imag == 0


@settings(max_examples=50, deadline=None)
@given(st.floats(-1e6, 1e6), st.floats(-10, 10))
def test_beta_reconstructs_input_exactly(re, im):
    b = ComplexBeta.from_value(complex(re, im))
    assert b.re == re and complex(b) == complex(re, im)


def test_free_energy_examples():
    assert free_energy_estimate(0, 77) == 0
    f200, f400 = free_energy_estimate(2, 200), free_energy_estimate(2, 400)
    assert abs(f200 - f400) < 0.05 and f200 > 0.1 and f400 > 0.1
    g200 = free_energy_estimate(0.5 + 0.5j, 200)
    g400 = free_energy_estimate(0.5 + 0.5j, 400)
    assert abs(g200) <= 0.05 and abs(g400) < abs(g200)


def test_free_energy_zero_proximity(monkeypatch):
    import cwlab.model as m

    monkeypatch.setattr(m, "z_binomial", lambda *a, **k: m.PartitionValue(mpc(0), 10, "binomial", Precision(30)))
    with pytest.raises(ZeroProximityError):
        free_energy_estimate(1.2, 10)

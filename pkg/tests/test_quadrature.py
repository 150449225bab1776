import pytest
from gmpy2 import mpc

from cwlab.errors import AccuracyError, DomainError
from cwlab.model import z_binomial
from cwlab.numerics import workprec
from cwlab.quadrature import z_integral_f, z_integral_h


def rel(a, b):
    with workprec(60):
        return float(abs(mpc(a) - mpc(b)) / abs(mpc(b)))


@pytest.mark.parametrize("beta,n,tol", [(1.5, 40, 1e-10), (0.5 + 2j, 60, 1e-8), (0.3 - 0.8j, 25, 1e-10)])
def test_f_form_matches_exact_sum(beta, n, tol):
    q = z_integral_f(beta, n)
    assert q.form == "f"
    assert rel(q.value, z_binomial(beta, n).value) < tol


def test_h_form_matches_f_form():
    assert rel(z_integral_h(2, 30).value, z_integral_f(2, 30).value) < 1e-10


def test_h_form_real_for_real_beta():
    assert z_integral_h(1.3, 20).value.imag == 0


@pytest.mark.slow
def test_h_form_complex_beta():
    assert rel(z_integral_h(1.05 + 1.5j, 100).value, z_binomial(1.05 + 1.5j, 100).value) < 1e-8


def test_requested_digits_honoured():
    q = z_integral_f(1.2 + 0.3j, 50, requested_digits=25)
    assert rel(q.value, z_binomial(1.2 + 0.3j, 50).value) < 1e-25
    assert q.est_error < 1e-20


def test_domain_errors():
    with pytest.raises(DomainError):
        z_integral_f(-0.2 + 1j, 10)
    with pytest.raises(DomainError):
        z_integral_h(-0.1 + 2j, 10)


def test_h_form_precision_cap():
    # Re(1/beta) is tiny here, so the integrand's dynamic range is huge
    with pytest.raises(AccuracyError):
        z_integral_h(0.05 + 2j, 400)

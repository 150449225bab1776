import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cwlab.critical import r0_of_eps
from cwlab.errors import DegenerateSaddleError, DomainError
from cwlab.numerics import to_complex
from cwlab.saddle import critical_points, find_u_beta, h_at_saddle, in_disc, seed, xi


def bisect_u(beta):
    lo, hi = 0.1, 1.5
    for _ in range(200):
        mid = (lo + hi) / 2
        if math.tanh(mid) - mid / beta > 0:
            lo = mid
        else:
            hi = mid
    return lo


def test_seed_examples():
    # 4/3 sits outside the default radius 0.1
    assert abs(to_complex(seed(4 / 3, radius=0.5)) - math.sqrt(3) / 2) < 1e-15
    with pytest.raises(DomainError):
        seed(4 / 3)
    with pytest.raises(DegenerateSaddleError):
        seed(1)
    assert to_complex(seed(1 + 0.05j)).imag > 0


def test_real_saddle_matches_bisection():
    d = find_u_beta(1.2, radius=0.25)
    assert abs(to_complex(d.u_beta) - bisect_u(1.2)) < 1e-14
    h = to_complex(d.h_at_saddle)
    assert h.imag == 0 and h.real < 0
    assert to_complex(d.xi).real > 0 and to_complex(d.xi).imag == 0


@pytest.mark.parametrize("db", [1e-2, 1e-3, 1e-4])
def test_u_asymptotics(db):
    u = to_complex(find_u_beta(1 + db).u_beta).real
    assert abs(u / math.sqrt(3 * db) - 1) < 2 * db


@settings(max_examples=30, deadline=None)
@given(st.floats(0.005, 0.1), st.floats(0, 2 * math.pi))
def test_conjugate_saddle(rad, ang):
    beta = 1 + rad * complex(math.cos(ang), math.sin(ang))
    a = to_complex(find_u_beta(beta).u_beta)
    b = to_complex(find_u_beta(beta.conjugate()).u_beta)
    assert abs(a - b.conjugate()) < 1e-25


def test_re_h_vanishes_on_gamma():
    eps = 0.02
    r = r0_of_eps(eps)
    assert abs(to_complex(h_at_saddle(complex(1 + eps, r))).real) < 1e-12


@pytest.mark.parametrize("r", [0.01, 0.05, 0.1])
def test_re_h_positive_on_unit_line(r):
    assert to_complex(h_at_saddle(complex(1, r))).real > 0


def test_xi_prime_at_one():
    d = (to_complex(xi(1.001)) - to_complex(xi(0.999))) / 2e-3
    assert abs(d - math.sqrt(1.5)) < 1e-2


def test_critical_points_distinct_and_paired():
    pts = critical_points(1.03 + 0.02j)
    z, p, m = (to_complex(u) for u, _ in pts)
    assert abs(z) < 1e-25
    assert abs(p + m) < 1e-25 and abs(p) > 0.1
    assert all(res < 1e-30 for _, res in pts)


def test_saddle_in_disc():
    beta = 1.05 + 0.02j
    d = find_u_beta(beta)
    assert in_disc(to_complex(d.u_beta), to_complex(seed(beta)), beta)

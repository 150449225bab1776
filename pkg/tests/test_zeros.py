import math

import pytest
from gmpy2 import mpc

from cwlab.critical import gamma_im_h_at_radius, gamma_point_with_im_h
from cwlab.errors import CoverageError, DomainError, SingularityProximityError
from cwlab.model import z_binomial
from cwlab.numerics import as_precision, to_complex, workprec
from cwlab.saddle import h_at_saddle
from cwlab.zeros import (TEST_FUNCTIONS, Annulus, ZeroSet, _ZField, build_measures, gamma_for_annulus,
                         match_zeros, psi, psi_terms, psi_zero_for_k, psi_zeros, residual_certificate,
                         winding_number, z_zeros, zeros_in_rectangle)

WIDE = Annulus(0.1, 0.3)
WIDE_RADIUS = 0.3


@pytest.fixture(scope="module")
def exact100():
    return z_zeros(100, WIDE)


@pytest.fixture(scope="module")
def psi100():
    return psi_zeros(100, WIDE, radius=WIDE_RADIUS)


def test_psi_conjugation():
    a = to_complex(psi(1.03 + 0.04j, 200))
    b = to_complex(psi(1.03 - 0.04j, 200))
    assert abs(a - b.conjugate()) < 1e-12 * abs(a)


def test_psi_subcritical_side_single_term():
    # the gap Psi - 1/sqrt(1 - beta) is the saddle term, of size exp(-N Re h);
    # it is small on the Re beta < 1 side only where Re h > 0
    beta = 0.97 + 0.08j
    re_h = to_complex(h_at_saddle(beta)).real
    assert re_h > 0
    gaps = []
    for n in (100, 200, 400):
        first, _ = psi_terms(beta, n)
        gaps.append(abs(to_complex(psi(beta, n) - first)))
    assert gaps[0] > gaps[1] > gaps[2]
    rate = math.log(gaps[0] / gaps[2]) / 300
    assert abs(rate / re_h - 1) < 0.2


def test_psi_terms_comparable_on_gamma():
    beta = gamma_point_with_im_h(-0.002)
    for n in (200, 400):
        first, second = psi_terms(beta, n)
        ratio = abs(to_complex(second)) / abs(to_complex(first))
        assert 0.25 <= ratio <= 4


def test_psi_singular_and_domain():
    with pytest.raises(SingularityProximityError):
        psi(1.001, 100)
    with pytest.raises(DomainError):
        psi(1.2, 100)


def test_psi_zero_count_and_distance(psi100):
    t_top = gamma_im_h_at_radius(WIDE.c_max, radius=WIDE_RADIUS)
    for n in (100, 400):
        zs = psi100 if n == 100 else psi_zeros(n, WIDE, radius=WIDE_RADIUS)
        expected = 2 * math.floor(n * abs(t_top) / (2 * math.pi))
        assert abs(len(zs.zeros) - expected) <= 2
        assert all(r < 1e-20 for r in zs.residuals)
        assert zs.as_complex() == sorted(zs.as_complex(), key=lambda z: (z.real, z.imag))


def test_psi_seed_distance_shrinks():
    sups = []
    for n in (100, 200, 400):
        ds = []
        for k in range(1, 10):
            z = psi_zero_for_k(n, k, radius=WIDE_RADIUS)
            if z is None or abs(to_complex(z) - 1) > WIDE.c_max:
                break
            s = complex(gamma_point_with_im_h(-2 * math.pi * k / n, radius=0.35))
            ds.append(abs(to_complex(z) - s))
        sups.append(max(ds))
    assert sups[0] > sups[1] > sups[2]


def test_real_axis_rectangle_empty():
    assert z_zeros(100, (complex(1.2, -0.001), complex(2, 0.001))).zeros == []


def test_mirror_rectangle_conjugate():
    up = z_zeros(100, (complex(1.1, 0.15), complex(1.3, 0.35))).as_complex()
    dn = z_zeros(100, (complex(1.1, -0.35), complex(1.3, -0.15))).as_complex()
    assert len(up) == len(dn) == 1
    assert abs(up[0] - dn[0].conjugate()) < 1e-14


@pytest.mark.parametrize("n", [100, 200])
def test_zero_free_left_of_unit_line(n):
    assert z_zeros(n, (complex(0.93, 0.0), complex(0.99, 0.079))).zeros == []


def test_winding_additivity():
    n = 100
    prec = as_precision(60)
    zf = _ZField(n, prec)
    lo, hi = complex(1.05, 0.1), complex(1.3, 0.35)
    whole = winding_number(zf, lo, hi)
    mx, my = 1.17, 0.22
    parts = [
        winding_number(zf, lo, complex(mx, my)),
        winding_number(zf, complex(mx, lo.imag), complex(hi.real, my)),
        winding_number(zf, complex(lo.real, my), complex(mx, hi.imag)),
        winding_number(zf, complex(mx, my), hi),
    ]
    assert whole == sum(parts) == 1


def test_exact_zeros_certified(exact100):
    assert len(exact100.zeros) == 2 and not exact100.unresolved
    for z in exact100.zeros:
        prec = as_precision(80)
        cert = residual_certificate(to_complex(z), 100, prec)
        val = z_binomial(z, 100, prec.plus(20)).value
        with workprec(prec.plus(20)):
            assert float(abs(val)) <= 10 * cert


def test_exact_zeros_structure(exact100):
    zs = exact100.as_complex()
    assert all(z.real > 1 for z in zs)
    assert exact100.min_separation() >= 0.1 / 100


def test_zero_search_guards():
    with pytest.raises(SingularityProximityError):
        zeros_in_rectangle(100, complex(0.99, -0.01), complex(1.01, 0.01))
    with pytest.raises(DomainError):
        zeros_in_rectangle(401, complex(1.2, 0.1), complex(1.3, 0.2))


def test_match_identical(exact100):
    rep = match_zeros(exact100, exact100)
    assert rep.max_distance == 0 and not rep.unmatched_a and len(rep.pairs) == 2


def test_match_far_apart():
    a = ZeroSet(100, [mpc(1.1 + 0.2j)], "psi", [0.0], WIDE)
    b = ZeroSet(100, [mpc(1.1 + 0.29j)], "exact-Z", [0.0], WIDE)
    rep = match_zeros(a, b)
    assert rep.pairs == [] and rep.unmatched_a and rep.unmatched_b


def test_match_psi_against_exact(exact100, psi100):
    rep = match_zeros(psi100, exact100)
    assert len(rep.pairs) == 2
    assert rep.max_distance < 1 / 100
    with pytest.raises(ValueError):
        match_zeros(psi100, ZeroSet(200, [], "psi", [], WIDE))


def test_measures(exact100):
    gamma = gamma_for_annulus(WIDE, nodes=40, radius=WIDE_RADIUS)
    mp = build_measures(exact100, gamma)
    assert mp.mass_n == pytest.approx(len(exact100.zeros) / 100)
    t_in = gamma_im_h_at_radius(WIDE.delta, radius=WIDE_RADIUS)
    t_out = gamma_im_h_at_radius(WIDE.c_max, radius=WIDE_RADIUS)
    assert mp.mass_limit == pytest.approx(2 * abs(t_out - t_in) / (2 * math.pi), rel=1e-12)
    a, b = mp.integrate(TEST_FUNCTIONS["im"])
    assert abs(a) < 1e-14 and abs(b) < 1e-14


def test_full_upper_segment_mass():
    # with the inner edge at beta = 1, the upper mass is Im h at the outer end over 2 pi
    t_out = gamma_im_h_at_radius(0.05)
    gamma = gamma_for_annulus(Annulus(0.0, 0.05), nodes=20)
    upper = sum(w for z, w in build_measures(ZeroSet(100, [], "psi", [], Annulus(0.0, 0.05)), gamma).mu_limit
                if z.imag > 0)
    assert upper == pytest.approx(abs(t_out) / (2 * math.pi), rel=1e-12)


def test_measure_coverage():
    gamma = gamma_for_annulus(Annulus(0.02, 0.05), nodes=5)
    zs = ZeroSet(100, [mpc(1.1 + 0.05j)], "exact-Z", [0.0], Annulus(0.02, 0.08))
    with pytest.raises(CoverageError):
        build_measures(zs, gamma)

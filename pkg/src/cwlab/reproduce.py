"""Reproduction suites: each runs one quantitative check and reports pass/fail.

Every suite returns a list of ``Criterion`` records; ``run_suite`` also
writes them to ``<out>/<suite>.json``.  Runs marked ``supplementary`` are
diagnostics outside the pass/fail criteria.
"""

from __future__ import annotations

import cmath
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List

import gmpy2
import numpy as np

from .critical import conjectured_eps0, r0_of_eps, re_h_at_saddle, theorem2_point
from .landscape import cosh_bound_margins, far_field_margins, f_value, near_origin_margins, near_origin_window
from .model import z_binomial, z_enumerate, free_energy_estimate
from .numerics import workprec
from .quadrature import z_integral_f
from .scan import PHASE_THRESHOLD, scan_point
from .zeros import (TEST_FUNCTIONS, Annulus, build_measures, gamma_for_annulus, match_zeros, psi_terms,
                    psi_zeros, z_zeros)

SEED = 20240611
CRIT_ANNULUS = Annulus(0.02, 0.08)
WIDE_ANNULUS = Annulus(0.1, 0.3)
WIDE_RADIUS = 0.3


@dataclass
class Criterion:
    cid: str
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    detail: str = ""
    seconds: float = 0.0
    supplementary: bool = False

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        if self.supplementary:
            tag = "INFO"
        return f"[{tag}] {self.cid} {self.name}: {self.detail}"


def _rel(a, b) -> float:
    with workprec(max(a.precision[0], b.precision[0])):
        return float(abs(a - b) / abs(b))


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.time()
        out = fn(*args, **kwargs)
        dt = time.time() - t0
        for c in out:
            c.seconds = c.seconds or dt
        return out
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------------------


@_timed
def suite_oracle(samples: int = 100, n_max: int = 16) -> List[Criterion]:
    """Enumeration against the binomial sum for every n <= n_max."""
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(samples):
        b = complex(rng.uniform(-1, 3), rng.uniform(-3, 3))
        for n in range(1, n_max + 1):
            worst = max(worst, _rel(z_enumerate(b, n).value, z_binomial(b, n).value))
    ok = worst <= 1e-12
    return [Criterion("1", "oracle equivalence", ok, {"max_rel_err": worst, "samples": samples},
                      f"max relative error {worst:.3e} over {samples} beta x n<={n_max} (tol 1e-12)")]


@_timed
def suite_prop21(samples: int = 30, ns=(10, 25, 50, 100)) -> List[Criterion]:
    """f-form integral against the binomial sum."""
    rng = np.random.default_rng(SEED + 1)
    betas = [complex(3 * (1 - rng.random()), rng.uniform(-3, 3)) for _ in range(samples)]
    worst, where = 0.0, None
    for b in betas:
        for n in ns:
            q = z_integral_f(b, n, requested_digits=12)
            e = _rel(q.value, z_binomial(b, n).value)
            if e > worst:
                worst, where = e, (b, n)
    ok = worst <= 1e-8
    return [Criterion("2", "integral representation", ok,
                      {"max_rel_err": worst, "worst_at": [str(where[0]), where[1]] if where else None},
                      f"max relative error {worst:.3e} over {samples} beta x n in {list(ns)} (tol 1e-8)")]


@_timed
def suite_thm1(ns=(50, 100, 200, 400, 800)) -> List[Criterion]:
    """|Z_N - 1/sqrt(1 - beta)| decays for a beta in the validated window and for eps < 0."""
    out = []
    for b in (1.05 + 1.5j, 0.9 + 0.5j):
        limit = 1 / cmath.sqrt(1 - b)
        errs = [abs(complex(z_binomial(b, n).value) - limit) for n in ns]
        slope = float(np.polyfit(np.log(ns), np.log(errs), 1)[0])
        dec = all(b2 < a for a, b2 in zip(errs, errs[1:]))
        ok = dec and slope <= -0.15
        out.append(Criterion("3", f"zero free energy at beta={b}", ok,
                             {"errors": errs, "slope": slope, "limit": [limit.real, limit.imag]},
                             f"e_N decreasing={dec}, log-log slope {slope:.3f} (need <= -0.15)"))
    return out


def branch_formula(b: complex, n: int, radius: float = 0.1):
    """(formula value, normaliser) for the two-regime asymptotics near beta = 1."""
    first, second = psi_terms(b, n, radius=radius)
    f1, f2 = complex(first), complex(second)
    if b.real >= 1:
        return f1 + f2, abs(f1) + abs(f2)
    return f1, abs(f1)


@_timed
def suite_thm3(samples: int = 20, ns=(100, 200, 400)) -> List[Criterion]:
    """N |Z_N - formula| / normaliser stays bounded as N grows."""
    rng = np.random.default_rng(SEED + 3)
    betas = []
    for j in range(samples):
        rho = rng.uniform(0.02, 0.08)
        # alternate sides of Re beta = 1
        th = rng.uniform(-math.pi / 2, math.pi / 2) + (math.pi if j % 2 else 0.0)
        betas.append(1 + rho * cmath.exp(1j * th))
    scaled = {n: [] for n in ns}
    for b in betas:
        for n in ns:
            val, norm = branch_formula(b, n)
            scaled[n].append(n * abs(complex(z_binomial(b, n).value) - val) / norm)
    c = {n: max(v) for n, v in scaled.items()}
    growth = c[ns[-1]] / c[ns[0]]
    ok = growth <= 2.0
    return [Criterion("4", "branch formula near beta = 1", ok,
                      {"max_scaled_error": {str(n): c[n] for n in ns}, "growth": growth,
                       "betas": [[b.real, b.imag] for b in betas],
                       "scaled": {str(n): scaled[n] for n in ns}},
                      "max_beta N|Z-formula|/norm = " + ", ".join(f"{c[n]:.3g}@{n}" for n in ns)
                      + f"; growth {growth:.2f} (bounded means <= 2)")]


@_timed
def suite_claim_crit_curve(eps_list=(0.01, 0.02, 0.04)) -> List[Criterion]:
    """Sign of Re h(u_beta) below, on and above R0(eps)."""
    rows, ok = [], True
    for eps in eps_list:
        r0 = r0_of_eps(eps)
        vals = [re_h_at_saddle(eps, f * r0) for f in (0.5, 1.0, 1.5)]
        good = vals[0] < 0 and abs(vals[1]) <= 1e-12 and vals[2] > 0 and abs(r0 - eps) <= 5 * eps ** 2
        ok &= good
        rows.append({"eps": eps, "r0": r0, "re_h": vals, "c_fit": (r0 - eps) / eps ** 2})
    return [Criterion("5", "critical-curve trichotomy", ok, {"rows": rows},
                      "; ".join(f"eps={r['eps']}: R0={r['r0']:.6g}, C={r['c_fit']:.3f}" for r in rows))]


def _dist_to_polyline(z: complex, poly: List[complex]) -> float:
    best = math.inf
    for a, b in zip(poly[:-1], poly[1:]):
        d = b - a
        t = 0.0 if d == 0 else max(0.0, min(1.0, ((z - a) * d.conjugate()).real / abs(d) ** 2))
        best = min(best, abs(z - (a + t * d)))
    return best


def _gamma_poly(annulus: Annulus, radius: float) -> List[complex]:
    seg = gamma_for_annulus(annulus, nodes=100, radius=radius)
    return [complex(p.beta) for p in seg.points]


def _cor1_run(annulus: Annulus, ns, radius: float):
    poly = _gamma_poly(annulus, radius)
    lower = [z.conjugate() for z in poly]
    runs = {}
    for n in ns:
        zs = z_zeros(n, annulus)
        ps = psi_zeros(n, annulus, radius=radius)
        m = match_zeros(zs, ps)
        dists = [min(_dist_to_polyline(z, poly), _dist_to_polyline(z, lower)) for z in zs.as_complex()]
        runs[n] = {"exact": zs, "psi": ps, "match": m, "gamma_dist": dists}
    return runs


@_timed
def suite_cor1(ns=(100, 200)) -> List[Criterion]:
    """Zeros in the annulus: half plane, distance to Gamma, match with Psi_N zeros."""
    out = []
    for label, annulus, radius, supp in (("", CRIT_ANNULUS, 0.1, False), (" (wide annulus)", WIDE_ANNULUS, WIDE_RADIUS, True)):
        t0 = time.time()
        runs = _cor1_run(annulus, ns, radius)
        counts = {n: len(r["exact"].zeros) for n, r in runs.items()}
        unresolved = sum(len(r["exact"].unresolved) for r in runs.values())
        a_ok = unresolved == 0 and all(z.real > 1 for r in runs.values() for z in r["exact"].as_complex())
        b_ok = unresolved == 0 and all(d <= 10 / n for n, r in runs.items() for d in r["gamma_dist"])
        scaled = {n: r["match"].max_scaled_distance for n, r in runs.items()}
        paired = all(r["match"].pairs for r in runs.values())
        vals = [scaled[n] for n in ns]
        ratio = (max(vals) / min(vals)) if paired and min(vals) > 0 else math.inf
        c_ok = paired and all(not r["match"].unmatched_a and not r["match"].unmatched_b for r in runs.values()) \
            and ratio <= 4
        meas = {"annulus": [annulus.delta, annulus.c_max], "zero_counts": {str(k): v for k, v in counts.items()},
                "psi_counts": {str(n): len(r["psi"].zeros) for n, r in runs.items()},
                "unresolved_cells": unresolved,
                "max_gamma_dist_times_n": {str(n): max([d * n for d in r["gamma_dist"]], default=0.0)
                                           for n, r in runs.items()},
                "max_scaled_distance": {str(n): v for n, v in scaled.items()},
                "zeros": {str(n): [[z.real, z.imag] for z in r["exact"].as_complex()] for n, r in runs.items()}}
        dt = time.time() - t0
        cnt = ", ".join(f"{counts[n]} zeros@{n}" for n in ns)
        out.append(Criterion("6a", "exact zeros in Re beta > 1" + label, a_ok, meas, cnt, dt, supp))
        out.append(Criterion("6b", "exact zeros within 10/N of Gamma" + label, b_ok, meas,
                             cnt + "; max N*dist " + ", ".join(
                                 f"{meas['max_gamma_dist_times_n'][str(n)]:.3g}" for n in ns), dt, supp))
        detail = ("no matched pairs at some N, ratio undefined" if not paired else
                  "max |z-z'| N^2 = " + ", ".join(f"{scaled[n]:.3g}@{n}" for n in ns) + f"; ratio {ratio:.3g}")
        out.append(Criterion("6c", "exact/Psi zero match scales as N^-2" + label, c_ok, meas, detail, dt, supp))
    return out


def discrepancies(annulus: Annulus, ns, radius: float):
    gamma = gamma_for_annulus(annulus, nodes=200, radius=radius)
    table = {}
    mass = None
    for n in ns:
        zs = z_zeros(n, annulus)
        mp = build_measures(zs, gamma)
        mass = mp.mass_limit
        row = {}
        for name, f in TEST_FUNCTIONS.items():
            a, b = mp.integrate(f)
            row[name] = abs(a - b)
        row["zero_count"] = len(zs.zeros)
        table[n] = row
    return table, mass


@_timed
def suite_cor2(ns=(100, 200, 400)) -> List[Criterion]:
    """Zero-counting measure against the limiting measure on Gamma."""
    out = []
    for label, annulus, radius, supp in (("", CRIT_ANNULUS, 0.1, False), (" (wide annulus)", WIDE_ANNULUS, WIDE_RADIUS, True)):
        t0 = time.time()
        table, mass = discrepancies(annulus, ns, radius)
        dec = all(all(table[b][k] < table[a][k] for a, b in zip(ns, ns[1:])) for k in TEST_FUNCTIONS)
        final = max(table[ns[-1]][k] for k in TEST_FUNCTIONS)
        ok = dec and final <= 0.1 * mass
        detail = (f"counts {[table[n]['zero_count'] for n in ns]}, decreasing={dec}, "
                  f"final max discrepancy {final:.3g} vs 0.1*mass {0.1 * mass:.3g}")
        out.append(Criterion("7", "zero-counting measure convergence" + label, ok,
                             {"annulus": [annulus.delta, annulus.c_max], "mass_limit": mass,
                              "table": {str(n): v for n, v in table.items()}},
                             detail, time.time() - t0, supp))
    return out


@_timed
def suite_thm2(r: float = 4.0, ns=(100, 200, 400)) -> List[Criterion]:
    """Positive free energy on the explicit curve and a stable modulus ratio."""
    beta = theorem2_point(r)
    with workprec(60):
        target = -float(f_value(beta.to_bigc(), gmpy2.const_pi() / r).real)
    fs, ratios = [], []
    for n in ns:
        fs.append(free_energy_estimate(beta, n))
        z = z_binomial(beta, n)
        zr = z_binomial(1 + beta.epsilon, n, z.precision_used)
        with workprec(z.precision_used):
            ratios.append(float(abs(z.value) / abs(zr.value)))
    f_ok = target > 0 and all(abs(f - target) <= 0.02 for f in fs)
    r_ok = all(abs(b / a - 1) <= 0.1 for a, b in zip(ratios, ratios[1:]))
    meas = {"eps": float(beta.epsilon), "target": target, "F": fs, "ratios": ratios}
    return [Criterion("8", f"positive free energy at R={r}", f_ok and r_ok, meas,
                      f"eps={float(beta.epsilon):.6f}, -f(pi/R)={target:.5f}, F_N=" + ", ".join(f"{f:.5f}" for f in fs)
                      + ", |Z|/Z_Re=" + ", ".join(f"{x:.4f}" for x in ratios))]


@_timed
def suite_inequalities(eps_list=(0.001, 0.01, 0.05), size: int = 100) -> List[Criterion]:
    """Real-axis lower bounds of Re f on size x size grids inside their hypotheses."""
    worst = {"near": math.inf, "far": math.inf, "cosh": math.inf}
    for eps in eps_list:
        lo, hi = near_origin_window(eps)
        us = np.linspace(0, math.sqrt(8 * eps), size)
        for r in np.linspace(lo, hi, size):
            worst["near"] = min(worst["near"], float(near_origin_margins(eps, r, us).min()))
        uf = np.linspace(math.sqrt(8 * eps), 10, size)
        for r in np.linspace(0, 10, size):
            worst["far"] = min(worst["far"], float(far_field_margins(eps, r, uf).min()))
    for eps in np.linspace(1e-3, 1 / 9 - 1e-9, size):
        tmin = (1 + eps) * math.sqrt(8 * eps)
        worst["cosh"] = min(worst["cosh"], float(cosh_bound_margins(eps, np.linspace(tmin, tmin + 20, size)).min()))
    ok = all(v >= 0 for v in worst.values())
    return [Criterion("9", "real-axis inequality suites", ok, {"min_margins": worst},
                      "min margins " + ", ".join(f"{k}={v:.3g}" for k, v in worst.items()))]


@_timed
def suite_conjecture(rs=(5.0, 10.0, 20.0), ns=(100, 200, 400), half_width: float = 0.025,
                     points: int = 11) -> List[Criterion]:
    """Extrapolated F across the conjectured boundary along fixed R."""
    out = []
    for r in rs:
        e0 = conjectured_eps0(r)
        grid = np.linspace(max(e0 - half_width, -0.99), e0 + half_width, points)
        fs = [scan_point(complex(1 + e, r), list(ns)).f_extrap for e in grid]
        cross = None
        for j in range(1, len(grid)):
            if fs[j - 1] is not None and fs[j] is not None and fs[j - 1] <= PHASE_THRESHOLD < fs[j]:
                cross = float(grid[j])
                break
        ok = cross is not None and all(f is not None and f <= PHASE_THRESHOLD for f in fs[:1]) \
            and all(f is not None and f > PHASE_THRESHOLD for f in fs[-1:])
        out.append(Criterion("10", f"conjecture probe R={r}", ok,
                             {"eps0": e0, "eps_grid": grid.tolist(), "F_extrap": fs, "crossing": cross},
                             f"eps0={e0:.5f}, F_extrap in [{min(fs):.4f}, {max(fs):.4f}] over eps0+-{half_width}"
                             + ("" if cross is None else f", crosses 0.01 at eps={cross:.4f}")))
    return out


SUITES: Dict[str, Callable[[], List[Criterion]]] = {
    "oracle": suite_oracle,
    "prop21": suite_prop21,
    "thm1": suite_thm1,
    "thm3": suite_thm3,
    "claim-crit-curve": suite_claim_crit_curve,
    "cor1": suite_cor1,
    "cor2": suite_cor2,
    "thm2": suite_thm2,
    "inequalities": suite_inequalities,
    "conjecture": suite_conjecture,
}


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return str(x)


def write_report(name: str, criteria: List[Criterion], out_dir) -> Path:
    path = Path(out_dir) / f"{name}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"suite": name, "passed": all(c.passed for c in criteria if not c.supplementary),
           "criteria": [asdict(c) for c in criteria]}
    path.write_text(json.dumps(doc, indent=2, default=_jsonable, sort_keys=True) + "\n")
    return path


def run_suite(name: str, out_dir=None) -> List[Criterion]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    crits = SUITES[name]()
    if out_dir is not None:
        write_report(name, crits, out_dir)
    return crits

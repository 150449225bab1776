"""Phase-diagram scans of the finite-N free energy (1/N) log|Z|."""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import NumericalError
from .model import free_energy_estimate
from .numerics import Precision

PHASE_THRESHOLD = 0.01


@dataclass
class ScanConfig:
    re_range: Tuple[float, float]
    im_range: Tuple[float, float]
    resolution: Tuple[int, int]
    n_list: Sequence[int]
    precision_override: Optional[int] = None
    threads: int = 1
    output_dir: Optional[str] = None

    def __post_init__(self):
        if min(self.resolution) < 2:
            raise ValueError("resolution must be >= 2 per axis")
        ns = list(self.n_list)
        if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("n_list must be nonempty and strictly ascending")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def points(self) -> List[complex]:
        xs = np.linspace(self.re_range[0], self.re_range[1], self.resolution[0])
        ys = np.linspace(self.im_range[0], self.im_range[1], self.resolution[1])
        return [complex(float(x), float(y)) for y in ys for x in xs]


@dataclass
class ScanPoint:
    beta: complex
    f_by_n: List[Optional[float]]
    f_extrap: Optional[float]
    label: str  # zero | positive | flagged
    note: str = ""


@dataclass
class ScanResult:
    config: ScanConfig
    points: List[ScanPoint] = field(default_factory=list)

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["re", "im"] + [f"F_{n}" for n in self.config.n_list] + ["F_extrap", "label", "note"])
            for p in self.points:
                w.writerow([_num(p.beta.real), _num(p.beta.imag)] + [_num(v) for v in p.f_by_n]
                           + [_num(p.f_extrap), p.label, p.note])
        return path


def _num(x, digits: int = 12) -> str:
    return "" if x is None else f"{x:.{digits}e}"


def extrapolate(ns: Sequence[int], values: Sequence[float]) -> float:
    """Least-squares fit of F_n = F + b/n; returns F (plain value for a single n)."""
    if len(ns) == 1:
        return float(values[0])
    a = np.column_stack([np.ones(len(ns)), 1.0 / np.asarray(ns, dtype=float)])
    coef, *_ = np.linalg.lstsq(a, np.asarray(values, dtype=float), rcond=None)
    return float(coef[0])


def classify(f: float, threshold: float = PHASE_THRESHOLD) -> str:
    return "zero" if abs(f) <= threshold else "positive"


def scan_point(beta: complex, n_list: Sequence[int], precision_override: Optional[int] = None) -> ScanPoint:
    vals: List[Optional[float]] = []
    for n in n_list:
        prec = None
        if precision_override is not None:
            prec = Precision(precision_override)
        try:
            vals.append(free_energy_estimate(beta, n, prec))
        except NumericalError as exc:
            vals.append(None)
            return ScanPoint(beta, vals + [None] * (len(n_list) - len(vals)), None, "flagged", str(exc))
    f = extrapolate(n_list, vals)
    return ScanPoint(beta, vals, f, classify(f))


def _work(args):
    beta, n_list, prec = args
    return scan_point(beta, n_list, prec)


def scan(config: ScanConfig) -> ScanResult:
    """Free energy on the grid for every n, extrapolated and labelled.

    Results come back in grid order whatever the worker count.
    """
    jobs = [(b, list(config.n_list), config.precision_override) for b in config.points()]
    if config.threads == 1:
        pts = [_work(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            pts = list(pool.map(_work, jobs, chunksize=max(1, len(jobs) // (4 * config.threads))))
    result = ScanResult(config, pts)
    if config.output_dir:
        result.write_csv(Path(config.output_dir) / "scan.csv")
    return result

"""Figures: matplotlib PNGs plus gnuplot scripts that read the same CSV files.

Two figures are produced: a phase diagram (extrapolated free energy with the
three curves overlaid) and a zero scatter with the critical curve.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .export import read_csv  # noqa: E402

CURVE_STYLE = {"gamma": "k-", "theorem2": "r--", "conjectured": "b-."}


def _curve_xy(rows, mirror=True):
    x = [1 + float(r["eps"]) for r in rows]
    y = [float(r["r"]) for r in rows]
    if mirror:
        x, y = x + [np.nan] + x, y + [np.nan] + [-v for v in y]
    return x, y


def _scan_grid(rows):
    re = sorted({float(r["re"]) for r in rows})
    im = sorted({float(r["im"]) for r in rows})
    grid = np.full((len(im), len(re)), np.nan)
    ix = {v: i for i, v in enumerate(re)}
    iy = {v: i for i, v in enumerate(im)}
    for r in rows:
        if r["F_extrap"]:
            grid[iy[float(r["im"])], ix[float(r["re"])]] = float(r["F_extrap"])
    return re, im, grid


def phase_diagram_png(scan_csv: Optional[Path], curve_csvs: Sequence[Path], out: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 5))
    if scan_csv is not None:
        re, im, grid = _scan_grid(read_csv(scan_csv))
        mesh = ax.pcolormesh(re, im, grid, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label="extrapolated F")
    for path in curve_csvs:
        rows = read_csv(path)
        if not rows:
            continue
        kind = rows[0]["kind"]
        x, y = _curve_xy(rows)
        ax.plot(x, y, CURVE_STYLE.get(kind, "w-"), label=kind)
    ax.set_xlabel("Re beta")
    ax.set_ylabel("Im beta")
    if curve_csvs:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def zeros_png(zero_csvs: Sequence[Path], curve_csvs: Sequence[Path], out: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    for path in zero_csvs:
        rows = read_csv(path)
        xs = [float(r["re"]) for r in rows]
        ys = [float(r["im"]) for r in rows]
        label = f"{rows[0]['source']} N={rows[0]['n']}" if rows else Path(path).stem
        ax.plot(xs, ys, "o", ms=3, label=label)
    for path in curve_csvs:
        rows = read_csv(path)
        if rows:
            x, y = _curve_xy(rows)
            ax.plot(x, y, CURVE_STYLE.get(rows[0]["kind"], "k-"), lw=0.8, label=rows[0]["kind"])
    ax.set_xlabel("Re beta")
    ax.set_ylabel("Im beta")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def _gp_curve_lines(curve_csvs: Sequence[Path]) -> List[str]:
    parts = []
    for path in curve_csvs:
        name = Path(path).name
        parts.append(f"'{name}' skip 1 using (1+$1):2 with lines title '{Path(path).stem}'")
        parts.append(f"'{name}' skip 1 using (1+$1):(-$2) with lines notitle")
    return parts


def phase_diagram_gp(scan_csv: Optional[Path], curve_csvs: Sequence[Path], out: Path) -> Path:
    lines = [
        "set datafile separator ','",
        "set terminal pngcairo size 800,640",
        "set output 'phase_diagram_gnuplot.png'",
        "set xlabel 'Re beta'",
        "set ylabel 'Im beta'",
    ]
    plots = []
    if scan_csv is not None:
        rows = read_csv(scan_csv)
        ncol = len(rows[0]) if rows else 0
        fcol = max(ncol - 2, 3)  # F_extrap sits before label and note
        lines.append("set view map")
        plots.append(f"'{Path(scan_csv).name}' skip 1 using 1:2:{fcol} with points pt 5 ps 1 palette title 'F'")
    plots += _gp_curve_lines(curve_csvs)
    if plots:
        lines.append("plot " + ", \\\n     ".join(plots))
    out.write_text("\n".join(lines) + "\n")
    return out


def zeros_gp(zero_csvs: Sequence[Path], curve_csvs: Sequence[Path], out: Path) -> Path:
    lines = [
        "set datafile separator ','",
        "set terminal pngcairo size 640,640",
        "set output 'zeros_gnuplot.png'",
        "set xlabel 'Re beta'",
        "set ylabel 'Im beta'",
        "set size square",
    ]
    plots = [f"'{Path(p).name}' skip 1 using 1:2 with points pt 7 ps 0.6 title '{Path(p).stem}'"
             for p in zero_csvs]
    plots += _gp_curve_lines(curve_csvs)
    if plots:
        lines.append("plot " + ", \\\n     ".join(plots))
    out.write_text("\n".join(lines) + "\n")
    return out


def emit_plots(out_dir, scan_csv=None, curve_csvs=(), zero_csvs=()) -> Dict[str, Path]:
    """Write gnuplot scripts and PNGs into out_dir; inputs must exist.

    Data files are expected next to the scripts (scripts reference them by
    file name), so inputs outside out_dir are copied in.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    inputs = [p for p in [scan_csv, *curve_csvs, *zero_csvs] if p is not None]
    for p in inputs:
        if not Path(p).is_file():
            raise FileNotFoundError(f"missing input file: {p}")

    def local(p):
        p = Path(p)
        dest = out_dir / p.name
        if p.resolve() != dest.resolve():
            dest.write_bytes(p.read_bytes())
        return dest

    scan_local = local(scan_csv) if scan_csv is not None else None
    curves = [local(p) for p in curve_csvs]
    zeros = [local(p) for p in zero_csvs]
    written = {}
    if scan_local is not None or curves:
        written["phase_diagram.gp"] = phase_diagram_gp(scan_local, curves, out_dir / "phase_diagram.gp")
        written["phase_diagram.png"] = phase_diagram_png(scan_local, curves, out_dir / "phase_diagram.png")
    if zero_csvs or not (scan_local is not None or curves):
        written["zeros.gp"] = zeros_gp(zeros, curves, out_dir / "zeros.gp")
        written["zeros.png"] = zeros_png(zeros, curves, out_dir / "zeros.png")
    return written

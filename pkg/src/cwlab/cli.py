"""Command-line front end.

Global options (--digits, --threads, --out, --config) and the common --n and
--beta flags may appear before or after the subcommand.  A config file holds
``key = value`` lines named after the long flags (dashes or underscores);
command-line flags win over file values.

Exit codes: 0 success, 1 numerical failure (or a failed reproduction
criterion), 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import export
from .critical import conjectured_curve, theorem2_curve, trace_gamma
from .errors import NumericalError
from .model import z_binomial, z_enumerate
from .numerics import Precision, fmt
from .quadrature import z_integral_f, z_integral_h
from .saddle import SADDLE_RADIUS, find_u_beta
from .scan import ScanConfig, scan

DEFAULTS = {"digits": None, "threads": 1, "out": None, "n": None, "beta": None}
PRINT_DIGITS = 20
COMMAND_DEFAULTS: dict = {}

log = logging.getLogger("cwlab")


class UsageError(Exception):
    pass


def parse_pair(text, kind=float):
    parts = [p for p in str(text).replace(" ", "").split(",") if p != ""]
    if len(parts) == 1 and kind is float:
        parts.append("0")
    if len(parts) != 2:
        raise UsageError(f"expected two comma-separated values, got {text!r}")
    try:
        return kind(parts[0]), kind(parts[1])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_list(text, kind=float):
    try:
        return [kind(p) for p in str(text).split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def read_config(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    out = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _common(parser):
    g = parser.add_argument_group("common options")
    g.add_argument("--n", type=int, default=argparse.SUPPRESS, help="spin count N")
    g.add_argument("--beta", default=argparse.SUPPRESS, help="inverse temperature as re,im")
    g.add_argument("--digits", type=int, default=argparse.SUPPRESS, help="working precision override (decimal digits)")
    g.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker processes")
    g.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    g.add_argument("--config", default=argparse.SUPPRESS, help="key = value config file")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cwlab", description="Curie-Weiss model at complex inverse temperature.")
    _common(p)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("z-exact", help="Z by the binomial sum (or brute-force enumeration)")
    _common(s)
    s.add_argument("--method", choices=["binomial", "enumerate"], default="binomial")

    s = sub.add_parser("z-integral", help="Z by the integral representation")
    _common(s)
    s.add_argument("--form", choices=["f", "h"], default="f")
    s.add_argument("--requested-digits", type=int, default=12)

    s = sub.add_parser("saddle", help="saddle u_beta, h_beta(u_beta) and xi(beta)")
    _common(s)
    s.add_argument("--radius", type=float, default=SADDLE_RADIUS)

    s = sub.add_parser("curve", help="trace a critical curve")
    _common(s)
    s.add_argument("kind", choices=["gamma", "theorem2", "conjectured"])
    s.add_argument("--eps-max", type=float, default=0.05)
    s.add_argument("--step", type=float, default=0.0025)
    s.add_argument("--r-list", default=None, help="comma-separated R values")
    s.add_argument("--r-range", default=None, help="rmin,rmax (used with --count)")
    s.add_argument("--count", type=int, default=40)

    s = sub.add_parser("zeros", help="zeros of Psi_N or of Z in an annulus around beta = 1")
    _common(s)
    s.add_argument("source", choices=["psi", "exact", "match"])
    s.add_argument("--annulus", default="0.02,0.08", help="delta,c_max")
    s.add_argument("--radius", type=float, default=SADDLE_RADIUS, help="saddle neighbourhood radius")

    s = sub.add_parser("measure", help="zero-counting measure against the limit on Gamma")
    _common(s)
    s.add_argument("--annulus", default="0.02,0.08")
    s.add_argument("--radius", type=float, default=SADDLE_RADIUS)

    s = sub.add_parser("scan", help="free-energy scan on a grid")
    _common(s)
    s.add_argument("--re", dest="re_range", default="0.5,2.0")
    s.add_argument("--im", dest="im_range", default="-2.0,2.0")
    s.add_argument("--res", default="16,16", help="nx,ny")
    s.add_argument("--n-list", default="100,200")

    s = sub.add_parser("reproduce", help="run a reproduction suite and write a JSON report")
    _common(s)
    s.add_argument("suite")

    s = sub.add_parser("plot", help="gnuplot scripts and PNG figures from result files")
    _common(s)
    s.add_argument("--scan", dest="scan_csv", default=None)
    s.add_argument("--curves", default="", help="comma-separated curve CSV files")
    s.add_argument("--zeros", dest="zero_csvs", default="", help="comma-separated zero CSV files")
    _hoist_defaults(sub)
    return p


def _hoist_defaults(sub):
    """Move option defaults out of argparse so config values can sit between them and the flags."""
    for name, sp in sub.choices.items():
        defaults = {}
        for action in sp._actions:
            if action.option_strings and action.dest != "help" and action.default is not argparse.SUPPRESS:
                defaults[action.dest] = action.default
                action.default = argparse.SUPPRESS
        COMMAND_DEFAULTS[name] = defaults


def resolve(args) -> dict:
    """Defaults, then config file, then command-line flags."""
    opts = dict(DEFAULTS)
    given = vars(args)
    opts.update(COMMAND_DEFAULTS.get(given.get("command"), {}))
    if "config" in given:
        for key, value in read_config(given["config"]).items():
            opts[key] = value
    for key, value in given.items():
        if key != "config":
            opts[key] = value
    for key in ("digits", "threads", "n", "count", "requested_digits"):
        if opts.get(key) is not None:
            try:
                opts[key] = int(opts[key])
            except (TypeError, ValueError):
                raise UsageError(f"--{key} must be an integer") from None
    for key in ("radius", "eps_max", "step"):
        if opts.get(key) is not None:
            opts[key] = float(opts[key])
    if opts["threads"] < 1:
        raise UsageError("--threads must be >= 1")
    return opts


def _need(opts, key):
    if opts.get(key) is None:
        raise UsageError(f"--{key} is required for this command")
    return opts[key]


def _beta(opts) -> complex:
    re, im = parse_pair(_need(opts, "beta"))
    return complex(re, im)


def _precision(opts):
    return Precision(opts["digits"]) if opts.get("digits") else None


def _out(opts) -> Path:
    out = Path(opts["out"] or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit(rows, digits=PRINT_DIGITS):
    """Tab-delimited key/value lines with an explicit digit count."""
    print(f"digits\t{digits}")
    for key, value in rows:
        if isinstance(value, (int, str)):
            print(f"{key}\t{value}")
        elif isinstance(value, complex):
            print(f"{key}\t{value.real:.{digits - 1}e}\t{value.imag:.{digits - 1}e}")
        elif isinstance(value, float):
            print(f"{key}\t{value:.{digits - 1}e}")
        else:
            # mpc / mpfr
            if hasattr(value, "imag"):
                print(f"{key}\t{fmt(value.real, digits)}\t{fmt(value.imag, digits)}")
            else:
                print(f"{key}\t{fmt(value, digits)}")


def cmd_z_exact(opts):
    b, n = _beta(opts), _need(opts, "n")
    fn = z_enumerate if opts.get("method") == "enumerate" else z_binomial
    z = fn(b, n, _precision(opts))
    _emit([("method", z.method), ("n", n), ("precision_digits", z.precision_used.decimal_digits), ("Z", z.value)])
    return 0


def cmd_z_integral(opts):
    b, n = _beta(opts), _need(opts, "n")
    fn = z_integral_h if opts.get("form") == "h" else z_integral_f
    q = fn(b, n, requested_digits=opts.get("requested_digits", 12), precision=_precision(opts))
    _emit([("form", q.form), ("n", n), ("panels", q.panels), ("truncation", q.truncation),
           ("est_rel_error", q.est_error), ("Z", q.value)])
    return 0


def cmd_saddle(opts):
    b = _beta(opts)
    d = find_u_beta(b, opts.get("digits") or None, opts.get("radius", SADDLE_RADIUS))
    _emit([("u_beta", d.u_beta), ("h_at_saddle", d.h_at_saddle), ("xi", d.xi),
           ("disc_radius", d.disc_radius), ("residual", d.residual)])
    return 0


def _r_grid(opts, default):
    if opts.get("r_list"):
        return parse_list(opts["r_list"])
    if opts.get("r_range"):
        lo, hi = parse_pair(opts["r_range"])
        return list(np.linspace(lo, hi, opts.get("count", 40)))
    return default


def cmd_curve(opts):
    kind = opts["kind"]
    if kind == "gamma":
        curve = trace_gamma(opts.get("eps_max", 0.05), opts.get("step", 0.0025))
    elif kind == "theorem2":
        curve = theorem2_curve(_r_grid(opts, list(np.linspace(3.3, 20, 40))))
    else:
        curve = conjectured_curve(_r_grid(opts, list(np.geomspace(0.01, 20, 30))))
    out = _out(opts)
    csv_path = export.curve_to_csv(curve, out / f"curve_{kind}.csv")
    export.curve_to_json(curve, out / f"curve_{kind}.json")
    from .plotting import phase_diagram_png
    png = phase_diagram_png(None, [csv_path], out / f"curve_{kind}.png")
    print(f"digits\t{PRINT_DIGITS}")
    print("eps\tr\tim_h")
    for p in curve.points:
        print(f"{p.eps:.{PRINT_DIGITS - 1}e}\t{p.r:.{PRINT_DIGITS - 1}e}\t{p.im_h:.{PRINT_DIGITS - 1}e}")
    for f in curve.failures:
        print(f"# failed R={f['r']}: {f['error']}")
    print(f"# wrote {csv_path} and {png}")
    return 0


def _annulus(opts):
    from .zeros import Annulus
    d, c = parse_pair(opts.get("annulus", "0.02,0.08"))
    return Annulus(d, c)


def cmd_zeros(opts):
    from .plotting import zeros_png
    from .zeros import match_zeros, psi_zeros, z_zeros

    n = _need(opts, "n")
    ann = _annulus(opts)
    radius = opts.get("radius", SADDLE_RADIUS)
    out = _out(opts)
    sets = []
    if opts["source"] in ("psi", "match"):
        sets.append(psi_zeros(n, ann, radius=radius))
    if opts["source"] in ("exact", "match"):
        sets.append(z_zeros(n, ann, _precision(opts)))
    paths = []
    print(f"digits\t{PRINT_DIGITS}")
    for zs in sets:
        tag = "psi" if zs.source == "psi" else "exact"
        paths.append(export.zeros_to_csv(zs, out / f"zeros_{tag}_{n}.csv"))
        export.zeros_to_json(zs, out / f"zeros_{tag}_{n}.json")
        print(f"# source={zs.source} n={n} count={len(zs.zeros)} unresolved={len(zs.unresolved)}")
        for z, r in zip(zs.zeros, zs.residuals):
            print(f"{fmt(z.real, PRINT_DIGITS)}\t{fmt(z.imag, PRINT_DIGITS)}\t{r:.3e}")
    if opts["source"] == "match":
        rep = match_zeros(sets[1], sets[0])
        export.match_to_json(rep, out / f"match_{n}.json")
        print(f"max_scaled_distance\t{rep.max_scaled_distance:.{PRINT_DIGITS - 1}e}")
        print(f"pairs\t{len(rep.pairs)}\tunmatched\t{len(rep.unmatched_a)}\t{len(rep.unmatched_b)}")
    png = zeros_png(paths, [], out / f"zeros_{opts['source']}_{n}.png")
    print(f"# wrote {png}")
    unresolved = sum(len(zs.unresolved) for zs in sets)
    return 1 if unresolved else 0


def cmd_measure(opts):
    from .zeros import TEST_FUNCTIONS, build_measures, gamma_for_annulus, z_zeros

    n = _need(opts, "n")
    ann = _annulus(opts)
    radius = opts.get("radius", SADDLE_RADIUS)
    zs = z_zeros(n, ann, _precision(opts))
    mp = build_measures(zs, gamma_for_annulus(ann, radius=radius))
    rows = [("n", n), ("zero_count", len(zs.zeros)), ("mass_mu_n", mp.mass_n), ("mass_mu", mp.mass_limit)]
    for name, f in TEST_FUNCTIONS.items():
        a, b = mp.integrate(f)
        rows.append((f"discrepancy_{name}", abs(a - b)))
    _emit(rows)
    return 0


def cmd_scan(opts):
    out = _out(opts)
    nx, ny = parse_pair(opts.get("res", "16,16"), int)
    cfg = ScanConfig(parse_pair(opts.get("re_range")), parse_pair(opts.get("im_range")), (nx, ny),
                     parse_list(opts.get("n_list", "100,200"), int), opts.get("digits"),
                     opts["threads"], str(out))
    res = scan(cfg)
    from .plotting import phase_diagram_png
    png = phase_diagram_png(out / "scan.csv", [], out / "scan.png")
    flagged = sum(p.label == "flagged" for p in res.points)
    positive = sum(p.label == "positive" for p in res.points)
    print("digits\t12")
    print(f"points\t{len(res.points)}\tpositive\t{positive}\tflagged\t{flagged}")
    print(f"# wrote {out / 'scan.csv'} and {png}")
    return 0


def cmd_reproduce(opts):
    from .reproduce import SUITES, run_suite

    name = opts["suite"]
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    out = _out(opts)
    failed = False
    for n in names:
        crits = run_suite(n, out)
        for c in crits:
            print(c.line())
            failed |= not (c.passed or c.supplementary)
        print(f"# wrote {out / (n + '.json')}")
    return 1 if failed else 0


def cmd_plot(opts):
    from .plotting import emit_plots

    curves = [Path(p) for p in parse_list(opts.get("curves", ""), str)]
    zeros = [Path(p) for p in parse_list(opts.get("zero_csvs", ""), str)]
    scan_csv = Path(opts["scan_csv"]) if opts.get("scan_csv") else None
    written = emit_plots(_out(opts), scan_csv, curves, zeros)
    for name, path in written.items():
        print(f"# wrote {path}")
    return 0


COMMANDS = {
    "z-exact": cmd_z_exact,
    "z-integral": cmd_z_integral,
    "saddle": cmd_saddle,
    "curve": cmd_curve,
    "zeros": cmd_zeros,
    "measure": cmd_measure,
    "scan": cmd_scan,
    "reproduce": cmd_reproduce,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        opts = resolve(args)
        return COMMANDS[args.command](opts)
    except (UsageError, FileNotFoundError) as exc:
        print(f"cwlab: error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ValueError) as exc:
        if isinstance(exc, NumericalError):
            print(f"cwlab: numerical failure: {exc}", file=sys.stderr)
            return 1
        print(f"cwlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line tables for the planar pair-scattering model.

Examples:
  planarpair phase-shifts --lambda 0..5 --k 0.2..5:log:20
  planarpair oracle-verify --lambda 0..3 --k 0.5,1,2 --tol 1e-6
  planarpair classical-mc --k 1 --bmax 5 --n 100000 --seed 7 --output mc.csv

Grids are written as "a..b" (unit steps), "a..b:lin:N", "a..b:log:N" or a
comma list.  ``--config FILE`` reads flat ``key = value`` lines whose keys are
the long option names; flags given on the command line take precedence.
Exit status: 0 ok, 1 invalid input, 2 computation error, 3 verification FAIL.
"""

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import classical, monopole, scatter
from .errors import ConfigParseError, PlanarPairError

EXIT_OK, EXIT_INVALID, EXIT_COMPUTE, EXIT_FAIL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- parsing helpers ----------------------------------------------------------

def parse_grid(text, integer=False):
    """Parse a grid expression into a list of numbers (see module docstring)."""
    text = str(text).strip()
    if not text:
        raise ConfigParseError("empty grid")
    try:
        if ".." in text:
            bounds, _, tail = text.partition(":")
            lo_s, hi_s = bounds.split("..")
            lo, hi = float(lo_s), float(hi_s)
            if lo > hi:
                raise ConfigParseError(f"grid {text!r}: min exceeds max")
            if tail:
                spacing, _, count = tail.partition(":")
                n = int(count)
                if n < 1:
                    raise ConfigParseError(f"grid {text!r}: count must be >= 1")
                if spacing == "lin":
                    vals = np.linspace(lo, hi, n)
                elif spacing == "log":
                    if lo <= 0:
                        raise ConfigParseError(f"grid {text!r}: log spacing needs min > 0")
                    vals = np.geomspace(lo, hi, n)
                else:
                    raise ConfigParseError(f"grid {text!r}: spacing must be lin or log")
                vals = [float(v) for v in vals]
            else:
                vals = [lo + i for i in range(int(math.floor(hi - lo + 1e-9)) + 1)]
        else:
            vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigParseError(f"cannot parse grid {text!r}: {exc}") from None
    if integer:
        if any(v != int(v) for v in vals):
            raise ConfigParseError(f"grid {text!r} must contain integers")
        vals = [int(v) for v in vals]
    return vals


def read_config(path):
    """Flat ``key = value`` file; '#' starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigParseError(f"{path}: {exc.strerror}") from None
    out = {}
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lstrip("-").replace("_", "-")
        if not sep or not key:
            raise ConfigParseError(f"{path}:{no}: expected 'key = value', got {raw.strip()!r}")
        out[key] = value.strip()
    return out


def fmt(value):
    """Shortest round-trip text for a table cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(columns, rows, path=None, form="csv"):
    if form == "json":
        records = [{c: (None if v is None else (v.item() if isinstance(v, np.generic) else v))
                    for c, v in zip(columns, row)} for row in rows]
        text = json.dumps(records, indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])
        text = buf.getvalue()
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _ordered_map(func, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, items))
    return [func(it) for it in items]


def _status(exc):
    return f"error: {type(exc).__name__}: {exc}"


# -- row workers (module level so they pickle) ----------------------------------

def _oracle_row(item):
    lam, k, tol = item
    analytic = scatter.phase_shift(lam, k)
    try:
        oracle = scatter.radial_oracle(lam, k)
    except PlanarPairError as exc:
        return [lam, k, analytic, None, None, _status(exc)]
    diff = scatter._mod_pi_distance(analytic, oracle)
    return [lam, k, analytic, oracle, diff, "PASS" if diff < tol else "FAIL"]


def _deflection_row(item):
    k, chi, tol = item
    try:
        b = classical.impact_from_angle(chi, k)
        tr = classical.integrate_trajectory(b, k, tol)
    except PlanarPairError as exc:
        return [k, chi, None, None, None, None, None, _status(exc)]
    d_e, _, d_a = tr.drifts()
    return [k, chi, b, tr.chi, abs(tr.chi - chi), d_e, d_a, "ok"]


# -- commands -----------------------------------------------------------------

def cmd_phase_shifts(args):
    lams = parse_grid(args.helicity, integer=True)
    ks = parse_grid(args.k)
    table = scatter.PhaseShiftTable.compute(lams, ks)
    cols = ["helicity", "k_per_bohr", "delta_rad"]
    return cols, [list(r) for r in table.rows()], EXIT_OK


def _amplitude_rows(args, with_cross_section):
    ks = parse_grid(args.k)
    phis = parse_grid(args.phi)
    rows, code = [], EXIT_OK
    for k in ks:
        series = scatter.AmplitudeSeries(args.spin, k, args.nmax, args.reduction,
                                         args.right_handed_only)
        for phi in phis:
            try:
                f = series(phi)
            except PlanarPairError as exc:
                rows.append([args.spin, k, phi, None, None, None] + ([None] if with_cross_section else [])
                            + [_status(exc)])
                code = EXIT_COMPUTE
                continue
            row = [args.spin, k, phi, f.real, f.imag, abs(f)]
            if with_cross_section:
                row.append(abs(f) ** 4)
            rows.append(row + ["ok"])
    cols = ["spin", "k_per_bohr", "phi_rad", "re_f_sqrt_bohr", "im_f_sqrt_bohr", "abs_f_sqrt_bohr"]
    if with_cross_section:
        cols.append("dsigma_domega_bohr2_per_sr")
    return cols + ["status"], rows, code


def cmd_amplitude(args):
    return _amplitude_rows(args, False)


def cmd_cross_section(args):
    return _amplitude_rows(args, True)


def cmd_classical_deflection(args):
    items = [(k, chi, args.int_tol) for k in parse_grid(args.k) for chi in parse_grid(args.chi)]
    rows = _ordered_map(_deflection_row, items, args.jobs)
    cols = ["k_per_bohr", "chi_target_rad", "b_bohr", "chi_rad", "abs_error_rad",
            "energy_drift_rel", "lrl_drift_rel", "status"]
    code = EXIT_COMPUTE if any(r[-1] != "ok" for r in rows) else EXIT_OK
    return cols, rows, code


def cmd_classical_mc(args):
    hist = classical.mc_cross_section(args.k, args.bmax, args.n, args.bins, args.seed, args.jobs)
    ref = hist.reference()
    rows = [[lo, hi, int(c), d, s, r, hist.n_failed]
            for lo, hi, c, d, s, r in zip(hist.edges[:-1], hist.edges[1:], hist.counts,
                                          hist.dsdo, hist.stderr, ref)]
    cols = ["chi_lo_rad", "chi_hi_rad", "count", "dsigma_domega_bohr2_per_sr",
            "stderr_bohr2_per_sr", "rutherford_bin_bohr2_per_sr", "n_failed"]
    return cols, rows, EXIT_OK


def cmd_monopole_table(args):
    theta, phi = args.theta, args.azimuth
    rows = []
    for h in parse_grid(args.helicity):
        for l in parse_grid(args.l):
            if l < abs(h) or abs((l - abs(h)) - round(l - abs(h))) > 1e-12:
                continue
            for i in range(int(round(2 * l)) + 1):
                m = -l + i
                state = monopole.MonopoleState(l, m, h)
                l2y, y = monopole.l_squared_fd(state, theta, phi)
                lzy, _ = monopole.lz_fd(state, theta, phi)
                rows.append([l, m, h, monopole.normalization(l, m, h), l * (l + 1),
                             (l2y / y).real, (lzy / y).real])
    cols = ["l", "m", "helicity", "normalization", "l2_exact", "l2_fd", "lz_fd"]
    return cols, rows, EXIT_OK


def cmd_oracle_verify(args):
    items = [(lam, k, args.tol) for lam in parse_grid(args.helicity, integer=True)
             for k in parse_grid(args.k)]
    rows = _ordered_map(_oracle_row, items, args.jobs)
    cols = ["helicity", "k_per_bohr", "delta_analytic_rad", "delta_oracle_rad",
            "abs_diff_mod_pi_rad", "status"]
    if any(r[-1].startswith("error") for r in rows):
        return cols, rows, EXIT_COMPUTE
    return cols, rows, EXIT_FAIL if any(r[-1] == "FAIL" for r in rows) else EXIT_OK


COMMANDS = {
    "phase-shifts": cmd_phase_shifts,
    "amplitude": cmd_amplitude,
    "cross-section": cmd_cross_section,
    "classical-deflection": cmd_classical_deflection,
    "classical-mc": cmd_classical_mc,
    "monopole-table": cmd_monopole_table,
    "oracle-verify": cmd_oracle_verify,
}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value file; CLI flags win")
    common.add_argument("--output", "-o", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--tol", type=float, help="PASS threshold for oracle-verify (default 1e-6)")
    common.add_argument("--seed", type=int, help="RNG seed for Monte-Carlo (default 0)")
    common.add_argument("--jobs", type=int, help="worker processes (default 1)")

    ap = _Parser(prog="planarpair", description=__doc__.split("\n")[0], parents=[common])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    p = add("phase-shifts", "Coulomb phase shifts on a (helicity, k) grid")
    p.add_argument("--lambda", dest="helicity")
    p.add_argument("--k")

    for name, text in (("amplitude", "Bloch scattering amplitude f_S(k, phi)"),
                       ("cross-section", "differential cross section |f|^4")):
        p = add(name, text)
        p.add_argument("--spin", type=int, choices=(0, 1))
        p.add_argument("--k")
        p.add_argument("--phi")
        p.add_argument("--nmax", type=int)
        p.add_argument("--reduction", type=int)
        p.add_argument("--right-handed-only", action="store_true", default=None)

    p = add("classical-deflection", "integrate trajectories from b(chi) and report recovered chi")
    p.add_argument("--k")
    p.add_argument("--chi")
    p.add_argument("--int-tol", type=float)

    p = add("classical-mc", "Monte-Carlo Rutherford cross section")
    p.add_argument("--k", type=float)
    p.add_argument("--bmax", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--bins", type=int)

    p = add("monopole-table", "monopole harmonics with finite-difference eigenvalues")
    p.add_argument("--l")
    p.add_argument("--helicity")
    p.add_argument("--theta", type=float)
    p.add_argument("--azimuth", type=float)

    p = add("oracle-verify", "compare closed-form phase shifts with the radial ODE oracle")
    p.add_argument("--lambda", dest="helicity")
    p.add_argument("--k")
    return ap


DEFAULTS = {
    "format": "csv", "tol": 1e-6, "seed": 0, "jobs": 1,
    "phase-shifts": {"helicity": "0..5", "k": "0.2..5:log:20"},
    "amplitude": {"spin": 0, "k": "1", "phi": "0.3..2.8:lin:11", "nmax": 64,
                  "reduction": scatter.REDUCTION_ORDER, "right_handed_only": False},
    "classical-deflection": {"k": "0.5,1,2", "chi": "0.5235987755982988,1.0471975511965976,"
                             "1.5707963267948966,2.0943951023931953,2.6179938779914944",
                             "int_tol": classical.DEFAULT_TOL},
    "classical-mc": {"k": 1.0, "bmax": 5.0, "n": 100000, "bins": 36},
    "monopole-table": {"l": "0.5..2.5", "helicity": "-0.5,0.5", "theta": 1.1, "azimuth": 0.7},
    "oracle-verify": {"helicity": "0..5", "k": "0.2,0.5,1,2,5"},
}
DEFAULTS["cross-section"] = DEFAULTS["amplitude"]

_CONVERT = {"tol": float, "seed": int, "jobs": int, "spin": int, "nmax": int, "reduction": int,
            "bmax": float, "n": int, "bins": int, "theta": float, "azimuth": float,
            "int_tol": float,
            "right_handed_only": lambda s: s.lower() in ("1", "true", "yes", "on")}


def resolve_args(argv):
    """Parse argv, merge an optional config file and fill defaults."""
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    config = read_config(known.config) if known.config else {}
    argv = list(argv)
    if "command" in config and not any(a in COMMANDS for a in argv):
        argv.insert(0, config.pop("command"))
    config.pop("command", None)
    args = build_parser().parse_args(argv)
    cmd_defaults = DEFAULTS.get(args.command, {})
    for key, value in config.items():
        dest = {"lambda": "helicity"}.get(key, key).replace("-", "_")
        if not hasattr(args, dest):
            raise ConfigParseError(f"unknown config key {key!r} for {args.command}")
        if getattr(args, dest) is None:
            try:
                setattr(args, dest, _CONVERT.get(dest, str)(value))
            except ValueError:
                raise ConfigParseError(f"bad value for {key!r}: {value!r}") from None
    for dest, value in list(DEFAULTS.items()) + list(cmd_defaults.items()):
        if isinstance(value, dict):
            continue
        if getattr(args, dest, None) is None and hasattr(args, dest):
            setattr(args, dest, value)
    if args.jobs < 1:
        raise ConfigParseError("--jobs must be >= 1")
    return args


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = resolve_args(argv)
    except (UsageError, ConfigParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        cols, rows, code = COMMANDS[args.command](args)
    except (ConfigParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (PlanarPairError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    try:
        write_table(cols, rows, args.output, args.format)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    return code


if __name__ == "__main__":
    raise SystemExit(main())

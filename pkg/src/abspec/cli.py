"""Command-line front end: ``abspec spectrum | sweep | verify | green``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .abmodel import ModelParams, NearEigenvalueError, green_closed, green_series
from .extensions import BoundaryCondition, RescaledBC
from .secular import CountMismatchError
from .spectrum import HINF, EigenvalueRecord, full_spectrum, sweep
from .svgplot import line_plot
from .verify import SUITES, run_suites

EXIT_CONFIG = 1
EXIT_MISMATCH = 2
EXIT_VERIFY = 3

JSON_SCHEMA = """\
JSON output (--format json) is one object:
  {
    "config":      {command, alpha, B, bc: {kind: "uvw"|"rescaled"|"inf", ...}, ...},
    "records":     [...],
    "diagnostics": [{"level": "warning"|"error", "message": str}]
  }
records per command:
  spectrum  {"lambda": num, "z": num|null, "source": str, "sources": [str],
             "sectors": [int], "multiplicity": int, "truncated": bool}
  sweep     {"t": num, "branch_id": int, "lambda": num, "sectors": [int]}
  verify    {"suite": str, "name": str, "passed": bool, "measured": num, "tolerance": num,
             "detail": str}
  green     {"m": int, "z": num, "r1": num, "r2": num, "series": [re, im],
             "closed": [re, im], "relative_difference": num}
Numbers are written with 15 significant digits.

exit codes: 0 ok, 1 configuration error, 2 root count mismatch, 3 verification failure
"""


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _num(x: float | None):
    if x is None:
        return None
    return float(f"{x:.15g}")


def _s(x: float | None) -> str:
    return "" if x is None else f"{x:.15g}"


def _pair(text: str, n: int, sep: str, name: str) -> list[float]:
    try:
        parts = [float(v) for v in text.split(sep)]
    except ValueError:
        raise ConfigError(f"{name}: expected {n} numbers separated by '{sep}', got {text!r}") from None
    if len(parts) != n:
        raise ConfigError(f"{name}: expected {n} numbers separated by '{sep}', got {text!r}")
    return parts


def _add_model_args(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, default=0.3, help="flux fraction in ]0,1[ (default 0.3)")
    p.add_argument("--B", type=float, default=1.0, help="field strength > 0 (default 1)")


def _add_bc_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("boundary condition (give one form)")
    g.add_argument("--xi", type=float)
    g.add_argument("--eta", type=float)
    g.add_argument("--zeta", type=float)
    g.add_argument("--u", type=float)
    g.add_argument("--v", type=float)
    g.add_argument("--w", type=complex, help="complex, e.g. 0.1+0.2j")
    g.add_argument("--bc", choices=["inf"], help="the extension with Phi_2(psi) = 0")


def _add_output_args(p: argparse.ArgumentParser, formats):
    p.add_argument("--format", choices=formats, default="csv")
    p.add_argument("--output", "-o", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="abspec",
        description="Spectra of self-adjoint extensions of the Aharonov-Bohm Hamiltonian "
        "in a homogeneous magnetic field.",
        epilog=JSON_SCHEMA,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sp = sub.add_parser("spectrum", help="eigenvalues below --lambda-max",
                        epilog=JSON_SCHEMA, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_model_args(sp)
    _add_bc_args(sp)
    sp.add_argument("--lambda-max", type=float, default=10.0)
    sp.add_argument("--m-cap", type=int, default=10, help="cap on the Landau-level multiplicity")
    _add_output_args(sp, ["csv", "json", "svg"])

    sw = sub.add_parser("sweep", help="critical eigenvalues along a line t*(xi, eta, zeta)",
                        epilog=JSON_SCHEMA, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_model_args(sw)
    sw.add_argument("--dir", required=True, help="direction xi,eta,zeta")
    sw.add_argument("--t", default="-5:5:101", help="lo:hi:n (default -5:5:101)")
    sw.add_argument("--lambda-window", default=None, help="lo:hi (default -6B:12B)")
    _add_output_args(sw, ["csv", "json", "svg"])

    vf = sub.add_parser("verify", help="run self-check suites",
                        epilog=JSON_SCHEMA, formatter_class=argparse.RawDescriptionHelpFormatter)
    vf.add_argument("suite", choices=sorted(SUITES) + ["all"])
    _add_model_args(vf)
    _add_output_args(vf, ["csv", "json"])

    gr = sub.add_parser("green", help="sector Green function: Laguerre sum against closed form",
                        epilog=JSON_SCHEMA, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_model_args(gr)
    gr.add_argument("--m", type=int, required=True)
    gr.add_argument("--z", type=complex, required=True)
    gr.add_argument("--r1", type=float, required=True)
    gr.add_argument("--r2", type=float, required=True)
    gr.add_argument("--n-terms", type=int, default=2000)
    _add_output_args(gr, ["csv", "json"])
    return parser


# -- config ---------------------------------------------------------------------------


def _model(args) -> ModelParams:
    try:
        return ModelParams(args.alpha, args.B)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _boundary(args):
    rescaled = [args.xi, args.eta, args.zeta]
    raw = [args.u, args.v, args.w]
    given = [any(v is not None for v in rescaled), any(v is not None for v in raw), args.bc is not None]
    if sum(given) != 1:
        raise ConfigError("give exactly one of --xi/--eta/--zeta, --u/--v/--w or --bc inf")
    if args.bc == "inf":
        return HINF, {"kind": "inf"}
    if given[0]:
        xi, eta, zeta = (0.0 if v is None else v for v in rescaled)
        if zeta < 0:
            raise ConfigError("--zeta is a modulus and must be >= 0")
        return RescaledBC(xi, eta, zeta), {"kind": "rescaled", "xi": xi, "eta": eta, "zeta": zeta}
    u = 0.0 if args.u is None else args.u
    v = 0.0 if args.v is None else args.v
    w = 0j if args.w is None else args.w
    return BoundaryCondition(u, v, w), {"kind": "uvw", "u": u, "v": v, "w": [w.real, w.imag]}


# -- output -------------------------------------------------------------------------


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(config, records, diagnostics) -> str:
    return json.dumps({"config": config, "records": records, "diagnostics": diagnostics}, indent=2) + "\n"


def _record_json(r: EigenvalueRecord) -> dict:
    return {
        "lambda": _num(r.lam),
        "z": _num(r.z),
        "source": r.source.value,
        "sources": [s.value for s in r.sources],
        "sectors": list(r.sectors),
        "multiplicity": r.multiplicity,
        "truncated": r.truncated,
    }


def _error(kind: str, message: str):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


# -- commands ---------------------------------------------------------------------------


def cmd_spectrum(args) -> int:
    p = _model(args)
    bc, bc_cfg = _boundary(args)
    if not args.lambda_max > p.B:
        raise ConfigError("--lambda-max must exceed B")
    if args.m_cap < 1:
        raise ConfigError("--m-cap must be >= 1")
    config = {"command": "spectrum", "alpha": p.alpha, "B": p.B, "bc": bc_cfg,
              "lambda_max": args.lambda_max, "m_cap": args.m_cap}
    try:
        records = full_spectrum(bc, p, args.lambda_max, args.m_cap)
    except CountMismatchError as exc:
        _error("count_mismatch", str(exc))
        return EXIT_MISMATCH
    if args.format == "csv":
        rows = [[_s(r.lam), _s(r.z), "+".join(s.value for s in r.sources),
                 ";".join(str(m) for m in r.sectors), r.multiplicity] for r in records]
        text = _csv(["lambda", "z", "source", "sectors", "multiplicity"], rows)
    elif args.format == "json":
        diags = []
        if any(r.truncated for r in records):
            diags.append({"level": "warning",
                          "message": f"Landau levels have infinite multiplicity; counted up to m_cap={args.m_cap}"})
        text = _json(config, [_record_json(r) for r in records], diags)
    else:
        lams = [r.lam for r in records]
        lo, hi = min(lams + [0.0]), max(lams + [args.lambda_max])
        series = [[(0.0, r.lam), (1.0, r.lam)] for r in records if r.z is not None]
        text = line_plot(series, (0.0, 1.0), (lo - 0.05 * (hi - lo), hi),
                         hlines=[r.lam for r in records if r.z is None],
                         xlabel="", ylabel="lambda", title="spectrum (dashed: stable sectors)")
    _emit(text, args.output)
    return 0


def _t_range(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--t: expected lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"--t: expected lo:hi:n, got {text!r}") from None
    if n < 2:
        raise ConfigError("--t: n must be >= 2")
    return lo, hi, n


def cmd_sweep(args) -> int:
    p = _model(args)
    direction = tuple(_pair(args.dir, 3, ",", "--dir"))
    t_range = _t_range(args.t)
    if args.lambda_window:
        window = tuple(_pair(args.lambda_window, 2, ":", "--lambda-window"))
    else:
        window = (-6.0 * p.B, 12.0 * p.B)
    if not window[0] < window[1]:
        raise ConfigError("--lambda-window: lo must be below hi")
    table = sweep(direction, t_range, p, window)
    config = {"command": "sweep", "alpha": p.alpha, "B": p.B, "direction": list(direction),
              "t": list(t_range), "lambda_window": list(window)}
    rows = []
    for b in table.branches:
        for i, lam, sec in zip(b.t_index, b.lam, b.sectors):
            rows.append((i, b.branch_id, lam, sec))
    rows.sort(key=lambda r: (r[0], r[1]))
    diags = [{"level": "error", "message": f"t={t:.15g}: {msg}"} for t, msg in table.failures]
    for d in diags:
        sys.stderr.write(d["message"] + "\n")
    if args.format == "csv":
        text = _csv(["t", "branch_id", "lambda"],
                    [[_s(table.t_values[i]), bid, _s(lam)] for i, bid, lam, _ in rows])
    elif args.format == "json":
        recs = [{"t": _num(table.t_values[i]), "branch_id": bid, "lambda": _num(lam), "sectors": list(sec)}
                for i, bid, lam, sec in rows]
        config["stable_levels"] = [_num(v) for v in table.stable_levels]
        text = _json(config, recs, diags)
    else:
        series = [[(table.t_values[i], lam) for i, lam in zip(b.t_index, b.lam)] for b in table.branches]
        title = "(xi, eta, zeta) = t ({:g}, {:g}, {:g}), alpha={:g}, B={:g}".format(*direction, p.alpha, p.B)
        text = line_plot(series, (t_range[0], t_range[1]), window, hlines=table.stable_levels,
                         xlabel="t", ylabel="lambda", title=title)
    _emit(text, args.output)
    return 0


def cmd_verify(args) -> int:
    p = _model(args)
    checks = run_suites([args.suite], alpha=p.alpha, B=p.B)
    if args.format == "json":
        recs = [{"suite": c.suite, "name": c.name, "passed": c.passed, "measured": _num(c.measured),
                 "tolerance": _num(c.tolerance), "detail": c.detail} for c in checks]
        config = {"command": "verify", "suite": args.suite, "alpha": p.alpha, "B": p.B}
        _emit(_json(config, recs, []), args.output)
    else:
        rows = [[c.suite, c.name, "PASS" if c.passed else "FAIL", _s(c.measured), _s(c.tolerance), c.detail]
                for c in checks]
        _emit(_csv(["suite", "check", "status", "measured", "tolerance", "detail"], rows), args.output)
    return 0 if all(c.passed for c in checks) else EXIT_VERIFY


def cmd_green(args) -> int:
    p = _model(args)
    if args.r1 <= 0 or args.r2 <= 0:
        raise ConfigError("--r1 and --r2 must be positive")
    if args.n_terms < 1:
        raise ConfigError("--n-terms must be >= 1")
    try:
        s = green_series(args.m, args.z, args.r1, args.r2, p, args.n_terms)
        c = green_closed(args.m, args.z, args.r1, args.r2, p)
    except NearEigenvalueError as exc:
        raise ConfigError(str(exc)) from None
    rel = abs(s - c) / abs(c) if c != 0 else math.inf
    if args.format == "json":
        rec = {"m": args.m, "z": _num(args.z.real) if args.z.imag == 0 else [_num(args.z.real), _num(args.z.imag)],
               "r1": args.r1, "r2": args.r2, "series": [_num(s.real), _num(s.imag)],
               "closed": [_num(c.real), _num(c.imag)], "relative_difference": _num(rel)}
        config = {"command": "green", "alpha": p.alpha, "B": p.B, "n_terms": args.n_terms}
        _emit(_json(config, [rec], []), args.output)
    else:
        _emit(_csv(["m", "z", "r1", "r2", "series_re", "series_im", "closed_re", "closed_im", "relative_difference"],
                   [[args.m, _s(args.z.real) if args.z.imag == 0 else str(args.z), _s(args.r1), _s(args.r2), _s(s.real), _s(s.imag),
                     _s(c.real), _s(c.imag), _s(rel)]]), args.output)
    return 0


COMMANDS = {"spectrum": cmd_spectrum, "sweep": cmd_sweep, "verify": cmd_verify, "green": cmd_green}


# values of these flags may start with '-' (e.g. "--t -5:5:501")
_DASHED_VALUE_FLAGS = ("--t", "--dir", "--lambda-window", "--z", "--w")


def _join_dashed_values(argv: list[str]) -> list[str]:
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _DASHED_VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_join_dashed_values(list(argv)))
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        _error("config", str(exc))
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

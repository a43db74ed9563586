"""Command line front end.

Every subcommand writes CSV to stdout or to ``--out``.  On failure a single
JSON line ``{"error": <type>, "message": <text>}`` goes to stderr and the exit
status is nonzero (2 for bad input, 1 for numerical failures).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import eom, fcs, harness
from .model import ModelParams

# keys shared by the config file and the flags
_PARAM_FLAGS = {"N": "N", "gamma_s": "gamma_S", "gamma_d": "gamma_D", "ns": "n_S", "nd": "n_D"}
_DEFAULTS = {"N": 1, "gamma_s": 1.0, "gamma_d": 1.0, "ns": 1.0, "nd": 0.0, "order": 4,
             "chi_max": float(np.pi), "workers": 1, "me_cap": harness.ME_CAP}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(json.dumps({"error": "UsageError", "message": message}), file=sys.stderr)
        sys.exit(2)


def _add_common(p, method_choices=None, default_method=None):
    p.add_argument("--config", help="key = value file; flags override its entries")
    p.add_argument("--N", type=int)
    p.add_argument("--gamma-s", dest="gamma_s", type=float)
    p.add_argument("--gamma-d", dest="gamma_d", type=float)
    p.add_argument("--ns", type=float)
    p.add_argument("--nd", type=float)
    p.add_argument("--out", help="output file (default: stdout)")
    if method_choices:
        p.add_argument("--method", choices=method_choices, default=None,
                       help=f"default: {default_method}")
        p.set_defaults(_default_method=default_method)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dickefcs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cumulants", help="stationary current cumulants")
    _add_common(p, ("me", "fd", "approx1", "approx2", "approx3", "n1-analytic"), "me")
    p.add_argument("--order", type=int)

    p = sub.add_parser("cgf-scan", help="long-time CGF rate on a chi grid")
    _add_common(p, ("me", "approx1", "approx2", "approx3", "n1-analytic"), "me")
    p.add_argument("--chi-max", dest="chi_max", type=float)
    p.add_argument("--grid", type=int, default=41, help="number of chi points on [-chi_max, chi_max]")

    p = sub.add_parser("transient", help="ln Z(chi, t) from the stationary state")
    _add_common(p)
    p.add_argument("--chi", type=float, default=1.0)
    p.add_argument("--t", type=float, default=5.0)
    p.add_argument("--grid", type=int, default=101, help="number of time points")

    p = sub.add_parser("distribution", help="counting distribution P(n, t)")
    _add_common(p)
    p.add_argument("--t", type=float, default=5.0)
    p.add_argument("--n-max", dest="n_max", type=int, default=64)

    p = sub.add_parser("sweep", help="cumulants over a one-dimensional parameter grid")
    _add_common(p)
    p.add_argument("--axis", choices=harness.AXES)
    p.add_argument("--grid", help='"1,2,5", "lin:a:b:num" or "log:a:b:num"')
    p.add_argument("--method", help="comma separated subset of " + ",".join(harness.METHODS))
    p.add_argument("--order", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--me-cap", dest="me_cap", type=int)

    p = sub.add_parser("reproduce", help="write CSV and plot script for a figure")
    p.add_argument("figure", choices=("fig2", "fig3"))
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("limits", help="approximate CGFs against their thermodynamic limits")
    _add_common(p, ("approx1", "approx2", "approx3"), None)
    p.add_argument("--regime", required=True,
                   choices=("linear", "super_transmittance", "low_bias"))
    p.add_argument("--chi", type=float, default=0.7)
    p.add_argument("--t", type=float, default=1.0)
    return parser


def _settings(args) -> dict:
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None):
        merged.update(harness.read_config(args.config))
    for key, value in vars(args).items():
        if value is not None and not key.startswith("_"):
            merged[key] = value
    if merged.get("method") is None and getattr(args, "_default_method", None):
        merged["method"] = args._default_method
    return merged


def _params(s) -> ModelParams:
    return ModelParams(**{field: s[key] for key, field in _PARAM_FLAGS.items()})


def _emit(table: harness.Table, out):
    text = table.to_csv()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cumulants(s):
    params, order, method = _params(s), int(s["order"]), s["method"]
    if method == "me":
        cs = fcs.stationary_cumulants(params, order)
    elif method == "fd":
        cs = fcs.cross_check_cumulants(params, order)
    elif method == "n1-analytic":
        cs = fcs.analytic_cumulants_n1(params, order)
    else:
        cs = eom.approximate_cumulants(params, method, order)
    rows = [(k, float(v)) for k, v in enumerate(cs.values, start=1)]
    return harness.Table(["order", "cumulant"], rows)


def _cgf_scan(s):
    params, method = _params(s), s["method"]
    chis = np.linspace(-s["chi_max"], s["chi_max"], int(s["grid"]))
    if method == "me":
        values = fcs.eigenvalue_scan(params, chis)
    elif method == "n1-analytic":
        values = np.asarray(fcs.analytic_cgf_n1(params, chis, 1.0))
    else:
        values = np.asarray(eom.approximate_cgf(params, method, chis, 1.0))
    rows = [(float(c), float(v.real), float(v.imag)) for c, v in zip(chis, values)]
    return harness.Table(["chi", "cgf_re", "cgf_im"], rows)


def _transient(s):
    res = fcs.propagate_transient(_params(s), s["chi"], s["t"], num=int(s["grid"]))
    rows = [(float(t), float(v.real), float(v.imag)) for t, v in zip(res.times, res.values)]
    return harness.Table(["t", "lnZ_re", "lnZ_im"], rows)


def _distribution(s):
    n, p = fcs.counting_distribution(_params(s), s["t"], int(s["n_max"]))
    return harness.Table(["n", "probability"], [(int(a), float(b)) for a, b in zip(n, p)])


def _sweep(s):
    if not s.get("axis") or not s.get("grid"):
        raise ValueError("sweep needs --axis and --grid (flags or config)")
    fixed = {field: s[key] for key, field in _PARAM_FLAGS.items()
             if field != s["axis"] and key in s}
    method = s.get("method")
    methods = tuple(m.strip() for m in ("me" if method is None else str(method)).split(",") if m.strip())
    spec = harness.SweepSpec(axis=s["axis"], grid=harness.parse_grid(s["grid"]), fixed=fixed,
                             methods=methods, order=int(s["order"]), me_cap=int(s["me_cap"]))
    return harness.run_sweep(spec, workers=int(s["workers"]))


def _limits(s):
    params, chi, t = _params(s), s["chi"], s["t"]
    kinds = [s["method"]] if s.get("method") else [k.value for k in eom.ClosureKind]
    rows = []
    for kind in kinds:
        approx = complex(eom.approximate_cgf(params, kind, chi, t))
        limit = complex(eom.limit_cgf(params, kind, s["regime"], chi, t))
        rows.append((kind, approx.real, approx.imag, limit.real, limit.imag,
                     abs(approx - limit) / abs(limit)))
    return harness.Table(["method", "approx_re", "approx_im", "limit_re", "limit_im",
                          "relative_difference"], rows)


_COMMANDS = {"cumulants": _cumulants, "cgf-scan": _cgf_scan, "transient": _transient,
             "distribution": _distribution, "sweep": _sweep, "limits": _limits}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "reproduce":
            for path in harness.reproduce_figure(args.figure, args.out, workers=args.workers):
                print(path)
            return 0
        s = _settings(args)
        _emit(_COMMANDS[args.command](s), s.get("out"))
        return 0
    except (ValueError, TypeError, KeyError, OSError) as exc:
        return _fail(exc, 2)
    except Exception as exc:  # numerical failure
        return _fail(exc, 1)


def _fail(exc, code: int) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

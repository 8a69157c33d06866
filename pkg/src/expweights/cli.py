"""Command-line entry point.

Every run is described by a flat JSON config; command-line flags override
its fields.  The delimited table goes to stdout (or --csv), the JSON report
(with the resolved config embedded) to --out, and for ``verify`` an optional
log-log ratio plot to --svg.

Exit codes: 0 success, 2 invalid configuration, 3 numerical gate failure.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from .errors import ExpWeightsError, TheoremRangeViolation
from .harness import (INEQ15, INEQ16, INEQ41, INEQ64, INVERSE_T, T11, T12, T13, WITH_T,
                      check_theorem_range, parse_p, verify_bernstein,
                      verify_restricted_range, verify_vp_theorem)
from .mrs import MrsTable
from .operators import (christoffel, christoffel_oracle, default_suite, fourier_coeffs,
                        partial_sum, verify_prop32, vp_mean)
from .orthopoly import build_recurrence, weighted_basis
from .weights import WeightSpec, class_report

COMMANDS = ("mrs-table", "recurrence", "eval", "vp-apply", "christoffel", "verify",
            "class-report")
INEQUALITIES = ("1.5", "1.6", "1.11", "1.12", "1.13", "2.3", "2.6", "2.7w", "4.1",
                "6.4", "3.7")
_THEOREM_IDS = {"1.5": INEQ15, "1.6": INEQ16, "1.11": T11, "1.12": T12, "1.13": T13,
                "4.1": INEQ41, "6.4": INEQ64}

DEFAULTS = {
    "seed": 0,
    "n_grid": [8, 16, 32, 64, 128],
    "p": "2",
    "beta": 2.0,
    "samples": 20,
    "exploratory": False,
    "lam": 1.0,
    "exclude": 0.0,
    "grid": [0.0, 10.0, 2001],
    "f": "bump+0",
}
_COMMAND_DEFAULTS = {
    "verify": ("seed", "n_grid", "p", "beta", "samples", "exploratory"),
    "class-report": ("lam", "exclude", "grid"),
    "vp-apply": ("f",),
}


class ConfigError(ValueError):
    pass


def _float_list(s):
    return [float(v) for v in str(s).split(",") if v.strip()]


def _int_list(s):
    return [int(v) for v in str(s).split(",") if v.strip()]


def build_parser():
    ap = argparse.ArgumentParser(
        prog="expweights",
        description="Exponential-weight orthogonal polynomials: MRS numbers, recurrences, "
                    "weighted evaluation, de la Vallee Poussin means and inequality checks.")
    ap.add_argument("command", nargs="?", choices=COMMANDS,
                    help="what to run (may also come from the config file)")
    ap.add_argument("--config", help="flat JSON run config; flags override its fields")
    g = ap.add_argument_group("weight")
    g.add_argument("--weight", help="JSON file with family, alpha, u, l")
    g.add_argument("--family", help="freud or erdos")
    g.add_argument("--alpha", type=float)
    g.add_argument("--u", type=float)
    g.add_argument("--l", type=int)
    g = ap.add_argument_group("parameters")
    g.add_argument("--x", type=_float_list, help="comma-separated evaluation points")
    g.add_argument("--N", type=int, help="recurrence table degree")
    g.add_argument("--n", type=int, help="degree / number of terms")
    g.add_argument("--j", type=int, help="derivative order")
    g.add_argument("--j-max", dest="j_max", type=int, help="highest derivative for eval")
    g.add_argument("--f", help="test function id for vp-apply (see --list-functions)")
    g.add_argument("--list-functions", action="store_true",
                   help="print the test function suite and exit")
    g.add_argument("--oracle", action="store_true", default=None,
                   help="christoffel: add the brute-force oracle column (n <= 12)")
    g.add_argument("--ineq", choices=INEQUALITIES, help="inequality to verify")
    g.add_argument("--p", help="L^p exponent, a number >= 1 or inf")
    g.add_argument("--beta", type=float, help="beta for 6.4")
    g.add_argument("--n-grid", dest="n_grid", type=_int_list, help="comma-separated degrees")
    g.add_argument("--seed", type=int)
    g.add_argument("--samples", type=int, help="random polynomials per degree")
    g.add_argument("--exploratory", action="store_true", default=None,
                   help="allow 1.12 with p < 2 (no verdict)")
    g.add_argument("--grid", type=_float_list, help="class-report grid as lo,hi,count")
    g.add_argument("--lam", type=float, help="growth exponent for class-report")
    g.add_argument("--exclude", type=float, help="class-report: drop |x| <= exclude")
    g = ap.add_argument_group("output")
    g.add_argument("--out", help="JSON report path")
    g.add_argument("--csv", help="CSV path (default: stdout)")
    g.add_argument("--svg", help="SVG ratio plot path (verify only)")
    return ap


def resolve_config(args):
    """Merge the config file, defaults and command-line overrides."""
    cfg = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    for key, value in vars(args).items():
        if key in ("config", "list_functions") or value is None:
            continue
        cfg[key] = value
    if not cfg.get("command"):
        raise ConfigError("no command given")
    if cfg["command"] not in COMMANDS:
        raise ConfigError(f"unknown command {cfg['command']!r}")
    if cfg.get("svg") and cfg["command"] != "verify":
        raise ConfigError("--svg is only available for verify")
    cfg.setdefault("seed", DEFAULTS["seed"])
    for key in _COMMAND_DEFAULTS.get(cfg["command"], ()):
        cfg.setdefault(key, DEFAULTS[key])
    cfg["weight"] = _resolve_weight(cfg).to_dict()
    for key in ("family", "alpha", "u", "l"):
        cfg.pop(key, None)
    if "p" in cfg:
        cfg["p"] = str(cfg["p"])
    return cfg


def _resolve_weight(cfg):
    w = cfg.get("weight")
    if isinstance(w, str):
        try:
            with open(w, encoding="utf-8") as fh:
                w = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read weight spec {w}: {exc}")
    w = dict(w or {})
    for key in ("family", "alpha", "u", "l"):
        if cfg.get(key) is not None:
            w[key] = cfg[key]
    if "family" not in w or "alpha" not in w:
        raise ConfigError("weight needs at least family and alpha")
    try:
        return WeightSpec.from_dict(w)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def _need(cfg, *keys):
    for key in keys:
        if cfg.get(key) is None:
            raise ConfigError(f"{cfg['command']} needs --{key.replace('_', '-')}")


# -- commands ----------------------------------------------------------------

def cmd_mrs_table(spec, cfg):
    _need(cfg, "x")
    table = MrsTable(spec).fill(cfg["x"])
    header = ["x", "a_x", "T_a", "Q_a", "rel_residual"]
    rows = [list(r) for r in table.rows()]
    return header, rows, {"rows": rows}


def _recurrence(spec, cfg, default_N):
    N = cfg.get("N") or default_N
    return build_recurrence(spec, int(N))


def cmd_recurrence(spec, cfg):
    _need(cfg, "N")
    rec = _recurrence(spec, cfg, cfg["N"])
    header = ["k", "a_k", "b_k_minus_1", "gamma_ratio"]
    rows = [list(r) for r in rec.rows()]
    return header, rows, {"rows": rows, "mu0": rec.mu0, "residual": rec.residual,
                          "radius": rec.radius}


def cmd_eval(spec, cfg):
    _need(cfg, "x", "n")
    n, jm = int(cfg["n"]), int(cfg.get("j_max") or 0)
    if jm < 0:
        raise ConfigError("j_max must be >= 0")
    rec = _recurrence(spec, cfg, max(n, 1))
    vals = weighted_basis(rec, np.asarray(cfg["x"], dtype=float), n, jm)
    header = ["x", "k", "j", "pkw"]
    rows = [[x, k, j, vals[i, k, j]] for i, x in enumerate(cfg["x"])
            for k in range(n) for j in range(jm + 1)]
    return header, rows, {"rows": rows}


def _suite(spec, rec):
    return {f.id: f for f in default_suite(spec, rec.radius)}


def cmd_vp_apply(spec, cfg):
    _need(cfg, "x", "n")
    n, j = int(cfg["n"]), int(cfg.get("j") or 0)
    rec = _recurrence(spec, cfg, 2 * n)
    suite = _suite(spec, rec)
    if cfg["f"] not in suite:
        raise ConfigError(f"unknown test function {cfg['f']!r}; choose from "
                          + ", ".join(suite))
    c = fourier_coeffs(suite[cfg["f"]], rec, 2 * n)
    x = np.asarray(cfg["x"], dtype=float)
    s = partial_sum(c, rec, x, n, j)
    v = vp_mean(c, rec, x, n, j)
    header = ["x", "j", "value"]
    rows = [[xi, j, vi] for xi, vi in zip(cfg["x"], v)]
    return header, rows, {"rows": rows, "partial_sum": s, "coeffs": c.coeffs}


def cmd_christoffel(spec, cfg):
    _need(cfg, "x", "n")
    n, j = int(cfg["n"]), int(cfg.get("j") or 0)
    if not 0 <= j < n:
        raise ConfigError("christoffel needs 0 <= j < n")
    rec = _recurrence(spec, cfg, n)
    lam = np.atleast_1d(christoffel(rec, n, np.asarray(cfg["x"], dtype=float), j))
    if cfg.get("oracle"):
        if n > 12:
            raise ConfigError("the christoffel oracle needs n <= 12")
        ref = [christoffel_oracle(spec, rec, n, x, j) for x in cfg["x"]]
    else:
        ref = [None] * len(lam)
    header = ["x", "n", "j", "lambda_weighted", "oracle"]
    rows = [[x, n, j, v, r] for x, v, r in zip(cfg["x"], lam, ref)]
    return header, rows, {"rows": rows}


def verify_report(spec, cfg):
    """Run the RatioReport for cfg['ineq'] (also used by the test-suite)."""
    _need(cfg, "ineq")
    ineq, grid = cfg["ineq"], [int(n) for n in cfg["n_grid"]]
    if not grid or min(grid) < 1:
        raise ConfigError("n_grid must hold positive degrees")
    try:
        p = parse_p(cfg["p"])
    except ValueError:
        raise ConfigError(f"bad p {cfg['p']!r}")
    if not p >= 1:
        raise ConfigError("p must be >= 1")
    seed, samples = int(cfg["seed"]), int(cfg["samples"])
    thm = _THEOREM_IDS.get(ineq)
    if thm is not None:
        j = cfg.get("j")
        j = (0 if thm in (INEQ15, INEQ16) else 1) if j is None else int(j)
        try:
            check_theorem_range(thm, p, j, cfg["beta"], bool(cfg["exploratory"]))
        except TheoremRangeViolation as exc:
            raise ConfigError(str(exc))
    else:
        j = int(cfg.get("j") or 1)
        if ineq != "2.3" and not 1 <= j <= 4:
            raise ConfigError("j must be in [1, 4]")
    mrs = MrsTable(spec)
    N = int(cfg.get("N") or 2 * max(grid))
    rec = build_recurrence(spec, N, mrs=mrs)
    if ineq == "2.3":
        return verify_restricted_range(rec, mrs, grid, p, samples, seed)
    if ineq in ("2.6", "2.7w"):
        mode = WITH_T if ineq == "2.6" else INVERSE_T
        return verify_bernstein(rec, mrs, grid, p, j, mode, samples, seed)
    if ineq == "3.7":
        return verify_prop32(spec, rec, mrs, grid, j)
    suite = default_suite(spec, rec.radius)
    return verify_vp_theorem(spec, rec, mrs, suite, thm, p, j, grid, cfg["beta"],
                             bool(cfg["exploratory"]))


def cmd_verify(spec, cfg):
    report = verify_report(spec, cfg)
    header = ["n", "ratio"]
    rows = [[n, r] for n, r in report.rows]
    return header, rows, report.to_dict(), report


def cmd_class_report(spec, cfg):
    grid = cfg["grid"]
    if len(grid) != 3 or int(grid[2]) < 2:
        raise ConfigError("grid must be lo,hi,count with count >= 2")
    xs = np.linspace(grid[0], grid[1], int(grid[2]))
    try:
        rep = class_report(spec, xs, cfg["lam"], cfg["exclude"])
    except ValueError as exc:
        raise ConfigError(str(exc))
    header = ["key", "value"]
    rows = [[k, rep[k]] for k in sorted(rep) if k != "weight"]
    return header, rows, rep


HANDLERS = {
    "mrs-table": cmd_mrs_table,
    "recurrence": cmd_recurrence,
    "eval": cmd_eval,
    "vp-apply": cmd_vp_apply,
    "christoffel": cmd_christoffel,
    "verify": cmd_verify,
    "class-report": cmd_class_report,
}


# -- output ------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return "" if v is None else str(v)


def csv_text(header, rows):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def json_text(payload):
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_atomic(path, text):
    path = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(cfg, stdout=None):
    """Execute a resolved config; returns the JSON payload written to --out."""
    stdout = stdout or sys.stdout
    spec = WeightSpec.from_dict(cfg["weight"])
    out = HANDLERS[cfg["command"]](spec, cfg)
    header, rows, payload = out[:3]
    payload = dict(payload)
    payload["config"] = cfg
    table = csv_text(header, rows)
    if cfg.get("csv"):
        write_atomic(cfg["csv"], table)
    else:
        stdout.write(table)
    if cfg.get("out"):
        write_atomic(cfg["out"], json_text(payload))
    if cfg.get("svg"):
        from .plotting import report_svg
        write_atomic(cfg["svg"], report_svg(out[3]))
    return payload


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_functions:
        for f in default_suite(WeightSpec.freud(2)):
            print(f"{f.id}\t{f.description}")
        return 0
    try:
        cfg = resolve_config(args)
        run(cfg)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"expweights: config error: {exc}", file=sys.stderr)
        return 2
    except ExpWeightsError as exc:
        print(f"expweights: numerical gate '{exc.gate}' failed: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"expweights: config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

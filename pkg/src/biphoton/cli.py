"""Command-line front end.

    biphoton mz   [--grid N] [--block path1|path2] [--trials N --seed S]
    biphoton rto  [--grid N] [--table1] [--fixed W X Y Z] [--trials N --seed S]
    biphoton bell [--trials N] [--seed S] [--a1 .. --b2]
    biphoton check

Settings come from flags, then a JSON ``--config`` file, then the
``BIPHOTON_SEED`` environment variable (seed only), then built-in defaults.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from typing import List, Optional, Sequence

import jsonschema
import numpy as np

from . import __version__, bell, checks, mc, mzi, rto

SCHEMA_VERSION = 1
SEED_ENV = "BIPHOTON_SEED"

DEFAULTS = {
    "grid": 64,
    "trials": None,
    "seed": 0,
    "out": None,
    "format": "csv",
    "degrees": False,
    "check": False,
    "phi1": 0.0,
    "block": "none",
    "phi_a": 0.0,
    "fixed": list(rto.DEFAULT_FIXED),
    "table1": False,
    "a1": bell.OPTIMAL.a1,
    "a2": bell.OPTIMAL.a2,
    "b1": bell.OPTIMAL.b1,
    "b2": bell.OPTIMAL.b2,
}
BELL_DEFAULT_TRIALS = 10_000

_number = {"type": "number"}
CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "grid": {"type": "integer", "minimum": 2},
        "trials": {"type": ["integer", "null"], "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": mc.MAX_SEED},
        "out": {"type": ["string", "null"]},
        "format": {"enum": ["csv", "json"]},
        "degrees": {"type": "boolean"},
        "check": {"type": "boolean"},
        "phi1": _number,
        "block": {"enum": list(mzi.BLOCK_CHOICES)},
        "phi_a": _number,
        "fixed": {"type": "array", "items": _number, "minItems": 4, "maxItems": 4},
        "table1": {"type": "boolean"},
        "a1": _number,
        "a2": _number,
        "b1": _number,
        "b2": _number,
    },
}

# phase differences of the single-photon vs entangled comparison table, with the
# correlation percentages as usually printed there
TABLE1_DPHI = (0.0, np.pi / 4, np.pi / 2, 3 * np.pi / 4, np.pi)
TABLE1_PRINTED_CORR = (1.00, 0.71, 0.50, 0.29, 0.00)
TABLE1_NOTE = (
    "printed_corr is the correlation fraction as usually tabulated; at pi/4 and "
    "3pi/4 it reads 0.71/0.29, while the Born-rule p_same is 0.854/0.146 "
    "(0.71 = cos(pi/4) = C). The computed columns follow the Born rule."
)

ANGLE_KEYS = ("phi1", "phi_a", "a1", "a2", "b1", "b2")


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Fixed 9-significant-digit rendering; negative zero prints as 0."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        x = 0.0
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.9g}"


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    return v


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--grid", type=_positive_int, help="number of phase points over [0, 2pi]")
    shared.add_argument("--trials", type=_positive_int, help="Monte Carlo trials per point")
    shared.add_argument("--seed", type=_positive_int, help="unsigned 64-bit seed")
    shared.add_argument("--out", help="output path (default: stdout)")
    shared.add_argument("--format", choices=("csv", "json"))
    shared.add_argument("--config", help="JSON config file")
    shared.add_argument("--degrees", action="store_true", default=None,
                        help="read angle flags in degrees")
    shared.add_argument("--check", action="store_true", default=None,
                        help="also run the invariant suite")

    parser = argparse.ArgumentParser(
        prog="biphoton",
        description="Single-photon and entangled two-photon interferometry.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mz", parents=[shared], help="Mach-Zehnder fringe sweep")
    p.add_argument("--phi1", type=float, help="phase on path 1; path 2 sweeps phi1 + dphi")
    p.add_argument("--block", choices=mzi.BLOCK_CHOICES)

    p = sub.add_parser("rto", parents=[shared], help="entangled-pair correlation sweep")
    p.add_argument("--phi-a", dest="phi_a", type=float, help="station A phase")
    p.add_argument("--fixed", type=float, nargs=4, metavar=("W", "X", "Y", "Z"),
                   help="fixed layout phases on beams A1, B1, A2, B2")
    p.add_argument("--table1", action="store_true", default=None,
                   help="emit only the five comparison-table phase rows")

    p = sub.add_parser("bell", parents=[shared], help="CHSH test")
    for name in ("a1", "a2", "b1", "b2"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--fixed", type=float, nargs=4, metavar=("W", "X", "Y", "Z"))

    sub.add_parser("check", parents=[shared], help="run the invariant suite")
    return parser


def load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    try:
        jsonschema.validate(data, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"invalid config {path}: {exc.message}") from None
    return data


def effective_config(args: argparse.Namespace, environ=None) -> dict:
    environ = os.environ if environ is None else environ
    cfg = dict(DEFAULTS)
    if args.command == "bell":
        cfg["trials"] = BELL_DEFAULT_TRIALS
        cfg["format"] = "json"
    if environ.get(SEED_ENV):
        try:
            cfg["seed"] = int(environ[SEED_ENV])
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer") from None
    user = load_config(getattr(args, "config", None))
    for key, value in vars(args).items():
        if key in DEFAULTS and value is not None:
            user[key] = value
    if user.get("degrees"):
        # only user-supplied angles; built-in defaults are already radians
        for key in ANGLE_KEYS:
            if key in user:
                user[key] = math.radians(user[key])
        if "fixed" in user:
            user["fixed"] = [math.radians(f) for f in user["fixed"]]
    cfg.update(user)
    cfg["degrees"] = False  # every stored angle is in radians from here on

    if cfg["grid"] < 2:
        raise UsageError("--grid must be at least 2")
    if cfg["trials"] is not None and cfg["trials"] < 1:
        raise UsageError("--trials must be at least 1")
    if not 0 <= cfg["seed"] <= mc.MAX_SEED:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    cfg["fixed"] = [float(f) for f in cfg["fixed"]]
    return cfg


def sweep_grid(n: int) -> np.ndarray:
    return np.linspace(0.0, 2.0 * np.pi, n)


def mz_table(cfg: dict):
    dphis = sweep_grid(cfg["grid"])
    block = cfg["block"]
    columns = ["dphi", "p_d1", "p_d2"]
    if block != "none":
        columns.append("p_absorbed")
    trials = cfg["trials"]
    if trials:
        columns += ["p_d1_hat", "se"]
        seeds = mc.substream_seeds(cfg["seed"], len(dphis))
    rows = []
    for k, d in enumerate(dphis):
        conf = mzi.MziConfig(cfg["phi1"], cfg["phi1"] + d, block)
        o = mzi.outcome(conf)
        total = o.p_d1 + o.p_d2 + o.p_absorbed
        if abs(total - 1.0) > 1e-12:
            raise RuntimeError(f"detector probabilities sum to {total!r} at dphi={d}")
        row = [d, o.p_d1, o.p_d2]
        if block != "none":
            row.append(o.p_absorbed)
        if trials:
            est = mc.estimate_probability(mc.run("mz", conf, trials, seeds[k]), "D1")
            row += [est.value, est.std_error]
        rows.append(row)
    return columns, rows, []


def rto_table(cfg: dict):
    table1 = cfg["table1"]
    dphis = np.array(TABLE1_DPHI) if table1 else sweep_grid(cfg["grid"])
    columns = ["dphi", "p11", "p12", "p21", "p22", "p_same", "p_diff", "C", "pA1", "pB1"]
    trials = cfg["trials"]
    if trials:
        columns += ["C_hat", "C_se"]
        seeds = mc.substream_seeds(cfg["seed"], len(dphis))
    if table1:
        columns += ["p_d1_single", "printed_corr"]
    rows = []
    for k, d in enumerate(dphis):
        ph = rto.RtoPhases(cfg["phi_a"], cfg["phi_a"] + d, tuple(cfg["fixed"]))
        dist = rto.coincidence_probabilities(ph)
        corr = rto.correlation(ph)
        marg = rto.marginals(ph)
        if abs(dist.total - 1.0) > 1e-12:
            raise RuntimeError(f"coincidences sum to {dist.total!r} at dphi={d}")
        if max(abs(v - 0.5) for v in marg.values()) > 1e-12:
            raise RuntimeError(f"single-detector marginals depend on phase at dphi={d}")
        row = [d, *dist.as_tuple(), corr.p_same, corr.p_different, corr.C,
               marg["A1"], marg["B1"]]
        if trials:
            est = mc.estimate_C(mc.run("rto", ph, trials, seeds[k]))
            row += [est.value, est.std_error]
        if table1:
            row += [mzi.mz_probabilities(mzi.MziConfig(0.0, d)).p_d1, TABLE1_PRINTED_CORR[k]]
        rows.append(row)
    notes = [TABLE1_NOTE] if table1 else []
    return columns, rows, notes


def bell_report(cfg: dict) -> dict:
    trials = cfg["trials"]
    if trials is None or trials < 1:
        raise UsageError("--trials must be at least 1")
    settings = bell.ChshSettings(cfg["a1"], cfg["a2"], cfg["b1"], cfg["b2"])
    fixed = tuple(cfg["fixed"])
    res = bell.chsh_mc(settings, trials, cfg["seed"], fixed)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "bell",
        "settings": settings.to_dict(),
        "S_analytic": bell.chsh_S(settings, fixed),
        "S_hat": res.S_hat,
        "sigma_S": res.sigma_S,
        "n_sigmas_violation": res.n_sigmas_violation,
        "seed": cfg["seed"],
        "n_per_setting": trials,
        "generator": mc.GENERATOR,
        "config": _public(cfg),
    }


def _public(cfg: dict) -> dict:
    return {k: v for k, v in cfg.items() if k not in ("out", "check")}


def render_csv(columns: Sequence[str], rows, notes: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    for note in notes:
        buf.write(f"# {note}\n")
    return buf.getvalue()


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return fmt(x)
    return x


def render_json(obj: dict) -> str:
    def clean(o):
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        if isinstance(o, np.floating):
            o = float(o)
        return _json_safe(o)

    return json.dumps(clean(obj), indent=2, sort_keys=False) + "\n"


def table_json(command: str, cfg: dict, columns, rows, notes) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": _public(cfg),
        "generator": mc.GENERATOR if cfg.get("trials") else None,
        "columns": list(columns),
        "rows": [[float(v) for v in row] for row in rows],
        "notes": list(notes),
    }


def emit(text: str, out: Optional[str], stdout) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _run_suite(stdout) -> bool:
    results = checks.run_checks()
    for r in results:
        stdout.write(r.line() + "\n")
    return all(r.ok for r in results)


def main(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        cfg = effective_config(args)
        if args.command == "check":
            return 0 if _run_suite(stdout) else 1
        if args.command == "bell":
            report = bell_report(cfg)
            if cfg["format"] == "json":
                text = render_json(report)
            else:
                cols = ["S_analytic", "S_hat", "sigma_S", "n_sigmas_violation",
                        "seed", "n_per_setting"]
                text = render_csv(cols, [[report[c] for c in cols]])
        else:
            build = mz_table if args.command == "mz" else rto_table
            columns, rows, notes = build(cfg)
            if cfg["format"] == "json":
                text = render_json(table_json(args.command, cfg, columns, rows, notes))
            else:
                text = render_csv(columns, rows, notes)
    except UsageError as exc:
        stderr.write(f"biphoton {args.command}: error: {exc}\n")
        return 2
    except (ValueError, RuntimeError) as exc:
        stderr.write(f"biphoton {args.command}: failed: {exc}\n")
        return 1

    emit(text, cfg["out"], stdout)
    if cfg["check"] and not _run_suite(stderr):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

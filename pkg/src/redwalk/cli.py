"""Command-line interface.

Every subcommand prints one compact JSON object on stdout. Exact values
are written as "p/q" strings (surds as "(a+b√d)/c"); ``--decimal-digits``
adds a truncated decimal companion. Files carry a manifest with the
command line, configuration, seed, version and a SHA-256 of the payload.

Exit codes: 0 success, 2 validation or input error, 3 budget exhausted
(partial output is still printed), 4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import re
import sys
from fractions import Fraction

from . import __version__
from .errors import (
    ConfigError,
    DescentAmbiguityError,
    DomainError,
    InternalInvariantError,
    NonconvergentInputError,
    RedwalkError,
    SingularMatrixError,
)
from .numeric_core import QuadraticSurd, format_exact, parse_exact

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def decimal_string(v, digits: int) -> str:
    """v truncated toward zero to ``digits`` places."""
    if isinstance(v, QuadraticSurd):
        # floor(10^k v) exactly through the surd's own floor
        scaled = v * (10 ** digits)
        n = scaled.__floor__()
        if n < 0 and scaled != n:
            n += 1
    else:
        v = Fraction(v)
        n = abs(v.numerator) * 10 ** digits // v.denominator
        n = -n if v < 0 else n
    sign = "-" if n < 0 or (n == 0 and v < 0) else ""
    n = abs(n)
    whole, frac = divmod(n, 10 ** digits)
    return f"{sign}{whole}." + str(frac).zfill(digits) if digits else f"{sign}{whole}"


def _exact_field(out: dict, key: str, v, digits):
    out[key] = format_exact(v)
    if digits is not None:
        out[key + "_decimal"] = decimal_string(v, digits)


def _parse(text: str):
    return parse_exact(text)


def _rational(text: str) -> Fraction:
    v = parse_exact(text)
    if isinstance(v, QuadraticSurd):
        raise DomainError(f"{text!r} must be rational")
    return v


def manifest(args, payload: str, config_name=None, seed=None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "redwalk " + " ".join(args.argv),
        "config": config_name,
        "seed": seed,
        "version": __version__,
        "sha256": hashlib.sha256(payload.encode()).hexdigest(),
    }


def _write_json_file(path, args, data, config_name=None, seed=None):
    payload = _dump(data)
    doc = {"manifest": manifest(args, payload, config_name, seed), "data": data}
    with open(path, "w") as fh:
        fh.write(_dump(doc) + "\n")
    return doc["manifest"]


def _write_csv_file(path, args, writer, config_name=None, seed=None):
    """writer(fh) writes the CSV body; the manifest goes in leading comment lines."""
    body = io.StringIO()
    writer(body)
    payload = body.getvalue()
    man = manifest(args, payload, config_name, seed)
    with open(path, "w", newline="") as fh:
        fh.write(f"# manifest {_dump(man)}\n")
        fh.write(payload)
    return man


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args):
    from .triangle_group import load_config
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        out = {"valid": False, "error": str(exc)}
        if exc.pair is not None:
            out["pair"] = list(exc.pair)
        print(_dump(out))
        return EXIT_INVALID
    return {"valid": True, "m": cfg.coxeter_json()}


def cmd_interro(args):
    from .interrobang import interro
    out = {}
    _exact_field(out, "value", interro(_parse(args.x)), args.decimal_digits)
    return out


def cmd_qmark(args):
    from .minkowski import qmark
    out = {}
    _exact_field(out, "value", qmark(_parse(args.x)), args.decimal_digits)
    return out


def cmd_cdf(args):
    from .pgl2_cdf import cdf
    text = args.x.strip()
    if text in ("inf", "+inf", "∞"):
        v = cdf(float("inf"))
    elif text == "-inf":
        v = cdf(float("-inf"))
    else:
        v = cdf(_parse(text))
    out = {}
    _exact_field(out, "value", v.value, args.decimal_digits)
    out["branch"] = v.branch
    return out


def cmd_invert(args):
    from .interrobang import interro_inverse
    lo, hi = interro_inverse(_rational(args.y), _rational(args.eps))
    out = {}
    _exact_field(out, "lo", lo, args.decimal_digits)
    _exact_field(out, "hi", hi, args.decimal_digits)
    return out


def cmd_fraction_search(args):
    from .interrobang import fraction_search
    v = fraction_search(_rational(args.y), args.max_den)
    return {"value": None if v is None else format_exact(v)}


def cmd_stationarity(args):
    from .pgl2_cdf import stationarity_check
    res = stationarity_check(_rational(args.x))
    return res.to_json()


def cmd_contraction(args):
    from .triangle_group import contraction_constant, load_config
    cfg = load_config(args.config)
    r = contraction_constant(cfg)
    return {"C": r.C, "argmax_angle": r.argmax_angle,
            "circles": [[c.real, c.imag, rad] for c, rad in r.circles]}


def cmd_coupling(args):
    from .triangle_group import load_config
    from .walk import coupling_experiment
    cfg = load_config(args.config)
    table = coupling_experiment(cfg, args.seed, args.mmax, args.pairs, threads=args.threads)
    data = table.to_json()
    data["bound_violations"] = table.bound_violations()
    if args.out:
        man = _write_json_file(args.out, args, data, cfg.name, args.seed)
        return {"written": args.out, "sha256": man["sha256"], "C": table.C,
                "bound_violations": data["bound_violations"]}
    return data


def cmd_simulate(args):
    from .triangle_group import load_config
    from .walk import batch_sample, run_walk
    cfg = load_config(args.config)
    if args.walks == 1:
        rep = run_walk(cfg, args.seed, args.budget, args.target_width, walk_index=args.offset)
        out = rep.to_json()
        if args.out:
            man = _write_json_file(args.out, args, out, cfg.name, args.seed)
            out = {"written": args.out, "sha256": man["sha256"], "status": rep.status}
        print(_dump(out))
        return EXIT_BUDGET if rep.flagged else EXIT_OK
    s = batch_sample(cfg, args.seed, args.walks, args.budget, args.target_width,
                     threads=args.threads, walk_offset=args.offset)
    summary = {"config": cfg.name, "seed": args.seed, "walks": args.walks, "offset": args.offset,
               "status_counts": s.status_counts, "unbounded_side": s.n_unbounded}
    if args.out:
        data = dict(summary, zeta=[_json_float(v) for v in s.zetas.tolist()])
        man = _write_json_file(args.out, args, data, cfg.name, args.seed)
        summary["written"] = args.out
        summary["sha256"] = man["sha256"]
    print(_dump(summary))
    return EXIT_BUDGET if s.n_exhausted else EXIT_OK


def _json_float(v: float):
    if v != v:
        return None
    if v in (float("inf"), float("-inf")):
        return "inf" if v > 0 else "-inf"
    return v


def cmd_ks(args):
    from .pgl2_cdf import ks_distance
    from .triangle_group import load_config
    from .walk import batch_sample
    cfg = load_config(args.config)
    s = batch_sample(cfg, args.seed, args.walks, args.budget, args.target_width, threads=args.threads)
    grid = [Fraction(k, 40) for k in range(-200, 200)]
    d = ks_distance(s.ecdf, grid)
    print(_dump({"ks": d, "walks": args.walks, "grid_points": len(grid),
                 "status_counts": s.status_counts}))
    return EXIT_BUDGET if s.n_exhausted else EXIT_OK


def cmd_plot_data(args):
    import csv
    if args.kind == "cdf":
        from .pgl2_cdf import cdf_grid
        rows = cdf_grid(_rational(args.lo), _rational(args.hi), args.n)

        def body(fh):
            w = csv.writer(fh)
            w.writerow(["x", "F", "F_float"])
            for x, v in rows:
                w.writerow([format_exact(x), format_exact(v), repr(float(v))])
        man = _write_csv_file(args.out, args, body)
        return {"written": args.out, "rows": len(rows), "sha256": man["sha256"]}
    if args.kind == "interro":
        from .interrobang import interro_grid
        rows = interro_grid(args.n)

        def body(fh):
            w = csv.writer(fh)
            w.writerow(["x", "interro", "interro_float"])
            for x, v in rows:
                w.writerow([format_exact(x), format_exact(v), repr(float(v))])
        man = _write_csv_file(args.out, args, body)
        return {"written": args.out, "rows": len(rows), "sha256": man["sha256"]}
    # trajectory
    from .triangle_group import load_config
    from .walk import run_walk, trajectory_rows
    cfg = load_config(args.config)
    rep = run_walk(cfg, args.seed, args.budget, args.target_width, trajectory=True,
                   decimate=args.decimate)

    def body(fh):
        w = csv.writer(fh)
        for row in trajectory_rows(rep, cfg):
            w.writerow(row)
    man = _write_csv_file(args.out, args, body, cfg.name, args.seed)
    print(_dump({"written": args.out, "rows": len(rep.trajectory), "sha256": man["sha256"],
                 "status": rep.status}))
    return EXIT_BUDGET if rep.flagged else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="redwalk", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"redwalk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def exact_cmd(name, fn, arg, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument(arg)
        sp.add_argument("--decimal-digits", type=int, default=None)
        sp.set_defaults(func=fn)
        return sp

    sp = sub.add_parser("validate", help="check a triangle configuration")
    sp.add_argument("config", help="builtin:pgl2 | builtin:figure2 | builtin:ideal[:deg] | file.json")
    sp.set_defaults(func=cmd_validate)

    exact_cmd("interro", cmd_interro, "x", "interrobang function at a rational or surd")
    exact_cmd("qmark", cmd_qmark, "x", "question-mark function at a rational or surd")
    sp = exact_cmd("cdf", cmd_cdf, "x", "closed-form CDF of the PGL2(Z) boundary limit")
    sp = exact_cmd("invert", cmd_invert, "y", "interval containing the interrobang preimage of y")
    sp.add_argument("--eps", default="1/1000000000")
    sp = sub.add_parser("fraction-search", help="exact rational preimage with bounded denominator")
    sp.add_argument("y")
    sp.add_argument("--max-den", type=int, default=1000)
    sp.set_defaults(func=cmd_fraction_search)
    sp = sub.add_parser("stationarity", help="exact stationarity check at a rational")
    sp.add_argument("x")
    sp.set_defaults(func=cmd_stationarity)

    def sim_opts(sp, walks=1000):
        sp.add_argument("--config", default="builtin:pgl2")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--walks", type=int, default=walks)
        sp.add_argument("--budget", type=int, default=10_000)
        sp.add_argument("--target-width", type=float, default=1e-6)
        sp.add_argument("--threads", type=int, default=None)

    sp = sub.add_parser("simulate", help="seeded batch of walks")
    sim_opts(sp)
    sp.add_argument("--offset", type=int, default=0, help="index of the first walk")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("ks", help="max CDF gap between simulated walks and the closed form")
    sim_opts(sp, walks=100_000)
    sp.set_defaults(func=cmd_ks)

    sp = sub.add_parser("coupling", help="coupled-chain decay table")
    sp.add_argument("--config", default="builtin:pgl2")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--pairs", type=int, default=10_000)
    sp.add_argument("--mmax", type=int, default=40)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_coupling)

    sp = sub.add_parser("contraction", help="contraction constant of a configuration")
    sp.add_argument("--config", default="builtin:pgl2")
    sp.set_defaults(func=cmd_contraction)

    sp = sub.add_parser("plot-data", help="write CSV data for plots")
    sp.add_argument("kind", choices=["cdf", "interro", "trajectory"])
    sp.add_argument("--out", required=True)
    sp.add_argument("--n", type=int, default=1000, help="grid intervals (cdf, interro)")
    sp.add_argument("--lo", default="-5")
    sp.add_argument("--hi", default="5")
    sp.add_argument("--config", default="builtin:pgl2")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=10_000)
    sp.add_argument("--target-width", type=float, default=1e-6)
    sp.add_argument("--decimate", type=int, default=1)
    sp.set_defaults(func=cmd_plot_data)
    return p


_NEGATIVE = re.compile(r"^-[0-9(.√s]")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # argparse would read "-5/2" as an option; a leading space keeps it positional
    args = parser.parse_args([" " + a if _NEGATIVE.match(a) else a for a in argv])
    args.argv = argv
    try:
        result = args.func(args)
    except (ConfigError, DomainError, DescentAmbiguityError, ValueError) as exc:
        print(_dump({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return EXIT_INVALID
    except NonconvergentInputError as exc:
        print(_dump({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return EXIT_BUDGET
    except (InternalInvariantError, SingularMatrixError, AssertionError) as exc:
        print(_dump({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return EXIT_INTERNAL
    except RedwalkError as exc:
        print(_dump({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return EXIT_INTERNAL
    if isinstance(result, int):
        return result
    print(_dump(result))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

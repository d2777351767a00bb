"""Command-line front end: ``sweep``, ``figure``, ``rus`` and ``optimize``.

Every command writes one table (CSV or JSON) and, when writing to a file, a
``<output>.manifest.json`` next to it.  Passing that manifest back through
``--config`` reproduces the table byte for byte.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .errors import DomainError
from .measurement import ground_projector
from .optimize import optimize_povm
from .protocols import SweepSpec, frange, simulate_rus_rounds, sweep
from .states import product_state, pure_tls_state

EXIT_USAGE = 2
EXIT_DOMAIN = 3

SWEEP_COLUMNS = ["p", "epsilon", "eta", "N", "a", "b", "p_s", "E0", "Ef", "dE",
                 "varE0", "varEf", "C0", "Cf", "dC"]
UNITS = {
    "p": "probability", "epsilon": "1", "eta": "probability", "N": "count", "a": "1", "b": "1",
    "p_s": "probability", "ps_opt": "probability", "E0": "E", "Ef": "E", "dE": "E",
    "Ef_opt": "E", "varE0": "E^2", "varEf": "E^2", "C0": "nats", "Cf": "nats", "dC": "nats",
    "Cf_opt": "nats", "R": "rounds", "analytic_pf": "probability", "empirical_pf": "probability",
    "trials": "count", "seed": "1", "a_opt": "1", "b_opt": "1", "relation_residual": "1",
    "Ef_projector": "E", "Ef_restricted": "E", "Ef_general": "E",
    "Cf_projector": "nats", "Cf_restricted": "nats", "Cf_general": "nats",
}
FIGURE_P = "0.005:0.995:0.005"
FIGURES = {
    "1b": dict(family="pure", protocol="projector_global", N="2"),
    "2a": dict(family="pure", protocol="projector_global", N="2"),
    "2b": dict(family="dephased", protocol="projector_global", N="2", epsilon="0.2,0.5,0.8"),
    "3a": dict(family="spontaneous", protocol="projector_global", N="2", eta="0.1"),
    "3b": dict(family="spontaneous", protocol="projector_global", N="2", eta="0.1,0.3,0.5"),
    "4a": None,
    "4b": None,
    "5a-global": dict(family="pure", protocol="projector_global", N="2,3,4"),
    "5b-pairwise": dict(family="pure", protocol="projector_pairwise", N="4"),
}


class UsageError(ValueError):
    pass


def parse_grid(text: str, cast=float) -> list:
    """``start:stop:step`` (inclusive), ``x,y,z`` or a single value."""
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, step = (float(t) for t in text.split(":"))
            vals = frange(start, stop, step)
        else:
            vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}: {exc}") from None
    if not vals:
        raise UsageError(f"empty grid {text!r}")
    if cast is int:
        if any(v != int(v) for v in vals):
            raise UsageError(f"expected integers in {text!r}")
        return [int(v) for v in vals]
    return vals


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".12g")


def _json_value(x):
    # same 12-digit rounding as the CSV so both formats carry identical numbers
    if x is None or (isinstance(x, int) and not isinstance(x, bool)):
        return x
    return float(fmt(x))


def render(columns: list[str], rows: list[dict], fmt_name: str) -> str:
    if fmt_name == "json":
        data = [{c: _json_value(r.get(c)) for c in columns} for r in rows]
        return json.dumps({"columns": columns, "rows": data}, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(fmt(r.get(c)) for c in columns) + "\n")
    return buf.getvalue()


def _sweep_rows(spec: SweepSpec, threads: int) -> list[dict]:
    rows = []
    for (p, eps, eta, N, a, b), out in sweep(spec, threads):
        E = spec.E
        rows.append(dict(p=p, epsilon=eps, eta=eta, N=N, a=a, b=b, p_s=out.p_success,
                         E0=out.e_initial / E, Ef=out.e_final / E, dE=out.delta_e / E,
                         varE0=out.var_initial / E**2, varEf=out.var_final / E**2,
                         C0=out.c_initial, Cf=out.c_final, dC=out.delta_c))
    return rows


def _spec_from_args(args) -> SweepSpec:
    return SweepSpec(
        family=args.family, protocol=args.protocol, N=tuple(parse_grid(args.N, int)),
        E=float(args.E), p_grid=tuple(parse_grid(args.p)),
        epsilon_grid=tuple(parse_grid(args.epsilon)), eta_grid=tuple(parse_grid(args.eta)),
        a_grid=tuple(parse_grid(args.a)), b_grid=tuple(parse_grid(args.b)),
    )


def cmd_sweep(args) -> tuple[list[str], list[dict]]:
    spec = _spec_from_args(args)
    try:
        spec.validate()
    except DomainError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return SWEEP_COLUMNS, _sweep_rows(spec, args.threads)


def _povm_row(p: float) -> dict:
    proj = sweep(SweepSpec(p_grid=(p,)))[0][1]
    restricted = optimize_povm(p, restricted=True)
    general = optimize_povm(p, restricted=False)
    return dict(p=p, Ef_projector=proj.e_final, Ef_restricted=restricted.e_f_opt,
                Ef_general=general.e_f_opt, Cf_projector=proj.c_final,
                Cf_restricted=restricted.c_f_opt, Cf_general=general.c_f_opt)


def _povm_table(p_grid, threads: int) -> list[dict]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_povm_row, p_grid))
    return [_povm_row(p) for p in p_grid]


def cmd_figure(args) -> tuple[list[str], list[dict]]:
    if args.id not in FIGURES:
        raise UsageError(f"unknown figure {args.id!r}; choose from {', '.join(FIGURES)}")
    p_grid = parse_grid(args.p or FIGURE_P)
    if args.id in ("4a", "4b"):
        if any(not 0 < p < 1 for p in p_grid):
            raise DomainError("POVM figures need 0 < p < 1")
        rows = _povm_table(p_grid, args.threads)
        col = "Ef" if args.id == "4a" else "Cf"
        return ["p", f"{col}_projector", f"{col}_restricted", f"{col}_general"], rows
    preset = dict(FIGURES[args.id])
    ns = argparse.Namespace(E="1", p=",".join(map(repr, p_grid)), epsilon="1", eta="0",
                            a="1", b="0", threads=args.threads)
    for k, v in preset.items():
        setattr(ns, k, v)
    rows = _sweep_rows(_spec_from_args(ns), args.threads)
    if args.id == "1b":
        return ["p", "dC", "dE", "p_s"], rows
    return SWEEP_COLUMNS, rows


def cmd_rus(args) -> tuple[list[str], list[dict]]:
    if args.trials < 1:
        raise UsageError("trials must be >= 1")
    if args.R < 1:
        raise UsageError("R must be >= 1")
    if not 0 <= args.seed < 2**64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    if args.N < 1:
        raise UsageError("N must be >= 1")
    if not 0 < args.p <= 1:
        raise DomainError("p must lie in (0, 1]")
    rho = product_state(pure_tls_state(args.p), args.N)
    stats = simulate_rus_rounds(rho, ground_projector(args.N), args.R, args.trials, args.seed,
                                args.threads)
    rows = [dict(R=s.rounds, analytic_pf=s.analytic_failure, empirical_pf=s.empirical_failure,
                 trials=s.trials, seed=s.seed) for s in stats]
    return ["R", "analytic_pf", "empirical_pf", "trials", "seed"], rows


def cmd_optimize(args) -> tuple[list[str], list[dict]]:
    p_grid = parse_grid(args.p)
    if any(not 0 < p < 1 for p in p_grid):
        raise DomainError("POVM optimisation needs 0 < p < 1")
    rows = []
    for p in p_grid:
        opt = optimize_povm(p, restricted=args.restricted)
        rows.append(dict(p=p, a_opt=opt.a_opt, b_opt=opt.b_opt, Cf_opt=opt.c_f_opt,
                         Ef_opt=opt.e_f_opt, ps_opt=opt.p_s_opt,
                         relation_residual=opt.relation_residual))
    return ["p", "a_opt", "b_opt", "Cf_opt", "Ef_opt", "ps_opt", "relation_residual"], rows


COMMANDS = {"sweep": cmd_sweep, "figure": cmd_figure, "rus": cmd_rus, "optimize": cmd_optimize}
_NOT_ECHOED = {"output", "config", "func"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--config", help="JSON document of option values (a run manifest works too)")

    parser = argparse.ArgumentParser(prog="coherent-charging", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", parents=[common], help="evaluate a protocol over a parameter grid")
    sp.add_argument("--family", default="pure", choices=("pure", "dephased", "spontaneous"))
    sp.add_argument("--protocol", default="projector_global",
                    choices=("projector_global", "projector_pairwise", "povm"))
    sp.add_argument("--N", default="2", help="number of TLS (grid allowed)")
    sp.add_argument("--E", default="1", help="energy gap")
    sp.add_argument("--p", default="0.01:0.99:0.01", help="excitation probability grid")
    sp.add_argument("--epsilon", default="1", help="dephasing factor grid")
    sp.add_argument("--eta", default="0", help="spontaneous emission grid")
    sp.add_argument("--a", default="1", help="POVM a grid")
    sp.add_argument("--b", default="0", help="POVM b grid")

    fp = sub.add_parser("figure", parents=[common], help="data behind one figure")
    fp.add_argument("id", help=", ".join(FIGURES))
    fp.add_argument("--p", default=None, help=f"override the p grid (default {FIGURE_P})")

    rp = sub.add_parser("rus", parents=[common], help="repeat-until-success failure statistics")
    rp.add_argument("--p", type=float, default=0.1)
    rp.add_argument("--N", type=int, default=2)
    rp.add_argument("--R", type=int, default=3)
    rp.add_argument("--trials", type=int, default=1_000_000)

    op = sub.add_parser("optimize", parents=[common], help="coherence-optimal POVM per p")
    op.add_argument("--p", default="0.05:0.4:0.05")
    op.add_argument("--restricted", action="store_true", help="pin a = 1")

    for name, p in (("sweep", sp), ("figure", fp), ("rus", rp), ("optimize", op)):
        p.set_defaults(func=COMMANDS[name])
    return parser


def _load_config(path: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    return doc.get("spec", doc)


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        config = _load_config(args.config)
        # option values from the config act as defaults; flags given on the command line win
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = set(config) - known - {"command"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        subparser.set_defaults(**{k: v for k, v in config.items() if k != "command"})
        args = parser.parse_args(argv)
    return args


def manifest(args, columns: list[str]) -> dict:
    echo = {k: v for k, v in vars(args).items() if k not in _NOT_ECHOED}
    return {
        "tool": "coherent_charging",
        "version": __version__,
        "command": args.command,
        "spec": echo,
        "seed": args.seed,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "units": {c: UNITS.get(c, "1") for c in columns},
    }


def run(argv=None) -> int:
    try:
        args = parse_args(argv)
        columns, rows = args.func(args)
        text = render(columns, rows, args.format)
        if args.output == "-":
            sys.stdout.write(text)
        else:
            with open(args.output, "w", newline="\n") as fh:
                fh.write(text)
            with open(args.output + ".manifest.json", "w") as fh:
                json.dump(manifest(args, columns), fh, indent=1)
                fh.write("\n")
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

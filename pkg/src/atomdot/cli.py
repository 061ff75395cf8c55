"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 numerical failure (no convergence,
or a constant outside its acceptance rule under ``constants verify``),
4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import constants as const
from .atom_energy import EC2_COEFF, atom_correlation, atom_smooth_hx
from .datasets import (CONVENTIONS, DatasetError, emit_report, fit_all, load_correlation_csv,
                       plot_rows)
from .dot_energy import EXCHANGE_COEFF, J_EXCHANGE, dot_total_energy
from .grids import ScalingContext, log_grid
from .numerics import ConvergenceError, DomainError, QuadratureSpec
from .tf import integrated_dos, tf_energy, write_profile
from .tf_atom import TAIL_LIMIT, normalization, solve_tf_atom
from .tf_dot import ConfinementSpec, solve_tf_dot_radial

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    seed: int = 20240611
    tol: float = 1e-8
    mc_samples: int = 4_000_000
    t_min: float = 1e-2
    atom_grid_n: int = 2000
    dot_grid_n: int = 400
    potential: str = "r^2"

    def spec(self) -> QuadratureSpec:
        return QuadratureSpec(mc_samples=self.mc_samples, seed=self.seed)


def _coerce(name: str, text: str):
    kind = {f.name: f.type for f in dataclasses.fields(RunConfig)}[name]
    try:
        return {"int": int, "float": float, "str": str}[kind](text)
    except ValueError:
        raise DomainError(f"config key {name}: cannot parse {text!r} as {kind}") from None


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    known = {f.name for f in dataclasses.fields(RunConfig)}
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise DomainError(f"{path}:{lineno}: expected key = value")
        if key not in known:
            raise DomainError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = _coerce(key, value.strip())
    return out


def build_config(args) -> RunConfig:
    values = read_config(args.config) if args.config else {}
    for f in dataclasses.fields(RunConfig):
        given = getattr(args, f.name, None)
        if given is not None:
            values[f.name] = given
    cfg = RunConfig(**values)
    if not cfg.tol > 0 or cfg.mc_samples < 1 or not 0 <= cfg.seed < 2**64 or not cfg.t_min > 0:
        raise DomainError("invalid configuration values")
    return cfg


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    return _finite(obj)


# --------------------------------------------------------------------------
# subcommands


def cmd_tf_atom(args, cfg):
    sol = solve_tf_atom(args.q, grid=log_grid(1e-6, 1e4, cfg.atom_grid_n), tol=cfg.tol)
    if args.profile:
        write_profile(sol, args.profile)
    ctx = ScalingContext.atom(1.0, args.q)
    energy = tf_energy(sol, ctx)
    out = {
        "q": sol.q, "mu_global": sol.mu_global, "residual": sol.residual, "tol": sol.tol,
        "normalization": normalization(sol), "origin_coeff": sol.origin_coeff,
        "tail_coeff": sol.tail_coeff, "tail_target_81pi2": TAIL_LIMIT if sol.q == 1.0 else None,
        "support_radius": sol.support_radius, "grid_size": len(sol.grid),
        "energy_reduced": energy.reduced, "energy_hartree_per_Z^(7/3)": energy.hartree,
    }
    if sol.q < 1.0:
        out["dos_at_mu_over_half_N"] = integrated_dos(sol, sol.mu_global, ctx) / (0.5 * ctx.N)
    return "tf atom", out


def cmd_tf_dot(args, cfg):
    conf = ConfinementSpec.parse(cfg.potential)
    sol = solve_tf_dot_radial(conf, grid=cfg.dot_grid_n, tol=cfg.tol)
    if args.profile:
        write_profile(sol, args.profile)
    energy = tf_energy(sol, ScalingContext.dot(1.0))
    out = {
        "confinement": conf.description, "mu_global": sol.mu_global, "support_radius": sol.R,
        "W_prime_at_R": sol.W_prime_at_R, "residual": sol.residual, "tol": sol.tol,
        "normalization": sol.disk_integral(lambda m, r: m) / (2 * math.pi),
        "e_tf": energy.reduced, "mu_plus_center": float(sol.mu_plus_at(0.0)),
    }
    return "tf dot", out


def cmd_constants(args, cfg):
    reports = const.all_reports(cfg.spec(), include_mc=not args.no_mc)
    rows = []
    failed = []
    for rep in reports:
        row = rep.as_dict()
        if args.action == "verify":
            ok, rule = const.verify_report(rep)
            row.update(passed=ok, rule=rule)
            if not ok:
                failed.append(rep.name)
        rows.append(row)
    if args.action == "verify":
        for row in rows:
            print(f"{'PASS' if row['passed'] else 'FAIL'}  {row['name']:<20s} {row['rule']}", file=sys.stderr)
    return "constants", rows, (EXIT_NUMERIC if failed else EXIT_OK)


def cmd_atom_corr(args, cfg):
    Z = args.z if args.z is not None else args.n
    br = atom_correlation(args.n, Z, x_unknown=args.x, spec=cfg.spec(), t_min=cfg.t_min)
    out = {k: v for k, v in dataclasses.asdict(br).items() if k != "hartree"}
    out.update(
        q=br.q, scaled_terms=br.scaled_terms(), hartree_terms=br.hartree_terms(),
        per_electron_hartree=br.per_electron_hartree(), minus_ec_hartree=br.minus_ec_hartree(),
        log_slope_hartree=br.log_slope, ec2_coeff=EC2_COEFF,
    )
    return "atom corr", out


def cmd_atom_hx(args, cfg):
    overrides = {k: getattr(args, k) for k in ("c4", "c3", "c0") if getattr(args, k) is not None}
    hx = atom_smooth_hx(args.n, overrides)
    out = dataclasses.asdict(hx)
    out.update(terms=hx.terms, total=hx.total)
    return "atom hx", out


def cmd_dot_energy(args, cfg):
    conf = ConfinementSpec.parse(cfg.potential)
    br = dot_total_energy(args.n, conf, cfg.spec(), tol=cfg.tol)
    out = dataclasses.asdict(br)
    out.update(terms=br.terms, total=br.total, exchange_coeff=EXCHANGE_COEFF,
               exchange_coeff_from_J=J_EXCHANGE / (2 * math.pi) ** 3)
    return "dot energy", out


def cmd_fit(args, cfg):
    data = load_correlation_csv(args.data)
    conventions = CONVENTIONS if args.convention == "both" else (args.convention,)
    out, rows = {}, None
    for conv in conventions:
        fits = fit_all(data, conv, args.slope)
        out[conv] = {k: v.as_dict() for k, v in fits.items()}
        if rows is None:
            rows = plot_rows(fits["joint"])
    return "fit", out, EXIT_OK, rows


COMMANDS = {
    ("tf", "atom"): cmd_tf_atom, ("tf", "dot"): cmd_tf_dot, ("constants", None): cmd_constants,
    ("atom", "corr"): cmd_atom_corr, ("atom", "hx"): cmd_atom_hx, ("dot", "energy"): cmd_dot_energy,
    ("fit", None): cmd_fit,
}


def _common(p):
    p.add_argument("--seed", type=int, help="Monte Carlo seed")
    p.add_argument("--tol", type=float, help="solver / residual tolerance")
    p.add_argument("--out", help="write the JSON report here as well as to stdout")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--show-config", action="store_true", help="print the merged configuration and exit")
    p.add_argument("--mc-samples", dest="mc_samples", type=int)
    p.add_argument("--t-min", dest="t_min", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atomdot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="group", required=True)

    tf = sub.add_parser("tf", help="Thomas-Fermi solutions").add_subparsers(dest="kind", required=True)
    p = tf.add_parser("atom")
    p.add_argument("--q", type=float, default=1.0, help="ionization ratio N/Z")
    p.add_argument("--grid-n", dest="atom_grid_n", type=int)
    p.add_argument("--profile", help="write the profile CSV here")
    _common(p)
    p = tf.add_parser("dot")
    p.add_argument("--potential")
    p.add_argument("--grid-n", dest="dot_grid_n", type=int)
    p.add_argument("--profile", help="write the profile CSV here")
    _common(p)

    p = sub.add_parser("constants", help="universal constants, closed form vs numeric")
    p.add_argument("action", nargs="?", choices=["report", "verify"], default="report")
    p.add_argument("--no-mc", action="store_true", help="skip the Monte Carlo constants")
    _common(p)

    atom = sub.add_parser("atom", help="atom energies").add_subparsers(dest="kind", required=True)
    p = atom.add_parser("corr")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--z", type=float)
    p.add_argument("--x", type=float, default=0.0, help="value for the uncomputed constant x")
    _common(p)
    p = atom.add_parser("hx")
    p.add_argument("--n", type=float, required=True)
    for c in ("c4", "c3", "c0"):
        p.add_argument(f"--{c}", type=float)
    _common(p)

    dot = sub.add_parser("dot", help="dot energies").add_subparsers(dest="kind", required=True)
    p = dot.add_parser("energy")
    p.add_argument("--potential", help="r^2, r^4, r^p:<p> or file:<csv>")
    p.add_argument("--n", type=float, required=True)
    _common(p)

    p = sub.add_parser("fit", help="fit the offset c' to reference correlation energies")
    p.add_argument("--data", required=True)
    p.add_argument("--convention", choices=[*CONVENTIONS, "both"], default="both")
    p.add_argument("--slope", type=float, help="override the theory slope")
    p.add_argument("--plot-data", dest="plot_data", help="CSV n,model,data for the joint fit")
    _common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = build_config(args)
        if args.show_config:
            sys.stdout.write(json.dumps(dataclasses.asdict(cfg), sort_keys=True, indent=2) + "\n")
            return EXIT_OK
        result = COMMANDS[(args.group, getattr(args, "kind", None))](args, cfg)
        kind, payload = result[0], result[1]
        code = result[2] if len(result) > 2 else EXIT_OK
        rows = result[3] if len(result) > 3 else None
        body = {"config": dataclasses.asdict(cfg), "data": payload}
        text = emit_report(kind, _clean(body), args.out, getattr(args, "plot_data", None), rows)
        sys.stdout.write(text)
        return code
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, DatasetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

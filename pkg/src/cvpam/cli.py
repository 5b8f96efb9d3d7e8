"""Reproduction driver: one subcommand per experiment family.

Subcommands: optimize, efficiency, entropy, framefree, bound, fixtures.
Every run is deterministic in its seed; outputs (CSV or JSON) carry a header
recording the seed, a hash of the resolved configuration and the package
version.  A JSON config file can predefine any option; explicit flags win.

Exit codes: 0 success, 1 usage error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__, fixtures, framefree, randomness, witnesses
from .optimize import (
    OptimizerConfig,
    critical_efficiency,
    crossover_efficiency,
    efficiency_curve,
    max_witness,
    scheme,
)

SEED_ENV_VAR = "CVPAM_SEED"
USAGE_ERROR = 1
NUMERIC_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse's default exit code is 2; we use 1
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _parse_grid(spec: str) -> list[float]:
    """Parse "start:stop:step" into an inclusive grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like start:stop:step, got {spec!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0.0 or stop < start:
        raise ValueError(f"bad grid {spec!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def _resolve_witness(name, w: float | None):
    if isinstance(name, dict):  # inline witness definition from a config file
        return witnesses.from_dict(name)
    name = name.lower()
    if name == "s3":
        return witnesses.s3()
    if name == "s4":
        return witnesses.s4()
    if name in ("s33_1", "s331"):
        return witnesses.s33_1()
    if name in ("s33_2", "s332"):
        return witnesses.s33_2()
    if name in ("s3t", "s3_tilted"):
        if w is None:
            raise ValueError("witness s3t needs --w")
        return witnesses.s3_tilted(w)
    raise ValueError(f"unknown witness {name!r}")


def _validate_scheme(kinds: str, n_y: int) -> str:
    kinds = kinds.upper()
    if len(kinds) != n_y or any(k not in "HDP" for k in kinds):
        raise ValueError(
            f"scheme {kinds!r} must have length {n_y} over the alphabet H/D/P"
        )
    return kinds


def _config_hash(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _meta(command: str, seed: int, resolved: dict) -> dict:
    return {
        "command": command,
        "seed": seed,
        "config_hash": _config_hash(resolved),
        "version": __version__,
    }


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="\n") as stream:
            yield stream


def _emit(args, meta: dict, columns, rows, json_payload: dict | None = None) -> None:
    with _output(args.out) as stream:
        if args.format == "json":
            payload = json_payload if json_payload is not None else {
                "columns": list(columns),
                "rows": [[None if c == "" else c for c in row] for row in rows],
            }
            json.dump({"meta": meta, **payload}, stream, indent=2, sort_keys=True, default=str)
            stream.write("\n")
        else:
            for key in sorted(meta):
                stream.write(f"# {key}={meta[key]}\n")
            stream.write(",".join(columns) + "\n")
            for row in rows:
                stream.write(",".join(row) + "\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file with defaults for any option")
    parser.add_argument("--seed", type=int, help=f"RNG seed (default ${SEED_ENV_VAR} or 0)")
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")


def _add_optimizer(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--restarts", type=int, help="random restarts (default 200)")
    parser.add_argument("--max-iter", type=int, dest="max_iter", help="iterations per restart (default 2000)")
    parser.add_argument("--tol", type=float, help="objective tolerance (default 1e-9)")


def _merge_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Fill unset options from the JSON config file; return the file content."""
    if not getattr(args, "config", None):
        return {}
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config file: {exc}")
    if not isinstance(data, dict):
        parser.error("config file must hold a JSON object")
    for key, value in data.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, value)
    return data


def _seed_of(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _optimizer_config(args, seed: int) -> OptimizerConfig:
    return OptimizerConfig(
        restarts=200 if args.restarts is None else int(args.restarts),
        max_iterations=2000 if args.max_iter is None else int(args.max_iter),
        tol=1e-9 if args.tol is None else float(args.tol),
        seed=seed,
    )


def _describe_setting(kind: str, setting) -> dict:
    if kind == "H":
        return {"kind": "homodyne", "theta": setting.theta, "bin_lo": setting.bin_lo, "bin_hi": setting.bin_hi}
    if kind == "D":
        return {"kind": "displacement", "r": setting.r, "phi": setting.phi}
    return {"kind": "projective", "beta": setting.beta, "gamma": setting.gamma}


def _require(parser, args, *names) -> None:
    for name in names:
        if getattr(args, name.replace("-", "_"), None) is None:
            parser.error(f"--{name} is required (flag or config file)")


def _cmd_optimize(args, parser) -> int:
    _merge_config(args, parser)
    _require(parser, args, "witness", "scheme")
    seed = _seed_of(args)
    try:
        witness = _resolve_witness(args.witness, args.w)
        kind_strings = [
            _validate_scheme(s, witness.n_y) for s in args.scheme.split(",") if s
        ]
        if not kind_strings:
            raise ValueError("at least one scheme is required")
    except ValueError as exc:
        parser.error(str(exc))
    config = _optimizer_config(args, seed)
    eta = 1.0 if args.eta is None else float(args.eta)
    rows, records = [], []
    for kinds in kind_strings:
        result = max_witness(witness, scheme(kinds, eta), config)
        rows.append([kinds, witness.name, _fmt(eta), _fmt(result.best_value)])
        records.append(
            {
                "scheme": kinds,
                "witness": witness.name,
                "eta": eta,
                "value": result.best_value,
                "preparations": [{"alpha": p.alpha, "eta": p.eta} for p in result.preparations],
                "settings": [
                    _describe_setting(k, s) for k, s in zip(kinds, result.settings)
                ],
                "best_restart": result.best_restart,
            }
        )
    resolved = {"witness": witness.name, "schemes": kind_strings, "eta": eta,
                "restarts": config.restarts, "max_iterations": config.max_iterations,
                "tol": config.tol, "seed": seed}
    _emit(args, _meta("optimize", seed, resolved),
          ("scheme", "witness", "eta", "value"), rows, {"results": records})
    return 0


def _cmd_efficiency(args, parser) -> int:
    _merge_config(args, parser)
    _require(parser, args, "witness", "scheme")
    seed = _seed_of(args)
    try:
        if args.w_grid is not None:
            # the tilt comes from the grid; no single witness to resolve
            if not (isinstance(args.witness, str) and args.witness.lower() in ("s3t", "s3_tilted")):
                raise ValueError("--w-grid applies to the tilted witness only")
            witness = None
            kinds = _validate_scheme(args.scheme, 2)
        else:
            witness = _resolve_witness(args.witness, args.w)
            kinds = _validate_scheme(args.scheme, witness.n_y)
    except ValueError as exc:
        parser.error(str(exc))
    config = _optimizer_config(args, seed)

    if args.w_grid is not None:
        tilts = _parse_grid(args.w_grid)
        rows, records = [], []
        for w in tilts:
            tilted = witnesses.s3_tilted(w)
            crit = critical_efficiency(tilted, scheme(kinds), config)
            rows.append([_fmt(w), _fmt(crit) if crit is not None else "never"])
            records.append({"w": w, "eta_crit": crit})
        resolved = {"witness": "s3t", "scheme": kinds, "w_grid": args.w_grid,
                    "restarts": config.restarts, "seed": seed}
        _emit(args, _meta("efficiency", seed, resolved), ("w", "eta_crit"), rows,
              {"rows": records})
        return 0

    etas = _parse_grid(args.eta_grid if args.eta_grid is not None else "0:1:0.1")
    curve = efficiency_curve(witness, scheme(kinds), etas, config)
    crit = critical_efficiency(witness, scheme(kinds), config) if "D" in kinds else None
    over_hh = crossover_efficiency(witness, scheme(kinds), config)
    rows = [[_fmt(eta), _fmt(res.best_value)] for eta, res in curve]
    resolved = {"witness": witness.name, "scheme": kinds, "etas": etas,
                "restarts": config.restarts, "seed": seed}
    meta = _meta("efficiency", seed, resolved)
    meta["eta_crit"] = _fmt(crit) if crit is not None else "never"
    meta["eta_over_hh"] = _fmt(over_hh) if over_hh is not None else "never"
    meta["classical_bound"] = _fmt(witness.classical_bound)
    _emit(args, meta, ("eta", "max_value"), rows,
          {"curve": [{"eta": e, "max_value": r.best_value} for e, r in curve]})
    return 0


def _cmd_entropy(args, parser) -> int:
    _merge_config(args, parser)
    _require(parser, args, "witness")
    seed = _seed_of(args)
    try:
        witness = _resolve_witness(args.witness, args.w)
        if witness.quantum_bound is None and args.grid is None:
            raise ValueError("witness without quantum bound needs an explicit --grid")
    except ValueError as exc:
        parser.error(str(exc))
    config = _optimizer_config(args, seed)
    if args.grid is not None:
        targets = _parse_grid(args.grid)
    else:
        fractions = _parse_grid(args.normalized_grid if args.normalized_grid is not None else "0:1:0.125")
        lo, hi = witness.classical_bound, witness.quantum_bound
        targets = [lo + f * (hi - lo) for f in fractions]
    curve = randomness.min_entropy_curve(witness, targets, config, mode=args.mode or "uniform")
    rows = [
        [
            _fmt(pt.w_star),
            _fmt(pt.normalized),
            _fmt(pt.p_guess),
            _fmt(pt.h_min),
            _fmt(pt.f_bound),
            _fmt(pt.h_min_analytic),
        ]
        for pt in curve.points
    ]
    resolved = {"witness": witness.name, "targets": targets, "mode": args.mode or "uniform",
                "restarts": config.restarts, "seed": seed}
    meta = _meta("entropy", seed, resolved)
    infeasible = [pt.w_star for pt in curve.points if not pt.feasible]
    if infeasible:
        meta["infeasible_targets"] = ";".join(_fmt(t) for t in infeasible)
    _emit(args, meta, randomness.EntropyCurve.CSV_COLUMNS, rows,
          {"points": [pt.__dict__ for pt in curve.points]})
    return 0 if len(infeasible) < len(curve.points) else NUMERIC_ERROR


def _cmd_framefree(args, parser) -> int:
    _merge_config(args, parser)
    _require(parser, args, "protocol")
    seed = _seed_of(args)
    protocol = args.protocol
    if protocol == "projective":
        samples = 100000 if args.samples is None else int(args.samples)
        report = framefree.projective_framefree(
            samples, seed, bin_width=0.01 if args.bin_width is None else float(args.bin_width),
            sampler=args.sampler or "euler",
        )
        rows = [
            [_fmt(c), _fmt(d)]
            for c, d in zip(report.histogram.bin_centers, report.histogram.densities)
        ]
        resolved = {"protocol": protocol, "samples": samples, "seed": seed,
                    "sampler": args.sampler or "euler"}
        meta = _meta("framefree", seed, resolved)
        meta["nonviolating_fraction"] = _fmt(report.nonviolating_fraction)
        for label, frac in zip(("band_3.0_3.4", "band_3.4_3.6", "band_above_3.6"), report.band_fractions):
            meta[label] = _fmt(frac)
        _emit(args, meta, ("bin_center", "density"), rows, {
            "nonviolating_fraction": report.nonviolating_fraction,
            "band_fractions": list(report.band_fractions),
            "band_intervals": [list(iv) for iv in report.band_intervals],
            "histogram": {
                "bin_center": report.histogram.bin_centers.tolist(),
                "density": report.histogram.densities.tolist(),
            },
        })
        return 0
    # displacement / homodyne phase sweep
    config = _optimizer_config(args, seed)
    points = 721 if args.gamma_points is None else int(args.gamma_points)
    if points < 2:
        parser.error("--gamma-points must be at least 2")
    gammas = np.linspace(0.0, 2.0 * math.pi, points)
    pool_size = 4 if args.pool_size is None else int(args.pool_size)
    try:
        sweep = framefree.cv_framefree(protocol, pool_size, gammas, config)
    except ValueError as exc:
        parser.error(str(exc))
    rows = [[_fmt(g), _fmt(s), str(int(v))] for g, s, v in
            zip(sweep.gammas, sweep.s_max, sweep.violated)]
    resolved = {"protocol": protocol, "pool_size": pool_size, "gamma_points": points, "seed": seed}
    meta = _meta("framefree", seed, resolved)
    meta["min_s_max"] = _fmt(float(np.min(sweep.s_max)))
    meta["violated_fraction"] = _fmt(float(np.mean(sweep.violated)))
    _emit(args, meta, ("gamma", "S_max", "violated_flag"), rows, {
        "pool": [_describe_setting("D" if protocol == "displacement" else "H", s) for s in sweep.pool],
        "points": [
            {"gamma": float(g), "S_max": float(s), "violated": bool(v)}
            for g, s, v in zip(sweep.gammas, sweep.s_max, sweep.violated)
        ],
    })
    return 0


def _cmd_bound(args, parser) -> int:
    _merge_config(args, parser)
    seed = _seed_of(args)
    if args.witness_value is None or args.w is None:
        parser.error("bound needs --witness-value and --w")
    try:
        f_value = randomness.analytic_guessing_bound(float(args.witness_value), float(args.w))
    except ValueError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return NUMERIC_ERROR
    h_value = randomness.min_entropy(f_value)
    resolved = {"witness_value": args.witness_value, "w": args.w}
    _emit(args, _meta("bound", seed, resolved), ("witness_value", "w", "F_bound", "H_min_analytical"),
          [[_fmt(float(args.witness_value)), _fmt(float(args.w)), _fmt(f_value), _fmt(h_value)]],
          {"F_bound": f_value, "H_min_analytical": h_value})
    return 0


def _cmd_fixtures(args, parser) -> int:
    _merge_config(args, parser)
    seed = _seed_of(args)
    wanted = args.witness.lower() if args.witness else None
    rows, records = [], []
    for strat in fixtures.all_strategies():
        if wanted and strat.witness != wanted:
            continue
        preps = strat.preparations()
        settings = strat.measurement_settings()
        for i, p in enumerate(preps):
            rows.append([strat.witness, strat.scheme_kinds, "preparation", str(i),
                         _fmt(p.alpha), _fmt(p.eta), ""])
        for i, (kind, s) in enumerate(zip(strat.scheme_kinds, settings)):
            if kind == "H":
                rows.append([strat.witness, strat.scheme_kinds, "homodyne", str(i),
                             _fmt(s.theta), _fmt(s.bin_lo), _fmt(s.bin_hi)])
            else:
                rows.append([strat.witness, strat.scheme_kinds, "displacement", str(i),
                             _fmt(s.r), _fmt(s.phi), ""])
        records.append({
            "witness": strat.witness,
            "scheme": strat.scheme_kinds,
            "preparations": [{"alpha": p.alpha, "eta": p.eta} for p in preps],
            "settings": [_describe_setting(k, s) for k, s in zip(strat.scheme_kinds, settings)],
        })
    if wanted and not rows:
        parser.error(f"no fixtures for witness {args.witness!r}")
    resolved = {"witness": wanted}
    _emit(args, _meta("fixtures", seed, resolved),
          ("witness", "scheme", "component", "index", "p1", "p2", "p3"), rows,
          {"fixtures": records})
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="cvpam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize", help="optimal witness values per scheme")
    p_opt.add_argument("--witness")
    p_opt.add_argument("--scheme", help="e.g. DD or a comma list HH,DD")
    p_opt.add_argument("--w", type=float, help="tilt weight for s3t")
    p_opt.add_argument("--eta", type=float, help="displacement efficiency (default 1)")
    _add_optimizer(p_opt)
    _add_common(p_opt)
    p_opt.set_defaults(func=_cmd_optimize)

    p_eff = sub.add_parser("efficiency", help="witness maximum versus detection efficiency")
    p_eff.add_argument("--witness")
    p_eff.add_argument("--scheme")
    p_eff.add_argument("--w", type=float)
    p_eff.add_argument("--eta-grid", dest="eta_grid", help="start:stop:step (default 0:1:0.1)")
    p_eff.add_argument("--w-grid", dest="w_grid", help="tilt grid for per-w critical efficiencies")
    _add_optimizer(p_eff)
    _add_common(p_eff)
    p_eff.set_defaults(func=_cmd_efficiency)

    p_ent = sub.add_parser("entropy", help="min-entropy versus witness value")
    p_ent.add_argument("--witness")
    p_ent.add_argument("--w", type=float)
    p_ent.add_argument("--grid", help="absolute witness-value grid start:stop:step")
    p_ent.add_argument("--normalized-grid", dest="normalized_grid",
                       help="normalized violation grid (default 0:1:0.125)")
    p_ent.add_argument("--mode", choices=("uniform", "global"), help="guessing functional")
    _add_optimizer(p_ent)
    _add_common(p_ent)
    p_ent.set_defaults(func=_cmd_entropy)

    p_ff = sub.add_parser("framefree", help="violation statistics without a shared frame")
    p_ff.add_argument("--protocol", choices=("projective", "displacement", "homodyne"))
    p_ff.add_argument("--samples", type=int, help="rotations to sample (projective; default 100000)")
    p_ff.add_argument("--bin-width", dest="bin_width", type=float, help="histogram bin width (default 0.01)")
    p_ff.add_argument("--sampler", choices=tuple(framefree.ROTATION_SAMPLERS),
                      help="rotation ensemble (projective; default euler)")
    p_ff.add_argument("--pool-size", dest="pool_size", type=int, help="measurement pool size (CV; default 4)")
    p_ff.add_argument("--gamma-points", dest="gamma_points", type=int,
                      help="phase-offset grid size over [0, 2pi] (default 721)")
    _add_optimizer(p_ff)
    _add_common(p_ff)
    p_ff.set_defaults(func=_cmd_framefree)

    p_bound = sub.add_parser("bound", help="closed-form guessing bound for the tilted witness")
    p_bound.add_argument("--witness-value", dest="witness_value", type=float)
    p_bound.add_argument("--w", type=float)
    _add_common(p_bound)
    p_bound.set_defaults(func=_cmd_bound)

    p_fix = sub.add_parser("fixtures", help="dump the reference optimal strategies")
    p_fix.add_argument("--witness", help="restrict to one witness id")
    _add_common(p_fix)
    p_fix.set_defaults(func=_cmd_fixtures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "format", None) is None:
        args.format = "csv"
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())

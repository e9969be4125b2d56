"""Command line interface.

Subcommands::

    gaussmink solve     --spec problem.json [--out DIR] [--tol F] ...
    gaussmink verify    --spec problem.json --suite NAME ...
    gaussmink nonunique --spec problem.json [--p F] [--theta F] ...
    gaussmink measure   --spec problem.json --h 1.0,0.8 ...

Problem specs are strict JSON: unknown or missing fields are hard errors
with a path-qualified message.  Exit codes: 0 success, 1 a verify suite
assertion failed, 2 validation failure (schema, geometry, p = 0, or p >= n
for nonunique), 3 solver did not converge.  All randomness is seeded
(default seed 0); rerunning a command with the same spec and seed writes
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from . import sampling
from .analysis import find_nonunique_pair, sp_profile
from .cones import make_cone, validate_directions, wulff_shape
from .errors import GaussMinkError, PGreaterEqualNError
from .gaussian import (
    MONTE_CARLO,
    EstimatorConfig,
    combined_budget,
    covolume,
    gaussian_volume,
    mc_probability,
    std_normal_cdf,
    tail_bound,
    truncation_radius,
)
from .solver import DETERMINISTIC_2D, SolverConfig, auto_initialize, solve
from .surface import facet_gaussian_area, gaussian_boundary_weight, radial_transform_integral, sp_measure_vector
from .variational import fd_covolume_derivative, fd_volume_derivative
from .analysis import log_concavity_chain_check, mixed_volume_inequality_check

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_VALIDATION = 2
EXIT_NOT_CONVERGED = 3

_PATH_ALIASES = {"det2d": DETERMINISTIC_2D, "mc": MONTE_CARLO, "auto": "auto"}

PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["cone", "directions", "weights", "p"],
    "additionalProperties": False,
    "properties": {
        "cone": {
            "type": "object",
            "required": ["generators"],
            "additionalProperties": False,
            "properties": {
                "generators": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "array", "minItems": 1, "items": {"type": "number"}},
                }
            },
        },
        "directions": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "minItems": 1, "items": {"type": "number"}},
        },
        "weights": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "number", "exclusiveMinimum": 0},
        },
        "p": {"type": "number"},
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_iters": {"type": "integer", "minimum": 1},
                "residual_tol": {"type": "number", "exclusiveMinimum": 0},
                "initial_h": {
                    "anyOf": [
                        {"const": "auto"},
                        {"type": "array", "minItems": 1,
                         "items": {"type": "number", "exclusiveMinimum": 0}},
                    ]
                },
                "path": {"enum": ["auto", "deterministic_2d", "monte_carlo"]},
            },
        },
        "estimator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_samples": {"type": "integer", "minimum": 10000},
                "seed": {"type": "integer", "minimum": 0},
                "quadrature_steps": {"type": "integer", "minimum": 64},
                "target_abs_error": {
                    "type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1
                },
            },
        },
    },
}


class SpecError(ValueError):
    pass


def load_problem_spec(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise SpecError(f"spec file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec file is not valid JSON: {exc}") from exc
    validator = Draft202012Validator(PROBLEM_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise SpecError(f"spec validation failed at {e.json_path}: {e.message}")
    if raw["p"] == 0:
        raise SpecError("spec validation failed at $.p: exponent p must be nonzero")
    return raw


def build_problem(spec: dict, args) -> tuple:
    """Materialize (cone, omega, weights, p, solver_cfg) from a validated spec,
    applying command line overrides."""
    cone = make_cone(spec["cone"]["generators"])
    omega = validate_directions(cone, spec["directions"])
    weights = np.asarray(spec["weights"], dtype=float)
    if len(weights) != len(omega):
        raise SpecError(
            f"spec validation failed at $.weights: got {len(weights)} weights "
            f"for {len(omega)} directions"
        )
    p = float(spec["p"])
    solver_spec = dict(spec.get("solver", {}))
    est_spec = dict(spec.get("estimator", {}))
    if args.seed is not None:
        est_spec["seed"] = args.seed
    if args.samples is not None:
        est_spec["n_samples"] = args.samples
    if getattr(args, "tol", None) is not None:
        solver_spec["residual_tol"] = args.tol
    if args.path is not None:
        solver_spec["path"] = _PATH_ALIASES[args.path]
    est = EstimatorConfig(**est_spec)
    cfg = SolverConfig(estimator=est, **solver_spec)
    return cone, omega, weights, p, cfg


def _write_json(path: Path, record: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(x) if isinstance(x, float) else x for x in row])


def cmd_solve(args) -> int:
    spec = load_problem_spec(args.spec)
    cone, omega, weights, p, cfg = build_problem(spec, args)
    result = solve(cone, omega, weights, p, cfg)
    out = Path(args.out)
    record = {
        "h_star": [float(x) for x in result.h_star],
        "c": result.c,
        "residual": [float(x) for x in result.residual],
        "rel_residual": result.rel_residual,
        "functional_value": result.functional_value,
        "iterations": result.iterations,
        "converged": result.converged,
        "method": result.method,
        "p": p,
        "seed": cfg.estimator.seed,
    }
    _write_json(out / "solve_result.json", record)
    _write_csv(
        out / "solve_trace.csv",
        ["iteration", "functional", "rel_residual", "step"],
        [[row.iteration, float(row.functional), float(row.rel_residual), float(row.step)]
         for row in result.trace],
    )
    print(json.dumps(record, indent=2, sort_keys=True))
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _suite_variational(cone, omega, weights, p_spec, cfg, inject: bool):
    est = cfg.estimator
    h0 = auto_initialize(cone, omega)
    K = wulff_shape(cone, omega, h0)
    rng = np.random.default_rng(est.seed + 1)
    rows = []
    for p in (0.5, 1.0, 2.0, -1.0):
        spv = sp_measure_vector(K, p, est)
        for rep in range(2):
            f = rng.uniform(-1.0, 1.0, size=len(omega))
            fd = fd_volume_derivative(K, f, p, cfg=est)
            analytic = float(-(1.0 / p) * np.sum(f * spv.values))
            budget = max(1e-5, 3.0 * float(np.sum(np.abs(f) * (3 * spv.std_errors + spv.error_bounds))))
            ok = abs(fd - analytic) <= budget
            rows.append([f"variational_p{p}_f{rep}", fd, analytic, budget, ok])
    return rows


def _suite_oracles(cone, omega, weights, p_spec, cfg, inject: bool):
    est = cfg.estimator
    h0 = auto_initialize(cone, omega)
    K = wulff_shape(cone, omega, h0)
    F = gaussian_boundary_weight(K, p=1.0)
    rows = []
    for i in range(len(omega)):
        direct = facet_gaussian_area(K, i, est)

        def F_i(points, active, i=i):
            vals = F(points, active)
            return np.where(active == i, vals, 0.0)

        radial = radial_transform_integral(K, F_i, est)
        e = np.zeros(len(omega))
        e[i] = 1.0
        fd = fd_covolume_derivative(K, e, 1.0, cfg=est)
        scale = max(abs(direct.value), 1e-12)
        budget = max(1e-4, combined_budget([direct, radial], 3.0) / scale + 1e-5)
        rows.append([f"oracle_facet{i}_reduction_vs_radial",
                     direct.value, radial.value,
                     budget * scale, abs(direct.value - radial.value) <= budget * scale])
        rows.append([f"oracle_facet{i}_reduction_vs_covolume_fd",
                     direct.value, fd,
                     budget * scale, abs(direct.value - fd) <= budget * scale])
    return rows


def _suite_inequalities(cone, omega, weights, p_spec, cfg, inject: bool):
    est = cfg.estimator
    p = p_spec if 0.0 < p_spec <= 1.0 else 1.0
    rng = np.random.default_rng(est.seed + 2)
    h0 = auto_initialize(cone, omega)
    rows = []
    for rep in range(12):
        hK = h0 * rng.uniform(0.6, 1.6, size=len(omega))
        hL = h0 * rng.uniform(0.6, 1.6, size=len(omega))
        K = wulff_shape(cone, omega, hK)
        L = wulff_shape(cone, omega, hL)
        chk = mixed_volume_inequality_check(K, L, p, est)
        if inject and rep == 0:
            # test mode: compare with the negated sign so the harness must fail
            ok = chk.lhs <= chk.rhs - chk.budget
        else:
            ok = chk.holds
        rows.append([f"mixed_volume_{rep}", chk.lhs, chk.rhs, chk.budget, ok])
        if rep < 6:
            t = float(rng.uniform(0.1, 0.9))
            cc = log_concavity_chain_check(K, L, p, t, est)
            rows.append([f"log_concavity_{rep}", cc.lhs, cc.rhs, cc.budget, cc.holds])
    return rows


def _suite_tail(cone, omega, weights, p_spec, cfg, inject: bool):
    est = cfg.estimator
    n = cone.dim
    rows = []
    for r in (1.0, 2.0, 4.0):
        bound = tail_bound(r, n)

        def outside(batch, r=r):
            return np.einsum("ij,ij->i", batch, batch) > r * r

        mc = mc_probability(outside, n, est)
        budget = 3.0 * mc.std_error
        rows.append([f"tail_mc_n{n}_r{r}", mc.value, bound, budget, mc.value <= bound + budget])
        if n == 1:
            exact = 2.0 * (1.0 - float(std_normal_cdf(r)))
            rows.append([f"tail_exact_n1_r{r}", exact, bound, 0.0, exact <= bound])
    return rows


_SUITES = {
    "variational": _suite_variational,
    "oracles": _suite_oracles,
    "inequalities": _suite_inequalities,
    "tail": _suite_tail,
}


def cmd_verify(args) -> int:
    spec = load_problem_spec(args.spec)
    cone, omega, weights, p, cfg = build_problem(spec, args)
    rows = _SUITES[args.suite](cone, omega, weights, p, cfg, args.inject_violation)
    out = Path(args.out)
    _write_csv(out / f"verify_{args.suite}.csv",
               ["check_id", "lhs", "rhs", "budget", "pass"],
               [[r[0], float(r[1]), float(r[2]), float(r[3]), bool(r[4])] for r in rows])
    failed = [r[0] for r in rows if not r[4]]
    for r in rows:
        print(f"{'PASS' if r[4] else 'FAIL'} {r[0]}: "
              f"lhs={float(r[1])!r} rhs={float(r[2])!r} budget={float(r[3])!r}")
    print(f"suite {args.suite}: {len(rows) - len(failed)}/{len(rows)} checks passed")
    return EXIT_SUITE_FAILED if failed else EXIT_OK


def cmd_nonunique(args) -> int:
    spec = load_problem_spec(args.spec)
    cone, omega, weights, p_spec, cfg = build_problem(spec, args)
    est = cfg.estimator
    p = args.p if args.p is not None else p_spec
    if p >= cone.dim:
        raise PGreaterEqualNError(p, cone.dim)
    v = omega.dirs[0]
    pair = find_nonunique_pair(cone, v, p, theta=args.theta, cfg=est)
    vol_K = gaussian_volume(pair.K, est)
    vol_L = gaussian_volume(pair.L, est)
    record = {
        "p": p,
        "theta": args.theta,
        "t1": pair.t1,
        "t2": pair.t2,
        "t_peak": pair.t_peak,
        "psi_level": pair.psi_level,
        "sp_K": pair.sp_K.value,
        "sp_L": pair.sp_L.value,
        "sp_gap": abs(pair.sp_K.value - pair.sp_L.value),
        "volume_K": vol_K.value,
        "volume_L": vol_L.value,
        "volume_gap": abs(vol_K.value - vol_L.value),
        "multimodal_scan": pair.multimodal_scan,
        "seed": est.seed,
    }
    out = Path(args.out)
    _write_json(out / "nonunique_pair.json", record)
    t_hi = truncation_radius(1e-12, cone.dim)
    ts = np.linspace(1e-4, t_hi, 256)
    _write_csv(out / "profile_curve.csv", ["t", "profile"],
               [[float(t), float(sp_profile(cone, v, p, float(t), est))] for t in ts])
    print(json.dumps(record, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_measure(args) -> int:
    spec = load_problem_spec(args.spec)
    cone, omega, weights, p, cfg = build_problem(spec, args)
    est = cfg.estimator
    try:
        h = np.array([float(x) for x in args.h.split(",")], dtype=float)
    except ValueError as exc:
        raise SpecError(f"could not parse --h values: {exc}") from exc
    K = wulff_shape(cone, omega, h)
    vol = gaussian_volume(K, est)
    cov = covolume(K, est)
    vol_cone = gaussian_volume(cone, est)
    spv = sp_measure_vector(K, p, est)
    record = {
        "h": [float(x) for x in h],
        "p": p,
        "volume": {"value": vol.value, "std_error": vol.std_error,
                   "method": vol.method, "error_bound": vol.error_bound},
        "covolume": {"value": cov.value, "std_error": cov.std_error,
                     "method": cov.method, "error_bound": cov.error_bound},
        "cone_volume": vol_cone.value,
        "identity_gap": vol.value + cov.value - vol_cone.value,
        "sp": {
            "values": [float(x) for x in spv.values],
            "std_errors": [float(x) for x in spv.std_errors],
            "error_bounds": [float(x) for x in spv.error_bounds],
            "method": spv.method,
        },
        "seed": est.seed,
    }
    out = Path(args.out)
    _write_json(out / "measure.json", record)
    print(json.dumps(record, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussmink",
        description="Gaussian Minkowski problems on pointed polyhedral cones",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--spec", required=True, help="problem spec JSON file")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override estimator seed")
        sp.add_argument("--samples", type=int, default=None, help="override Monte Carlo sample count")
        sp.add_argument("--path", choices=sorted(_PATH_ALIASES), default=None,
                        help="evaluation path: det2d or mc")

    sp_solve = sub.add_parser("solve", help="solve the inverse problem in a spec")
    common(sp_solve)
    sp_solve.add_argument("--tol", type=float, default=None, help="override residual tolerance")
    sp_solve.set_defaults(fn=cmd_solve)

    sp_verify = sub.add_parser("verify", help="run a named verification suite")
    common(sp_verify)
    sp_verify.add_argument("--suite", required=True, choices=sorted(_SUITES))
    sp_verify.add_argument("--inject-violation", action="store_true",
                           help="test mode: negate one check to prove failures surface")
    sp_verify.set_defaults(fn=cmd_verify)

    sp_non = sub.add_parser("nonunique", help="construct a non-uniqueness pair")
    common(sp_non)
    sp_non.add_argument("--p", type=float, default=None, help="override the exponent")
    sp_non.add_argument("--theta", type=float, default=0.5,
                        help="level fraction of the profile peak")
    sp_non.set_defaults(fn=cmd_nonunique)

    sp_meas = sub.add_parser("measure", help="measure a Wulff shape at given supports")
    common(sp_meas)
    sp_meas.add_argument("--h", required=True, help="comma separated support values")
    sp_meas.set_defaults(fn=cmd_measure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (SpecError, GaussMinkError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

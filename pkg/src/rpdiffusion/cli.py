"""Command-line entry point: ``rpdiff <command> [options]``.

Tolerances can be overridden through environment variables named
RPDIFF_<OPTION> (for example RPDIFF_TOL, RPDIFF_GTOL, RPDIFF_SET_TOL); an
explicit flag wins over the environment. Every JSON result echoes the
resolved configuration. Exit status: 0 success, 1 invalid input, 2 numerical
failure.
"""
from __future__ import annotations

import argparse
import os
import platform
import sys
from importlib import metadata
from pathlib import Path

import numpy as np

from . import convergence, diffusion_mean, eigen, extrinsic, heat_kernel, io, simulation, special
from .errors import NumericalError, ValidationError
from .optim import OptimizerSettings

ENV_PREFIX = "RPDIFF_"
PACKAGE = "artifact"


def version_string() -> str:
    try:
        v = metadata.version(PACKAGE)
    except metadata.PackageNotFoundError:
        v = "unknown"
    return (f"rpdiff {v} (python {platform.python_version()}, numpy {np.__version__}, "
            f"{platform.system().lower()}-{platform.machine()})")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _env(name: str, default, cast=float):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None or raw == "":
        return default
    try:
        return cast(raw)
    except ValueError:
        raise ValidationError(f"{ENV_PREFIX}{name.upper()}={raw!r} is not a valid {cast.__name__}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p):
    g = p.add_argument_group("global")
    g.add_argument("--seed", type=int, default=_env("seed", 0, int))
    g.add_argument("--threads", type=int, default=_env("threads", 1, int))
    g.add_argument("--out", default=None, help="output path (default stdout)")
    g.add_argument("--format", choices=["json", "csv"], default=None)


def _kernel_opts(p):
    g = p.add_argument_group("kernel")
    g.add_argument("--tol", type=float, default=_env("tol", 1e-12))
    g.add_argument("--max-terms", type=int, default=_env("max_terms", 500, int))
    g.add_argument("--t-min", type=float, default=_env("t_min", None))


def _opt_opts(p):
    d = OptimizerSettings()
    g = p.add_argument_group("optimizer")
    g.add_argument("--restarts", type=int, default=_env("restarts", d.n_random, int),
                   help="number of random starts")
    g.add_argument("--gtol", type=float, default=_env("gtol", d.g_tol))
    g.add_argument("--stall-gtol", type=float, default=_env("stall_gtol", d.stall_g_tol))
    g.add_argument("--max-iter", type=int, default=_env("max_iter", d.max_iter, int))
    g.add_argument("--set-tol", type=float, default=_env("set_tol", d.set_tol))
    g.add_argument("--cluster-radius", type=float, default=_env("cluster_radius", d.cluster_radius))
    g.add_argument("--max-support-starts", type=int,
                   default=_env("max_support_starts", d.max_support_starts, int))


def _input_opts(p, required=True):
    p.add_argument("--input", required=required, help="CSV or JSON point cloud")
    p.add_argument("--r", type=float, default=None, help="project the input onto radius r")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rpdiff", description="Diffusion means on real projective spaces.")
    parser.add_argument("--version", action="version", version=version_string())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gegenbauer", help="evaluate C_l^{(m-1)/2}(z) or check the bound")
    p.add_argument("--l", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--z", type=float)
    p.add_argument("--check-bounds", action="store_true")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--max-l", type=int, default=50)
    p.add_argument("--max-m", type=int, default=10)
    _common(p)

    p = sub.add_parser("heatkernel", help="heat kernel value or oracle checks")
    p.add_argument("--space", choices=["sphere", "rp"], default="rp")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--t", type=float)
    p.add_argument("--cos", type=float, help="zonal variable <x,y>/r^2")
    p.add_argument("--check", choices=["normalization", "folddown", "taylor"])
    p.add_argument("--C", type=float, default=_env("taylor_c", 2.0), help="Taylor check constant")
    p.add_argument("--samples", type=int, default=1000)
    _kernel_opts(p)
    _common(p)

    p = sub.add_parser("simulate", help="geodesic random walk endpoints or MC kernel check")
    p.add_argument("--start-file", required=True)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--paths", type=int, default=10_000)
    p.add_argument("--check", action="store_true")
    p.add_argument("--bins", type=int, default=10)
    _kernel_opts(p)
    _common(p)

    for name, text in (("diffmean", "diffusion t-mean set"), ("intrinsicmean", "intrinsic mean set")):
        p = sub.add_parser(name, help=text)
        _input_opts(p)
        if name == "diffmean":
            p.add_argument("--t", type=float, required=True)
            _kernel_opts(p)
        _opt_opts(p)
        _common(p)

    p = sub.add_parser("limit", help="eigen-predicted long-time limit")
    _input_opts(p)
    p.add_argument("--mult-tol", type=float, default=_env("mult_tol", eigen.DEFAULT_MULT_TOL))
    _common(p)

    p = sub.add_parser("embed", help="embedded coordinates Phi_r of the input points")
    _input_opts(p)
    _common(p)

    p = sub.add_parser("extrinsicmean", help="extrinsic mean in the isometric embedding")
    _input_opts(p)
    p.add_argument("--degeneracy-tol", type=float, default=_env("degeneracy_tol", 1e-10))
    p.add_argument("--proj-tol", type=float, default=_env("proj_tol", 1e-8))
    _opt_opts(p)
    _common(p)

    p = sub.add_parser("check-embedding", help="chordal identity and isometry checks")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--pairs", type=int, default=10_000)
    _common(p)

    p = sub.add_parser("converge", help="long-time convergence sweep")
    _input_opts(p)
    p.add_argument("--tgrid", type=_floats, default=list(convergence.DEFAULT_GRID),
                   help="diffusion times in units of r^2")
    p.add_argument("--final-tol", type=float, default=_env("final_tol", 1e-3))
    p.add_argument("--noise-tol", type=float, default=_env("noise_tol", 1e-4))
    p.add_argument("--mult-tol", type=float, default=_env("mult_tol", eigen.DEFAULT_MULT_TOL))
    p.add_argument("--baseline", action="store_true", help="also report the intrinsic-mean baseline")
    _kernel_opts(p)
    _opt_opts(p)
    _common(p)
    p.set_defaults(out="sweep.csv")
    return parser


# --- helpers ---

def _settings(a) -> OptimizerSettings:
    return OptimizerSettings(n_random=a.restarts, g_tol=a.gtol, stall_g_tol=a.stall_gtol,
                             max_iter=a.max_iter, set_tol=a.set_tol, cluster_radius=a.cluster_radius,
                             max_support_starts=a.max_support_starts, seed=a.seed, threads=a.threads)


def _kcfg(a, m: int, r: float) -> heat_kernel.KernelConfig:
    return heat_kernel.KernelConfig(m, r, a.tol, a.max_terms, a.t_min)


def _pts(points) -> list:
    return [np.asarray(p.coords).tolist() for p in points]


def _estimate_json(est) -> dict:
    diag = dict(est.diagnostics)
    return {"t": est.t, "radius": est.radius, "objective": est.objective,
            "minimizers": _pts(est.minimizers), "near_optimal": _pts(est.near_optimal),
            "diagnostics": diag}


def _config(a) -> dict:
    skip = {"threads", "format", "func"}
    return {k: v for k, v in vars(a).items() if k not in skip}


# --- commands; each returns (json payload, csv text or None, default format) ---

def cmd_gegenbauer(a):
    if a.check_bounds:
        rep = special.bound_check(range(2, a.max_m + 1), range(0, a.max_l + 1), a.step)
        rep["passed"] = rep["violations"] == 0
        rep["max_ratio_at"] = list(rep["max_ratio_at"]) if rep["max_ratio_at"] else None
        return rep, None
    if a.l is None or a.m is None or a.z is None:
        raise ValidationError("gegenbauer needs --l, --m and --z (or --check-bounds)")
    special.GegenbauerParams(a.l, a.m)
    return {"l": a.l, "m": a.m, "z": a.z, "value": float(special.gegenbauer(a.l, a.m, a.z))}, None


def cmd_heatkernel(a):
    cfg = _kcfg(a, a.m, a.r)
    if a.check == "normalization":
        ts = [a.t] if a.t is not None else [f * a.r * a.r for f in (0.2, 0.5, 1.0, 5.0)]
        rows = [{"t": t, "space": a.space, "error": heat_kernel.normalization_error(cfg, t, a.space)}
                for t in ts]
        return {"check": "normalization", "threshold": 1e-6, "rows": rows,
                "passed": all(row["error"] < 1e-6 for row in rows)}, None
    if a.check == "folddown":
        t = 0.1 * a.r * a.r if a.t is None else a.t
        z = np.random.default_rng(a.seed).uniform(-1.0, 1.0, a.samples)
        err = float(np.max(heat_kernel.folddown_error(cfg, z, t)))
        return {"check": "folddown", "t": t, "samples": a.samples, "max_error": err,
                "threshold": 1e-8, "passed": err < 1e-8}, None
    if a.check == "taylor":
        if a.t is None:
            raise ValidationError("taylor check needs --t")
        tf = heat_kernel.TermFunctions(cfg, a.t / (a.r * a.r))
        rep = heat_kernel.taylor_remainder_check(tf, 0.3 if a.cos is None else a.cos, C=a.C)
        return {"check": "taylor", **vars(rep)}, None
    if a.t is None or a.cos is None:
        raise ValidationError("heatkernel needs --t and --cos (or --check)")
    fn = heat_kernel.rp_kernel_values if a.space == "rp" else heat_kernel.sphere_kernel_values
    if abs(a.cos) > 1.0 + 1e-12:
        raise ValidationError(f"--cos must lie in [-1, 1], got {a.cos}")
    ev = fn(cfg, a.cos, a.t)
    return {"value": float(ev.value), "terms_used": ev.terms_used, "tail_bound": ev.tail_bound}, None


def cmd_simulate(a):
    start_dist = io.load_points(a.start_file, a.r)
    start = start_dist.points[0]
    wcfg = simulation.WalkConfig(a.steps, a.t, a.seed, a.paths)
    if a.check:
        rep = simulation.kernel_mc_check(start, a.t, wcfg, a.bins, _kcfg(a, start.m, start.radius))
        return vars(rep), None
    ends = simulation.walk_paths(start.coords, start.radius, wcfg)
    payload = {"radius": start.radius, "endpoints": ends.tolist()}
    return payload, io.points_csv(ends), "csv"


def cmd_diffmean(a):
    dist = io.load_points(a.input, a.r)
    est = diffusion_mean.estimate_mean_set(dist, a.t, _kcfg(a, dist.m, dist.radius), _settings(a))
    return _estimate_json(est), io.points_csv(np.array(_pts(est.minimizers)))


def cmd_intrinsicmean(a):
    dist = io.load_points(a.input, a.r)
    est = diffusion_mean.intrinsic_mean(dist, _settings(a))
    out = _estimate_json(est)
    out.pop("t")
    return out, io.points_csv(np.array(_pts(est.minimizers)))


def cmd_limit(a):
    dist = io.load_points(a.input, a.r)
    sm = eigen.second_moment(dist, a.mult_tol)
    pred = eigen.limit_set_prediction(sm)
    return {"eigenvalues": sm.eigenvalues.tolist(), "gap": sm.gap, "multiplicity": pred.multiplicity,
            "flag": pred.flag, "limit_points": _pts(pred.points)}, io.points_csv(np.array(_pts(pred.points)))


def cmd_embed(a):
    dist = io.load_points(a.input, a.r)
    Y = extrinsic.embed_array(dist.coords, dist.radius)
    return {"radius": dist.radius, "embedded": Y.tolist()}, io.points_csv(Y, prefix="e"), "csv"


def cmd_extrinsicmean(a):
    dist = io.load_points(a.input, a.r)
    res = extrinsic.extrinsic_mean_rescaled(dist, _settings(a), degeneracy_tol=a.degeneracy_tol,
                                            proj_tol=a.proj_tol)
    point = None if res.point is None else np.asarray(res.point.coords).tolist()
    payload = {"point": point, "status": res.status, "embedded_mean_norm": res.embedded_mean_norm,
               "projection_distance": res.projection_distance, "radius": dist.radius,
               "diagnostics": res.diagnostics}
    return payload, None if point is None else io.points_csv(np.array([point]))


def cmd_check_embedding(a):
    if a.m < 1 or a.pairs < 1:
        raise ValidationError("--m and --pairs must be positive")
    err = extrinsic.chordal_identity_errors(a.m, a.pairs, a.seed)
    iso = extrinsic.isometry_errors(a.m, min(a.pairs, 1000), seed=a.seed) if a.m >= 2 else np.zeros(1)
    return {"m": a.m, "pairs": a.pairs, "max_abs_err": float(err.max()), "threshold": 1e-12,
            "isometry_max_rel_err": float(iso.max()), "isometry_threshold": 1e-5,
            "passed": bool(err.max() < 1e-12 and iso.max() < 1e-5)}, None


def cmd_converge(a):
    dist = io.load_points(a.input, a.r)
    r = dist.radius
    spec = convergence.SweepSpec(dist, [g * r * r for g in a.tgrid], _kcfg(a, dist.m, r), _settings(a),
                                 a.seed, a.final_tol, a.noise_tol, a.mult_tol)
    sweep = convergence.run_sweep(spec)
    rows = [[row.t, row.dist_to_limit, row.dist_to_extrinsic if row.dist_to_extrinsic is not None
             else float("nan"), row.objective] for row in sweep.rows]
    csv_text = io.format_csv(["t", "dist_to_limit", "dist_to_extrinsic", "objective"], rows)
    ext = sweep.extrinsic
    payload = {"rows": [{"t": row[0], "dist_to_limit": row[1], "dist_to_extrinsic": row[2],
                         "objective": row[3]} for row in rows],
               "limit_points": _pts(sweep.limit_prediction.points),
               "extrinsic": {"status": ext.status, "embedded_mean_norm": ext.embedded_mean_norm,
                             "point": None if ext.point is None else np.asarray(ext.point.coords).tolist()},
               "verdict": sweep.verdict}
    if ext.point is not None and sweep.limit_prediction.unique:
        payload["extrinsic"]["dist_to_limit"] = convergence.min_res([ext.point],
                                                                    sweep.limit_prediction.points[0])
    if a.baseline:
        payload["baseline"] = convergence.short_time_baseline(spec, sweep)
    Path(a.out).write_text(csv_text)
    return payload, None, "json", True


COMMANDS = {
    "gegenbauer": cmd_gegenbauer, "heatkernel": cmd_heatkernel, "simulate": cmd_simulate,
    "diffmean": cmd_diffmean, "intrinsicmean": cmd_intrinsicmean, "limit": cmd_limit,
    "embed": cmd_embed, "extrinsicmean": cmd_extrinsicmean,
    "check-embedding": cmd_check_embedding, "converge": cmd_converge,
}


def run(argv=None) -> str:
    """Parse ``argv``, run the command and return the rendered output text."""
    a = build_parser().parse_args(argv)
    if a.threads < 1:
        raise ValidationError("--threads must be >= 1")
    res = COMMANDS[a.command](a)
    payload, csv_text = res[0], res[1]
    fmt = a.format or (res[2] if len(res) > 2 else "json")
    to_stdout = len(res) > 3 and res[3]
    if fmt == "csv":
        if csv_text is None:
            raise ValidationError(f"{a.command} has no CSV output")
        text = csv_text
    else:
        text = io.dumps({"command": a.command, "config": _config(a), "result": payload})
    if a.out and not to_stdout:
        Path(a.out).write_text(text)
        return ""
    return text


def main(argv=None) -> int:
    try:
        text = run(argv)
    except ValidationError as exc:
        print(f"error: {exc}".splitlines()[0], file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}".splitlines()[0], file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}".splitlines()[0], file=sys.stderr)
        return 1
    if text:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

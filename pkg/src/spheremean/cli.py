"""Command line front end.

Exit codes: 0 pass, 1 semantic failure (range or extension), 2 input error,
3 unsupported configuration.

"""

import argparse
import json
import logging
import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from spheremean.config import SCHEMA, Manifest, RunConfig
from spheremean.darboux import extension_check, solve_modes, vanishing_diagnostic
from spheremean.errors import DimensionError, InputError, SpheremeanError
from spheremean.fileio import (
    fmt,
    make_json_safe,
    read_data,
    read_phantom,
    write_csv,
    write_data,
    write_json,
    write_mode_dumps,
    write_profile_plot_data,
    write_residual_plot_data,
)
from spheremean.harmonics import sphere_grid
from spheremean.opalg import verify_lemma
from spheremean.rangecond import moment_test, orthogonality_residuals
from spheremean.specfun import bessel_zeros
from spheremean.transform import (
    Phantom,
    demo_phantom,
    forward_data,
    perturbation_bump,
    t_grid,
)

logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3

# command line flag -> RunConfig field
CONFIG_FLAGS = {
    "dimension": "dimension",
    "mmax": "m_max",
    "zeros": "q_max",
    "eigs": "eigs",
    "t_max": "t_max",
    "t_samples": "t_samples",
    "r_samples": "r_samples",
    "angular": "angular",
    "quad": "quad_resolution",
    "tol": "tol",
    "seed": "seed",
}

# profiles below this fraction of the largest one carry no vanishing verdict
NEGLIGIBLE_PROFILE = 1e-6


def exit_code(verdict: bool) -> int:
    return EXIT_PASS if verdict else EXIT_FAIL


def load_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then the command line flags."""
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {field: getattr(args, flag, None) for flag, field in CONFIG_FLAGS.items()}
    return config.merge(**overrides).validate()


def emit(payload: dict, path: str | None, manifest: Manifest) -> None:
    """Write a report to `path`, or to stdout when no path is given."""
    if path:
        write_json(payload, path, manifest)
        return
    payload = {"schema": SCHEMA, **payload, "manifest": manifest.finish().to_dict()}
    print(json.dumps(make_json_safe(payload), indent=2))


def plot_path(report: str | None, suffix: str) -> Path | None:
    if report is None:
        logger.warning("plot data needs --report to locate its output")
        return None
    report = Path(report)
    return report.with_name(f"{report.stem}_{suffix}.csv")


@contextmanager
def stage(name: str) -> Iterator[None]:
    try:
        yield
    except SpheremeanError as err:
        logger.error("stage %s failed: %s", name, err)
        raise


def _require(value: str | None, flag: str) -> str:
    if not value:
        raise InputError(f"please provide {flag}", flag)
    return value


def _manifest(command: str, config: RunConfig, *inputs: str | None) -> Manifest:
    manifest = Manifest(command, config.to_dict())
    for path in inputs:
        if path:
            manifest.add_input(path)
    return manifest


def load_phantom(path: str | None, config: RunConfig) -> tuple[Phantom, RunConfig]:
    """Phantom file, or the demo phantom, with the config in its dimension."""
    ph = read_phantom(path) if path else demo_phantom(config.dimension)
    if ph.dimension != config.dimension:
        config = config.merge(dimension=ph.dimension).validate()
    return ph, config


def cmd_forward(args: argparse.Namespace, config: RunConfig) -> int:
    output = _require(args.output, "--output")
    ph, config = load_phantom(args.input, config)
    manifest = _manifest("forward", config, args.input)
    g = forward_data(
        ph,
        sphere_grid(ph.dimension, config.angular_resolution),
        t_grid(config.t_max, config.t_samples),
        sphere_grid(ph.dimension, config.quad),
    )
    write_data(g, output, manifest)
    return EXIT_PASS


def cmd_range_test(args: argparse.Namespace, config: RunConfig) -> int:
    path = _require(args.input, "--input")
    manifest = _manifest("range-test", config, path)
    report = orthogonality_residuals(read_data(path), config.m_max, config.q_max, config.tol)
    emit(report.to_dict(), args.report, manifest)
    if args.emit_plot_data and (target := plot_path(args.report, "residuals")):
        write_residual_plot_data(report, target)
    return exit_code(report.verdict)


def cmd_moment_test(args: argparse.Namespace, config: RunConfig) -> int:
    path = _require(args.input, "--input")
    manifest = _manifest("moment-test", config, path)
    report = moment_test(read_data(path), config.moment_kmax, config.tol)
    emit(report.to_dict(), args.report, manifest)
    return exit_code(report.verdict)


def cmd_darboux_solve(args: argparse.Namespace, config: RunConfig) -> int:
    path = _require(args.input, "--input")
    manifest = _manifest("darboux-solve", config, path)
    threshold = config.sigma_factor * config.tol
    solutions = solve_modes(
        read_data(path), config.m_max, config.eigs, config.r_samples, threshold
    )
    verdict = all(s.verdict for s in solutions)
    payload = {
        "params": {"m_max": config.m_max, "eigs": config.eigs, "sigma_threshold": threshold},
        "modes": [s.to_dict() for s in solutions],
        "sigma": max(s.sigma for s in solutions),
        "verdict": "pass" if verdict else "fail",
    }
    emit(payload, args.report, manifest)
    if args.dump_modes:
        write_mode_dumps(solutions, args.dump_modes)
    if args.emit_plot_data and (target := plot_path(args.report, "profiles")):
        write_profile_plot_data(solutions, target)
    return exit_code(verdict)


def _extension(g, ph, config: RunConfig):
    return extension_check(
        g,
        ph,
        config.m_max,
        config.eigs,
        q_max=config.q_max,
        tol=config.tol,
        extension_tol=config.extension_tol,
        sigma_factor=config.sigma_factor,
        velocity_factor=config.velocity_factor,
        r_samples=config.r_samples,
        quad_resolution=config.quad,
        check_centers=config.check_centers,
        interior_samples=config.interior_samples,
        seed=config.seed,
    )


def cmd_extend_check(args: argparse.Namespace, config: RunConfig) -> int:
    path = _require(args.input, "--input")
    manifest = _manifest("extend-check", config, path, args.phantom)
    ph = read_phantom(args.phantom) if args.phantom else None
    report = _extension(read_data(path), ph, config)
    emit(report.to_dict(), args.report, manifest)
    if args.emit_plot_data and (target := plot_path(args.report, "profiles")):
        write_profile_plot_data(report.solutions, target)
    return exit_code(report.verdict)


def vanishing_stage(solutions, orders: int, vanishing_tol: float) -> dict:
    """Vanishing diagnostic of every recovered profile at ``r = 1``."""
    ref = max((float(np.abs(s.profile.values).max()) for s in solutions), default=0.0)
    entries, verdict = [], True
    for s in solutions:
        m, k = s.index
        if float(np.abs(s.profile.values).max()) <= NEGLIGIBLE_PROFILE * ref:
            entries.append({"m": m, "k": k, "skipped": True})
            continue
        estimates = vanishing_diagnostic(s.profile, orders, vanishing_tol)
        ok = all(e.tag != "nonvanishing" for e in estimates)
        verdict = verdict and ok
        entries.append(
            {"m": m, "k": k, "estimates": [e.to_dict() for e in estimates], "verdict": ok}
        )
    return {"orders": orders, "modes": entries, "verdict": "pass" if verdict else "fail"}


def cmd_pipeline(args: argparse.Namespace, config: RunConfig) -> int:
    stages: dict[str, dict] = {}
    with stage("forward"):
        ph, config = load_phantom(args.input, config)
        manifest = _manifest("pipeline", config, args.input)
        g = forward_data(
            ph,
            sphere_grid(ph.dimension, config.angular_resolution),
            t_grid(config.t_max, config.t_samples),
            sphere_grid(ph.dimension, config.quad),
        )
        if args.output:
            write_data(g, args.output, _manifest("forward", config, args.input))
        stages["forward"] = {"centers": g.grid.size, "t_samples": g.t.size, "verdict": "pass"}
    if args.perturb:
        g = g + perturbation_bump(g.grid, g.t, args.perturb)
        logger.info("injected perturbation of amplitude %g", args.perturb)
    with stage("range-test"):
        stages["range"] = orthogonality_residuals(
            g, config.m_max, config.q_max, config.tol
        ).to_dict()
    if g.dimension == 2:
        with stage("moment-test"):
            stages["moment"] = moment_test(g, config.moment_kmax, config.tol).to_dict()
    with stage("extend-check"):
        ext = _extension(g, ph, config)
        stages["darboux"] = {
            "modes": ext.modes,
            "sigma": ext.sigma,
            "sigma_threshold": ext.sigma_threshold,
            "verdict": "pass" if ext.checks["sigma"] else "fail",
        }
        stages["extension"] = ext.to_dict()
    with stage("vanishing"):
        orders = min(3, config.r_samples // 2 - 4)
        stages["vanishing"] = vanishing_stage(ext.solutions, orders, config.vanishing_tol)
    verdict = all(s["verdict"] == "pass" for s in stages.values())
    payload = {
        "params": {"perturb": args.perturb, "dimension": g.dimension},
        "stages": stages,
        "verdict": "pass" if verdict else "fail",
    }
    emit(payload, args.report, manifest)
    if args.emit_plot_data:
        if target := plot_path(args.report, "profiles"):
            write_profile_plot_data(ext.solutions, target)
    return exit_code(verdict)


def cmd_lemma_verify(args: argparse.Namespace, config: RunConfig) -> int:
    m_max = args.mmax if args.mmax is not None else 12
    manifest = _manifest("lemma-verify", config)
    report = verify_lemma(args.nmax, m_max)
    emit({"params": {"n_max": args.nmax, "m_max": m_max}, **report.to_dict()}, args.report, manifest)
    return exit_code(report.verdict)


def cmd_bessel_zeros(args: argparse.Namespace, config: RunConfig) -> int:
    try:
        nu = Fraction(args.nu)
    except (ValueError, ZeroDivisionError) as err:
        raise InputError("order must be a rational number", "--nu") from err
    table = bessel_zeros(float(nu), args.count)
    rows = [(q, z) for q, z in enumerate(table.zeros, start=1)]
    if args.output:
        write_csv(args.output, ("index", "zero"), rows)
    else:
        print("index,zero")
        for q, z in rows:
            print(f"{q},{fmt(z)}")
    return EXIT_PASS


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dimension", type=int, default=None, help="space dimension, 2 or 3")
    common.add_argument("--mmax", type=int, default=None, help="highest harmonic degree")
    common.add_argument("--zeros", type=int, default=None, help="Bessel zeros per degree")
    common.add_argument("--eigs", type=int, default=None, help="eigenfunctions per mode")
    common.add_argument("--t-max", type=float, default=None)
    common.add_argument("--t-samples", type=int, default=None)
    common.add_argument("--r-samples", type=int, default=None)
    common.add_argument("--angular", type=int, default=None, help="center grid resolution")
    common.add_argument("--quad", type=int, default=None, help="quadrature resolution")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--input", default=None)
    common.add_argument("--output", default=None)
    common.add_argument("--report", default=None)
    common.add_argument("--config", default=None, help="JSON config file")
    common.add_argument("--emit-plot-data", action="store_true")
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="repeat for more detail"
    )

    parser = argparse.ArgumentParser(
        prog="spheremean",
        description="Spherical mean transform with centers on the unit sphere: "
        "forward data, range conditions and backward Darboux solves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    add("forward", cmd_forward, "compute boundary data of a phantom")
    add("range-test", cmd_range_test, "test the orthogonality conditions")
    add("moment-test", cmd_moment_test, "test the moment conditions (n = 2)")
    p = add("darboux-solve", cmd_darboux_solve, "solve the backward Darboux problem")
    p.add_argument("--dump-modes", default=None, help="directory of per-mode CSV files")
    p = add("extend-check", cmd_extend_check, "verify the global extension")
    p.add_argument("--phantom", default=None, help="ground truth phantom JSON")
    p = add("pipeline", cmd_pipeline, "forward, range, solve, extension and vanishing")
    p.add_argument("--perturb", type=float, default=None, help="bump amplitude added to the data")
    p = add("lemma-verify", cmd_lemma_verify, "verify the operator system nondegeneracy")
    p.add_argument("--nmax", type=int, default=6)
    p = add("bessel-zeros", cmd_bessel_zeros, "print zeros of J_nu as CSV")
    p.add_argument("--nu", required=True, help="order, e.g. 1/2")
    p.add_argument("--count", type=_positive_int, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = max(logging.DEBUG, logging.WARNING - 10 * args.verbose)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = load_config(args)
        return args.func(args, config)
    except DimensionError as err:
        logger.error("%s", err)
        return EXIT_UNSUPPORTED
    except SpheremeanError as err:
        logger.error("%s", err)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

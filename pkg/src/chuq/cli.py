"""Command-line runner for every solver plus the diagnostic table writers.

Configuration is a flat ``key = value`` text file with command-line
overrides (``--key value``); precedence is flags > file > defaults.  Exit
status: 0 success, 1 input error, 2 solver did not reach the residual
tolerance (artifacts are still written).
"""

import argparse
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import fileio, gpc, wavelet
from .field import ScalarField
from .galerkin import run_galerkin
from .gpc import HermiteGaussian, LegendreUniform
from .inpaint import InpaintProblem, SolverConfig, run_inpaint
from .multiphase import reconstruct, run_multiphase
from .perturbation import (first_order_variance, ordering_ratio,
                           perturbation_mean, run_perturbation)
from .uq import NoiseSpec, mean_field, monte_carlo, variance_field

MODES = ("inpaint", "inpaint-gray", "galerkin", "perturb", "mc",
         "gpc-diag", "wavelet-diag")

__all__ = ["RunConfig", "build_config", "parse_config_file", "run", "main"]


@dataclass
class RunConfig:
    mode: str
    image: str | None = None
    mask: str | None = None
    out: str = "."
    eps: float = 1.0
    lambda0: float = 1.0
    dt: float = 0.1
    c1: float | None = None
    c2: float | None = None
    max_steps: int = 500
    tol: float = 1e-6
    sigma: float = 1.0
    delta: float = 0.1
    order: int = 1
    gray_levels: int = 4
    samples: int = 100
    seed: int = 0
    noise: str = "gaussian"
    eps_schedule: str | None = None
    pgm16: bool = False


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_NUMERIC_KEYS = ("eps", "lambda0", "dt", "c1", "c2", "max_steps", "tol",
                 "sigma", "delta", "order", "gray_levels", "samples", "seed")


class ConfigError(ValueError):
    pass


def parse_config_file(path) -> dict[str, str]:
    """Flat key = value lines; # starts a comment; unknown keys are rejected."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {body!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key == "mode":
            raise ConfigError(f"{path}:{lineno}: mode is set by the subcommand")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _parse_schedule(text: str):
    """'6.0:1000,0.5:1000' -> ((6.0, 1000), (0.5, 1000))."""
    stages = []
    for part in text.split(","):
        piece = part.strip()
        if not piece:
            continue
        try:
            eps_str, steps_str = piece.split(":")
            stages.append((float(eps_str), int(steps_str)))
        except ValueError:
            raise ConfigError(
                f"eps_schedule: expected eps:steps pairs, got {piece!r}") from None
    if not stages:
        raise ConfigError("eps_schedule: no stages given")
    return tuple(stages)


def _convert(key: str, raw: str):
    if raw == "":
        raise ConfigError(f"{key}: empty value")
    try:
        if key in ("image", "mask", "out", "noise", "eps_schedule"):
            return raw
        if key in ("max_steps", "order", "gray_levels", "samples", "seed"):
            return int(raw)
        if key == "pgm16":
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse value {raw!r}") from None


def build_config(mode: str, file_values: dict[str, str],
                 flag_values: dict[str, object]) -> RunConfig:
    """Merge defaults, config file and flags, then validate."""
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {mode!r}")
    config = RunConfig(mode=mode)
    for key, raw in file_values.items():
        setattr(config, key, _convert(key, raw))
    for key, value in flag_values.items():
        if value is not None:
            setattr(config, key, value)

    for key in ("eps", "dt"):
        if not getattr(config, key) > 0:
            raise ConfigError(f"{key} must be positive, got {getattr(config, key)}")
    for key in ("lambda0", "tol", "sigma", "delta"):
        if getattr(config, key) < 0:
            raise ConfigError(f"{key} must be nonnegative, got {getattr(config, key)}")
    for key in ("max_steps", "samples"):
        if getattr(config, key) < 1:
            raise ConfigError(f"{key} must be at least 1, got {getattr(config, key)}")
    if config.order < 0:
        raise ConfigError(f"order must be nonnegative, got {config.order}")
    if not 2 <= config.gray_levels <= 256:
        raise ConfigError(f"gray_levels must be in 2..256, got {config.gray_levels}")
    if config.noise not in ("gaussian", "uniform"):
        raise ConfigError(f"noise must be gaussian or uniform, got {config.noise!r}")
    if config.c1 is not None and not config.c1 > 0:
        raise ConfigError(f"c1 must be positive, got {config.c1}")
    if config.c2 is not None and not config.c2 > 0:
        raise ConfigError(f"c2 must be positive, got {config.c2}")
    if config.eps_schedule is not None:
        _parse_schedule(config.eps_schedule)  # validate early
    if config.mode == "perturb" and not config.delta > 0:
        raise ConfigError("delta must be positive for perturb runs")
    if config.mode not in ("gpc-diag", "wavelet-diag"):
        if config.image is None:
            raise ConfigError(f"mode {config.mode} requires an image (key: image)")
        if config.mask is None:
            raise ConfigError(f"mode {config.mode} requires a mask (key: mask)")
    return config


def _solver_config(config: RunConfig, schedule_ok: bool = False) -> SolverConfig:
    schedule = None
    if schedule_ok and config.eps_schedule is not None:
        schedule = _parse_schedule(config.eps_schedule)
    return SolverConfig(dt=config.dt, c1=config.c1, c2=config.c2,
                        max_steps=config.max_steps, tol=config.tol,
                        eps_schedule=schedule)


def _load_problem(config: RunConfig) -> InpaintProblem:
    image_path, mask_path = Path(config.image), Path(config.mask)
    if not image_path.exists():
        raise ConfigError(f"image file not found: {image_path}")
    if not mask_path.exists():
        raise ConfigError(f"mask file not found: {mask_path}")
    f = fileio.load_image(image_path)
    mask = fileio.load_mask(mask_path)
    if (mask.width, mask.height) != (f.width, f.height):
        raise ConfigError(
            f"mask {mask.width}x{mask.height} does not match image {f.width}x{f.height}")
    return InpaintProblem(f=f, mask=mask, lambda0=config.lambda0, eps=config.eps)


def _write_field_outputs(outdir: Path, config: RunConfig, result: ScalarField,
                         modes: list[np.ndarray], variance: np.ndarray | None):
    maxval = 65535 if config.pgm16 else 255
    fileio.write_pgm(outdir / "result.pgm", result.values, maxval)
    for k, values in enumerate(modes):
        fileio.write_f64(outdir / f"mode_{k}.f64", values)
    if variance is not None:
        fileio.write_f64(outdir / "variance.f64", variance)
        fileio.write_pgm(outdir / "stddev.pgm", np.sqrt(variance), maxval)


def _write_csv(path, header: str, rows) -> None:
    with open(path, "w", encoding="ascii") as out:
        out.write(header + "\n")
        for row in rows:
            out.write(",".join("%.17g" % v if isinstance(v, float) else str(v)
                               for v in row) + "\n")


def _run_gpc_diag(config: RunConfig, outdir: Path) -> int:
    order = max(config.order, 1)
    families = (("hermite", HermiteGaussian(sigma=config.sigma, max_degree=max(order, 8))),
                ("legendre", LegendreUniform(max_degree=max(order, 8))))
    for name, family in families:
        tensors = gpc.moment_tensors(family, order)
        _write_csv(outdir / f"gpc_{name}_gamma.csv", "n,gamma",
                   [(n, float(tensors.gamma[n])) for n in range(order + 1)])
        _write_csv(outdir / f"gpc_{name}_e3.csv", "i,p,j,value",
                   [(i, p, j, float(tensors.e3[i, p, j]))
                    for i in range(order + 1)
                    for p in range(order + 1)
                    for j in range(order + 1)])
        _write_csv(outdir / f"gpc_{name}_e4.csv", "i,p,q,j,value",
                   [(i, p, q, j, float(tensors.e4[i, p, q, j]))
                    for i in range(order + 1)
                    for p in range(order + 1)
                    for q in range(order + 1)
                    for j in range(order + 1)])
    rows = []
    for n in range(2, 9, 2):
        err_h = gpc.projection_l2_error(math.exp, families[0][1], n)
        err_l = gpc.projection_l2_error(math.exp, families[1][1], n)
        rows.append((n, err_h, err_l))
    _write_csv(outdir / "gpc_projection_error.csv",
               "degree,hermite_error,legendre_error", rows)
    return 0


def _run_wavelet_diag(config: RunConfig, outdir: Path) -> int:
    levels = max(config.order, 0)
    coeffs = wavelet.wavelet_project(lambda z: z, levels)
    _write_csv(outdir / "wavelet_coefficients.csv", "kind,j,k,coefficient",
               [(kind, j, k, float(c)) for (kind, j, k), c in coeffs.items()])
    basis = wavelet.HaarBasis(levels)
    rows = [(kind, j, k, p, wavelet.vanishing_moment(j, k, p, kind))
            for (kind, j, k) in basis.labels for p in range(3)]
    _write_csv(outdir / "wavelet_moments.csv", "kind,j,k,p,moment", rows)
    return 0


def run(config: RunConfig) -> int:
    """Execute one configured run and write its artifacts."""
    outdir = Path(config.out)
    outdir.mkdir(parents=True, exist_ok=True)

    if config.mode == "gpc-diag":
        return _run_gpc_diag(config, outdir)
    if config.mode == "wavelet-diag":
        return _run_wavelet_diag(config, outdir)

    problem = _load_problem(config)

    if config.mode == "inpaint":
        u, diag = run_inpaint(problem, _solver_config(config, schedule_ok=True))
        _write_field_outputs(outdir, config, u, [u.values], None)
        diag.write_csv(outdir / "diagnostics.csv")
        return 0 if diag.converged else 2

    if config.mode == "inpaint-gray":
        gray = np.linspace(0.0, 1.0, config.gray_levels)
        stack, diag = run_multiphase(problem, gray,
                                     _solver_config(config, schedule_ok=True))
        _write_field_outputs(outdir, config, reconstruct(stack),
                             list(stack.values), None)
        diag.write_csv(outdir / "diagnostics.csv")
        return 0 if diag.converged else 2

    if config.mode == "galerkin":
        if config.sigma == 0.0:
            # zero noise degenerates to the deterministic run
            u, diag = run_inpaint(problem, _solver_config(config))
            modes = [u.values] + [np.zeros_like(u.values)] * config.order
            _write_field_outputs(outdir, config, u, modes,
                                 np.zeros_like(u.values))
            diag.write_csv(outdir / "diagnostics.csv")
            return 0 if diag.converged else 2
        order = max(config.order, 1)
        family = HermiteGaussian(sigma=config.sigma, max_degree=order)
        stack, diag = run_galerkin(problem, family, _solver_config(config))
        _write_field_outputs(outdir, config, mean_field(stack),
                             list(stack.values), variance_field(stack).values)
        diag.write_csv(outdir / "diagnostics.csv")
        return 0 if diag.converged else 2

    if config.mode == "perturb":
        state, diag = run_perturbation(problem, config.delta,
                                       _solver_config(config))
        _write_field_outputs(outdir, config, perturbation_mean(state),
                             [state.u0.values, state.u1.values],
                             first_order_variance(state).values)
        diag.write_csv(outdir / "diagnostics.csv")
        print(f"ordering ratio delta*max|u1|/max|u0| = {ordering_ratio(state):.6g}")
        return 0 if diag.converged else 2

    if config.mode == "mc":
        scale = config.sigma if config.noise == "gaussian" else config.delta
        noise = NoiseSpec(config.noise, scale)
        result = monte_carlo(problem, noise, config.samples, config.seed,
                             _solver_config(config))
        _write_field_outputs(outdir, config, result.mean,
                             [result.mean.values], result.variance.values)
        fileio.write_f64(outdir / "stderr.f64", result.stderr.values)
        return 0

    raise ConfigError(f"unhandled mode {config.mode!r}")


def _add_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--image", help="damaged image (PGM)")
    parser.add_argument("--mask", help="known-pixel mask (PGM, 0 = damage)")
    parser.add_argument("--out", help="output directory")
    for key in _NUMERIC_KEYS:
        kind = int if key in ("max_steps", "order", "gray_levels", "samples", "seed") else float
        parser.add_argument(f"--{key}", type=kind)
    parser.add_argument("--noise", choices=("gaussian", "uniform"))
    parser.add_argument("--eps_schedule", help="stages as eps:steps[,eps:steps...]")
    parser.add_argument("--pgm16", action="store_const", const=True,
                        help="write 16-bit PGM output")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chuq",
        description="Cahn-Hilliard image inpainting with uncertain initial data")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        _add_options(sub.add_parser(mode))
    ns = parser.parse_args(argv)

    try:
        file_values = parse_config_file(ns.config) if ns.config else {}
        flag_values = {k: v for k, v in vars(ns).items()
                       if k not in ("mode", "config")}
        config = build_config(ns.mode, file_values, flag_values)
        return run(config)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

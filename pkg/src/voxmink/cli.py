"""Command line front end.

Five subcommands cover the artifact's workflows:

``tables``
    Write the configuration class table and everything derived from it
    (the inclusion-exclusion matrix, the geometry matrix, the expansion
    matrix, the target rows, the curvature constants) to files.
``solve``
    Compute minimum-norm weights for the density estimator of V_q and
    write them as a weight file plus a residual report.
``verify``
    Load a weight file and report the row it realizes against the
    target row of its q.
``simulate``
    Run the replicated estimation experiment on simulated models and
    write per-spacing results plus log-log bias data for plotting.
``probe``
    Compare Monte Carlo configuration probabilities with the expansion
    prediction, class by class.

Configuration values resolve in precedence order: explicit flag, then
``--config FILE`` (key=value lines, ``#`` comments), then the
environment variable VOXMINK_SEED for the seed, then built-in
defaults.  Every emitted file starts with a comment recording the tool
version and the resolved configuration, and floats are written with 17
significant digits, so a rerun with the same configuration produces
byte-identical output.

Exit codes: 0 success, 2 configuration error, 3 infeasible weight
solve, 4 file system failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .configs import N_CLASSES, default_class_table, inclusion_exclusion_matrix
from .expansion import (
    ExpansionRangeError,
    curvature_constants,
    expansion_matrix,
    full_foreground_expansion_row,
    geometry_matrix,
    predicted_class_probability,
    specific_intrinsic_volumes,
    target_row,
)
from .model import BallModelParams, parse_radius_law
from .engine import run_experiment
from .sim import configuration_probability_mc
from .weights import (
    InfeasibleWeightsError,
    WeightFileError,
    load_weights,
    reference_weights,
    save_weights,
    solve_weights,
    weight_residual,
    wdq_row,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

SEED_ENV = "VOXMINK_SEED"


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration of one CLI invocation."""

    command: str
    out: str | None
    fmt: str
    gamma: float | None = None
    radius: str | None = None
    window: float | None = None
    spacings: tuple[float, ...] | None = None
    replications: int | None = None
    seed: int | None = None
    q: int | None = None
    weights: str | None = None
    support: tuple[int, ...] | None = None
    classes: tuple[int, ...] | None = None

    def describe(self) -> str:
        pairs = []
        for key in _KEYS[self.command]:
            value = getattr(self, _DEST[key])
            if value is None:
                continue
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            pairs.append(f"{key}={value}")
        return " ".join(pairs)


# Config-file keys per subcommand, also the order used in file headers.
_KEYS = {
    "tables": ("out", "format"),
    "solve": ("q", "support", "out", "format"),
    "verify": ("weights", "q", "out", "format"),
    "simulate": (
        "gamma", "radius", "L", "a", "reps", "seed", "q", "weights",
        "out", "format",
    ),
    "probe": ("gamma", "radius", "a", "classes", "reps", "seed", "out", "format"),
}

# Flag name -> RunConfig field.
_DEST = {
    "out": "out",
    "format": "fmt",
    "gamma": "gamma",
    "radius": "radius",
    "L": "window",
    "a": "spacings",
    "reps": "replications",
    "seed": "seed",
    "q": "q",
    "weights": "weights",
    "support": "support",
    "classes": "classes",
}

_DEFAULTS = {
    "tables": {"out": ".", "format": "csv"},
    "solve": {"out": ".", "format": "csv"},
    "verify": {"format": "csv"},
    "simulate": {
        "gamma": "0.1", "radius": "const:1", "L": "16",
        "a": "0.25,0.125,0.0625", "reps": "8", "q": "2",
        "out": ".", "format": "csv",
    },
    "probe": {
        "gamma": "0.1", "radius": "const:1", "a": "0.1",
        "reps": "100000", "out": ".", "format": "csv",
    },
}

_REQUIRED = {
    "tables": (),
    "solve": ("q",),
    "verify": ("weights",),
    "simulate": (),
    "probe": (),
}


def _parse_int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _parse_float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite, got {text!r}")
    return value


def _parse_int_list(key: str, text: str) -> tuple[int, ...]:
    items = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not items:
        raise ConfigError(f"{key}: expected a comma separated list, got {text!r}")
    return tuple(_parse_int(key, tok) for tok in items)


def _parse_float_list(key: str, text: str) -> tuple[float, ...]:
    items = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not items:
        raise ConfigError(f"{key}: expected a comma separated list, got {text!r}")
    return tuple(_parse_float(key, tok) for tok in items)


def _convert(key: str, text: str):
    if key in ("gamma", "L"):
        return _parse_float(key, text)
    if key in ("reps", "seed", "q"):
        return _parse_int(key, text)
    if key == "a":
        return _parse_float_list(key, text)
    if key in ("support", "classes"):
        return _parse_int_list(key, text)
    if key == "format":
        if text not in ("csv", "json"):
            raise ConfigError(f"format: must be csv or json, got {text!r}")
        return text
    return text


def _read_config_file(path: str, allowed) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in allowed:
            raise ConfigError(
                f"{path}:{lineno}: unknown key {key!r}; "
                f"allowed: {', '.join(allowed)}"
            )
        values[key] = value.strip()
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags, config file, environment, and defaults into a RunConfig."""
    command = args.command
    keys = _KEYS[command]
    raw = {key: getattr(args, key.replace("-", "_"), None) for key in keys}
    if args.config:
        for key, value in _read_config_file(args.config, keys).items():
            if raw.get(key) is None:
                raw[key] = value
    if "seed" in keys and raw.get("seed") is None:
        raw["seed"] = os.environ.get(SEED_ENV)
    for key, value in _DEFAULTS[command].items():
        if raw.get(key) is None:
            raw[key] = value
    if "seed" in keys and raw.get("seed") is None:
        raw["seed"] = "0"
    for key in _REQUIRED[command]:
        if raw.get(key) is None:
            raise ConfigError(f"{key} is required for {command!r}")

    fields = {"command": command, "out": None, "fmt": "csv"}
    for key, value in raw.items():
        if value is None:
            continue
        fields[_DEST[key]] = _convert(key, str(value))
    cfg = RunConfig(**fields)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.gamma is not None and cfg.gamma < 0:
        raise ConfigError(f"gamma: must be nonnegative, got {cfg.gamma}")
    if cfg.radius is not None:
        try:
            parse_radius_law(cfg.radius)
        except ValueError as exc:
            raise ConfigError(f"radius: {exc}") from None
    if cfg.replications is not None and cfg.replications < 1:
        raise ConfigError(f"reps: must be at least 1, got {cfg.replications}")
    if cfg.spacings is not None:
        for a in cfg.spacings:
            if a <= 0:
                raise ConfigError(f"a: spacings must be positive, got {a}")
    if cfg.command == "simulate" and cfg.window is not None:
        if cfg.window <= 0:
            raise ConfigError(f"L: must be positive, got {cfg.window}")
        for a in cfg.spacings or ():
            ratio = cfg.window / a
            if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
                raise ConfigError(
                    f"a: window {cfg.window} is not an integer multiple of {a}"
                )
    if cfg.q is not None:
        valid = (0, 1, 2) if cfg.command == "solve" else (0, 1, 2, 3)
        if cfg.q not in valid:
            raise ConfigError(f"q: must be one of {valid}, got {cfg.q}")
    if cfg.support is not None:
        bad = [j for j in cfg.support if not 2 <= j <= N_CLASSES - 1]
        if bad:
            raise ConfigError(f"support: class ids must be in 2..21, got {bad}")
    if cfg.classes is not None:
        bad = [j for j in cfg.classes if not 1 <= j <= N_CLASSES]
        if bad:
            raise ConfigError(f"classes: class ids must be in 1..22, got {bad}")


def _fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return _fmt_float(x)
    return str(x)


def _json_cell(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _write_table(cfg: RunConfig, name: str, columns, rows) -> Path:
    """Write one output table in the configured format, returning its path."""
    out_dir = Path(cfg.out if cfg.out is not None else ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = f"voxmink {__version__} | {cfg.command} | {cfg.describe()}"
    if cfg.fmt == "json":
        path = out_dir / f"{name}.json"
        payload = {
            "meta": meta,
            "columns": list(columns),
            "rows": [[_json_cell(x) for x in row] for row in rows],
        }
        path.write_text(json.dumps(payload, indent=1) + "\n")
        return path
    path = out_dir / f"{name}.csv"
    lines = [f"# {meta}", ",".join(columns)]
    lines.extend(",".join(_cell(x) for x in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def _cmd_tables(cfg: RunConfig) -> int:
    table = default_class_table()
    rows = [
        (
            j,
            int(table.multiplicity[j - 1]),
            int(table.background_rep[j - 1]),
            *table.volumes[j - 1],
        )
        for j in range(1, N_CLASSES + 1)
    ]
    _write_table(
        cfg, "classes",
        ("class", "multiplicity", "background_mask", "v3", "v2", "v1", "v1_power_24"),
        rows,
    )
    m = inclusion_exclusion_matrix(table)
    _write_table(
        cfg, "m",
        ("class", *(f"m_{k}" for k in range(1, N_CLASSES))),
        [(j, *m[j - 1]) for j in range(1, N_CLASSES)],
    )
    p = geometry_matrix(table)
    _write_table(
        cfg, "p",
        ("class", *(f"p_{k}" for k in range(1, 9))),
        [(j, *p[j - 1]) for j in range(1, N_CLASSES)],
    )
    q = np.vstack([expansion_matrix(table), full_foreground_expansion_row(table)])
    _write_table(
        cfg, "q",
        ("class", *(f"q_{k}" for k in range(1, 9))),
        [(j, *q[j - 1]) for j in range(1, N_CLASSES + 1)],
    )
    _write_table(
        cfg, "targets",
        ("q", *(f"b_{k}" for k in range(1, 9))),
        [(k, *target_row(k)) for k in (3, 2, 1, 0)],
    )
    _write_table(
        cfg, "curvature",
        ("class", "c1", "c2", "c3"),
        [(j, *curvature_constants(j, table)) for j in range(1, N_CLASSES)],
    )
    print(f"wrote classes, m, p, q, targets, curvature to {cfg.out}")
    return EXIT_OK


def _cmd_solve(cfg: RunConfig) -> int:
    result = solve_weights(cfg.q, support=cfg.support)
    ids = [j for j in range(1, N_CLASSES + 1) if result.weights.values[j - 1] != 0.0]
    max_resid = float(np.abs(result.residual).max())
    out_dir = Path(cfg.out if cfg.out is not None else ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    weight_path = out_dir / f"optimal_w{cfg.q}.txt"
    save_weights(
        weight_path,
        result.weights,
        comments=(
            f"voxmink {__version__} | solve | {cfg.describe()}",
            f"minimum norm solution, nonzero classes {ids}",
            f"null space dimension {result.null_dimension}",
            f"max residual {max_resid:.3e}",
        ),
    )
    _write_table(
        cfg, f"residual_w{cfg.q}",
        ("component", "residual"),
        [(k + 1, result.residual[k]) for k in range(8)],
    )
    print(
        f"q={cfg.q}: wrote {weight_path.name}, max residual {max_resid:.3e}, "
        f"null space dimension {result.null_dimension}"
    )
    return EXIT_OK


def _cmd_verify(cfg: RunConfig) -> int:
    w = load_weights(cfg.weights, q=cfg.q)
    achieved = wdq_row(w)
    target = target_row(w.q)
    residual = weight_residual(w)
    rows = [
        (k + 1, achieved[k], target[k], residual[k])
        for k in range(8)
    ]
    columns = ("component", "achieved", "target", "residual")
    print(",".join(columns))
    for row in rows:
        print(",".join(_cell(x) for x in row))
    print(f"max_abs_residual,{_fmt_float(np.abs(residual).max())}")
    if cfg.out is not None:
        _write_table(cfg, "verify", columns, rows)
    return EXIT_OK


def _resolve_weights(cfg: RunConfig):
    if cfg.weights is not None:
        return load_weights(cfg.weights, q=cfg.q)
    return reference_weights(cfg.q)


def _cmd_simulate(cfg: RunConfig) -> int:
    model = BallModelParams(cfg.gamma, parse_radius_law(cfg.radius))
    w = _resolve_weights(cfg)
    report = run_experiment(
        model,
        w.values,
        w.q,
        cfg.spacings,
        cfg.window,
        cfg.replications,
        cfg.seed,
    )
    truth = float(specific_intrinsic_volumes(model)[w.q])
    rows = [
        (
            w.q, r.spacing, cfg.window, cfg.replications,
            r.mean, r.std_error, r.predicted_mean, truth, abs(r.bias),
        )
        for r in report.rows
    ]
    _write_table(
        cfg, "results",
        (
            "q", "a", "L", "replications", "estimator_mean", "stderr",
            "predicted_mean", "miles_truth", "abs_bias",
        ),
        rows,
    )
    log_rows = [
        (
            r.spacing,
            abs(r.bias),
            math.log10(r.spacing),
            math.log10(abs(r.bias)) if r.bias != 0.0 else float("nan"),
        )
        for r in report.rows
    ]
    _write_table(
        cfg, "bias_loglog",
        ("a", "abs_bias", "log10_a", "log10_abs_bias"),
        log_rows,
    )
    for r in report.rows:
        print(
            f"a={r.spacing:g}: mean {r.mean:.6f} (se {r.std_error:.2e}), "
            f"target {truth:.6f}, bias {r.bias:+.2e}"
        )
    if report.order_estimate is not None:
        print(f"empirical bias order {report.order_estimate:.2f}")
    return EXIT_OK


def _cmd_probe(cfg: RunConfig) -> int:
    model = BallModelParams(cfg.gamma, parse_radius_law(cfg.radius))
    table = default_class_table()
    classes = cfg.classes or tuple(range(1, N_CLASSES + 1))
    jobs = [(a, j) for a in cfg.spacings for j in classes]
    seeds = np.random.SeedSequence(cfg.seed).generate_state(len(jobs), np.uint64)
    rows = []
    for (a, j), seed in zip(jobs, seeds):
        predicted = predicted_class_probability(j, model, a, table)
        est = configuration_probability_mc(
            a * table.foreground_points(j),
            a * table.background_points(j),
            model,
            cfg.replications,
            int(seed),
        )
        rows.append(
            (j, a, est.samples, est.value, est.std_error,
             predicted, abs(est.value - predicted))
        )
    _write_table(
        cfg, "probe",
        ("class", "a", "replications", "estimate", "stderr",
         "predicted", "abs_error"),
        rows,
    )
    worst = max(rows, key=lambda r: r[6] / max(r[4], 1e-300))
    print(
        f"probed {len(rows)} class/spacing pairs; worst deviation "
        f"{worst[6]:.2e} ({worst[6] / max(worst[4], 1e-300):.1f} se) "
        f"at class {worst[0]}, a={worst[1]:g}"
    )
    return EXIT_OK


_HANDLERS = {
    "tables": _cmd_tables,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "simulate": _cmd_simulate,
    "probe": _cmd_probe,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voxmink",
        description="Local estimation of intrinsic volume densities "
        "for Boolean models with ball grains.",
    )
    parser.add_argument(
        "--version", action="version", version=f"voxmink {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key=value file supplying defaults")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", help="output format, csv or json")

    t = sub.add_parser("tables", help="write class table and derived matrices")
    common(t)

    s = sub.add_parser("solve", help="compute minimum-norm estimator weights")
    common(s)
    s.add_argument("--q", help="density index, one of 0, 1, 2")
    s.add_argument("--support", help="comma separated class ids kept nonzero")

    v = sub.add_parser("verify", help="check a weight file against its target row")
    common(v)
    v.add_argument("--weights", help="weight file to check")
    v.add_argument("--q", help="density index override")

    m = sub.add_parser("simulate", help="run the estimation experiment")
    common(m)
    m.add_argument("--gamma", help="germ intensity")
    m.add_argument("--radius", help="radius law, const:R or unif:LO:HI")
    m.add_argument("--L", help="observation window side length")
    m.add_argument("--a", help="comma separated lattice spacings")
    m.add_argument("--reps", help="number of replications")
    m.add_argument("--seed", help="master seed")
    m.add_argument("--q", help="density index, one of 0, 1, 2, 3")
    m.add_argument("--weights", help="weight file (default: packaged reference)")

    pr = sub.add_parser("probe", help="Monte Carlo check of class probabilities")
    common(pr)
    pr.add_argument("--gamma", help="germ intensity")
    pr.add_argument("--radius", help="radius law, const:R or unif:LO:HI")
    pr.add_argument("--a", help="comma separated lattice spacings")
    pr.add_argument("--classes", help="comma separated class ids (default: all)")
    pr.add_argument("--reps", help="replications per class and spacing")
    pr.add_argument("--seed", help="master seed")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"voxmink: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _HANDLERS[cfg.command](cfg)
    except (ConfigError, WeightFileError, ExpansionRangeError, ValueError) as exc:
        print(f"voxmink: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleWeightsError as exc:
        print(f"voxmink: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"voxmink: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Every subcommand reads a JSON config, validates it against a schema and
writes CSV arrays plus a sidecar JSON manifest into ``--out``. Exit codes:
0 on success, 2 for invalid configuration, 3 for numerical failure.

Example::

    etstable sample --config ets.json --seed 7 --out run/
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .charfn import (EtsParams, SubordinatorParams, TidParams, ets_cf, subordinator_cf,
                     symmetric_tid_cf, tid_cf)
from .density import DensityGrid, GridSpec, _trapezoid_mass, invert_cf, ks_critical_value, ks_distance
from .errors import NumericalError, ParameterError
from .fpde import GeneratorSymbol, closed_form, density_at_time, grid_for_symbol, relative_error, solve, symbol_on_grid
from .measures import SpectralMeasure
from .sampling import (RngState, SampleBatch, params_digest, sample_ets, sample_tempered_subordinator,
                       subordinator_acceptance_rate, transform_samples)
from .series import METHODS, partial_sum, remainder_bound, remainder_table, series_density

SCHEMA_VERSION = 1

_NUM = {"type": "number"}
_VEC = {"type": "array", "items": _NUM, "minItems": 1}
_MAT = {"type": "array", "items": _VEC, "minItems": 1}

_MEASURE = {
    "type": "object",
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "atoms": {"type": "array", "items": {
            "type": "object",
            "properties": {"x": _VEC, "w": _NUM},
            "required": ["x", "w"],
            "additionalProperties": False,
        }},
    },
    "required": ["dim", "atoms"],
    "additionalProperties": False,
}

_LAW = {
    "oneOf": [
        {"type": "object",
         "properties": {"family": {"const": "ets"}, "alpha": _NUM, "lambda": _NUM,
                        "mu": _VEC, "sigma": _MAT},
         "required": ["family", "alpha", "lambda", "mu", "sigma"],
         "additionalProperties": False},
        {"type": "object",
         "properties": {"family": {"const": "tid"}, "alpha": _NUM, "measure": _MEASURE,
                        "m": _VEC, "alternative": {"type": "boolean"}},
         "required": ["family", "alpha", "measure"],
         "additionalProperties": False},
        {"type": "object",
         "properties": {"family": {"const": "symmetric_tid"}, "alpha": _NUM, "measure": _MEASURE},
         "required": ["family", "alpha", "measure"],
         "additionalProperties": False},
        {"type": "object",
         "properties": {"family": {"const": "subordinator"}, "alpha": _NUM, "theta": _NUM},
         "required": ["family", "alpha", "theta"],
         "additionalProperties": False},
    ]
}

_GRID = {
    "type": "object",
    "properties": {
        "n": {"type": "integer"},
        "center": _VEC,
        "half_width": _VEC,
        "log_floor": _NUM,
    },
    "required": ["n"],
    "additionalProperties": False,
}

_SEED = {"type": "integer", "minimum": 0}


def _schema(props: dict, required: list) -> dict:
    return {"type": "object", "properties": {"seed": _SEED, **props},
            "required": required, "additionalProperties": False}


SCHEMAS = {
    "cf": _schema({"law": _LAW, "probes": {"type": "array", "items": _VEC},
                   "probe_file": {"type": "string"}}, ["law"]),
    "sample": _schema({"law": _LAW, "count": {"type": "integer", "minimum": 1},
                       "transform": _MAT}, ["law", "count"]),
    "pdf": _schema({"law": _LAW, "grid": _GRID,
                    "method": {"enum": ["invert", "fpde", "series"]},
                    "t": _NUM, "dt": _NUM, "n_terms": {"type": "integer"},
                    "series_method": {"enum": list(METHODS)},
                    "truncation_tol": _NUM, "check_aliasing": {"type": "boolean"}}, ["law", "grid"]),
    "pde": _schema({"law": _LAW, "grid": _GRID, "t_end": _NUM, "dt": _NUM},
                   ["law", "grid", "t_end", "dt"]),
    "series": _schema({"law": _LAW, "grid": _GRID, "t": _NUM,
                       "n_terms": {"type": "integer"},
                       "method": {"enum": list(METHODS)}}, ["law", "grid", "n_terms"]),
    "ks": _schema({"samples": {"type": "string"}, "density": {"type": "string"},
                   "axis": {"type": "integer", "minimum": 0},
                   "level": {"type": "number"}}, ["samples", "density"]),
}


# ---------------------------------------------------------------- config

def load_config(command: str, path: str) -> dict:
    try:
        with open(path) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(config, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        raise ParameterError(f"config rejected: {exc.message}") from exc
    return config


def build_law(spec: dict):
    family = spec["family"]
    if family == "ets":
        return EtsParams.from_json(spec)
    if family == "subordinator":
        return SubordinatorParams(float(spec["alpha"]), float(spec["theta"]))
    measure = SpectralMeasure.from_json(spec["measure"])
    if family == "symmetric_tid":
        return TidParams(float(spec["alpha"]), measure)
    return TidParams(float(spec["alpha"]), measure, spec.get("m"))


def build_symbol(spec: dict) -> GeneratorSymbol:
    law = build_law(spec)
    family = spec["family"]
    if family == "ets":
        return GeneratorSymbol("ets", law)
    if family == "tid":
        return GeneratorSymbol("tid_psi0" if spec.get("alternative") else "tid_psi", law)
    raise ParameterError(f"family {family!r} has no evolution-equation symbol")


def law_cf(spec: dict):
    law = build_law(spec)
    family = spec["family"]
    if family == "ets":
        return lambda u: ets_cf(law, u)
    if family == "subordinator":
        return lambda u: subordinator_cf(law, u[..., 0])
    if family == "symmetric_tid":
        return lambda u: symmetric_tid_cf(law.r, law.alpha, u)
    return lambda u: tid_cf(law, u, alternative=bool(spec.get("alternative")))


def build_grid(spec: dict, g: GeneratorSymbol | None, dim: int, t: float = 1.0) -> GridSpec:
    n = spec["n"]
    if "half_width" in spec:
        center = spec.get("center", [0.0] * dim)
        return GridSpec(center, spec["half_width"], [n] * len(spec["half_width"]))
    if g is None:
        raise ParameterError("this law needs an explicit grid half_width")
    return grid_for_symbol(g, n, t=t, log_floor=spec.get("log_floor", -19.0), center=spec.get("center"))


# ---------------------------------------------------------------- output

def _csv_bytes(header: list[str], rows: np.ndarray) -> bytes:
    buf = io.StringIO()
    np.savetxt(buf, rows, fmt="%.17g", delimiter=",", header=",".join(header), comments="")
    return buf.getvalue().encode()


def write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header: list[str], rows) -> None:
    write_atomic(path, _csv_bytes(header, np.asarray(rows, dtype=float)))


def write_manifest(path: Path, command: str, config: dict, seed, **fields) -> dict:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "params_digest": params_digest(config),
        "seed": seed,
        "config": config,
        **fields,
    }
    write_atomic(path, (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode())
    return manifest


def _density_rows(d: DensityGrid) -> tuple[list[str], np.ndarray]:
    pts = d.grid.x_points().reshape(-1, d.grid.dim)
    header = [f"x{i + 1}" for i in range(d.grid.dim)] + ["p"]
    return header, np.column_stack([pts, d.values.reshape(-1)])


def _field_rows(grid: GridSpec, values: np.ndarray) -> tuple[list[str], np.ndarray]:
    pts = grid.u_points().reshape(-1, grid.dim)
    v = values.reshape(-1)
    header = [f"u{i + 1}" for i in range(grid.dim)] + ["re", "im"]
    return header, np.column_stack([pts, v.real, v.imag])


def read_density_csv(path: str) -> DensityGrid:
    """Rebuild a :class:`DensityGrid` from a ``pdf`` output file."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    dim = data.shape[1] - 1
    axes = [np.unique(data[:, i]) for i in range(dim)]
    n = [a.size for a in axes]
    dx = [a[1] - a[0] for a in axes]
    half = [k * h / 2.0 for k, h in zip(n, dx)]
    grid = GridSpec([a[0] + h for a, h in zip(axes, half)], half, n)
    values = data[:, -1].reshape(grid.n)
    return DensityGrid(grid, values, _trapezoid_mass(values, grid), float(values.min()))


# ---------------------------------------------------------------- commands

def cmd_cf(config: dict, out: Path, seed, base: Path) -> int:
    spec = config["law"]
    if "probe_file" in config:
        probes = np.loadtxt(base / config["probe_file"], delimiter=",", ndmin=2)
    elif "probes" in config:
        probes = np.asarray(config["probes"], dtype=float)
    else:
        raise ParameterError("cf config needs probes or probe_file")
    vals = np.asarray(law_cf(spec)(probes), dtype=complex).reshape(-1)
    header = [f"u{i + 1}" for i in range(probes.shape[1])] + ["re", "im"]
    write_csv(out / "cf.csv", header, np.column_stack([probes, vals.real, vals.imag]))
    write_manifest(out / "cf.json", "cf", config, seed, count=int(probes.shape[0]))
    return 0


def cmd_sample(config: dict, out: Path, seed, base: Path) -> int:
    if seed is None:
        raise ParameterError("sample needs a seed (config or --seed)")
    spec = config["law"]
    law = build_law(spec)
    rng = RngState(seed)
    if spec["family"] == "ets":
        batch = sample_ets(rng, law, config["count"])
    elif spec["family"] == "subordinator":
        vals = sample_tempered_subordinator(rng, law, config["count"])
        batch = SampleBatch(vals, params_digest(law),
                            {"acceptance_rate": subordinator_acceptance_rate(law)})
    else:
        raise ParameterError(f"no sampler for family {spec['family']!r}")
    if "transform" in config:
        batch = transform_samples(batch, config["transform"])
    write_csv(out / "sample.csv", [f"x{i + 1}" for i in range(batch.dim)], batch.values)
    write_manifest(out / "sample.json", "sample", config, seed, count=batch.count,
                   law_digest=batch.params_digest, **batch.meta)
    return 0


def _sup_diff(a: DensityGrid, b: DensityGrid) -> float:
    return float(np.max(np.abs(a.values - b.values)))


def cmd_pdf(config: dict, out: Path, seed, base: Path) -> int:
    spec = config["law"]
    method = config.get("method", "invert")
    t = float(config.get("t", 1.0))
    g = build_symbol(spec) if spec["family"] in ("ets", "tid") else None
    dim = len(spec["mu"]) if spec["family"] == "ets" else (
        1 if spec["family"] == "subordinator" else spec["measure"]["dim"])
    grid = build_grid(config["grid"], g, dim, t)
    extra = {}
    check = config.get("check_aliasing", True)
    if method == "invert":
        if t != 1.0:
            raise ParameterError("direct inversion is defined at t = 1")
        d = invert_cf(law_cf(spec), grid, check_aliasing=check)
    elif g is None:
        raise ParameterError(f"method {method!r} needs an ets or tid law")
    else:
        if method == "fpde":
            d = density_at_time(g, grid, t, dt=config.get("dt"), check_aliasing=check)
        else:
            n_terms = config.get("n_terms", 20)
            smethod = config.get("series_method", "hpm")
            state = partial_sum(g, grid, t, n_terms, smethod)
            extra["remainder_bound"] = float(np.max(remainder_bound(state)))
            extra["n_terms"] = n_terms
            d = series_density(g, grid, t, n_terms, smethod,
                               tol=config.get("truncation_tol", 1e-8), check_aliasing=check)
        if t == 1.0:
            direct = invert_cf(law_cf(spec), grid, check_aliasing=check)
            extra["sup_diff_vs_invert"] = _sup_diff(d, direct)
    header, rows = _density_rows(d)
    write_csv(out / "pdf.csv", header, rows)
    write_manifest(out / "pdf.json", "pdf", config, seed, method=method, grid=grid.to_json(),
                   mass=d.mass, min_value=d.min_value, **extra)
    return 0


def cmd_pde(config: dict, out: Path, seed, base: Path) -> int:
    g = build_symbol(config["law"])
    t_end = float(config["t_end"])
    grid = build_grid(config["grid"], g, g.dim, t_end if t_end > 0 else 1.0)
    lam = symbol_on_grid(g, grid)
    field = solve(g, grid, t_end, float(config["dt"]), symbol_values=lam)
    exact = closed_form(g, grid, t_end, symbol_values=lam)
    header, rows = _field_rows(grid, field.values)
    write_csv(out / "pde.csv", header, rows)
    write_manifest(out / "pde.json", "pde", config, seed, symbol=g.to_json(), grid=grid.to_json(),
                   dt=float(config["dt"]), t_end=t_end,
                   max_oracle_error=relative_error(field, exact))
    return 0


def cmd_series(config: dict, out: Path, seed, base: Path) -> int:
    g = build_symbol(config["law"])
    t = float(config.get("t", 1.0))
    grid = build_grid(config["grid"], g, g.dim, t)
    method = config.get("method", "hpm")
    rows = remainder_table(g, grid, t, config["n_terms"], method)
    write_csv(out / "series.csv", ["n", "max_bound", "max_error"],
              [[r["n"], r["max_bound"], r["max_error"]] for r in rows])
    write_manifest(out / "series.json", "series", config, seed, method=method, grid=grid.to_json(),
                   remainder_bound=rows[-1]["max_bound"])
    return 0


def cmd_ks(config: dict, out: Path, seed, base: Path) -> int:
    samples = np.loadtxt(base / config["samples"], delimiter=",", skiprows=1, ndmin=2)
    density = read_density_csv(base / config["density"])
    axis = config.get("axis", 0)
    level = config.get("level", 0.99)
    stat = ks_distance(samples, density, axis)
    crit = ks_critical_value(samples.shape[0], level)
    write_manifest(out / "ks.json", "ks", config, seed, statistic=stat, critical_value=crit,
                   level=level, count=int(samples.shape[0]), passed=bool(stat < crit))
    return 0


COMMANDS = {"cf": cmd_cf, "sample": cmd_sample, "pdf": cmd_pdf, "pde": cmd_pde,
            "series": cmd_series, "ks": cmd_ks}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="etstable", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        p.add_argument("--out", default=".", help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.command, args.config)
        seed = args.seed if args.seed is not None else config.get("seed")
        if args.seed is not None:
            config["seed"] = args.seed
        base = Path(args.config).resolve().parent
        return COMMANDS[args.command](config, Path(args.out), seed, base)
    except (ParameterError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command-line orchestration of the separatrix pipeline.

Subcommands: equilibria | detect | refine | reconstruct | pipeline |
trajectory.  Stages exchange files inside the output directory; every run
merges a manifest recording the config hash and stage versions.  Data goes to
files, diagnostics to stderr.  Exit codes: 0 success, 2 config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, models, pu_interp, refine
from . import separatrix as detection
from .config import PipelineConfig, load_config
from .dynamics import integrate
from .errors import ConfigError, NumericalError, StageDependencyError
from .pu_interp import WendlandC2, build_covering, fill_distance, fit

STAGE_VERSIONS = {
    "equilibria": 1,
    "detect": 1,
    "refine": 1,
    "reconstruct": 1,
    "trajectory": 1,
}

RAW_CSV = "raw_points.csv"
REFINED_CSV = "refined_points.csv"
REFINED_META = "refined_meta.json"
EQUILIBRIA_JSON = "equilibria.json"
MODEL_JSON = "model.json"
GRID_CSV = "grid.csv"
MANIFEST = "manifest.json"


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _state_columns(dim: int) -> list:
    return ["N", "E"] if dim == 2 else ["N", "A", "E"]


def _write_csv(path: Path, header: list, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _read_csv(path: Path, expect_cols: int) -> np.ndarray:
    if not path.exists():
        raise StageDependencyError(
            f"missing upstream file {path}; run the producing stage first"
        )
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != expect_cols:
        raise StageDependencyError(
            f"{path} has {data.shape[1]} columns, expected {expect_cols}"
        )
    return data


def _warn(message: str) -> None:
    print(f"sepkit: warning: {message}", file=sys.stderr)


def _info(message: str) -> None:
    print(f"sepkit: {message}", file=sys.stderr)


def _update_manifest(out: Path, config: PipelineConfig, stage: str) -> None:
    path = out / MANIFEST
    manifest = {"config_sha256": config.sha256(), "sepkit_version": __version__,
                "stages": {}}
    if path.exists():
        existing = json.loads(path.read_text())
        if existing.get("config_sha256") == manifest["config_sha256"]:
            manifest["stages"] = existing.get("stages", {})
    manifest["stages"][stage] = STAGE_VERSIONS[stage]
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _check_manifest(out: Path, config: PipelineConfig, needed_stage: str) -> None:
    path = out / MANIFEST
    if not path.exists():
        return  # upstream files may be hand-placed; the CSV check still applies
    manifest = json.loads(path.read_text())
    if manifest.get("config_sha256") != config.sha256():
        raise StageDependencyError(
            f"{path} was produced by a different config; rerun '{needed_stage}'"
        )


def _out_dir(config: PipelineConfig, override) -> Path:
    out = Path(override) if override else Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_equilibria(config: PipelineConfig, out: Path) -> None:
    """Write the equilibrium report: closed forms, eigenvalues, table checks."""
    eqs = models.equilibria(config.params)
    table = models.table_conditions(config.params)
    records = []
    for eq in eqs:
        rec = eq.to_record()
        row = table.get(eq.label)
        if row is not None and not eq.degenerate:
            rec["table_feasible"] = row["feasible"]
            rec["table_stable"] = row["stable"]
            if eq.stability != models.NON_HYPERBOLIC:
                rec["agrees_with_table"] = (
                    row["feasible"] == eq.feasible
                    and row["stable"] == (eq.stability == models.STABLE)
                )
        records.append(rec)
    report = {"model": config.model, "equilibria": records}
    (out / EQUILIBRIA_JSON).write_text(json.dumps(report, indent=2) + "\n")
    _update_manifest(out, config, "equilibria")
    _info(f"wrote {out / EQUILIBRIA_JSON}")


def cmd_detect(config: PipelineConfig, out: Path, workers: int = 1) -> None:
    """Run the boundary sweep and write the raw point matrix A."""
    raw = detection.detect(
        config.params,
        config.n,
        config.gamma,
        config.integrator,
        tol_bis=config.effective_tol_bis,
        max_iter=config.max_iter,
        workers=workers,
        diagnostics=True,
    )
    if np.any(raw.low_confidence):
        _warn(f"{int(np.sum(raw.low_confidence))} low-confidence bisection hits")
    _write_csv(out / RAW_CSV, _state_columns(config.dim), raw.points)
    _update_manifest(out, config, "detect")
    _info(f"wrote {out / RAW_CSV} ({len(raw)} points)")


def cmd_refine(config: PipelineConfig, out: Path) -> None:
    """Bin-average the raw points, append origin and saddle, write A'."""
    _check_manifest(out, config, "detect")
    raw_matrix = _read_csv(out / RAW_CSV, config.dim)
    raw = detection.SeparatrixPointSet(points=raw_matrix, dim=config.dim)
    if config.dim == 2:
        refined = refine.refine_2d(raw, config.L)
    else:
        refined = refine.refine_3d(raw, config.L, config.H)
    try:
        saddle = models.separatrix_saddle(config.params)
    except ValueError as exc:
        raise NumericalError(f"cannot augment the refined set: {exc}") from exc
    refined = refine.augment(refined, saddle)
    _write_csv(out / REFINED_CSV, _state_columns(config.dim), refined.points)
    (out / REFINED_META).write_text(json.dumps(refined.meta(), indent=2) + "\n")
    _update_manifest(out, config, "refine")
    _info(f"wrote {out / REFINED_CSV} ({len(refined)} nodes, K={refined.K})")


def cmd_reconstruct(config: PipelineConfig, out: Path,
                    grid_resolution: int = 200) -> None:
    """Fit the partition-of-unity model and export it plus an evaluation grid."""
    for warning in config.beta_warnings():
        _warn(warning)
    _check_manifest(out, config, "refine")
    nodes = _read_csv(out / REFINED_CSV, config.dim)
    box = np.array([[0.0, float(np.max(nodes[:, k]))] for k in range(config.dim - 1)])
    covering = build_covering(box, config.d, config.overlap)
    kernel = WendlandC2(config.beta)
    interp = fit(nodes, kernel, covering)

    model_record = {
        "beta": config.beta,
        "d": config.d,
        "overlap": config.overlap,
        "box": box.tolist(),
        "subdomains": [
            {
                "center": sd.center.tolist(),
                "radius": float(sd.radius),
                "node_indices": sd.node_indices.tolist(),
            }
            for sd in interp.subdomains
        ],
        "coefficients": [alpha.tolist() for alpha in interp.local_coefficients],
        "nodes": nodes.tolist(),
        "fill_distance": fill_distance(interp.nodes_x, box),
    }
    (out / MODEL_JSON).write_text(json.dumps(model_record, indent=2) + "\n")

    if config.dim == 2:
        xs = np.linspace(box[0, 0], box[0, 1], grid_resolution)
        rows = [(x, interp(np.array([x]))) for x in xs]
        header = ["x", "s"]
    else:
        per_axis = max(2, int(np.sqrt(grid_resolution)))
        xs = np.linspace(box[0, 0], box[0, 1], per_axis)
        ys = np.linspace(box[1, 0], box[1, 1], per_axis)
        rows = [(x, y, interp(np.array([x, y]))) for x in xs for y in ys]
        header = ["x", "y", "s"]
    _write_csv(out / GRID_CSV, header, rows)
    _update_manifest(out, config, "reconstruct")
    _info(f"wrote {out / MODEL_JSON} and {out / GRID_CSV}")


def cmd_trajectory(config: PipelineConfig, out: Path) -> None:
    """Integrate the configured initial conditions and dump them to CSV."""
    if not config.initial_conditions:
        raise ConfigError("trajectory requires initial_conditions in the config")
    header = ["t"] + _state_columns(config.dim)
    for k, x0 in enumerate(config.initial_conditions, start=1):
        traj = integrate(config.params, np.asarray(x0), config.integrator)
        rows = np.column_stack([traj.t, traj.states])
        path = out / f"trajectory_{k:02d}.csv"
        _write_csv(path, header, rows)
        _info(f"wrote {path} ({len(traj)} steps)")
    _update_manifest(out, config, "trajectory")


def cmd_pipeline(config: PipelineConfig, out: Path, workers: int = 1,
                 grid_resolution: int = 200, emit_trajectories: bool = False) -> None:
    """Run every stage in order on a fresh output directory."""
    cmd_equilibria(config, out)
    cmd_detect(config, out, workers=workers)
    cmd_refine(config, out)
    cmd_reconstruct(config, out, grid_resolution=grid_resolution)
    if emit_trajectories:
        if config.initial_conditions:
            cmd_trajectory(config, out)
        else:
            _warn("no initial_conditions in config; skipping trajectory dump")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sepkit",
        description="Detect, refine and reconstruct separatrix manifolds of "
                    "two- and three-population competition models.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("equilibria", "equilibrium/stability report"),
        ("detect", "bisection sweep for raw separatrix points"),
        ("refine", "bin-average the raw points and append origin/saddle"),
        ("reconstruct", "fit the partition-of-unity model and export a grid"),
        ("pipeline", "run all stages in order"),
        ("trajectory", "integrate configured initial conditions to CSV"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default=None, help="output directory "
                       "(default: out_dir from the config)")
        if name in ("detect", "pipeline"):
            p.add_argument("--workers", type=int, default=1,
                           help="parallel bisection workers")
        if name in ("reconstruct", "pipeline"):
            p.add_argument("--grid-resolution", type=int, default=200,
                           help="evaluation grid size for the exported curve/surface")
        if name == "pipeline":
            p.add_argument("--emit-trajectories", action="store_true",
                           help="also dump trajectories for the configured "
                                "initial conditions")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        out = _out_dir(config, args.out)
        if args.command == "equilibria":
            cmd_equilibria(config, out)
        elif args.command == "detect":
            cmd_detect(config, out, workers=args.workers)
        elif args.command == "refine":
            cmd_refine(config, out)
        elif args.command == "reconstruct":
            cmd_reconstruct(config, out, grid_resolution=args.grid_resolution)
        elif args.command == "trajectory":
            cmd_trajectory(config, out)
        else:
            cmd_pipeline(
                config,
                out,
                workers=args.workers,
                grid_resolution=args.grid_resolution,
                emit_trajectories=args.emit_trajectories,
            )
    except (ConfigError, StageDependencyError) as exc:
        print(f"sepkit: config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"sepkit: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())

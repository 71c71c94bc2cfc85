"""Plain-text result files. Floats are written with ``repr`` so reruns are byte-identical."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..continuation import SolveLog
from ..core import ParetoArchive, ParetoPoint
from ..mgd import MgdResult


def _num(v) -> str:
    return repr(float(v))


def _write_csv(path: Path, config_hash: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_hash={config_hash}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def read_csv(path: str | Path) -> list[dict[str, str]]:
    """Rows of a file written here, skipping ``#`` comment lines."""
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def write_points(path: Path, points: Sequence[ParetoPoint], n_obj: int, config_hash: str, timing: bool) -> None:
    header = ["point_id", "parent_id", "method_tag", *[f"f_{i + 1}" for i in range(n_obj)],
              "solver_iters", "grad_evals_cum", "wall_ms_cum"]
    rows = (
        [
            p.point_id,
            "" if p.parent_id is None else p.parent_id,
            p.method_tag.value,
            *[_num(v) for v in p.f],
            p.solver_iters,
            p.grad_evals_cum,
            p.wall_ms_cum if timing else "",
        ]
        for p in points
    )
    _write_csv(path, config_hash, header, rows)


def write_residuals(path: Path, solves: Sequence[SolveLog], config_hash: str) -> None:
    """One block per predictor solve: the residual after every iteration.

    A solve that needed no iteration contributes its initial residual as
    iteration 0, so every solve appears.
    """

    def rows():
        for log in solves:
            history = log.report.residual_history
            if not history:
                continue
            if len(history) == 1:
                yield log.solve_id, 0, _num(history[0])
                continue
            for it, r in enumerate(history[1:], start=1):
                yield log.solve_id, it, _num(r)

    _write_csv(path, config_hash, ["solve_id", "iteration", "residual_norm"], rows())


def write_mgd_traces(path: Path, runs: Sequence[MgdResult], n_obj: int, config_hash: str) -> None:
    """Per-start descent traces; ``direction_norm`` is blank where it was never computed."""
    header = ["start", "iteration", *[f"f_{i + 1}" for i in range(n_obj)], "direction_norm"]

    def rows():
        for start, run in enumerate(runs):
            for it, f in enumerate(run.trace or []):
                norm = _num(run.direction_norms[it]) if it < len(run.direction_norms) else ""
                yield start, it, *[_num(v) for v in f], norm

    _write_csv(path, config_hash, header, rows())


def write_front(target, front: np.ndarray, config_hash: str) -> None:
    """Write objective rows to a path or an open text stream."""

    def emit(fh):
        fh.write(f"# config_hash={config_hash}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"f_{i + 1}" for i in range(front.shape[1])])
        writer.writerows([[_num(v) for v in row] for row in front])

    if hasattr(target, "write"):
        emit(target)
    else:
        with open(target, "w", newline="") as fh:
            emit(fh)


def write_json(path: Path, data: dict) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def archive_payload(archive: ParetoArchive, config: dict, config_hash: str, cost: dict) -> dict:
    return {"config_hash": config_hash, "config": config, "cost": cost, "points": archive.to_list()}


def load_archive(path: str | Path) -> ParetoArchive:
    with open(path) as fh:
        return ParetoArchive.from_list(json.load(fh)["points"])

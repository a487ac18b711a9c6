"""Phantom, boundary data, report and plot data files.

Boundary data is stored as a CSV file with columns ``center_index,t,value``,
center-major, next to a JSON sidecar with the same stem holding the center
grid, the t-grid, the provenance and the manifest. Every number written to a
CSV file has 15 significant digits and every JSON file carries ``schema``.

"""

import csv
import json
import logging
from dataclasses import is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from spheremean.config import SCHEMA, Manifest
from spheremean.darboux import ModeSolution
from spheremean.errors import DimensionError, InputError, SpheremeanError
from spheremean.harmonics import sphere_grid
from spheremean.profile import RadialProfile
from spheremean.rangecond import RangeReport
from spheremean.transform import BoundaryData, Phantom

logger = logging.getLogger(__name__)

DATA_HEADER = ("center_index", "t", "value")


def fmt(value: float) -> str:
    return f"{float(value):.15g}"


def make_json_safe(obj: Any) -> Any:
    """Convert nested numpy values, fractions and paths to plain types."""
    if isinstance(obj, dict):
        return {str(k): make_json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [make_json_safe(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Path):
        return str(obj)
    if is_dataclass(obj) and hasattr(obj, "to_dict"):
        return make_json_safe(obj.to_dict())
    return obj


def write_json(payload: dict, path: str | Path, manifest: Manifest | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"schema": SCHEMA, **payload}
    if manifest is not None:
        payload["manifest"] = manifest.finish().to_dict()
    with path.open("w", encoding="utf-8") as f:
        json.dump(make_json_safe(payload), f, indent=2)
    logger.info("wrote %s", path)
    return path


def read_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError as err:
        raise InputError("file not found", str(path)) from err
    except json.JSONDecodeError as err:
        raise InputError(f"malformed JSON: {err.msg}", f"{path}:{err.lineno}") from err
    if not isinstance(data, dict):
        raise InputError("JSON root must be an object", str(path))
    return data


def write_csv(path: str | Path, header: Iterable[str], rows: Iterable[Iterable]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [v if isinstance(v, (int, str, np.integer)) else fmt(v) for v in row]
            )
    logger.info("wrote %s", path)
    return path


def phantom_from_dict(data: dict) -> Phantom:
    """Parse a phantom, pointing at the offending field on failure."""
    if "dimension" not in data:
        raise InputError("phantom needs a dimension", "dimension")
    try:
        dimension = int(data["dimension"])
    except (TypeError, ValueError) as err:
        raise InputError("dimension must be an integer", "dimension") from err
    terms = data.get("terms", [])
    if not isinstance(terms, list):
        raise InputError("terms must be a list", "terms")
    parsed = []
    for i, term in enumerate(terms):
        where = f"terms[{i}]"
        try:
            idx = (int(term["m"]), int(term["k"]))
            profile = RadialProfile.from_dict(term["profile"])
        except KeyError as err:
            raise InputError(f"missing field {err}", where) from err
        except (TypeError, ValueError) as err:
            raise InputError(str(err), where) from err
        parsed.append((idx, profile))
    try:
        return Phantom(dimension, tuple(parsed))
    except DimensionError:
        raise
    except SpheremeanError as err:
        raise InputError(str(err), "terms") from err


def read_phantom(path: str | Path) -> Phantom:
    return phantom_from_dict(read_json(path))


def write_phantom(ph: Phantom, path: str | Path) -> Path:
    return write_json(ph.to_dict(), path)


def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".json")


def write_data(g: BoundaryData, path: str | Path, manifest: Manifest | None = None) -> Path:
    """Write boundary data as CSV plus JSON sidecar."""
    path = Path(path)
    num_t = g.t.size
    rows = (
        (i, g.t[j], g.values[i, j]) for i in range(g.grid.size) for j in range(num_t)
    )
    write_csv(path, DATA_HEADER, rows)
    sidecar = {
        "grid": g.grid.to_dict(),
        "t": {"t_max": g.t_max, "samples": num_t},
        "metadata": g.metadata,
    }
    write_json(sidecar, sidecar_path(path), manifest)
    return path


def read_data(path: str | Path) -> BoundaryData:
    """Read boundary data written by :func:`write_data`.

    Raises
    ------
    InputError
        Raised with the offending line or field when the files are malformed.

    """
    path = Path(path)
    meta = read_json(sidecar_path(path))
    try:
        grid_meta, t_meta = meta["grid"], meta["t"]
        grid = sphere_grid(int(grid_meta["dimension"]), int(grid_meta["resolution"]))
        t = np.linspace(0.0, float(t_meta["t_max"]), int(t_meta["samples"]))
    except KeyError as err:
        raise InputError(f"sidecar is missing {err}", str(sidecar_path(path))) from err
    nodes = np.asarray(grid_meta.get("nodes", grid.nodes), dtype=float)
    if nodes.shape != grid.nodes.shape or not np.allclose(nodes, grid.nodes, atol=1e-12):
        raise InputError("center coordinates do not match the grid", "grid.nodes")

    values = np.full((grid.size, t.size), np.nan)
    try:
        f = path.open(newline="", encoding="utf-8")
    except FileNotFoundError as err:
        raise InputError("file not found", str(path)) from err
    with f:
        reader = csv.reader(f)
        if tuple(next(reader, ())) != DATA_HEADER:
            raise InputError(f"header must be {','.join(DATA_HEADER)}", 1)
        for line, row in enumerate(reader, start=2):
            try:
                i, tj, value = int(row[0]), float(row[1]), float(row[2])
            except (IndexError, ValueError) as err:
                raise InputError("malformed row", line) from err
            j = int(round(tj / t[1]))
            if not (0 <= i < grid.size and 0 <= j < t.size) or abs(t[j] - tj) > 1e-9:
                raise InputError("row outside the grids", line)
            values[i, j] = value
    if np.isnan(values).any():
        raise InputError("data file does not cover every grid node", str(path))
    return BoundaryData(grid, t, values, meta.get("metadata", {}))


def write_mode_dumps(solutions: list[ModeSolution], directory: str | Path) -> list[Path]:
    """One CSV ``t,h_1,...,h_J`` per mode."""
    directory = Path(directory)
    paths = []
    for s in solutions:
        m, k = s.index
        header = ["t"] + [f"h_{j}" for j in range(1, s.eig.count + 1)]
        rows = np.column_stack([s.t, s.h.T])
        paths.append(write_csv(directory / f"mode_m{m}_k{k}.csv", header, rows))
    return paths


def write_residual_plot_data(report: RangeReport, path: str | Path) -> Path:
    """Tidy CSV of residual against zero index per mode."""
    rows = (
        (e["m"], e["k"], e["q"], e["lambda"], e["rho"]) for e in report.residuals
    )
    return write_csv(path, ("m", "k", "q", "lambda", "rho"), rows)


def write_profile_plot_data(solutions: list[ModeSolution], path: str | Path) -> Path:
    """Tidy CSV of the recovered radial profiles ``f_{m,k}(r)``."""
    rows = (
        (s.index[0], s.index[1], r, value)
        for s in solutions
        for r, value in zip(s.profile.grid, s.profile.values)
    )
    return write_csv(path, ("m", "k", "r", "value"), rows)

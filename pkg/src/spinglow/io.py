"""Grid serialization and atomic file output with manifest sidecars."""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .sweeps import SweepGrid


def fmt(value: float) -> str:
    """Round-trippable decimal with up to 17 significant digits."""
    return format(float(value), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def grid_to_csv(grid: SweepGrid) -> str:
    lines = [f"{grid.x_name},{grid.y_name},value"]
    lines += [f"{fmt(x)},{fmt(y)},{fmt(v)}" for x, y, v in grid.rows()]
    return "\n".join(lines) + "\n"


def grid_to_dict(grid: SweepGrid) -> dict:
    return {
        "version": __version__,
        "observable": grid.observable,
        "x": {"name": grid.x_name, "values": grid.x_values},
        "y": {"name": grid.y_name, "values": grid.y_values},
        "values": grid.values,
        "metadata": grid.metadata,
    }


def read_grid_csv(path) -> SweepGrid:
    """Inverse of ``grid_to_csv`` (observable name is not stored in the CSV)."""
    text = Path(path).read_text(encoding="utf-8").splitlines()
    x_name, y_name, _ = text[0].split(",")
    rows = np.array([[float(t) for t in line.split(",")] for line in text[1:] if line])
    xs, ys = np.unique(rows[:, 0]), np.unique(rows[:, 1])
    values = rows[:, 2].reshape(len(ys), len(xs))
    return SweepGrid("unknown", x_name, xs, y_name, ys, values)


def manifest(command: str, params: dict, output: str | None, fmt_name: str) -> dict:
    return {
        "command": command,
        "parameters": params,
        "output": output,
        "format": fmt_name,
        "version": __version__,
    }


def atomic_write(path, text: str) -> None:
    """Write to a sibling temp file then rename, so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def manifest_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".manifest.json")

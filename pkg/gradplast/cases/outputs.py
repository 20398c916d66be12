"""
Output series and run metadata files.

Every series is written as one CSV with the header first, 17 significant
digits and LF line endings. Wall time and other run-dependent data only go
into ``manifest.json`` so that the CSVs of two identical runs are identical.
"""

import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from ..core.errorhandler import DataError, ErrorCode, FileError
from ..core.logger import Logger
from ..core.tools import ensure_directory_exists, load_app_info, save_csv, save_json

AVERAGE_FIELDS = ["D_bar", "Dh_bar", "Psi_rho_bar", "D_gb", "Psi_gb"]


def stress_strain_headers(load: str = "Gamma", stress: str = "sigma12_avg") -> List[str]:
    """Columns of the stress-strain series for the named applied strain and average stress."""
    return ["step", "time", load, stress]


def average_headers(load: str = "Gamma") -> List[str]:
    return ["step", "time", load] + AVERAGE_FIELDS


STRESS_STRAIN_HEADERS = stress_strain_headers()
AVERAGE_HEADERS = average_headers()


@dataclass
class OutputSeries:
    """A named table; rows of constant length, time column monotone when present."""
    name: str
    headers: List[str]
    rows: List[List[Any]] = field(default_factory=list)

    def append(self, row: Sequence[Any]) -> None:
        if len(row) != len(self.headers):
            raise DataError(
                ErrorCode.DATA_INVALID_FORMAT,
                f"Series '{self.name}' expects {len(self.headers)} columns, got {len(row)}"
            )
        if "time" in self.headers and self.rows:
            col = self.headers.index("time")
            if row[col] < self.rows[-1][col]:
                raise DataError(ErrorCode.DATA_NOT_MONOTONE, f"Time decreases in series '{self.name}'")
        self.rows.append(list(row))

    def column(self, name: str) -> np.ndarray:
        return np.array([r[self.headers.index(name)] for r in self.rows], dtype=float)

    @property
    def file_name(self) -> str:
        return f"{self.name}.csv"


def write_outputs(series: Sequence[OutputSeries], directory: str) -> List[str]:
    """
    Write each series to ``<directory>/<name>.csv``.

    Returns:
        list: Written paths
    """
    ensure_directory_exists(directory)
    paths = []
    for s in series:
        path = os.path.join(directory, s.file_name)
        save_csv(s.rows, path, headers=s.headers)
        paths.append(path)
    Logger().info(f"Wrote {len(paths)} output series to {directory}")
    return paths


def write_manifest(directory: str, config: Dict[str, Any], wall_time: float,
                   counts: Dict[str, int], profiles: Sequence[Dict[str, Any]] = ()) -> str:
    info = load_app_info()
    manifest = {
        "application": info.get("app_name", "GradPlast"),
        "version": info.get("version", "unknown"),
        "config": config,
        "wall_time_s": wall_time,
        "counts": counts,
        "profiles": list(profiles),
    }
    path = os.path.join(directory, "manifest.json")
    save_json(manifest, path)
    return path


def write_convergence(directory: str, report: List[Dict[str, Any]]) -> str:
    path = os.path.join(directory, "convergence.json")
    save_json({"steps": report}, path)
    return path


def write_mesh_dump(mesh, constraints, path: str) -> str:
    """
    Plain-text dump of nodes, elements, interface elements and constraints.

    Raises:
        FileError: If the file cannot be written
    """
    lines = [f"# nodes {mesh.n_nodes} dofs_per_node {mesh.dofs_per_node}"]
    lines += [f"node {i} {x:.17g} {y:.17g}" for i, (x, y) in enumerate(mesh.nodes)]
    lines.append(f"# elements {mesh.n_elements}")
    lines += [f"element {e} grain {g} " + " ".join(str(n) for n in conn)
              for e, (conn, g) in enumerate(zip(mesh.elements, mesh.grain))]
    ifs = mesh.interfaces
    lines.append(f"# interfaces {len(ifs)}")
    lines += [f"interface {i} " + " ".join(str(n) for n in conn)
              + f" normal {n[0]:.17g} {n[1]:.17g} measure {m:.17g}"
              for i, (conn, n, m) in enumerate(zip(ifs.conn, ifs.normal, ifs.measure))]
    described = constraints.describe()
    lines.append(f"# constraints {len(described)}")
    lines += described
    try:
        ensure_directory_exists(os.path.dirname(path) or ".")
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write("\n".join(lines) + "\n")
    except OSError as e:
        raise FileError(ErrorCode.FILE_SAVE_FAILED, f"Could not write mesh dump {path}: {e}")
    Logger().info(f"Mesh dump written to {path}")
    return path

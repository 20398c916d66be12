"""
Static PNG rendering of the CSV series of a run directory.
"""

import glob
import os
from typing import List

import numpy as np

from ..core.errorhandler import DataError, ErrorCode, FileError, GradPlastError
from ..core.logger import Logger
from ..core.tools import read_csv

try:
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt
    MATPLOTLIB_AVAILABLE = True
except ImportError:
    MATPLOTLIB_AVAILABLE = False


def _load(path: str):
    headers, rows = read_csv(path)
    if headers is None:
        raise DataError(ErrorCode.DATA_INCOMPLETE, f"Series without header: {path}")
    data = np.array(rows, dtype=float).reshape(len(rows), len(headers))
    return headers, data


def _line_plot(path: str, x_name: str, y_names: List[str], out: str, title: str) -> str:
    headers, data = _load(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    x = data[:, headers.index(x_name)]
    for name in y_names:
        ax.plot(x, data[:, headers.index(name)], label=name, linewidth=1.5)
    ax.grid(True, alpha=0.3)
    ax.set_xlabel(x_name)
    ax.set_title(title)
    if len(y_names) > 1:
        ax.legend()
    else:
        ax.set_ylabel(y_names[0])
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def plot_run(run_dir: str) -> List[str]:
    """
    Render the stress-strain curve, the averages and every profile of a run.

    Returns:
        list: Paths of the written PNG files

    Raises:
        FileError: Missing run directory
        GradPlastError: matplotlib not installed
    """
    if not MATPLOTLIB_AVAILABLE:
        raise GradPlastError(ErrorCode.SYS_DEPENDENCY_MISSING, "matplotlib is required for plotting")
    if not os.path.isdir(run_dir):
        raise FileError(ErrorCode.FILE_NOT_FOUND, f"Run directory not found: {run_dir}")

    logger = Logger()
    written = []
    stress = os.path.join(run_dir, "stress_strain.csv")
    if os.path.exists(stress):
        headers, _ = _load(stress)
        written.append(_line_plot(stress, headers[2], [headers[3]],
                                  os.path.join(run_dir, "stress_strain.png"), "Average stress"))

    averages = os.path.join(run_dir, "averages.csv")
    if os.path.exists(averages):
        headers, _ = _load(averages)
        for name in headers[3:]:
            written.append(_line_plot(averages, "time", [name],
                                      os.path.join(run_dir, f"averages_{name}.png"), name))

    for path in sorted(glob.glob(os.path.join(run_dir, "profile_*.csv"))):
        headers, _ = _load(path)
        base = os.path.splitext(path)[0]
        gammas = [h for h in headers if h.startswith("gamma_")]
        rhos = [h for h in headers if h.startswith("rho_") and h[4:].isdigit()]
        written.append(_line_plot(path, headers[0], gammas, base + "_gamma.png", os.path.basename(base)))
        if rhos:
            written.append(_line_plot(path, headers[0], rhos, base + "_rho.png", os.path.basename(base)))

    logger.info(f"Wrote {len(written)} plots to {run_dir}")
    return written

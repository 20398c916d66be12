"""
Parameter sweeps: one run per point of the grid spanned by one or more
dotted config entries.

Points are independent and run in a process pool. Each point writes into its
own subdirectory; ``sweep_summary.csv`` collects the final values.
"""

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from ..core.config import apply_override, config_from_dict, load_raw_config
from ..core.errorhandler import ConfigError, ErrorCode, GradPlastError
from ..core.logger import Logger
from ..core.tools import save_csv

THREADS_ENV = "GRADPLAST_THREADS"
RESULT_HEADERS = ["final_load", "final_stress", "final_D_bar", "steps", "status"]


def default_threads() -> int:
    """Worker count from GRADPLAST_THREADS, else the number of cores."""
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            n = int(value)
        except ValueError:
            raise ConfigError(ErrorCode.CFG_INVALID_VALUE, f"{THREADS_ENV} must be an integer: {value}")
        if n < 1:
            raise ConfigError(ErrorCode.CFG_INVALID_VALUE, f"{THREADS_ENV} must be positive: {value}")
        return n
    return os.cpu_count() or 1


def parse_assignment(text: str) -> Tuple[str, List[Any]]:
    """
    Split ``section.key=v1,v2,...`` into the dotted key and its values.

    Numeric values become floats, anything else stays a string.
    """
    if "=" not in text:
        raise ConfigError(ErrorCode.CFG_INVALID_VALUE, f"Sweep parameter must be 'section.key=v1,v2': {text}")
    key, raw = text.split("=", 1)
    values = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            values.append(float(item))
        except ValueError:
            values.append(item)
    if not values:
        raise ConfigError(ErrorCode.CFG_INVALID_VALUE, f"No values given for {key}")
    return key.strip(), values


def _label(value: Any) -> str:
    return format(value, 'g') if isinstance(value, float) else str(value)


def _point_name(index: int, keys: Union[str, Sequence[str]], values: Any) -> str:
    if isinstance(keys, str):
        keys, values = [keys], [values]
    parts = [f"{key.split('.')[-1]}_{_label(value)}" for key, value in zip(keys, values)]
    return f"{index:03d}_" + "_".join(parts)


def parse_grid(assignments: Union[str, Sequence[str]]) -> Tuple[List[str], List[Tuple[Any, ...]]]:
    """
    Expand one or more assignments into the full grid of value combinations.

    Returns:
        tuple: (dotted keys, list of value tuples ordered with the last key fastest)

    Raises:
        ConfigError: Malformed assignment or a key given twice
    """
    if isinstance(assignments, str):
        assignments = [assignments]
    keys, axes = [], []
    for text in assignments:
        key, values = parse_assignment(text)
        if key in keys:
            raise ConfigError(ErrorCode.CFG_INVALID_VALUE, f"Sweep parameter given twice: {key}")
        keys.append(key)
        axes.append(values)
    if not keys:
        raise ConfigError(ErrorCode.CFG_INVALID_VALUE, "No sweep parameter given")
    return keys, list(itertools.product(*axes))


def _run_point(data: Dict[str, Any], out_dir: str, log_level: str) -> Dict[str, Any]:
    from .base import run_case

    logger = Logger()
    logger.set_level(log_level)
    logger.set_run_directory(out_dir)
    cfg = config_from_dict(data)
    outputs = run_case(cfg, out_dir)
    stress = outputs.get("stress_strain")
    averages = outputs.get("averages")
    return {
        "final_load": stress.rows[-1][2] if stress else float("nan"),
        "final_stress": stress.rows[-1][3] if stress else float("nan"),
        "final_D_bar": averages.rows[-1][3] if averages else float("nan"),
        "steps": outputs.march.steps,
    }


def run_sweep(config_path: str, assignments: Union[str, Sequence[str]], out_dir: str,
              threads: Optional[int] = None, log_level: str = "n") -> List[List[Any]]:
    """
    Run one job per grid point and write ``sweep_summary.csv``.

    The summary has one column per swept key (its dotted name) followed by
    the final load, stress, average dissipation rate, step count and status.

    Returns:
        list: Summary rows

    Raises:
        GradPlastError: [SYS-002] if any point failed
    """
    logger = Logger()
    raw = load_raw_config(config_path)
    keys, grid = parse_grid(assignments)
    jobs = []
    for i, values in enumerate(grid):
        data = raw
        for key, value in zip(keys, values):
            data = apply_override(data, key, value)
        config_from_dict(data)
        jobs.append((values, data, os.path.join(out_dir, _point_name(i, keys, values))))

    workers = min(threads or default_threads(), len(jobs))
    logger.info(f"Sweep over {', '.join(keys)}: {len(jobs)} points on {workers} workers")
    rows, failed = [], []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_point, data, path, log_level) for _, data, path in jobs]
        for (values, _, path), future in zip(jobs, futures):
            point = ", ".join(f"{k}={_label(v)}" for k, v in zip(keys, values))
            try:
                res = future.result()
                rows.append([*values, res["final_load"], res["final_stress"], res["final_D_bar"],
                             res["steps"], "ok"])
            except Exception as e:
                code = getattr(e, "error_code", ErrorCode.SYS_WORKER_FAILED)
                logger.error(f"Sweep point {point} failed: {getattr(e, 'message', e)}",
                             error_code=code.value.strip('[]'))
                rows.append([*values, float("nan"), float("nan"), float("nan"), 0, "failed"])
                failed.append(point)

    save_csv(rows, os.path.join(out_dir, "sweep_summary.csv"), headers=keys + RESULT_HEADERS)
    if failed:
        raise GradPlastError(ErrorCode.SYS_WORKER_FAILED, f"{len(failed)} sweep points failed: {failed}")
    return rows

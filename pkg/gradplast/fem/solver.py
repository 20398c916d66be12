"""
Linear solve, Newton iteration and adaptive time marching.

Each Newton iteration re-evaluates the trial state from the last committed
snapshot. A step that fails to converge is discarded and retried with a
smaller step size; committed data is only ever replaced by a converged step.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..core.errorhandler import ErrorCode, SolverError
from ..core.logger import Logger
from .assembly import Evaluation, GlobalSystem, SystemState
from .constraints import ConstraintMap, ConstraintSet

REFINE_TOL = 1e-10
FAIL_TOL = 1e-6


def linear_solve(A, b: np.ndarray) -> np.ndarray:
    """
    Direct sparse solve with one step of iterative refinement.

    Raises:
        SolverError: Empty or singular system, or an inaccurate solution
    """
    logger = Logger()
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if n == 0 or A.shape[0] == 0:
        raise SolverError(ErrorCode.SOLV_SINGULAR_MATRIX, "Empty system: every dof is constrained",
                          diagnostics={"n_free": 0})
    A = sp.csc_matrix(A)
    try:
        lu = spla.splu(A)
    except RuntimeError as e:
        diag = np.abs(A.diagonal())
        zero_rows = np.flatnonzero(np.diff(A.tocsr().indptr) == 0)
        raise SolverError(
            ErrorCode.SOLV_SINGULAR_MATRIX,
            f"Sparse factorization failed: {e}",
            diagnostics={"n_free": n, "empty_rows": zero_rows[:20].tolist(),
                         "smallest_diagonal": int(np.argmin(diag)) if n else -1}
        )

    norm_b = np.linalg.norm(b)
    if norm_b == 0.0:
        return np.zeros(n)
    x = lu.solve(b)
    rel = np.linalg.norm(A @ x - b) / norm_b
    if not np.isfinite(rel):
        raise SolverError(ErrorCode.SOLV_SINGULAR_MATRIX, "Non-finite solution of the linear system",
                          diagnostics={"n_free": n})
    if rel > REFINE_TOL:
        x = x + lu.solve(b - A @ x)
        rel = np.linalg.norm(A @ x - b) / norm_b
    if rel > FAIL_TOL:
        raise SolverError(ErrorCode.SOLV_INACCURATE_SOLVE, f"Linear solve residual {rel:.3e}",
                          diagnostics={"relative_residual": float(rel)})
    if rel > REFINE_TOL:
        logger.warning(f"Linear solve relative residual {rel:.3e} after refinement",
                       error_code=ErrorCode.SOLV_INACCURATE_SOLVE.value.strip('[]'))
    return x


@dataclass
class NewtonResult:
    converged: bool
    iterations: int
    residual_history: List[float] = field(default_factory=list)
    reason: str = ""
    error_code: Optional[ErrorCode] = None


def newton_solve(system: GlobalSystem, cmap: ConstraintMap, d_committed: np.ndarray,
                 state: SystemState, lam: float, dt: float, tol_rel: float, tol_abs: float,
                 max_iter: int, step: int = 0, stall_window: int = 6, stall_factor: float = 0.5):
    """
    Solve one step by Newton-Raphson on the free unknowns.

    Args:
        system: Element groups of the mesh
        cmap: Constraint map of the step
        d_committed: Converged full solution of the previous step
        state: Committed history
        lam: Load factor at the end of the step
        dt: Step size
        tol_rel: Residual reduction relative to the first residual
        tol_abs: Absolute residual floor
        max_iter: Allowed linear solves
        step: Step number for the log
        stall_window: Iterations over which the residual must fall by
            ``stall_factor``; 0 disables the check
        stall_factor: Required reduction over ``stall_window`` iterations

    Returns:
        tuple: (NewtonResult, last Evaluation, full solution)
    """
    logger = Logger()
    d_free = cmap.restrict(d_committed)
    d_full = cmap.expand(d_free, lam)
    history: List[float] = []
    iters = 0
    r0 = None
    not_converged = ErrorCode.SOLV_NOT_CONVERGED

    while True:
        ev = system.evaluate(d_full, d_committed, state, dt)
        r = cmap.reduce_vector(ev.residual)
        norm = float(np.linalg.norm(r)) if r.size else 0.0
        history.append(norm)
        logger.debug(f"step={step} iter={iters} residual={norm:.6e}")

        if r0 is None:
            r0 = norm
        if not math.isfinite(norm) or (iters > 0 and norm > 1e6 * max(r0, tol_abs)):
            return NewtonResult(False, iters, history, "diverged", ErrorCode.SOLV_DIVERGED), ev, d_full
        if norm <= max(tol_abs, tol_rel * r0):
            return NewtonResult(True, iters, history), ev, d_full
        if iters >= max_iter:
            return NewtonResult(False, iters, history, "max iterations", not_converged), ev, d_full
        if stall_window and iters >= stall_window and norm > stall_factor * history[-1 - stall_window]:
            return NewtonResult(False, iters, history, "stagnated", not_converged), ev, d_full

        try:
            dx = linear_solve(cmap.reduce_matrix(ev.K), -r)
        except SolverError as e:
            if e.error_code not in (ErrorCode.SOLV_SINGULAR_MATRIX, ErrorCode.SOLV_INACCURATE_SOLVE):
                raise
            logger.debug(f"step={step} iter={iters}: {e.message}")
            return NewtonResult(False, iters, history, "linear solve failed", e.error_code), ev, d_full
        d_free = d_free + dx
        d_full = cmap.expand(d_free, lam)
        iters += 1


@dataclass
class Event:
    """Constraint change applied once the march reaches ``time``."""
    time: float
    name: str
    apply: Callable[[ConstraintSet, np.ndarray], None]


@dataclass
class MarchResult:
    d_full: np.ndarray
    state: SystemState
    steps: int
    cutbacks: int
    newton_iterations: int
    report: List[Dict] = field(default_factory=list)


def time_march(system: GlobalSystem, constraints: ConstraintSet, load: Callable[[float], float],
               t_end: float, dt_initial: float, dt_min: float, dt_max: float,
               tol_rel: float, tol_abs: float, max_iter: int,
               cutback_factor: float = 0.5, growth_factor: float = 1.5, growth_delay: int = 3,
               stall_window: int = 6, stall_factor: float = 0.5,
               breakpoints: Sequence[float] = (), events: Sequence[Event] = (),
               on_commit: Optional[Callable[[int, float, float, np.ndarray, Evaluation], None]] = None
               ) -> MarchResult:
    """
    Advance from the virgin state to ``t_end``.

    Steps end exactly on ``t_end``, on every breakpoint and on every event
    time. After each converged step the dissipation audit runs, due events
    mutate ``constraints`` and ``on_commit`` receives the committed data. Step
    0 reports the initial configuration.

    A failed step is retried with ``cutback_factor`` times its size. The
    reduced size is then held for ``growth_delay`` committed steps before
    ``growth_factor`` applies again.

    Raises:
        SolverError: Step size fell below ``dt_min``
    """
    logger = Logger()
    eps = 1e-12 * max(t_end, 1.0)
    stops = sorted({float(t) for t in list(breakpoints) + [e.time for e in events] + [t_end]
                    if eps < t <= t_end + eps})
    pending = sorted(events, key=lambda e: e.time)

    cmap = constraints.build()
    state = system.initial_state()
    d_full = cmap.expand(np.zeros(cmap.n_free), load(0.0))
    if on_commit is not None:
        on_commit(0, 0.0, load(0.0), d_full, system.evaluate(d_full, d_full, state, dt_initial))

    t, dt, step = 0.0, dt_initial, 0
    cutbacks = total_iters = hold = 0
    report: List[Dict] = []
    logger.info(f"Time march to t={t_end:g} s with dt={dt_initial:g} s, {cmap.n_free} free dofs")

    while t < t_end - eps:
        next_stop = next(s for s in stops if s > t + eps)
        dt_try = min(dt, dt_max, next_stop - t)
        if next_stop - (t + dt_try) < 1e-6 * dt_try:
            dt_try = next_stop - t
        t_new = t + dt_try
        lam = load(t_new)
        result, ev, d_new = newton_solve(system, cmap, d_full, state, lam, dt_try,
                                         tol_rel, tol_abs, max_iter, step + 1, stall_window, stall_factor)
        total_iters += result.iterations

        if not result.converged:
            cutbacks += 1
            dt = dt_try * cutback_factor
            hold = growth_delay
            code = result.error_code or ErrorCode.SOLV_NOT_CONVERGED
            logger.warning(
                f"Step {step + 1} at t={t_new:.6g} failed ({result.reason}), cutting dt to {dt:.3e}",
                error_code=code.value.strip('[]')
            )
            if dt < dt_min:
                raise SolverError(
                    ErrorCode.SOLV_STEP_TOO_SMALL,
                    f"Step size {dt:.3e} fell below dt_min={dt_min:.3e} at t={t:.6g}",
                    diagnostics={"time": t, "dt": dt, "reason": result.reason,
                                 "residuals": result.residual_history}
                )
            continue

        smallest = system.audit(ev)
        step += 1
        t = t_new
        d_full = d_new
        state = ev.state
        report.append({"step": step, "time": t, "dt": dt_try, "iterations": result.iterations,
                       "residuals": result.residual_history})
        logger.debug(f"Step {step} committed: t={t:.6g} min dissipation increment={smallest:.3e}")

        while pending and pending[0].time <= t + eps:
            event = pending.pop(0)
            event.apply(constraints, d_full)
            cmap = constraints.build()
            logger.info(f"Event '{event.name}' applied at t={t:.6g}, {cmap.n_free} free dofs")

        if on_commit is not None:
            on_commit(step, t, lam, d_full, ev)
        if hold > 0:
            hold -= 1
        else:
            dt = min(dt * growth_factor, dt_max)

    logger.info(f"Time march finished: {step} steps, {cutbacks} cutbacks, {total_iters} Newton iterations")
    return MarchResult(d_full=d_full, state=state, steps=step, cutbacks=cutbacks,
                       newton_iterations=total_iters, report=report)

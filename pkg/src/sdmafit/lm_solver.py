"""Levenberg-Marquardt minimizer for sum-of-squares objectives.

The step solves the damped normal equations with Marquardt scaling,

    (J'J + lambda * diag(J'J)) delta = -J'r,

which makes the iteration invariant to rescaling the residuals and robust
to parameter blocks with very different magnitudes (plane slopes vs log
softness). Steps that increase the cost are rejected: the parameters are
restored and the damping grows by ``lambda_up``; accepted steps shrink it
by ``lambda_down``. The sequence of accepted costs is therefore
nonincreasing, and the solver never leaves a non-finite state.

Exact-zero Jacobian columns occur routinely here (planes that are active
nowhere), so diagonal entries are clamped below by 1e-14 before damping.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import LinearSolveFailure, NonFiniteResidual

_DIAG_FLOOR = 1e-14
_LAMBDA_SINGULAR_CEILING = 1e12


class Termination(str, enum.Enum):
    GRAD_TOL = "GradTol"
    STEP_TOL = "StepTol"
    COST_TOL = "CostTol"
    MAX_ITER = "MaxIter"


@dataclass(frozen=True)
class LmConfig:
    """Solver tolerances and damping schedule.

    The defaults are conventional; every field is exposed because the
    fitting pipeline tightens or caps them for different model classes.
    """

    max_iterations: int = 500
    lambda_init: float = 1e-3
    lambda_up: float = 10.0
    lambda_down: float = 0.1
    grad_tol: float = 1e-10
    step_tol: float = 1e-12
    cost_tol: float = 1e-14

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        for name in ("lambda_init", "grad_tol", "step_tol", "cost_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.lambda_up > 1.0:
            raise ValueError("lambda_up must exceed 1")
        if not 0.0 < self.lambda_down < 1.0:
            raise ValueError("lambda_down must lie in (0, 1)")


@dataclass(frozen=True)
class LmReport:
    """Outcome of one solve: where it stopped and why."""

    iterations: int
    final_cost: float
    termination: Termination
    final_lambda: float
    accepted_costs: tuple = field(default=(), repr=False)


def lm_minimize(residual_fn, jacobian_fn, gamma0, cfg: LmConfig | None = None):
    """Minimize ``sum(residual_fn(gamma)**2)`` starting from ``gamma0``.

    ``residual_fn`` maps gamma to the length-m residual vector and
    ``jacobian_fn`` to its m-by-p Jacobian. Returns ``(gamma, LmReport)``.
    Non-finite residuals at the start raise NonFiniteResidual; later trial
    points that go non-finite are treated as rejected steps, so the
    returned parameters are always finite with cost no worse than the
    start. ``accepted_costs`` in the report records the cost after the
    start and each accepted step, in order.
    """
    if cfg is None:
        cfg = LmConfig()
    gamma = np.array(gamma0, dtype=float).ravel()
    if not np.all(np.isfinite(gamma)):
        raise NonFiniteResidual("starting parameters are not finite")
    r = np.asarray(residual_fn(gamma), dtype=float)
    if not np.all(np.isfinite(r)):
        raise NonFiniteResidual("residual vector is not finite at the start")
    cost = float(r @ r)
    costs = [cost]
    lam = cfg.lambda_init
    iterations = 0
    termination = Termination.MAX_ITER

    if cost <= cfg.cost_tol:
        return gamma, LmReport(0, cost, Termination.COST_TOL, lam,
                               tuple(costs))

    while iterations < cfg.max_iterations:
        iterations += 1
        J = np.asarray(jacobian_fn(gamma), dtype=float)
        grad = J.T @ r
        if float(np.max(np.abs(grad))) <= cfg.grad_tol:
            termination = Termination.GRAD_TOL
            iterations -= 1
            break
        JtJ = J.T @ J
        diag = np.maximum(np.diag(JtJ), _DIAG_FLOOR)

        accepted = False
        while True:
            A = JtJ + lam * np.diag(diag)
            try:
                delta = np.linalg.solve(A, -grad)
            except np.linalg.LinAlgError:
                delta = None
            if delta is None or not np.all(np.isfinite(delta)):
                lam *= cfg.lambda_up
                if lam > _LAMBDA_SINGULAR_CEILING:
                    raise LinearSolveFailure(
                        "normal equations stayed singular with damping "
                        f"beyond {_LAMBDA_SINGULAR_CEILING:g}")
                continue
            step_norm = float(np.linalg.norm(delta))
            if step_norm <= cfg.step_tol * (cfg.step_tol
                                            + float(np.linalg.norm(gamma))):
                termination = Termination.STEP_TOL
                break
            trial = gamma + delta
            rt = np.asarray(residual_fn(trial), dtype=float)
            # finite residuals can still square to overflow; either way the
            # infinite cost just rejects the step
            with np.errstate(over="ignore"):
                trial_cost = float(rt @ rt) if np.all(np.isfinite(rt)) \
                    else np.inf
            if trial_cost < cost:
                improvement = cost - trial_cost
                gamma, r, cost = trial, rt, trial_cost
                costs.append(cost)
                lam *= cfg.lambda_down
                accepted = True
                if cost <= cfg.cost_tol or improvement <= cfg.cost_tol * cost:
                    termination = Termination.COST_TOL
                break
            lam *= cfg.lambda_up
            if lam > _LAMBDA_SINGULAR_CEILING:
                # no acceptable step at any damping: converged in practice
                termination = Termination.STEP_TOL
                break

        if not accepted:
            break
        if termination is Termination.COST_TOL:
            break
        termination = Termination.MAX_ITER

    return gamma, LmReport(iterations, cost, termination, lam, tuple(costs))

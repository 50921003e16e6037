"""Trajectory integration and basin classification.

Initial conditions are integrated with an adaptive embedded Runge-Kutta 4(5)
scheme until the trajectory settles inside the capture ball of a stable
equilibrium (classification) or the time horizon runs out (the outcome is
then ``UNRESOLVED``, never silently coerced to an attractor).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import RK45

from . import models
from .errors import ClassificationSetupError, IntegrationError

__all__ = [
    "IntegratorConfig",
    "ClassificationResult",
    "Trajectory",
    "UNRESOLVED",
    "CAPTURE_RADIUS",
    "CAPTURE_STEPS",
    "integrate",
    "classify",
]

UNRESOLVED = "unresolved"

#: Max-norm radius of the capture ball around each stable equilibrium.
CAPTURE_RADIUS = 1e-3
#: Consecutive accepted steps a trajectory must stay inside the ball before
#: convergence is declared (guards against flybys near saddles).
CAPTURE_STEPS = 10


@dataclass(frozen=True)
class IntegratorConfig:
    """Adaptive integrator settings: initial step, tolerances, horizon."""

    step: float = 0.01
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    t_max: float = 1000.0

    def __post_init__(self):
        for name in ("step", "abs_tol", "rel_tol", "t_max"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")


@dataclass(eq=False)
class Trajectory:
    """Accepted integration steps: times (m,) and states (m, dim)."""

    t: np.ndarray
    states: np.ndarray

    def __iter__(self):
        return zip(self.t, self.states)

    def __len__(self):
        return len(self.t)


@dataclass(eq=False)
class ClassificationResult:
    """Outcome of basin classification for one initial condition."""

    outcome: str  # attractor label or UNRESOLVED
    time_to_converge: float  # nan when unresolved
    final_state: np.ndarray

    @property
    def resolved(self) -> bool:
        return self.outcome != UNRESOLVED


def _make_solver(params, x0, cfg: IntegratorConfig) -> RK45:
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (params.dim,):
        raise ValueError(f"x0 has shape {x0.shape}, expected ({params.dim},)")
    if not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be finite")

    def fun(t, x):
        # Populations are nonnegative; clamp integration noise before the RHS
        # so the invariant axes stay invariant.
        return models.rhs(params, np.maximum(x, 0.0))

    return RK45(
        fun,
        0.0,
        x0,
        t_bound=cfg.t_max,
        first_step=min(cfg.step, cfg.t_max),
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
    )


def _advance(solver: RK45) -> bool:
    """One accepted step; True while integration can continue."""
    if solver.status != "running":
        return False
    solver.step()
    if solver.status == "failed":
        raise IntegrationError(
            f"integration failed at t={solver.t:.6g} (step underflow)"
        )
    if not np.all(np.isfinite(solver.y)):
        raise IntegrationError(f"non-finite state at t={solver.t:.6g}")
    return True


def integrate(params, x0, cfg: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """Integrate the model from ``x0`` over [0, t_max], returning all accepted steps."""
    solver = _make_solver(params, x0, cfg)
    times = [0.0]
    states = [solver.y.copy()]
    while _advance(solver):
        times.append(solver.t)
        states.append(solver.y.copy())
    return Trajectory(np.array(times), np.array(states))


def classify(
    params,
    x0,
    attractors,
    cfg: IntegratorConfig = IntegratorConfig(),
    capture_radius: float = CAPTURE_RADIUS,
    capture_steps: int = CAPTURE_STEPS,
) -> ClassificationResult:
    """Map an initial condition to the stable equilibrium its trajectory reaches.

    The trajectory must stay inside the capture ball (max norm, radius
    ``capture_radius``) of one attractor for ``capture_steps`` consecutive
    accepted steps, or still be inside one when the horizon ends; the
    reported convergence time is when the ball was first entered.  Reaching
    t_max outside every ball yields ``UNRESOLVED``.
    """
    if not attractors:
        raise ClassificationSetupError("attractor list is empty")
    for eq in attractors:
        if eq.stability != models.STABLE:
            raise ClassificationSetupError(
                f"attractor {eq.label} is {eq.stability}, expected stable"
            )
    locations = np.array([eq.location for eq in attractors])
    labels = [eq.label for eq in attractors]
    for i in range(len(attractors)):
        for j in range(i + 1, len(attractors)):
            gap = np.max(np.abs(locations[i] - locations[j]))
            if gap < 2.0 * capture_radius:
                raise ClassificationSetupError(
                    f"capture balls of {labels[i]} and {labels[j]} overlap "
                    f"(distance {gap:.3g} < {2 * capture_radius:.3g})"
                )

    solver = _make_solver(params, x0, cfg)

    inside_idx = -1  # attractor currently being tracked
    inside_count = 0
    entry_time = 0.0

    def update(t: float, y: np.ndarray):
        nonlocal inside_idx, inside_count, entry_time
        dist = np.max(np.abs(locations - y), axis=1)
        hits = np.flatnonzero(dist < capture_radius)
        if hits.size == 0:
            inside_idx = -1
            inside_count = 0
            return
        idx = int(hits[0])
        if idx != inside_idx:
            inside_idx = idx
            inside_count = 0
            entry_time = t

    update(0.0, solver.y)
    while not (inside_idx >= 0 and inside_count >= capture_steps):
        if not _advance(solver):
            # Horizon reached.  A trajectory that sits inside a ball right now
            # entered it and never left (adaptive steps grow so fast near a
            # fixed point that fewer than capture_steps may remain); a flyby
            # would have exited before the horizon.
            if inside_idx >= 0:
                break
            return ClassificationResult(
                outcome=UNRESOLVED,
                time_to_converge=float("nan"),
                final_state=solver.y.copy(),
            )
        update(solver.t, solver.y)
        if inside_idx >= 0:
            inside_count += 1
    return ClassificationResult(
        outcome=labels[inside_idx],
        time_to_converge=entry_time,
        final_state=solver.y.copy(),
    )

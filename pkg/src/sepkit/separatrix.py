"""Separatrix point detection: boundary probes plus classification bisection.

Opposing points on the faces of the domain ``[0, gamma]^dim`` are taken in
pairs; when the two endpoints of a pair fall into different basins, bisection
along the connecting segment pins down a boundary crossing.  All crossings are
collected, in probe order, into the raw point matrix A (one row per point).
"""

from __future__ import annotations

import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import models
from .dynamics import IntegratorConfig, classify
from .errors import UnsupportedConfigurationError

__all__ = [
    "ProbePair",
    "BisectionHit",
    "SeparatrixPointSet",
    "boundary_probes",
    "bisect",
    "detect",
    "default_tol_bis",
]

DEFAULT_MAX_ITER = 60


def default_tol_bis(gamma: float) -> float:
    """Default bisection tolerance, proportional to the domain size."""
    return 1e-6 * gamma


@dataclass(frozen=True, eq=False)
class ProbePair:
    """Two points on opposite faces of the domain, differing along one axis."""

    p_low: np.ndarray
    p_high: np.ndarray
    axis: int


@dataclass(eq=False)
class BisectionHit:
    """A separatrix point found by bisection along a probe segment."""

    point: np.ndarray
    axis: int
    labels: tuple  # (attractor at the low end, attractor at the high end)
    low_confidence: bool = False


@dataclass(eq=False)
class SeparatrixPointSet:
    """Raw detected points: matrix A with one row per point, dim columns."""

    points: np.ndarray
    dim: int
    axes: np.ndarray = field(default_factory=lambda: np.array([], dtype=int))
    low_confidence: np.ndarray = field(default_factory=lambda: np.array([], dtype=bool))

    def __len__(self):
        return self.points.shape[0]


def boundary_probes(dim: int, n: int, gamma: float) -> list:
    """Opposing probe pairs on the domain boundary, in sweep order.

    2D: n vertical pairs (x_i, 0)-(x_i, gamma) then n horizontal pairs
    (0, y_i)-(gamma, y_i).  3D: three families of n^2 pairs across the three
    opposing face pairs of the cube.  Coordinates are equispaced over
    [0, gamma] with endpoints included.
    """
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    grid = np.linspace(0.0, gamma, n)
    pairs = []
    if dim == 2:
        for x in grid:
            pairs.append(ProbePair(np.array([x, 0.0]), np.array([x, gamma]), axis=1))
        for y in grid:
            pairs.append(ProbePair(np.array([0.0, y]), np.array([gamma, y]), axis=0))
        return pairs
    for a in grid:
        for b in grid:
            pairs.append(
                ProbePair(np.array([a, b, 0.0]), np.array([a, b, gamma]), axis=2)
            )
    for a in grid:
        for b in grid:
            pairs.append(
                ProbePair(np.array([a, 0.0, b]), np.array([a, gamma, b]), axis=1)
            )
    for a in grid:
        for b in grid:
            pairs.append(
                ProbePair(np.array([0.0, a, b]), np.array([gamma, a, b]), axis=0)
            )
    return pairs


def bisect(
    params,
    pair: ProbePair,
    attractors,
    cfg: IntegratorConfig = IntegratorConfig(),
    tol_bis: float = 1e-5,
    max_iter: int = DEFAULT_MAX_ITER,
    diagnostics: bool = False,
) -> Optional[BisectionHit]:
    """Bisect a probe segment down to a boundary crossing.

    Returns None when both endpoints classify to the same attractor (no
    crossing) or when an endpoint is unresolved (probe skipped; a diagnostic
    goes to stderr when ``diagnostics`` is set).  Otherwise returns the
    midpoint of a bracketing segment shorter than ``tol_bis`` whose endpoints
    still classify to the two different attractors.
    """
    if tol_bis <= 0:
        raise ValueError(f"tol_bis must be positive, got {tol_bis}")
    lo = np.asarray(pair.p_low, dtype=float)
    hi = np.asarray(pair.p_high, dtype=float)

    res_lo = classify(params, lo, attractors, cfg)
    res_hi = classify(params, hi, attractors, cfg)
    if not (res_lo.resolved and res_hi.resolved):
        if diagnostics:
            print(
                f"sepkit: probe ({lo}, {hi}) skipped: unresolved endpoint",
                file=sys.stderr,
            )
        return None
    if res_lo.outcome == res_hi.outcome:
        return None

    label_lo = res_lo.outcome
    labels = (res_lo.outcome, res_hi.outcome)
    axis = pair.axis
    for _ in range(max_iter):
        if abs(hi[axis] - lo[axis]) < tol_bis:
            return BisectionHit(point=0.5 * (lo + hi), axis=axis, labels=labels)
        mid = 0.5 * (lo + hi)
        res_mid = classify(params, mid, attractors, cfg)
        if not res_mid.resolved:
            # Cannot shrink the bracket past an unresolved midpoint; it is
            # itself our best boundary estimate at this resolution.
            return BisectionHit(
                point=mid, axis=axis, labels=labels, low_confidence=True
            )
        if res_mid.outcome == label_lo:
            lo = mid
        else:
            hi = mid
    return BisectionHit(
        point=0.5 * (lo + hi), axis=axis, labels=labels, low_confidence=True
    )


def _bisect_task(args):
    params, pair, attractors, cfg, tol_bis, max_iter, diagnostics = args
    return bisect(params, pair, attractors, cfg, tol_bis, max_iter, diagnostics)


def detect(
    params,
    n: int,
    gamma: float,
    cfg: IntegratorConfig = IntegratorConfig(),
    tol_bis: Optional[float] = None,
    max_iter: int = DEFAULT_MAX_ITER,
    workers: int = 1,
    diagnostics: bool = False,
) -> SeparatrixPointSet:
    """Run the full boundary sweep and collect all bisection hits.

    Requires the model to have exactly two feasible stable equilibria.  Probe
    pairs are independent, so they may be bisected in parallel (``workers``);
    hits are always gathered in probe order, keeping the output deterministic.
    """
    if tol_bis is None:
        tol_bis = default_tol_bis(gamma)
    attractors = models.stable_attractors(params)
    if len(attractors) != 2:
        raise UnsupportedConfigurationError(
            f"expected exactly two stable attractors, found {len(attractors)}: "
            f"{[eq.label for eq in attractors]}"
        )
    pairs = boundary_probes(params.dim, n, gamma)
    if workers > 1:
        tasks = [(params, pr, attractors, cfg, tol_bis, max_iter, diagnostics)
                 for pr in pairs]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_bisect_task, tasks))
    else:
        results = [bisect(params, pr, attractors, cfg, tol_bis, max_iter, diagnostics)
                   for pr in pairs]

    hits = [h for h in results if h is not None]
    if hits:
        points = np.array([h.point for h in hits])
        axes = np.array([h.axis for h in hits], dtype=int)
        lowconf = np.array([h.low_confidence for h in hits], dtype=bool)
    else:
        points = np.empty((0, params.dim))
        axes = np.array([], dtype=int)
        lowconf = np.array([], dtype=bool)
    return SeparatrixPointSet(points=points, dim=params.dim, axes=axes,
                              low_confidence=lowconf)

"""Partition of Unity reconstruction with Wendland C2 local RBF interpolants.

The separatrix is treated as a graph over its leading coordinate(s): y = s(x)
on [0, M] in the two-population case, z = s(x, y) on [0, M_x] x [0, M_y] in
the three-population case.  The parameter domain is covered by ``d`` mildly
overlapping ball-shaped subdomains; on each one a small Wendland C2 RBF
system is solved, and the local interpolants are blended with Shepard-
normalized Wendland bumps, which sum to one wherever the covering is active.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist

from .errors import CoveringError, FitError, OutOfDomainError

__all__ = [
    "WendlandC2",
    "wendland_c2",
    "Subdomain",
    "Covering",
    "PUInterpolant",
    "build_covering",
    "fit",
    "evaluate",
    "fill_distance",
]

#: Local systems with a condition estimate above this raise FitError.
CONDITION_LIMIT = 1e14

DEFAULT_OVERLAP = 1.5


def wendland_c2(r, beta: float):
    """Wendland C2 kernel (1 - beta*r)_+^4 (4*beta*r + 1).

    Compactly supported on [0, 1/beta], equal to 1 at r = 0 and nonincreasing
    on its support; strictly positive definite in up to three dimensions.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    br = beta * np.asarray(r, dtype=float)
    return np.maximum(1.0 - br, 0.0) ** 4 * (4.0 * br + 1.0)


@dataclass(frozen=True)
class WendlandC2:
    """Wendland C2 kernel with shape parameter ``beta`` (inverse support scale)."""

    beta: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    def __call__(self, r):
        return wendland_c2(r, self.beta)

    @property
    def support_radius(self) -> float:
        return 1.0 / self.beta


@dataclass(frozen=True, eq=False)
class Subdomain:
    """A covering cell: ball around ``center`` holding the listed nodes."""

    center: np.ndarray
    radius: float
    node_indices: np.ndarray

    def __post_init__(self):
        if len(self.node_indices) == 0:
            raise CoveringError(
                f"subdomain at {self.center} (radius {self.radius:.4g}) contains "
                "no nodes; increase the overlap or reduce the subdomain count d"
            )


@dataclass(frozen=True, eq=False)
class Covering:
    """Geometry of the subdomain covering before nodes are assigned."""

    centers: np.ndarray  # (d, m)
    radii: np.ndarray  # (d,)
    box: np.ndarray  # (m, 2) rows (lo, hi)
    grid_shape: tuple


def _factor_grid(d: int) -> tuple:
    """Nearly-square factor pair (d1, d2) with d1 <= d2 and d1 * d2 = d."""
    d1 = int(np.sqrt(d))
    while d % d1 != 0:
        d1 -= 1
    return d1, d // d1


def build_covering(box, d: int, overlap: float = DEFAULT_OVERLAP) -> Covering:
    """Cover a box in parameter space with ``d`` overlapping balls.

    Centers sit on an equispaced grid (a nearly-square d1 x d2 grid when the
    parameter space is two-dimensional, more cells along the longer axis);
    every ball has radius ``overlap`` times half the largest center spacing.
    ``overlap`` must be large enough for the balls to cover the box.
    """
    box = np.atleast_2d(np.asarray(box, dtype=float))
    if box.shape[1] != 2 or np.any(box[:, 1] < box[:, 0]):
        raise ValueError("box must be rows of (lo, hi) with hi >= lo")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if overlap <= 1.0:
        raise ValueError(f"overlap must exceed 1, got {overlap}")
    m = box.shape[0]
    extents = box[:, 1] - box[:, 0]

    if m == 1:
        counts = (d,)
    elif m == 2:
        d1, d2 = _factor_grid(d)
        # more subdomains along the longer axis
        counts = (d2, d1) if extents[0] >= extents[1] else (d1, d2)
    else:
        raise ValueError(f"parameter space must be 1D or 2D, got {m}D")

    spacings = extents / np.asarray(counts)
    axes = [
        box[k, 0] + (np.arange(counts[k]) + 0.5) * spacings[k] for k in range(m)
    ]
    if m == 1:
        centers = axes[0][:, None]
    else:
        cx, cy = np.meshgrid(axes[0], axes[1], indexing="ij")
        centers = np.column_stack([cx.ravel(), cy.ravel()])
    radius = overlap * 0.5 * float(np.max(spacings))

    # A ball must reach the corners of its grid cell, otherwise gaps remain.
    cell_circumradius = 0.5 * float(np.linalg.norm(spacings))
    if radius < cell_circumradius - 1e-12:
        raise ValueError(
            f"overlap {overlap} leaves the box uncovered; need at least "
            f"{2 * cell_circumradius / float(np.max(spacings)):.3f}"
        )
    return Covering(
        centers=centers,
        radii=np.full(centers.shape[0], radius),
        box=box,
        grid_shape=tuple(counts),
    )


@dataclass(eq=False)
class PUInterpolant:
    """A fitted partition-of-unity interpolant, immutable after fit.

    ``nodes_x`` holds the parameter coordinates of the nodes, ``nodes_f``
    their values; each subdomain carries the node indices inside its ball and
    the coefficients of its local RBF interpolant.  Weight bumps are Wendland
    C2 functions with support equal to the subdomain radius.
    """

    kernel: WendlandC2
    subdomains: list
    local_coefficients: list
    nodes_x: np.ndarray  # (n, m)
    nodes_f: np.ndarray  # (n,)
    box: np.ndarray

    def weight_bumps(self, x: np.ndarray) -> np.ndarray:
        """Unnormalized weights psi_j(x), one per subdomain."""
        dist = np.linalg.norm(
            np.stack([sd.center for sd in self.subdomains]) - x, axis=1
        )
        return np.array(
            [
                wendland_c2(dist[j], 1.0 / sd.radius)
                for j, sd in enumerate(self.subdomains)
            ]
        )

    def weights(self, x) -> np.ndarray:
        """Shepard-normalized weights W_j(x); they sum to one where defined."""
        psi = self.weight_bumps(np.asarray(x, dtype=float))
        total = psi.sum()
        if total <= 0.0:
            raise OutOfDomainError(f"point {x} lies outside every subdomain")
        return psi / total

    def local_eval(self, j: int, x: np.ndarray) -> float:
        """Evaluate the local RBF interpolant of subdomain ``j``."""
        nodes = self.nodes_x[self.subdomains[j].node_indices]
        r = np.linalg.norm(nodes - x, axis=1)
        return float(self.kernel(r) @ self.local_coefficients[j])

    def __call__(self, x) -> float:
        return evaluate(self, x)


def fit(points, kernel: WendlandC2, covering: Covering) -> PUInterpolant:
    """Fit local RBF interpolants on every subdomain of the covering.

    ``points`` is the (augmented) refined node matrix: the last column holds
    the interpolated value, the leading column(s) the parameter coordinates.
    Each subdomain's symmetric system Phi alpha = f is solved by Cholesky;
    a condition estimate above 1e14 or a breakdown after one diagonal-jitter
    retry raises FitError naming the subdomain.
    """
    pts = np.asarray(getattr(points, "points", points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != covering.box.shape[0] + 1:
        raise ValueError(
            f"points must be (n, {covering.box.shape[0] + 1}), got {pts.shape}"
        )
    nodes_x = pts[:, :-1]
    nodes_f = pts[:, -1]

    subdomains = []
    coefficients = []
    for j in range(covering.centers.shape[0]):
        center = covering.centers[j]
        radius = float(covering.radii[j])
        dist = np.linalg.norm(nodes_x - center, axis=1)
        idx = np.flatnonzero(dist < radius)
        if idx.size == 0:
            raise CoveringError(
                f"subdomain {j} at {center} (radius {radius:.4g}) contains no "
                "nodes; increase the overlap or reduce the subdomain count d"
            )
        X = nodes_x[idx]
        pair_dist = cdist(X, X)
        off_diag = pair_dist[~np.eye(idx.size, dtype=bool)]
        if off_diag.size and np.min(off_diag) == 0.0:
            raise FitError(
                f"subdomain {j}: coincident parameter coordinates make the "
                "local system singular"
            )
        phi = kernel(pair_dist)
        if np.linalg.cond(phi) > CONDITION_LIMIT:
            raise FitError(
                f"subdomain {j}: local system condition exceeds "
                f"{CONDITION_LIMIT:.0e}; adjust the shape parameter beta"
            )
        f_local = nodes_f[idx]
        try:
            alpha = cho_solve(cho_factor(phi), f_local)
        except np.linalg.LinAlgError:
            jitter = 1e-12 * np.trace(phi) / idx.size
            try:
                alpha = cho_solve(cho_factor(phi + jitter * np.eye(idx.size)), f_local)
            except np.linalg.LinAlgError as exc:
                raise FitError(
                    f"subdomain {j}: Cholesky failed even with diagonal jitter; "
                    "adjust the shape parameter beta"
                ) from exc
        subdomains.append(Subdomain(center=center, radius=radius, node_indices=idx))
        coefficients.append(alpha)
    return PUInterpolant(
        kernel=kernel,
        subdomains=subdomains,
        local_coefficients=coefficients,
        nodes_x=nodes_x,
        nodes_f=nodes_f,
        box=covering.box,
    )


def evaluate(interp: PUInterpolant, x) -> float:
    """Shepard-normalized blend of the local interpolants at ``x``.

    Only subdomains whose weight bump is nonzero at ``x`` are touched; a point
    outside all of them raises OutOfDomainError (no extrapolation).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (interp.nodes_x.shape[1],):
        raise ValueError(
            f"query point has shape {x.shape}, expected ({interp.nodes_x.shape[1]},)"
        )
    psi = interp.weight_bumps(x)
    active = np.flatnonzero(psi > 0.0)
    if active.size == 0:
        raise OutOfDomainError(f"point {x} lies outside every subdomain")
    weights = psi[active] / psi[active].sum()
    return float(
        sum(w * interp.local_eval(j, x) for w, j in zip(weights, active))
    )


def fill_distance(nodes_x, box, probe_count: int = 10000) -> float:
    """Sampled fill distance sup_x min_j ||x - x_j|| over the box (diagnostic).

    The supremum is approximated on a regular grid of at least ``probe_count``
    points.
    """
    if probe_count < 100:
        raise ValueError(f"probe_count must be >= 100, got {probe_count}")
    nodes_x = np.asarray(nodes_x, dtype=float)
    if nodes_x.ndim == 1:
        nodes_x = nodes_x[:, None]
    box = np.atleast_2d(np.asarray(box, dtype=float))
    m = box.shape[0]
    per_axis = int(np.ceil(probe_count ** (1.0 / m)))
    axes = [np.linspace(box[k, 0], box[k, 1], per_axis) for k in range(m)]
    if m == 1:
        probes = axes[0][:, None]
    else:
        mesh = np.meshgrid(*axes, indexing="ij")
        probes = np.column_stack([g.ravel() for g in mesh])
    dists = cdist(probes, nodes_x)
    return float(np.max(np.min(dists, axis=1)))

"""Bin-averaging refinement of raw separatrix points.

The raw matrix A is reduced to a small well-distributed node set by averaging
the points falling into each subinterval of [0, M] (M = largest first
coordinate); in 3D a 2D bin grid over [0, M_x] x [0, M_y] is used.  Bins are
half-open [x_l, x_{l+1}) with the last bin closed on the right so the extremal
point is never lost; empty bins are skipped (K counts nonempty bins only).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .models import SADDLE, Equilibrium
from .separatrix import SeparatrixPointSet

__all__ = ["RefinedPointSet", "refine_2d", "refine_3d", "augment"]

#: Max-norm distance below which two rows count as the same node.
DEDUP_TOL = 1e-12


@dataclass(eq=False)
class RefinedPointSet:
    """Refined matrix A' plus the bookkeeping for its JSON sidecar."""

    points: np.ndarray
    K: int
    augmented: bool
    n_raw: int
    L: int
    H: Optional[int] = None

    def __len__(self):
        return self.points.shape[0]

    def meta(self) -> dict:
        return {
            "N": int(self.n_raw),
            "L": int(self.L),
            "H": None if self.H is None else int(self.H),
            "K": int(self.K),
            "augmented": bool(self.augmented),
        }


def _bin_index(values: np.ndarray, upper: float, nbins: int) -> np.ndarray:
    """Half-open equispaced bins over [0, upper], last bin closed."""
    edges = np.linspace(0.0, upper, nbins + 1)
    idx = np.searchsorted(edges, values, side="right") - 1
    idx[values >= edges[-1]] = nbins - 1  # close the final bin
    return idx


def refine_2d(raw: SeparatrixPointSet, L: int) -> RefinedPointSet:
    """2D refinement: first raw point, one mean per nonempty bin, last raw point."""
    if raw.dim != 2:
        raise ValueError(f"refine_2d needs 2D points, got dim={raw.dim}")
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    A = raw.points
    N = A.shape[0]
    if N < 2:
        raise ValueError(f"need at least two raw points, got {N}")

    M = float(np.max(A[:, 0]))
    idx = _bin_index(A[:, 0], M, L)
    rows = [A[0]]
    K = 0
    for l in range(L):
        members = A[idx == l]
        if members.shape[0] == 0:
            continue
        rows.append(members.mean(axis=0))
        K += 1
    rows.append(A[N - 1])
    return RefinedPointSet(points=np.array(rows), K=K, augmented=False,
                           n_raw=N, L=L)


def refine_3d(raw: SeparatrixPointSet, L: int, H: int) -> RefinedPointSet:
    """3D refinement: one componentwise mean per nonempty (l, h) bin."""
    if raw.dim != 3:
        raise ValueError(f"refine_3d needs 3D points, got dim={raw.dim}")
    if L < 1 or H < 1:
        raise ValueError(f"L and H must be >= 1, got L={L}, H={H}")
    A = raw.points
    N = A.shape[0]
    if N < 1:
        raise ValueError("empty raw point set")

    Mx = float(np.max(A[:, 0]))
    My = float(np.max(A[:, 1]))
    lidx = _bin_index(A[:, 0], Mx, L)
    hidx = _bin_index(A[:, 1], My, H)
    rows = []
    K = 0
    for l in range(L):
        for h in range(H):
            members = A[(lidx == l) & (hidx == h)]
            if members.shape[0] == 0:
                continue
            rows.append(members.mean(axis=0))
            K += 1
    return RefinedPointSet(points=np.array(rows), K=K, augmented=False,
                           n_raw=N, L=L, H=H)


def augment(refined: RefinedPointSet, saddle: Equilibrium) -> RefinedPointSet:
    """Append the origin and the saddle location to the refined set.

    The augmented rows are deduplicated (max-norm 1e-12, first occurrence
    kept) so repeated nodes cannot make the interpolation systems downstream
    singular: the origin may already be a raw endpoint, and a bin holding only
    the preserved first/last raw point reproduces that point as its mean.
    Augmenting twice is an error.
    """
    if refined.augmented:
        raise ValueError("point set is already augmented")
    if saddle is None or saddle.stability != SADDLE:
        raise ValueError(
            "augmentation requires a saddle equilibrium"
            + ("" if saddle is None else f", got {saddle.stability}")
        )
    dim = refined.points.shape[1]
    stacked = np.vstack(
        [refined.points, np.zeros(dim), np.asarray(saddle.location, dtype=float)]
    )
    rows = [stacked[0]]
    for row in stacked[1:]:
        if np.min(np.max(np.abs(np.array(rows) - row), axis=1)) > DEDUP_TOL:
            rows.append(row)
    return RefinedPointSet(points=np.array(rows), K=refined.K, augmented=True,
                           n_raw=refined.n_raw, L=refined.L, H=refined.H)

"""Shared fixtures: the reference parameter sets and the expensive pipeline runs."""

import time

import numpy as np
import pytest

from sepkit import models, pu_interp, refine, separatrix
from sepkit.dynamics import IntegratorConfig

# Reference parameter sets for the two models.
TWO_POP = dict(p=2.0, r=1.0, a=2.0, c=3.0, u=1.0, z=3.0, b=0.5)
THREE_POP = dict(p=0.6, q=0.6, r=9.0, a=8.0, c=8.0, f=6.0, g=5.0,
                 u=1.5, v=2.0, z=3.0, b=0.5, e=0.5)
GAMMA = 10.0

# A symmetric competition pair whose separatrix is exactly the diagonal x = y.
SYMMETRIC = dict(p=1.0, r=1.0, a=2.0, c=2.0, u=1.0, z=1.0, b=0.0)


@pytest.fixture(scope="session")
def p2():
    return models.TwoPopParams(**TWO_POP)


@pytest.fixture(scope="session")
def p3():
    return models.ThreePopParams(**THREE_POP)


@pytest.fixture(scope="session")
def cfg():
    return IntegratorConfig()


def _run_pipeline(params, n, gamma, cfg, L, H, beta, d):
    t0 = time.time()
    raw = separatrix.detect(params, n=n, gamma=gamma, cfg=cfg)
    detect_seconds = time.time() - t0
    if params.dim == 2:
        refined = refine.refine_2d(raw, L)
    else:
        refined = refine.refine_3d(raw, L, H)
    saddle = models.separatrix_saddle(params)
    augmented = refine.augment(refined, saddle)
    nodes = augmented.points
    box = np.array([[0.0, nodes[:, k].max()] for k in range(params.dim - 1)])
    covering = pu_interp.build_covering(box, d=d, overlap=1.5)
    interp = pu_interp.fit(nodes, pu_interp.WendlandC2(beta), covering)
    return {
        "params": params,
        "attractors": models.stable_attractors(params),
        "saddle": saddle,
        "raw": raw,
        "refined": refined,
        "augmented": augmented,
        "box": box,
        "covering": covering,
        "interp": interp,
        "tol_bis": separatrix.default_tol_bis(gamma),
        "detect_seconds": detect_seconds,
    }


@pytest.fixture(scope="session")
def run2d(p2, cfg):
    """Full 2D pipeline at the reference settings (n=12, L=10, beta=0.025, d=3)."""
    return _run_pipeline(p2, n=12, gamma=GAMMA, cfg=cfg, L=10, H=None,
                         beta=0.025, d=3)


@pytest.fixture(scope="session")
def run3d(p3, cfg):
    """Full 3D pipeline at the reference settings (n=10, L=H=13, beta=0.005, d=4)."""
    return _run_pipeline(p3, n=10, gamma=GAMMA, cfg=cfg, L=13, H=13,
                         beta=0.005, d=4)


@pytest.fixture(scope="session")
def sym_run(cfg):
    """Symmetric-system pipeline whose exact separatrix is the diagonal."""
    params = models.TwoPopParams(**SYMMETRIC)
    return _run_pipeline(params, n=12, gamma=4.0, cfg=cfg, L=4, H=None,
                         beta=0.005, d=1)

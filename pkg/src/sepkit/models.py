"""Competition models with safety niches: right-hand sides, Jacobians, equilibria.

Two populations (red native N vs. grey exotic E):

    dN/dt = p (1 - N/u) N - a E (1-b) N
    dE/dt = r (1 - E/z) E - c N (1-b) E

Three populations (red native N, red indigenous A, grey exotic E; the two red
populations occupy disjoint habitats and do not compete with each other):

    dN/dt = p (1 - N/u) N - a E (1-b) N
    dA/dt = q (1 - A/v) A - c E (1-e) A
    dE/dt = r (1 - E/z) E - f N (1-b) E - g A (1-e) E

``b`` and ``e`` are the niche fractions: the shares of N and A that are
sheltered from the exotic competitor, scaling every cross term by (1-b) or
(1-e).  All remaining parameters are positive growth rates, competition rates
and carrying capacities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "TwoPopParams",
    "ThreePopParams",
    "ModelParams",
    "Equilibrium",
    "STABLE",
    "UNSTABLE",
    "SADDLE",
    "NON_HYPERBOLIC",
    "DEGENERATE",
    "rhs",
    "jacobian",
    "equilibria",
    "stable_attractors",
    "feasible_saddles",
    "table_conditions",
]

# Stability labels attached to Equilibrium records.
STABLE = "stable"
UNSTABLE = "unstable"
SADDLE = "saddle"
NON_HYPERBOLIC = "non-hyperbolic"
DEGENERATE = "degenerate"

#: |Re lambda| below this (relative to max(1, |lambda|)) marks an eigenvalue
#: as numerically zero and the equilibrium as non-hyperbolic.
NONHYPERBOLIC_RTOL = 1e-9

#: Interior-equilibrium denominators smaller than this (relative to the terms
#: they are built from) flag the equilibrium as degenerate.
DEGENERATE_RTOL = 1e-12


def _check_positive(name: str, value: float) -> None:
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"parameter {name} must be strictly positive, got {value!r}")


def _check_fraction(name: str, value: float) -> None:
    if not (np.isfinite(value) and 0.0 <= value <= 1.0):
        raise ValueError(f"parameter {name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class TwoPopParams:
    """Parameters of the two-population model.

    p, r : growth rates of N and E (1/time)
    a, c : competition rates (1/(population*time))
    u, z : carrying capacities (population)
    b    : niche fraction of N, in [0, 1]
    """

    p: float
    r: float
    a: float
    c: float
    u: float
    z: float
    b: float

    def __post_init__(self):
        for name in ("p", "r", "a", "c", "u", "z"):
            _check_positive(name, getattr(self, name))
        _check_fraction("b", self.b)

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class ThreePopParams:
    """Parameters of the three-population model.

    p, q, r    : growth rates of N, A and E (1/time)
    a, c, f, g : competition rates (1/(population*time))
    u, v, z    : carrying capacities (population)
    b, e       : niche fractions of N and A, in [0, 1]
    """

    p: float
    q: float
    r: float
    a: float
    c: float
    f: float
    g: float
    u: float
    v: float
    z: float
    b: float
    e: float

    def __post_init__(self):
        for name in ("p", "q", "r", "a", "c", "f", "g", "u", "v", "z"):
            _check_positive(name, getattr(self, name))
        _check_fraction("b", self.b)
        _check_fraction("e", self.e)

    @property
    def dim(self) -> int:
        return 3


ModelParams = Union[TwoPopParams, ThreePopParams]


@dataclass(eq=False)
class Equilibrium:
    """A fixed point with feasibility and stability classification.

    ``feasible`` is true iff every coordinate is finite and >= 0.  The
    stability label follows the eigenvalues of the Jacobian: all real parts
    negative -> stable, all positive -> unstable, mixed signs -> saddle, any
    real part numerically zero -> non-hyperbolic.  Interior equilibria whose
    closed-form denominator vanishes are flagged degenerate instead.
    """

    label: str
    location: np.ndarray
    feasible: bool
    stability: str
    eigenvalues: np.ndarray
    degenerate: bool = False

    def to_record(self) -> dict:
        """JSON-ready record {label, location, feasible, stability, eigenvalues}."""
        return {
            "label": self.label,
            "location": [float(x) for x in self.location],
            "feasible": bool(self.feasible),
            "stability": self.stability,
            "eigenvalues": [[float(ev.real), float(ev.imag)] for ev in self.eigenvalues],
            "degenerate": bool(self.degenerate),
        }


def _as_state(params: ModelParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (params.dim,):
        raise ValueError(
            f"state has shape {x.shape}, expected ({params.dim},) for this model"
        )
    return x


def rhs(params: ModelParams, x) -> np.ndarray:
    """Time derivative of the state under the competition model."""
    x = _as_state(params, x)
    if isinstance(params, TwoPopParams):
        N, E = x
        pr = params
        return np.array(
            [
                pr.p * (1.0 - N / pr.u) * N - pr.a * E * (1.0 - pr.b) * N,
                pr.r * (1.0 - E / pr.z) * E - pr.c * N * (1.0 - pr.b) * E,
            ]
        )
    N, A, E = x
    pr = params
    return np.array(
        [
            pr.p * (1.0 - N / pr.u) * N - pr.a * E * (1.0 - pr.b) * N,
            pr.q * (1.0 - A / pr.v) * A - pr.c * E * (1.0 - pr.e) * A,
            pr.r * (1.0 - E / pr.z) * E
            - pr.f * N * (1.0 - pr.b) * E
            - pr.g * A * (1.0 - pr.e) * E,
        ]
    )


def jacobian(params: ModelParams, x) -> np.ndarray:
    """Analytic Jacobian of :func:`rhs` at ``x`` (dim x dim, units 1/time)."""
    x = _as_state(params, x)
    if isinstance(params, TwoPopParams):
        N, E = x
        pr = params
        return np.array(
            [
                [pr.p * (1.0 - 2.0 * N / pr.u) - pr.a * (1.0 - pr.b) * E,
                 -pr.a * (1.0 - pr.b) * N],
                [-pr.c * (1.0 - pr.b) * E,
                 pr.r * (1.0 - 2.0 * E / pr.z) - pr.c * (1.0 - pr.b) * N],
            ]
        )
    N, A, E = x
    pr = params
    return np.array(
        [
            [pr.p * (1.0 - 2.0 * N / pr.u) - pr.a * (1.0 - pr.b) * E,
             0.0,
             -pr.a * (1.0 - pr.b) * N],
            [0.0,
             pr.q * (1.0 - 2.0 * A / pr.v) - pr.c * (1.0 - pr.e) * E,
             -pr.c * (1.0 - pr.e) * A],
            [-pr.f * (1.0 - pr.b) * E,
             -pr.g * (1.0 - pr.e) * E,
             pr.r * (1.0 - 2.0 * E / pr.z)
             - pr.f * (1.0 - pr.b) * N
             - pr.g * (1.0 - pr.e) * A],
        ]
    )


def _classify_eigenvalues(eigenvalues: np.ndarray, rtol: float) -> str:
    re = eigenvalues.real
    zeroish = np.abs(re) < rtol * np.maximum(1.0, np.abs(eigenvalues))
    if np.any(zeroish):
        return NON_HYPERBOLIC
    if np.all(re < 0.0):
        return STABLE
    if np.all(re > 0.0):
        return UNSTABLE
    return SADDLE


def _make_equilibrium(params: ModelParams, label: str, location: np.ndarray,
                      rtol: float) -> Equilibrium:
    eigenvalues = np.linalg.eigvals(jacobian(params, location))
    feasible = bool(np.all(np.isfinite(location)) and np.all(location >= 0.0))
    return Equilibrium(
        label=label,
        location=location,
        feasible=feasible,
        stability=_classify_eigenvalues(eigenvalues, rtol),
        eigenvalues=eigenvalues,
    )


def _degenerate_equilibrium(params: ModelParams, label: str) -> Equilibrium:
    return Equilibrium(
        label=label,
        location=np.full(params.dim, np.nan),
        feasible=False,
        stability=DEGENERATE,
        eigenvalues=np.array([], dtype=complex),
        degenerate=True,
    )


def _is_degenerate(denominator: float, scale: float) -> bool:
    return abs(denominator) <= DEGENERATE_RTOL * max(scale, 1e-300)


def equilibria(params: ModelParams, *,
               nonhyperbolic_rtol: float = NONHYPERBOLIC_RTOL) -> list:
    """All closed-form equilibria with feasibility and stability filled in.

    Returns 4 equilibria (E0..E3) for the two-population model and 8
    (E0..E7) for the three-population one.  Interior equilibria whose
    denominator vanishes (to relative tolerance) are flagged degenerate
    rather than dropped.
    """
    if isinstance(params, TwoPopParams):
        return _equilibria_2d(params, nonhyperbolic_rtol)
    return _equilibria_3d(params, nonhyperbolic_rtol)


def _equilibria_2d(pr: TwoPopParams, rtol: float) -> list:
    out = []
    out.append(_make_equilibrium(pr, "E0", np.array([0.0, 0.0]), rtol))
    out.append(_make_equilibrium(pr, "E1", np.array([0.0, pr.z]), rtol))
    out.append(_make_equilibrium(pr, "E2", np.array([pr.u, 0.0]), rtol))

    nb = 1.0 - pr.b
    den = pr.p * pr.r - pr.a * pr.u * pr.c * pr.z * nb * nb
    scale = max(abs(pr.p * pr.r), abs(pr.a * pr.u * pr.c * pr.z * nb * nb))
    if _is_degenerate(den, scale):
        out.append(_degenerate_equilibrium(pr, "E3"))
    else:
        e3 = np.array(
            [
                pr.u * pr.r * (pr.p - pr.a * pr.z * nb) / den,
                pr.z * pr.p * (pr.r - pr.c * pr.u * nb) / den,
            ]
        )
        out.append(_make_equilibrium(pr, "E3", e3, rtol))
    return out


def _equilibria_3d(pr: ThreePopParams, rtol: float) -> list:
    nb = 1.0 - pr.b
    ne = 1.0 - pr.e
    out = []
    out.append(_make_equilibrium(pr, "E0", np.array([0.0, 0.0, 0.0]), rtol))
    out.append(_make_equilibrium(pr, "E1", np.array([pr.u, 0.0, 0.0]), rtol))
    out.append(_make_equilibrium(pr, "E2", np.array([0.0, pr.v, 0.0]), rtol))
    out.append(_make_equilibrium(pr, "E3", np.array([pr.u, pr.v, 0.0]), rtol))
    out.append(_make_equilibrium(pr, "E4", np.array([0.0, 0.0, pr.z]), rtol))

    # E5: N-E coexistence in the A=0 plane.
    den5 = pr.a * pr.z * pr.u * pr.f * nb * nb - pr.p * pr.r
    scale5 = max(abs(pr.a * pr.z * pr.u * pr.f * nb * nb), abs(pr.p * pr.r))
    if _is_degenerate(den5, scale5):
        out.append(_degenerate_equilibrium(pr, "E5"))
    else:
        e5 = np.array(
            [
                pr.u * pr.r * (pr.a * pr.z * nb - pr.p) / den5,
                0.0,
                pr.z * pr.p * (pr.f * pr.u * nb - pr.r) / den5,
            ]
        )
        out.append(_make_equilibrium(pr, "E5", e5, rtol))

    # E6: A-E coexistence in the N=0 plane.
    den6 = pr.c * pr.z * pr.v * pr.g * ne * ne - pr.q * pr.r
    scale6 = max(abs(pr.c * pr.z * pr.v * pr.g * ne * ne), abs(pr.q * pr.r))
    if _is_degenerate(den6, scale6):
        out.append(_degenerate_equilibrium(pr, "E6"))
    else:
        e6 = np.array(
            [
                0.0,
                pr.v * pr.r * (pr.c * pr.z * ne - pr.q) / den6,
                pr.z * pr.q * (pr.v * pr.g * ne - pr.r) / den6,
            ]
        )
        out.append(_make_equilibrium(pr, "E6", e6, rtol))

    # E7: full interior coexistence.  With alpha = p c z v g (1-e)^2 and
    # beta = a z u f q (1-b)^2, eliminating N and A from the E equation gives
    # E = z p q [f u (1-b) + v g (1-e) - r] / (alpha + beta - p r q), and
    # back-substitution yields the other two components.
    alpha = pr.p * pr.c * pr.z * pr.v * pr.g * ne * ne
    beta = pr.a * pr.z * pr.u * pr.f * pr.q * nb * nb
    prq = pr.p * pr.r * pr.q
    den7 = alpha + beta - prq
    scale7 = max(abs(alpha), abs(beta), abs(prq))
    if _is_degenerate(den7, scale7):
        out.append(_degenerate_equilibrium(pr, "E7"))
    else:
        fu = pr.f * pr.u * nb
        vg = pr.v * pr.g * ne
        e7 = np.array(
            [
                pr.u * (alpha - prq - pr.z * pr.a * pr.q * nb * (vg - pr.r)) / den7,
                pr.v * (beta - prq - pr.p * pr.c * pr.z * ne * (fu - pr.r)) / den7,
                pr.z * pr.p * pr.q * (fu + vg - pr.r) / den7,
            ]
        )
        out.append(_make_equilibrium(pr, "E7", e7, rtol))
    return out


def stable_attractors(params: ModelParams, **kwargs) -> list:
    """Feasible stable equilibria, in label order."""
    return [
        eq for eq in equilibria(params, **kwargs)
        if eq.feasible and eq.stability == STABLE
    ]


def feasible_saddles(params: ModelParams, **kwargs) -> list:
    """Feasible saddle points, in label order."""
    return [
        eq for eq in equilibria(params, **kwargs)
        if eq.feasible and eq.stability == SADDLE
    ]


def separatrix_saddle(params: ModelParams, **kwargs) -> Equilibrium:
    """The saddle whose stable manifold separates the two basins.

    That is the coexistence saddle, i.e. the feasible saddle with strictly
    positive coordinates (E3 in 2D, E7 in 3D); boundary saddles on the
    invariant axes/faces do not carry the separatrix.
    """
    saddles = feasible_saddles(params, **kwargs)
    interior = [eq for eq in saddles if np.all(eq.location > 0.0)]
    if len(interior) == 1:
        return interior[0]
    if not interior and len(saddles) == 1:
        return saddles[0]
    raise ValueError(
        f"no unique interior saddle: found {[eq.label for eq in saddles]}"
    )


def table_conditions(params: ModelParams) -> dict:
    """Literal evaluation of the feasibility/stability inequality tables.

    Returns ``{label: {"feasible": bool, "stable": bool}}``.  Rows whose
    stability column reads "unstable" get ``stable=False``.  The interior
    point of the three-population model (E7) has no tabulated conditions and
    is classified numerically only, so it does not appear here.
    """
    if isinstance(params, TwoPopParams):
        pr = params
        nb = 1.0 - pr.b
        az = pr.a * pr.z * nb
        cu = pr.c * pr.u * nb
        return {
            "E0": {"feasible": True, "stable": False},
            "E1": {"feasible": True, "stable": pr.p < az},
            "E2": {"feasible": True, "stable": pr.r < cu},
            "E3": {
                "feasible": (pr.p > az and pr.r > cu) or (pr.p < az and pr.r < cu),
                "stable": pr.r > cu and pr.p > az,
            },
        }
    pr = params
    nb = 1.0 - pr.b
    ne = 1.0 - pr.e
    az = pr.a * pr.z * nb
    cz = pr.c * pr.z * ne
    fu = pr.f * pr.u * nb
    vg = pr.v * pr.g * ne
    return {
        "E0": {"feasible": True, "stable": False},
        "E1": {"feasible": True, "stable": False},
        "E2": {"feasible": True, "stable": False},
        "E3": {"feasible": True, "stable": pr.r < fu + vg},
        "E4": {"feasible": True, "stable": pr.q < cz and pr.p < az},
        "E5": {
            "feasible": (pr.r > fu and pr.p > az) or (pr.r < fu and pr.p < az),
            "stable": (
                pr.r > fu
                and pr.p > az
                and pr.c * ne * pr.z * pr.p * (fu - pr.r)
                < pr.q * (pr.a * pr.z * pr.u * pr.f * nb * nb - pr.p * pr.r)
            ),
        },
        "E6": {
            "feasible": (pr.q > cz and pr.r > vg) or (pr.q < cz and pr.r < vg),
            "stable": (
                pr.q > cz
                and pr.r > vg
                and pr.a * nb * pr.z * pr.q * (vg - pr.r)
                < pr.p * (pr.c * pr.z * pr.v * pr.g * ne * ne - pr.q * pr.r)
            ),
        },
    }

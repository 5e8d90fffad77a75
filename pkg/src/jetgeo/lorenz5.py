"""Lorenz five-component model of Rossby/gravity wave interaction.

Slow Rossby variables are ``x1, x2, x3``; fast gravity variables are ``x4, x5``;
``eps`` couples them. Besides the field itself this module carries the
closed forms of its jet geometry, which serve as oracles for the generic
pipeline in :mod:`jetgeo.geometry`, and the classification of the level
sets of its Yang-Mills energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import VectorField, parse_field

LORENZ5_TEXT = """\
# Lorenz five-component atmospheric model
X1 = -x2*x3 + eps*x2*x5
X2 = x1*x3 - eps*x1*x5
X3 = -x1*x2
X4 = -x5
X5 = x4 + eps*x1*x2
"""

LINE_TOLERANCE = 1e-12
FREE_COORDINATES = ("x2", "x4")

_BASE = parse_field(LORENZ5_TEXT)


def lorenz_field(eps: float) -> VectorField:
    return _BASE.with_params(eps=float(eps))


def _coords(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 5:
        raise ValueError("Lorenz points are 5-vectors")
    return x[..., 0], x[..., 1], x[..., 2], x[..., 3], x[..., 4]


def closed_field(x, eps: float) -> np.ndarray:
    x1, x2, x3, x4, x5 = _coords(x)
    return np.stack([-x2 * x3 + eps * x2 * x5,
                     x1 * x3 - eps * x1 * x5,
                     -x1 * x2,
                     -x5,
                     x4 + eps * x1 * x2], axis=-1)


def closed_connection(x, eps: float) -> np.ndarray:
    """Connection matrix written out entry by entry."""
    x1, _, x3, _, x5 = _coords(x)
    N = np.zeros(np.shape(x1) + (5, 5))
    N[..., 0, 1] = x3 - eps * x5
    N[..., 1, 0] = -x3 + eps * x5
    N[..., 1, 2] = -x1
    N[..., 2, 1] = x1
    N[..., 1, 4] = eps * x1
    N[..., 4, 1] = -eps * x1
    N[..., 3, 4] = 1.0
    N[..., 4, 3] = -1.0
    return N


def closed_em(x, eps: float) -> np.ndarray:
    return -closed_connection(x, eps)


def closed_torsion(eps: float) -> np.ndarray:
    """Constant torsion ``R[k, i, j]`` (0-based), independent of the point."""
    R = np.zeros((5, 5, 5))

    def put(i, j, k, value):
        # 1-based (upper i, lower j k) as in R^(i)_(1)jk; antisymmetric in i, j
        R[k - 1, i - 1, j - 1] = value
        R[k - 1, j - 1, i - 1] = -value

    put(3, 2, 1, 1.0)
    put(5, 2, 1, -eps)
    put(2, 1, 3, -1.0)
    put(2, 1, 5, eps)
    return R


def closed_eym(x, eps: float):
    """Yang-Mills energy ``(eps x5 - x3)^2 + x1^2 + (eps x1)^2 + 1``."""
    x1, _, x3, _, x5 = _coords(x)
    e = (eps * x5 - x3) ** 2 + x1 ** 2 + (eps * x1) ** 2 + 1.0
    return float(e) if np.ndim(e) == 0 else e


def closed_eym_expanded(x, eps: float):
    """Same energy as a quadratic form in ``(x1, x3, x5)``."""
    x1, _, x3, _, x5 = _coords(x)
    e = (1 + eps ** 2) * x1 ** 2 + x3 ** 2 + eps ** 2 * x5 ** 2 - 2 * eps * x3 * x5 + 1.0
    return float(e) if np.ndim(e) == 0 else e


def first_integrals(x) -> np.ndarray:
    """The two conserved quadratics ``x1^2 + x2^2`` and ``x2^2 + x3^2 + x4^2 + x5^2``.

    Both are conserved for every ``eps``.
    """
    x1, x2, x3, x4, x5 = _coords(x)
    return np.stack([x1 ** 2 + x2 ** 2, x2 ** 2 + x3 ** 2 + x4 ** 2 + x5 ** 2], axis=-1)


# --- level sets of the Yang-Mills energy ----------------------------------------

def rotation_matrix(eps: float) -> np.ndarray:
    """Orthogonal map from canonical axes ``(X1, X3, X5)`` to ``(x1, x3, x5)``.

    The first canonical axis runs along the line ``x1 = 0, x3 = eps x5``,
    which is the axis of every non-degenerate level set.
    """
    s = math.sqrt(1.0 + eps * eps)
    return np.array([[0.0, s, 0.0],
                     [eps, 0.0, 1.0],
                     [1.0, 0.0, -eps]]) / s


def axis_direction(eps: float) -> np.ndarray:
    """Unit direction of the line ``x1 = 0, x3 = eps x5`` in ``(x1, x3, x5)``."""
    return rotation_matrix(eps)[:, 0].copy()


@dataclass(frozen=True)
class EmptyLevelSet:
    C: float
    eps: float
    case = "empty"

    def to_dict(self) -> dict:
        return {"case": self.case, "free_coordinates": list(FREE_COORDINATES),
                "tolerance": LINE_TOLERANCE}


@dataclass(frozen=True)
class LineLevelSet:
    C: float
    eps: float
    direction: np.ndarray
    case = "line"

    @property
    def constraints(self) -> str:
        return f"x1=0, x3={self.eps!r}*x5"

    def contains(self, x1: float, x3: float, x5: float, tol: float = 1e-12) -> bool:
        return abs(x1) <= tol and abs(x3 - self.eps * x5) <= tol

    def to_dict(self) -> dict:
        return {"case": self.case, "direction": self.direction.tolist(),
                "constraints": self.constraints,
                "free_coordinates": list(FREE_COORDINATES), "tolerance": LINE_TOLERANCE}


@dataclass(frozen=True)
class CylinderLevelSet:
    C: float
    eps: float
    radius: float
    axis: LineLevelSet
    rotation: np.ndarray
    case = "cylinder"

    def sample(self, along, angle) -> np.ndarray:
        """Points ``(x1, x3, x5)`` on the cylinder at axial coordinate ``along``."""
        along, angle = np.broadcast_arrays(np.asarray(along, float), np.asarray(angle, float))
        canon = np.stack([along, self.radius * np.cos(angle), self.radius * np.sin(angle)],
                         axis=-1)
        return canon @ self.rotation.T

    def to_dict(self) -> dict:
        return {"case": self.case, "radius": self.radius, "rotation": self.rotation.tolist(),
                "direction": self.axis.direction.tolist(),
                "constraints": self.axis.constraints,
                "free_coordinates": list(FREE_COORDINATES), "tolerance": LINE_TOLERANCE}


LevelSetClass = EmptyLevelSet | LineLevelSet | CylinderLevelSet


def classify_level_set(C: float, eps: float) -> LevelSetClass:
    """Classify ``{closed_eym = C}`` in the ``(x1, x3, x5)`` subspace.

    ``x2`` and ``x4`` are free, so in R^5 each case is a product with a plane.
    ``C`` within :data:`LINE_TOLERANCE` of 1 counts as the line case.
    """
    C = float(C)
    eps = float(eps)
    if abs(C - 1.0) <= LINE_TOLERANCE:
        return LineLevelSet(C, eps, axis_direction(eps))
    if C < 1.0:
        return EmptyLevelSet(C, eps)
    radius = math.sqrt((C - 1.0) / (1.0 + eps * eps))
    return CylinderLevelSet(C, eps, radius, LineLevelSet(1.0, eps, axis_direction(eps)),
                            rotation_matrix(eps))

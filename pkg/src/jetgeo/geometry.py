"""Jet Riemann-Lagrange objects produced by a first-order system.

Every function takes a :class:`~jetgeo.field.VectorField` and a point (or a
batch of points, shape ``(..., n)``) and works from the field's symbolic
first and second partials. Finite differences appear only in
:func:`numeric_jacobian`, which exists as a test oracle.

Index conventions (0-based arrays):

* ``J[i, j] = dX_i/dx_j``
* ``N[i, j] = -(J[i, j] - J[j, i]) / 2``
* ``R[k, i, j] = dN[i, j]/dx_k`` (torsion, one matrix per ``k``)
* ``F = -N``
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from itertools import combinations

import numpy as np

from .field import VectorField


def _swap(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2)


def jacobian(field: VectorField, x) -> np.ndarray:
    return field.jacobian(x)


def connection_from_jacobian(J: np.ndarray) -> np.ndarray:
    # written as (J^T - J)/2 rather than -(J - J^T)/2 to avoid -0.0 entries;
    # both round identically
    return 0.5 * (_swap(J) - J)


def em_from_jacobian(J: np.ndarray) -> np.ndarray:
    return 0.5 * (J - _swap(J))


def nonlinear_connection(field: VectorField, x) -> np.ndarray:
    """Spatial part ``N`` of the canonical non-linear connection.

    The temporal part ``M`` is identically zero; see
    :attr:`GeometryReport.temporal_connection`.
    """
    return connection_from_jacobian(field.jacobian(x))


def torsion_from_hessian(H: np.ndarray) -> np.ndarray:
    # H[..., i, j, k] = d2 X_i / dx_j dx_k  ->  R[..., k, i, j]
    R = 0.5 * (np.swapaxes(H, -3, -2) - H)
    return np.moveaxis(R, -1, -3)


def torsion(field: VectorField, x) -> np.ndarray:
    """Torsion matrices stacked as ``R[k, i, j]``."""
    return torsion_from_hessian(field.hessian(x))


def em_matrix(field: VectorField, x) -> np.ndarray:
    """Electromagnetic components ``F[i, j] = (dX_i/dx_j - dX_j/dx_i) / 2``."""
    return em_from_jacobian(field.jacobian(x))


def yang_mills_from_em(F: np.ndarray) -> np.ndarray:
    n = F.shape[-1]
    iu = np.triu_indices(n, 1)
    return np.sum(F[..., iu[0], iu[1]] ** 2, axis=-1)


def yang_mills_energy(field: VectorField, x):
    """Sum of squared strictly-upper entries of ``F``."""
    e = yang_mills_from_em(em_matrix(field, x))
    return float(e) if np.ndim(e) == 0 else e


def yang_mills_trace_form(F: np.ndarray) -> np.ndarray:
    """``Tr(F F^T) / 2``; equals :func:`yang_mills_from_em` for antisymmetric F."""
    return 0.5 * np.einsum("...ij,...ij->...", F, F)


def maxwell_cyclic_sums(field: VectorField, x) -> tuple[list[tuple[int, int, int]], np.ndarray]:
    """Cyclic sums ``dF_ij/dx_k + dF_jk/dx_i + dF_ki/dx_j`` for all ``i<j<k``.

    Returns the list of 1-based triples and an array of shape
    ``(..., n_triples)``.
    """
    H = field.hessian(x)
    # dF[..., i, j, k] = dF_ij / dx_k
    dF = 0.5 * (H - np.swapaxes(H, -3, -2))
    triples = list(combinations(range(field.n), 3))
    if not triples:
        return [], np.zeros(H.shape[:-3] + (0,))
    i, j, k = (np.array(t) for t in zip(*triples))
    sums = dF[..., i, j, k] + dF[..., j, k, i] + dF[..., k, i, j]
    return [(a + 1, b + 1, c + 1) for a, b, c in triples], sums


def maxwell_residual(field: VectorField, x) -> float:
    """Largest absolute cyclic sum; 0 when ``n < 3``."""
    _, sums = maxwell_cyclic_sums(field, x)
    if sums.size == 0:
        return 0.0
    return float(np.max(np.abs(sums)))


def numeric_jacobian(field: VectorField, x, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian, ``J[i, j] ~ (X_i(x+h e_j) - X_i(x-h e_j)) / 2h``."""
    if h <= 0:
        raise ValueError("step h must be positive")
    x = np.asarray(x, dtype=float)
    n = field.n
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        cols.append((field(x + e) - field(x - e)) / (2 * h))
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class FlatCertificate:
    """The identically vanishing blocks of the generalized Cartan connection.

    For the jet least-squares Lagrangian every adapted component of the
    canonical Cartan connection is zero, and so is its curvature. The arrays
    are read-only broadcast views, so even large ``n`` costs no memory.
    """

    n: int
    cartan_horizontal: np.ndarray  # H^i_jk
    cartan_vertical: np.ndarray  # C^i_j(k)
    curvature: np.ndarray  # R^i_jkl
    labels: dict = dc_field(default_factory=dict)

    def is_flat(self) -> bool:
        return not (self.cartan_horizontal.any() or self.cartan_vertical.any()
                    or self.curvature.any())


def flat_certificate(field: VectorField, x=None) -> FlatCertificate:
    n = field.n
    return FlatCertificate(
        n=n,
        cartan_horizontal=np.broadcast_to(0.0, (n, n, n)),
        cartan_vertical=np.broadcast_to(0.0, (n, n, n)),
        curvature=np.broadcast_to(0.0, (n, n, n, n)),
        labels={
            "cartan_horizontal": "adapted horizontal coefficients of the Cartan connection",
            "cartan_vertical": "adapted vertical coefficients of the Cartan connection",
            "curvature": "adapted curvature components of the Cartan connection",
        },
    )


@dataclass(frozen=True)
class GeometryReport:
    point: np.ndarray
    jacobian: np.ndarray
    connection: np.ndarray
    torsion: np.ndarray
    em: np.ndarray
    eym: float
    maxwell_residual: float

    @property
    def temporal_connection(self) -> np.ndarray:
        """Temporal connection components ``M^i_11``; always zero."""
        return np.zeros(len(self.point))

    def to_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "jacobian": self.jacobian.tolist(),
            "connection": self.connection.tolist(),
            "torsion": self.torsion.tolist(),
            "em": self.em.tolist(),
            "eym": float(self.eym),
            "maxwell_residual": float(self.maxwell_residual),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def geometry_report(field: VectorField, x) -> GeometryReport:
    x = np.asarray(x, dtype=float)
    if x.shape != (field.n,):
        raise ValueError(f"expected a point of dimension {field.n}, got shape {x.shape}")
    J = field.jacobian(x)
    H = field.hessian(x)
    N = connection_from_jacobian(J)
    F = em_from_jacobian(J)
    _, sums = maxwell_cyclic_sums(field, x)
    return GeometryReport(
        point=x,
        jacobian=J,
        connection=N,
        torsion=torsion_from_hessian(H),
        em=F,
        eym=float(yang_mills_from_em(F)),
        maxwell_residual=float(np.max(np.abs(sums))) if sums.size else 0.0,
    )

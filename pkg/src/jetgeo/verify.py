"""Invariant suites shared by ``jetgeo verify`` and the acceptance tests.

Each suite returns a :class:`SuiteResult` holding the worst residual found
and the tolerance it is held to. Random points are drawn from a seeded
generator, so a given seed always reproduces the same report.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dynamics as D
from . import geometry as G
from . import lorenz5 as L
from .field import VectorField

ORACLE_EPS = (0.0, 0.1, 1.0)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    residual: float
    tolerance: float
    detail: str = ""
    # "max": pass when residual <= tolerance; "min": pass when residual >= tolerance
    mode: str = "max"

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.residual):
            return False
        if self.mode == "min":
            return self.residual >= self.tolerance
        return self.residual <= self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        rel = ">=" if self.mode == "min" else "<="
        text = f"{status}  {self.name:<22} {self.residual!r:<24} (need {rel} {self.tolerance!r})"
        return text + (f"  {self.detail}" if self.detail else "")


def sample_points(rng: np.random.Generator, n: int, count: int, box: float = 5.0) -> np.ndarray:
    return rng.uniform(-box, box, size=(count, n))


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def lorenz_oracle(rng, count: int = 1000, eps_values=ORACLE_EPS, box: float = 5.0) -> SuiteResult:
    """Generic pipeline against the closed forms for the Lorenz field."""
    worst, where = 0.0, ""
    for eps in eps_values:
        f = L.lorenz_field(eps)
        P = sample_points(rng, 5, count, box)
        J = f.jacobian(P)
        N = G.connection_from_jacobian(J)
        F = G.em_from_jacobian(J)
        R = G.torsion_from_hessian(f.hessian(P))
        errs = {
            "connection": _maxabs(N - L.closed_connection(P, eps)),
            "torsion": _maxabs(R - L.closed_torsion(eps)),
            "em": _maxabs(F - L.closed_em(P, eps)),
            "eym": _maxabs(G.yang_mills_from_em(F) - L.closed_eym(P, eps)),
            "eym_expanded": _maxabs(L.closed_eym(P, eps) - L.closed_eym_expanded(P, eps)),
        }
        for key, err in errs.items():
            if err > worst or not where:
                worst, where = err, f"{key} at eps={eps!r}"
    return SuiteResult("lorenz_oracle", worst, 1e-12, where)


def antisymmetry(field: VectorField, points) -> SuiteResult:
    J = field.jacobian(points)
    N = G.connection_from_jacobian(J)
    F = G.em_from_jacobian(J)
    R = G.torsion_from_hessian(field.hessian(points))
    errs = {
        "N+N^T": _maxabs(N + np.swapaxes(N, -1, -2)),
        "F+N": _maxabs(F + N),
        "R_k+R_k^T": _maxabs(R + np.swapaxes(R, -1, -2)),
    }
    key = max(errs, key=errs.get)
    return SuiteResult("antisymmetry", errs[key], 1e-12, f"worst: {key}")


def yang_mills_identity(field: VectorField, points) -> SuiteResult:
    F = G.em_matrix(field, points)
    err = _maxabs(G.yang_mills_from_em(F) - G.yang_mills_trace_form(F))
    return SuiteResult("yang_mills_identity", err, 1e-12)


def maxwell(field: VectorField, points) -> SuiteResult:
    triples, sums = G.maxwell_cyclic_sums(field, points)
    if not triples:
        return SuiteResult("maxwell", 0.0, 1e-12, "n < 3, no triples")
    a = np.abs(sums).reshape(-1, len(triples))
    p, t = np.unravel_index(int(np.argmax(a)), a.shape)
    worst = float(a[p, t])
    detail = "triple ({}, {}, {})".format(*triples[t])
    return SuiteResult("maxwell", worst, 1e-12, detail)


def derivative_oracle(field: VectorField, points, h: float = 1e-6) -> SuiteResult:
    """Symbolic Jacobian against central differences.

    The error of each entry is scaled by ``max(|J_ij|, 1)``: relative for
    large entries, absolute near zero.
    """
    worst = 0.0
    for x in np.atleast_2d(points):
        Js = field.jacobian(x)
        Jn = G.numeric_jacobian(field, x, h)
        worst = max(worst, _maxabs((Js - Jn) / np.maximum(np.abs(Js), 1.0)))
    return SuiteResult("derivative_oracle", worst, 1e-6)


def el_inclusion(field: VectorField, points) -> SuiteResult:
    """E-L residual vanishes on first-order jets ``v = X, a = J X``."""
    X = field(points)
    J = field.jacobian(points)
    a = np.einsum("...ij,...j->...i", J, X)
    return SuiteResult("el_inclusion", _maxabs(D.el_residual(field, points, X, a)), 1e-12)


def el_consistency(field: VectorField, points, rng) -> SuiteResult:
    v = rng.uniform(-1, 1, size=np.shape(points))
    a = D.el_acceleration(field, points, v)
    return SuiteResult("el_consistency", _maxabs(D.el_residual(field, points, v, a)), 1e-12)


def lorenz_first_integrals(eps: float = 0.05, x0=(1, 1, 1, 0.1, 0.1),
                           t1: float = 10.0, dt: float = 1e-3) -> SuiteResult:
    traj = D.integrate_field(L.lorenz_field(eps), x0, 0.0, t1, dt)
    I = L.first_integrals(traj.xs)
    drift = np.abs(I - I[0]).max(axis=0)
    return SuiteResult("first_integrals", float(drift.max()), 1e-8,
                       f"drifts {float(drift[0])!r}, {float(drift[1])!r}")


def lorenz_el_flow(eps: float = 0.1, x0=(1, 1, 1, 0.1, 0.1),
                   t1: float = 5.0, dt: float = 1e-3) -> SuiteResult:
    f = L.lorenz_field(eps)
    x0 = np.asarray(x0, dtype=float)
    a = D.integrate_field(f, x0, 0.0, t1, dt)
    b = D.integrate_el(f, x0, f(x0), 0.0, t1, dt)
    return SuiteResult("el_flow", _maxabs(a.xs - b.xs), 1e-6)


def lorenz_minimizer(eps: float = 0.05, x0=(1, 1, 1, 0.1, 0.1),
                     t1: float = 5.0, dt: float = 1e-3) -> tuple[SuiteResult, SuiteResult]:
    f = L.lorenz_field(eps)
    traj = D.integrate_field(f, x0, 0.0, t1, dt)
    base = D.action(f, traj)
    xs = traj.xs.copy()
    xs[len(xs) // 2, 0] += 0.1
    bumped = D.action(f, D.Trajectory(traj.t0, traj.dt, xs, ts=traj.ts))
    return (SuiteResult("action_minimum", base, 1e-10),
            SuiteResult("action_perturbed", bumped, 1e-4, mode="min"))


def run_suites(field: VectorField, seed: int = 0, box: float = 5.0,
               lorenz: bool = False, points: int = 100) -> list[SuiteResult]:
    """Run every applicable suite.

    With ``lorenz=True`` the field argument is ignored and the Lorenz model
    is checked across all oracle values of ``eps``, including the
    trajectory-based suites.
    """
    rng = np.random.default_rng(seed)
    results: list[SuiteResult] = []
    if lorenz:
        results.append(lorenz_oracle(rng, box=box))
        fields = [L.lorenz_field(eps) for eps in ORACLE_EPS]
    else:
        fields = [field]

    merged: dict[str, SuiteResult] = {}
    for f in fields:
        P = sample_points(rng, f.n, points, box)
        for res in (antisymmetry(f, P), yang_mills_identity(f, P), maxwell(f, P),
                    derivative_oracle(f, P), el_inclusion(f, P), el_consistency(f, P, rng)):
            prev = merged.get(res.name)
            if prev is None or res.residual > prev.residual:
                detail = res.detail
                if lorenz:
                    detail = (detail + "; " if detail else "") + f"eps={f.params['eps']!r}"
                merged[res.name] = SuiteResult(res.name, res.residual, res.tolerance, detail)
    results.extend(merged.values())

    if lorenz:
        results.append(lorenz_first_integrals())
        results.append(lorenz_el_flow())
        results.extend(lorenz_minimizer())
    return results

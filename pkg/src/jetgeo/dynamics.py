"""Least-squares Lagrangian dynamics on the 1-jet space.

The Lagrangian ``L(x, v) = |v - X(x)|^2`` vanishes exactly on solutions of
``dx/dt = X(x)``. Its Euler-Lagrange residual is reported in the order
``dL/dx - d/dt(dL/dv)``; solving the residual for the acceleration gives the
second-order flow ``a = J v - J^T (v - X)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .field import VectorField


class IntegrationError(ArithmeticError):
    """The state became non-finite; ``last_t`` is the last time with a finite state."""

    def __init__(self, last_t: float, message: str = "non-finite state"):
        self.last_t = last_t
        super().__init__(f"{message} (last valid t = {last_t!r})")


@dataclass(frozen=True)
class JetState:
    t: float
    x: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """Samples of a curve on a uniform grid.

    ``ts`` is stored explicitly because the final step of an integration is
    shortened to land on ``t1``; all other steps equal ``dt``.
    """

    t0: float
    dt: float
    xs: np.ndarray
    vs: np.ndarray | None = None
    ts: np.ndarray | None = None

    def __post_init__(self):
        xs = np.atleast_2d(np.asarray(self.xs, dtype=float))
        object.__setattr__(self, "xs", xs)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if len(xs) < 2:
            raise ValueError("a trajectory needs at least 2 samples")
        if not np.all(np.isfinite(xs)):
            raise ValueError("trajectory samples must be finite")
        if self.vs is not None:
            vs = np.asarray(self.vs, dtype=float)
            if vs.shape != xs.shape:
                raise ValueError("velocity samples must match position samples")
            object.__setattr__(self, "vs", vs)
        if self.ts is None:
            object.__setattr__(self, "ts", self.t0 + self.dt * np.arange(len(xs)))
        else:
            ts = np.asarray(self.ts, dtype=float)
            if ts.shape != (len(xs),):
                raise ValueError("time samples must match position samples")
            object.__setattr__(self, "ts", ts)

    @property
    def n(self) -> int:
        return self.xs.shape[1]

    def __len__(self) -> int:
        return len(self.xs)

    def state(self, idx: int) -> JetState:
        v = self.vs[idx] if self.vs is not None else finite_difference_velocities(self)[idx]
        return JetState(float(self.ts[idx]), self.xs[idx], v)

    def to_csv(self, extra: dict[str, np.ndarray] | None = None) -> str:
        """CSV with header ``t,x1..xn[,v1..vn][,extra...]``, 17 significant digits."""
        header = ["t"] + [f"x{i}" for i in range(1, self.n + 1)]
        cols = [self.ts[:, None], self.xs]
        if self.vs is not None:
            header += [f"v{i}" for i in range(1, self.n + 1)]
            cols.append(self.vs)
        for name, values in (extra or {}).items():
            header.append(name)
            cols.append(np.asarray(values, dtype=float)[:, None])
        table = np.hstack(cols)
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for row in table:
            buf.write(",".join(format(v, ".17g") for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Trajectory":
        """Parse CSV produced by :meth:`to_csv`; unknown extra columns are ignored."""
        rows = list(csv.reader(io.StringIO(text)))
        rows = [r for r in rows if r and any(c.strip() for c in r)]
        if not rows:
            raise ValueError("empty trajectory CSV")
        header = [h.strip() for h in rows[0]]
        if not header or header[0] != "t":
            raise ValueError("trajectory CSV must start with a 't' column")
        xcols = _indexed_columns(header, "x")
        vcols = _indexed_columns(header, "v")
        if not xcols:
            raise ValueError("trajectory CSV has no x1..xn columns")
        if vcols and len(vcols) != len(xcols):
            raise ValueError("v columns must match x columns")
        try:
            data = np.array([[float(c) for c in r] for r in rows[1:]], dtype=float)
        except ValueError as exc:
            raise ValueError(f"non-numeric entry in trajectory CSV: {exc}") from None
        if data.ndim != 2 or data.shape[1] != len(header):
            raise ValueError("ragged trajectory CSV")
        if len(data) < 2:
            raise ValueError("a trajectory needs at least 2 samples")
        ts = data[:, 0]
        steps = np.diff(ts)
        if np.any(steps <= 0):
            raise ValueError("time column must be strictly increasing")
        return cls(t0=float(ts[0]), dt=float(steps[0]), xs=data[:, xcols],
                   vs=data[:, vcols] if vcols else None, ts=ts)


def _indexed_columns(header: list[str], prefix: str) -> list[int]:
    out = []
    i = 1
    while f"{prefix}{i}" in header:
        out.append(header.index(f"{prefix}{i}"))
        i += 1
    return out


# --- Lagrangian and Euler-Lagrange equations -----------------------------------

def jls(field: VectorField, x, v):
    """Jet least-squares Lagrangian ``sum_i (v_i - X_i(x))^2``."""
    r = np.asarray(v, dtype=float) - field(x)
    out = np.sum(r * r, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def el_residual(field: VectorField, x, v, a) -> np.ndarray:
    """``dL/dx - d/dt(dL/dv)`` at jet data ``(x, v, a)``.

    Equals ``-2 (a - J v) - 2 J^T (v - X(x))``.
    """
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    J = field.jacobian(x)
    w = v - field(x)
    Jv = np.einsum("...ij,...j->...i", J, v)
    JTw = np.einsum("...ji,...j->...i", J, w)
    return -2.0 * (a - Jv) - 2.0 * JTw


def el_acceleration(field: VectorField, x, v) -> np.ndarray:
    """Acceleration solving the Euler-Lagrange equations: ``J v - J^T (v - X)``."""
    v = np.asarray(v, dtype=float)
    J = field.jacobian(x)
    w = v - field(x)
    return np.einsum("...ij,...j->...i", J, v) - np.einsum("...ji,...j->...i", J, w)


# --- action ---------------------------------------------------------------------

def _is_uniform(ts: np.ndarray) -> bool:
    steps = np.diff(ts)
    return bool(np.allclose(steps, steps[0], rtol=1e-9, atol=0.0))


def finite_difference_velocities(traj: Trajectory) -> np.ndarray:
    """Velocities from the stored positions.

    Uniform grids use 4th-order central differences in the interior,
    2nd-order central differences next to the ends and 2nd-order one-sided
    differences at the end points. Non-uniform grids (a shortened final step)
    fall back to second-order differences throughout.
    """
    xs, ts = traj.xs, traj.ts
    m = len(xs)
    if m == 2:
        d = (xs[1] - xs[0]) / (ts[1] - ts[0])
        return np.vstack([d, d])
    if not _is_uniform(ts):
        return np.gradient(xs, ts, axis=0, edge_order=2)
    h = (ts[-1] - ts[0]) / (m - 1)
    v = np.empty_like(xs)
    v[0] = (-3 * xs[0] + 4 * xs[1] - xs[2]) / (2 * h)
    v[-1] = (3 * xs[-1] - 4 * xs[-2] + xs[-3]) / (2 * h)
    v[1:-1] = (xs[2:] - xs[:-2]) / (2 * h)
    if m >= 5:
        v[2:-2] = (xs[:-4] - 8 * xs[1:-3] + 8 * xs[3:-1] - xs[4:]) / (12 * h)
    return v


def _simpson_weights(m: int, h: float) -> np.ndarray:
    """Composite Simpson weights on ``m`` uniform nodes.

    With an even node count the last interval is integrated by the trapezoidal rule.
    """
    w = np.zeros(m)
    if m == 2:
        w[:] = h / 2
        return w
    k = m if m % 2 == 1 else m - 1
    w[0:k:2] = 2.0
    w[1:k:2] = 4.0
    w[0] = w[k - 1] = 1.0
    w[:k] *= h / 3
    if k < m:
        w[-2] += h / 2
        w[-1] += h / 2
    return w


def _quadrature_weights(ts: np.ndarray) -> np.ndarray:
    m = len(ts)
    if _is_uniform(ts):
        return _simpson_weights(m, (ts[-1] - ts[0]) / (m - 1))
    w = np.zeros(m)
    if m > 2 and _is_uniform(ts[:-1]):
        # uniform body plus one short trailing step
        w[:-1] = _simpson_weights(m - 1, (ts[-2] - ts[0]) / (m - 2))
        tail = ts[-1] - ts[-2]
        w[-2:] += tail / 2
        return w
    steps = np.diff(ts)
    w[:-1] += steps / 2
    w[1:] += steps / 2
    return w


def action(field: VectorField, traj: Trajectory) -> float:
    """Least-squares energy action: the integral of :func:`jls` along ``traj``.

    Velocities come from finite differences of the positions, so the action
    of a position-only trajectory is well defined.
    """
    if len(traj) < 2:
        raise ValueError("degenerate trajectory")
    v = finite_difference_velocities(traj)
    integrand = jls(field, traj.xs, v)
    return float(np.dot(_quadrature_weights(traj.ts), integrand))


# --- integrators ----------------------------------------------------------------

def _grid(t0: float, t1: float, dt: float) -> np.ndarray:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    nfull = int(math.floor((t1 - t0) / dt + 1e-9))
    ts = t0 + dt * np.arange(nfull + 1)
    if t1 - ts[-1] > 1e-9 * dt:
        ts = np.append(ts, t1)
    else:
        ts[-1] = t1
    return ts


def _rk4(rhs: Callable[[np.ndarray], np.ndarray], y0: np.ndarray, ts: np.ndarray) -> np.ndarray:
    ys = np.empty((len(ts), len(y0)))
    y = np.array(y0, dtype=float)
    if not np.all(np.isfinite(y)):
        raise IntegrationError(float(ts[0]), "non-finite initial state")
    ys[0] = y
    for idx in range(1, len(ts)):
        h = ts[idx] - ts[idx - 1]
        try:
            with np.errstate(over="raise", invalid="raise"):
                k1 = rhs(y)
                k2 = rhs(y + 0.5 * h * k1)
                k3 = rhs(y + 0.5 * h * k2)
                k4 = rhs(y + h * k3)
                y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        except (FloatingPointError, OverflowError):
            raise IntegrationError(float(ts[idx - 1])) from None
        if not np.all(np.isfinite(y)):
            raise IntegrationError(float(ts[idx - 1]))
        ys[idx] = y
    return ys


def integrate_field(field: VectorField, x0, t0: float, t1: float, dt: float) -> Trajectory:
    """Classical fixed-step RK4 for ``dx/dt = X(x)``."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (field.n,):
        raise ValueError(f"x0 must have dimension {field.n}")
    field.check_bound()
    ts = _grid(t0, t1, dt)
    xs = _rk4(field, x0, ts)
    return Trajectory(t0=float(t0), dt=float(dt), xs=xs, ts=ts)


def integrate_el(field: VectorField, x0, v0, t0: float, t1: float, dt: float) -> Trajectory:
    """RK4 for the Euler-Lagrange flow ``x' = v, v' = el_acceleration(x, v)``."""
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    n = field.n
    if x0.shape != (n,) or v0.shape != (n,):
        raise ValueError(f"x0 and v0 must have dimension {n}")
    field.check_bound()

    def rhs(y):
        x, v = y[:n], y[n:]
        return np.concatenate([v, el_acceleration(field, x, v)])

    ts = _grid(t0, t1, dt)
    ys = _rk4(rhs, np.concatenate([x0, v0]), ts)
    return Trajectory(t0=float(t0), dt=float(dt), xs=ys[:, :n], vs=ys[:, n:], ts=ts)

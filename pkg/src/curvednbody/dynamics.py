"""Equations of motion and integration on the curved surfaces.

Bodies obey the ambient second-order system

    a_i = sum_{j != i} m_j |kappa|^(3/2) [q_j - (kappa q_i . q_j) q_i]
                       / [sigma - sigma (kappa q_i . q_j)^2]^(3/2)
          - kappa (v_i . v_i) q_i

with the signed dot product of the surface metric.  The pair part is tangent
at q_i and the trailing term is the geodesic curvature term, so on the surface
q_i . a_i + v_i . v_i = 0 holds identically.  Integration is classical RK4
with an optional per-step projection back onto the surface and tangent
bundle, plus a drift guard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .criterion import MassVector, PolygonConfig, is_regular
from .errors import (
    ConstraintDriftError,
    InternalConsistencyError,
    NoBalanceError,
    SingularConfigurationError,
)
from .geometry import Curvature, project_point, project_tangent, sigma_inner

__all__ = [
    "BodySystem",
    "IntegratorConfig",
    "RelativeEquilibrium",
    "DiagnosticsReport",
    "Trajectory",
    "pair_acceleration",
    "acceleration",
    "step",
    "integrate",
    "build_polygon_state",
    "solve_omega",
    "diagnostics",
]

SINGULAR_TOL = 1e-12
STATE_TOL = 1e-10


def _metric(sigma: int) -> np.ndarray:
    return np.array([1.0, 1.0, float(sigma)])


def _accel_arrays(Q, V, masses, kappa, sigma):
    """Acceleration of every body; raises near collisions and antipodes."""
    vsq = V[:, 0] * V[:, 0] + V[:, 1] * V[:, 1] + sigma * V[:, 2] * V[:, 2]
    A = (-kappa) * vsq[:, None] * Q
    n = Q.shape[0]
    if n > 1:
        W = kappa * (Q @ (Q * _metric(sigma)).T)
        np.fill_diagonal(W, 0.0)
        D = sigma * (1.0 - W * W)
        np.fill_diagonal(D, 1.0)
        # not-ge rather than lt: a stage overshooting past the antipode makes
        # D negative or NaN, and those must abort just like a tiny D
        if not np.min(D) >= SINGULAR_TOL:
            raise SingularConfigurationError(
                "pair denominator below singularity threshold (collision or antipodal pair)"
            )
        P = (abs(kappa) ** 1.5) * masses[None, :] / D**1.5
        np.fill_diagonal(P, 0.0)
        A = A + P @ Q - (P * W).sum(axis=1)[:, None] * Q
    return A


@dataclass(frozen=True)
class BodySystem:
    """Validated state: bodies on the surface with tangent velocities."""

    curvature: Curvature
    masses: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        m = np.array(self.masses, dtype=float)
        q = np.array(self.positions, dtype=float)
        v = np.array(self.velocities, dtype=float)
        n = m.shape[0]
        if m.ndim != 1 or n < 1:
            raise ValueError(f"masses must be a nonempty vector, got shape {m.shape}")
        if q.shape != (n, 3) or v.shape != (n, 3):
            raise ValueError(f"positions/velocities must have shape ({n}, 3)")
        if np.any(~np.isfinite(m)) or np.any(m <= 0.0):
            raise ValueError("masses must be finite and positive")
        if np.any(~np.isfinite(q)) or np.any(~np.isfinite(v)):
            raise ValueError("state contains non-finite entries")
        c = self.curvature
        surf = np.abs(c.kappa * sigma_inner(q, q, c.sigma) - 1.0)
        if np.max(surf) > STATE_TOL:
            raise ValueError(f"surface residual {np.max(surf)!r} exceeds {STATE_TOL}")
        tang = np.abs(sigma_inner(q, v, c.sigma))
        if np.max(tang) > STATE_TOL:
            raise ValueError(f"tangency residual {np.max(tang)!r} exceeds {STATE_TOL}")
        if n > 1:
            W = c.kappa * (q @ (q * _metric(c.sigma)).T)
            np.fill_diagonal(W, 0.0)
            D = c.sigma * (1.0 - W * W)
            np.fill_diagonal(D, 1.0)
            if np.min(np.abs(D)) < SINGULAR_TOL:
                raise SingularConfigurationError(
                    "body pair at or beyond the singularity threshold"
                )
        for name, arr in (("masses", m), ("positions", q), ("velocities", v)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.masses.shape[0]

    @classmethod
    def _trusted(cls, curvature, masses, positions, velocities) -> "BodySystem":
        # integrator-internal: the drift guard has already bounded the
        # residuals this constructor would recheck
        obj = object.__new__(cls)
        positions.setflags(write=False)
        velocities.setflags(write=False)
        object.__setattr__(obj, "curvature", curvature)
        object.__setattr__(obj, "masses", masses)
        object.__setattr__(obj, "positions", positions)
        object.__setattr__(obj, "velocities", velocities)
        return obj


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings with projection and drift guard."""

    dt: float
    t_end: float
    project_each_step: bool = True
    max_constraint_drift: float = 1e-6

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt >= 0.0):
            raise ValueError(f"dt must be finite and >= 0, got {self.dt!r}")
        if not (math.isfinite(self.t_end) and self.t_end >= 0.0):
            raise ValueError(f"t_end must be finite and >= 0, got {self.t_end!r}")
        if self.t_end > 0.0 and self.dt > self.t_end:
            raise ValueError(f"dt {self.dt!r} exceeds t_end {self.t_end!r}")
        if not self.max_constraint_drift > 0.0:
            raise ValueError("max_constraint_drift must be positive")


@dataclass(frozen=True)
class DiagnosticsReport:
    """Constraint residuals and the closest pair denominator of a state."""

    max_surface_residual: float
    max_tangency_residual: float
    min_pair_denominator: float


@dataclass(frozen=True)
class Trajectory:
    """Sampled states, one per step, including the initial sample."""

    times: tuple[float, ...]
    states: tuple[BodySystem, ...] = field(repr=False)
    diagnostics: tuple[DiagnosticsReport, ...] = field(repr=False)


def pair_acceleration(q_i, q_j, m_j: float, c: Curvature):
    """Attraction exerted on a body at q_i by mass m_j at q_j."""
    q_i = np.asarray(q_i, dtype=float)
    q_j = np.asarray(q_j, dtype=float)
    w = c.kappa * sigma_inner(q_i, q_j, c.sigma)
    denom = c.sigma * (1.0 - w * w)
    if not denom >= SINGULAR_TOL:
        raise SingularConfigurationError(
            f"pair denominator {denom!r} below threshold (collision or antipodal pair)"
        )
    return m_j * abs(c.kappa) ** 1.5 * (q_j - w * q_i) / denom**1.5


def acceleration(sys: BodySystem) -> np.ndarray:
    """Accelerations of all bodies, rows aligned with the state arrays."""
    c = sys.curvature
    A = _accel_arrays(sys.positions, sys.velocities, sys.masses, c.kappa, c.sigma)
    # On-surface compatibility q . a = -(v . v); BodySystem guarantees the
    # surface residual that makes this identity hold.
    lhs = sigma_inner(sys.positions, A, c.sigma) + sigma_inner(
        sys.velocities, sys.velocities, c.sigma
    )
    if np.max(np.abs(lhs)) > 1e-9 * (1.0 + float(np.max(np.abs(A)))):
        raise InternalConsistencyError(
            f"constraint compatibility violated: max residual {np.max(np.abs(lhs))!r}"
        )
    return A


def diagnostics(sys: BodySystem) -> DiagnosticsReport:
    """Residuals and closest pair denominator of the given state."""
    c = sys.curvature
    q, v = sys.positions, sys.velocities
    surf = float(np.max(np.abs(c.kappa * sigma_inner(q, q, c.sigma) - 1.0)))
    tang = float(np.max(np.abs(sigma_inner(q, v, c.sigma))))
    if sys.n > 1:
        W = c.kappa * (q @ (q * _metric(c.sigma)).T)
        D = c.sigma * (1.0 - W * W)
        off = ~np.eye(sys.n, dtype=bool)
        dmin = float(np.min(np.abs(D[off])))
    else:
        dmin = math.inf
    return DiagnosticsReport(surf, tang, dmin)


def _advance(sys: BodySystem, cfg: IntegratorConfig, time: float | None = None):
    """One RK4 step plus projection; returns the new state and its diagnostics."""
    c = sys.curvature
    kappa, sigma = c.kappa, c.sigma
    m = sys.masses
    Q, V = sys.positions, sys.velocities
    dt = cfg.dt
    try:
        a1 = _accel_arrays(Q, V, m, kappa, sigma)
        a2 = _accel_arrays(Q + 0.5 * dt * V, V + 0.5 * dt * a1, m, kappa, sigma)
        a3 = _accel_arrays(
            Q + 0.5 * dt * V + 0.25 * dt * dt * a1, V + 0.5 * dt * a2, m, kappa, sigma
        )
        a4 = _accel_arrays(Q + dt * V + 0.5 * dt * dt * a2, V + dt * a3, m, kappa, sigma)
    except SingularConfigurationError as exc:
        raise SingularConfigurationError(str(exc), time=time) from None
    Qn = Q + dt * V + (dt * dt / 6.0) * (a1 + a2 + a3)
    Vn = V + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    if cfg.project_each_step:
        Qn = project_point(Qn, c)
        Vn = project_tangent(Qn, Vn, c)
    surf = float(np.max(np.abs(kappa * sigma_inner(Qn, Qn, sigma) - 1.0)))
    tang = float(np.max(np.abs(sigma_inner(Qn, Vn, sigma))))
    if not max(surf, tang) <= cfg.max_constraint_drift:
        raise ConstraintDriftError(
            f"constraint residual {max(surf, tang)!r} exceeds drift bound "
            f"{cfg.max_constraint_drift}",
            time=time,
        )
    n = Qn.shape[0]
    if n > 1:
        W = kappa * (Qn @ (Qn * _metric(sigma)).T)
        D = sigma * (1.0 - W * W)
        off = ~np.eye(n, dtype=bool)
        dmin = float(np.min(np.abs(D[off])))
        if not np.min(D[off]) >= SINGULAR_TOL:
            raise SingularConfigurationError(
                "body pair at or beyond the singularity threshold", time=time
            )
    else:
        dmin = math.inf
    new_sys = BodySystem._trusted(c, m, Qn, Vn)
    return new_sys, DiagnosticsReport(surf, tang, dmin)


def step(sys: BodySystem, cfg: IntegratorConfig) -> BodySystem:
    """Advance one RK4 step of size cfg.dt; dt = 0 returns the state unchanged."""
    if cfg.dt == 0.0:
        return sys
    new_sys, _ = _advance(sys, cfg)
    return new_sys


def integrate(sys: BodySystem, cfg: IntegratorConfig, observer=None) -> Trajectory:
    """Step from 0 to exactly t_end, sampling every state.

    Full steps of size dt, plus one shorter final step when t_end is not a
    step multiple.  The observer, when given, is called as
    observer(t, system, diagnostics) after every step; the trajectory
    additionally holds the initial sample.  Errors abort with the failing
    time attached.
    """
    times = [0.0]
    states = [sys]
    diags = [diagnostics(sys)]
    if cfg.t_end > 0.0:
        if cfg.dt == 0.0:
            raise ValueError("dt must be positive to reach a positive t_end")
        nfull = int(math.floor(cfg.t_end / cfg.dt + 1e-9))
        remainder = cfg.t_end - nfull * cfg.dt
        sizes = [cfg.dt] * nfull
        if remainder > 1e-9 * cfg.dt:
            sizes.append(remainder)
        current = sys
        last = len(sizes) - 1
        for k, size in enumerate(sizes):
            # every non-final step has size dt, so its time is exact
            t = cfg.t_end if k == last else (k + 1) * cfg.dt
            step_cfg = cfg if size == cfg.dt else replace(cfg, dt=size)
            current, diag = _advance(current, step_cfg, time=t)
            times.append(t)
            states.append(current)
            diags.append(diag)
            if observer is not None:
                observer(t, current, diag)
    return Trajectory(tuple(times), tuple(states), tuple(diags))


@dataclass(frozen=True)
class RelativeEquilibrium:
    """Polygon rotating rigidly at height z with angular rate omega_dot."""

    polygon: PolygonConfig
    r: float
    omega_dot: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0.0):
            raise ValueError(f"radius must be positive, got {self.r!r}")
        if not math.isfinite(self.omega_dot):
            raise ValueError("omega_dot must be finite")
        if not (math.isfinite(self.z) and self.z >= 0.0):
            raise ValueError(f"height must be finite and >= 0, got {self.z!r}")

    @classmethod
    def from_radius(cls, polygon: PolygonConfig, r: float, omega_dot: float, c: Curvature):
        """Compute the height from r, taking the nonnegative root."""
        zsq = c.sigma / c.kappa - c.sigma * r * r
        if zsq < 0.0:
            raise ValueError(f"radius {r!r} out of range for kappa {c.kappa!r}")
        return cls(polygon, float(r), float(omega_dot), math.sqrt(zsq))


def build_polygon_state(
    req: RelativeEquilibrium, masses, c: Curvature, omega0: float = 0.0
) -> BodySystem:
    """Place the polygon on its circle with rigid-rotation velocities."""
    zsq = c.sigma / c.kappa - c.sigma * req.r * req.r
    if zsq < -1e-12 or abs(req.z * req.z - max(zsq, 0.0)) > 1e-10 * (1.0 + req.z * req.z):
        raise ValueError(
            f"height {req.z!r} inconsistent with radius {req.r!r} at kappa {c.kappa!r}"
        )
    m = masses.as_array() if isinstance(masses, MassVector) else np.asarray(masses, dtype=float)
    theta = np.array(req.polygon.radians) + omega0
    r, w = req.r, req.omega_dot
    Q = np.column_stack((r * np.cos(theta), r * np.sin(theta), np.full(theta.shape, req.z)))
    V = np.column_stack((-r * w * np.sin(theta), r * w * np.cos(theta), np.zeros(theta.shape)))
    return BodySystem(c, m, Q, V)


def _radial_residual(polygon, m, r, c, omega_dot):
    """Radial force balance at body 1 for the rigid rotation at omega_dot."""
    req = RelativeEquilibrium.from_radius(polygon, r, omega_dot, c)
    sys = build_polygon_state(req, m, c)
    A = _accel_arrays(sys.positions, sys.velocities, sys.masses, c.kappa, c.sigma)
    theta0 = sys.positions[0]
    e_r = np.array([theta0[0], theta0[1], 0.0]) / r
    kinematic = -r * omega_dot * omega_dot
    return float(A[0] @ e_r) - kinematic


def solve_omega(polygon: PolygonConfig, masses, r: float, c: Curvature) -> float:
    """Angular rate making the polygon a rigidly rotating solution.

    Only regular polygons with equal masses balance this way; anything else
    raises NoBalanceError, as does a radius with no nonnegative root (the
    equator for kappa > 0).  The root of the radial equation is found by
    bracketed one-dimensional root-finding and then verified against the
    full acceleration field.
    """
    m = masses.as_array() if isinstance(masses, MassVector) else np.asarray(masses, dtype=float)
    if not is_regular(polygon):
        raise NoBalanceError("radial balance requires a regular polygon")
    if np.max(np.abs(m - m[0])) > 1e-12 * m[0]:
        raise NoBalanceError("radial balance requires equal masses")
    rho = c.kappa * r * r
    if c.kappa > 0.0 and rho >= 1.0 - 1e-12:
        # On the equator the radial equation degenerates: every rate balances.
        raise NoBalanceError(f"no unique rotation rate at rho {rho!r} (equator or beyond)")
    f = lambda x: _radial_residual(polygon, m, r, c, x)
    f0 = f(0.0)
    if f0 == 0.0:
        return 0.0
    if f0 > 0.0:
        raise NoBalanceError(
            f"radial force {f0!r} points outward at rest; no nonnegative rate balances it"
        )
    hi = 1.0
    for _ in range(200):
        if f(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise NoBalanceError("radial equation has no nonnegative root")
    omega = float(brentq(f, 0.0, hi, xtol=1e-14, rtol=8.9e-16))
    req = RelativeEquilibrium.from_radius(polygon, r, omega, c)
    sys = build_polygon_state(req, m, c)
    A = _accel_arrays(sys.positions, sys.velocities, sys.masses, c.kappa, c.sigma)
    theta = np.array(polygon.radians)
    kin = np.column_stack(
        (-r * omega * omega * np.cos(theta), -r * omega * omega * np.sin(theta), np.zeros(theta.shape))
    )
    scale = max(1.0, float(np.max(np.abs(kin))))
    if float(np.max(np.abs(A - kin))) > 1e-9 * scale:
        raise NoBalanceError(
            "radial root does not satisfy the full force balance; "
            "no rigid rotation at this radius"
        )
    return omega

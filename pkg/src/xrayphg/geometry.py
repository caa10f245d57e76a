"""Convex non-trapping surface models and their boundary geometry.

Two families are provided: the Euclidean unit disk with closed-form chords,
and rotationally symmetric metrics dr² + m(r)² dθ² on the unit disk, whose
geodesics are integrated numerically.

Boundary rays are parametrized by the boundary angle ``beta`` of the footpoint
and the angle ``alpha`` between the velocity and the normal (inward normal on
∂₊SM, outward normal on ∂₋SM), with the velocity obtained by rotating that
normal by ``-alpha``.  With this convention the disk scattering relation is
(beta, alpha) -> (beta + π - 2 alpha, -alpha) on both sides.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import solve_ivp

from .errors import FitError, OutOfChartError, ParameterError, TrappingError
from .quadrature import gauss_legendre, periodic_nodes

TWO_PI = 2.0 * np.pi
INWARD, OUTWARD = 1, -1
CHART_THRESHOLD = 0.5
# rays with cos(alpha) below this are treated as exactly glancing (cos(π/2) is 6e-17 in floating point)
GLANCING_MU = 1e-15


def wrap_angle(a):
    """Wrap to (-π, π]."""
    out = np.mod(np.asarray(a, dtype=float) + np.pi, TWO_PI) - np.pi
    out = np.where(out == -np.pi, np.pi, out)
    return float(out) if np.ndim(out) == 0 else out


def _rotate(vec: np.ndarray, angle) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    x, y = vec[..., 0], vec[..., 1]
    return np.stack([c * x - s * y, s * x + c * y], axis=-1)


@dataclass(frozen=True)
class GlancingChart:
    t: float
    y_mid: float
    w_sign: int


@dataclass(frozen=True)
class BoundaryRay:
    """A boundary ray (beta, alpha) on the inward (side=+1) or outward (side=-1) boundary."""

    beta: float
    alpha: float
    side: int = INWARD
    chart: GlancingChart | None = None

    def __post_init__(self):
        if not -np.pi / 2 - 1e-12 <= self.alpha <= np.pi / 2 + 1e-12:
            raise ParameterError("alpha must lie in [-π/2, π/2]")
        if self.side not in (INWARD, OUTWARD):
            raise ParameterError("side must be +1 (inward) or -1 (outward)")

    @property
    def mu(self) -> float:
        return max(math.cos(self.alpha), 0.0)

    @property
    def is_glancing(self) -> bool:
        return abs(abs(self.alpha) - np.pi / 2) < 1e-15


class Orbit(ABC):
    """Geodesic entering at boundary angle 0 with incidence angle alpha."""

    alpha: float
    tau: float
    delta: float  # angle of the exit footpoint
    alpha_exit: float  # outward incidence angle at exit

    @abstractmethod
    def state(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Point and velocity at times t (arrays of shape t.shape + (2,))."""


@dataclass(frozen=True)
class GeodesicRecord:
    ray: BoundaryRay
    tau: float
    samples: Callable[[float], tuple[np.ndarray, np.ndarray]]


class ConvexModel(ABC):
    """A strictly convex, non-trapping surface diffeomorphic to the unit disk."""

    name: str = "model"
    boundary_scale: float = 1.0  # boundary arclength per unit angle

    @abstractmethod
    def orbit(self, alpha: float) -> Orbit: ...

    @abstractmethod
    def rho(self, x: np.ndarray) -> np.ndarray:
        """Geodesic distance to the boundary."""

    @abstractmethod
    def area_density(self, r: np.ndarray) -> np.ndarray:
        """dVol = area_density(r) dr dθ in polar coordinates."""

    @abstractmethod
    def frame(self, x: np.ndarray, phi: np.ndarray) -> np.ndarray:
        """Unit tangent vector at x making angle phi with the radial direction."""

    @abstractmethod
    def footpoint(self, x: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(beta, alpha, t) of the inward ray whose geodesic reaches (x, v) at time t."""

    @abstractmethod
    def config(self) -> dict: ...

    @property
    @abstractmethod
    def kappa_expected(self) -> float:
        """Half the geodesic curvature of the boundary."""

    # vectorized helpers -------------------------------------------------

    def tau_of(self, alpha) -> np.ndarray:
        a = np.asarray(alpha, dtype=float)
        flat = np.array([self.orbit(float(x)).tau for x in a.ravel()])
        return flat.reshape(a.shape)

    def flow(self, beta, alpha, t) -> tuple[np.ndarray, np.ndarray]:
        """Point and velocity at time t along the inward rays (beta, alpha)."""
        beta, alpha, t = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (beta, alpha, t)))
        x = np.empty(beta.shape + (2,))
        v = np.empty(beta.shape + (2,))
        for a in np.unique(alpha):
            sel = alpha == a
            xs, vs = self.orbit(float(a)).state(t[sel])
            x[sel] = _rotate(xs, beta[sel])
            v[sel] = _rotate(vs, beta[sel])
        return x, v


class _DiskOrbit(Orbit):
    def __init__(self, alpha: float):
        self.alpha = alpha
        mu = math.cos(alpha)
        self.tau = 2.0 * mu if mu > GLANCING_MU else 0.0
        self.delta = np.pi - 2.0 * alpha
        self.alpha_exit = -alpha
        self._v = np.array([-math.cos(alpha), math.sin(alpha)])

    def state(self, t):
        t = np.asarray(t, dtype=float)
        x = np.array([1.0, 0.0]) + t[..., None] * self._v
        return x, np.broadcast_to(self._v, x.shape).copy()


class DiskModel(ConvexModel):
    """Euclidean unit disk."""

    name = "disk"
    boundary_scale = 1.0

    def orbit(self, alpha: float) -> Orbit:
        return _DiskOrbit(float(alpha))

    def tau_of(self, alpha):
        mu = np.cos(np.asarray(alpha, dtype=float))
        return np.where(mu > GLANCING_MU, 2.0 * mu, 0.0)

    def flow(self, beta, alpha, t):
        beta, alpha, t = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (beta, alpha, t)))
        y = np.stack([np.cos(beta), np.sin(beta)], axis=-1)
        theta = beta + np.pi - alpha
        v = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return y + t[..., None] * v, v

    def rho(self, x):
        return 1.0 - np.hypot(x[..., 0], x[..., 1])

    def area_density(self, r):
        return np.asarray(r, dtype=float)

    def frame(self, x, phi):
        theta = np.arctan2(x[..., 1], x[..., 0]) + phi
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1)

    def footpoint(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        xv = np.sum(x * v, axis=-1)
        xx = np.sum(x * x, axis=-1)
        t = xv + np.sqrt(np.maximum(xv**2 - xx + 1.0, 0.0))
        y = x - t[..., None] * v
        beta = np.arctan2(y[..., 1], y[..., 0])
        theta_v = np.arctan2(v[..., 1], v[..., 0])
        alpha = wrap_angle(beta + np.pi - theta_v)
        return beta, np.clip(alpha, -np.pi / 2, np.pi / 2), t

    def config(self):
        return {"model": "disk"}

    @property
    def kappa_expected(self):
        return 0.5


class _RadialOrbit(Orbit):
    def __init__(self, model: "RadialModel", alpha: float):
        self.alpha = alpha
        m1 = model.boundary_scale
        if math.cos(alpha) <= GLANCING_MU:
            self.tau, self.delta, self.alpha_exit, self._sol = 0.0, 0.0, -alpha, None
            self._glancing_v = np.array([-math.cos(alpha), math.sin(alpha) / m1])
            return
        y0 = np.array([1.0, 0.0, -math.cos(alpha), m1 * math.sin(alpha)])

        def exit_event(t, y):
            # the start point lies on the boundary; only count crossings after t = 0
            return y[0] ** 2 + y[1] ** 2 - 1.0 if t > 0.0 else -1.0

        exit_event.terminal = True
        exit_event.direction = 1.0
        sol = solve_ivp(
            model._rhs, (0.0, model.max_time), y0, method="DOP853", rtol=model.ode_tol,
            atol=model.ode_tol * 1e-2, events=exit_event, dense_output=True,
        )
        if sol.status != 1 or not sol.t_events[0].size:
            raise TrappingError(f"geodesic with alpha={alpha} did not exit by t={model.max_time}")
        self._sol = sol.sol
        self._model = model
        self.tau = float(sol.t_events[0][0])
        ye = sol.y_events[0][0]
        theta_e = math.atan2(ye[1], ye[0])
        self.delta = float(np.mod(theta_e, TWO_PI))
        xhat = ye[:2] / math.hypot(ye[0], ye[1])
        ehat = np.array([-xhat[1], xhat[0]])
        p = ye[2:]
        self.alpha_exit = math.atan2(-float(p @ ehat) / m1, float(p @ xhat))

    def state(self, t):
        t = np.asarray(t, dtype=float)
        if self._sol is None:
            x = np.broadcast_to(np.array([1.0, 0.0]), t.shape + (2,)).copy()
            return x, np.broadcast_to(self._glancing_v, x.shape).copy()
        y = self._sol(t.ravel()).T.reshape(t.shape + (4,))
        x, p = y[..., :2], y[..., 2:]
        return x, self._model._velocity(x, p)


class RadialModel(ConvexModel):
    """Metric dr² + m(r)² dθ² with m(r) = Σ c_j r^{2j+1} and c_0 = 1.

    Parameters
    ----------
    m_coeffs : sequence of float
        Coefficients of the odd powers r, r³, r⁵, ...
    ode_tol : float
        Relative tolerance of the geodesic integrator.
    max_time : float
        Geodesics still inside after this time raise ``TrappingError``.
    """

    name = "radial"

    def __init__(self, m_coeffs, ode_tol: float = 1e-10, max_time: float = 50.0):
        c = np.asarray(m_coeffs, dtype=float)
        if c.size == 0 or abs(c[0] - 1.0) > 1e-14:
            raise ParameterError("m_coeffs must start with 1 so the metric is smooth at the origin")
        self.m_coeffs = tuple(float(x) for x in c)
        self.ode_tol = float(ode_tol)
        self.max_time = float(max_time)
        # P(q) = m(r)/r as a polynomial in q = r²
        self._P = Polynomial(c)
        self._dP = self._P.deriv()
        r = np.linspace(0.0, 1.0, 2001)
        if np.any(self.dm(r) <= 0.0):
            raise ParameterError("m'(r) must stay positive on [0, 1] (non-trapping, convex boundary)")
        q2 = self._P**2 - 1.0
        self._Q = Polynomial(q2.coef[1:]) if q2.coef.size > 1 else Polynomial([0.0])
        self._dQ = self._Q.deriv()
        self.boundary_scale = float(self.m(1.0))
        self.orbit = lru_cache(maxsize=8192)(self._orbit)

    def m(self, r):
        r = np.asarray(r, dtype=float)
        return r * self._P(r * r)

    def dm(self, r):
        r = np.asarray(r, dtype=float)
        q = r * r
        return self._P(q) + 2.0 * q * self._dP(q)

    def _coefficients(self, q):
        P, dP, Q, dQ = self._P(q), self._dP(q), self._Q(q), self._dQ(q)
        A = 1.0 / P**2
        dA = -2.0 * dP / P**3
        B = Q / P**2
        dB = (dQ * P - 2.0 * Q * dP) / P**3
        return A, dA, B, dB

    def _velocity(self, x, p):
        q = np.sum(x * x, axis=-1)
        A, _, B, _ = self._coefficients(q)
        xp = np.sum(x * p, axis=-1)
        return A[..., None] * p + (B * xp)[..., None] * x

    def _rhs(self, t, y):
        x, p = y[:2], y[2:]
        q = x @ x
        A, dA, B, dB = self._coefficients(q)
        xp = x @ p
        dx = A * p + B * xp * x
        dp = -(dA * (p @ p) + dB * xp * xp) * x - B * xp * p
        return np.concatenate([dx, dp])

    def _orbit(self, alpha: float) -> Orbit:
        return _RadialOrbit(self, alpha)

    def orbit(self, alpha: float) -> Orbit:  # replaced by a cached bound method in __init__
        return self._orbit(alpha)

    def rho(self, x):
        return 1.0 - np.hypot(x[..., 0], x[..., 1])

    def area_density(self, r):
        return self.m(r)

    def frame(self, x, phi):
        r = np.hypot(x[..., 0], x[..., 1])
        theta = np.arctan2(x[..., 1], x[..., 0])
        xhat = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        ehat = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
        P = self._P(r * r)
        return np.cos(phi)[..., None] * xhat + (np.sin(phi) / P)[..., None] * ehat

    def _metric_momentum(self, x, v):
        q = np.sum(x * x, axis=-1)
        P2 = self._P(q) ** 2
        xv = np.sum(x * v, axis=-1)
        # g = P² I + (1 - P²) x xᵀ / r²
        ratio = np.where(q > 0, (1.0 - P2) / np.where(q > 0, q, 1.0), 0.0)
        return P2[..., None] * v + (ratio * xv)[..., None] * x

    def footpoint(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        shape = x.shape[:-1]
        xs, vs = x.reshape(-1, 2), v.reshape(-1, 2)
        beta = np.empty(len(xs))
        alpha = np.empty(len(xs))
        tt = np.empty(len(xs))

        def exit_event(t, y):
            return y[0] ** 2 + y[1] ** 2 - 1.0

        exit_event.terminal = True
        exit_event.direction = 1.0
        m1 = self.boundary_scale
        for i, (xi, vi) in enumerate(zip(xs, vs)):
            p0 = -self._metric_momentum(xi, vi)
            if xi @ xi >= 1.0 and xi @ vi <= 0.0:
                ye, te = np.concatenate([xi, p0]), 0.0
            else:
                sol = solve_ivp(self._rhs, (0.0, self.max_time), np.concatenate([xi, p0]), method="DOP853",
                                rtol=self.ode_tol, atol=self.ode_tol * 1e-2, events=exit_event)
                if sol.status != 1 or not sol.t_events[0].size:
                    raise TrappingError("backward geodesic did not exit")
                ye, te = sol.y_events[0][0], float(sol.t_events[0][0])
            theta = math.atan2(ye[1], ye[0])
            xhat = ye[:2] / math.hypot(ye[0], ye[1])
            ehat = np.array([-xhat[1], xhat[0]])
            p = ye[2:]
            # outward angle of the reversed geodesic equals the inward angle of the original
            alpha[i] = math.atan2(-float(p @ ehat) / m1, float(p @ xhat))
            beta[i], tt[i] = theta, te
        return beta.reshape(shape), alpha.reshape(shape), tt.reshape(shape)

    def config(self):
        return {"model": "radial", "m_coeffs": list(self.m_coeffs), "ode_tol": self.ode_tol}

    @property
    def kappa_expected(self):
        return float(self.dm(1.0) / (2.0 * self.m(1.0)))


def model_from_config(cfg: dict) -> ConvexModel:
    """Build a model from {"model": "disk"} or {"model": "radial", "m_coeffs": [...], "ode_tol": ...}."""
    kind = cfg.get("model", "disk")
    if kind == "disk":
        return DiskModel()
    if kind == "radial":
        return RadialModel(cfg["m_coeffs"], ode_tol=cfg.get("ode_tol", 1e-10), max_time=cfg.get("max_time", 50.0))
    raise ParameterError(f"unknown model {kind!r}")


# ---------------------------------------------------------------------------
# ray-level operations


def _inward_representative(model: ConvexModel, ray: BoundaryRay) -> tuple[BoundaryRay, Orbit]:
    if ray.side == INWARD:
        return ray, model.orbit(ray.alpha)
    # outward ray: the entry ray of the same geodesic
    alpha_in = -ray.alpha
    orb = model.orbit(alpha_in)
    return BoundaryRay(float(np.mod(ray.beta - orb.delta, TWO_PI)), alpha_in, INWARD), orb


def tau(model: ConvexModel, ray: BoundaryRay) -> float:
    """Length of the geodesic segment through the boundary ray."""
    return _inward_representative(model, ray)[1].tau


def scatter(model: ConvexModel, ray: BoundaryRay) -> BoundaryRay:
    """The scattering relation: the other boundary endpoint of the geodesic."""
    if ray.side == INWARD:
        orb = model.orbit(ray.alpha)
        return BoundaryRay(float(np.mod(ray.beta + orb.delta, TWO_PI)), float(orb.alpha_exit), OUTWARD)
    entry, _ = _inward_representative(model, ray)
    return entry


def upsilon(model: ConvexModel, ray: BoundaryRay, u) -> tuple[np.ndarray, np.ndarray]:
    """Point and velocity at fraction u of the geodesic segment, u=0 at the ray's own footpoint."""
    entry, orb = _inward_representative(model, ray)
    u = np.asarray(u, dtype=float)
    frac = u if ray.side == INWARD else 1.0 - u
    return model.flow(entry.beta, entry.alpha, frac * orb.tau)


def geodesic(model: ConvexModel, ray: BoundaryRay) -> GeodesicRecord:
    return GeodesicRecord(ray, tau(model, ray), lambda u: upsilon(model, ray, u))


def f_factor(model: ConvexModel, ray: BoundaryRay, u) -> np.ndarray | float:
    """ρ(Υ(ray, u)) / (τ² u (1-u)), extended by its limits at u ∈ {0, 1} and at glancing."""
    u_arr = np.asarray(u, dtype=float)
    entry, orb = _inward_representative(model, ray)
    t = orb.tau
    if t == 0.0:
        out = np.full(u_arr.shape, kappa(model, ray.beta, 1 if ray.alpha >= 0 else -1))
        return float(out) if out.ndim == 0 else out
    if isinstance(model, DiskModel):
        s = t * t * u_arr * (1.0 - u_arr)
        out = 1.0 / (1.0 + np.sqrt(1.0 - s))
        return float(out) if out.ndim == 0 else out
    mu_t = math.cos(entry.alpha) / t
    mu_t_exit = math.cos(orb.alpha_exit) / t
    # within 1e-9 of an endpoint the quotient loses all digits; the endpoint value is exact to O(u)
    interior = u_arr * (1.0 - u_arr) > 1e-9
    out = np.empty(u_arr.shape)
    if np.any(interior):
        x, _ = upsilon(model, ray, u_arr[interior])
        out[interior] = model.rho(x) / (t * t * u_arr[interior] * (1.0 - u_arr[interior]))
    # endpoint values μ/τ at the ray's own footpoint (u=0) and the scattered one (u=1)
    own, other = (mu_t, mu_t_exit) if ray.side == INWARD else (mu_t_exit, mu_t)
    out[~interior & (u_arr < 0.5)] = own
    out[~interior & (u_arr >= 0.5)] = other
    return float(out) if out.ndim == 0 else out


def glancing_chart(model: ConvexModel, ray: BoundaryRay, threshold: float = CHART_THRESHOLD) -> GlancingChart:
    """Glancing coordinates (t, y_mid, w): half boundary distance to the scattered footpoint,
    its midpoint and orientation; t is odd and (y_mid, w) even under scattering."""
    if abs(ray.alpha) < np.pi / 2 - threshold:
        raise OutOfChartError(f"|alpha|={abs(ray.alpha):.3f} lies outside the glancing chart")
    entry, orb = _inward_representative(model, ray)
    if orb.tau == 0.0:
        return GlancingChart(0.0, float(np.mod(ray.beta, TWO_PI)), 1 if ray.alpha >= 0 else -1)
    d = wrap_angle(orb.delta)
    t = 0.5 * abs(d) * model.boundary_scale
    y_mid = float(np.mod(entry.beta + 0.5 * d, TWO_PI))
    return GlancingChart(t if ray.side == INWARD else -t, y_mid, 1 if d > 0 else -1)


def with_chart(model: ConvexModel, ray: BoundaryRay) -> BoundaryRay:
    return BoundaryRay(ray.beta, ray.alpha, ray.side, glancing_chart(model, ray))


@lru_cache(maxsize=64)
def _radial_kappa(model: RadialModel) -> float:
    mus = 0.02 * 0.7 ** np.arange(8)
    alphas = np.arccos(mus)
    vals = np.array([f_factor(model, BoundaryRay(0.0, float(a)), 0.5) for a in alphas])
    # F is smooth in μ near glancing; extrapolate a polynomial fit to μ = 0
    V = np.vander(mus, 5, increasing=True)
    coef, *_ = np.linalg.lstsq(V, vals, rcond=None)
    return float(coef[0])


def kappa(model: ConvexModel, y: float = 0.0, w: int = 1) -> float:
    """Glancing limit of f_factor at boundary point y in direction w."""
    if isinstance(model, DiskModel):
        return 0.5
    return _radial_kappa(model)


def mu_measure_coefficient(model: ConvexModel, omega: float | None = None, degree: int = 4) -> float:
    """Leading coefficient s₀ in μ dΣ = s₀ τ (1 + O(τ²)) dτ dΩ, dΩ boundary arclength.

    Rotational symmetry makes the result independent of ``omega``.  With τ an
    odd function of μ near glancing, s₀ = (lim μ/τ)².
    """
    if isinstance(model, DiskModel):
        return 0.25
    mus = np.linspace(0.01, 0.15, 15)
    taus = model.tau_of(np.arccos(mus))
    ratio = mus / taus
    V = np.vander(mus**2, degree, increasing=True)
    coef, *_ = np.linalg.lstsq(V, ratio, rcond=None)
    resid = float(np.max(np.abs(V @ coef - ratio)))
    if resid > 1e-4:
        raise FitError(f"μ/τ fit residual {resid:.2e} exceeds 1e-4")
    return float(coef[0] ** 2)


@dataclass(frozen=True)
class SantaloResult:
    lhs: float
    rhs: float
    gap: float


def santalo_check(model: ConvexModel, f: Callable, n_radial: int = 48, n_angle: int = 64,
                  n_alpha: int = 48, n_chord: int = 32) -> SantaloResult:
    """Compare ∫_SM f dΣ³ with ∫_{∂₊SM} ∫₀^τ f(φ_t) dt μ dΣ².

    ``f(x, v)`` is vectorized over leading axes of points and velocities.
    """
    r, wr = gauss_legendre(n_radial)
    th = periodic_nodes(n_angle)
    phi = periodic_nodes(n_angle, np.pi / n_angle)
    R, TH, PHI = np.meshgrid(r, th, phi, indexing="ij")
    x = np.stack([R * np.cos(TH), R * np.sin(TH)], axis=-1)
    v = model.frame(x, PHI)
    vals = f(x, v) * model.area_density(R)
    lhs = float(np.einsum("i,ijk->", wr, vals) * (TWO_PI / n_angle) ** 2)

    # α nodes: two Gauss panels on [-π/2, π/2]
    xa, wa = gauss_legendre(n_alpha)
    alpha = np.concatenate([-np.pi / 2 + 0.5 * np.pi * xa, 0.5 * np.pi * xa])
    walpha = np.concatenate([wa, wa]) * 0.5 * np.pi
    beta = periodic_nodes(n_angle)
    # two chord panels split at u = 1/2, the closest approach to the centre
    xc, wc = gauss_legendre(n_chord)
    uc = np.concatenate([0.5 * xc, 0.5 + 0.5 * xc])
    wc = np.concatenate([wc, wc]) * 0.5
    taus = model.tau_of(alpha)
    B, A, U = np.meshgrid(beta, alpha, uc, indexing="ij")
    T = U * taus[None, :, None]
    xs, vs = model.flow(B, A, T)
    chord = np.einsum("ijk,k->ij", np.asarray(f(xs, vs), dtype=float), wc) * taus[None, :]
    integrand = chord * np.cos(alpha)[None, :]
    rhs = float(np.einsum("ij,j->", integrand, walpha) * (TWO_PI / n_angle) * model.boundary_scale)
    scale = max(abs(lhs), abs(rhs))
    gap = abs(lhs - rhs) / scale if scale > 0 else 0.0
    return SantaloResult(lhs, rhs, gap)

"""Complex Gamma and diagonal Beta functions, and the generalized Beta functional.

The generalized Beta functional of a symmetric profile ``f`` on [0, 1] is

    beta[f](z) = ∫_0^1 f(u) (u(1-u))^(z-1) du,

defined by quadrature for Re z > 0 and continued to the left through the
recursion

    beta[f](z) = (2/z) ((2z+1) beta[f](z+1) + beta[(u-1/2) f'](z+1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .errors import InsufficientSmoothnessError, PoleError
from .quadrature import tanh_sinh_rule

POLE_REPORT_RADIUS = 1e-6
# recursion lands at Re >= this when the profile allows one more step; the base
# quadrature loses accuracy as Re z -> 0+
BASE_MARGIN = 0.5
POLE_ERROR_RADIUS = 1e-12

# Lanczos approximation, g = 7 with 9 coefficients.
_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _as_complex(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _distance_to_poles(z: np.ndarray) -> np.ndarray:
    """Distance from z to the nearest point of -N_0."""
    n = np.maximum(np.rint(-z.real), 0.0)
    return np.abs(z + n)


def _lanczos_log(z: np.ndarray) -> np.ndarray:
    """log Γ(z) for Re z >= 1/2."""
    zm = z - 1.0
    acc = np.full(zm.shape, _LANCZOS_P[0], dtype=complex)
    for i, p in enumerate(_LANCZOS_P[1:], start=1):
        acc = acc + p / (zm + i)
    t = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


def _sinpi_real(x: np.ndarray) -> np.ndarray:
    r = x - 2.0 * np.rint(0.5 * x)  # r in [-1, 1]
    r = np.where(r > 0.5, 1.0 - r, np.where(r < -0.5, -1.0 - r, r))
    return np.sin(np.pi * r)


def _cospi_real(x: np.ndarray) -> np.ndarray:
    return _sinpi_real(x + 0.5)


def sinpi(z) -> np.ndarray:
    """sin(πz) with exact zeros at the integers."""
    z = _as_complex(z)
    x, y = z.real, z.imag
    return _sinpi_real(x) * np.cosh(np.pi * y) + 1j * _cospi_real(x) * np.sinh(np.pi * y)


def log_gamma(z):
    """Logarithm of the Gamma function for complex arguments.

    Returns the branch of log Γ that is analytic on the plane cut along the
    negative real axis and real for z > 0 (the convention of
    ``scipy.special.loggamma``).  The left half-plane is reached by the
    recurrence log Γ(z) = log Γ(z+n) - Σ log(z+j), which keeps that branch.

    Raises
    ------
    PoleError
        If z lies within 1e-12 of a nonpositive integer.
    """
    zc = _as_complex(z)
    if np.any(_distance_to_poles(zc) < POLE_ERROR_RADIUS):
        raise PoleError(f"log_gamma evaluated at a pole: {z}")
    shift = np.where(zc.real < 0.5, np.ceil(0.5 - zc.real), 0.0).astype(int)
    out = _lanczos_log(zc + shift)
    for j in range(int(shift.max(initial=0))):
        mask = shift > j
        out = np.where(mask, out - np.log(np.where(mask, zc + j, 1.0)), out)
    return out[()] if out.ndim == 0 else out


def gamma(z):
    """Γ(z) for complex z, with the reflection formula for Re z < 1/2."""
    zc = _as_complex(z)
    if np.any(_distance_to_poles(zc) < POLE_ERROR_RADIUS):
        raise PoleError(f"gamma evaluated at a pole: {z}")
    left = zc.real < 0.5
    right_val = np.exp(_lanczos_log(np.where(left, 1.0 - zc, zc)))
    with np.errstate(divide="ignore", invalid="ignore"):
        reflected = np.pi / (sinpi(zc) * right_val)
    out = np.where(left, reflected, right_val)
    return out[()] if out.ndim == 0 else out


def rgamma(z):
    """1/Γ(z), entire; exact zeros at the nonpositive integers."""
    zc = _as_complex(z)
    left = zc.real < 0.5
    g = np.exp(_lanczos_log(np.where(left, 1.0 - zc, zc)))
    out = np.where(left, sinpi(zc) * g / np.pi, 1.0 / g)
    return out[()] if out.ndim == 0 else out


def beta_diag_value(z):
    """Raw B(z, z) = Γ(z)²/Γ(2z) without pole bookkeeping (vectorized)."""
    zc = _as_complex(z)
    left = zc.real < 0.5
    safe = np.where(left, 1.0, zc)
    right_val = np.exp(2.0 * _lanczos_log(safe) - _lanczos_log(2.0 * safe))
    if np.any(left):
        zl = np.where(left, zc, 0.5)
        left_val = gamma(zl) ** 2 * rgamma(2.0 * zl)
        out = np.where(left, left_val, right_val)
    else:
        out = right_val
    return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class PoleData:
    location: complex
    order: int
    leading_coefficient: complex

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("pole order must be positive")


@dataclass(frozen=True)
class MeromorphicSample:
    """Value of a meromorphic function with optional nearby-pole data.

    When ``near_pole`` is present, ``value`` is the leading Laurent term
    evaluated at ``z`` (infinite exactly at the pole).
    """

    z: complex
    value: complex
    near_pole: Optional[PoleData] = None

    def __post_init__(self):
        if self.near_pole is None and not np.isfinite(self.value):
            raise ValueError("value must be finite away from poles")


def _laurent_value(z: complex, pole: PoleData) -> complex:
    d = z - pole.location
    if d == 0:
        return complex(np.inf, 0.0)
    return pole.leading_coefficient / d**pole.order


def beta_diag_residue(n: int) -> int:
    """Residue of B(z, z) at z = -n, equal to 2·C(2n, n)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return 2 * math.comb(2 * n, n)


def beta_diag_zero_slope_over_pi(n: int) -> Fraction:
    """Rational factor q with lim B(z,z)/(z+n+1/2) = q·π at z -> -n-1/2."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return -Fraction(4 ** (2 * n + 2), (n + 1) * math.comb(2 * n + 2, n + 1))


def beta_diag_zero_slope(n: int) -> float:
    """Derivative of B(z, z) at its simple zero z = -n - 1/2."""
    return float(beta_diag_zero_slope_over_pi(n)) * math.pi


def beta_diag(z: complex) -> MeromorphicSample:
    """B(z, z) with pole reporting within 1e-6 of the poles at -N_0."""
    z = complex(z)
    n = max(int(round(-z.real)), 0)
    if abs(z + n) < POLE_REPORT_RADIUS:
        pole = PoleData(complex(-n), 1, complex(beta_diag_residue(n)))
        return MeromorphicSample(z, _laurent_value(z, pole), pole)
    return MeromorphicSample(z, complex(beta_diag_value(z)))


@dataclass(frozen=True)
class SymmetricProfile:
    """A function on [0, 1] symmetric under u -> 1-u.

    Stored as Chebyshev coefficients in x = 2u - 1; only even-degree
    coefficients survive symmetrization.  ``smoothness_order`` is the number
    of derivatives the continuation may use.  ``func`` optionally overrides
    pointwise evaluation and ``euler_funcs[j]`` the (j+1)-th power of the
    operator f -> (u - 1/2) f'.
    """

    coeffs: np.ndarray
    smoothness_order: int = 8
    func: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    euler_funcs: tuple = field(default=(), compare=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex if np.iscomplexobj(self.coeffs) else float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a nonempty 1-d array")
        if self.smoothness_order < 0:
            raise ValueError("smoothness_order must be nonnegative")
        scale = max(np.max(np.abs(c)), 1.0)
        if np.max(np.abs(c[1::2]), initial=0.0) > 1e-12 * scale:
            raise ValueError("profile is not symmetric under u -> 1-u")
        c[1::2] = 0.0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_callable(
        cls,
        fn: Callable[[np.ndarray], np.ndarray],
        degree: int = 64,
        smoothness_order: int = 8,
        exact: bool = False,
    ) -> "SymmetricProfile":
        """Chebyshev interpolant of ``fn`` (evaluated on u in [0, 1]).

        With ``exact=True`` pointwise values come from ``fn`` itself and the
        interpolant is only used for derivatives.
        """
        coeffs = cheb.chebinterpolate(lambda x: fn(0.5 * (x + 1.0)), degree)
        tail = np.abs(coeffs[::-1])
        scale = max(np.max(np.abs(coeffs)), 1e-300)
        keep = len(coeffs) - int(np.argmax(tail > 2e-14 * scale))
        coeffs = coeffs[: max(keep, 1)]
        u = np.linspace(0.0, 0.5, 17)
        fu, fv = fn(u), fn(1.0 - u)
        if np.max(np.abs(fu - fv)) > 1e-12 * max(np.max(np.abs(fu)), 1.0):
            raise ValueError("profile is not symmetric under u -> 1-u")
        return cls(coeffs, smoothness_order, func=fn if exact else None)

    @classmethod
    def constant(cls, c: complex = 1.0, smoothness_order: int = 64) -> "SymmetricProfile":
        return cls(np.array([c]), smoothness_order)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.func is not None:
            return self.func(u)
        return cheb.chebval(2.0 * u - 1.0, self.coeffs)

    def euler(self) -> "SymmetricProfile":
        """The profile (u - 1/2) f'(u), with one derivative used up."""
        if self.smoothness_order == 0:
            raise InsufficientSmoothnessError("no derivatives available")
        # with x = 2u - 1: (u - 1/2) d/du = x d/dx
        c = cheb.chebmulx(cheb.chebder(self.coeffs)) if self.coeffs.size > 1 else np.zeros(1)
        c = c[: self.coeffs.size]
        func = self.euler_funcs[0] if self.euler_funcs else None
        return SymmetricProfile(c, self.smoothness_order - 1, func=func, euler_funcs=self.euler_funcs[1:])

    def reflected(self) -> "SymmetricProfile":
        """The reparametrization u -> 1 - u (equal to self by symmetry)."""
        return SymmetricProfile(self.coeffs * (-1.0) ** np.arange(self.coeffs.size), self.smoothness_order)


def beta_quadrature(values: np.ndarray, z: complex, level: int = 10) -> complex:
    """∫ g(u)(u(1-u))^(z-1) du from samples of g on the tanh-sinh nodes."""
    rule = tanh_sinh_rule(level)
    logw = (z - 1.0) * (rule.log_u + rule.log_1mu) + rule.log_w
    return complex(np.sum(values * np.exp(logw)))


def _gen_beta_direct(f: SymmetricProfile, z: complex, level: int) -> complex:
    if z.real <= 0:
        raise ValueError("direct quadrature needs Re z > 0")
    rule = tanh_sinh_rule(level)
    return beta_quadrature(f(rule.u), z, level)


def _continuation_steps(z: complex, extra_steps: int, max_steps: int) -> int:
    n = 0 if z.real > 0 else int(math.floor(-z.real)) + 1
    if z.real + n < BASE_MARGIN and n + extra_steps < max_steps:
        n += 1
    return n + extra_steps


def _euler_chain(f: SymmetricProfile, n: int) -> list[SymmetricProfile]:
    if n > f.smoothness_order:
        raise InsufficientSmoothnessError(
            f"continuation needs {n} derivatives, profile declares {f.smoothness_order}"
        )
    chain = [f]
    for _ in range(n):
        chain.append(chain[-1].euler())
    return chain


def _gen_beta_recursive(f: SymmetricProfile, z: complex, n: int, level: int) -> complex:
    chain = _euler_chain(f, n)
    # values[a] holds beta[D^a f](z + j) for the current j, starting at j = n
    values = [_gen_beta_direct(chain[a], z + n, level) for a in range(n + 1)]
    for j in range(n - 1, -1, -1):
        w = z + j
        values = [(2.0 / w) * ((2.0 * w + 1.0) * values[a] + values[a + 1]) for a in range(j + 1)]
    return values[0]


def gen_beta(f: SymmetricProfile, z: complex, level: int = 10, extra_steps: int = 0) -> MeromorphicSample:
    """Generalized Beta functional beta[f](z) with meromorphic continuation.

    Parameters
    ----------
    f : SymmetricProfile
        Symmetric profile on [0, 1].
    z : complex
        Evaluation point; Re z must exceed ``-f.smoothness_order``.
    level : int
        Tanh-sinh level of the base quadrature.
    extra_steps : int
        Additional recursion steps beyond the minimum needed to reach the
        half-plane Re > 0 (used for consistency checks).

    Returns
    -------
    MeromorphicSample
        Pole data is reported within 1e-6 of 0, -1, -2, ...
    """
    z = complex(z)
    if z.real <= -f.smoothness_order:
        raise InsufficientSmoothnessError(
            f"Re z = {z.real} is beyond the continuation range of a profile with "
            f"{f.smoothness_order} derivatives"
        )
    n = max(int(round(-z.real)), 0)
    if abs(z + n) < POLE_REPORT_RADIUS:
        res = gen_beta_residue(f, n, level)
        pole = PoleData(complex(-n), 1, res)
        return MeromorphicSample(z, _laurent_value(z, pole), pole)
    steps = _continuation_steps(z, extra_steps, f.smoothness_order)
    return MeromorphicSample(z, _gen_beta_recursive(f, z, steps, level))


def gen_beta_residue(f: SymmetricProfile, n: int, level: int = 10) -> complex:
    """Residue of beta[f] at z = -n.

    At z = 0 the recursion gives 2 beta[f](1) + 2 beta[(u-1/2) f'](1); the
    residue at -n follows by n further applications of the recursion.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n >= f.smoothness_order:
        raise InsufficientSmoothnessError(
            f"residue at -{n} needs {n + 1} derivatives, profile declares {f.smoothness_order}"
        )
    chain = _euler_chain(f, n + 1)
    at_one = [_gen_beta_direct(g, 1.0, level) for g in chain]
    res = [2.0 * at_one[a] + 2.0 * at_one[a + 1] for a in range(n + 1)]
    for m in range(1, n + 1):
        res = [(2.0 / -m) * ((1.0 - 2.0 * m) * res[a] + res[a + 1]) for a in range(n + 1 - m)]
    return complex(res[0])

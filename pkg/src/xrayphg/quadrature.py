"""Quadrature rules shared by the special-function and transform modules.

The double-exponential rules work in log space so that integrands with
algebraic endpoint singularities, possibly with complex exponents, can be
summed without underflow of the node distances to the endpoints.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

# tanh-sinh abscissae beyond |t| = 6.5 lie within exp(-1300) of the endpoints;
# in log space they still contribute for exponents with real part near 0.
TANH_SINH_TMAX = 6.5


class TanhSinhRule(NamedTuple):
    """Nodes of the tanh-sinh rule on [0, 1], stored in log form.

    ``u`` is the node, ``log_u`` and ``log_1mu`` are the logarithms of the
    distances to the endpoints 0 and 1, and ``log_w`` is the log weight.
    """

    u: np.ndarray
    log_u: np.ndarray
    log_1mu: np.ndarray
    log_w: np.ndarray

    @property
    def w(self) -> np.ndarray:
        return np.exp(self.log_w)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@lru_cache(maxsize=16)
def tanh_sinh_rule(level: int = 10, tmax: float = TANH_SINH_TMAX) -> TanhSinhRule:
    """Tanh-sinh rule on [0, 1] with step ``h = 2**-level``.

    Parameters
    ----------
    level : int
        Refinement level; the trapezoid step in the transformed variable is
        ``2**-level``.
    tmax : float
        Truncation of the transformed variable.
    """
    if level < 1:
        raise ValueError("level must be positive")
    h = 2.0 ** (-level)
    n = int(np.ceil(tmax / h))
    t = h * np.arange(-n, n + 1)
    s = 0.5 * np.pi * np.sinh(t)
    # u = (1 + tanh s)/2 = 1/(1 + exp(-2s))
    log_u = -np.logaddexp(0.0, -2.0 * s)
    log_1mu = -np.logaddexp(0.0, 2.0 * s)
    abs_s = np.abs(s)
    log_cosh_s = abs_s + np.log1p(np.exp(-2.0 * abs_s)) - np.log(2.0)
    log_w = np.log(h * 0.25 * np.pi * np.cosh(t)) - 2.0 * log_cosh_s
    u = np.exp(log_u)
    return TanhSinhRule(*(_frozen(a) for a in (u, log_u, log_1mu, log_w)))


@lru_cache(maxsize=16)
def split_tanh_sinh_rule(level: int = 10, tmax: float = TANH_SINH_TMAX) -> TanhSinhRule:
    """Tanh-sinh rule on [0, 1] built from the two halves [0, 1/2] and [1/2, 1].

    Nodes cluster at 0, 1/2 and 1, which also resolves integrands with a kink
    at the midpoint; log distances to 0 and 1 stay exact.
    """
    base = tanh_sinh_rule(level, tmax)
    log2 = np.log(2.0)
    near = base.log_u - log2  # log(v/2)
    far = np.log1p(-0.5 * base.u)  # log(1 - v/2)
    log_u = np.concatenate([near, far[::-1]])
    log_1mu = np.concatenate([far, near[::-1]])
    log_w = np.concatenate([base.log_w, base.log_w[::-1]]) - log2
    u = np.concatenate([0.5 * base.u, 1.0 - 0.5 * base.u[::-1]])
    return TanhSinhRule(*(_frozen(a) for a in (u, log_u, log_1mu, log_w)))


def tanh_sinh(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, level: int = 8) -> float:
    """Integrate a vectorized ``f`` over [a, b] with the tanh-sinh rule.

    Suitable for integrable endpoint singularities that are not too strong
    in absolute terms (the nodes are mapped back to linear scale).
    """
    rule = tanh_sinh_rule(level)
    x = a + (b - a) * rule.u
    vals = np.asarray(f(x))
    return (b - a) * np.sum(rule.w * vals)


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return _frozen(0.5 * (x + 1.0)), _frozen(0.5 * w)


def composite_gauss_nodes(a: np.ndarray, b: np.ndarray, n: int = 64, panels: int = 1):
    """Nodes and weights of a composite Gauss rule on each interval [a_i, b_i].

    ``a`` and ``b`` broadcast against each other; the returned arrays have an
    extra trailing axis of length ``n * panels``.
    """
    x, w = gauss_legendre(n)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    edges = np.arange(panels)[:, None]
    unit_x = ((edges + x[None, :]) / panels).ravel()
    unit_w = np.tile(w, panels) / panels
    return a + (b - a) * unit_x, (b - a) * unit_w


def periodic_nodes(n: int, offset: float = 0.0) -> np.ndarray:
    """Equispaced angles on [0, 2π) for the periodic trapezoid rule."""
    return offset + 2.0 * np.pi * np.arange(n) / n


class QuadratureError(RuntimeError):
    """Raised when successive refinements of a rule fail to agree."""

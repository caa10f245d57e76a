"""Boundary expansions: fitting, predicted leading terms, Mellin analysis and layer stripping.

Profiles are sampled on geometric grids of a boundary defining function and
fitted by linear least squares in the columns x^z (log x)^k, with the
candidate exponents supplied by the index-set calculus.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from .errors import (
    DivergenceError,
    FitError,
    IllConditionedError,
    IntegrabilityError,
    ParameterError,
    PoleError,
    RankDeficiencyError,
    VanishingWeightError,
)
from .geometry import ConvexModel, DiskModel, kappa, mu_measure_coefficient
from .index_algebra import IndexSet, im, re
from .quadrature import composite_gauss_nodes, gauss_legendre
from .special import beta_diag
from .transforms import ScalarField, smooth_cutoff, xray_rays

COND_LIMIT = 1e12
ABSENT_TOL = 1e-8
MIN_SEPARATION = 0.05
SAMPLES_PER_UNKNOWN = 4
ORDER_GAIN = 100.0
RESIDUAL_FLOOR = 1e-10
REMAINDER_DEGREE = 6
REMAINDER_SIGNIFICANCE = 1e-4  # smaller remainders after subtraction are fit error, not poles


# ---------------------------------------------------------------------------
# samples and expansions


def geometric_grid(x_max: float = 0.3, x_min: float = 1e-4, ratio: float = 0.8) -> np.ndarray:
    """x_max·ratio^i for all i with value >= x_min (36 points by default)."""
    if not 0 < ratio < 1 or not 0 < x_min < x_max:
        raise ParameterError("need 0 < ratio < 1 and 0 < x_min < x_max")
    n = int(math.floor(math.log(x_min / x_max) / math.log(ratio) + 1e-12)) + 1
    return x_max * ratio ** np.arange(n)


@dataclass(frozen=True)
class ProfileSamples:
    """Values of a boundary profile on a geometric grid decreasing toward 0."""

    abscissae: np.ndarray
    values: np.ndarray
    side_data: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.abscissae, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise ParameterError("abscissae and values must be 1-d arrays of equal length")
        if np.any(x <= 0) or np.any(np.diff(x) >= 0):
            raise ParameterError("abscissae must be positive and strictly decreasing")
        r = x[1:] / x[:-1]
        if np.ptp(r) > 1e-9 * r.mean():
            raise ParameterError("abscissae must form a geometric grid")
        object.__setattr__(self, "abscissae", x)
        object.__setattr__(self, "values", v)

    def to_csv_rows(self) -> list[tuple]:
        extra = tuple(self.side_data.values())
        return [(float(a), float(b)) + extra for a, b in zip(self.abscissae, self.values)]


@dataclass(frozen=True)
class Term:
    z: float
    k: int
    coeff: float
    present: bool = True


@dataclass(frozen=True)
class Expansion:
    terms: tuple[Term, ...]
    remainder_exponent: float
    fit_residual: float

    def coefficient(self, z: float, k: int = 0, tol: float = 1e-9) -> float:
        for t in self.terms:
            if t.k == k and abs(t.z - z) < tol:
                return t.coeff
        raise KeyError((z, k))

    def to_json(self) -> str:
        return json.dumps({
            "terms": [{"z": t.z, "k": t.k, "c": t.coeff} for t in self.terms],
            "residual": self.fit_residual,
            "remainder": self.remainder_exponent,
        }, sort_keys=True)


def _columns(x: np.ndarray, candidates: Sequence[tuple[float, int]]) -> np.ndarray:
    lx = np.log(x)
    return np.stack([np.exp(z * lx) * lx**k for z, k in candidates], axis=1)


def _check_candidates(candidates, n_samples: int) -> list[tuple[float, int]]:
    cands = sorted((float(z), int(k)) for z, k in candidates)
    if not cands:
        raise ParameterError("at least one candidate is needed")
    for (z1, k1), (z2, k2) in zip(cands, cands[1:]):
        if k1 == k2 and abs(z2 - z1) < MIN_SEPARATION:
            raise ParameterError(f"candidates ({z1},{k1}) and ({z2},{k2}) are closer than {MIN_SEPARATION}")
    seen = set()
    for c in cands:
        if (round(c[0], 9), c[1]) in seen:
            raise ParameterError(f"duplicate candidate {c}")
        seen.add((round(c[0], 9), c[1]))
    if n_samples < SAMPLES_PER_UNKNOWN * len(cands):
        raise ParameterError(f"{n_samples} samples cannot support {len(cands)} unknowns")
    return cands


def _solve_scaled(A: np.ndarray, y: np.ndarray, cond_limit: float = COND_LIMIT):
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise RankDeficiencyError("a candidate column vanishes on the grid")
    As = A / norms
    sv = np.linalg.svd(As, compute_uv=False)
    if sv[-1] <= sv[0] * 1e-15:
        raise RankDeficiencyError("candidate columns are linearly dependent on the grid")
    cond = sv[0] / sv[-1]
    if cond > cond_limit:
        raise IllConditionedError(f"scaled design condition number {cond:.3e} exceeds {cond_limit:.1e}")
    Q, R = np.linalg.qr(As)
    coef_s = np.linalg.solve(R, Q.T @ y)
    return coef_s / norms, norms, cond


def fit_expansion(samples: ProfileSamples, candidates: Sequence[tuple[float, int]],
                  remainder_exponent: float | None = None, cond_limit: float = COND_LIMIT,
                  absent_tol: float = ABSENT_TOL) -> Expansion:
    """Least-squares fit of Σ c_{z,k} x^z (log x)^k to the samples.

    Coefficients whose contribution norm |c|·‖column‖ falls below
    ``absent_tol`` times the largest contribution are flagged absent.
    The residual is the RMS misfit relative to the RMS of the values.
    """
    cands = _check_candidates(candidates, samples.values.size)
    A = _columns(samples.abscissae, cands)
    y = samples.values
    coef, norms, _ = _solve_scaled(A, y, cond_limit)
    resid = _relative_residual(A @ coef - y, y)
    contrib = np.abs(coef) * norms
    big = contrib.max() if contrib.size else 0.0
    terms = tuple(Term(z, k, float(c), bool(contrib[i] > absent_tol * big)) for i, ((z, k), c) in enumerate(zip(cands, coef)))
    rem = remainder_exponent if remainder_exponent is not None else max(z for z, _ in cands) + 1.0
    return Expansion(terms, float(rem), resid)


def _relative_residual(r: np.ndarray, y: np.ndarray) -> float:
    scale = np.sqrt(np.mean(y**2))
    rms = float(np.sqrt(np.mean(r**2)))
    return rms / scale if scale > 0 else rms


def candidates_from_index(index_set: IndexSet, span: float = 2.5,
                          leading: float | None = None) -> tuple[list[tuple[float, int]], float]:
    """Real candidates (z, k) of an index set below leading + span, and that remainder exponent.

    ``leading`` defaults to the infimum of the set.
    """
    lead = index_set.infimum() if leading is None else leading
    rem = lead + span
    out = []
    for p in index_set.enumerate_below(rem):
        if abs(im(p.z)) > 0:
            raise ParameterError("complex exponents are not fitted numerically")
        if re(p.z) < rem - 1e-12:
            out.append((re(p.z), int(p.k)))
    return out, rem


def residual_ratio(samples: ProfileSamples, candidates, dropped: tuple[float, int]) -> float:
    """Residual without ``dropped`` divided by residual with it."""
    full = fit_expansion(samples, candidates)
    rest = [c for c in candidates if not (abs(c[0] - dropped[0]) < 1e-12 and c[1] == dropped[1])]
    reduced = fit_expansion(samples, rest)
    return reduced.fit_residual / max(full.fit_residual, 1e-300)


@dataclass(frozen=True)
class LeadingFit:
    """Result of a variable-projection fit; ``coefficients`` are ordered by (offset, descending log power)."""

    exponent: float
    leading_coefficient: float
    coefficients: tuple[float, ...]
    residual: float
    fixed_coefficients: tuple[float, ...] = ()


def fit_leading_exponent(samples: ProfileSamples, guess: float, offsets: Sequence[float] = (0.0, 2.0, 4.0, 6.0),
                         fixed: Sequence[tuple[float, int]] = (), log_power: int = 0,
                         half_width: float = 0.2) -> LeadingFit:
    """Variable-projection fit of x^z Σ_i Σ_{j<=log_power} c_ij x^{offsets_i} (log x)^j plus fixed columns.

    The exponent z is optimized in [guess - half_width, guess + half_width];
    the leading coefficient multiplies x^z (log x)^log_power.
    """
    x, y = samples.abscissae, samples.values
    lx = np.log(x)
    Fixed = _columns(x, fixed) if fixed else np.zeros((x.size, 0))

    def design(z):
        var = [np.exp((z + o) * lx) * lx**j for o in offsets for j in range(log_power, -1, -1)]
        return np.hstack([np.stack(var, axis=1), Fixed])

    def misfit(z):
        A = design(z)
        try:
            coef, _, _ = _solve_scaled(A, y, cond_limit=1e16)
        except RankDeficiencyError:
            return np.inf
        return _relative_residual(A @ coef - y, y)

    res = minimize_scalar(misfit, bounds=(guess - half_width, guess + half_width), method="bounded",
                          options={"xatol": 1e-10})
    z = float(res.x)
    coef, _, _ = _solve_scaled(design(z), y, cond_limit=1e16)
    nv = len(offsets) * (log_power + 1)
    return LeadingFit(z, float(coef[0]), tuple(float(c) for c in coef[:nv]), float(res.fun),
                      tuple(float(c) for c in coef[nv:]))


# ---------------------------------------------------------------------------
# parity


@dataclass(frozen=True)
class ParityResult:
    odd_energy: float
    even_energy: float
    verdict: str


def parity_check(samples: ProfileSamples, base: float = 1.0, n_terms: int = 6, threshold: float = 1e-5) -> ParityResult:
    """Split the fitted energy between exponents base+2i ("odd") and base+2i+1 ("even").

    With the default base 1 the names are literal parities of integer
    exponents; for I₀ of ρ^γ-type data use base 2γ+1.
    """
    cands = [(base + j, 0) for j in range(n_terms)]
    A = _columns(samples.abscissae, cands)
    coef, norms, _ = _solve_scaled(A, samples.values)
    energy = (coef * norms) ** 2
    odd = float(energy[0::2].sum())
    even = float(energy[1::2].sum())
    if even <= threshold * odd:
        verdict = "odd"
    elif odd <= threshold * even:
        verdict = "even"
    else:
        verdict = "mixed"
    return ParityResult(odd, even, verdict)


# ---------------------------------------------------------------------------
# predicted leading coefficients


def predict_xray_leading(model: ConvexModel, gamma: float, k: int = 0, h: float = 1.0, phi: float = 1.0,
                         omega: float = 0.0) -> float:
    """Coefficient of τ^{2γ+1}(log τ)^k in I^φ(ρ^γ (log ρ)^k h): 2^k h φ κ^γ B(γ+1, γ+1)."""
    if gamma <= -1.0:
        raise IntegrabilityError("the X-ray transform of ρ^γ needs γ > -1")
    kap = kappa(model, omega)
    return float(2**k * h * phi * kap**gamma * beta_diag(gamma + 1.0).value.real)


@dataclass(frozen=True)
class BackprojectionPrediction:
    """Lowest singular term c ρ^z (log ρ)^ℓ of I₀♯(a τ^γ (log τ)^k χ), or ``exponent=None`` when absent."""

    exponent: float | None
    log_power: int | None
    coefficient: float
    case: str
    base_constant: float
    displayed_constant: float | None = None
    fiber_factor: float = 0.0
    measure_factor: float = 0.0


def _classify_real_gamma(gamma: float) -> tuple[str, int]:
    g = round(gamma)
    if abs(gamma - g) < 1e-9 and g >= 0:
        return ("even", g // 2) if g % 2 == 0 else ("odd", (g - 1) // 2)
    return "generic", -1


def predict_backprojection_leading(model: ConvexModel, gamma: float, k: int = 0,
                                   a: Callable[[float, int], float] | None = None,
                                   y: float = 0.0) -> BackprojectionPrediction:
    """Leading singular coefficient of the backprojection of a τ^γ (log τ)^k χ.

    The base constant depends on the parity class of γ; it is multiplied by
    the fiber sum Σ_w a(y, w) κ^{(1-γ)/2} over the two glancing directions and
    by the measure factor 4 s₀/κ², where κ and s₀ are measured on the model
    (on the unit disk 4 s₀/κ² = 4).
    """
    if k < 0:
        raise ParameterError("k must be nonnegative")
    case, m = _classify_real_gamma(gamma)
    kap = kappa(model, y)
    s0 = mu_measure_coefficient(model, y)
    amp = a if a is not None else (lambda yy, w: 1.0)
    fiber = sum(amp(y, w) for w in (1, -1)) * kap ** ((1.0 - gamma) / 2.0)
    measure = 4.0 * s0 / kap**2
    displayed = None
    if case == "even":
        if k == 0:
            return BackprojectionPrediction(None, None, 0.0, case, 0.0, None, fiber, measure)
        z0, ell = m + 0.5, k - 1
        c2 = math.comb(2 * m + 2, m + 1)
        base = (2 * math.pi * k / 2 ** (k + 3)) * 4 ** (2 * m + 2) / (2 * m + 2) / c2
        displayed = 2 * math.pi * k * 4 ** (2 * m + 2) / 2 ** ((k + 3) * (2 * m + 2))
    elif case == "odd":
        z0, ell = m + 1.0, k + 1
        base = -math.comb(2 * m + 2, m + 1) / ((k + 1) * 2 ** (k + 2))
    else:
        z0, ell = (gamma + 1.0) / 2.0, k
        sample = beta_diag(-z0)
        if sample.near_pole is not None:
            raise PoleError(f"B(-z0, -z0) has a pole at z0 = {z0}")
        base = 2.0 ** (-(k + 3)) * sample.value.real
    return BackprojectionPrediction(z0, ell, base * fiber * measure, case, base, displayed, fiber, measure)


# ---------------------------------------------------------------------------
# Mellin functional


def _exp_sinh_nodes(level: int = 7, tmax: float = 4.5):
    h = 2.0 ** (-level)
    t = h * np.arange(-int(tmax / h), int(tmax / h) + 1)
    x = np.exp(0.5 * np.pi * np.sinh(t))
    w = h * 0.5 * np.pi * np.cosh(t) * x
    return x, w


def _mellin_nodes(eps: float, truncate: float | None, level: int):
    """Nodes in s = log ρ and weights for ∫ e^{zs} profile(s) χ(e^s) ds over s <= log ε."""
    log_eps = math.log(eps)
    sig_c = math.log(3.0)  # χ ≡ 1 for σ = log ε - s >= log 3
    sa, wa = composite_gauss_nodes(0.0, sig_c, n=48, panels=4)
    if truncate is None:
        xb, wb = _exp_sinh_nodes(level)
        sb = sig_c + xb
    else:
        if truncate <= sig_c:
            raise ParameterError("truncation length must exceed log 3")
        panels = max(4, int(math.ceil((truncate - sig_c) / 2.0)))
        sb, wb = composite_gauss_nodes(sig_c, truncate, n=32, panels=panels)
    sigma = np.concatenate([sa, sb])
    w = np.concatenate([wa, wb])
    s = log_eps - sigma
    chi = smooth_cutoff(np.exp(s), eps)
    return s, w * chi


def mellin_eval(profile: Callable[[np.ndarray], np.ndarray], z, eps: float = 1.0, order: float | None = None,
                level: int = 7, truncate: float | None = None, log_variable: bool = True):
    """∫₀^ε ρ^z profile χ dρ/ρ with profile given as a function of s = log ρ.

    Parameters
    ----------
    profile : callable
        Vectorized function of s = log ρ (or of ρ when ``log_variable`` is
        False); working in s keeps ρ^z finite for ρ far below the
        floating-point range.
    z : complex or array
    order : float, optional
        Declared conormal order a with profile = O(ρ^a); Re z <= -a raises
        ``DivergenceError``.
    truncate : float, optional
        Integrate only over log ε - truncate <= s <= log ε (an entire function of z).
    """
    z_arr = np.asarray(z, dtype=complex)
    if order is not None and truncate is None and np.any(z_arr.real <= -order):
        raise DivergenceError(f"Re z must exceed {-order} for this profile")
    s, w = _mellin_nodes(eps, truncate, level)
    if not log_variable:
        keep = s > -700.0  # e^s underflows below this
        s, w = s[keep], w[keep]
        hv = np.asarray(profile(np.exp(s)), dtype=complex)
    else:
        hv = np.asarray(profile(s), dtype=complex)
    nz = hv != 0
    s, w, hv = s[nz], w[nz], hv[nz]
    # form ρ^z profile in log space: ρ^z overflows where profile underflows
    vals = np.exp(np.multiply.outer(z_arr, s) + np.log(hv)) @ w
    return complex(vals) if vals.ndim == 0 else vals


def mellin_exact_power(gamma: float, j: int, z, eps: float = 1.0) -> complex:
    """Mellin functional of ρ^γ (log ρ)^j χ, continued meromorphically (integration by parts)."""
    w = complex(z) + gamma
    # G_i(w) = ∫ ρ^w (log ρ)^i χ'(ρ) dρ over the transition interval of χ
    xs, ws = composite_gauss_nodes(eps / 3.0, 2.0 * eps / 3.0, n=64, panels=4)
    h = 1e-6 * eps
    dchi = (smooth_cutoff(xs + h, eps) - smooth_cutoff(xs - h, eps)) / (2 * h)
    lx = np.log(xs)
    total = 0j
    for i in range(j + 1):
        G = np.sum(ws * np.exp(w * lx) * lx**i * dchi)
        n = j - i
        total += math.comb(j, i) * (-1) ** n * math.factorial(n) * w ** (-n - 1) * G
    return -total


@dataclass(frozen=True)
class PoleInfo:
    """A pole of the Mellin functional and the expansion term it encodes.

    ``laurent_coefficient`` multiplies (z - location)^{-order}; the
    corresponding term of profile is ``expansion_coefficients[-1]`` ρ^{-location}
    (log ρ)^{order-1}.
    """

    location: float
    order: int
    laurent_coefficient: float
    expansion_coefficients: tuple[float, ...]
    residual: float

    @property
    def leading_coefficient(self) -> float:
        return self.laurent_coefficient


def _tail_exponent(profile, s_lo: float, s_hi: float) -> tuple[float, float]:
    """Fit log|profile(s)| ≈ γ s + k log(-s) + c; returns (γ, k)."""
    s = np.linspace(s_lo, s_hi, 60)
    hv = np.abs(np.asarray(profile(s), dtype=float))
    if np.any(hv == 0) or not np.all(np.isfinite(hv)):
        raise FitError("profile vanishes or is not finite on the tail window")
    A = np.stack([s, np.log(-s), np.ones_like(s)], axis=1)
    coef, *_ = np.linalg.lstsq(A, np.log(hv), rcond=None)
    return float(coef[0]), float(coef[1])


def _truncated_kernel(length: float):
    """K_j(w) = ∫_{-L}^0 e^{ws} s^j ds evaluated by Gauss quadrature."""
    sq, wq = composite_gauss_nodes(-length, 0.0, n=32, panels=max(4, int(length)))

    def kernel(z, p, j):
        return np.exp(np.multiply.outer(np.asarray(z) - p, sq)) @ (wq * sq**j)

    return kernel


def _varpro(zs, vals, kernel, locations, orders, center, poly_degree, weights):
    """Linear coefficients and weighted relative residual for fixed pole locations."""
    cols = [kernel(zs, p, j) for p, n in zip(locations, orders) for j in range(n)]
    cols += [(zs - center) ** i for i in range(poly_degree + 1)]
    A = np.stack(cols, axis=1) * weights[:, None]
    y = vals * weights
    norms = np.linalg.norm(A, axis=0)
    coef, *_ = np.linalg.lstsq(A / norms, y, rcond=None)
    resid = float(np.linalg.norm(A / norms @ coef - y) / np.linalg.norm(y))
    return coef / norms, resid


def _fit_pole(zs, vals, kernel, p_guess, max_order, half_width, poly_degree, known=()):
    """Variable projection over one pole location for each order; returns (order, location, coefs, residual).

    ``known`` lists (location, order) of poles found earlier; their kernels
    enter with free coefficients at fixed locations and absorb the error of
    their subtraction.
    """
    weights = np.ones_like(vals)
    fixed_locs = [loc for loc, _ in known]
    fixed_orders = [n for _, n in known]
    skip = sum(fixed_orders)
    fits = []
    for n in range(1, max_order + 1):
        def objective(p, n=n):
            return _varpro(zs, vals, kernel, fixed_locs + [p], fixed_orders + [n], p_guess, poly_degree, weights)[1]

        r = minimize_scalar(objective, bounds=(p_guess - half_width, p_guess + half_width), method="bounded",
                            options={"xatol": 1e-12})
        coef, resid = _varpro(zs, vals, kernel, fixed_locs + [r.x], fixed_orders + [n], p_guess, poly_degree, weights)
        fits.append((n, float(r.x), coef[skip:skip + n], resid))
    # raise the order only while it buys a large drop in a residual that is not yet at the noise floor
    chosen = fits[0]
    for nxt in fits[1:]:
        if chosen[3] > RESIDUAL_FLOOR and chosen[3] > ORDER_GAIN * max(nxt[3], 1e-16):
            chosen = nxt
        else:
            break
    return chosen


def _pole_info(location, order, coef, resid) -> PoleInfo:
    expansion = tuple(float(c) for c in coef)
    laurent = float(coef[order - 1] * (-1) ** (order - 1) * math.factorial(order - 1))
    return PoleInfo(float(location), int(order), laurent, expansion, float(resid))


def _subtract_terms(profile, location, coefs):
    def reduced(s):
        s = np.asarray(s, dtype=float)
        out = np.asarray(profile(s), dtype=float).copy()
        for j, c in enumerate(coefs):
            out = out - c * np.exp(-location * s) * s**j
        return out

    return reduced


def _clean_remainder(profile, current, poles: list[PoleInfo], length: float):
    """Remove from ``current`` its relative least-squares part on the columns of the poles found.

    Subleading log coefficients of a pole are poorly determined; their error
    sits at the same exponent and must not be mistaken for a new pole.
    """
    s = np.linspace(-0.9 * length, -1.0, 80)
    weight = 1.0 / np.maximum(np.abs(np.asarray(profile(s), dtype=float)), 1e-300)
    terms = [(pl.location, j) for pl in poles for j in range(pl.order)]
    A = np.stack([np.exp(-p * s) * s**j for p, j in terms], axis=1) * weight[:, None]
    coef, *_ = np.linalg.lstsq(A, np.asarray(current(s), dtype=float) * weight, rcond=None)

    def cleaned(x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(current(x), dtype=float).copy()
        for (p, j), c in zip(terms, coef):
            out = out - c * np.exp(-p * x) * x**j
        return out

    return cleaned


def _relative_remainder(profile, current, length: float) -> float:
    """Largest |current/profile| over -0.4 L <= s <= -1, where further poles are still visible."""
    s = np.linspace(-0.4 * length, -1.0, 40)
    h = np.abs(np.asarray(profile(s), dtype=float))
    c = np.abs(np.asarray(current(s), dtype=float))
    return float(np.max(c / np.maximum(h, 1e-300)))


def mellin_pole_scan(profile: Callable[[np.ndarray], np.ndarray], window: tuple[float, float] = (-3.0, 0.5),
                     max_order: int = 3, eps: float = 1.0, max_poles: int = 4,
                     first_truncate: float = 40.0, truncate: float = 16.0) -> list[PoleInfo]:
    """Locate poles of the Mellin functional of profile with real part in ``window``, rightmost first.

    A rough location comes from the decay rate of profile as s → -∞.  The
    Mellin functional truncated to log ε - L <= s <= log ε is entire in z;
    on a real segment around the rough location it equals
    Σ_j c_j K_j(z - p) plus an analytic remainder, where
    K_j(w) = ∫_{-L}^0 e^{ws} s^j ds is the truncated image of the Laurent
    term (-1)^j j!/w^{j+1}.  The location p is fitted by variable
    projection for each order 1..max_order with a degree-6 polynomial
    remainder; the order is raised only while the residual drops by more
    than ``ORDER_GAIN``.  The fitted terms are subtracted from profile and the
    scan recurses with the shorter length ``truncate`` to find the next
    rough location.  Each time a pole is added, all poles found so far are
    refitted jointly against the truncated functional of the original profile,
    which needs no subtraction, and the next search subtracts the refitted
    terms.  Later fits keep the kernels of the poles already found, with
    free coefficients, so the error of the subtraction is absorbed.

    The scan stops when the remainder after subtraction is below
    ``REMAINDER_SIGNIFICANCE`` relative to profile, or when a candidate pole
    fails to explain profile better at every sampled s in -0.4 L <= s <= -1
    (and tenfold on geometric average).  Closely packed deeper poles
    (spacing about 1/2 behind a third term) are then left unreported
    rather than reported wrongly.
    """
    lo, hi = window
    poles: list[PoleInfo] = []
    for depth in range(max_poles):
        current = profile
        for pl in poles:
            current = _subtract_terms(current, pl.location, pl.expansion_coefficients)
        length = first_truncate if depth == 0 else truncate
        try:
            if depth == 0:
                gamma, _ = _tail_exponent(current, -150.0, -40.0)
            else:
                gamma, _ = _tail_exponent(current, -0.9 * truncate, -0.4 * truncate)
        except FitError:
            break
        p_guess = -gamma
        if not lo <= p_guess <= hi:
            break
        if poles and p_guess > poles[-1].location - MIN_SEPARATION:
            break
        if poles and _relative_remainder(profile, _clean_remainder(profile, current, poles, truncate), truncate) < REMAINDER_SIGNIFICANCE:
            break
        # the short tail window of later poles biases the rough location by up to ~0.1
        half_width = 0.02 if depth == 0 else 0.12
        zs = p_guess + np.linspace(-0.15 - half_width, 0.15 + half_width, 41)
        vals = np.real(mellin_eval(current, zs, eps=eps, truncate=length))
        known = [(pl.location, pl.order) for pl in poles]
        n, p, coef, resid = _fit_pole(zs, vals, _truncated_kernel(length), p_guess, max_order, half_width,
                                      REMAINDER_DEGREE, known)
        if resid > 1e-4:
            if poles:
                break
            raise FitError(f"pole fit residual {resid:.2e} exceeds 1e-4 near z = {p:.4f}")
        if not poles:
            poles = [_pole_info(p, n, coef, resid)]
            continue
        trial = _joint_refine(profile, poles + [_pole_info(p, n, coef, resid)], eps, truncate)
        locs = sorted(pl.location for pl in trial)
        separated = all(b - a >= MIN_SEPARATION for a, b in zip(locs, locs[1:]))
        # keep the new pole only if it markedly improves the reconstruction of profile near the boundary
        # a genuine pole explains profile better everywhere near the boundary and by a wide margin on average
        worst, mean = _misfit_gain(profile, poles, trial, truncate)
        if not separated or worst > 1.0 or mean > 0.1:
            break
        poles = trial
    return poles


def _unexplained(profile, poles: list[PoleInfo], s: np.ndarray) -> np.ndarray:
    rest = np.asarray(profile(s), dtype=float).copy()
    for pl in poles:
        for j, c in enumerate(pl.expansion_coefficients):
            rest -= c * np.exp(-pl.location * s) * s**j
    return np.abs(rest)


def _misfit_gain(profile, before: list[PoleInfo], after: list[PoleInfo], length: float) -> tuple[float, float]:
    """Largest and geometric-mean ratio of the unexplained part of profile, after over before, on -0.4 L <= s <= -1."""
    s = np.linspace(-0.4 * length, -1.0, 40)
    old = np.maximum(_unexplained(profile, before, s), 1e-300)
    ratio = np.maximum(_unexplained(profile, after, s), 1e-300) / old
    return float(ratio.max()), float(np.exp(np.mean(np.log(ratio))))


def _joint_refine(profile, poles: list[PoleInfo], eps: float, length: float) -> list[PoleInfo]:
    kernel = _truncated_kernel(length)
    zs = np.unique(np.concatenate([pl.location + np.linspace(-0.15, 0.15, 31) for pl in poles]))
    vals = np.real(mellin_eval(profile, zs, eps=eps, truncate=length))
    weights = 1.0 / np.maximum(np.abs(vals), 1e-300)
    orders = [pl.order for pl in poles]
    center = float(np.mean(zs))
    degree = REMAINDER_DEGREE

    def resid(locs):
        return _varpro(zs, vals, kernel, locs, orders, center, degree, weights)[1]

    x0 = np.array([pl.location for pl in poles])
    res = minimize(resid, x0, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-16, "maxiter": 4000, "initial_simplex":
                            np.vstack([x0, x0 + 0.01 * np.eye(x0.size)])})
    coef, r = _varpro(zs, vals, kernel, res.x, orders, center, degree, weights)
    out, i = [], 0
    for loc, n in zip(res.x, orders):
        out.append(_pole_info(loc, n, coef[i:i + n], r))
        i += n
    return out


# ---------------------------------------------------------------------------
# profile construction and boundary determination


def rays_at(model: ConvexModel, y: float, taus: np.ndarray, w: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Inward rays with glancing-chart midpoint y, orientation w and exit times ``taus``."""
    taus = np.asarray(taus, dtype=float)
    if isinstance(model, DiskModel):
        alpha = w * np.arccos(taus / 2.0)
        delta = np.pi - 2.0 * alpha
    else:
        alpha = np.empty_like(taus)
        delta = np.empty_like(taus)
        for i, t in enumerate(taus):
            a = brentq(lambda a: model.orbit(a).tau - t, 1e-9, 0.5 * np.pi - 1e-12, xtol=1e-15)
            alpha[i] = w * a
            delta[i] = model.orbit(float(alpha[i])).delta
    d = np.mod(delta + np.pi, 2 * np.pi) - np.pi
    return np.mod(y - 0.5 * d, 2 * np.pi), alpha


def xray_profile(model: ConvexModel, f: ScalarField, y: float = 0.0, w: int = 1, grid: np.ndarray | None = None,
                 phi: ScalarField | None = None, level: int = 7) -> ProfileSamples:
    """Samples of I^φ f along the rays with chart point (y, w), as a function of τ."""
    taus = geometric_grid() if grid is None else grid
    beta, alpha = rays_at(model, y, taus, w)
    vals = xray_rays(model, f, beta, alpha, phi=phi, level=level)
    return ProfileSamples(taus, vals, {"y": y, "w": w})


def interior_profile(func: Callable[[np.ndarray], np.ndarray], y: float = 0.0, grid: np.ndarray | None = None) -> ProfileSamples:
    """Samples of a function on M at the points (1-ρ)(cos y, sin y), as a function of ρ."""
    rhos = geometric_grid() if grid is None else grid
    x = (1.0 - rhos)[:, None] * np.array([math.cos(y), math.sin(y)])
    return ProfileSamples(rhos, np.asarray(func(x), dtype=float), {"y": y})


@dataclass
class BoundaryLayers:
    y: np.ndarray
    layers: list[np.ndarray]
    fits: list[list[Expansion]]

    def layer_function(self, j: int) -> Callable[[np.ndarray], np.ndarray]:
        return _trig_interpolant(self.y, self.layers[j])


def _trig_interpolant(y: np.ndarray, vals: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    n = y.size
    coef = np.fft.rfft(vals) / n
    ks = np.arange(coef.size)

    def interp(t):
        t = np.asarray(t, dtype=float)
        ph = np.exp(1j * np.multiply.outer(t - y[0], ks))
        weights = np.where((ks == 0) | ((n % 2 == 0) & (ks == n // 2)), 1.0, 2.0)
        return np.real(ph @ (coef * weights))

    return interp


def boundary_determine(model: ConvexModel, data: Callable[[np.ndarray, np.ndarray], np.ndarray],
                       phi: ScalarField | None = None, depth: int = 1, n_y: int = 16,
                       grid: np.ndarray | None = None, n_terms: int = 4, level: int = 7) -> BoundaryLayers:
    """Recover f_j(y) in f ~ Σ f_j(y) ρ^j from X-ray data I^φ f by layer stripping.

    ``data(beta, alpha)`` evaluates the transform on inward rays.  Layer j is
    a_{1+2j} / (φ κ^j B(j+1, j+1)), where a_{1+2j} is the τ^{1+2j}
    coefficient of the remaining data at chart point (y, +1); the transform
    of the recovered layer is then synthesized numerically and subtracted.
    """
    taus = geometric_grid() if grid is None else grid
    ys = 2 * np.pi * np.arange(n_y) / n_y
    rays = [rays_at(model, float(y), taus, 1) for y in ys]
    remaining = [np.asarray(data(b, a), dtype=float) for b, a in rays]
    kap = kappa(model)
    phi_glance = np.ones(n_y)
    if phi is not None:
        pts = np.stack([np.cos(ys), np.sin(ys)], axis=-1)
        tang = np.stack([-np.sin(ys), np.cos(ys)], axis=-1) / model.boundary_scale
        phi_glance = np.asarray(phi.evaluate(pts, tang, model=model), dtype=float)
        if np.any(np.abs(phi_glance) < 1e-12):
            raise VanishingWeightError("the weight vanishes at a sampled glancing direction")
    layers, fits = [], []
    prev_scale = None
    for j in range(depth + 1):
        lead = 1.0 + 2.0 * j
        cands = [(lead + 2.0 * i, 0) for i in range(n_terms)]
        layer = np.empty(n_y)
        layer_fits = []
        for i in range(n_y):
            if not np.any(remaining[i]):
                layer[i] = 0.0
                layer_fits.append(Expansion(tuple(Term(z, k, 0.0, False) for z, k in cands), lead + 2.0 * n_terms, 0.0))
                continue
            ex = fit_expansion(ProfileSamples(taus, remaining[i]), cands)
            layer_fits.append(ex)
            a_lead = ex.terms[0].coeff
            layer[i] = a_lead / (phi_glance[i] * kap**j * beta_diag(j + 1.0).value.real)
        layers.append(layer)
        fits.append(layer_fits)
        if j == depth or not np.any(layer):
            continue
        interp = _trig_interpolant(ys, layer)
        synth = ScalarField(lambda x, interp=interp: interp(np.arctan2(x[..., 1], x[..., 0])), rho_power=float(j))
        new_remaining = []
        for (b, a), r in zip(rays, remaining):
            new_remaining.append(r - xray_rays(model, synth, b, a, phi=phi, level=level))
        scale = max(np.max(np.abs(r)) for r in new_remaining)
        if prev_scale is not None and scale > prev_scale:
            warnings.warn("layer subtraction residual exceeds the previous layer; recovery may be amplifying errors",
                          RuntimeWarning, stacklevel=2)
        prev_scale = scale
        remaining = new_remaining
    return BoundaryLayers(ys, layers, fits)

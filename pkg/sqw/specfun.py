"""
Airy, Hermite and Laguerre functions and the Airy transforms of Gauss and Hermite-Gauss profiles.

Ai is evaluated in three regions. For |x| < 9 we use Taylor series about anchors spaced 0.25
apart; the anchor values come from marching the Airy equation Ai'' = x Ai with the same
series, starting from the exact Ai(0), Ai'(0) toward negative x and from the asymptotic
expansion at x = 9 toward the origin (both directions are the stable ones). The anchor at the
origin makes the innermost piece the Maclaurin series. Beyond |x| = 9 the asymptotic series
is summed to its smallest term.
"""
import math
from functools import lru_cache
from typing import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from sqw.quadrature import adaptive_quad, gaussian_half_width
from sqw.utils.errors import NumericalGuardError

AI_ZERO = 0.355028053887817239260063186004183176
AIP_ZERO = -0.258819403792806798405183560189203963

ASYMPTOTIC_CUT = 9.0
ANCHOR_STEP = 0.25
TAYLOR_TERMS = 40
ASYMPTOTIC_TERMS = 60
IMAG_TOLERANCE = 1e-10

_SQRT_PI = math.sqrt(math.pi)


class AiryTransformParams(BaseModel):
    """Scale of the Airy transform and Hermite order of the transformed profile."""
    model_config = ConfigDict(frozen=True)

    alpha_t: float = Field(allow_inf_nan=False)
    m: int = Field(default=0, ge=0)

    @field_validator("alpha_t")
    @classmethod
    def _nonzero(cls, value: float) -> float:
        if value == 0.0:
            raise ValueError("Airy transform scale must be non-zero")
        return value


@lru_cache(maxsize=1)
def _asymptotic_coefficients() -> tuple[np.ndarray, np.ndarray]:
    u = np.empty(ASYMPTOTIC_TERMS + 1)
    u[0] = 1.0
    for k in range(1, ASYMPTOTIC_TERMS + 1):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
    k = np.arange(ASYMPTOTIC_TERMS + 1)
    v = -(6 * k + 1) / (6 * k - 1) * u
    return u, v


def _smallest_term_mask(magnitudes: np.ndarray) -> np.ndarray:
    """Keep terms up to (not including) the first one that grows; axis 0 runs over terms."""
    growing = magnitudes[1:] > magnitudes[:-1]
    first = np.where(growing.any(axis=0), growing.argmax(axis=0) + 1, magnitudes.shape[0])
    return np.arange(magnitudes.shape[0])[:, None] < first[None, :]


def _asymptotic_positive(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """exp(xi)-scaled Ai and Ai' for x >= ASYMPTOTIC_CUT."""
    u, v = _asymptotic_coefficients()
    xi = (2.0 / 3.0) * x**1.5
    k = np.arange(u.size)[:, None]
    powers = (-1.0) ** k * xi[None, :] ** (-k.astype(float))
    mask = _smallest_term_mask(np.abs(u[:, None] * powers))
    su = np.sum(np.where(mask, u[:, None] * powers, 0.0), axis=0)
    sv = np.sum(np.where(mask, v[:, None] * powers, 0.0), axis=0)
    quarter = x**0.25
    return su / (2.0 * _SQRT_PI * quarter), -quarter * sv / (2.0 * _SQRT_PI)


def _asymptotic_negative(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ai and Ai' for x <= -ASYMPTOTIC_CUT (oscillatory form)."""
    u, v = _asymptotic_coefficients()
    t = -x
    xi = (2.0 / 3.0) * t**1.5
    k = np.arange(u.size)[:, None]
    inv = xi[None, :] ** (-k.astype(float))
    mask = _smallest_term_mask(np.abs(u[:, None] * inv))
    # (-1)^j for the j-th even/odd term: k = 2j or 2j+1
    sign = np.where((k // 2) % 2 == 0, 1.0, -1.0)
    even = (k % 2 == 0) & mask
    odd = (k % 2 == 1) & mask
    u_even = np.sum(np.where(even, sign * u[:, None] * inv, 0.0), axis=0)
    u_odd = np.sum(np.where(odd, sign * u[:, None] * inv, 0.0), axis=0)
    v_even = np.sum(np.where(even, sign * v[:, None] * inv, 0.0), axis=0)
    v_odd = np.sum(np.where(odd, sign * v[:, None] * inv, 0.0), axis=0)
    theta = xi + math.pi / 4.0
    quarter = t**0.25
    ai = (np.sin(theta) * u_even - np.cos(theta) * u_odd) / (_SQRT_PI * quarter)
    aip = -quarter * (np.cos(theta) * v_even + np.sin(theta) * v_odd) / _SQRT_PI
    return ai, aip


def _taylor(x0, value, slope, t, terms: int = TAYLOR_TERMS):
    """Value and slope at x0 + t of the Airy-equation solution with the given data at x0."""
    c_prev2 = np.zeros_like(value)  # c_{n-1}
    c_prev = value                  # c_n
    c_cur = slope                   # c_{n+1}
    total = value + slope * t
    deriv = slope.copy() if isinstance(slope, np.ndarray) else slope
    t_pow = t  # t^(n+1)
    for n in range(0, terms - 2):
        c_next = (x0 * c_prev + c_prev2) / ((n + 1) * (n + 2))
        deriv = deriv + (n + 2) * c_next * t_pow
        t_pow = t_pow * t
        total = total + c_next * t_pow
        c_prev2, c_prev, c_cur = c_prev, c_cur, c_next
    return total, deriv


@lru_cache(maxsize=1)
def _anchor_table() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n_side = int(round(ASYMPTOTIC_CUT / ANCHOR_STEP))
    nodes = np.arange(-n_side, n_side + 1) * ANCHOR_STEP
    ai = np.empty(nodes.size)
    aip = np.empty(nodes.size)
    origin = n_side
    ai[origin], aip[origin] = AI_ZERO, AIP_ZERO
    for j in range(origin, 0, -1):
        ai[j - 1], aip[j - 1] = _taylor(nodes[j], ai[j], aip[j], -ANCHOR_STEP)
    top_ai, top_aip = _asymptotic_positive(np.array([nodes[-1]]))
    scale = math.exp(-(2.0 / 3.0) * nodes[-1] ** 1.5)
    ai[-1], aip[-1] = top_ai[0] * scale, top_aip[0] * scale
    for j in range(nodes.size - 1, origin + 1, -1):
        ai[j - 1], aip[j - 1] = _taylor(nodes[j], ai[j], aip[j], -ANCHOR_STEP)
    for arr in (nodes, ai, aip):
        arr.setflags(write=False)
    return nodes, ai, aip


def _airy_scaled(x) -> tuple[np.ndarray, np.ndarray]:
    """
    Ai(x) and Ai'(x), both multiplied by exp(2/3 x^1.5) where x > 0.
    """
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    ai = np.empty_like(flat)
    aip = np.empty_like(flat)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        finite = np.isfinite(flat)
        hi = (flat >= ASYMPTOTIC_CUT) & finite
        lo = (flat <= -ASYMPTOTIC_CUT) & finite
        mid = ~(hi | lo) & finite
        if hi.any():
            ai[hi], aip[hi] = _asymptotic_positive(flat[hi])
        if lo.any():
            ai[lo], aip[lo] = _asymptotic_negative(flat[lo])
        if mid.any():
            nodes, table_ai, table_aip = _anchor_table()
            xm = flat[mid]
            idx = np.rint((xm - nodes[0]) / ANCHOR_STEP).astype(int)
            x0 = nodes[idx]
            val, der = _taylor(x0, table_ai[idx], table_aip[idx], xm - x0)
            positive = xm > 0
            scale = np.exp((2.0 / 3.0) * np.where(positive, xm, 0.0) ** 1.5)
            ai[mid], aip[mid] = val * scale, der * scale
        bad = ~finite
        if bad.any():
            # Ai and Ai' vanish at both infinities
            ai[bad] = np.where(np.isnan(flat[bad]), np.nan, 0.0)
            aip[bad] = ai[bad]
    return ai.reshape(x.shape), aip.reshape(x.shape)


def _unscale(x: np.ndarray) -> np.ndarray:
    with np.errstate(under="ignore"):
        return np.exp(-(2.0 / 3.0) * np.where(x > 0, x, 0.0) ** 1.5)


def airy_ai(x):
    """Airy function Ai(x); accepts scalars or arrays."""
    x = np.asarray(x, dtype=float)
    ai, _ = _airy_scaled(x)
    return (ai * _unscale(x))[()]


def airy_ai_prime(x):
    """Derivative Ai'(x)."""
    x = np.asarray(x, dtype=float)
    _, aip = _airy_scaled(x)
    return (aip * _unscale(x))[()]


def airy_ai_scaled(x):
    """Ai(x) exp(2/3 x^1.5) for x > 0, plain Ai(x) otherwise."""
    ai, _ = _airy_scaled(x)
    return ai[()]


def _derivative_stack(x: np.ndarray, ai: np.ndarray, aip: np.ndarray, kmax: int) -> np.ndarray:
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = ai
    if kmax >= 1:
        out[1] = aip
    # Ai^(n+2) = x Ai^(n) + n Ai^(n-1)
    for n in range(0, kmax - 1):
        out[n + 2] = x * out[n] + (n * out[n - 1] if n >= 1 else 0.0)
    return out


def airy_derivatives(x, kmax: int) -> np.ndarray:
    """Stack of Ai^(k)(x) for k = 0..kmax along the first axis."""
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    x = np.asarray(x, dtype=float)
    ai, aip = _airy_scaled(x)
    scale = _unscale(x)
    return _derivative_stack(x, ai * scale, aip * scale, kmax)


def hermite(m: int, x):
    """Physicists' Hermite polynomial H_m(x) by the three-term recurrence; x may be complex."""
    if m < 0:
        raise ValueError(f"Hermite order must be non-negative, got {m}")
    x = np.asarray(x)
    dtype = np.result_type(x, float)
    h_prev = np.ones_like(x, dtype=dtype)
    if m == 0:
        return h_prev[()]
    h = 2.0 * x.astype(dtype)
    for k in range(1, m):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h[()]


def laguerre(p: int, a, x):
    """Associated Laguerre polynomial L_p^a(x)."""
    if p < 0 or a < 0:
        raise ValueError(f"Laguerre indices must be non-negative, got p={p}, a={a}")
    x = np.asarray(x, dtype=float)
    l_prev = np.ones_like(x)
    if p == 0:
        return l_prev[()]
    l_cur = 1.0 + a - x
    for k in range(1, p):
        l_prev, l_cur = l_cur, ((2 * k + 1 + a - x) * l_cur - (k + a) * l_prev) / (k + 1)
    return l_cur[()]


def _gaussian_transform_parts(alpha_t: float, y: np.ndarray):
    """Argument of Ai and the log of the prefactor for the Gaussian Airy transform."""
    a = alpha_t
    arg = y / a + 1.0 / (16.0 * a**4)
    log_pref = math.log(_SQRT_PI / abs(a)) + (y + 1.0 / (24.0 * a**3)) / (4.0 * a**3)
    # fold the exp(-xi) of the scaled Airy values into the prefactor
    log_pref = log_pref - (2.0 / 3.0) * np.where(arg > 0, arg, 0.0) ** 1.5
    return arg, log_pref


def airy_transform_gaussian(alpha_t: float, y):
    """
    (1/|a|) * integral Ai((y - x)/a) exp(-x^2) dx in closed form.
    """
    params = AiryTransformParams(alpha_t=alpha_t)
    y = np.asarray(y, dtype=float)
    arg, log_pref = _gaussian_transform_parts(params.alpha_t, y)
    ai, _ = _airy_scaled(arg)
    with np.errstate(over="ignore", under="ignore"):
        return (np.exp(log_pref) * ai)[()]


def airy_transform_hg(m: int, alpha_t: float, y):
    """
    Airy transform of exp(-x^2) H_m(sqrt(2) x): a binomial sum of Ai^(k) at the shifted
    Gaussian argument, weighted by H_n(i sqrt(2) / (8 a^3)) i^n.
    """
    params = AiryTransformParams(alpha_t=alpha_t, m=m)
    a = params.alpha_t
    y = np.asarray(y, dtype=float)
    arg, log_pref = _gaussian_transform_parts(a, y)
    ai, aip = _airy_scaled(arg)
    derivs = _derivative_stack(arg, ai, aip, m)
    b = 1j * math.sqrt(2.0) / (8.0 * a**3)
    total = np.zeros(y.shape, dtype=complex)
    for n in range(m + 1):
        weight = math.comb(m, n) * hermite(n, b) * (1j**n) * (-math.sqrt(2.0) / a) ** (m - n)
        total = total + weight * derivs[m - n]
    scale = np.maximum(np.abs(total.real), 1.0)
    if np.any(np.abs(total.imag) > IMAG_TOLERANCE * scale):
        raise NumericalGuardError("Hermite-Gauss Airy transform left an imaginary residue")
    with np.errstate(over="ignore", under="ignore"):
        return (np.exp(log_pref) * total.real)[()]


def airy_transform_quad(f: Callable[[float], float], alpha_t: float, y: float,
                        half_width: float | None = None, center: float = 0.0) -> float:
    """
    Airy transform of an arbitrary profile by adaptive quadrature of the defining integral.
    ``f`` must decay like a Gaussian outside ``center +/- half_width``.
    """
    params = AiryTransformParams(alpha_t=alpha_t)
    a = params.alpha_t
    L = gaussian_half_width() if half_width is None else half_width

    def integrand(x: float) -> float:
        return float(airy_ai((y - x) / a)) * f(x)

    return adaptive_quad(integrand, center - L, center + L, limit=1000) / abs(a)


__all__ = [
    "AiryTransformParams",
    "airy_ai",
    "airy_ai_prime",
    "airy_ai_scaled",
    "airy_derivatives",
    "hermite",
    "laguerre",
    "airy_transform_gaussian",
    "airy_transform_hg",
    "airy_transform_quad",
]

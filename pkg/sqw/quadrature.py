"""
Quadrature rules shared by the special-function, kernel and eigenbasis code.

Batched work uses composite Gauss-Legendre panels (vectorised over any leading axes);
scalar checks go through QUADPACK's adaptive Gauss-Kronrod via scipy.
"""
import math
import warnings
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate

from sqw.utils.errors import QuadratureError

GAUSSIAN_TAIL = 1e-18


@lru_cache(maxsize=32)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_rule(a: float, b: float, panels: int = 64, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b]."""
    if panels < 1 or order < 1:
        raise ValueError("panels and order must be positive")
    nodes, weights = _legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return x, w


def integrate_panels(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                     panels: int = 64, order: int = 16) -> np.ndarray:
    """
    Integrate ``f`` over [a, b]. ``f`` receives the flat node array and may return an array whose
    last axis runs over the nodes; the integral is taken along that axis.
    """
    x, w = panel_rule(a, b, panels, order)
    return np.asarray(f(x)) @ w


def gaussian_half_width(order: int = 0, scale: float = 1.0, tail: float = GAUSSIAN_TAIL) -> float:
    """Half-width beyond which exp(-(x/scale)^2) times a Hermite polynomial of ``order`` is below ``tail``."""
    return scale * (math.sqrt(-math.log(tail)) + math.sqrt(2 * order + 1))


def adaptive_quad(f: Callable[[float], complex], a: float, b: float, *,
                  epsabs: float = 1e-13, epsrel: float = 1e-11, limit: int = 400,
                  points: list[float] | None = None) -> complex:
    """
    Adaptive Gauss-Kronrod integral of a scalar function, real or complex.

    Raises QuadratureError when QUADPACK reports non-convergence.
    """

    def _part(g):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                value, abserr = integrate.quad(g, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, points=points)
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {exc}") from exc
        return value, abserr

    sample = f(0.5 * (a + b))
    if np.iscomplexobj(sample):
        re, _ = _part(lambda t: float(np.real(f(t))))
        im, _ = _part(lambda t: float(np.imag(f(t))))
        return complex(re, im)
    value, _ = _part(lambda t: float(f(t)))
    return value


__all__ = ["panel_rule", "integrate_panels", "gaussian_half_width", "adaptive_quad"]

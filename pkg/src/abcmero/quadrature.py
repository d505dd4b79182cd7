"""Means over the circle |z| = rho by the doubling trapezoidal rule."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .rational_core import MeroTriple, Polynomial, RationalFunction, logder_triple
from .rootfinder import roots_with_multiplicity, site_table, triple_site_table

N_MIN = 64
N_MAX = 2 ** 20


class QuadratureError(ArithmeticError):
    def __init__(self, message: str, last=None):
        super().__init__(message)
        self.last = last


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float  # |I_2N - I_N| at exit
    nodes: int
    history: tuple  # doubling differences, oldest first

    def __float__(self):
        return self.value


def circle_mean(
    g: Callable[[np.ndarray], np.ndarray],
    tol: float = 1e-10,
    n_min: int = N_MIN,
    n_max: int = N_MAX,
) -> QuadratureResult:
    """(1/2pi) * integral of g(theta) over [0, 2pi), equispaced trapezoid with doubling.

    Each doubling evaluates only the new (odd) nodes.
    """
    n = n_min
    theta = 2 * np.pi * np.arange(n) / n
    vals = np.asarray(g(theta), dtype=float)
    _check_finite(vals)
    total = float(np.sum(vals))
    current = total / n
    history = []
    while True:
        if 2 * n > n_max:
            raise QuadratureError(
                f"quadrature non-convergence at N={n}: last iterates {history[-1] if history else None!r}",
                last=(current, history[-1] if history else math.nan),
            )
        theta = 2 * np.pi * (np.arange(n) + 0.5) / n
        vals = np.asarray(g(theta), dtype=float)
        _check_finite(vals)
        total += float(np.sum(vals))
        n *= 2
        refined = total / n
        diff = abs(refined - current)
        history.append(diff)
        current = refined
        if diff < tol:
            return QuadratureResult(current, diff, n, tuple(history))


def _check_finite(vals: np.ndarray) -> None:
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("non-finite sample in circle quadrature")


def circle_mean_z(h: Callable[[np.ndarray], np.ndarray], rho: float, **kw) -> QuadratureResult:
    """Mean of h(z) over |z| = rho."""
    return circle_mean(lambda t: h(rho * np.exp(1j * t)), **kw)


def jensen_mean(p: Polynomial, rho: float) -> float:
    """Closed-form mean of log|p| over |z| = rho from the roots of p."""
    if p.is_zero():
        raise ValueError("log of the zero polynomial")
    lead = math.log(abs(complex(p.lead)))
    return lead + math.fsum(r.multiplicity * math.log(max(rho, abs(r.location))) for r in roots_with_multiplicity(p))


def singularity_distance(P, rho: float) -> float:
    """Distance from the circle to the nearest zero/pole of the coordinates or of their log-derivative triple."""
    if isinstance(P, MeroTriple) and P.is_exact():
        funcs = P.coords
        if P.nonconstant:
            funcs = funcs + logder_triple(P).coords
        return site_table(tuple(funcs)).distance_to_circle(rho)
    return triple_site_table(P, rho).distance_to_circle(rho)

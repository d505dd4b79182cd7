"""Complex roots with exact multiplicities, and valuation sites inside a disk.

Multiplicities always come from exact algebra (square-free decomposition and
a coprime base across all coordinates); Aberth-Ehrlich iteration only
locates the simple roots of each square-free piece.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .rational_core import MeroTriple, Polynomial, RationalFunction, poly_gcd, squarefree_decomposition

ROOT_TOL = 1e-12
MAX_ITER = 200
CLUSTER_TOL = 1e-9
_EPS = np.finfo(float).eps


class RootFindingError(ArithmeticError):
    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class SiteOnCircleError(ValueError):
    """A zero or pole sits (numerically) on the circle |z| = rho."""

    def __init__(self, x: complex, rho: float):
        super().__init__(f"site on circle: |{x:.12g}| = {abs(x):.12g} vs rho = {rho:.12g}")
        self.x = x
        self.rho = rho


@dataclass(frozen=True)
class Root:
    location: complex
    multiplicity: int


def cauchy_bound(cs: np.ndarray) -> float:
    return 1.0 + float(np.max(np.abs(cs[:-1] / cs[-1]))) if len(cs) > 1 else 0.0


def aberth(coeffs: np.ndarray, tol: float = ROOT_TOL, max_iter: int = MAX_ITER) -> np.ndarray:
    """Simultaneous Aberth-Ehrlich iteration; coeffs lowest degree first.

    Intended for square-free inputs, where convergence is cubic.  A root is
    accepted once its update falls below ``tol`` (relative) or its residual
    reaches the rounding floor of the evaluation.
    """
    cs = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    n = len(cs) - 1
    if n < 1:
        return np.empty(0, dtype=complex)
    if n == 1:
        return np.array([-cs[0] / cs[1]])
    p = cs[::-1]  # numpy polyval order
    dp = np.polyder(p)
    radius = 1.1 * cauchy_bound(cs)
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    for _ in range(max_iter):
        pz = np.polyval(p, z)
        dpz = np.polyval(dp, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            corr = ratio / (1.0 - ratio * inv.sum(axis=1))
        corr = np.where(pz == 0, 0.0, corr)
        if not np.all(np.isfinite(corr)):
            corr = np.where(np.isfinite(corr), corr, 1e-3 * radius)
        z = z - corr
        small_step = np.abs(corr) <= tol * np.maximum(1.0, np.abs(z))
        # a residual at the rounding level of Horner evaluation cannot improve further
        at_floor = np.abs(np.polyval(p, z)) <= 8 * _EPS * np.polyval(np.abs(p), np.abs(z))
        if np.all(small_step | at_floor):
            return z
    raise RootFindingError(
        f"Aberth iteration did not converge in {max_iter} steps",
        residuals=np.abs(np.polyval(p, z)),
    )


def roots_with_multiplicity(p: Polynomial, tol: float = ROOT_TOL) -> list[Root]:
    """All complex roots of p with exact multiplicities."""
    if p.is_zero():
        raise ValueError("roots of the zero polynomial")
    out: list[Root] = []
    for q, k in squarefree_decomposition(p):
        for x in aberth(q.complex_coeffs(), tol):
            out.append(Root(complex(x), k))
    return sorted(out, key=lambda r: (abs(r.location), math.atan2(r.location.imag, r.location.real)))


def coprime_base(polys: Sequence[Polynomial]) -> list[Polynomial]:
    """Pairwise coprime monic square-free polynomials whose roots are the roots of ``polys``."""
    base: list[Polynomial] = []
    todo = [q for p in polys if p.degree > 0 for q, _ in squarefree_decomposition(p)]
    while todo:
        p = todo.pop()
        if p.degree < 1:
            continue
        for i, b in enumerate(base):
            g = poly_gcd(p, b)
            if g.degree > 0:
                del base[i]
                todo.extend(x for x in (g, b.exact_div(g), p.exact_div(g)) if x.degree > 0)
                break
        else:
            base.append(p.monic())
    return base


def _multiplicity(p: Polynomial, factor: Polynomial) -> int:
    k = 0
    while p.degree >= factor.degree:
        q, r = divmod(p, factor)
        if not r.is_zero():
            break
        p, k = q, k + 1
    return k


@dataclass(frozen=True)
class ValuationSite:
    """A point x of the disk with per-coordinate orders and degree log(rho/|x|).

    ``ords`` holds one order per coordinate; ``None`` marks an identically zero
    coordinate (order +infinity).
    """

    x: complex
    ords: tuple
    degree: float
    origin: bool = False

    @property
    def ord_a(self):
        return self.ords[0]

    @property
    def ord_b(self):
        return self.ords[1]

    @property
    def ord_c(self):
        return self.ords[2]

    def all_equal(self) -> bool:
        return len(set(self.ords)) == 1


def site_degree(x: complex, rho: float, origin: bool) -> float:
    return math.log(rho) if origin else math.log(rho / abs(x))


@dataclass(frozen=True)
class SiteTable:
    """Every zero/pole of a tuple of exact rational functions, with orders."""

    entries: tuple  # of (x: complex, ords: tuple, origin: bool)

    def distance_to_circle(self, rho: float) -> float:
        ds = [abs(abs(x) - rho) for x, _, _ in self.entries]
        return min(ds) if ds else math.inf

    def in_disk(self, rho: float, on_circle: str = "exclude", guard: float | None = None) -> list[ValuationSite]:
        guard = CLUSTER_TOL * rho if guard is None else guard
        out = []
        for x, ords, origin in self.entries:
            r = 0.0 if origin else abs(x)
            if abs(r - rho) <= guard:
                if on_circle == "raise":
                    raise SiteOnCircleError(x, rho)
                continue
            if r < rho:
                out.append(ValuationSite(x, ords, site_degree(x, rho, origin), origin))
        return out


@lru_cache(maxsize=4096)
def site_table(funcs: tuple, tol: float = ROOT_TOL, cluster_tol: float = CLUSTER_TOL) -> SiteTable:
    """Site table for a tuple of RationalFunction (zero functions get order None)."""
    live = [f for f in funcs if not f.is_zero()]
    if not live:
        raise ValueError("all coordinates vanish identically")
    entries = []
    origin_ords = tuple(None if f.is_zero() else f.num.trailing_order() - f.den.trailing_order() for f in funcs)
    if any(o for o in origin_ords if o is not None):
        entries.append((0j, origin_ords, True))

    def stripped(p: Polynomial) -> Polynomial:
        return p.shift_down(p.trailing_order())

    pieces = [(stripped(f.num), stripped(f.den)) if not f.is_zero() else None for f in funcs]
    base = coprime_base([p for pair in pieces if pair for p in pair])
    for q in base:
        ords = tuple(
            None if pair is None else _multiplicity(pair[0], q) - _multiplicity(pair[1], q)
            for pair in pieces
        )
        for x in aberth(q.complex_coeffs(), tol):
            entries.append((complex(x), ords, False))
    entries.sort(key=lambda e: (abs(e[0]), math.atan2(e[0].imag, e[0].real)))
    return SiteTable(tuple(merge_entries(entries, cluster_tol)))


def merge_entries(entries, tol: float):
    """Merge entries closer than tol (relative to max(1, |x|)); orders add."""
    out = []
    for x, ords, origin in entries:
        for k, (y, o2, org2) in enumerate(out):
            if abs(x - y) <= tol * max(1.0, abs(x)):
                summed = tuple(None if (p is None or q is None) else p + q for p, q in zip(ords, o2))
                out[k] = (0j if (origin or org2) else y, summed, origin or org2)
                break
        else:
            out.append((x, ords, origin))
    return [e for e in out if any(o for o in e[1] if o is not None)]


def oracle_entries(coords: Sequence, radius: float, tol: float = ROOT_TOL, cluster_tol: float = CLUSTER_TOL):
    """Merged site entries for coordinates given as oracles (or exact functions)."""
    raw = []
    n = len(coords)
    for i, f in enumerate(coords):
        if isinstance(f, RationalFunction):
            zp = [(x, ords[0], origin) for x, ords, origin in site_table((f,), tol, cluster_tol).entries]
        else:
            zp = [(complex(x), k, complex(x) == 0) for x, k in f.zeros_poles(radius)]
        for x, k, origin in zp:
            ords = [0] * n
            ords[i] = k
            raw.append((complex(x), tuple(ords), origin))
    raw.sort(key=lambda e: (abs(e[0]), math.atan2(e[0].imag, e[0].real)))
    return merge_entries(raw, cluster_tol)


def triple_site_table(P, rho: float, tol: float = ROOT_TOL, cluster_tol: float = CLUSTER_TOL) -> SiteTable:
    coords = P.coords if isinstance(P, MeroTriple) else tuple(P)
    if all(isinstance(f, RationalFunction) for f in coords):
        return site_table(tuple(coords), tol, cluster_tol)
    # oracles list sites up to a radius; look past rho so guard checks see near-circle sites
    return SiteTable(tuple(oracle_entries(coords, 2.0 * rho + 1.0, tol, cluster_tol)))


def sites_in_disk(P, rho: float, *, on_circle: str = "exclude", guard: float | None = None) -> list[ValuationSite]:
    """Zeros and poles of the coordinates strictly inside |z| < rho.

    ``on_circle="raise"`` turns sites within ``guard`` of the circle into a
    SiteOnCircleError; the default drops them (their degree is 0 anyway).
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    return triple_site_table(P, rho).in_disk(rho, on_circle, guard)

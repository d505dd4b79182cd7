"""Heights, radicals and the Formal ABC report for points of P^2 over meromorphic functions.

Conventions, for a coordinate f and a radius rho:

* v_x(f, rho) = -ord(f, x) * log(rho/|x|) for 0 < |x| < rho, and
  -ord(f, 0) * log(rho) at the origin;
* the archimedean part is the circle mean of log sqrt(|a|^2 + |b|^2 + |c|^2);
* h_inf uses the Laurent coefficients at z^m, m = min of the orders at 0.

The archimedean radical is evaluated on the log-derivative triple
((b/c)'/(b/c), (c/a)'/(c/a), (a/b)'/(a/b)).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT, RunConfig
from .quadrature import QuadratureError, circle_mean_z, jensen_mean
from .rational_core import (
    MeroTriple,
    NearPoleError,
    Polynomial,
    RationalFunction,
    log_derivative,
    log_sqrt_abs2,
    logder_triple,
    poly_gcd,
    poly_lcm,
)
from .rootfinder import (
    RootFindingError,
    SiteOnCircleError,
    ValuationSite,
    site_table,
    triple_site_table,
)

LOG_SQRT2 = 0.5 * math.log(2.0)
ARCH_BOUND_SLACK = 1e-12


class ArchBoundViolation(AssertionError):
    """|a|^2+|b|^2+|c|^2 <= 2(1+|a|^2)(1+|b|^2) failed at a quadrature node."""


# --------------------------------------------------------------------------- oracles


@dataclass(frozen=True)
class MeromorphicOracle:
    """A meromorphic function known through evaluation and a declared zero/pole list.

    ``zeros_poles(radius)`` returns (location, order) for every zero (order > 0)
    and pole (order < 0) with |x| < radius; the origin must be given as exactly 0.
    """

    name: str
    eval: Callable[[np.ndarray], np.ndarray]
    eval_derivative: Callable[[np.ndarray], np.ndarray]
    zeros_poles: Callable[[float], list]
    laurent: tuple  # (n, f_n)

    def eval_array(self, z) -> np.ndarray:
        return np.asarray(self.eval(np.asarray(z, dtype=complex)), dtype=complex)

    def eval_derivative_array(self, z) -> np.ndarray:
        return np.asarray(self.eval_derivative(np.asarray(z, dtype=complex)), dtype=complex)

    def log_abs_array(self, z) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.eval_array(z)))

    def laurent_leading(self) -> tuple:
        return self.laurent

    def is_zero(self) -> bool:
        return False

    def __str__(self):
        return self.name


def check_oracle(f: MeromorphicOracle, rho: float, samples: int = 16, rel: float = 1e-5, seed: int = 0) -> float:
    """Central-difference check of eval_derivative on |z| = rho; returns the worst relative error."""
    rng = np.random.default_rng(seed)
    z = rho * np.exp(1j * rng.uniform(0, 2 * np.pi, samples))
    h = 1e-6 * max(1.0, rho)
    fd = (f.eval_array(z + h) - f.eval_array(z - h)) / (2 * h)
    d = f.eval_derivative_array(z)
    err = float(np.max(np.abs(fd - d) / np.maximum(np.abs(d), 1.0)))
    if err > rel:
        raise ValueError(f"oracle {f.name}: derivative inconsistent (rel err {err:.3g})")
    return err


def _lattice(offset: float, order: int) -> Callable[[float], list]:
    def zeros(radius: float) -> list:
        kmax = int(math.ceil(radius / math.pi)) + 1
        out = []
        for k in range(-kmax, kmax + 1):
            x = (k + offset) * math.pi
            if abs(x) < radius:
                out.append((0j if x == 0 else complex(x), order))
        return out

    return zeros


def sin_squared() -> MeromorphicOracle:
    return MeromorphicOracle(
        "sin(z)^2", lambda z: np.sin(z) ** 2, lambda z: np.sin(2 * z), _lattice(0.0, 2), (2, 1.0 + 0j)
    )


def cos_squared() -> MeromorphicOracle:
    return MeromorphicOracle(
        "cos(z)^2", lambda z: np.cos(z) ** 2, lambda z: -np.sin(2 * z), _lattice(0.5, 2), (0, 1.0 + 0j)
    )


def constant_oracle(c: complex) -> MeromorphicOracle:
    c = complex(c)
    if c == 0:
        raise ValueError("zero coordinate")
    return MeromorphicOracle(
        f"{c.real:g}" if c.imag == 0 else str(c),
        lambda z: np.full(np.shape(z), c, dtype=complex),
        lambda z: np.zeros(np.shape(z), dtype=complex),
        lambda radius: [],
        (0, c),
    )


def sincos_triple() -> MeroTriple:
    """(sin^2 z : cos^2 z : -1), zeros of order 2 at k*pi and (k+1/2)*pi."""
    return MeroTriple(sin_squared(), cos_squared(), constant_oracle(-1))


# --------------------------------------------------------------------------- helpers


def _coords(P) -> tuple:
    return P.coords if isinstance(P, MeroTriple) else tuple(P)


def _is_zero(f) -> bool:
    return f.is_zero()


def _leading_abs2(coords) -> float | Fraction:
    """Sum of |f_m|^2 over coordinates whose order at 0 equals the minimum m."""
    data = [f.laurent_leading() for f in coords if not _is_zero(f)]
    m = min(n for n, _ in data)
    lead = [c for n, c in data if n == m]
    if all(isinstance(f, RationalFunction) for f in coords):
        return sum((c.abs2() for c in lead), Fraction(0))
    return math.fsum(abs(complex(c)) ** 2 for c in lead)


def _half_log_abs2(total) -> float:
    if isinstance(total, Fraction):
        return log_sqrt_abs2(total)
    return 0.5 * math.log(total)


def _check_singular_sites(P, rho: float, cfg: RunConfig, predicate) -> None:
    """Refuse radii where a site satisfying ``predicate(ords)`` is within the guard of the circle."""
    table = triple_site_table(P, rho, cfg.root_tol, cfg.cluster_tol)
    for x, ords, origin in table.entries:
        r = 0.0 if origin else abs(x)
        if abs(r - rho) <= cfg.guard(rho) and predicate(ords):
            raise SiteOnCircleError(x, rho)


def _height_singular(ords) -> bool:
    live = [o for o in ords if o is not None]
    return any(o < 0 for o in live) or all(o > 0 for o in live)


def _any_site(ords) -> bool:
    return True


def _quad_kw(cfg: RunConfig) -> dict:
    return {"tol": cfg.quad_tol, "n_max": cfg.max_quad_points}


def _half_log_sum_sq(logs: Sequence[np.ndarray]) -> np.ndarray:
    return 0.5 * np.logaddexp.reduce(2.0 * np.stack(logs), axis=0)


def _require_rho(rho: float, minimum: float = 1.0) -> None:
    if not rho >= minimum:
        raise ValueError(f"rho must be >= {minimum:g}, got {rho!r}")


# --------------------------------------------------------------------------- height


@dataclass(frozen=True)
class HeightBreakdown:
    rho: float
    nonarch: tuple  # of (ValuationSite, contribution)
    arch_integral: float
    h_inf: float
    total: float
    quad_error: float


def height(P, rho: float, cfg: RunConfig = DEFAULT) -> HeightBreakdown:
    """Height of a projective point (coordinates may include identically zero ones)."""
    _require_rho(rho)
    coords = _coords(P)
    live = [f for f in coords if not _is_zero(f)]
    if not live:
        raise ValueError("all coordinates vanish identically")
    _check_singular_sites(coords, rho, cfg, _height_singular)
    sites = triple_site_table(coords, rho, cfg.root_tol, cfg.cluster_tol).in_disk(rho)
    nonarch = []
    for s in sites:
        vals = [-o * s.degree for o in s.ords if o is not None]
        nonarch.append((s, max(vals)))

    def integrand(z):
        return _half_log_sum_sq([f.log_abs_array(z) for f in live])

    q = circle_mean_z(integrand, rho, **_quad_kw(cfg))
    h_inf = _half_log_abs2(_leading_abs2(live))
    total = math.fsum([v for _, v in nonarch] + [q.value, -h_inf])
    return HeightBreakdown(rho, tuple(nonarch), q.value, h_inf, total, q.error)


# --------------------------------------------------------------------------- Poisson-Jensen


def pj_residual(f, rho: float, cfg: RunConfig = DEFAULT) -> float:
    """sum_x v_x(f, rho) + mean log|f| - v_inf(f); zero up to quadrature error."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    if _is_zero(f):
        raise ValueError("Poisson-Jensen residual of the zero function")
    _check_singular_sites((f,), rho, cfg, _any_site)
    sites = triple_site_table((f,), rho, cfg.root_tol, cfg.cluster_tol).in_disk(rho)
    nonarch = [-s.ords[0] * s.degree for s in sites]
    q = circle_mean_z(f.log_abs_array, rho, **_quad_kw(cfg))
    v_inf = _half_log_abs2(_leading_abs2((f,)))
    return math.fsum(nonarch + [q.value, -v_inf])


# --------------------------------------------------------------------------- radicals


def incomplete_radical(P, rho: float, cfg: RunConfig = DEFAULT) -> tuple[float, list[ValuationSite]]:
    """Sum of degrees over sites where the coordinate orders are not all equal."""
    coords = _coords(P)
    if any(_is_zero(f) for f in coords):
        raise ValueError("zero coordinate: the incomplete radical is infinite")
    sites = [s for s in triple_site_table(coords, rho, cfg.root_tol, cfg.cluster_tol).in_disk(rho) if not s.all_equal()]
    return math.fsum(s.degree for s in sites), sites


@dataclass(frozen=True)
class ArchResult:
    value: float
    integral: float
    h_inf: float
    quad_error: float
    method: str


def _check_arch_bound(log_a: np.ndarray, log_b: np.ndarray, lhs: np.ndarray) -> None:
    rhs = LOG_SQRT2 + 0.5 * np.logaddexp(0.0, 2 * log_a) + 0.5 * np.logaddexp(0.0, 2 * log_b)
    ok = ~np.isfinite(lhs) | ~np.isfinite(rhs) | (lhs <= rhs + ARCH_BOUND_SLACK)
    if not np.all(ok):
        k = int(np.argmin(ok))
        raise ArchBoundViolation(f"archimedean bound violated at node {k}: {lhs[k]!r} > {rhs[k]!r}")


def _arch_split(P: MeroTriple, rho: float, cfg: RunConfig) -> ArchResult:
    """Exact rational route: clear denominators and common factors, Jensen for those, quadrature for the rest."""
    L = logder_triple(P).coords
    D = Polynomial((1,))
    for f in L:
        D = poly_lcm(D, f.den)
    N = [f.num * D.exact_div(f.den) for f in L]
    G = poly_gcd(poly_gcd(N[0], N[1]), N[2])
    Q = [n.exact_div(G) for n in N]

    def integrand(z):
        with np.errstate(divide="ignore"):
            logs = [np.log(np.abs(q.eval_array(z))) for q in Q]
            shift = np.log(np.abs(G.eval_array(z))) - np.log(np.abs(D.eval_array(z)))
        smooth = _half_log_sum_sq(logs)
        _check_arch_bound(logs[0] + shift, logs[1] + shift, smooth + shift)
        return smooth

    q = circle_mean_z(integrand, rho, **_quad_kw(cfg))
    integral = q.value + jensen_mean(G, rho) - jensen_mean(D, rho)
    h_inf = _half_log_abs2(_leading_abs2(L))
    return ArchResult(integral - h_inf, integral, h_inf, q.error, "split")


def _oracle_logder_values(P: MeroTriple, z: np.ndarray) -> list[np.ndarray]:
    a, b, c = P.coords
    ld = [f.eval_derivative_array(z) / f.eval_array(z) for f in (a, b, c)]
    return [ld[1] - ld[2], ld[2] - ld[0], ld[0] - ld[1]]


def _oracle_logder_leading(P: MeroTriple) -> float:
    """h_inf of the log-derivative triple from the coordinates' orders at 0."""
    n = [f.laurent_leading()[0] for f in P.coords]
    data = []
    zero = np.zeros(1, dtype=complex)
    for i, j in ((1, 2), (2, 0), (0, 1)):
        k = n[i] - n[j]
        if k != 0:
            data.append((-1, complex(k)))
            continue
        if n[i] != 0:
            raise NotImplementedError("Laurent data of the log-derivative triple is unavailable")
        fi, fj = P.coords[i], P.coords[j]
        v = complex((fi.eval_derivative_array(zero) / fi.eval_array(zero) - fj.eval_derivative_array(zero) / fj.eval_array(zero))[0])
        if abs(v) > 1e-14:
            data.append((0, v))
    if not data:
        raise NotImplementedError("log-derivative triple vanishes at 0 to unknown order")
    m = min(k for k, _ in data)
    return 0.5 * math.log(math.fsum(abs(c) ** 2 for k, c in data if k == m))


def _arch_direct(P: MeroTriple, rho: float, cfg: RunConfig) -> ArchResult:
    """Quadrature of the log-derivative triple as given; refuses radii near any site."""
    _check_singular_sites(P, rho, cfg, _any_site)
    if P.is_exact():
        L = logder_triple(P).coords
        values = lambda z: [f.eval_array(z) for f in L]
        h_inf = _half_log_abs2(_leading_abs2(L))
    else:
        values = lambda z: _oracle_logder_values(P, z)
        h_inf = _oracle_logder_leading(P)

    def integrand(z):
        with np.errstate(divide="ignore"):
            logs = [np.log(np.abs(v)) for v in values(z)]
        total = _half_log_sum_sq(logs)
        _check_arch_bound(logs[0], logs[1], total)
        return total

    q = circle_mean_z(integrand, rho, **_quad_kw(cfg))
    return ArchResult(q.value - h_inf, q.value, h_inf, q.error, "direct")


def archimedean_details(P: MeroTriple, rho: float, cfg: RunConfig = DEFAULT, method: str = "auto") -> ArchResult:
    if not P.nonconstant:
        raise ValueError("constant point")
    if rho <= 0:
        raise ValueError("rho must be positive")
    if method == "auto":
        method = "split" if P.is_exact() else "direct"
    if method == "split":
        return _arch_split(P, rho, cfg)
    if method == "direct":
        return _arch_direct(P, rho, cfg)
    raise ValueError(f"unknown method {method!r}")


def archimedean_radical(P: MeroTriple, rho: float, cfg: RunConfig = DEFAULT, method: str = "auto") -> float:
    """Circle mean of h_z on the log-derivative triple, minus its h_inf (may be negative)."""
    return archimedean_details(P, rho, cfg, method).value


def arch_proximity_bound(P: MeroTriple, rho: float, cfg: RunConfig = DEFAULT) -> float:
    """log sqrt 2 + m(A, rho) + m(B, rho) for the first two log-derivative coordinates.

    Upper bound for the circle integral part of the archimedean radical.
    """
    A, B, _ = logder_triple(P).coords
    return LOG_SQRT2 + proximity(A, rho, cfg) + proximity(B, rho, cfg)


# --------------------------------------------------------------------------- Formal ABC


@dataclass(frozen=True)
class SiteEntry:
    x: complex
    ords: tuple
    logder_ords: tuple | None
    degree: float
    r_x: float
    h_x_logder: float | None


@dataclass(frozen=True)
class AbcReport:
    rho: float
    h: float
    r_na: float
    r_arch: float
    r: float
    slack: float
    sites: tuple
    quad_error: float
    site_slack: float | None = None
    masked: bool = False

    def holds(self, tol: float = 1e-6) -> bool:
        return self.slack >= -tol

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "h": self.h,
            "r_na": self.r_na,
            "r_arch": self.r_arch,
            "r": self.r,
            "slack": self.slack,
            "masked": self.masked,
            "quad_error": self.quad_error,
            "site_slack": self.site_slack,
            "sites": [
                {
                    "x": [s.x.real, s.x.imag],
                    "ords": list(s.ords),
                    "logder_ords": None if s.logder_ords is None else list(s.logder_ords),
                    "degree": s.degree,
                    "r_x": s.r_x,
                    "h_x_logder": s.h_x_logder,
                }
                for s in self.sites
            ],
        }


def _site_ledger(P: MeroTriple, rho: float, cfg: RunConfig) -> tuple[tuple, float | None]:
    if P.is_exact():
        L = logder_triple(P).coords
        sites = site_table(P.coords + L, cfg.root_tol, cfg.cluster_tol).in_disk(rho)
        entries = []
        for s in sites:
            own, ld = s.ords[:3], s.ords[3:]
            r_x = 0.0 if len(set(own)) == 1 else s.degree
            h_ld = max(-o * s.degree for o in ld)
            entries.append(SiteEntry(s.x, own, ld, s.degree, r_x, h_ld))
        return tuple(entries), math.fsum(e.r_x - e.h_x_logder for e in entries)
    entries = []
    for s in triple_site_table(P, rho, cfg.root_tol, cfg.cluster_tol).in_disk(rho):
        unequal = not s.all_equal()
        entries.append(SiteEntry(s.x, s.ords, None, s.degree, s.degree if unequal else 0.0, s.degree if unequal else None))
    return tuple(entries), None


def formal_abc_report(P: MeroTriple, rho: float, cfg: RunConfig = DEFAULT, method: str = "auto") -> AbcReport:
    """h, r_na, r_arch and slack = r - h at radius rho >= 1."""
    _require_rho(rho)
    if not P.nonconstant:
        raise ValueError("constant point")
    h = height(P, rho, cfg)
    r_na, _ = incomplete_radical(P, rho, cfg)
    arch = archimedean_details(P, rho, cfg, method)
    r = r_na + arch.value
    ledger, site_slack = _site_ledger(P, rho, cfg)
    return AbcReport(rho, h.total, r_na, arch.value, r, r - h.total, ledger, h.quad_error + arch.quad_error, site_slack)


# --------------------------------------------------------------------------- proximity and the log-derivative lemma


def proximity(f, rho: float, cfg: RunConfig = DEFAULT) -> float:
    """Circle mean of log sqrt(1 + |f|^2)."""
    if _is_zero(f):
        return 0.0
    _check_singular_sites((f,), rho, cfg, lambda ords: ords[0] < 0)
    q = circle_mean_z(lambda z: 0.5 * np.logaddexp(0.0, 2.0 * f.log_abs_array(z)), rho, **_quad_kw(cfg))
    return q.value


@dataclass(frozen=True)
class LemmaMargin:
    m_value: float
    h_value: float
    margin: float


def logder_lemma_margin(f: RationalFunction, rho: float, cfg: RunConfig = DEFAULT) -> LemmaMargin:
    """m(f'/f, rho) against log h((f:1:0), rho); margin = m - log max(h, e)."""
    if f.is_constant():
        raise ValueError("constant function")
    m = proximity(log_derivative(f), rho, cfg)
    h = height((f, RationalFunction.constant(1), RationalFunction.constant(0)), rho, cfg).total
    return LemmaMargin(m, h, m - math.log(max(h, math.e)))


# --------------------------------------------------------------------------- rho scans


@dataclass(frozen=True)
class ScanRow:
    rho: float
    h: float
    r_na: float
    r_arch: float
    bound: float
    exceeds: bool
    masked: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ScanResult:
    rows: tuple
    exceptional_measure: float
    interval_length: float
    masked_count: int
    exceeding_count: int
    C: float

    @property
    def exceptional_fraction(self) -> float:
        return self.exceptional_measure / self.interval_length if self.interval_length > 0 else 0.0

    def summary(self) -> dict:
        return {
            "rows": len(self.rows),
            "interval_length": self.interval_length,
            "exceptional_measure": self.exceptional_measure,
            "exceptional_fraction": self.exceptional_fraction,
            "masked": self.masked_count,
            "exceeding": self.exceeding_count,
            "C": self.C,
        }


def lemma_bound(h: float, C: float) -> float:
    """2 log h~ + C log log h~ with h~ = max(h, e^2)."""
    ht = max(h, math.e ** 2)
    return 2 * math.log(ht) + C * math.log(math.log(ht))


MASKING_ERRORS = (SiteOnCircleError, QuadratureError, RootFindingError, NearPoleError, ArchBoundViolation)


def _scan_row(P: MeroTriple, rho: float, C: float, cfg: RunConfig) -> ScanRow:
    try:
        h = height(P, rho, cfg).total
        r_na, _ = incomplete_radical(P, rho, cfg)
        r_arch = archimedean_radical(P, rho, cfg)
    except MASKING_ERRORS:
        nan = math.nan
        return ScanRow(rho, nan, nan, nan, nan, False, True)
    bound = lemma_bound(h, C)
    return ScanRow(rho, h, r_na, r_arch, bound, r_arch > bound, False)


def scan_grid(rho_min: float, rho_max: float, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Grid radii and the length of the cell each one owns (cells tile [rho_min, rho_max])."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if rho_max < rho_min:
        raise ValueError("rho_max must be >= rho_min")
    if steps == 1:
        return np.array([rho_min]), np.array([rho_max - rho_min])
    rhos = np.linspace(rho_min, rho_max, steps)
    edges = np.concatenate(([rho_min], 0.5 * (rhos[1:] + rhos[:-1]), [rho_max]))
    return rhos, np.diff(edges)


def rho_scan(
    P: MeroTriple,
    rho_min: float,
    rho_max: float,
    steps: int,
    C: float = 10.0,
    cfg: RunConfig = DEFAULT,
    workers: int | None = None,
) -> ScanResult:
    """Per-radius h, r_na, r_arch against the log-derivative bound; masked radii count as exceptional."""
    _require_rho(rho_min)
    if not P.nonconstant:
        raise ValueError("constant point")
    rhos, cells = scan_grid(rho_min, rho_max, steps)
    workers = cfg.workers if workers is None else workers
    task = lambda rho: _scan_row(P, float(rho), C, cfg)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = tuple(pool.map(task, rhos))
    else:
        rows = tuple(task(r) for r in rhos)
    bad = [cell for row, cell in zip(rows, cells) if row.masked or row.exceeds]
    return ScanResult(
        rows,
        math.fsum(bad),
        float(rho_max - rho_min),
        sum(r.masked for r in rows),
        sum(r.exceeds for r in rows),
        C,
    )

"""Heights, radicals and the abc test for integer triples a + b + c = 0 over Q."""

from __future__ import annotations

import heapq
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce

import numpy as np

TRIAL_LIMIT = 10 ** 6
RHO_ITERATIONS = 2_000_000

# Miller-Rabin with these bases is deterministic for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class FactorizationError(ArithmeticError):
    def __init__(self, message: str, partial: dict, remaining: int):
        super().__init__(message)
        self.partial = partial
        self.remaining = remaining


@dataclass(frozen=True)
class IntTriple:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if 0 in (self.a, self.b, self.c):
            raise ValueError("zero entry")
        if self.a + self.b + self.c != 0:
            raise ValueError("sum nonzero")

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def __mul__(self, k: int) -> "IntTriple":
        return IntTriple(k * self.a, k * self.b, k * self.c)

    __rmul__ = __mul__

    def __str__(self):
        return f"{self.a},{self.b},{self.c}"


@dataclass(frozen=True)
class Factorization:
    pairs: tuple  # ((p, e), ...) with p increasing

    def __iter__(self):
        return iter(self.pairs)

    @property
    def primes(self) -> tuple:
        return tuple(p for p, _ in self.pairs)

    def value(self) -> int:
        return math.prod(p ** e for p, e in self.pairs)

    def ord(self, p: int) -> int:
        return dict(self.pairs).get(p, 0)


@lru_cache(maxsize=1)
def _small_primes() -> tuple:
    n = TRIAL_LIMIT
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    return tuple(i for i, v in enumerate(sieve) if v)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, which covers every 64-bit cofactor."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def pollard_rho(n: int, max_iter: int = RHO_ITERATIONS, seed: int = 1) -> int | None:
    """A nontrivial factor of composite n (Brent's cycle variant), or None on give-up."""
    if n % 2 == 0:
        return 2
    rng = random.Random(seed)
    spent = 0
    while spent < max_iter:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1 and spent < max_iter:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            spent += r
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def factorize(n: int, rho_iterations: int = RHO_ITERATIONS) -> Factorization:
    """Trial division to 10^6, then Pollard rho with Miller-Rabin on the cofactor."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    found: dict[int, int] = {}
    for p in _small_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found[p] = e
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m < TRIAL_LIMIT ** 2 or is_probable_prime(m):
            # below 10^12 the trial division above already proved m prime
            found[m] = found.get(m, 0) + 1
            continue
        d = pollard_rho(m, rho_iterations)
        if d is None:
            raise FactorizationError(f"factorization gave up on {m}", dict(found), m)
        stack.extend((d, m // d))
    return Factorization(tuple(sorted(found.items())))


def reduce_primitive(t: IntTriple) -> IntTriple:
    """Divide by the gcd and fix the sign so that at most one entry is negative."""
    g = reduce(math.gcd, (abs(x) for x in t))
    a, b, c = (x // g for x in t)
    if sum(x < 0 for x in (a, b, c)) >= 2:
        a, b, c = -a, -b, -c
    return IntTriple(a, b, c)


def _vp(x: int, p: int) -> int:
    x, k = abs(x), 0
    while x % p == 0:
        x //= p
        k += 1
    return k


def height_q(t: IntTriple) -> float:
    """sum_p max_i(-ord_p(x_i) log p) + (1/2) log(a^2 + b^2 + c^2)."""
    primes = set()
    for x in t:
        primes.update(factorize(abs(x)).primes)
    terms = [max(-_vp(x, p) for x in t) * math.log(p) for p in sorted(primes)]
    terms.append(0.5 * math.log(t.a * t.a + t.b * t.b + t.c * t.c))
    return math.fsum(terms)


def radical(t: IntTriple) -> int:
    """rad(|abc|) of the primitive representative."""
    primes = set()
    for x in reduce_primitive(t):
        primes.update(factorize(abs(x)).primes)
    return math.prod(primes)


def radical_log(t: IntTriple) -> float:
    primes = set()
    for x in reduce_primitive(t):
        primes.update(factorize(abs(x)).primes)
    return math.fsum(math.log(p) for p in primes)


def product_formula_residual(x) -> float:
    """sum_p v_p(x) + log|x| with v_p(x) = -ord_p(x) log p."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("x must be nonzero")
    terms = [-e * math.log(p) for p, e in factorize(abs(x.numerator))]
    terms += [e * math.log(p) for p, e in factorize(x.denominator)]
    terms += [math.log(abs(x.numerator)), -math.log(x.denominator)]
    return math.fsum(terms)


@dataclass(frozen=True)
class NtReport:
    triple: IntTriple
    h: float
    r_na: float
    psi: float
    margin: float
    holds: bool
    quality_paper: float
    quality_classical: float

    def to_dict(self) -> dict:
        return {
            "triple": [self.triple.a, self.triple.b, self.triple.c],
            "h": self.h,
            "r_na": self.r_na,
            "psi": self.psi,
            "margin": self.margin,
            "holds": self.holds,
            "quality_paper": self.quality_paper,
            "quality_classical": self.quality_classical,
        }


def psi(h: float) -> float:
    return 4.0 * math.sqrt(h)


def quality(t: IntTriple) -> tuple[float, float]:
    """(h / r_na, log max|x| / r_na) on the primitive representative."""
    p = reduce_primitive(t)
    r = radical_log(p)
    if r == 0:
        raise ValueError("radical is 1; quality undefined")
    return height_q(p) / r, math.log(max(abs(x) for x in p)) / r


def abc_check(t: IntTriple) -> NtReport:
    p = reduce_primitive(t)
    h = height_q(p)
    r = radical_log(p)
    s = psi(h)
    margin = r + s - h
    return NtReport(p, h, r, s, margin, margin >= 0, h / r, math.log(max(abs(x) for x in p)) / r)


# --------------------------------------------------------------------------- enumeration


def radical_table(n: int) -> np.ndarray:
    """rad(k) for 0 <= k <= n by a sieve over primes."""
    rad = np.ones(n + 1, dtype=np.int64)
    is_comp = np.zeros(n + 1, dtype=bool)
    for p in range(2, n + 1):
        if not is_comp[p]:
            is_comp[2 * p :: p] = True
            rad[p::p] *= p
    return rad


def _scan_chunk(args) -> tuple[list, list, int]:
    c_lo, c_hi, top = args
    rad = radical_table(c_hi)
    best: list = []
    violations = []
    count = 0
    for c in range(max(c_lo, 2), c_hi + 1):
        a = np.arange(1, c // 2 + 1, dtype=np.int64)
        a = a[np.gcd(a, c) == 1]
        b = c - a
        count += len(a)
        logr = np.log((rad[a] * rad[b] * rad[c]).astype(float))
        h = 0.5 * np.log(a.astype(float) ** 2 + b.astype(float) ** 2 + float(c) ** 2)
        margin = logr + 4.0 * np.sqrt(h) - h
        for k in np.nonzero(margin < 0)[0]:
            violations.append((int(a[k]), int(b[k]), -c))
        q = math.log(c) / logr
        for idx in np.lexsort((a, -q))[:top]:
            item = (float(q[idx]), -int(a[idx]), -int(b[idx]))
            if len(best) < top:
                heapq.heappush(best, item)
            else:
                heapq.heappushpop(best, item)
    return best, violations, count


@dataclass(frozen=True)
class ScanReport:
    N: int
    top: tuple  # NtReport, by decreasing classical quality
    violations: tuple  # NtReport for every psi-test failure
    count: int


def enumerate_scan(N: int, top: int = 10, workers: int = 1) -> ScanReport:
    """All primitive 0 < a <= b, c = a + b <= N as (a, b, -c): best qualities and psi-test failures."""
    if N < 2:
        raise ValueError("N must be >= 2")
    if top < 1:
        raise ValueError("top must be >= 1")
    # row cost grows like c, so split on c^2
    parts = max(1, workers * 4)
    bounds = sorted({int(round(N * math.sqrt(k / parts))) for k in range(parts + 1)} | {1, N})
    chunks = [(lo + 1, hi, top) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_scan_chunk, chunks))
    else:
        results = [_scan_chunk(ch) for ch in chunks]
    merged = sorted((item for best, _, _ in results for item in best), reverse=True)[:top]
    violations = sorted(v for _, vs, _ in results for v in vs)
    tops = tuple(abc_check(IntTriple(-na, -nb, na + nb)) for _, na, nb in merged)
    return ScanReport(
        N,
        tops,
        tuple(abc_check(IntTriple(*v)) for v in violations),
        sum(n for _, _, n in results),
    )

"""Exact polynomials and rational functions over the Gaussian rationals.

Everything here is exact; floats appear only in the ``eval_array`` /
``evaluate`` boundary used by the circle quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


class GaussianRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(value, 0)

    def __add__(self, other):
        o = _gr(other)
        return _make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _gr(other)
        return _make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return _gr(other) - self

    def __mul__(self, other):
        o = _gr(other)
        if not o.im:
            return _make(self.re * o.re, self.im * o.re)
        return _make(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _gr(other)
        if not o.im:
            if not o.re:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return _make(self.re / o.re, self.im / o.re)
        n = o.abs2()
        return _make((self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        return _gr(other) / self

    def __neg__(self):
        return _make(-self.re, -self.im)

    def __pow__(self, k: int):
        if k < 0:
            return (_ONE / self) ** (-k)
        out = _ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            o = _gr(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussianRational":
        return _make(self.re, -self.im)

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        re, im = self.re, self.im
        if not im:
            return str(re)
        im_txt = ("" if abs(im) == 1 else str(abs(im))) + "i"
        if not re:
            return ("-" if im < 0 else "") + im_txt
        return f"{re}{'-' if im < 0 else '+'}{im_txt}"


def _make(re: Fraction, im: Fraction) -> GaussianRational:
    g = object.__new__(GaussianRational)
    g.re = re
    g.im = im
    return g


def _gr(value) -> GaussianRational:
    if type(value) is GaussianRational:
        return value
    if isinstance(value, (int, Fraction)):
        return _make(Fraction(value), Fraction(0))
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, complex):
        return GaussianRational.coerce(value)
    raise TypeError(f"cannot use {type(value).__name__} as a Gaussian rational")


_ZERO = _make(Fraction(0), Fraction(0))
_ONE = _make(Fraction(1), Fraction(0))
I = _make(Fraction(0), Fraction(1))


class Polynomial:
    """Dense univariate polynomial, coefficients lowest degree first."""

    __slots__ = ("coeffs", "_complex")

    def __init__(self, coeffs: Iterable = ()):
        cs = [_gr(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs: tuple[GaussianRational, ...] = tuple(cs)
        self._complex = None

    @classmethod
    def z(cls) -> "Polynomial":
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1) -> "Polynomial":
        p = cls.constant(lead)
        for r in roots:
            p = p * cls((-_gr(r), 1))
        return p

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> GaussianRational:
        return self.coeffs[-1] if self.coeffs else _ZERO

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        a, b = self.coeffs, _poly(other).coeffs
        if len(a) < len(b):
            a, b = b, a
        return Polynomial([x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_poly(other))

    def __rsub__(self, other):
        return _poly(other) - self

    def __mul__(self, other):
        a, b = self.coeffs, _poly(other).coeffs
        if not a or not b:
            return Polynomial()
        out = [_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative polynomial power")
        out = Polynomial((1,))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "Polynomial":
        c = _gr(c)
        return Polynomial([x * c for x in self.coeffs])

    def monic(self) -> "Polynomial":
        if not self.coeffs:
            return self
        return self.scale(_ONE / self.lead)

    def __divmod__(self, other):
        d = _poly(other)
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = d.degree
        if len(rem) <= dd:
            return Polynomial(), self
        inv_lead = _ONE / d.lead
        quo = [_ZERO] * (len(rem) - dd)
        for k in range(len(rem) - dd - 1, -1, -1):
            q = rem[k + dd] * inv_lead
            quo[k] = q
            if q:
                for j, c in enumerate(d.coeffs):
                    rem[k + j] = rem[k + j] - q * c
        return Polynomial(quo), Polynomial(rem[:dd])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "Polynomial":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def derivative(self) -> "Polynomial":
        return Polynomial([c * k for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, x) -> GaussianRational:
        x = _gr(x)
        acc = _ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def trailing_order(self) -> int:
        """Multiplicity of the root at 0 (power of z dividing self)."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        raise ValueError("zero polynomial has no trailing order")

    def shift_down(self, k: int) -> "Polynomial":
        return Polynomial(self.coeffs[k:])

    def complex_coeffs(self) -> np.ndarray:
        """Coefficients as complex floats, lowest degree first."""
        if self._complex is None:
            self._complex = np.array([complex(c) for c in self.coeffs], dtype=complex)
        return self._complex

    def eval_array(self, z) -> np.ndarray:
        cs = self.complex_coeffs()
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for c in cs[::-1]:
            acc = acc * z + c
        return acc

    def abs_bound_array(self, z) -> np.ndarray:
        """sum_k |c_k| |z|^k, the scale against which Horner cancellation is judged."""
        r = np.abs(np.asarray(z, dtype=complex))
        acc = np.zeros_like(r)
        for c in np.abs(self.complex_coeffs())[::-1]:
            acc = acc * r + c
        return acc

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        return format_polynomial(self)


def _poly(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    return Polynomial((value,))


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic gcd (zero only when both inputs are zero)."""
    while not q.is_zero():
        p, q = q, (p % q).monic()
    return p.monic()


def poly_lcm(p: Polynomial, q: Polynomial) -> Polynomial:
    if p.is_zero() or q.is_zero():
        return Polynomial()
    return (p * q.exact_div(poly_gcd(p, q))).monic()


def squarefree_decomposition(p: Polynomial) -> list[tuple[Polynomial, int]]:
    """Yun's algorithm: monic p = prod q_k**k with q_k square-free, pairwise coprime.

    Only factors of positive degree are returned.
    """
    if p.is_zero():
        raise ValueError("square-free decomposition of the zero polynomial")
    f = p.monic()
    if f.degree < 1:
        return []
    df = f.derivative()
    a0 = poly_gcd(f, df)
    b = f.exact_div(a0)
    c = df.exact_div(a0)
    d = c - b.derivative()
    out = []
    k = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            out.append((a, k))
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        k += 1
    return out


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    terms = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if not c:
            continue
        mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
        if c.re and c.im:
            coef = f"({c})"
            sign = "+"
        else:
            neg = (c.re < 0) if c.re else (c.im < 0)
            sign = "-" if neg else "+"
            coef = str(-c if neg else c)
            if coef == "1" and mono:
                coef = ""
        body = coef + ("*" if coef and mono else "") + mono
        terms.append((sign, body))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


class RationalFunction:
    """num/den in lowest terms with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1, *, normalized: bool = False):
        num, den = _poly(num), _poly(den)
        if not normalized:
            num, den = _normalize_pair(num, den)
        self.num: Polynomial = num
        self.den: Polynomial = den

    @classmethod
    def z(cls) -> "RationalFunction":
        return cls(Polynomial.z(), normalized=True)

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls(Polynomial.constant(c), Polynomial((1,)), normalized=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self == RationalFunction.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        o = _rf(other)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, normalized=True)

    def __sub__(self, other):
        return self + (-_rf(other))

    def __rsub__(self, other):
        return _rf(other) - self

    def __mul__(self, other):
        o = _rf(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _rf(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return _rf(other) / self

    def __pow__(self, k: int):
        if k >= 0:
            return RationalFunction(self.num ** k, self.den ** k)
        if self.is_zero():
            raise ZeroDivisionError("negative power of the zero function")
        return RationalFunction(self.den ** -k, self.num ** -k)

    def derivative(self) -> "RationalFunction":
        return derivative(self)

    def log_derivative(self) -> "RationalFunction":
        return log_derivative(self)

    def ord_at(self, x) -> int:
        return ord_at(self, x)

    def laurent_leading(self) -> tuple[int, GaussianRational]:
        return laurent_leading(self)

    def __call__(self, x) -> GaussianRational:
        d = self.den(x)
        if not d:
            raise ZeroDivisionError("pole of the rational function")
        return self.num(x) / d

    def eval_array(self, z) -> np.ndarray:
        return self.num.eval_array(z) / self.den.eval_array(z)

    def log_abs_array(self, z) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.num.eval_array(z))) - np.log(np.abs(self.den.eval_array(z)))

    def eval_derivative_array(self, z) -> np.ndarray:
        return derivative(self).eval_array(z)

    def evaluate(self, z: complex, guard: float = 1e-12) -> complex:
        """Floating evaluation; refuses points where the denominator cancels to noise."""
        d = complex(self.den.eval_array(np.array([z]))[0])
        scale = float(self.den.abs_bound_array(np.array([z]))[0])
        if abs(d) <= guard * scale:
            raise NearPoleError(f"near-pole evaluation at z={z!r} (|den|={abs(d):.3g})")
        return complex(self.num.eval_array(np.array([z]))[0]) / d

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        if self.den.degree == 0:
            return format_polynomial(self.num)
        return f"({format_polynomial(self.num)})/({format_polynomial(self.den)})"


class NearPoleError(ArithmeticError):
    pass


def _rf(value) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    return RationalFunction.constant(value)


def _normalize_pair(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if den.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if num.is_zero():
        return Polynomial(), Polynomial((1,))
    if den.degree > 0:
        g = poly_gcd(num, den)
        if g.degree > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
    lead = den.lead
    if lead != _ONE:
        inv = _ONE / lead
        num, den = num.scale(inv), den.scale(inv)
    return num, den


def normalize(num: Polynomial, den: Polynomial) -> RationalFunction:
    """Lowest terms with monic denominator."""
    return RationalFunction(num, den)


def derivative(f: RationalFunction) -> RationalFunction:
    if f.den.degree == 0:
        return RationalFunction(f.num.derivative(), f.den, normalized=True)
    return RationalFunction(f.num.derivative() * f.den - f.num * f.den.derivative(), f.den * f.den)


def log_derivative(f: RationalFunction) -> RationalFunction:
    if f.is_zero():
        raise ValueError("logarithmic derivative of the zero function")
    return RationalFunction(f.num.derivative() * f.den - f.num * f.den.derivative(), f.num * f.den)


def ord_at(f: RationalFunction, x) -> int:
    """Order of vanishing at an exact point (negative at poles)."""
    if f.is_zero():
        raise ValueError("order of the zero function is undefined")
    lin = Polynomial((-_gr(x), 1))

    def mult(p: Polynomial) -> int:
        k = 0
        while True:
            q, r = divmod(p, lin)
            if not r.is_zero():
                return k
            p, k = q, k + 1

    return mult(f.num) - mult(f.den)


def laurent_leading(f: RationalFunction) -> tuple[int, GaussianRational]:
    """(n, f_n) with n = ord(f, 0) and f_n = lim f(z) z^-n."""
    if f.is_zero():
        raise ValueError("Laurent data of the zero function is undefined")
    kn = f.num.trailing_order()
    kd = f.den.trailing_order()
    return kn - kd, f.num.coeffs[kn] / f.den.coeffs[kd]


@dataclass(frozen=True)
class MeroTriple:
    """Projective point (a:b:c) on the line a+b+c=0.

    Coordinates are RationalFunction instances or meromorphic oracles (any
    object with ``eval_array``/``eval_derivative_array``/``zeros_poles``/
    ``laurent_leading``).
    """

    a: object
    b: object
    c: object
    nonconstant: bool = field(init=False)

    def __post_init__(self):
        coords = (self.a, self.b, self.c)
        if self.is_exact():
            if any(f.is_zero() for f in coords):
                raise ValueError("zero coordinate")
            if not (self.a + self.b + self.c).is_zero():
                raise ValueError("sum nonzero")
            nc = is_nonconstant(self)
        else:
            _check_oracle_sum(coords)
            nc = True
        object.__setattr__(self, "nonconstant", nc)

    @property
    def coords(self) -> tuple:
        return (self.a, self.b, self.c)

    def is_exact(self) -> bool:
        return all(isinstance(f, RationalFunction) for f in self.coords)

    def scaled(self, lam: RationalFunction) -> "MeroTriple":
        if not self.is_exact():
            raise TypeError("scaling is only supported for exact triples")
        return MeroTriple(self.a * lam, self.b * lam, self.c * lam)

    def __str__(self):
        return f"({self.a} : {self.b} : {self.c})"


def _check_oracle_sum(coords, samples: int = 7) -> None:
    rng = np.random.default_rng(20080512)
    z = rng.uniform(0.3, 1.7, samples) * np.exp(1j * rng.uniform(0, 2 * np.pi, samples))
    vals = [np.asarray(f.eval_array(z), dtype=complex) for f in coords]
    total = vals[0] + vals[1] + vals[2]
    scale = np.abs(vals[0]) + np.abs(vals[1]) + np.abs(vals[2])
    if np.any(np.abs(total) > 1e-9 * np.maximum(scale, 1.0)):
        raise ValueError("sum nonzero")


def _require_exact(P: MeroTriple) -> None:
    if not P.is_exact():
        raise TypeError("operation requires an exact rational triple")


def is_nonconstant(P: MeroTriple) -> bool:
    _require_exact(P)
    a, b, c = P.coords
    return not all((x / y).is_constant() for x, y in ((a, b), (b, c), (c, a)))


def _exact_coords(P) -> tuple:
    if isinstance(P, MeroTriple):
        _require_exact(P)
        return P.coords
    coords = tuple(P)
    if len(coords) != 3 or not all(isinstance(f, RationalFunction) for f in coords):
        raise TypeError("expected three exact rational functions")
    return coords


def projective_equal(P, Q) -> bool:
    """Cross-product test; P and Q are exact triples or plain 3-tuples of rational functions."""
    a1, b1, c1 = _exact_coords(P)
    a2, b2, c2 = _exact_coords(Q)
    return all(
        (x1 * y2 - y1 * x2).is_zero()
        for x1, y1, x2, y2 in ((a1, b1, a2, b2), (b1, c1, b2, c2), (a1, c1, a2, c2))
    )


def logder_triple(P: MeroTriple) -> MeroTriple:
    """((b/c)'/(b/c), (c/a)'/(c/a), (a/b)'/(a/b)), computed exactly."""
    _require_exact(P)
    if not P.nonconstant:
        raise ValueError("constant point")
    a, b, c = P.coords
    return MeroTriple(log_derivative(b / c), log_derivative(c / a), log_derivative(a / b))


def exact_leading_abs2(coeffs: Sequence[GaussianRational]) -> Fraction:
    return sum((c.abs2() for c in coeffs), Fraction(0))


def log_sqrt_abs2(total: Fraction) -> float:
    """log sqrt(total) for an exact nonnegative rational, safe for huge parts."""
    return 0.5 * (math.log(total.numerator) - math.log(total.denominator))

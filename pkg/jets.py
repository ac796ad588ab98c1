"""
Jets - truncated power series in z, z̄ with Gaussian-rational coefficients
=========================================================================

A Jet is a sparse polynomial in z1..zd, zb1..zbd (sympy PolyElement over
QQ_I) together with the order up to which its coefficients are valid.
Differentiation lowers the valid order by one, sums and products take the
minimum, and anything past the valid order is dropped. Evaluating a jet
whose valid order went negative raises TruncationError instead of
returning a silently wrong value.

A second flavour of JetSpace uses real generators x1..xd, y1..yd for the
realified metric.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from operator import add
from typing import Optional, Sequence, Union

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.rings import PolyElement, ring

GaussianRational = type(QQ_I.one)
Scalar = Union[int, Fraction, GaussianRational]


class TruncationError(ValueError):
    """A value was requested beyond the valid order of a jet."""

    def __init__(self, required_order: int, message: Optional[str] = None):
        self.required_order = required_order
        super().__init__(message or f"truncation order too low: need N >= {required_order}")


# ═══════════════════════════════════════════════════════════════════
# GAUSSIAN RATIONALS
# ═══════════════════════════════════════════════════════════════════


def gaussian(re: Union[int, Fraction] = 0, im: Union[int, Fraction] = 0) -> GaussianRational:
    re, im = Fraction(re), Fraction(im)
    return QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator))


def to_scalar(c: Scalar) -> GaussianRational:
    if isinstance(c, GaussianRational):
        return c
    if isinstance(c, (int, Fraction)):
        return gaussian(c)
    raise TypeError(f"cannot use {type(c).__name__} as a jet coefficient")


def real_part(c: GaussianRational) -> Fraction:
    return Fraction(int(c.x.numerator), int(c.x.denominator))


def imag_part(c: GaussianRational) -> Fraction:
    return Fraction(int(c.y.numerator), int(c.y.denominator))


def conjugate(c: GaussianRational) -> GaussianRational:
    return c.new(c.x, -c.y)


def format_gaussian(c: GaussianRational) -> str:
    re, im = real_part(c), imag_part(c)

    def fmt(x: Fraction) -> str:
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    if im == 0:
        return fmt(re)
    if re == 0:
        return f"{fmt(im)}i"
    sign = "-" if im < 0 else "+"
    return f"{fmt(re)} {sign} {fmt(abs(im))}i"


# ═══════════════════════════════════════════════════════════════════
# JET SPACE
# ═══════════════════════════════════════════════════════════════════


class JetSpace:
    """Ring of jets in dimension d truncated at total degree `order`.

    Complex spaces have generators z1..zd, zb1..zbd; real spaces have
    x1..xd, y1..yd. Exponent tuples list the first d generators first.
    """

    def __init__(self, d: int, order: int, real: bool = False):
        if d < 1:
            raise ValueError(f"dimension must be >= 1, got {d}")
        self.d = d
        self.order = order
        self.real = real
        first, second = ("x", "y") if real else ("z", "zb")
        names = [f"{first}{i}" for i in range(1, d + 1)] + [f"{second}{i}" for i in range(1, d + 1)]
        self.ring, *self.gens = ring(",".join(names), QQ_I)

    @property
    def nvars(self) -> int:
        return 2 * self.d

    def jet(self, poly: PolyElement, order: Optional[int] = None) -> "Jet":
        return Jet(self, poly, self.order if order is None else order)

    def constant(self, c: Scalar) -> "Jet":
        return self.jet(self.ring.ground_new(to_scalar(c)))

    def zero(self) -> "Jet":
        return self.jet(self.ring.zero)

    def one(self) -> "Jet":
        return self.jet(self.ring.one)

    def variable(self, i: int) -> "Jet":
        return self.jet(self.gens[i])

    def from_terms(self, terms: dict[tuple[int, ...], Scalar], order: Optional[int] = None) -> "Jet":
        return self.jet(self.ring.from_dict({m: to_scalar(c) for m, c in terms.items()}), order)

    def monomial(self, alpha: Sequence[int], beta: Sequence[int]) -> tuple[int, ...]:
        if len(alpha) != self.d or len(beta) != self.d:
            raise ValueError(f"multi-indices must have length {self.d}")
        return tuple(alpha) + tuple(beta)

    def __repr__(self) -> str:
        return f"JetSpace(d={self.d}, order={self.order}, real={self.real})"


def _truncate(poly: PolyElement, order: int) -> PolyElement:
    if order < 0:
        return poly.ring.zero
    if all(sum(m) <= order for m in poly.keys()):
        return poly
    return poly.ring.from_dict({m: c for m, c in poly.items() if sum(m) <= order})


def _by_degree(poly: PolyElement) -> list[tuple[int, tuple[int, ...], GaussianRational]]:
    return sorted(((sum(m), m, c) for m, c in poly.items()), key=lambda t: t[0])


def truncated_product(a: PolyElement, b: PolyElement, order: int) -> PolyElement:
    """a·b keeping only monomials of total degree <= order."""
    if order < 0 or not a or not b:
        return a.ring.zero
    terms: dict[tuple[int, ...], GaussianRational] = {}
    right = _by_degree(b)
    for da, ma, ca in _by_degree(a):
        room = order - da
        if room < 0:
            break
        for db, mb, cb in right:
            if db > room:
                break
            m = tuple(map(add, ma, mb))
            prev = terms.get(m)
            terms[m] = ca * cb if prev is None else prev + ca * cb
    return a.ring.from_dict(terms)


# ═══════════════════════════════════════════════════════════════════
# JET
# ═══════════════════════════════════════════════════════════════════


class Jet:
    __slots__ = ("space", "poly", "order")

    def __init__(self, space: JetSpace, poly: PolyElement, order: int):
        self.space = space
        self.order = order
        self.poly = _truncate(poly, order)

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ValueError("jets from different spaces")
            return other
        return self.space.jet(self.space.ring.ground_new(to_scalar(other)))

    def __add__(self, other) -> "Jet":
        other = self._coerce(other)
        return Jet(self.space, self.poly + other.poly, min(self.order, other.order))

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        other = self._coerce(other)
        return Jet(self.space, self.poly - other.poly, min(self.order, other.order))

    def __rsub__(self, other) -> "Jet":
        return self._coerce(other) - self

    def __neg__(self) -> "Jet":
        return Jet(self.space, -self.poly, self.order)

    def __mul__(self, other) -> "Jet":
        if isinstance(other, Jet):
            other = self._coerce(other)
            order = min(self.order, other.order)
            return Jet(self.space, truncated_product(self.poly, other.poly, order), order)
        return Jet(self.space, self.poly * to_scalar(other), self.order)

    __rmul__ = __mul__

    def diff(self, var: int) -> "Jet":
        """∂ by generator `var` (0..d−1 unbarred / x, d..2d−1 barred / y)."""
        return Jet(self.space, self.poly.diff(var), self.order - 1)

    def dz(self, i: int) -> "Jet":
        return self.diff(i)

    def dzb(self, i: int) -> "Jet":
        return self.diff(self.space.d + i)

    def partial(self, unbarred: Sequence[int] = (), barred: Sequence[int] = ()) -> "Jet":
        out = self
        for i in unbarred:
            out = out.dz(i)
        for i in barred:
            out = out.dzb(i)
        return out

    def truncated(self, order: int) -> "Jet":
        return Jet(self.space, self.poly, min(order, self.order))

    def coeff(self, monom: Sequence[int]) -> GaussianRational:
        if sum(monom) > self.order:
            raise TruncationError(self.space.order + sum(monom) - self.order)
        return self.poly.get(tuple(monom), QQ_I.zero)

    def taylor(self, unbarred: Sequence[int], barred: Sequence[int]) -> GaussianRational:
        """(∂_{z_I} ∂_{z̄_J} f)(0) for index lists I, J (repeats allowed)."""
        d = self.space.d
        alpha = [0] * d
        beta = [0] * d
        for i in unbarred:
            alpha[i] += 1
        for j in barred:
            beta[j] += 1
        scale = math.prod(math.factorial(k) for k in itertools.chain(alpha, beta))
        return self.coeff(alpha + beta) * scale

    def at_origin(self) -> GaussianRational:
        if self.order < 0:
            raise TruncationError(self.space.order - self.order)
        return self.poly.get(self.space.ring.zero_monom, QQ_I.zero)

    def conjugate(self) -> "Jet":
        d = self.space.d
        swapped = {m[d:] + m[:d]: conjugate(c) for m, c in self.poly.items()}
        return Jet(self.space, self.space.ring.from_dict(swapped), self.order)

    def is_real(self) -> bool:
        return self.poly == self.conjugate().poly

    def is_zero(self) -> bool:
        return not self.poly

    def __eq__(self, other) -> bool:
        if not isinstance(other, Jet):
            return NotImplemented
        order = min(self.order, other.order)
        return _truncate(self.poly, order) == _truncate(other.poly, order)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Jet({self.poly}, order={self.order})"


# ═══════════════════════════════════════════════════════════════════
# MATRICES OF JETS
# ═══════════════════════════════════════════════════════════════════

JetMatrix = list[list[Jet]]


def matmul(a: JetMatrix, b: JetMatrix) -> JetMatrix:
    n, m, p = len(a), len(b), len(b[0])
    return [[sum((a[i][k] * b[k][j] for k in range(1, m)), a[i][0] * b[0][j]) for j in range(p)] for i in range(n)]


def inverse_near_identity(matrix: JetMatrix, scale: Scalar = 1, order: Optional[int] = None) -> JetMatrix:
    """Inverse of scale·(I + H) with H(0) = 0, by the Neumann series in H.

    Entries of H have no constant term, so H^k starts at degree k and the
    series stops once k passes the requested order.
    """
    n = len(matrix)
    space = matrix[0][0].space
    scale = to_scalar(scale)
    inv_scale = QQ_I.one / scale
    order = min(min(e.order for row in matrix for e in row), space.order) if order is None else order
    h = [[(matrix[i][j] * inv_scale - (1 if i == j else 0)).truncated(order) for j in range(n)] for i in range(n)]
    for row in h:
        for e in row:
            if e.at_origin():
                raise ValueError("matrix is not scale·(identity + higher order terms)")
    identity = [[space.constant(1 if i == j else 0).truncated(order) for j in range(n)] for i in range(n)]
    result = [row[:] for row in identity]
    power = identity
    for k in range(1, order + 1):
        power = matmul(power, h)
        if all(e.is_zero() for row in power for e in row):
            break
        sign = -1 if k % 2 else 1
        result = [[result[i][j] + power[i][j] * sign for j in range(n)] for i in range(n)]
    return [[e * inv_scale for e in row] for row in result]

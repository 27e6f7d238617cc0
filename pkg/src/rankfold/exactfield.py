"""Exact arithmetic in multiquadratic towers over the rationals.

A tower is described by nonzero rationals a_1, ..., a_m and represents
L = Q(sqrt(a_1), ..., sqrt(a_m)).  Writing alpha_i = sqrt(a_i), the
basis of L over Q is built recursively,

    B_0 = (1),    B_i = B_{i-1} followed by B_{i-1} * alpha_i,

so the basis monomial at index j is the product of the alpha_i whose bit
(i-1) is set in j.  Elements store the 2^m rational coordinates in that
order.  Every generator must stay a non-square as the tower grows
(otherwise the extension degree collapses and the coordinates stop
being unique); this is checked at construction time.

All arithmetic is exact, backed by fractions.Fraction.  Elements are
immutable, so they can be shared freely between threads and processes.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

from .errors import DegreeCollapse, FieldMismatch, TowerHeightZero

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def parse_rational(text: str) -> Fraction:
    """Parse "p" or "p/q" into an exact rational."""
    return Fraction(text)


def format_rational(x: Fraction) -> str:
    return str(x)


def is_rational_square(c: Fraction) -> bool:
    """True iff c is the square of a rational."""
    if c < 0:
        return False
    n, d = c.numerator, c.denominator
    rn, rd = isqrt(n), isqrt(d)
    return rn * rn == n and rd * rd == d


class RationalField:
    """Field handle for plain rationals, usable with the exact matrix layer."""

    zero = _ZERO
    one = _ONE

    def coerce(self, x):
        if isinstance(x, (Fraction, int)):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into Q")

    def element_to_json(self, x):
        return str(x)

    def element_from_json(self, data):
        return Fraction(data)

    def to_json(self):
        return {"rationals": True}

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


QQ = RationalField()


# ---------------------------------------------------------------------------
# coordinate-level arithmetic (lists of Fractions, length 2^len(gens))

def _add(x, y):
    return [u + v for u, v in zip(x, y)]


def _neg(x):
    return [-u for u in x]


def _scale(c, x):
    return [c * u for u in x]


def _mul(x, y, gens):
    # Recursive multiplication over the top split x = x0 + x1*alpha.  The
    # schoolbook four-product recursion is used, skipping sub-products whose
    # operand half is identically zero; generator and parity-check entries
    # are single basis monomials, for which this prunes to O(m) work.
    if not gens:
        return [x[0] * y[0]]
    h = len(x) // 2
    sub = gens[:-1]
    a = gens[-1]
    x0, x1, y0, y1 = x[:h], x[h:], y[:h], y[h:]
    nx0, nx1, ny0, ny1 = any(x0), any(x1), any(y0), any(y1)
    lo = hi = None
    if nx0 and ny0:
        lo = _mul(x0, y0, sub)
    if nx1 and ny1:
        p = _scale(a, _mul(x1, y1, sub))
        lo = p if lo is None else _add(lo, p)
    if nx0 and ny1:
        hi = _mul(x0, y1, sub)
    if nx1 and ny0:
        p = _mul(x1, y0, sub)
        hi = p if hi is None else _add(hi, p)
    if lo is None:
        lo = [_ZERO] * h
    if hi is None:
        hi = [_ZERO] * h
    return lo + hi


def _inv(x, gens):
    # (x0 + x1*alpha)^-1 = (x0 - x1*alpha) / (x0^2 - a*x1^2); the norm factor
    # is invertible in the subtower because the tower degree is exact.
    if not gens:
        if x[0] == 0:
            raise ZeroDivisionError("inverse of zero")
        return [_ONE / x[0]]
    h = len(x) // 2
    sub = gens[:-1]
    a = gens[-1]
    x0, x1 = x[:h], x[h:]
    if not any(x1):
        return _inv(x0, sub) + [_ZERO] * h
    if not any(x0):
        return [_ZERO] * h + [c / a for c in _inv(x1, sub)]
    d = _add(_mul(x0, x0, sub), _scale(-a, _mul(x1, x1, sub)))
    di = _inv(d, sub)
    return _mul(x0, di, sub) + _neg(_mul(x1, di, sub))


# ---------------------------------------------------------------------------

_FIELD_CACHE: dict[tuple[Fraction, ...], "MultiquadraticField"] = {}


def mq_field(generators: Iterable) -> "MultiquadraticField":
    """Build (or fetch from cache) the tower Q(sqrt(a_1), ..., sqrt(a_m))."""
    gens = tuple(Fraction(a) for a in generators)
    field = _FIELD_CACHE.get(gens)
    if field is None:
        field = MultiquadraticField(gens)
        _FIELD_CACHE[gens] = field
    return field


class MultiquadraticField:
    """The field Q(sqrt(a_1), ..., sqrt(a_m)) with exact coordinates."""

    def __init__(self, generators: Iterable):
        gens = tuple(Fraction(a) for a in generators)
        for i, a in enumerate(gens, 1):
            if a == 0:
                raise ValueError(f"generator {i} is zero")
            # a_i must not become a square once the earlier square roots are
            # adjoined; equivalently no quotient a_i / (product of earlier
            # generators) may be a rational square.
            prev = gens[: i - 1]
            for mask in range(1 << len(prev)):
                q = a
                for j, b in enumerate(prev):
                    if mask >> j & 1:
                        q /= b
                if is_rational_square(q):
                    raise DegreeCollapse(i)
        self.gens = gens
        self.m = len(gens)
        self.dim = 1 << self.m
        self.zero = MQElement(self, (_ZERO,) * self.dim)
        self.one = MQElement(self, (_ONE,) + (_ZERO,) * (self.dim - 1))

    # -- constructors ------------------------------------------------------

    def element(self, coords: Sequence) -> "MQElement":
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(coords)}")
        return MQElement(self, coords)

    def scalar(self, c) -> "MQElement":
        return MQElement(self, (Fraction(c),) + (_ZERO,) * (self.dim - 1))

    def alpha(self, i: int) -> "MQElement":
        """The i-th square root sqrt(a_i) as an element (1-based)."""
        if not 1 <= i <= self.m:
            raise ValueError(f"no generator {i} in a height-{self.m} tower")
        coords = [_ZERO] * self.dim
        coords[1 << (i - 1)] = _ONE
        return MQElement(self, tuple(coords))

    def basis_element(self, j: int) -> "MQElement":
        coords = [_ZERO] * self.dim
        coords[j] = _ONE
        return MQElement(self, tuple(coords))

    def coerce(self, x) -> "MQElement":
        if isinstance(x, MQElement):
            if x.field is not self and x.field != self:
                raise FieldMismatch(f"{x.field} vs {self}")
            return x
        if isinstance(x, (int, Fraction)):
            return self.scalar(x)
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def random_element(self, rng, bound: int) -> "MQElement":
        """Element with integer coordinates drawn uniformly from [0, bound]."""
        return MQElement(self, tuple(Fraction(rng.randint(0, bound)) for _ in range(self.dim)))

    # -- structure ---------------------------------------------------------

    def subfield(self, height: int) -> "MultiquadraticField":
        """The tower truncated to its first `height` generators."""
        return mq_field(self.gens[:height])

    def basis_label(self, j: int) -> str:
        parts = [f"r{i + 1}" for i in range(self.m) if j >> i & 1]
        return "*".join(parts) if parts else "1"

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {"generators": [str(a) for a in self.gens]}

    @staticmethod
    def from_json(data) -> "MultiquadraticField":
        return mq_field([Fraction(s) for s in data["generators"]])

    def element_to_json(self, x: "MQElement"):
        return [str(c) for c in x.coords]

    def element_from_json(self, data) -> "MQElement":
        return self.element([Fraction(s) for s in data])

    def __eq__(self, other):
        return isinstance(other, MultiquadraticField) and self.gens == other.gens

    def __hash__(self):
        return hash(self.gens)

    def __repr__(self):
        inside = ", ".join(str(a) for a in self.gens)
        return f"Q(sqrt: {inside})" if inside else "Q"


class MQElement:
    """Element of a multiquadratic tower; immutable."""

    __slots__ = ("field", "coords")

    def __init__(self, field: MultiquadraticField, coords: tuple):
        self.field = field
        self.coords = coords

    # -- ring operations ---------------------------------------------------

    def _check(self, other) -> "MQElement":
        if isinstance(other, (int, Fraction)):
            return self.field.scalar(other)
        if not isinstance(other, MQElement):
            return NotImplemented
        if other.field is not self.field and other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return MQElement(self.field, tuple(_add(self.coords, other.coords)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return MQElement(self.field, tuple(u - v for u, v in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return MQElement(self.field, tuple(_neg(self.coords)))

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return MQElement(self.field, tuple(_mul(list(self.coords), list(other.coords), list(self.field.gens))))

    __rmul__ = __mul__

    def inverse(self) -> "MQElement":
        return MQElement(self.field, tuple(_inv(list(self.coords), list(self.field.gens))))

    def scale(self, c) -> "MQElement":
        """Multiply by a rational scalar, coordinate-wise; avoids the full
        product recursion."""
        c = Fraction(c)
        return MQElement(self.field, tuple(v * c for v in self.coords))

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.one
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.scalar(other)
        return isinstance(other, MQElement) and self.field == other.field and self.coords == other.coords

    def __bool__(self):
        return any(self.coords)

    def __hash__(self):
        return hash((self.field.gens, self.coords))

    # -- tower structure ----------------------------------------------------

    def galois(self, indices: Iterable[int]) -> "MQElement":
        """Apply the automorphism sending alpha_i -> -alpha_i for i in indices.

        A coordinate flips sign exactly when its basis monomial contains an
        odd number of the negated square roots.
        """
        mask = 0
        for i in indices:
            if not 1 <= i <= self.field.m:
                raise ValueError(f"no generator {i}")
            mask |= 1 << (i - 1)
        coords = tuple(-c if (j & mask).bit_count() & 1 else c for j, c in enumerate(self.coords))
        return MQElement(self.field, coords)

    def mul_by_alpha(self, i: int) -> "MQElement":
        """Multiply by sqrt(a_i): a coordinate permutation plus at most
        2^(m-1) rational scalings, cheaper than a general product."""
        if not 1 <= i <= self.field.m:
            raise ValueError(f"no generator {i}")
        bit = 1 << (i - 1)
        a = self.field.gens[i - 1]
        out = [_ZERO] * self.field.dim
        for j, c in enumerate(self.coords):
            if c:
                if j & bit:
                    out[j ^ bit] = a * c
                else:
                    out[j | bit] = c
        return MQElement(self.field, tuple(out))

    def split(self) -> tuple["MQElement", "MQElement"]:
        """Write x = x0 + x1*alpha_m and return (x0, x1) in the subtower."""
        if self.field.m == 0:
            raise TowerHeightZero("cannot split an element of Q")
        sub = self.field.subfield(self.field.m - 1)
        h = self.field.dim // 2
        return (MQElement(sub, self.coords[:h]), MQElement(sub, self.coords[h:]))

    @staticmethod
    def join(field: MultiquadraticField, x0: "MQElement", x1: "MQElement") -> "MQElement":
        """Inverse of split: x0 + x1*alpha_m inside `field`."""
        if field.m == 0:
            raise TowerHeightZero("cannot join into Q")
        sub = field.subfield(field.m - 1)
        if x0.field != sub or x1.field != sub:
            raise FieldMismatch("join parts must live in the subtower")
        return MQElement(field, x0.coords + x1.coords)

    def blocks_over(self, height: int) -> list["MQElement"]:
        """Coordinates of x over the subtower of the given height.

        Returns 2^(m-height) subtower elements c_j with
        x = sum_j c_j * (basis monomial j in the remaining generators).
        """
        sub = self.field.subfield(height)
        w = 1 << height
        return [MQElement(sub, self.coords[k * w:(k + 1) * w]) for k in range(self.field.dim // w)]

    @staticmethod
    def from_blocks(field: MultiquadraticField, blocks: Sequence["MQElement"]) -> "MQElement":
        coords: tuple = ()
        for b in blocks:
            coords += b.coords
        if len(coords) != field.dim:
            raise ValueError("blocks do not fill the tower")
        return MQElement(field, coords)

    def embed(self, field: MultiquadraticField) -> "MQElement":
        """Embed into a taller tower whose generator list extends this one."""
        if field.gens[: self.field.m] != self.field.gens:
            raise FieldMismatch("target tower does not extend the source tower")
        return MQElement(field, self.coords + (_ZERO,) * (field.dim - self.field.dim))

    # -- misc ----------------------------------------------------------------

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coords[0]

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.coords):
            if c:
                label = self.field.basis_label(j)
                terms.append(str(c) if label == "1" else f"{c}*{label}")
        return " + ".join(terms) if terms else "0"

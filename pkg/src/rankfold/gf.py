"""Finite fields: GF(p), GF(p^2) and GF(p^m) with exact integer arithmetic.

GF(p) elements wrap a residue; GF(p^2) is built from a quadratic
non-residue so that the square root of that non-residue is available by
construction; GF(p^m) uses the lexicographically first monic irreducible
modulus (coefficient tuples (c_{m-1}, ..., c_0) compared lexicographically,
i.e. minimal sum c_i * p^i), so two constructions of the same field agree
bit for bit.

The modulus check follows the classical criterion: f of degree m is
irreducible over GF(p) iff x^(p^m) == x (mod f) and
gcd(x^(p^i) - x, f) = 1 for 1 <= i < m.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .errors import FieldMismatch, NotASquare, SingularBasis
from .linalg import ExactMatrix

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with fixed bases; deterministic for n < 3.3e24."""
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


class PrimeField:
    """GF(p).  p may be 2 (needed by the characteristic-2 encoder variant),
    but square roots and the quadratic extension require p odd."""

    def __init__(self, p: int):
        if not is_probable_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.zero = PrimeElement(self, 0)
        self.one = PrimeElement(self, 1)

    def element(self, v: int) -> "PrimeElement":
        return PrimeElement(self, v % self.p)

    def coerce(self, x) -> "PrimeElement":
        if isinstance(x, PrimeElement):
            if x.field != self:
                raise FieldMismatch(f"GF({x.field.p}) vs GF({self.p})")
            return x
        if isinstance(x, int):
            return PrimeElement(self, x % self.p)
        raise TypeError(f"cannot coerce {x!r} into GF({self.p})")

    def random_element(self, rng) -> "PrimeElement":
        return PrimeElement(self, rng.randint(0, self.p - 1))

    def is_square(self, a) -> bool:
        a = self.coerce(a)
        if a.val == 0:
            return True
        if self.p == 2:
            return True
        return pow(a.val, (self.p - 1) // 2, self.p) == 1

    def sqrt(self, a) -> "PrimeElement":
        """Tonelli-Shanks square root, canonicalized to the smaller of the
        two roots; raises NotASquare for non-residues."""
        a = self.coerce(a)
        p = self.p
        if p == 2 or a.val == 0:
            return a
        if not self.is_square(a):
            raise NotASquare(f"{a.val} is not a square mod {p}")
        if p % 4 == 3:
            r = pow(a.val, (p + 1) // 4, p)
            return PrimeElement(self, min(r, p - r))
        # Write p-1 = q * 2^s with q odd and walk the 2-Sylow subgroup.
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = self.smallest_nonresidue()
        c = pow(z, q, p)
        x = pow(a.val, (q + 1) // 2, p)
        t = pow(a.val, q, p)
        m = s
        while t != 1:
            i, tt = 0, t
            while tt != 1:
                tt = tt * tt % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            x = x * b % p
            t = t * b % p * b % p
            c = b * b % p
            m = i
        return PrimeElement(self, min(x, p - x))

    def smallest_nonresidue(self) -> int:
        if self.p == 2:
            raise NotASquare("GF(2) has no non-residues")
        n = 2
        while pow(n, (self.p - 1) // 2, self.p) == 1:
            n += 1
        return n

    def to_json(self):
        return {"p": self.p}

    def element_to_json(self, x: "PrimeElement"):
        return x.val

    def element_from_json(self, data) -> "PrimeElement":
        return self.element(int(data))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and self.p == other.p

    def __hash__(self):
        return hash(("GFp", self.p))

    def __repr__(self):
        return f"GF({self.p})"


class PrimeElement:
    __slots__ = ("field", "val")

    def __init__(self, field: PrimeField, val: int):
        self.field = field
        self.val = val

    def _other(self, x):
        if isinstance(x, PrimeElement):
            if x.field != self.field:
                raise FieldMismatch("different prime fields")
            return x.val
        if isinstance(x, int):
            return x % self.field.p
        return None

    def __add__(self, x):
        v = self._other(x)
        if v is None:
            return NotImplemented
        return PrimeElement(self.field, (self.val + v) % self.field.p)

    __radd__ = __add__

    def __sub__(self, x):
        v = self._other(x)
        if v is None:
            return NotImplemented
        return PrimeElement(self.field, (self.val - v) % self.field.p)

    def __rsub__(self, x):
        return (-self) + x

    def __neg__(self):
        return PrimeElement(self.field, -self.val % self.field.p)

    def __mul__(self, x):
        v = self._other(x)
        if v is None:
            return NotImplemented
        return PrimeElement(self.field, self.val * v % self.field.p)

    __rmul__ = __mul__

    def inverse(self) -> "PrimeElement":
        if self.val == 0:
            raise ZeroDivisionError("inverse of zero")
        return PrimeElement(self.field, pow(self.val, -1, self.field.p))

    def __truediv__(self, x):
        v = self._other(x)
        if v is None:
            return NotImplemented
        if v == 0:
            raise ZeroDivisionError("division by zero")
        return PrimeElement(self.field, self.val * pow(v, -1, self.field.p) % self.field.p)

    def __rtruediv__(self, x):
        return self.inverse() * x

    def __pow__(self, n: int):
        return PrimeElement(self.field, pow(self.val, n, self.field.p))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.val == other % self.field.p
        return isinstance(other, PrimeElement) and self.field == other.field and self.val == other.val

    def __bool__(self):
        return self.val != 0

    def __hash__(self):
        return hash((self.field.p, self.val))

    def __repr__(self):
        return str(self.val)


class QuadExtField:
    """GF(p^2) presented as GF(p)[s]/(s^2 - n) for a non-residue n.

    Constructing the extension from the non-residue of interest makes its
    square root available directly: sqrt(n) = s.
    """

    def __init__(self, base: PrimeField | int, nonresidue: Optional[int] = None):
        self.base = base if isinstance(base, PrimeField) else PrimeField(base)
        if self.base.p == 2:
            raise ValueError("quadratic extension requires odd p")
        if nonresidue is None:
            nonresidue = self.base.smallest_nonresidue()
        nonresidue %= self.base.p
        if self.base.is_square(nonresidue):
            raise ValueError(f"{nonresidue} is a square mod {self.base.p}")
        self.n = nonresidue
        self.p = self.base.p
        self.zero = QuadExtElement(self, 0, 0)
        self.one = QuadExtElement(self, 1, 0)
        self.sqrt_nonresidue = QuadExtElement(self, 0, 1)

    def element(self, u: int, v: int = 0) -> "QuadExtElement":
        return QuadExtElement(self, u % self.p, v % self.p)

    def coerce(self, x) -> "QuadExtElement":
        if isinstance(x, QuadExtElement):
            if x.field != self:
                raise FieldMismatch("different quadratic extensions")
            return x
        if isinstance(x, PrimeElement):
            if x.field != self.base:
                raise FieldMismatch("wrong base field")
            return QuadExtElement(self, x.val, 0)
        if isinstance(x, int):
            return QuadExtElement(self, x % self.p, 0)
        raise TypeError(f"cannot coerce {x!r}")

    def random_element(self, rng) -> "QuadExtElement":
        return QuadExtElement(self, rng.randint(0, self.p - 1), rng.randint(0, self.p - 1))

    def to_json(self):
        return {"p": self.p, "nonresidue": self.n}

    def element_to_json(self, x):
        return [x.u, x.v]

    def element_from_json(self, data):
        return self.element(int(data[0]), int(data[1]))

    def __eq__(self, other):
        return isinstance(other, QuadExtField) and self.p == other.p and self.n == other.n

    def __hash__(self):
        return hash(("GFp2", self.p, self.n))

    def __repr__(self):
        return f"GF({self.p}^2|s^2={self.n})"


class QuadExtElement:
    __slots__ = ("field", "u", "v")

    def __init__(self, field: QuadExtField, u: int, v: int):
        self.field = field
        self.u = u
        self.v = v

    def _pair(self, x):
        if isinstance(x, QuadExtElement):
            if x.field != self.field:
                raise FieldMismatch("different quadratic extensions")
            return x.u, x.v
        if isinstance(x, int):
            return x % self.field.p, 0
        if isinstance(x, PrimeElement) and x.field == self.field.base:
            return x.val, 0
        return None

    def __add__(self, x):
        pair = self._pair(x)
        if pair is None:
            return NotImplemented
        p = self.field.p
        return QuadExtElement(self.field, (self.u + pair[0]) % p, (self.v + pair[1]) % p)

    __radd__ = __add__

    def __sub__(self, x):
        pair = self._pair(x)
        if pair is None:
            return NotImplemented
        p = self.field.p
        return QuadExtElement(self.field, (self.u - pair[0]) % p, (self.v - pair[1]) % p)

    def __rsub__(self, x):
        return (-self) + x

    def __neg__(self):
        p = self.field.p
        return QuadExtElement(self.field, -self.u % p, -self.v % p)

    def __mul__(self, x):
        pair = self._pair(x)
        if pair is None:
            return NotImplemented
        p, n = self.field.p, self.field.n
        u2, v2 = pair
        return QuadExtElement(
            self.field,
            (self.u * u2 + n * self.v * v2) % p,
            (self.u * v2 + self.v * u2) % p,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExtElement":
        return QuadExtElement(self.field, self.u, -self.v % self.field.p)

    def inverse(self) -> "QuadExtElement":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        p, n = self.field.p, self.field.n
        # norm is nonzero for nonzero elements because n is a non-residue
        norm = (self.u * self.u - n * self.v * self.v) % p
        ninv = pow(norm, -1, p)
        return QuadExtElement(self.field, self.u * ninv % p, -self.v * ninv % p)

    def __truediv__(self, x):
        pair = self._pair(x)
        if pair is None:
            return NotImplemented
        return self * QuadExtElement(self.field, *pair).inverse()

    def __rtruediv__(self, x):
        return self.inverse() * x

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = self.field.one, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, QuadExtElement) and other.field != self.field:
            return False
        try:
            pair = self._pair(other) if isinstance(other, (QuadExtElement, int, PrimeElement)) else None
        except FieldMismatch:
            return False
        return pair is not None and (self.u, self.v) == pair

    def __bool__(self):
        return self.u != 0 or self.v != 0

    def __hash__(self):
        return hash((self.field.p, self.field.n, self.u, self.v))

    def __repr__(self):
        return f"({self.u}+{self.v}s)"


# ---------------------------------------------------------------------------
# polynomial helpers over GF(p), coefficient lists in increasing degree

def _ptrim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmulmod(f, g, mod, p):
    out = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _pmodred(out, mod, p)


def _pmodred(f, mod, p):
    # mod is monic
    f = list(f)
    dm = len(mod) - 1
    for d in range(len(f) - 1, dm - 1, -1):
        c = f[d]
        if c:
            f[d] = 0
            for i in range(dm):
                f[d - dm + i] = (f[d - dm + i] - c * mod[i]) % p
    return _ptrim(f[:dm] if len(f) > dm else f)


def _ppow_p(f, mod, p):
    # f^p mod `mod` by square and multiply
    out = [1]
    base = list(f)
    k = p
    while k:
        if k & 1:
            out = _pmulmod(out, base, mod, p)
        base = _pmulmod(base, base, mod, p)
        k >>= 1
    return out


def _pgcd(f, g, p):
    f, g = _ptrim(list(f)), _ptrim(list(g))
    while g:
        inv = pow(g[-1], -1, p)
        g_m = [c * inv % p for c in g]
        # f mod g_m
        f = list(f)
        while len(f) >= len(g_m) and f:
            c = f[-1]
            if c:
                off = len(f) - len(g_m)
                for i, b in enumerate(g_m):
                    f[off + i] = (f[off + i] - c * b) % p
            _ptrim(f)
            if not f:
                break
        f, g = g, _ptrim(f)
    return _ptrim(f)


def _is_irreducible(mod: Sequence[int], p: int) -> bool:
    m = len(mod) - 1
    h = [0, 1]  # x
    for i in range(1, m):
        h = _ppow_p(h, list(mod), p)
        diff = _ptrim([(a - b) % p for a, b in zip(h + [0] * 2, [0, 1] + [0] * len(h))])
        if len(_pgcd(diff, list(mod), p)) != 1:
            return False
    h = _ppow_p(h, list(mod), p)
    return _ptrim([(a - b) % p for a, b in zip(h + [0] * 2, [0, 1] + [0] * len(h))]) == []


def _first_irreducible(p: int, m: int) -> tuple[int, ...]:
    if m == 1:
        return (0, 1)
    for n in range(p ** m):
        coeffs = [(n // p ** i) % p for i in range(m)] + [1]
        if coeffs[0] == 0:
            continue  # reducible: x divides
        if _is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise RuntimeError("no irreducible polynomial found")  # unreachable


class ExtField:
    """GF(p^m) as GF(p)[x]/(f) with a deterministic default modulus."""

    def __init__(self, p: int, m: int, modulus: Optional[Sequence[int]] = None):
        self.base = PrimeField(p)
        self.p = p
        self.m = m
        if modulus is None:
            modulus = _first_irreducible(p, m)
        else:
            modulus = tuple(c % p for c in modulus)
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree m")
            if m > 1 and not _is_irreducible(list(modulus), p):
                raise ValueError("modulus is reducible")
        self.modulus = tuple(modulus)
        self.zero = ExtElement(self, (0,) * m)
        self.one = ExtElement(self, (1,) + (0,) * (m - 1))
        self.x = ExtElement(self, ((0, 1) + (0,) * (m - 2))[:m])
        self._frob_mats: dict[int, tuple] = {}

    @property
    def order(self) -> int:
        return self.p ** self.m

    def element(self, coeffs: Sequence[int]) -> "ExtElement":
        coeffs = [c % self.p for c in coeffs]
        if len(coeffs) > self.m:
            coeffs = _pmodred(coeffs, list(self.modulus), self.p)
        coeffs = coeffs + [0] * (self.m - len(coeffs))
        return ExtElement(self, tuple(coeffs))

    def coerce(self, x) -> "ExtElement":
        if isinstance(x, ExtElement):
            if x.field != self:
                raise FieldMismatch("different extension fields")
            return x
        if isinstance(x, PrimeElement):
            if x.field != self.base:
                raise FieldMismatch("wrong base field")
            return self.element([x.val])
        if isinstance(x, int):
            return self.element([x])
        raise TypeError(f"cannot coerce {x!r}")

    def random_element(self, rng) -> "ExtElement":
        return ExtElement(self, tuple(rng.randint(0, self.p - 1) for _ in range(self.m)))

    def polynomial_basis(self) -> list["ExtElement"]:
        return [self.element([0] * i + [1]) for i in range(self.m)]

    def _frobenius_matrix(self, i: int) -> tuple:
        """Matrix of x -> x^(p^i) on coordinate columns, cached per power."""
        i %= self.m
        mat = self._frob_mats.get(i)
        if mat is None:
            cols = []
            for j in range(self.m):
                e = ExtElement(self, tuple(1 if k == j else 0 for k in range(self.m)))
                f = e
                for _ in range(i):
                    f = f._pth_power()
                cols.append(f.coeffs)
            mat = tuple(tuple(cols[j][k] for j in range(self.m)) for k in range(self.m))
            self._frob_mats[i] = mat
        return mat

    def frobenius(self, x: "ExtElement", i: int = 1) -> "ExtElement":
        """x^(p^i), applied as a precomputed GF(p)-linear map."""
        x = self.coerce(x)
        mat = self._frobenius_matrix(i)
        p = self.p
        coeffs = tuple(sum(mat[k][j] * x.coeffs[j] for j in range(self.m)) % p for k in range(self.m))
        return ExtElement(self, coeffs)

    def to_json(self):
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    def element_to_json(self, x):
        return list(x.coeffs)

    def element_from_json(self, data):
        return self.element([int(c) for c in data])

    def __eq__(self, other):
        return isinstance(other, ExtField) and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self):
        return hash(("GFpm", self.p, self.m, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.m})"


class ExtElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: ExtField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    def _other(self, x):
        if isinstance(x, ExtElement):
            if x.field != self.field:
                raise FieldMismatch("different extension fields")
            return x
        if isinstance(x, (int, PrimeElement)):
            return self.field.coerce(x)
        return None

    def __add__(self, x):
        o = self._other(x)
        if o is None:
            return NotImplemented
        p = self.field.p
        return ExtElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, x):
        o = self._other(x)
        if o is None:
            return NotImplemented
        p = self.field.p
        return ExtElement(self.field, tuple((a - b) % p for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, x):
        return (-self) + x

    def __neg__(self):
        p = self.field.p
        return ExtElement(self.field, tuple(-a % p for a in self.coeffs))

    def __mul__(self, x):
        o = self._other(x)
        if o is None:
            return NotImplemented
        p = self.field.p
        prod = [0] * (2 * self.field.m - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    prod[i + j] = (prod[i + j] + a * b) % p
        red = _pmodred(prod, list(self.field.modulus), p)
        return ExtElement(self.field, tuple(red + [0] * (self.field.m - len(red))))

    __rmul__ = __mul__

    def _pth_power(self) -> "ExtElement":
        out = self.field.one
        base = self
        k = self.field.p
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "ExtElement":
        # extended Euclid in GF(p)[x]
        p = self.field.p
        r0, r1 = list(self.field.modulus), _ptrim(list(self.coeffs))
        if not r1:
            raise ZeroDivisionError("inverse of zero")
        s0, s1 = [], [1]
        while r1:
            inv = pow(r1[-1], -1, p)
            q = []
            r = list(r0)
            while len(r) >= len(r1) and _ptrim(r):
                d = len(r) - len(r1)
                c = r[-1] * inv % p
                qt = [0] * d + [c]
                q = _ptrim([(a + b) % p for a, b in zip(q + [0] * (d + 1), qt + [0] * len(q))])
                for i in range(len(r1)):
                    r[d + i] = (r[d + i] - c * r1[i]) % p
                _ptrim(r)
            # s_next = s0 - q*s1
            qs1 = [0] * (len(q) + len(s1) - 1) if q and s1 else []
            for i, a in enumerate(q):
                if a:
                    for j, b in enumerate(s1):
                        qs1[i + j] = (qs1[i + j] + a * b) % p
            s_next = _ptrim([(a - b) % p for a, b in zip(s0 + [0] * len(qs1), qs1 + [0] * len(s0))])
            r0, r1 = _ptrim(list(r1)), _ptrim(r)
            s0, s1 = s1, s_next
        # r0 is the gcd (a unit); normalize
        c = pow(r0[0], -1, p)
        res = [a * c % p for a in s0]
        res = _pmodred(res, list(self.field.modulus), p)
        return ExtElement(self.field, tuple(res + [0] * (self.field.m - len(res))))

    def __truediv__(self, x):
        o = self._other(x)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, x):
        return self.inverse() * x

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = self.field.one, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, ExtElement) and other.field != self.field:
            return False
        try:
            o = self._other(other) if isinstance(other, (ExtElement, int, PrimeElement)) else None
        except FieldMismatch:
            return False
        return o is not None and self.coeffs == o.coeffs

    def __bool__(self):
        return any(self.coeffs)

    def __hash__(self):
        return hash((self.field.p, self.field.m, self.coeffs))

    def __repr__(self):
        return f"ext{list(self.coeffs)}"


# ---------------------------------------------------------------------------

def expand_to_base(field: ExtField, vector: Iterable, basis: Optional[Sequence] = None) -> ExactMatrix:
    """Write a vector over GF(p^m) as an m x n matrix over GF(p).

    Column j holds the coordinates of the j-th entry in the given basis
    (default: the polynomial basis, where coordinates are the coefficient
    tuples themselves).  The expansion is GF(p)-linear in the vector, and
    the rank of the result does not depend on the basis choice.
    """
    vec = [field.coerce(v) for v in vector]
    gf = field.base
    if basis is None:
        cols = [v.coeffs for v in vec]
    else:
        basis = [field.coerce(b) for b in basis]
        if len(basis) != field.m:
            raise SingularBasis(f"need {field.m} basis elements, got {len(basis)}")
        B = ExactMatrix(gf, [[b.coeffs[i] for b in basis] for i in range(field.m)])
        aug = B.hstack(ExactMatrix.identity(gf, field.m))
        R, pivots, _ = aug.rref()
        # B is invertible exactly when all pivots fall in its own columns.
        if tuple(pivots[: field.m]) != tuple(range(field.m)):
            raise SingularBasis("basis elements are linearly dependent")
        Binv = ExactMatrix(gf, tuple(row[field.m:] for row in R.entries), _raw=True)
        cols = []
        for v in vec:
            coord = Binv @ ExactMatrix.column(gf, [gf.element(c) for c in v.coeffs])
            cols.append(tuple(coord.entries[i][0].val for i in range(field.m)))
    return ExactMatrix(gf, [[gf.element(cols[j][i]) for j in range(len(vec))] for i in range(field.m)])


def reconstruct_from_base(field: ExtField, matrix: ExactMatrix, basis: Optional[Sequence] = None) -> list:
    """Inverse of expand_to_base: columns back to GF(p^m) entries."""
    if basis is None:
        basis = field.polynomial_basis()
    basis = [field.coerce(b) for b in basis]
    if matrix.rows != field.m:
        raise SingularBasis(f"matrix must have {field.m} rows")
    out = []
    for j in range(matrix.cols):
        acc = field.zero
        for i in range(field.m):
            c = matrix.entries[i][j]
            if c:
                acc = acc + basis[i] * c.val
        out.append(acc)
    return out

"""Finite fields GF(p) and GF(2^m) with a designated generator.

Elements are plain integers in ``[0, q)``: residues for prime fields and
polynomial bit patterns for binary extensions.  All arithmetic goes through
log/antilog tables built once per :class:`FieldSpec`, which is cheap for the
supported sizes (q <= 2^16).  :class:`FieldElement` wraps an integer together
with its field for callers that prefer operator syntax and mixed-field checks.
"""

from __future__ import annotations

import re
from typing import Iterator, Optional

from .errors import FieldError, ZeroInverseError

PRIME = "prime"
BINARY = "binary"

MAX_ORDER = 1 << 16

# Primitive polynomials (x is a generator) for GF(2^m).
PRIMITIVE_POLYS = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def _poly_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def is_irreducible_gf2(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for div in range(2, 1 << (deg // 2 + 1)):
        if _poly_mod(poly, div) == 0:
            return False
    return True


def _gf2_mul_raw(a: int, b: int, poly: int, m: int) -> int:
    r = 0
    top = 1 << m
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return r


class FieldSpec:
    """A finite field together with a generator ``omega`` of its multiplicative group.

    Use :meth:`prime`, :meth:`binary` or :meth:`parse` rather than the
    constructor.  Instances are immutable and hashable.
    """

    __slots__ = ("kind", "order", "poly", "omega", "_exp", "_log", "_m")

    def __init__(self, kind: str, order: int, poly: Optional[int] = None, omega: Optional[int] = None):
        if kind not in (PRIME, BINARY):
            raise FieldError(f"unknown field kind {kind!r}")
        if not 2 <= order <= MAX_ORDER:
            raise FieldError(f"field order {order} outside supported range [2, {MAX_ORDER}]")
        if kind == PRIME:
            if not is_prime(order):
                raise FieldError(f"{order} is not prime")
            if poly is not None:
                raise FieldError("prime fields take no reduction polynomial")
            m = 1
        else:
            m = order.bit_length() - 1
            if order != 1 << m:
                raise FieldError(f"{order} is not a power of two")
            if poly is None:
                poly = PRIMITIVE_POLYS[m]
            if poly.bit_length() - 1 != m:
                raise FieldError(f"reduction polynomial {poly:#x} does not have degree {m}")
            if not is_irreducible_gf2(poly):
                raise FieldError(f"reduction polynomial {poly:#x} is reducible")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "_m", m)

        if omega is None:
            omega = self._find_generator()
        elif not 0 < omega < order:
            raise FieldError(f"generator {omega} is not a nonzero element of GF({order})")
        exp, log = self._tables(omega)
        if exp is None:
            raise FieldError(f"{omega} does not generate the multiplicative group of GF({order})")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "_exp", exp)
        object.__setattr__(self, "_log", log)

    def __setattr__(self, name, value):
        raise AttributeError("FieldSpec is immutable")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def prime(cls, p: int, omega: Optional[int] = None) -> "FieldSpec":
        return cls(PRIME, p, None, omega)

    @classmethod
    def binary(cls, m: int, poly: Optional[int] = None, omega: Optional[int] = None) -> "FieldSpec":
        if not 1 <= m <= 16:
            raise FieldError(f"extension degree {m} outside [1, 16]")
        return cls(BINARY, 1 << m, poly, omega)

    @classmethod
    def default(cls) -> "FieldSpec":
        """GF(2^8) reduced by 0x11D with omega = x."""
        return cls.binary(8, 0x11D, 2)

    @classmethod
    def parse(cls, text: str, omega: Optional[int] = None) -> "FieldSpec":
        """Parse ``"7"``, ``"gf7"``, ``"GF(2^8)"``, ``"2^8"``, ``"256"`` or ``"2^8:0x11d"``."""
        s = text.strip().lower().replace(" ", "")
        poly = None
        if ":" in s:
            s, ptxt = s.split(":", 1)
            poly = int(ptxt, 0)
        s = re.sub(r"^gf\(?(.*?)\)?$", r"\1", s)
        if "^" in s or "**" in s:
            base, exp = re.split(r"\^|\*\*", s)
            base_i, exp_i = int(base), int(exp)
            if base_i != 2:
                if exp_i == 1:
                    return cls.prime(base_i, omega)
                raise FieldError(f"only prime and binary-extension fields are supported, got {text!r}")
            return cls.binary(exp_i, poly, omega)
        q = int(s, 0)
        if is_prime(q):
            if q == 2 and poly is not None:
                return cls.binary(1, poly, omega)
            return cls.prime(q, omega)
        m = q.bit_length() - 1
        if q == 1 << m:
            return cls.binary(m, poly, omega)
        raise FieldError(f"{q} is neither prime nor a power of two")

    def _raw_mul(self, a: int, b: int) -> int:
        if self.kind == PRIME:
            return a * b % self.order
        return _gf2_mul_raw(a, b, self.poly, self._m)

    def _tables(self, g: int):
        q = self.order
        exp = [0] * (2 * (q - 1))
        log = [-1] * q
        x = 1
        for i in range(q - 1):
            if log[x] != -1:
                return None, None
            exp[i] = x
            log[x] = i
            x = self._raw_mul(x, g)
        if x != 1:
            return None, None
        exp[q - 1 :] = exp[: q - 1]
        return exp, log

    def _find_generator(self) -> int:
        if self.kind == BINARY and self.order > 2:
            candidates = range(2, self.order)
        else:
            candidates = range(1, self.order)
        for g in candidates:
            if self._tables(g)[0] is not None:
                return g
        raise FieldError(f"no generator found for GF({self.order})")  # pragma: no cover

    # -- identity ---------------------------------------------------------------

    def _key(self):
        return (self.kind, self.order, self.poly, self.omega)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.kind == PRIME:
            return f"FieldSpec.prime({self.order}, omega={self.omega})"
        return f"FieldSpec.binary({self._m}, poly={self.poly:#x}, omega={self.omega})"

    def __str__(self):
        if self.kind == PRIME:
            return f"GF({self.order})"
        return f"GF(2^{self._m})"

    @property
    def degree(self) -> int:
        return self._m

    @property
    def characteristic(self) -> int:
        return self.order if self.kind == PRIME else 2

    @property
    def symbol_width(self) -> int:
        """Bytes per serialized symbol."""
        return 1 if self.order <= 256 else 2

    def to_dict(self) -> dict:
        return {"kind": self.kind, "order": self.order, "poly": self.poly, "omega": self.omega}

    @classmethod
    def from_dict(cls, d: dict) -> "FieldSpec":
        return cls(d["kind"], d["order"], d.get("poly"), d["omega"])

    # -- integer-level arithmetic -----------------------------------------------

    def elements(self) -> range:
        return range(self.order)

    def nonzero(self) -> range:
        return range(1, self.order)

    def check(self, x: int) -> int:
        if not 0 <= x < self.order:
            raise FieldError(f"{x} is not a canonical element of {self}")
        return x

    def add(self, x: int, y: int) -> int:
        if self.kind == BINARY:
            return x ^ y
        s = x + y
        return s - self.order if s >= self.order else s

    def sub(self, x: int, y: int) -> int:
        if self.kind == BINARY:
            return x ^ y
        s = x - y
        return s + self.order if s < 0 else s

    def neg(self, x: int) -> int:
        if self.kind == BINARY or x == 0:
            return x
        return self.order - x

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return self._exp[self._log[x] + self._log[y]]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroInverseError(f"zero has no inverse in {self}")
        lx = self._log[x]
        return self._exp[(self.order - 1 - lx) % (self.order - 1)]

    def div(self, x: int, y: int) -> int:
        if y == 0:
            raise ZeroInverseError(f"division by zero in {self}")
        if x == 0:
            return 0
        return self._exp[self._log[x] - self._log[y] + self.order - 1]

    def pow(self, x: int, e: int) -> int:
        """``x**e``; negative exponents mean powers of the inverse."""
        if x == 0:
            if e < 0:
                raise ZeroInverseError(f"zero has no inverse in {self}")
            return 1 if e == 0 else 0
        return self._exp[(self._log[x] * e) % (self.order - 1)]

    def omega_pow(self, e: int) -> int:
        """``omega**e`` for any integer exponent."""
        return self._exp[e % (self.order - 1)]

    def log(self, x: int) -> int:
        """Discrete logarithm to base omega."""
        if x == 0:
            raise ZeroInverseError("log of zero")
        return self._log[x]

    def dot(self, xs, ys) -> int:
        acc = 0
        mul, add = self.mul, self.add
        for x, y in zip(xs, ys):
            if x and y:
                acc = add(acc, mul(x, y))
        return acc

    def from_int(self, n: int) -> int:
        """Image of the integer ``n`` under the ring map Z -> F (``1 + ... + 1``)."""
        if self.kind == PRIME:
            return n % self.order
        return n & 1

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    def iter_elements(self) -> Iterator["FieldElement"]:
        for v in range(self.order):
            yield FieldElement(self, v)


class FieldElement:
    """An element bound to its field; arithmetic rejects mixed-field operands."""

    __slots__ = ("field", "value")

    def __init__(self, field: FieldSpec, value: int):
        self.field = field
        self.value = field.check(int(value))

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError(f"mixed-field operands: {self.field} and {other.field}")
            return other.value
        if isinstance(other, int):
            return self.field.check(other)
        return NotImplemented

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._other(other), self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._other(other)))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.field}({self.value})"


def field_add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def field_mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def field_inv(x: FieldElement) -> FieldElement:
    return x.inverse()


def field_pow(x: FieldElement, e: int) -> FieldElement:
    return x**e

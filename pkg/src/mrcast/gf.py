"""Finite-field arithmetic for coding coefficients.

Two kinds of field are supported:

* ``GF(2^k)`` for ``1 <= k <= 16``, built from a fixed primitive polynomial
  per degree and evaluated with log/antilog tables;
* a "quasi-infinite" prime field of order ``2^61 - 1``, used wherever an
  infinite field is wanted.  Spurious linear dependences among a handful of
  random vectors occur with probability around ``2^-61`` per vector, which is
  indistinguishable from a generic (infinite-field) code at simulation scale.

Elements are plain ``int`` values in ``[0, order)``.  :class:`FieldElement`
wraps a value together with its field for callers that want operator
overloading and mismatch checking; the hot paths (elimination, code
generation) use the :class:`Field` methods on bare ints.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

MERSENNE_61 = (1 << 61) - 1

# Exponents of the nonzero terms of the primitive polynomial for each degree.
PRIMITIVE_POLYS: dict[int, tuple[int, ...]] = {
    1: (1, 0),
    2: (2, 1, 0),
    3: (3, 1, 0),
    4: (4, 1, 0),
    5: (5, 2, 0),
    6: (6, 4, 3, 1, 0),
    7: (7, 1, 0),
    8: (8, 4, 3, 2, 0),
    9: (9, 4, 0),
    10: (10, 6, 5, 3, 2, 1, 0),
    11: (11, 2, 0),
    12: (12, 7, 6, 5, 3, 1, 0),
    13: (13, 4, 3, 1, 0),
    14: (14, 7, 5, 3, 0),
    15: (15, 5, 4, 2, 0),
    16: (16, 5, 3, 2, 0),
}


class FieldMismatchError(ValueError):
    """Raised when operands belong to different fields or are out of range."""


def poly_bits(exponents: tuple[int, ...]) -> int:
    """Pack polynomial exponents into the integer bit representation."""
    out = 0
    for e in exponents:
        out |= 1 << e
    return out


@dataclass(frozen=True)
class FieldSpec:
    """Identifies a coefficient field.

    ``bits`` is the extension degree ``k`` of ``GF(2^k)``; ``None`` selects
    the quasi-infinite prime field.
    """

    bits: int | None

    def __post_init__(self) -> None:
        if self.bits is not None and not 1 <= self.bits <= 16:
            raise ValueError(f"binary field degree must be in 1..16, got {self.bits}")

    @classmethod
    def binary(cls, k: int) -> FieldSpec:
        return cls(k)

    @classmethod
    def quasi_infinite(cls) -> FieldSpec:
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> FieldSpec:
        """Parse ``"inf"``, ``"2^k"`` or a bare power of two such as ``"256"``."""
        s = text.strip().lower()
        if s in ("inf", "infinite", "quasi", "quasi-infinite"):
            return cls(None)
        if s.startswith("2^"):
            return cls(int(s[2:]))
        n = int(s)
        if n < 2 or n & (n - 1):
            raise ValueError(f"field size must be a power of two or 'inf', got {text!r}")
        return cls(n.bit_length() - 1)

    @property
    def is_binary(self) -> bool:
        return self.bits is not None

    @property
    def order(self) -> int:
        return MERSENNE_61 if self.bits is None else 1 << self.bits

    def __str__(self) -> str:
        return "inf" if self.bits is None else f"2^{self.bits}"


class Field:
    """Arithmetic for one :class:`FieldSpec`.  Obtain instances via :func:`field`."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.order = spec.order
        if spec.is_binary:
            self.poly = poly_bits(PRIMITIVE_POLYS[spec.bits])
            self._exp, self._log = _log_tables(spec.bits, self.poly)
        else:
            self.poly = None

    def __repr__(self) -> str:
        return f"Field({self.spec})"

    def add(self, a: int, b: int) -> int:
        if self.poly is not None:
            return a ^ b
        s = a + b
        return s - MERSENNE_61 if s >= MERSENNE_61 else s

    def sub(self, a: int, b: int) -> int:
        if self.poly is not None:
            return a ^ b
        s = a - b
        return s + MERSENNE_61 if s < 0 else s

    def neg(self, a: int) -> int:
        if self.poly is not None or a == 0:
            return a
        return MERSENNE_61 - a

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.poly is not None:
            return self._exp[self._log[a] + self._log[b]]
        return a * b % MERSENNE_61

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        if self.poly is not None:
            return self._exp[(self.order - 1) - self._log[a]]
        return pow(a, MERSENNE_61 - 2, MERSENNE_61)

    def random(self, rng: random.Random, nonzero: bool = False) -> int:
        if nonzero:
            return rng.randrange(1, self.order)
        if self.poly is not None:
            return rng.getrandbits(self.spec.bits)
        return rng.randrange(MERSENNE_61)

    def contains(self, a: int) -> bool:
        return isinstance(a, int) and 0 <= a < self.order


def _log_tables(k: int, poly: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Build antilog (doubled, so products need no modulo) and log tables."""
    size = 1 << k
    n = size - 1
    exp = [0] * (2 * n)
    log = [0] * size
    x = 1
    for i in range(n):
        if i and x == 1:
            raise ValueError(f"polynomial {poly:#x} is not primitive")
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & size:
            x ^= poly
    if x != 1:
        raise ValueError(f"polynomial {poly:#x} is not primitive")
    exp[n:] = exp[:n]
    return tuple(exp), tuple(log)


@lru_cache(maxsize=None)
def field(spec: FieldSpec) -> Field:
    """Return the shared, immutable arithmetic object for ``spec``."""
    return Field(spec)


@dataclass(frozen=True)
class FieldElement:
    """A field value tagged with its field, with the usual operators."""

    value: int
    spec: FieldSpec

    def __post_init__(self) -> None:
        if not field(self.spec).contains(self.value):
            raise FieldMismatchError(f"{self.value!r} is not an element of {self.spec}")

    def _coerce(self, other: FieldElement | int) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldMismatchError(f"cannot combine {self.spec} with {other.spec}")
            return other.value
        return _value(other, self.spec)

    def __add__(self, other):
        return FieldElement(field(self.spec).add(self.value, self._coerce(other)), self.spec)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(field(self.spec).sub(self.value, self._coerce(other)), self.spec)

    def __mul__(self, other):
        return FieldElement(field(self.spec).mul(self.value, self._coerce(other)), self.spec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        f = field(self.spec)
        return FieldElement(f.mul(self.value, f.inv(self._coerce(other))), self.spec)

    def __neg__(self):
        return FieldElement(field(self.spec).neg(self.value), self.spec)

    def inverse(self) -> FieldElement:
        return FieldElement(field(self.spec).inv(self.value), self.spec)

    def __int__(self) -> int:
        return self.value


def _value(a: FieldElement | int, spec: FieldSpec) -> int:
    if isinstance(a, FieldElement):
        if a.spec != spec:
            raise FieldMismatchError(f"element of {a.spec} used with {spec}")
        return a.value
    if not field(spec).contains(a):
        raise FieldMismatchError(f"{a!r} is not an element of {spec}")
    return a


def add(a: FieldElement | int, b: FieldElement | int, spec: FieldSpec) -> int:
    """Field sum of ``a`` and ``b``; XOR for binary fields."""
    return field(spec).add(_value(a, spec), _value(b, spec))


def mul(a: FieldElement | int, b: FieldElement | int, spec: FieldSpec) -> int:
    """Field product of ``a`` and ``b``."""
    return field(spec).mul(_value(a, spec), _value(b, spec))


def inv(a: FieldElement | int, spec: FieldSpec) -> int:
    """Multiplicative inverse; raises :class:`ZeroDivisionError` for zero."""
    return field(spec).inv(_value(a, spec))


def random_element(spec: FieldSpec, rng: random.Random, nonzero: bool = False) -> int:
    """Uniform draw from the field, or from its nonzero elements."""
    return field(spec).random(rng, nonzero)

"""Prime-field arithmetic GF(p) for 2 <= p <= 251.

Elements are stored as canonical integers in ``[0, p)``. Bulk code paths
(matrices, codewords, tensors) work on those raw integers through the
``Field`` methods; ``FieldElement`` is the checked value type used at the
public surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from batchlab.errors import FieldError

MAX_PRIME = 251


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Field:
    """The prime field GF(p)."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or isinstance(self.p, bool):
            raise FieldError(f"field modulus must be an integer, got {self.p!r}")
        if not 2 <= self.p <= MAX_PRIME:
            raise FieldError(f"field modulus {self.p} outside [2, {MAX_PRIME}]")
        if not is_prime(self.p):
            raise FieldError(f"field modulus {self.p} is not prime")

    def __repr__(self) -> str:
        return f"GF({self.p})"

    @property
    def q(self) -> int:
        return self.p

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(int(value) % self.p, self)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(v, self) for v in range(self.p)]

    # raw-integer arithmetic; arguments are assumed canonical
    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise FieldError(f"zero has no inverse in GF({self.p})")
        return _inverse_table(self.p)[a]

    def div(self, a: int, b: int) -> int:
        return (a * self.inv(b)) % self.p

    def dot(self, u, v) -> int:
        return sum(a * b for a, b in zip(u, v)) % self.p


@lru_cache(maxsize=None)
def _inverse_table(p: int) -> tuple[int, ...]:
    return (0,) + tuple(pow(a, p - 2, p) for a in range(1, p))


def field_create(p: int) -> Field:
    return Field(p)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: Field

    def __post_init__(self):
        if not 0 <= self.value < self.field.p:
            raise FieldError(f"{self.value} is not a canonical element of {self.field!r}")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError(f"cannot mix {self.field!r} and {other.field!r}")
            return other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return other % self.field.p
        return NotImplemented

    def _wrap(self, v: int) -> FieldElement:
        return FieldElement(v % self.field.p, self.field)

    def __add__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.value + b)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.value - b)

    def __rsub__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(b - self.value)

    def __mul__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.value * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return self._wrap(self.value * self.field.inv(b))

    def __neg__(self) -> FieldElement:
        return self._wrap(-self.value)

    def inv(self) -> FieldElement:
        return self._wrap(self.field.inv(self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.p})"

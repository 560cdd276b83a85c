"""Exact scalar fields: F_2, F_p and the rationals.

Matrices store raw canonical values (ints in [0, p) or Fractions) and call
back into the field object for arithmetic.  ``FieldScalar`` is the boxed
version used at the public scalar API.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DivisionByZero, FieldMismatch, ParseError

_MAX_P = 2**31


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


class Field:
    """Common interface.  Subclasses define ``reduce`` and ``inv``."""

    tag: str = "?"
    zero = 0
    one = 1

    def reduce(self, x):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def mul(self, a, b):
        return self.reduce(a * b)

    def neg(self, a):
        return self.reduce(-a)

    def div(self, a, b):
        return self.reduce(a * self.inv(b))

    def coerce(self, x):
        """Map an int, Fraction or string into the field."""
        if isinstance(x, str):
            return self.parse(x)
        return self.reduce(x)

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, a) -> str:
        return str(a)

    def __repr__(self):
        return f"<field {self.tag}>"

    def __eq__(self, other):
        return isinstance(other, Field) and other.tag == self.tag

    def __hash__(self):
        return hash(self.tag)

    def __reduce__(self):
        return (get_field, (self.tag,))


class PrimeField(Field):
    def __init__(self, p: int):
        if not (_is_prime(p) and p < _MAX_P):
            raise ValueError(f"F_p needs a prime p < 2^31, got {p}")
        self.p = p
        self.tag = f"F{p}"
        # bound C-level ``x % p``; this sits in every inner loop
        self.reduce = p.__rmod__

    def coerce(self, x):
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise DivisionByZero(f"{x} has no image in {self.tag}")
            return x.numerator * self.inv(x.denominator) % self.p
        return int(x) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise DivisionByZero(f"inverse of 0 in {self.tag}")
        # extended Euclid
        r0, r1, s0, s1 = self.p, a, 0, 1
        while r1:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            s0, s1 = s1, s0 - q * s1
        return s0 % self.p

    def parse(self, text):
        try:
            return self.coerce(Fraction(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad {self.tag} literal {text!r}") from exc


class BinaryField(PrimeField):
    """F_2 with XOR/AND arithmetic."""

    def __init__(self):
        super().__init__(2)
        self.reduce = (1).__and__

    def add(self, a, b):
        return a ^ b

    sub = add

    def mul(self, a, b):
        return a & b

    def neg(self, a):
        return a

    def inv(self, a):
        if not a & 1:
            raise DivisionByZero("inverse of 0 in F2")
        return 1


class RationalField(Field):
    tag = "Q"
    zero = Fraction(0)
    one = Fraction(1)

    def reduce(self, x):
        return Fraction(x)

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0 in Q")
        return 1 / Fraction(a)

    def parse(self, text):
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational literal {text!r}") from exc


@lru_cache(maxsize=None)
def get_field(tag) -> Field:
    """Look up a field by tag: ``"F2"``, ``"F5"``, ``"Q"`` (also accepts an int p)."""
    if isinstance(tag, Field):
        return tag
    if isinstance(tag, int):
        tag = f"F{tag}"
    tag = str(tag).strip()
    if tag == "Q":
        return RationalField()
    if tag.startswith("F") and tag[1:].isdigit():
        p = int(tag[1:])
        if p == 2:
            return BinaryField()
        try:
            return PrimeField(p)
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown field tag {tag!r}")


F2 = get_field("F2")
Q = get_field("Q")


@dataclass(frozen=True)
class FieldScalar:
    value: object
    field: Field

    @classmethod
    def of(cls, x, field) -> "FieldScalar":
        field = get_field(field)
        return cls(field.coerce(x), field)

    def _check(self, other):
        if not isinstance(other, FieldScalar):
            return FieldScalar.of(other, self.field)
        if other.field != self.field:
            raise FieldMismatch(f"{self.field.tag} vs {other.field.tag}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldScalar(self.field.add(self.value, other.value), self.field)

    def __sub__(self, other):
        other = self._check(other)
        return FieldScalar(self.field.sub(self.value, other.value), self.field)

    def __mul__(self, other):
        other = self._check(other)
        return FieldScalar(self.field.mul(self.value, other.value), self.field)

    def __truediv__(self, other):
        other = self._check(other)
        return FieldScalar(self.field.div(self.value, other.value), self.field)

    def __neg__(self):
        return FieldScalar(self.field.neg(self.value), self.field)

    def inv(self):
        return FieldScalar(self.field.inv(self.value), self.field)

    def is_zero(self):
        return self.value == 0

    def __str__(self):
        return self.field.format(self.value)


_OPS = {"add", "sub", "mul", "div", "neg", "inv"}


def arith(op: str, a: FieldScalar, b: FieldScalar | None = None) -> FieldScalar:
    """Apply a field operation by name."""
    if op not in _OPS:
        raise ValueError(f"unknown op {op!r}")
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    if b is None:
        raise TypeError(f"{op} needs two operands")
    if b.field != a.field:
        raise FieldMismatch(f"{a.field.tag} vs {b.field.tag}")
    return {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}[op](b)

"""Prime field arithmetic and the bits of number theory the rest of the package needs.

Elements are always kept fully reduced. The hot paths elsewhere in the package
work directly on canonical Python ints; :class:`FieldElement` is the typed
surface for callers that want operator overloading and serialization.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property

BLS12 = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001
BN254 = 0x30644E72E131A029B85045B68181585D2833E84879B9709143E1F593F0000001

BUILTIN_PRIMES = {"bls12": BLS12, "bn254": BN254}

# 64 Miller-Rabin rounds bound the false-positive rate by 4**-64 = 2**-128
_MR_ROUNDS = 64
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


class FieldError(ValueError):
    pass


class NotInvertible(FieldError):
    pass


class ModulusMismatch(FieldError):
    pass


def is_probable_prime(n: int, rounds: int = _MR_ROUNDS) -> bool:
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.SystemRandom()
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def inv_mod(a: int, m: int) -> int:
    """Inverse of ``a`` modulo ``m`` by the extended Euclidean algorithm."""
    if m < 1:
        raise ValueError("modulus must be positive")
    if m == 1:
        return 0
    old_r, r = a % m, m
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1:
        raise NotInvertible(f"gcd({a}, {m}) = {old_r}")
    return old_s % m


@dataclass(frozen=True)
class PrimeField:
    """The field F_p for an odd prime p > 4."""

    p: int
    check: bool = True

    def __post_init__(self):
        if self.p <= 4:
            raise FieldError(f"modulus must exceed 4, got {self.p}")
        if self.check and self.p not in BUILTIN_PRIMES.values() and not is_probable_prime(self.p):
            raise FieldError(f"{self.p} is not prime")

    @classmethod
    def named(cls, name: str) -> PrimeField:
        return cls(BUILTIN_PRIMES[name.lower()], check=False)

    @property
    def bit_length(self) -> int:
        return self.p.bit_length()

    @cached_property
    def byte_width(self) -> int:
        return (self.bit_length + 7) // 8

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(int(value) % self.p, self)

    def __repr__(self):
        return f"PrimeField({self.p:#x})" if self.bit_length > 32 else f"PrimeField({self.p})"

    def zero(self) -> FieldElement:
        return FieldElement(0, self)

    def one(self) -> FieldElement:
        return FieldElement(1, self)

    def random(self, rng: random.Random | None = None) -> FieldElement:
        rng = rng or random
        return FieldElement(rng.randrange(self.p), self)

    def is_qnr(self, a: int) -> bool:
        """Euler's criterion on a raw integer; zero is rejected."""
        a %= self.p
        if a == 0:
            raise FieldError("zero has no quadratic character")
        return pow(a, (self.p - 1) // 2, self.p) == self.p - 1

    def to_bytes(self, a: int) -> bytes:
        return (a % self.p).to_bytes(self.byte_width, "big")

    def from_bytes(self, data: bytes) -> FieldElement:
        if len(data) != self.byte_width:
            raise FieldError(f"expected {self.byte_width} bytes, got {len(data)}")
        v = int.from_bytes(data, "big")
        if v >= self.p:
            raise FieldError("encoding is not canonical")
        return FieldElement(v, self)

    def to_hex(self, a: int) -> str:
        return self.to_bytes(a).hex()

    def from_hex(self, s: str) -> FieldElement:
        s = s.strip().lower()
        if s.startswith("0x"):
            s = s[2:]
        if len(s) > 2 * self.byte_width:
            raise FieldError(f"hex string longer than {2 * self.byte_width} digits")
        return self.from_bytes(bytes.fromhex(s.rjust(2 * self.byte_width, "0")))


@dataclass(frozen=True, eq=False)
class FieldElement:
    value: int
    field: PrimeField

    def __post_init__(self):
        if not 0 <= self.value < self.field.p:
            raise FieldError("non-canonical field element")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field.p != self.field.p:
                raise ModulusMismatch(f"{self.field} vs {other.field}")
            return other.value
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def _new(self, v: int) -> FieldElement:
        return FieldElement(v % self.field.p, self.field)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FieldElement(pow(self.value, k, self.field.p), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * inv_mod(o, self.field.p)

    def inverse(self) -> FieldElement:
        return FieldElement(inv_mod(self.value, self.field.p), self.field)

    def is_qnr(self) -> bool:
        return self.field.is_qnr(self.value)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field.p == other.field.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.p))

    def __int__(self):
        return self.value

    __index__ = __int__

    def __repr__(self):
        return f"FieldElement({self.value}, mod {self.field.p})" if self.field.bit_length <= 32 \
            else f"FieldElement(0x{self.hex()})"

    def to_bytes(self) -> bytes:
        return self.field.to_bytes(self.value)

    def hex(self) -> str:
        return self.field.to_hex(self.value)


def legendre_is_qnr(a: FieldElement) -> bool:
    return a.is_qnr()

"""Arithmetic and unit-group structure of Z/p^l Z for an odd prime p.

Conventions used throughout the package:
  * the ring is described by a frozen `RingParams` with derived quantities
    m = floor(l/2), n = ceil(l/2) and a canonical generator g of the unit
    group (the smallest positive primitive root mod p^l);
  * residues are plain ints in [0, p^l) in hot paths; the `Residue` wrapper
    exists for API-level values where carrying the ring matters;
  * discrete logs are taken to base g and live in [0, p^(l-1)*(p-1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .errors import BadArgumentError, ConstructionError, NonUnitError

# Exhaustive dlog tables are built below this modulus; BSGS above it.
_DLOG_TABLE_LIMIT = 1 << 17


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def valuation(x: int, p: int) -> int | float:
    """Largest v with p^v | x; math.inf for x = 0."""
    if x == 0:
        return math.inf
    x = abs(x)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def legendre(x: int, p: int) -> int:
    """Legendre symbol (x/p) in {-1, 0, 1} for an odd prime p."""
    x %= p
    if x == 0:
        return 0
    s = pow(x, (p - 1) // 2, p)
    return 1 if s == 1 else -1


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _multiplicative_order_is(x: int, mod: int, order: int) -> bool:
    if pow(x, order, mod) != 1:
        return False
    return all(pow(x, order // q, mod) != 1 for q in _prime_factors(order))


@dataclass(frozen=True)
class RingParams:
    """The ambient ring Z/p^l Z with its derived constants."""

    p: int
    l: int

    def __post_init__(self) -> None:
        if not is_prime(self.p) or self.p < 3:
            raise BadArgumentError(f"p must be an odd prime, got {self.p}")
        if self.l < 2:
            raise BadArgumentError(f"l must be >= 2, got {self.l}")

    @property
    def m(self) -> int:
        return self.l // 2

    @property
    def n(self) -> int:
        return (self.l + 1) // 2

    @property
    def modulus(self) -> int:
        return self.p**self.l

    @property
    def unit_order(self) -> int:
        return self.p ** (self.l - 1) * (self.p - 1)

    @property
    def conductor(self) -> int:
        """Conductor N = lcm(4, p^l, p^2 - 1) of the shared cyclotomic ring."""
        return math.lcm(4, self.modulus, self.p * self.p - 1)

    @cached_property
    def g(self) -> int:
        """Smallest positive generator of the unit group."""
        mod, order = self.modulus, self.unit_order
        for x in range(2, mod):
            if x % self.p and _multiplicative_order_is(x, mod, order):
                return x
        raise ConstructionError(f"no primitive root mod {mod}")  # unreachable

    @cached_property
    def cyc(self):
        from .cyclotomic import CycRing

        return CycRing.get(self.conductor)

    def lower(self) -> RingParams:
        if self.l <= 2:
            raise BadArgumentError("no RingParams below level 2")
        return RingParams(self.p, self.l - 1)

    def is_unit(self, x: int) -> bool:
        return x % self.p != 0

    def inv(self, x: int) -> int:
        if x % self.p == 0:
            raise NonUnitError(f"{x} is divisible by {self.p}")
        return pow(x, -1, self.modulus)

    def units(self):
        """All units of the ring, in increasing order."""
        p = self.p
        return (x for x in range(1, self.modulus) if x % p)

    @cached_property
    def _dlog_table(self) -> dict[int, int] | None:
        if self.modulus > _DLOG_TABLE_LIMIT:
            return None
        table = {}
        x = 1
        for t in range(self.unit_order):
            table[x] = t
            x = x * self.g % self.modulus
        return table

    @cached_property
    def _bsgs_baby(self) -> tuple[int, dict[int, int]]:
        order = self.unit_order
        step = math.isqrt(order - 1) + 1
        baby = {}
        x = 1
        for j in range(step):
            baby.setdefault(x, j)
            x = x * self.g % self.modulus
        return step, baby

    def dlog(self, x: int) -> int:
        """t in [0, unit_order) with g^t = x mod p^l."""
        x %= self.modulus
        if x % self.p == 0:
            raise NonUnitError(f"{x} is divisible by {self.p}")
        table = self._dlog_table
        if table is not None:
            return table[x]
        step, baby = self._bsgs_baby
        giant = pow(self.inv(pow(self.g, step, self.modulus)), 1, self.modulus)
        y = x
        for i in range(step + 1):
            j = baby.get(y)
            if j is not None:
                return (i * step + j) % self.unit_order
            y = y * giant % self.modulus
        raise ConstructionError(f"dlog of {x} not found")  # unreachable

    @cached_property
    def gamma(self) -> int:
        """Generator gamma with gamma^(p^(m-1)(p-1)) = 1 + p^m.

        Built by solving the exponent congruence a * p^(m-1)(p-1) =
        dlog(1 + p^m) on the cyclic unit group, then bumping a by p^n steps
        until it is coprime to the group order.
        """
        p, m, n = self.p, self.m, self.n
        target = (1 + p**m) % self.modulus
        d = self.dlog(target)
        e = p ** (m - 1) * (p - 1)
        if d % e:
            raise ConstructionError("dlog(1 + p^m) not divisible by p^(m-1)(p-1)")
        w = (d // e) % p**n
        a = w
        while math.gcd(a, p - 1) != 1:
            a += p**n
        gamma = pow(self.g, a, self.modulus)
        if pow(gamma, e, self.modulus) != target:
            raise ConstructionError("gamma power condition failed")
        if not _multiplicative_order_is(gamma, self.modulus, self.unit_order):
            raise ConstructionError("gamma is not a generator")
        return gamma

    def residue(self, value: int) -> Residue:
        return Residue(value % self.modulus, self)


@dataclass(frozen=True)
class Residue:
    """A reduced residue together with its ring."""

    value: int
    ring: RingParams

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.ring.modulus:
            raise BadArgumentError(f"unreduced residue {self.value}")

    def __int__(self) -> int:
        return self.value

    def _coerce(self, other) -> int:
        if isinstance(other, Residue):
            if other.ring != self.ring:
                raise BadArgumentError("residues from different rings")
            return other.value
        return int(other)

    def __add__(self, other) -> Residue:
        return self.ring.residue(self.value + self._coerce(other))

    def __sub__(self, other) -> Residue:
        return self.ring.residue(self.value - self._coerce(other))

    def __mul__(self, other) -> Residue:
        return self.ring.residue(self.value * self._coerce(other))

    def __neg__(self) -> Residue:
        return self.ring.residue(-self.value)

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.value)

    def inverse(self) -> Residue:
        return self.ring.residue(self.ring.inv(self.value))


def inv_mod(x: Residue) -> Residue:
    """Multiplicative inverse; raises NonUnitError when p | x."""
    return x.inverse()


def primitive_root(ring: RingParams) -> Residue:
    """The canonical (smallest) generator of the unit group."""
    return ring.residue(ring.g)


def discrete_log(x: Residue, ring: RingParams | None = None) -> int:
    """Exponent t with g^t = x for the canonical generator g."""
    ring = ring or x.ring
    return ring.dlog(int(x))


def find_gamma(ring: RingParams) -> Residue:
    """Generator gamma of the unit group with gamma^(p^(m-1)(p-1)) = 1 + p^m."""
    return ring.residue(ring.gamma)

"""Exact arithmetic in the cyclotomic integer ring Z[zeta_N].

Elements are stored canonically: a coefficient tuple of length phi(N) in the
power basis 1, zeta, ..., zeta^(phi(N)-1), fully reduced modulo the N-th
cyclotomic polynomial.  Equality of elements is equality of tuples, so exact
identities are plain `==` checks.

One conductor N is fixed per computation session (for the main ring of a
(p, l) pair, N = lcm(4, p^l, p^2-1)); every value then lives in a single ring
and no conversion happens in hot paths.  `lift_to` converts to a larger
conductor when two sessions must be compared (level-lowering recursions).

All values are immutable; `CycRing` tables are built once and read-only.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Mapping

import mpmath

from .errors import BadArgumentError, BadConductorError, InexactDivisionError


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _radical(n: int) -> int:
    r = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            r *= d
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    return r * (n if n > 1 else 1)


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    # Dense long division; den is monic up to +-1 leading coefficient.
    num = num[:]
    q = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(num) - 1, len(den) - 2, -1):
        c = num[i]
        if c == 0:
            continue
        assert c % lead == 0
        c //= lead
        q[i - len(den) + 1] = c
        for j, dj in enumerate(den):
            num[i - len(den) + 1 + j] -= c * dj
    assert all(v == 0 for v in num), "polynomial division left a remainder"
    return q


@lru_cache(maxsize=None)
def _cyclotomic_squarefree(n: int) -> tuple[int, ...]:
    # Phi_n for squarefree n, by dividing x^n - 1 by all proper Phi_d.
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_div_exact(poly, list(_cyclotomic_squarefree(d)))
    return tuple(poly)


def cyclotomic_polynomial(n: int) -> list[int]:
    """Coefficient list (degree phi(n)) of the n-th cyclotomic polynomial."""
    r = _radical(n)
    base = _cyclotomic_squarefree(r)
    stretch = n // r
    out = [0] * ((len(base) - 1) * stretch + 1)
    for i, c in enumerate(base):
        out[i * stretch] = c
    return out


def _euler_phi(n: int) -> int:
    r, m = 1, n
    d = 2
    while d * d <= m:
        if m % d == 0:
            r *= d - 1
            m //= d
            while m % d == 0:
                r *= d
                m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        r *= m - 1
    return r


class CycRing:
    """Tables for Z[zeta_N]: the cyclotomic polynomial and reduction rows."""

    _instances: dict[int, "CycRing"] = {}

    def __init__(self, N: int) -> None:
        self.N = N
        self.phi = _euler_phi(N)
        self.poly = cyclotomic_polynomial(N)
        assert len(self.poly) == self.phi + 1 and self.poly[-1] == 1
        # rows[k - phi] expresses zeta^k, phi <= k < N, in the power basis.
        cur = [-c for c in self.poly[:-1]]
        rows = [tuple((i, c) for i, c in enumerate(cur) if c)]
        for _ in range(self.phi + 1, N):
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for i, c in enumerate(self.poly[:-1]):
                    cur[i] -= top * c
            rows.append(tuple((i, c) for i, c in enumerate(cur) if c))
        self._rows = rows
        self._zero = CycElem(self, (0,) * self.phi)
        self._one = CycElem(self, (1,) + (0,) * (self.phi - 1))

    @classmethod
    def get(cls, N: int) -> "CycRing":
        ring = cls._instances.get(N)
        if ring is None:
            ring = cls._instances[N] = cls(N)
        return ring

    def __repr__(self) -> str:
        return f"CycRing(N={self.N})"

    # -- construction ------------------------------------------------------

    def _reduce(self, dense: list[int]) -> tuple[int, ...]:
        # dense is indexed by exponent, length <= N
        phi, rows = self.phi, self._rows
        for k in range(len(dense) - 1, phi - 1, -1):
            c = dense[k]
            if c:
                dense[k] = 0
                for i, w in rows[k - phi]:
                    dense[i] += c * w
        if len(dense) < phi:
            dense = dense + [0] * (phi - len(dense))
        return tuple(dense[:phi])

    def from_exponents(self, counts: Mapping[int, int] | Iterable[tuple[int, int]]) -> "CycElem":
        """Sum of c * zeta_N^e over (e, c) pairs; exponents taken mod N."""
        dense = [0] * self.N
        items = counts.items() if isinstance(counts, Mapping) else counts
        for e, c in items:
            dense[e % self.N] += c
        return CycElem(self, self._reduce(dense))

    def zero(self) -> "CycElem":
        return self._zero

    def one(self) -> "CycElem":
        return self._one

    def integer(self, c: int) -> "CycElem":
        return CycElem(self, (c,) + (0,) * (self.phi - 1))

    def zeta(self, exponent: int) -> "CycElem":
        """zeta_N^exponent, canonicalized."""
        e = exponent % self.N
        if e < self.phi:
            coeffs = [0] * self.phi
            coeffs[e] = 1
            return CycElem(self, tuple(coeffs))
        dense = [0] * self.N
        dense[e] = 1
        return CycElem(self, self._reduce(dense))

    def root_of_unity(self, k: int, a: int) -> "CycElem":
        """zeta_k^a realized as zeta_N^(a N/k); requires k | N."""
        if k <= 0 or self.N % k:
            raise BadConductorError(f"{k} does not divide N={self.N}")
        return self.zeta((self.N // k) * a)

    def sqrt_p(self, p: int) -> "CycElem":
        """The positive real square root of p, as a quadratic Gauss sum.

        sum_x zeta_p^(x^2) equals sqrt(p) for p = 1 mod 4 and i*sqrt(p) for
        p = 3 mod 4; the latter is corrected by zeta_4^(-1).
        """
        if self.N % (4 * p):
            raise BadConductorError(f"need 4p | N for sqrt({p}) in Z[zeta_{self.N}]")
        step = self.N // p
        dense: dict[int, int] = {}
        for x in range(p):
            e = step * (x * x % p)
            dense[e] = dense.get(e, 0) + 1
        g = self.from_exponents(dense)
        if p % 4 == 3:
            g = g * self.zeta(-(self.N // 4))
        return g


class CycElem:
    """A cyclotomic integer in canonical power-basis form."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: CycRing, coeffs: tuple[int, ...]) -> None:
        self.ring = ring
        self.coeffs = coeffs

    # -- basics ------------------------------------------------------------

    def __repr__(self) -> str:
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms) if terms else "0"
        return f"CycElem(N={self.ring.N}: {body})"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CycElem):
            return self.ring.N == other.ring.N and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self == self.ring.integer(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring.N, self.coeffs))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_integer(self) -> bool:
        return not any(self.coeffs[1:])

    def as_integer(self) -> int:
        if not self.is_integer():
            raise InexactDivisionError(f"{self!r} is not a rational integer")
        return self.coeffs[0]

    # -- ring operations ----------------------------------------------------

    def _check(self, other: "CycElem") -> None:
        if self.ring is not other.ring:
            raise BadConductorError("operands from different conductors")

    def __add__(self, other: "CycElem | int") -> "CycElem":
        if isinstance(other, int):
            other = self.ring.integer(other)
        self._check(other)
        return CycElem(self.ring, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "CycElem":
        return CycElem(self.ring, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "CycElem | int") -> "CycElem":
        if isinstance(other, int):
            other = self.ring.integer(other)
        self._check(other)
        return CycElem(self.ring, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other: int) -> "CycElem":
        return self.ring.integer(other) - self

    def __mul__(self, other: "CycElem | int") -> "CycElem":
        if isinstance(other, int):
            return CycElem(self.ring, tuple(other * a for a in self.coeffs))
        self._check(other)
        a = [(i, c) for i, c in enumerate(self.coeffs) if c]
        b = [(i, c) for i, c in enumerate(other.coeffs) if c]
        if not a or not b:
            return self.ring.zero()
        if len(a) > len(b):
            a, b = b, a
        dense = [0] * (2 * self.ring.phi - 1)
        for i, c in a:
            for j, d in b:
                dense[i + j] += c * d
        return CycElem(self.ring, self.ring._reduce(dense))

    def __rmul__(self, other: int) -> "CycElem":
        return self * other

    def __pow__(self, e: int) -> "CycElem":
        if e < 0:
            raise BadArgumentError("negative powers are not defined in Z[zeta]")
        out = self.ring.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def conj(self) -> "CycElem":
        """Complex conjugation zeta -> zeta^(-1)."""
        N = self.ring.N
        dense = [0] * N
        for i, c in enumerate(self.coeffs):
            if c:
                dense[(N - i) % N] += c
        return CycElem(self.ring, self.ring._reduce(dense))

    def divide_exact(self, k: int) -> "CycElem":
        """Divide by a rational integer; a remainder is a logic error."""
        if k == 0:
            raise InexactDivisionError("division by zero")
        if any(c % k for c in self.coeffs):
            raise InexactDivisionError(f"coefficients not divisible by {k}")
        return CycElem(self.ring, tuple(c // k for c in self.coeffs))

    # -- conversions ---------------------------------------------------------

    def lift_to(self, N_new: int) -> "CycElem":
        """Re-express in Z[zeta_M] for a multiple M of N."""
        if N_new == self.ring.N:
            return self
        if N_new % self.ring.N:
            raise BadConductorError(f"{self.ring.N} does not divide {N_new}")
        target = CycRing.get(N_new)
        scale = N_new // self.ring.N
        return target.from_exponents(
            {i * scale: c for i, c in enumerate(self.coeffs) if c}
        )

    def to_dict(self) -> dict:
        return {"N": self.ring.N, "coeffs": list(self.coeffs)}

    @staticmethod
    def from_dict(data: Mapping) -> "CycElem":
        ring = CycRing.get(int(data["N"]))
        coeffs = [int(c) for c in data["coeffs"]]
        if len(coeffs) != ring.phi:
            raise BadArgumentError(f"expected {ring.phi} coefficients")
        return ring.from_exponents(dict(enumerate(coeffs)))

    def embed(self, dps: int = 30) -> complex:
        """Numerical value at zeta_N = exp(2 pi i / N), to ~dps digits."""
        with mpmath.workdps(dps):
            N = self.ring.N
            total = mpmath.mpc(0)
            for i, c in enumerate(self.coeffs):
                if c:
                    total += c * mpmath.expjpi(mpmath.mpf(2 * i) / N)
            return complex(total)


def root_of_unity(ring: CycRing, k: int, a: int) -> CycElem:
    """zeta_k^a inside Z[zeta_N]; raises BadConductorError unless k | N."""
    return ring.root_of_unity(k, a)


def embed_complex(x: CycElem, dps: int = 30) -> complex:
    """Evaluate the coefficient polynomial at exp(2 pi i / N)."""
    return x.embed(dps)


def sqrt_p(ring: CycRing, p: int) -> CycElem:
    """Exact sqrt(p) via the quadratic Gauss sum construction."""
    return ring.sqrt_p(p)

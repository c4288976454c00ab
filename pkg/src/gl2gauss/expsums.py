"""Quadratic Gauss sums, Kloosterman/Salie sums, and the double sum

    P = sum over c, d mod p^i (p not dividing d) of
        lam(p^j beta d + d^(-1) (p^k b - c^2)),

evaluated both in closed form (a five-way case split on j, k) and by the
literal double sum.  This machinery runs at its own level p^i with additive
character lam(1) = zeta_{p^i}^r, in its own ring Z[zeta_{4 p^i}]; it never
aliases a session ring, and the symbol h = i - j below is unrelated to the
coset index h of the matrix Gauss sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .cyclotomic import CycElem, CycRing
from .errors import BadArgumentError, NonUnitError, TooLargeError
from .group import DEFAULT_ENUM_CAP
from .residue import legendre


@dataclass(frozen=True)
class PSumParams:
    """Exponents 1<=j<=i, 0<=k<=i and units beta, b, r mod p^i."""

    p: int
    i: int
    j: int
    k: int
    beta: int
    b: int
    r: int = 1

    def __post_init__(self) -> None:
        p, i = self.p, self.i
        if not (1 <= self.j <= i and 0 <= self.k <= i):
            raise BadArgumentError("need 1 <= j <= i and 0 <= k <= i")
        for name in ("beta", "b", "r"):
            if getattr(self, name) % p == 0:
                raise NonUnitError(f"{name} must be a unit mod {p}")

    @property
    def level(self) -> int:
        return self.p**self.i

    @property
    def ring(self) -> CycRing:
        return ring_at(self.p, self.i)


def ring_at(p: int, i: int) -> CycRing:
    """The working ring Z[zeta_{4 p^i}] for level-i sums."""
    return CycRing.get(4 * p**i)


def _lam_exp(params: PSumParams, x: int) -> int:
    ring = params.ring
    return ring.N // params.level * params.r * x % ring.N


def _p_half(ring: CycRing, p: int, e: int) -> CycElem:
    """p^(e/2) as an exact element (sqrt via the Gauss-sum construction)."""
    base = ring.integer(p ** (e // 2))
    return base * ring.sqrt_p(p) if e % 2 else base


def _quarter_root(ring: CycRing, p: int) -> CycElem:
    """(-1/p)^(1/2): 1 when -1 is a square mod p, zeta_4 otherwise."""
    return ring.zeta(ring.N // 4) if p % 4 == 3 else ring.one()


@lru_cache(maxsize=16)
def _neg_inv_square_counts(p: int, i: int) -> dict[int, tuple[tuple[int, int], ...]]:
    # for each unit d: multiset of -d^(-1) c^2 mod p^i over c mod p^i
    q = p**i
    out = {}
    for d in range(1, q):
        if d % p == 0:
            continue
        dinv = pow(d, -1, q)
        counts: dict[int, int] = {}
        for c in range(q):
            t = -dinv * c * c % q
            counts[t] = counts.get(t, 0) + 1
        out[d] = tuple(counts.items())
    return out


# ---------------------------------------------------------------------------
# quadratic Gauss sums


def quad_gauss_brute(d: int, p: int, i: int, r: int = 1) -> CycElem:
    """sum over c mod p^i of lam(-d^(-1) c^2)."""
    if d % p == 0:
        raise NonUnitError("d must be a unit")
    params = PSumParams(p, i, j=i, k=0, beta=1, b=1, r=r)
    counts = dict(_neg_inv_square_counts(p, i)[d % p**i])
    scale = params.ring.N // params.level * r
    return params.ring.from_exponents({scale * t: c for t, c in counts.items()})


def quad_gauss_closed(d: int, p: int, i: int, r: int = 1) -> CycElem:
    """Closed form (-rd/p)^i (-1/p)^(delta_i/2) p^(i/2), delta_i the parity of i."""
    if d % p == 0:
        raise NonUnitError("d must be a unit")
    ring = ring_at(p, i)
    value = _p_half(ring, p, i)
    if i % 2:
        sign = legendre(-r * d, p)
        value = value * _quarter_root(ring, p)
        if sign < 0:
            value = -value
    return value


# ---------------------------------------------------------------------------
# Kloosterman / Salie sums


def sqrt_mod_prime_power(a: int, p: int, h: int) -> int:
    """The smaller square root of a unit square a mod p^h (Hensel lift)."""
    a %= p**h
    if legendre(a, p) != 1:
        raise BadArgumentError(f"{a} is not a square mod {p}")
    u = next(x for x in range(1, p) if x * x % p == a % p)
    q = p
    for _ in range(h - 1):
        q *= p
        u = (u - (u * u - a) * pow(2 * u, -1, q)) % q
    assert u * u % p**h == a
    return min(u, p**h - u)


def kloosterman_brute(a: int, p: int, h: int, r: int = 1) -> CycElem:
    """sum over units d mod p^h of lam1(d + a d^(-1)), lam1(1) = zeta_{p^h}^r."""
    q = p**h
    ring = ring_at(p, h)
    scale = ring.N // q * r
    counts: dict[int, int] = {}
    for d in range(1, q):
        if d % p == 0:
            continue
        t = scale * ((d + a * pow(d, -1, q)) % q) % ring.N
        counts[t] = counts.get(t, 0) + 1
    return ring.from_exponents(counts)


def kloosterman(a: int, p: int, h: int, r: int = 1) -> CycElem:
    """The Kloosterman sum at level h: brute force for h = 1 (no closed form
    exists there), the Salie evaluation for h > 1.

    For h > 1 the sum vanishes unless a is a square u^2, in which case it is
    (ur/p)^h (-1/p)^(delta_h/2) p^(h/2) (lam1(2u) + (-1/p)^h lam1(-2u)).
    """
    if h < 1:
        raise BadArgumentError("level must be >= 1")
    if h == 1:
        return kloosterman_brute(a, p, 1, r)
    if legendre(a, p) == -1:
        return ring_at(p, h).zero()
    q = p**h
    ring = ring_at(p, h)
    u = sqrt_mod_prime_power(a, p, h)
    scale = ring.N // q * r
    tail_sign = legendre(-1, p) if h % 2 else 1
    tail = ring.zeta(scale * (2 * u)) + tail_sign * ring.zeta(scale * (-2 * u) % ring.N)
    value = _p_half(ring, p, h) * tail
    if h % 2:
        value = value * _quarter_root(ring, p)
        if legendre(u * r, p) < 0:
            value = -value
    return value


def _salie_signed(a: int, p: int, h: int, r: int, j_parity: int) -> CycElem:
    """The quadratic-character-weighted Kloosterman sum K' (square case).

    j_parity is the parity of the twist exponent j; the two branches:
      j even: (r/p) (-1/p)^(1/2) p^(h/2) (lam1(2u) + lam1(-2u))      [h odd]
      j odd : (u/p) p^(h/2) (lam1(2u) + (-1/p) lam1(-2u))            [h even]
    """
    ring = ring_at(p, h)
    if legendre(a, p) == -1:
        return ring.zero()
    q = p**h
    u = sqrt_mod_prime_power(a, p, h)
    scale = ring.N // q * r
    z2u = ring.zeta(scale * (2 * u))
    zm2u = ring.zeta(scale * (-2 * u) % ring.N)
    if j_parity == 0:
        value = _p_half(ring, p, h) * (z2u + zm2u) * _quarter_root(ring, p)
        if legendre(r, p) < 0:
            value = -value
    else:
        value = _p_half(ring, p, h) * (z2u + legendre(-1, p) * zm2u)
        if legendre(u, p) < 0:
            value = -value
    return value


def salie_signed_brute(a: int, p: int, h: int, r: int = 1) -> CycElem:
    """sum over units d of (d/p) lam1(d + a d^(-1))."""
    q = p**h
    ring = ring_at(p, h)
    scale = ring.N // q * r
    counts: dict[int, int] = {}
    for d in range(1, q):
        if d % p == 0:
            continue
        t = scale * ((d + a * pow(d, -1, q)) % q) % ring.N
        counts[t] = counts.get(t, 0) + legendre(d, p)
    return ring.from_exponents(counts)


# ---------------------------------------------------------------------------
# the double sum P


@dataclass(frozen=True)
class PSumResult:
    value: CycElem  # P
    p1: CycElem  # the character-weighted single sum
    case: str
    closed_form: bool  # False when the level-1 Kloosterman brute value was used


def _prefactor(params: PSumParams) -> CycElem:
    # (r/p)^i (-1/p)^(i + delta_i/2) p^(i/2)
    p, i, r = params.p, params.i, params.r
    ring = params.ring
    value = _p_half(ring, p, i)
    if i % 2:
        value = value * _quarter_root(ring, p)
        if legendre(r, p) * legendre(-1, p) < 0:
            value = -value
    return value


def p1_brute(params: PSumParams, cap: int = DEFAULT_ENUM_CAP) -> CycElem:
    """sum over units d of (d/p)^i lam(p^j beta d + p^k b d^(-1))."""
    p, i, q = params.p, params.i, params.level
    if q > cap:
        raise TooLargeError("level exceeds cap")
    ring = params.ring
    scale = ring.N // q * params.r
    pj, pk = p**params.j, p**params.k
    counts: dict[int, int] = {}
    weight_all = params.i % 2 == 1
    for d in range(1, q):
        if d % p == 0:
            continue
        t = scale * ((pj * params.beta * d + pk * params.b * pow(d, -1, q)) % q) % ring.N
        w = legendre(d, p) if weight_all else 1
        counts[t] = counts.get(t, 0) + w
    return ring.from_exponents(counts)


def p_sum_brute(params: PSumParams, cap: int = DEFAULT_ENUM_CAP) -> CycElem:
    """The literal double sum over c and d (inner c-sums shared across cases)."""
    p, i, q = params.p, params.i, params.level
    if q * q > cap:
        raise TooLargeError(f"{q * q} terms exceed cap {cap}")
    ring = params.ring
    scale = ring.N // q * params.r
    pj, pk = p**params.j, p**params.k
    tables = _neg_inv_square_counts(p, i)
    counts: dict[int, int] = {}
    for d in range(1, q):
        if d % p == 0:
            continue
        base = (pj * params.beta * d + pk * params.b * pow(d, -1, q)) % q
        for t, cnt in tables[d]:
            ex = scale * ((base + t) % q) % ring.N
            counts[ex] = counts.get(ex, 0) + cnt
    return ring.from_exponents(counts)


def p_sum_closed(params: PSumParams) -> PSumResult:
    """P = (quadratic Gauss prefactor) x P1, P1 by the five-way case split."""
    p, i, j, k = params.p, params.i, params.j, params.k
    ring = params.ring
    closed = True
    if j == k == i:
        case = "j=k=i"
        p1 = ring.integer(p ** (i - 1) * (p - 1)) if i % 2 == 0 else ring.zero()
    elif j < k:
        case = "j<k"
        if j == i - 1:
            if i % 2 == 0:
                p1 = ring.integer(-(p ** (i - 1)))
            else:
                p1 = ring.integer(p ** (i - 1)) * ring.sqrt_p(p) * _quarter_root(ring, p)
                if legendre(params.beta * params.r, p) < 0:
                    p1 = -p1
        else:
            p1 = ring.zero()
    elif k < j:
        case = "k<j"
        if k == i - 1:
            if i % 2 == 0:
                p1 = ring.integer(-(p ** (i - 1)))
            else:
                p1 = ring.integer(p ** (i - 1)) * ring.sqrt_p(p) * _quarter_root(ring, p)
                if legendre(params.b * params.r, p) < 0:
                    p1 = -p1
        else:
            p1 = ring.zero()
    elif i % 2 == 0:
        case = "j=k<i, i even"
        h = i - j
        a = params.beta * params.b % params.level
        if h == 1:
            ksum = kloosterman_brute(a, p, 1, params.r).lift_to(ring.N)
            closed = False
        else:
            ksum = kloosterman(a, p, h, params.r).lift_to(ring.N)
        p1 = ksum * p**j
    else:
        case = "j=k<i, i odd"
        h = i - j
        a = params.beta * params.b % params.level
        kprime = _salie_signed(a, p, h, params.r, j % 2).lift_to(ring.N)
        p1 = kprime * p**j
        if legendre(params.beta, p) < 0:
            p1 = -p1
    return PSumResult(_prefactor(params) * p1, p1, case, closed)

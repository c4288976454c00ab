"""p-adic logarithm series and the constant sigma = (p/log(1+p))(1 - log(p/log(1+p))).

Internally all series are summed as exact `Fraction`s; each term p^k/k has
p-valuation at least k - floor(log_p k), which is nondecreasing in k, so
truncation at the first k with k - floor(log_p k) > precision is sound.  The
accumulated rational is converted to an integer residue at the end (its
reduced denominator is prime to p because every partial term is a p-adic
integer); no fraction type escapes this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadArgumentError
from .residue import RingParams, Residue, valuation


@dataclass(frozen=True)
class PadicInt:
    """An integer known modulo p^precision."""

    p: int
    precision: int
    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.p**self.precision:
            raise BadArgumentError("value not reduced mod p^precision")


def _floor_log(k: int, p: int) -> int:
    f = 0
    while k >= p:
        k //= p
        f += 1
    return f


def _terms_needed(p: int, precision: int) -> int:
    k = 1
    while k - _floor_log(k, p) <= precision:
        k += 1
    return k  # first index whose term is guaranteed negligible


def _fraction_mod(x: Fraction, p: int, precision: int) -> int:
    mod = p**precision
    den = x.denominator
    if den % p == 0:
        raise BadArgumentError("rational with negative p-valuation")
    return x.numerator * pow(den, -1, mod) % mod


def _log_series(x: Fraction, p: int, precision: int) -> Fraction:
    # log(1 + x) for val_p(x) >= 1, truncated so the result is exact
    # mod p^precision.
    total = Fraction(0)
    term = Fraction(1)
    kmax = _terms_needed(p, precision)
    for k in range(1, kmax):
        term *= x
        total += term / k if k % 2 else -term / k
    return total


def padic_log_unit(u: PadicInt) -> PadicInt:
    """log u = sum (-1)^(k+1) (u-1)^k / k for u = 1 mod p, exact mod p^precision."""
    p, k = u.p, u.precision
    if (u.value - 1) % p:
        raise BadArgumentError(f"{u.value} is not 1 mod {p}")
    total = _log_series(Fraction(u.value - 1), p, k)
    return PadicInt(p, k, _fraction_mod(total, p, k))


def _sigma_fraction(p: int, precision: int) -> int:
    # One guard digit covers the single valuation shift in p / log(1+p).
    work = precision + 1
    log1p = _log_series(Fraction(p), p, work + 1)
    a = Fraction(p) / log1p  # unit, = 1 mod p
    log_a = _log_series(a - 1, p, work)
    sigma = a * (1 - log_a)
    return _fraction_mod(sigma, p, precision)


def odoni_sigma(ring: RingParams) -> Residue:
    """sigma mod p^l, with guard digits so all divisions stay exact."""
    p, l = ring.p, ring.l
    guard = math.ceil(math.log(2 * _terms_needed(p, l + 4), p)) + 2
    value = _sigma_fraction(p, l + guard)
    return ring.residue(value % ring.modulus)


def sigma_mod(p: int, precision: int) -> int:
    """sigma mod p^precision (helper for callers without a RingParams)."""
    guard = math.ceil(math.log(2 * _terms_needed(p, precision + 4), p)) + 2
    return _sigma_fraction(p, precision + guard) % p**precision


__all__ = ["PadicInt", "padic_log_unit", "odoni_sigma", "sigma_mod", "valuation"]

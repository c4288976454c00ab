"""GL2 over Z/p^l Z: matrix arithmetic, the subgroup lattice used by the
character construction, coset representative tables, and searches for the
distinguished generators and indices.

Matrices are plain 4-tuples (a, b, c, d) = (top-left, top-right, bottom-left,
bottom-right) of reduced ints; the modulus travels separately.  Three orbit
families appear throughout, tagged by the shape of the base matrix on the
congruence subgroup:

  X1 - split/diagonal shape, stabilizer built from diagonal tori;
  X2 - nonsplit quadratic shape (eps a non-residue), stabilizer a unit group
       of the unramified quadratic extension;
  X3 - ramified shape (p*beta in the corner), stabilizer a unit group of a
       ramified extension.

Enumerators yield each element exactly once and their counts match the order
formulas; both facts are exercised by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .errors import (
    BadArgumentError,
    ConstructionError,
    NonUnitError,
    NotFoundError,
    NotUniqueError,
    TooLargeError,
)
from .residue import RingParams, _prime_factors

Mat = tuple[int, int, int, int]

IDENTITY: Mat = (1, 0, 0, 1)

DEFAULT_ENUM_CAP = 2_000_000


def mat_mul(x: Mat, y: Mat, mod: int) -> Mat:
    a, b, c, d = x
    e, f, g, h = y
    return (
        (a * e + b * g) % mod,
        (a * f + b * h) % mod,
        (c * e + d * g) % mod,
        (c * f + d * h) % mod,
    )


def mat_det(x: Mat, mod: int) -> int:
    return (x[0] * x[3] - x[1] * x[2]) % mod


def mat_tr(x: Mat, mod: int) -> int:
    return (x[0] + x[3]) % mod


def mat_inv(x: Mat, mod: int) -> Mat:
    det = mat_det(x, mod)
    try:
        dinv = pow(det, -1, mod)
    except ValueError:
        raise NonUnitError(f"matrix {x} has non-unit determinant {det}") from None
    a, b, c, d = x
    return (d * dinv % mod, -b * dinv % mod, -c * dinv % mod, a * dinv % mod)


def mat_pow(x: Mat, e: int, mod: int) -> Mat:
    if e < 0:
        return mat_pow(mat_inv(x, mod), -e, mod)
    out = IDENTITY
    while e:
        if e & 1:
            out = mat_mul(out, x, mod)
        x = mat_mul(x, x, mod)
        e >>= 1
    return out


def mat_order(x: Mat, mod: int, bound: int) -> int:
    y = x
    for k in range(1, bound + 1):
        if y == IDENTITY:
            return k
        y = mat_mul(y, x, mod)
    raise ConstructionError(f"order of {x} exceeds {bound}")


def scalar(c: int, mod: int) -> Mat:
    c %= mod
    return (c, 0, 0, c)


def group_order(ring: RingParams) -> int:
    """|GL2(Z/p^l Z)| = p^(4(l-1)) (p^2-1)(p^2-p)."""
    p, l = ring.p, ring.l
    return p ** (4 * (l - 1)) * (p * p - 1) * (p * p - p)


def gl2_prime_order(p: int) -> int:
    return (p * p - 1) * (p * p - p)


def enumerate_gl2_prime(p: int) -> list[Mat]:
    """All of GL2(F_p) (used by level-lowering at base level 1)."""
    out = []
    for a in range(p):
        for b in range(p):
            for c in range(p):
                for d in range(p):
                    if (a * d - b * c) % p:
                        out.append((a, b, c, d))
    return out


# ---------------------------------------------------------------------------
# subgroup specifications


@dataclass(frozen=True)
class SubgroupSpec:
    """A named subgroup with a membership predicate and exact order formula.

    kind is one of  G, K, Z, S, T, T0, N, Nj, L, H, ZK1S;  K and Nj carry a
    level, the X2 family carries eps, the X3 family carries beta.
    """

    kind: str
    ring: RingParams
    family: str | None = None
    eps: int | None = None
    beta: int | None = None
    level: int | None = None

    # -- sizes -------------------------------------------------------------

    def order(self) -> int:
        p, l, m, n = self.ring.p, self.ring.l, self.ring.m, self.ring.n
        units = self.ring.unit_order
        kind, fam = self.kind, self.family
        if kind == "G":
            return group_order(self.ring)
        if kind == "K":
            return p ** (4 * (l - self.level))
        if kind == "Z":
            return units
        if fam == "X1":
            if kind == "S":
                return units * units
            if kind == "T":
                return units * units * p ** (2 * n)
            if kind == "T0":
                return units * units * p**l
            if kind == "N":
                return p ** (3 * m + n)
        if fam == "X2":
            s = p ** (2 * (l - 1)) * (p * p - 1)
            if kind == "S":
                return s
            if kind == "T":
                return s * p ** (2 * n)
            if kind == "L":
                return s * p ** (2 * m)
            if kind == "Nj":
                return units * p ** (l - 1) * p ** (2 * (l - self.level))
            if kind == "H":
                return units * p ** (l - 1) * p ** (2 * (l - m - 1)) * p
            if kind == "ZK1S":
                return p ** (l - 1) * p ** (l - 1) * (p - 1)
        if fam == "X3":
            if kind == "S":
                return units * p**l
            if kind == "T":
                return units * p**l * p ** (2 * n)
            if kind == "T0":
                return units * p ** (2 * l)
            if kind == "N":
                return p ** (3 * n + m)
            if kind == "ZK1S":
                return units * p ** (l - 1)
        raise BadArgumentError(f"no order formula for {self}")

    # -- membership ---------------------------------------------------------

    def contains(self, x: Mat) -> bool:
        ring = self.ring
        p, l, m, n, mod = ring.p, ring.l, ring.m, ring.n, ring.modulus
        a, b, c, d = x
        kind, fam = self.kind, self.family
        if kind == "G":
            return mat_det(x, mod) % p != 0
        if kind == "K":
            q = p**self.level
            return (a - 1) % q == 0 and b % q == 0 and c % q == 0 and (d - 1) % q == 0
        if kind == "Z":
            return b == 0 and c == 0 and a == d and a % p != 0
        if mat_det(x, mod) % p == 0:
            return False
        if fam == "X1":
            if kind == "S":
                return b == 0 and c == 0
            if kind == "T":
                q = p**m
                return b % q == 0 and c % q == 0
            if kind == "T0":
                return b % p**n == 0 and c % p**m == 0
            if kind == "N":
                return (
                    (a - 1) % p**n == 0
                    and (d - 1) % p**n == 0
                    and b % p**n == 0
                    and c % p**m == 0
                )
        if fam == "X2":
            e = self.eps
            if kind == "S":
                return d == a and b == e * c % mod
            if kind == "T":
                q = p**m
                return (d - a) % q == 0 and (b - e * c) % q == 0
            if kind == "L":
                q = p ** (m + 1)
                return (d - a) % q == 0 and (b - e * c) % q == 0
            if kind == "Nj":
                q = p**self.level
                return c % p == 0 and (d - a) % q == 0 and (b - e * c) % q == 0
            if kind in ("H", "ZK1S"):
                return x in _element_set(self)
        if fam == "X3":
            pb = p * self.beta % mod
            if kind == "S":
                return d == a and b == pb * c % mod
            if kind == "T":
                q = p**m
                return (d - a) % q == 0 and (b - pb * c) % q == 0
            if kind == "T0":
                return (d - a) % p**m == 0 and (b - pb * c) % p**n == 0
            if kind == "N":
                return (
                    (a - 1) % p**m == 0
                    and (d - 1) % p**m == 0
                    and c % p**m == 0
                    and b % p**n == 0
                )
            if kind == "ZK1S":
                return x in _element_set(self)
        raise BadArgumentError(f"no membership predicate for {self}")

    # -- enumeration ---------------------------------------------------------

    def _generate(self) -> Iterator[Mat]:
        ring = self.ring
        p, l, m, n, mod = ring.p, ring.l, ring.m, ring.n, ring.modulus
        kind, fam = self.kind, self.family
        if kind == "G":
            for a in range(mod):
                for b in range(mod):
                    for c in range(mod):
                        for d in range(mod):
                            if (a * d - b * c) % p:
                                yield (a, b, c, d)
            return
        if kind == "K":
            q = p**self.level
            s = p ** (l - self.level)
            for a in range(s):
                for b in range(s):
                    for c in range(s):
                        for d in range(s):
                            yield ((1 + q * a) % mod, q * b, q * c, (1 + q * d) % mod)
            return
        if kind == "Z":
            for a in ring.units():
                yield (a, 0, 0, a)
            return
        if fam == "X1":
            yield from self._generate_x1()
            return
        if fam == "X2":
            yield from self._generate_x2()
            return
        if fam == "X3":
            yield from self._generate_x3()
            return
        raise BadArgumentError(f"no enumerator for {self}")

    def _generate_x1(self) -> Iterator[Mat]:
        ring = self.ring
        p, l, m, n, mod = ring.p, ring.l, ring.m, ring.n, ring.modulus
        kind = self.kind
        units = list(ring.units())
        if kind == "S":
            for a in units:
                for d in units:
                    yield (a, 0, 0, d)
        elif kind == "T":
            qb, qc = p**m, p**m
            for a in units:
                for d in units:
                    for b in range(p**n):
                        for c in range(p**n):
                            yield (a, qb * b, qc * c, d)
        elif kind == "T0":
            for a in units:
                for d in units:
                    for b in range(p**m):
                        for c in range(p**n):
                            yield (a, p**n * b, p**m * c, d)
        elif kind == "N":
            for a in range(p**m):
                for d in range(p**m):
                    for b in range(p**m):
                        for c in range(p**n):
                            yield (
                                (1 + p**n * a) % mod,
                                p**n * b,
                                p**m * c,
                                (1 + p**n * d) % mod,
                            )
        else:
            raise BadArgumentError(f"no enumerator for {self}")

    def _generate_x2(self) -> Iterator[Mat]:
        ring = self.ring
        p, l, m, n, mod = ring.p, ring.l, ring.m, ring.n, ring.modulus
        kind, e = self.kind, self.eps
        if kind == "S":
            for a in range(mod):
                for b in range(mod):
                    if a % p or b % p:
                        yield (a, e * b % mod, b, a)
        elif kind in ("T", "L"):
            j = m if kind == "T" else m + 1
            span = p ** (l - j)
            for a in range(mod):
                for b in range(mod):
                    if a % p or b % p:
                        base_b, base_d = e * b % mod, a
                        for cc in range(span):
                            top = (base_b + p**j * cc) % mod
                            for dd in range(span):
                                yield (a, top, b, (base_d + p**j * dd) % mod)
        elif kind == "Nj":
            j = self.level
            span = p ** (l - j)
            for a in ring.units():
                for b in range(p ** (l - 1)):
                    pb = p * b
                    base = e * pb % mod
                    for cc in range(span):
                        top = (base + p**j * cc) % mod
                        for dd in range(span):
                            yield (a, top, pb, (a + p**j * dd) % mod)
        elif kind == "H":
            base = SubgroupSpec("Nj", ring, "X2", eps=e, level=m + 1)
            t = ((1 + p**m) % mod, 0, 0, 1)
            coset = IDENTITY
            for _ in range(p):
                for x in base.elements():
                    yield mat_mul(x, coset, mod)
                coset = mat_mul(coset, t, mod)
        elif kind == "ZK1S":
            s1, s2, s3 = x2_basis(ring, e)
            z = mat_pow(s3, p + 1, mod)
            ord1 = ord2 = p ** (l - 1)
            a = IDENTITY
            for _ in range(ord1):
                ab = a
                for _ in range(ord2):
                    abc = ab
                    for _ in range(p - 1):
                        yield abc
                        abc = mat_mul(abc, z, mod)
                    ab = mat_mul(ab, s2, mod)
                a = mat_mul(a, s1, mod)
        else:
            raise BadArgumentError(f"no enumerator for {self}")

    def _generate_x3(self) -> Iterator[Mat]:
        ring = self.ring
        p, l, m, n, mod = ring.p, ring.l, ring.m, ring.n, ring.modulus
        kind, beta = self.kind, self.beta
        pb = p * beta % mod
        if kind == "S":
            for a in ring.units():
                for b in range(mod):
                    yield (a, pb * b % mod, b, a)
        elif kind == "T":
            for a in ring.units():
                for b in range(mod):
                    base = pb * b % mod
                    for cc in range(p**n):
                        top = (base + p**m * cc) % mod
                        for dd in range(p**n):
                            yield (a, top, b, (a + p**m * dd) % mod)
        elif kind == "T0":
            for a in ring.units():
                for b in range(mod):
                    base = pb * b % mod
                    for cc in range(p**m):
                        top = (base + p**n * cc) % mod
                        for dd in range(p**n):
                            yield (a, top, b, (a + p**m * dd) % mod)
        elif kind == "N":
            for a in range(p**n):
                for b in range(p**m):
                    for c in range(p**n):
                        for d in range(p**n):
                            yield (
                                (1 + p**m * a) % mod,
                                p**n * b,
                                p**m * c,
                                (1 + p**m * d) % mod,
                            )
        elif kind == "ZK1S":
            s1 = scalar(ring.gamma, mod)
            s2 = (1, p * pb % mod, p, 1)
            a = IDENTITY
            for _ in range(ring.unit_order):
                ab = a
                for _ in range(p ** (l - 1)):
                    yield ab
                    ab = mat_mul(ab, s2, mod)
                a = mat_mul(a, s1, mod)
        else:
            raise BadArgumentError(f"no enumerator for {self}")

    def elements(self, cap: int = DEFAULT_ENUM_CAP) -> list[Mat]:
        if self.order() > cap:
            raise TooLargeError(f"|{self.kind}| = {self.order()} exceeds cap {cap}")
        return _element_list(self)

    def generators(self) -> list[Mat]:
        ring = self.ring
        p, mod = ring.p, ring.modulus
        if self.kind == "G":
            return [(1, 1, 0, 1), (1, 0, 1, 1), (ring.g, 0, 0, 1)]
        if self.kind == "T" and self.family == "X2":
            q = p**ring.m
            elem = [
                ((1 + q) % mod, 0, 0, 1),
                (1, q, 0, 1),
                (1, 0, q, 1),
                (1, 0, 0, (1 + q) % mod),
            ]
            return elem + list(x2_basis(ring, self.eps))
        raise BadArgumentError(f"no generating set recorded for {self}")


@lru_cache(maxsize=None)
def _element_list(spec: SubgroupSpec) -> list[Mat]:
    out = list(spec._generate())
    if len(out) != spec.order():
        raise ConstructionError(
            f"{spec.kind}: enumerated {len(out)} elements, order formula says {spec.order()}"
        )
    return out


@lru_cache(maxsize=None)
def _element_set(spec: SubgroupSpec) -> frozenset[Mat]:
    return frozenset(_element_list(spec))


def enumerate_subgroup(spec: SubgroupSpec, cap: int = DEFAULT_ENUM_CAP) -> list[Mat]:
    """All elements of the subgroup, each exactly once."""
    return spec.elements(cap)


# ---------------------------------------------------------------------------
# distinguished generators and coset representatives


def _quad_ext_mul(u: tuple[int, int], v: tuple[int, int], eps: int, mod: int) -> tuple[int, int]:
    # multiplication of x + y*sqrt(eps)
    return (
        (u[0] * v[0] + eps * u[1] * v[1]) % mod,
        (u[0] * v[1] + u[1] * v[0]) % mod,
    )


def _quad_ext_pow(u: tuple[int, int], e: int, eps: int, mod: int) -> tuple[int, int]:
    out = (1, 0)
    while e:
        if e & 1:
            out = _quad_ext_mul(out, u, eps, mod)
        u = _quad_ext_mul(u, u, eps, mod)
        e >>= 1
    return out


def _generates_fp2(x: int, y: int, eps: int, p: int) -> bool:
    order = p * p - 1
    u = (x % p, y % p)
    if u == (0, 0):
        return False
    if _quad_ext_pow(u, order, eps, p) != (1, 0):
        return False
    return all(_quad_ext_pow(u, order // q, eps, p) != (1, 0) for q in _prime_factors(order))


@lru_cache(maxsize=None)
def find_s3_X2(eps: int, ring: RingParams) -> Mat:
    """The order-(p^2-1) factor of the nonsplit torus.

    Deterministic choice: take the lexicographically smallest (x, y) whose
    image x + y*sqrt(eps) generates the multiplicative group of F_{p^2}, and
    project the unit (x, eps*y; y, x) onto its prime-to-p part by raising to
    p^(2(l-1)).
    """
    p, mod = ring.p, ring.modulus
    for x in range(p):
        for y in range(p):
            if _generates_fp2(x, y, eps, p):
                u = (x, eps * y % mod, y, x)
                s3 = mat_pow(u, p ** (2 * (ring.l - 1)), mod)
                if mat_order(s3, mod, p * p - 1) != p * p - 1:
                    raise ConstructionError("projected unit lost full tame order")
                return s3
    raise ConstructionError(f"no generator of F_{p}^2 found")  # unreachable


@lru_cache(maxsize=None)
def x2_basis(ring: RingParams, eps: int) -> tuple[Mat, Mat, Mat]:
    p, mod = ring.p, ring.modulus
    s1 = scalar(1 + p, mod)
    s2 = (1, p * eps % mod, p, 1)
    return s1, s2, find_s3_X2(eps, ring)


@lru_cache(maxsize=None)
def x3_basis(ring: RingParams, beta: int) -> tuple[Mat, Mat, Mat]:
    p, mod = ring.p, ring.modulus
    s1 = scalar(ring.gamma, mod)
    s2 = (1, p * p * beta % mod, p, 1)
    s3 = (1, p * beta % mod, 1, 1)
    return s1, s2, s3


def omega_bounds(family: str, ring: RingParams) -> tuple[int, int, int]:
    p = ring.p
    if family == "X2":
        return (p ** (ring.n - 1), p ** (ring.n - 1), p * p - 1)
    if family == "X3":
        return (p ** (ring.m - 1) * (p - 1), p ** (ring.m - 1), p)
    raise BadArgumentError(f"no coset index set for family {family}")


OmegaIndex = tuple[int, int, int]


@lru_cache(maxsize=None)
def omega_reps(family: str, param: int, ring: RingParams) -> tuple[tuple[OmegaIndex, Mat], ...]:
    """All representatives s^k = s1^k1 s2^k2 s3^k3 for k in the index box.

    param is eps for X2 and beta for X3.  The torus S is commutative, so the
    factor order is immaterial; representatives are listed in lexicographic
    order of k.
    """
    mod = ring.modulus
    if family == "X2":
        s1, s2, s3 = x2_basis(ring, param)
    else:
        s1, s2, s3 = x3_basis(ring, param)
    b1, b2, b3 = omega_bounds(family, ring)
    out = []
    a = IDENTITY
    for k1 in range(b1):
        ab = a
        for k2 in range(b2):
            abc = ab
            for k3 in range(b3):
                out.append(((k1, k2, k3), abc))
                abc = mat_mul(abc, s3, mod)
            ab = mat_mul(ab, s2, mod)
        a = mat_mul(a, s1, mod)
    return tuple(out)


@lru_cache(maxsize=None)
def sigma_exponents(beta: int, ring: RingParams) -> tuple[int, int]:
    """(sigma1, sigma2) with s3^p = s1^sigma1 s2^sigma2 in the ramified torus."""
    p, mod = ring.p, ring.modulus
    s1, s2, s3 = x3_basis(ring, beta)
    target = mat_pow(s3, p, mod)
    ord2 = p ** (ring.l - 1)
    powers2 = {}
    y = IDENTITY
    for k2 in range(ord2):
        powers2[y] = k2
        y = mat_mul(y, s2, mod)
    x = IDENTITY
    s1_inv = mat_inv(s1, mod)
    probe = target
    for k1 in range(ring.unit_order):
        k2 = powers2.get(probe)
        if k2 is not None:
            return (k1, k2)
        probe = mat_mul(s1_inv, probe, mod)
    raise ConstructionError("s3^p not in <s1> x <s2>")


def _in_km_and_s(y: Mat, family: str, param: int, ring: RingParams) -> bool:
    p, m, mod = ring.p, ring.m, ring.modulus
    q = p**m
    a, b, c, d = y
    if (a - 1) % q or b % q or c % q or (d - 1) % q:
        return False
    if family == "X2":
        return d == a and b == param * c % mod
    return d == a and b == p * param * c % mod


def find_h(family: str, alpha: int, param: int, r: int, ring: RingParams) -> OmegaIndex:
    """The unique index h with (-alpha/r, -param/r; -1/r, -alpha/r) in (K_m n S) s^h.

    param is eps (X2) or beta (X3; the top-right entry carries the extra p).
    For X2 at odd l the candidate box is restricted to h1, h2 < p^(m-1).
    """
    p, mod = ring.p, ring.modulus
    if r % p == 0:
        raise NonUnitError("r must be prime to p")
    if family == "X3" and alpha % p == 0:
        raise NonUnitError("alpha must be prime to p in the ramified family")
    rinv = ring.inv(r)
    if family == "X2":
        target = (
            -alpha * rinv % mod,
            -param * rinv % mod,
            -rinv % mod,
            -alpha * rinv % mod,
        )
    else:
        target = (
            -alpha * rinv % mod,
            -p * param * rinv % mod,
            -rinv % mod,
            -alpha * rinv % mod,
        )
    limit = p ** (ring.m - 1)
    restrict = family == "X2" and ring.l % 2 == 1
    matches = []
    for k, rep in omega_reps(family, param, ring):
        if restrict and (k[0] >= limit or k[1] >= limit):
            continue
        y = mat_mul(target, mat_inv(rep, mod), mod)
        if _in_km_and_s(y, family, param, ring):
            matches.append(k)
    if not matches:
        raise NotFoundError(f"no coset index matches {target}")
    if len(matches) > 1:
        raise NotUniqueError(f"several coset indices match {target}: {matches}")
    return matches[0]


# ---------------------------------------------------------------------------
# conjugacy classes


@dataclass(frozen=True)
class ConjClasses:
    """Conjugacy classes of a subgroup, as index map + member lists."""

    spec: SubgroupSpec
    index: dict[Mat, int]
    classes: tuple[tuple[Mat, ...], ...]

    @property
    def reps(self) -> list[Mat]:
        return [cls[0] for cls in self.classes]

    def sizes(self) -> list[int]:
        return [len(cls) for cls in self.classes]


@lru_cache(maxsize=None)
def conjugacy_classes(spec: SubgroupSpec) -> ConjClasses:
    mod = spec.ring.modulus
    gens = spec.generators()
    pairs = [(g, mat_inv(g, mod)) for g in gens]
    index: dict[Mat, int] = {}
    classes: list[tuple[Mat, ...]] = []
    for x in spec.elements():
        if x in index:
            continue
        cid = len(classes)
        index[x] = cid
        members = [x]
        stack = [x]
        while stack:
            y = stack.pop()
            for g, ginv in pairs:
                z = mat_mul(mat_mul(g, y, mod), ginv, mod)
                if z not in index:
                    index[z] = cid
                    members.append(z)
                    stack.append(z)
        classes.append(tuple(members))
    return ConjClasses(spec, index, tuple(classes))

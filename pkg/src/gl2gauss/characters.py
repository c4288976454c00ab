"""Characters of Z/p^l Z and of the stabilizer subgroups of GL2(Z/p^l Z).

Value convention: every linear character evaluates to a root of unity inside
the session ring Z[zeta_N], so evaluators expose both `exp_of` (the exponent
of zeta_N, an int - the fast path used by all big sums) and `value` (the
canonical CycElem).

The fixed injective additive character lam has lam(1) = zeta_{p^l}; the
session additive character e has e(1) = zeta_{p^l}^r.  Multiplicative
characters are stored as an exponent c on the canonical unit-group generator
g, i.e. chi(g) = zeta_{p^(l-1)(p-1)}^c.

Characters written "pinned" are only constrained on the subgroup 1 + p^n Z;
the stored extension to the full unit group is a deterministic labeling
convention (see `unit_char_pinned`), and every identity checked downstream
pairs a character with sums built from the same object, so the convention
cancels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

from .cyclotomic import CycElem
from .errors import (
    BadArgumentError,
    DecompositionError,
    DivisibilityError,
    InexactDivisionError,
    NotInSubgroupError,
    TooLargeError,
    UnsupportedFamilyError,
)
from .group import (
    DEFAULT_ENUM_CAP,
    ConjClasses,
    Mat,
    OmegaIndex,
    SubgroupSpec,
    conjugacy_classes,
    mat_det,
    mat_inv,
    mat_mul,
    mat_tr,
    omega_bounds,
    omega_reps,
    sigma_exponents,
)
from .residue import RingParams, legendre, valuation

# ---------------------------------------------------------------------------
# characters of the base ring


@dataclass(frozen=True)
class AddChar:
    """Additive character e(x) = zeta_{p^l}^(r x); r = 1 is the fixed lam."""

    r: int
    ring: RingParams

    def __post_init__(self) -> None:
        if self.r % self.ring.modulus == 0:
            raise BadArgumentError("additive character must be nontrivial")

    @property
    def scale(self) -> int:
        return self.ring.conductor // self.ring.modulus

    def exp_of(self, x: int) -> int:
        return self.scale * self.r * x % self.ring.conductor

    def value(self, x: int) -> CycElem:
        return self.ring.cyc.zeta(self.exp_of(x))

    __call__ = value

    def lowered(self) -> "AddChar":
        """The level-(l-1) character with e'(1) = zeta_{p^(l-1)}^(r/p); needs p | r."""
        if self.r % self.ring.p:
            raise BadArgumentError("r must be divisible by p to lower the level")
        return AddChar(self.r // self.ring.p, self.ring.lower())


@dataclass(frozen=True)
class MultChar:
    """Multiplicative character chi(g) = zeta_{p^(l-1)(p-1)}^c on the unit group."""

    c: int
    ring: RingParams

    @property
    def scale(self) -> int:
        return self.ring.conductor // self.ring.unit_order

    def exp_of(self, x: int) -> int:
        return self.scale * self.c * self.ring.dlog(x) % self.ring.conductor

    def value(self, x: int) -> CycElem:
        return self.ring.cyc.zeta(self.exp_of(x))

    __call__ = value

    def __mul__(self, other: "MultChar") -> "MultChar":
        if other.ring != self.ring:
            raise BadArgumentError("characters live on different rings")
        return MultChar((self.c + other.c) % self.ring.unit_order, self.ring)

    def __pow__(self, k: int) -> "MultChar":
        return MultChar(self.c * k % self.ring.unit_order, self.ring)

    def conductor(self) -> int:
        """Smallest s such that the character factors through (Z/p^s Z)^x."""
        if self.c == 0:
            return 0
        return max(1, self.ring.l - int(valuation(self.c, self.ring.p)))

    def is_primitive(self) -> bool:
        return self.conductor() == self.ring.l

    def factors_through(self, s: int) -> bool:
        return self.conductor() <= s

    def reduce_to(self, s: int) -> "MultChar":
        """The character of (Z/p^s Z)^x inducing this one (s >= 2)."""
        if not self.factors_through(s):
            raise BadArgumentError("character does not factor through this level")
        low = RingParams(self.ring.p, s)
        drop = self.ring.p ** (self.ring.l - s)
        c_low = (self.c // drop) * self.ring.dlog(low.g) % low.unit_order
        return MultChar(c_low, low)


def additive_char(ring: RingParams, r: int) -> AddChar:
    return AddChar(r % ring.modulus, ring)


def eval_add(e: AddChar, x: int) -> CycElem:
    """e(x) as an exact root of unity."""
    return e.value(x)


@lru_cache(maxsize=None)
def _pin_data(ring: RingParams) -> int:
    # dlog(1 + p^n) = p^(n-1)(p-1) * w with w a unit mod p^m; returns w.
    p, m, n = ring.p, ring.m, ring.n
    d = ring.dlog((1 + p**n) % ring.modulus)
    e = p ** (n - 1) * (p - 1)
    if d % e:
        raise DivisibilityError("dlog(1+p^n) not divisible by p^(n-1)(p-1)")
    return (d // e) % p**m


def unit_char_pinned(t: int, ring: RingParams, full_tame: bool = False) -> MultChar:
    """The extension of the character pinned by chi(1+p^n) = zeta_{p^m}^t.

    The canonical choice is the smallest nonnegative generator exponent c
    satisfying the pin.  With full_tame=True, c is additionally required to
    be coprime to p-1, so that the powers chi^(p^m k) sweep out all
    characters of the quotient unit group exactly once (needed when the
    character seeds a family enumeration).
    """
    p, m = ring.p, ring.m
    w = _pin_data(ring)
    c = t * pow(w, -1, p**m) % p**m
    if full_tame:
        while math.gcd(c, p - 1) != 1:
            c += p**m
    return MultChar(c, ring)


def make_mu_alpha(alpha: int, ring: RingParams) -> MultChar:
    """The determinant-twist character with mu(1+p^n) = lam(p^n alpha)."""
    if not 0 <= alpha < ring.p**ring.m:
        raise BadArgumentError(f"alpha out of range [0, p^m)")
    return unit_char_pinned(alpha, ring)


def make_lambda_prime(u: int, ring: RingParams) -> MultChar:
    """The seed character with lam'(1+p^n) = lam(p^n u); full tame order."""
    return unit_char_pinned(u % ring.p**ring.m, ring, full_tame=True)


def injective_det_char(ring: RingParams) -> MultChar:
    """An injective character nu0 with nu0(1 + p^(l-1)) = zeta_p."""
    p, l = ring.p, ring.l
    d = ring.dlog((1 + p ** (l - 1)) % ring.modulus)
    e = p ** (l - 2) * (p - 1)
    if d % e:
        raise DivisibilityError("dlog(1+p^(l-1)) not divisible")
    w = (d // e) % p
    c = pow(w, -1, p)
    while math.gcd(c, ring.unit_order) != 1:
        c += p
    return MultChar(c, ring)


# ---------------------------------------------------------------------------
# phi_A on the congruence subgroup K_n


def phi_A_exp(A: Mat, X: Mat, ring: RingParams) -> int:
    """Exponent of lam(Tr(A(X-I))) as a power of zeta_N; X must lie in K_n."""
    mod, q = ring.modulus, ring.p**ring.n
    a, b, c, d = X
    if (a - 1) % q or b % q or c % q or (d - 1) % q:
        raise NotInSubgroupError(f"{X} is not in K_{ring.n}")
    t = (A[0] * (a - 1) + A[1] * c + A[2] * b + A[3] * (d - 1)) % mod
    return (ring.conductor // mod) * t % ring.conductor


def eval_phi_A(A: Mat, X: Mat, ring: RingParams) -> CycElem:
    """The linear character phi_A(X) = lam(Tr(A(X-I))) on K_n."""
    return ring.cyc.zeta(phi_A_exp(A, X, ring))


# ---------------------------------------------------------------------------
# binomial constant delta


def delta_value(family: str, param: int, ring: RingParams) -> tuple[int, bool]:
    """The unit delta with p^n delta (X2) resp. p^(m+1) delta (X3) equal to
    the odd-index binomial tail of the torus generator power.

    Returns (delta mod p^l, is_unit).  The sum is evaluated as an exact
    integer and the stated divisibility is checked, so delta is canonical.
    """
    p = ring.p
    if family == "X2":
        top, base, power = ring.n - 1, param, ring.n
    elif family == "X3":
        top, base, power = ring.m - 1, p * param, ring.m + 1
    else:
        raise BadArgumentError(f"no delta for family {family}")
    total = 0
    for t in range(1, p**top + 1, 2):
        total += math.comb(p**top, t) * p**t * base ** ((t + 1) // 2)
    total *= 2
    q = p**power
    if total % q:
        raise DivisibilityError(f"binomial sum not divisible by p^{power}")
    delta = (total // q) % ring.modulus
    return delta, delta % p != 0


# ---------------------------------------------------------------------------
# character specifications


@dataclass(frozen=True)
class CharSpec:
    """One irreducible character: a family tag plus its parameters.

    X1: alpha, u, i, j ints with 0<=i,j<p^(n-1)(p-1);
    X2: alpha, eps, i an index triple in the Omega box;
    X3: alpha, beta, i=(i1,i2) with 0<=i1,i2<p^(n-m), j in the Omega box;
    X4: twist power i with 0<=i<p (base character supplied separately).
    """

    family: str
    ring: RingParams
    alpha: int = 0
    u: int | None = None
    eps: int | None = None
    beta: int | None = None
    i: tuple[int, ...] = ()
    j: tuple[int, ...] = ()
    twist: int | None = None


def x1_spec(ring: RingParams, alpha: int, u: int, i: int, j: int) -> CharSpec:
    p, m = ring.p, ring.m
    bound = ring.p ** (ring.n - 1) * (p - 1)
    if not (0 <= alpha < p**m and 1 <= u <= (p**m - 1) // 2 and u % p):
        raise BadArgumentError("alpha or u out of range")
    if not (0 <= i < bound and 0 <= j < bound):
        raise BadArgumentError("i or j out of range")
    return CharSpec("X1", ring, alpha=alpha, u=u, i=(i,), j=(j,))


def x2_spec(ring: RingParams, alpha: int, eps: int, i: OmegaIndex) -> CharSpec:
    p, m = ring.p, ring.m
    if not (0 <= alpha < p**m and 0 <= eps < p**m and legendre(eps, p) == -1):
        raise BadArgumentError("alpha/eps out of range or eps a residue")
    b = omega_bounds("X2", ring)
    if not all(0 <= i[t] < b[t] for t in range(3)):
        raise BadArgumentError(f"index {i} outside Omega box {b}")
    return CharSpec("X2", ring, alpha=alpha, eps=eps, i=tuple(i))


def x3_spec(
    ring: RingParams, alpha: int, beta: int, i: tuple[int, int], j: OmegaIndex
) -> CharSpec:
    p, m, n = ring.p, ring.m, ring.n
    if not (0 <= alpha < p**m and 0 <= beta < p ** (m - 1)):
        raise BadArgumentError("alpha or beta out of range")
    if not all(0 <= t < p ** (n - m) for t in i):
        raise BadArgumentError(f"index {i} outside [0, p^(n-m))^2")
    b = omega_bounds("X3", ring)
    if not all(0 <= j[t] < b[t] for t in range(3)):
        raise BadArgumentError(f"index {j} outside Omega box {b}")
    return CharSpec("X3", ring, alpha=alpha, beta=beta, i=tuple(i), j=tuple(j))


def degree(spec: CharSpec) -> int:
    p, l = spec.ring.p, spec.ring.l
    if spec.family == "X1":
        return p ** (l - 1) * (p + 1)
    if spec.family == "X2":
        return p ** (l - 1) * (p - 1)
    if spec.family == "X3":
        return p ** (l - 2) * (p * p - 1)
    raise UnsupportedFamilyError("degree of an X4 character comes from its base")


def stabilizer_spec(spec: CharSpec) -> SubgroupSpec:
    """The subgroup the character is induced from."""
    ring = spec.ring
    if spec.family == "X1":
        return SubgroupSpec("T0", ring, "X1")
    if spec.family == "X2":
        return SubgroupSpec("T", ring, "X2", eps=spec.eps)
    if spec.family == "X3":
        return SubgroupSpec("T0", ring, "X3", beta=spec.beta)
    raise UnsupportedFamilyError("X4 characters are not induced at this level")


def orbit_matrices(spec: CharSpec) -> tuple[Mat, Mat]:
    """(A, A0): the pinning matrix and its alpha-free part."""
    a = spec.alpha
    if spec.family == "X1":
        return ((a + spec.u, 0, 0, a), (spec.u, 0, 0, 0))
    if spec.family == "X2":
        return ((a, spec.eps, 1, a), (0, spec.eps, 1, 0))
    if spec.family == "X3":
        p = spec.ring.p
        return ((a, p * spec.beta, 1, a), (0, p * spec.beta, 1, 0))
    raise UnsupportedFamilyError("no pinning matrix for X4")


# ---------------------------------------------------------------------------
# torus decompositions (memoized per family parameters)


class _CosetSplitter:
    """Splits X = Y * s^k with Y in the congruence part and k in the Omega box."""

    def __init__(self, family: str, param: int, ring: RingParams, depth: int):
        self.family, self.param, self.ring, self.depth = family, param, ring, depth
        mod = ring.modulus
        self.reps = omega_reps(family, param, ring)
        self._inv = [(k, mat_inv(rep, mod)) for k, rep in self.reps]
        self._cache: dict[Mat, tuple[OmegaIndex, Mat]] = {}

    def _is_congruence_part(self, y: Mat) -> bool:
        q = self.ring.p**self.depth
        if self.family == "X2":
            # K_n
            return all(v % q == 0 for v in (y[0] - 1, y[1], y[2], y[3] - 1))
        # X3: the normal block subgroup N
        p, m, n = self.ring.p, self.ring.m, self.ring.n
        return (
            (y[0] - 1) % p**m == 0
            and (y[3] - 1) % p**m == 0
            and y[2] % p**m == 0
            and y[1] % p**n == 0
        )

    def split(self, x: Mat) -> tuple[OmegaIndex, Mat]:
        found = self._cache.get(x)
        if found is not None:
            return found
        mod = self.ring.modulus
        for k, rep_inv in self._inv:
            y = mat_mul(x, rep_inv, mod)
            if self._is_congruence_part(y):
                self._cache[x] = (k, y)
                return (k, y)
        raise DecompositionError(f"{x} does not split against the coset table")


@lru_cache(maxsize=None)
def _splitter(family: str, param: int, ring: RingParams) -> _CosetSplitter:
    depth = ring.n if family == "X2" else ring.m
    return _CosetSplitter(family, param, ring, depth)


# ---------------------------------------------------------------------------
# the linear characters psi of the stabilizers


class LinearPsi:
    """Common interface: exp_of(X) -> exponent of zeta_N, value(X) -> CycElem."""

    domain: SubgroupSpec
    ring: RingParams

    def exp_of(self, x: Mat) -> int:
        raise NotImplementedError

    def value(self, x: Mat) -> CycElem:
        return self.ring.cyc.zeta(self.exp_of(x))

    __call__ = value


class X1Psi(LinearPsi):
    """psi(X) = lam'(a)^(1+p^m i) lam'(d)^(p^m j) on the block subgroup T0."""

    def __init__(self, spec: CharSpec):
        ring = spec.ring
        self.ring = ring
        self.domain = SubgroupSpec("T0", ring, "X1")
        self.lam = make_lambda_prime(spec.u, ring)
        q = ring.p**ring.m
        self.e1 = 1 + q * spec.i[0]
        self.e2 = q * spec.j[0]

    def exp_of(self, x: Mat) -> int:
        if not self.domain.contains(x):
            raise NotInSubgroupError(f"{x} not in the X1 stabilizer block")
        return (
            self.e1 * self.lam.exp_of(x[0]) + self.e2 * self.lam.exp_of(x[3])
        ) % self.ring.conductor


class X2Psi(LinearPsi):
    """The linear extension on K_n S: psi_i for even l, phi_i for odd l."""

    def __init__(self, spec: CharSpec):
        ring = spec.ring
        self.ring = ring
        p, l, m, n, N = ring.p, ring.l, ring.m, ring.n, ring.conductor
        kind = "T" if l % 2 == 0 else "L"
        self.domain = SubgroupSpec(kind, ring, "X2", eps=spec.eps)
        self.split = _splitter("X2", spec.eps, ring).split
        self.A0 = (0, spec.eps, 1, 0)
        delta, _ = delta_value("X2", spec.eps, ring)
        i1, i2, i3 = spec.i
        # value exponents at s1, s2, s3
        top = p ** (n - 1)  # = p^(m-1) for even l, p^m for odd l
        self.E = (
            N // top * i1 % N if top > 1 else 0,
            N // p ** (l - 1) * (delta + p**m * i2) % N,
            N // (p * p - 1) * i3 % N,
        )

    def exp_of(self, x: Mat) -> int:
        if not self.domain.contains(x):
            raise NotInSubgroupError(f"{x} not in the X2 stabilizer domain")
        k, y = self.split(x)
        base = phi_A_exp(self.A0, y, self.ring)
        e = self.E
        return (base + k[0] * e[0] + k[1] * e[1] + k[2] * e[2]) % self.ring.conductor


class X3Psi(LinearPsi):
    """psi_ij on T0 = N<s>, glued from phi_i on N and values at s1, s2, s3."""

    def __init__(self, spec: CharSpec):
        ring = spec.ring
        self.ring = ring
        p, l, m, n, N = ring.p, ring.l, ring.m, ring.n, ring.conductor
        self.domain = SubgroupSpec("T0", ring, "X3", beta=spec.beta)
        self.split = _splitter("X3", spec.beta, ring).split
        self.beta = spec.beta
        self.i1, self.i2 = spec.i
        delta, _ = delta_value("X3", spec.beta, ring)
        s1e, s2e = sigma_exponents(spec.beta, ring)
        j1, j2, j3 = spec.j
        a = self.i1 + self.i2 + p ** (n - m) * j1
        b = delta + p ** (n - 1) * j2
        e_s1 = N // (p ** (n - 1) * (p - 1)) * a % N
        e_s2 = N // p ** (l - 2) * b % N if l > 2 else 0
        e_s3 = (
            N // (p**n * (p - 1)) * a * s1e + N // p ** (l - 1) * b * s2e + N // p * j3
        ) % N
        self.E = (e_s1, e_s2, e_s3)
        self._scale = N // ring.modulus
        self._mod = ring.modulus

    def _phi_exp(self, y: Mat) -> int:
        # phi_i on N, read off the block coordinates of y
        p, m, n, mod = self.ring.p, self.ring.m, self.ring.n, self._mod
        a = (y[0] - 1) % mod // p**m
        b = y[1] // p**n
        c = y[2] // p**m
        d = (y[3] - 1) % mod // p**m
        t = (
            p ** (2 * m) * (self.i1 * a + self.i2 * d)
            + p ** (m + 1) * self.beta * c
            + p**n * b
        ) % mod
        return self._scale * t % self.ring.conductor

    def exp_of(self, x: Mat) -> int:
        if not self.domain.contains(x):
            raise NotInSubgroupError(f"{x} not in the X3 stabilizer block")
        k, y = self.split(x)
        e = self.E
        return (
            self._phi_exp(y) + k[0] * e[0] + k[1] * e[1] + k[2] * e[2]
        ) % self.ring.conductor


def make_psi(spec: CharSpec) -> LinearPsi:
    """The linear character the family induces from (not for X2 at odd l)."""
    if spec.family == "X1":
        return X1Psi(spec)
    if spec.family == "X2":
        if spec.ring.l % 2:
            raise UnsupportedFamilyError("odd-level X2 uses the virtual character")
        return X2Psi(spec)
    if spec.family == "X3":
        return X3Psi(spec)
    raise UnsupportedFamilyError(f"no linear character for family {spec.family}")


def x2_phi(spec: CharSpec) -> X2Psi:
    """The linear character phi_i on K_(m+1) S for the odd-level X2 family."""
    if spec.ring.l % 2 == 0:
        raise BadArgumentError("x2_phi applies to odd l only")
    return X2Psi(spec)


def eval_psi(spec: CharSpec, x: Mat) -> CycElem:
    """Value of the stabilizer character at x (linear families)."""
    return make_psi(spec).value(x)


# ---------------------------------------------------------------------------
# induction and inner products


def _as_value_fn(f) -> Callable[[Mat], CycElem]:
    if hasattr(f, "value"):
        return f.value
    return f


def induced_value(
    H: SubgroupSpec,
    psi,
    x: Mat,
    G: SubgroupSpec,
    cap: int = DEFAULT_ENUM_CAP,
) -> CycElem:
    """ind_H^G psi at x: (1/|H|) sum over g in G of psi(g x g^-1), zero-extended."""
    ring = G.ring
    mod = ring.modulus
    members = G.elements(cap)
    if hasattr(psi, "exp_of"):
        counts: dict[int, int] = {}
        for g in members:
            y = mat_mul(mat_mul(g, x, mod), mat_inv(g, mod), mod)
            if H.contains(y):
                e = psi.exp_of(y)
                counts[e] = counts.get(e, 0) + 1
        total = ring.cyc.from_exponents(counts)
    else:
        fn = _as_value_fn(psi)
        total = ring.cyc.zero()
        for g in members:
            y = mat_mul(mat_mul(g, x, mod), mat_inv(g, mod), mod)
            if H.contains(y):
                total = total + fn(y)
    return total.divide_exact(H.order())


@dataclass
class ClassFunction:
    """A function on conjugacy classes of a subgroup, with exact values."""

    classes: ConjClasses
    values: list[CycElem]

    def __call__(self, x: Mat) -> CycElem:
        return self.values[self.classes.index[x]]

    value = __call__

    def scaled(self, k: int) -> "ClassFunction":
        return ClassFunction(self.classes, [v * k for v in self.values])

    def divided(self, k: int) -> "ClassFunction":
        return ClassFunction(self.classes, [v.divide_exact(k) for v in self.values])

    def minus(self, other: "ClassFunction") -> "ClassFunction":
        assert self.classes is other.classes
        return ClassFunction(
            self.classes, [a - b for a, b in zip(self.values, other.values)]
        )


def induced_class_function(
    H: SubgroupSpec, psi, G: SubgroupSpec, cap: int = DEFAULT_ENUM_CAP
) -> ClassFunction:
    """ind_H^G psi as a class function, via class-wise intersection sums.

    Same sums as `induced_value`, grouped: the conjugates of x hitting H are
    exactly the members of the class of x in H, each reached |G|/|class| times.
    """
    ring = G.ring
    cc = conjugacy_classes(G)
    counters: list[dict[int, int]] = [dict() for _ in cc.classes]
    index = cc.index
    for y in H.elements(cap):
        cid = index.get(y)
        if cid is None:
            raise NotInSubgroupError("H is not contained in G")
        e = psi.exp_of(y)
        counts = counters[cid]
        counts[e] = counts.get(e, 0) + 1
    ratio = G.order() // H.order()
    values = []
    for counts, cls in zip(counters, cc.classes):
        total = ring.cyc.from_exponents(counts) * ratio
        values.append(total.divide_exact(len(cls)))
    return ClassFunction(cc, values)


def inner_product(
    f,
    g,
    D: SubgroupSpec,
    cap: int = DEFAULT_ENUM_CAP,
) -> CycElem:
    """<f, g>_D = (1/|D|) sum f(x) conj(g(x)), exact."""
    fv, gv = _as_value_fn(f), _as_value_fn(g)
    total = D.ring.cyc.zero()
    for x in D.elements(cap):
        total = total + fv(x) * gv(x).conj()
    return total.divide_exact(D.order())


def inner_product_classfn(f: ClassFunction, g: ClassFunction) -> CycElem:
    """Inner product of two class functions over the same subgroup."""
    assert f.classes is g.classes
    ring = f.classes.spec.ring
    total = ring.cyc.zero()
    for cls, a, b in zip(f.classes.classes, f.values, g.values):
        total = total + a * b.conj() * len(cls)
    return total.divide_exact(f.classes.spec.order())


# ---------------------------------------------------------------------------
# the virtual character for X2 at odd level


class X2VirtualPsi:
    """The degree-p character psi_i of T = K_m S at odd l, represented as
    (1/p) ind phi_i' - ind phi_i with phi_i' the restriction of phi_i to the
    middle normal subgroup.  Values come from induced class functions over T.
    """

    def __init__(self, spec: CharSpec, cap: int = DEFAULT_ENUM_CAP):
        ring = spec.ring
        if ring.l % 2 == 0:
            raise BadArgumentError("the virtual character exists at odd l only")
        self.spec = spec
        self.ring = ring
        self.phi = x2_phi(spec)
        self.T = SubgroupSpec("T", ring, "X2", eps=spec.eps)
        self.N1 = SubgroupSpec("Nj", ring, "X2", eps=spec.eps, level=ring.m + 1)
        self.L = SubgroupSpec("L", ring, "X2", eps=spec.eps)
        self._cap = cap
        self._table: ClassFunction | None = None

    @property
    def domain(self) -> SubgroupSpec:
        return self.T

    def class_function(self) -> ClassFunction:
        if self._table is None:
            ind1 = induced_class_function(self.N1, self.phi, self.T, self._cap)
            ind2 = induced_class_function(self.L, self.phi, self.T, self._cap)
            self._table = ind1.divided(self.ring.p).minus(ind2)
        return self._table

    def value(self, x: Mat) -> CycElem:
        return self.class_function()(x)

    __call__ = value

    def value_literal(self, x: Mat) -> CycElem:
        """Definition-level evaluation: two literal induction sums over T."""
        a = induced_value(self.N1, self.phi, x, self.T, self._cap)
        b = induced_value(self.L, self.phi, x, self.T, self._cap)
        return a.divide_exact(self.ring.p) - b


def eval_virtual(spec: CharSpec, x: Mat, cap: int = DEFAULT_ENUM_CAP) -> CycElem:
    """Value of the odd-level X2 stabilizer character at x in T."""
    if spec.family != "X2":
        raise UnsupportedFamilyError("virtual characters exist for X2 only")
    return X2VirtualPsi(spec, cap).value_literal(x)


# ---------------------------------------------------------------------------
# family enumeration (for the count checks)


def orbit_parameters(family: str, ring: RingParams) -> list[tuple]:
    """All (alpha, seed) orbit labels for the family."""
    p, m = ring.p, ring.m
    out = []
    if family == "X1":
        for alpha in range(p**m):
            for u in range(1, (p**m - 1) // 2 + 1):
                if u % p:
                    out.append((alpha, u))
    elif family == "X2":
        for alpha in range(p**m):
            for eps in range(p**m):
                if legendre(eps, p) == -1:
                    out.append((alpha, eps))
    elif family == "X3":
        for alpha in range(p**m):
            for beta in range(p ** (m - 1)):
                out.append((alpha, beta))
    else:
        raise BadArgumentError(f"unknown family {family}")
    return out


def orbit_specs(family: str, alpha: int, seed: int, ring: RingParams) -> list[CharSpec]:
    """Every CharSpec in one orbit."""
    p, m, n = ring.p, ring.m, ring.n
    out: list[CharSpec] = []
    if family == "X1":
        bound = p ** (n - 1) * (p - 1)
        for i in range(bound):
            for j in range(bound):
                out.append(x1_spec(ring, alpha, seed, i, j))
    elif family == "X2":
        b = omega_bounds("X2", ring)
        for k1 in range(b[0]):
            for k2 in range(b[1]):
                for k3 in range(b[2]):
                    out.append(x2_spec(ring, alpha, seed, (k1, k2, k3)))
    elif family == "X3":
        b = omega_bounds("X3", ring)
        for i1 in range(p ** (n - m)):
            for i2 in range(p ** (n - m)):
                for j1 in range(b[0]):
                    for j2 in range(b[1]):
                        for j3 in range(b[2]):
                            out.append(
                                x3_spec(ring, alpha, seed, (i1, i2), (j1, j2, j3))
                            )
    else:
        raise BadArgumentError(f"unknown family {family}")
    return out


def family_count_formula(family: str, ring: RingParams) -> int:
    """|X_k| by the closed count formulas."""
    p, l = ring.p, ring.l
    if family == "X1":
        return p ** (2 * l - 3) * (p - 1) ** 3 // 2
    if family == "X2":
        return p ** (2 * l - 3) * (p - 1) * (p * p - 1) // 2
    if family == "X3":
        return p ** (2 * l - 2) * (p - 1)
    raise BadArgumentError(f"no count formula for family {family}")


def orbit_size_formula(family: str, ring: RingParams) -> int:
    p, n = ring.p, ring.n
    if family == "X1":
        return p ** (2 * n - 2) * (p - 1) ** 2
    if family == "X2":
        return p ** (2 * n - 2) * (p * p - 1)
    if family == "X3":
        return p ** (2 * n - 1) * (p - 1)
    raise BadArgumentError(f"no orbit size formula for family {family}")

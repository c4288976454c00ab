"""Gauss sums: over the base ring Z/p^l Z (brute-force and closed-form) and
over GL2(Z/p^l Z) for every character family, with definition-level oracles.

The closed forms here mirror the stabilizer structure: the split family
factors into two base-ring Gauss sums; the nonsplit and ramified families
collapse, after a stationary-phase cancellation over the congruence part, to
a single coset index h (or a short sum of indices at odd level).  Every
closed path has a brute-force partner summing over actual group elements,
and exact equality in Z[zeta_N] is the only accepted notion of agreement.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .cyclotomic import CycElem, CycRing
from .errors import (
    BadArgumentError,
    BadConductorError,
    ConstructionError,
    TooLargeError,
    UnsupportedFamilyError,
)
from .group import (
    DEFAULT_ENUM_CAP,
    Mat,
    SubgroupSpec,
    conjugacy_classes,
    enumerate_gl2_prime,
    find_h,
    group_order,
    mat_det,
    mat_tr,
    omega_reps,
    scalar,
    sigma_exponents,
)
from .characters import (
    AddChar,
    CharSpec,
    ClassFunction,
    MultChar,
    X2VirtualPsi,
    _pin_data,
    degree,
    delta_value,
    induced_class_function,
    injective_det_char,
    make_lambda_prime,
    make_mu_alpha,
    make_psi,
    stabilizer_spec,
    x2_phi,
)
from .padic import odoni_sigma
from .residue import RingParams, valuation


@dataclass(frozen=True)
class GaussValue:
    """An exact Gauss-sum value, optionally with a complex embedding."""

    exact: CycElem
    embedding: complex | None = None

    def with_embedding(self, dps: int = 30) -> "GaussValue":
        return GaussValue(self.exact, self.exact.embed(dps))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GaussValue):
            return self.exact == other.exact
        return NotImplemented


@dataclass(frozen=True)
class DeltaUnit:
    """The binomial-tail constant delta of a torus family."""

    value: int
    family: str
    is_unit: bool


def delta_unit(family: str, param: int, ring: RingParams) -> DeltaUnit:
    value, unit = delta_value(family, param, ring)
    if family == "X2" and not unit:
        raise ConstructionError("nonsplit-family delta must be a unit")
    return DeltaUnit(value, family, unit)


# ---------------------------------------------------------------------------
# Gauss sums over the base ring


def g_brute(mu: MultChar, e: AddChar, ring: RingParams | None = None,
            cap: int = DEFAULT_ENUM_CAP) -> GaussValue:
    """sum over units x of mu(x) e(x), by walking powers of the generator."""
    ring = ring or e.ring
    if ring.unit_order > cap:
        raise TooLargeError(f"{ring.unit_order} units exceed cap {cap}")
    N, mod = ring.conductor, ring.modulus
    mscale = N // ring.unit_order * mu.c
    escale = N // mod * e.r
    counts: dict[int, int] = {}
    x = 1
    for t in range(ring.unit_order):
        ex = (mscale * t + escale * x) % N
        counts[ex] = counts.get(ex, 0) + 1
        x = x * ring.g % mod
    return GaussValue(ring.cyc.from_exponents(counts))


def _g_level_one(c1: int, r1: int, p: int, cyc: CycRing) -> CycElem:
    # sum over F_p^x of chi(x) zeta_p^(r1 x), chi(g1) = zeta_(p-1)^c1
    g1 = _smallest_primitive_root(p)
    N = cyc.N
    counts: dict[int, int] = {}
    x = 1
    for t in range(p - 1):
        ex = (N // (p - 1) * c1 * t + N // p * r1 * x) % N
        counts[ex] = counts.get(ex, 0) + 1
        x = x * g1 % p
    return cyc.from_exponents(counts)


def _g_primitive(mu: MultChar, e: AddChar, ring: RingParams) -> CycElem:
    # stationary phase at the unique unit coset where the multiplicative and
    # additive phases cancel
    p, l, m, n, N = ring.p, ring.l, ring.m, ring.n, ring.conductor
    r = e.r % ring.modulus
    w = mu.c * _pin_data(ring) % p**m  # mu(1 + p^n z) = zeta_{p^m}^(w z)
    a = w * pow(r, -1, p**m) % p**m
    y0 = (-a) % ring.modulus
    base = (mu.exp_of(y0) + e.exp_of(y0)) % N
    if l % 2 == 0:
        return ring.cyc.zeta(base) * p**m
    counts: dict[int, int] = {}
    step = e.scale * r * y0 * p**m
    for t in range(p):
        ex = (base + mu.exp_of((1 + p**m * t) % ring.modulus) + step * t) % N
        counts[ex] = counts.get(ex, 0) + 1
    return ring.cyc.from_exponents(counts) * p**m


def g_closed(mu: MultChar, e: AddChar, ring: RingParams | None = None) -> GaussValue:
    """Closed-form Gauss sum over the base ring.

    Dispatch: a p-power in r pushes the sum down p-adic levels (or kills it
    when the character does not descend); a unit r kills imprimitive
    characters and leaves the stationary-phase value for primitive ones.
    """
    ring = ring or e.ring
    p, l = ring.p, ring.l
    r = e.r % ring.modulus
    v = int(valuation(r, p))
    cyc = ring.cyc
    if v == 0:
        if not mu.is_primitive():
            return GaussValue(cyc.zero())
        return GaussValue(_g_primitive(mu, e, ring))
    s = l - v
    if not mu.factors_through(s):
        return GaussValue(cyc.zero())
    r_low = r // p**v
    if s == 1:
        drop = p ** (l - 1)
        g1 = _smallest_primitive_root(p)
        c1 = (mu.c // drop) * ring.dlog(g1) % (p - 1)  # exponent of chi(g1)
        low = _g_level_one(c1, r_low, p, cyc)
        return GaussValue(low * p**v)
    low_ring = RingParams(p, s)
    mu_low = mu.reduce_to(s)
    e_low = AddChar(r_low % low_ring.modulus, low_ring)
    val = g_closed(mu_low, e_low, low_ring).exact
    return GaussValue(val.lift_to(ring.conductor) * p**v)


@lru_cache(maxsize=None)
def _smallest_primitive_root(p: int) -> int:
    for cand in range(2, p):
        seen, y = set(), 1
        for _ in range(p - 1):
            y = y * cand % p
            seen.add(y)
        if len(seen) == p - 1:
            return cand
    raise ConstructionError(f"no primitive root mod {p}")


@lru_cache(maxsize=None)
def _dlog_prime_table(p: int, g1: int) -> dict[int, int]:
    table, y = {}, 1
    for t in range(p - 1):
        table[y] = t
        y = y * g1 % p
    return table


def _dlog_prime(p: int, g1: int, x: int) -> int:
    return _dlog_prime_table(p, g1)[x % p]


# ---------------------------------------------------------------------------
# the normalized primitive value


def odoni_value(ring: RingParams) -> CycElem:
    """The closed value of g_l for the normalized primitive character, r = 1."""
    p, l = ring.p, ring.l
    cyc = ring.cyc
    half = cyc.integer(p ** (l // 2)) if l % 2 == 0 else cyc.integer(p ** ((l - 1) // 2)) * cyc.sqrt_p(p)
    quarter = cyc.root_of_unity(4, (1 - p) // 2)
    if l == 2:
        return half * cyc.root_of_unity(p**l, 1)
    if l == 3:
        return half * cyc.root_of_unity(p**l, 1) * quarter * cyc.root_of_unity(p, (p * p - 1) // 8)
    sigma = int(odoni_sigma(ring))
    value = half * cyc.root_of_unity(p**l, sigma)
    if l % 2:
        value = value * quarter
    return value


def normalized_primitive_chars(ring: RingParams) -> list[MultChar]:
    """All primitive characters with nu(1+p) = zeta_{p^(l-1)}^(-1)."""
    p, l = ring.p, ring.l
    d = ring.dlog((1 + p) % ring.modulus)
    if d % (p - 1):
        raise ConstructionError("dlog(1+p) not divisible by p-1")
    w1 = (d // (p - 1)) % p ** (l - 1)
    c0 = (-pow(w1, -1, p ** (l - 1))) % p ** (l - 1)
    return [MultChar(c0 + p ** (l - 1) * s, ring) for s in range(p - 1)]


def odoni_report(ring: RingParams) -> list[dict]:
    """Compare the closed normalized value against brute force, per character.

    Brute force is authoritative: a False entry records a mismatch, it is
    not patched.
    """
    e = AddChar(1, ring)
    target = odoni_value(ring)
    out = []
    for nu in normalized_primitive_chars(ring):
        brute = g_brute(nu, e, ring).exact
        out.append(
            {
                "exponent": nu.c,
                "matches": brute == target,
                "brute": brute,
                "closed": target,
            }
        )
    return out


# ---------------------------------------------------------------------------
# Gauss sums on the matrix group: closed forms


def _x1_factors(spec: CharSpec) -> tuple[MultChar, MultChar]:
    ring = spec.ring
    q = ring.p**ring.m
    mu = make_mu_alpha(spec.alpha, ring)
    lam = make_lambda_prime(spec.u, ring)
    return mu * lam ** (1 + q * spec.i[0]), mu * lam ** (q * spec.j[0])


def tau_closed(spec: CharSpec, e: AddChar) -> GaussValue:
    """tau_l(chi) by the family closed forms (X1/X2/X3)."""
    ring = spec.ring
    if e.ring != ring:
        raise BadArgumentError("character and additive character on different rings")
    p, l, m, n, N = ring.p, ring.l, ring.m, ring.n, ring.conductor
    mod = ring.modulus
    cyc = ring.cyc
    deg = degree(spec)
    r = e.r % mod
    if spec.family == "X1":
        chi1, chi2 = _x1_factors(spec)
        val = g_closed(chi1, e, ring).exact * g_closed(chi2, e, ring).exact
        return GaussValue(val * (p**l * deg))
    if spec.family == "X4":
        raise UnsupportedFamilyError("use tau_X4 for level-lowered characters")
    if r % p == 0:
        return GaussValue(cyc.zero())
    mu = make_mu_alpha(spec.alpha, ring)
    if spec.family == "X2":
        delta, _ = delta_value("X2", spec.eps, ring)
        reps = dict(omega_reps("X2", spec.eps, ring))
        h = find_h("X2", spec.alpha, spec.eps, r, ring)
        i1, i2, i3 = spec.i
        if l % 2 == 0:
            sh = reps[h]
            ex = (
                mu.exp_of(mat_det(sh, mod))
                + e.exp_of(mat_tr(sh, mod))
                + (N // p ** (m - 1) * i1 * h[0] if m > 1 else 0)
                + N // p ** (l - 1) * (delta + p**m * i2) * h[1]
                + N // (p * p - 1) * i3 * h[2]
            ) % N
            return GaussValue(cyc.zeta(ex) * (p ** (2 * l) * deg))
        # odd level: a p x p block of indices shares the stationary coset
        counts: dict[int, int] = {}
        step = p ** (m - 1)
        for t1 in range(p):
            for t2 in range(p):
                k = (h[0] + step * t1, h[1] + step * t2, h[2])
                sk = reps[k]
                ex = (
                    mu.exp_of(mat_det(sk, mod))
                    + e.exp_of(mat_tr(sk, mod))
                    + N // p**m * i1 * k[0]
                    + N // p ** (l - 1) * (delta + p**m * i2) * k[1]
                    + N // (p * p - 1) * i3 * h[2]
                ) % N
                counts[ex] = counts.get(ex, 0) + 1
        total = cyc.from_exponents(counts)
        return GaussValue(total * (-(p ** (2 * l - 1)) * deg))
    if spec.family == "X3":
        if spec.alpha % p == 0:
            return GaussValue(cyc.zero())
        delta, _ = delta_value("X3", spec.beta, ring)
        s1e, s2e = sigma_exponents(spec.beta, ring)
        reps = dict(omega_reps("X3", spec.beta, ring))
        h = find_h("X3", spec.alpha, spec.beta, r, ring)
        sh = reps[h]
        xh = sh[0]
        i1, i2 = spec.i
        j1, j2, j3 = spec.j
        a = i1 + i2 + p ** (n - m) * j1
        b = delta + p ** (n - 1) * j2
        ex = (
            mu.exp_of(mat_det(sh, mod))
            + e.exp_of(mat_tr(sh, mod))
            + N // (p**n * (p - 1)) * a * (p * h[0] + s1e * h[2])
            + N // p ** (l - 1) * b * (p * h[1] + s2e * h[2])
            + N // p * j3 * h[2]
        ) % N
        scale = N // mod
        tsums = []
        for ia in (i1, i2):
            counts = {}
            for t in range(p ** (n - m)):
                et = (
                    mu.exp_of((1 + p**m * t) % mod)
                    + scale * (p ** (2 * m) * ia * t) % N
                    + e.scale * e.r * p**m * xh * t
                ) % N
                counts[et] = counts.get(et, 0) + 1
            tsums.append(cyc.from_exponents(counts))
        val = cyc.zeta(ex) * tsums[0] * tsums[1]
        return GaussValue(val * (p ** (l + 2 * m) * deg))
    raise UnsupportedFamilyError(f"unknown family {spec.family}")


# ---------------------------------------------------------------------------
# oracles


def tau_oracle_subgroup(spec: CharSpec, e: AddChar, cap: int = DEFAULT_ENUM_CAP) -> GaussValue:
    """tau via Frobenius reciprocity: an exact sum over the stabilizer.

    For the linear families, tau = [G:H] * sum_{x in H} mu(det x) psi(x) e(Tr x).
    The odd-level nonsplit family splits into its two induction components.
    """
    ring = spec.ring
    N, mod = ring.conductor, ring.modulus
    mu = make_mu_alpha(spec.alpha, ring)
    total_order = group_order(ring)
    if spec.family == "X2" and ring.l % 2 == 1:
        phi = x2_phi(spec)
        n_mid = SubgroupSpec("Nj", ring, "X2", eps=spec.eps, level=ring.m + 1)
        big = SubgroupSpec("L", ring, "X2", eps=spec.eps)
        f1, rem1 = divmod(total_order, ring.p * n_mid.order())
        f2, rem2 = divmod(total_order, big.order())
        assert rem1 == 0 and rem2 == 0
        parts = []
        for H in (n_mid, big):
            counts: dict[int, int] = {}
            for x in H.elements(cap):
                ex = (
                    mu.exp_of(mat_det(x, mod))
                    + phi.exp_of(x)
                    + e.exp_of(mat_tr(x, mod))
                ) % N
                counts[ex] = counts.get(ex, 0) + 1
            parts.append(ring.cyc.from_exponents(counts))
        return GaussValue(parts[0] * f1 - parts[1] * f2)
    psi = make_psi(spec)
    H = psi.domain
    counts = {}
    for x in H.elements(cap):
        ex = (
            mu.exp_of(mat_det(x, mod)) + psi.exp_of(x) + e.exp_of(mat_tr(x, mod))
        ) % N
        counts[ex] = counts.get(ex, 0) + 1
    ratio = total_order // H.order()
    return GaussValue(ring.cyc.from_exponents(counts) * ratio)


def character_class_function(spec: CharSpec, cap: int = DEFAULT_ENUM_CAP) -> ClassFunction:
    """chi = (mu_alpha o det) * ind psi as an exact class function on the full group."""
    ring = spec.ring
    G = SubgroupSpec("G", ring)
    if spec.family == "X2" and ring.l % 2 == 1:
        phi = x2_phi(spec)
        n_mid = SubgroupSpec("Nj", ring, "X2", eps=spec.eps, level=ring.m + 1)
        big = SubgroupSpec("L", ring, "X2", eps=spec.eps)
        ind = induced_class_function(n_mid, phi, G, cap).divided(ring.p).minus(
            induced_class_function(big, phi, G, cap)
        )
    else:
        psi = make_psi(spec)
        ind = induced_class_function(psi.domain, psi, G, cap)
    mu = make_mu_alpha(spec.alpha, ring)
    mod = ring.modulus
    values = [
        v * ring.cyc.zeta(mu.exp_of(mat_det(cls[0], mod)))
        for v, cls in zip(ind.values, ind.classes.classes)
    ]
    return ClassFunction(ind.classes, values)


def tau_oracle_full(spec: CharSpec, e: AddChar, cap: int = DEFAULT_ENUM_CAP) -> GaussValue:
    """tau straight from the definition: sum of chi(X) e(Tr X) over the group.

    chi is materialized through the induction formula; the sum is grouped by
    conjugacy class (trace and determinant are class invariants).
    """
    ring = spec.ring
    chi = character_class_function(spec, cap)
    mod = ring.modulus
    total = ring.cyc.zero()
    for cls, v in zip(chi.classes.classes, chi.values):
        term = v * ring.cyc.zeta(e.exp_of(mat_tr(cls[0], mod)))
        total = total + term * len(cls)
    return GaussValue(total)


# ---------------------------------------------------------------------------
# level-lowered characters (the X4 family)


@dataclass(frozen=True)
class CharTable:
    """A character of GL2(Z/qZ) as an exact value table keyed by matrix."""

    modulus: int
    values: Mapping[Mat, CycElem]

    def __call__(self, x: Mat) -> CycElem:
        key = (x[0] % self.modulus, x[1] % self.modulus, x[2] % self.modulus, x[3] % self.modulus)
        return self.values[key]

    def degree(self) -> int:
        return self((1, 0, 0, 1)).as_integer()

    @staticmethod
    def from_spec(spec: CharSpec, cap: int = DEFAULT_ENUM_CAP) -> "CharTable":
        """Materialize a library-built character as a value table."""
        chi = character_class_function(spec, cap)
        values = {x: chi.values[cid] for x, cid in chi.classes.index.items()}
        return CharTable(spec.ring.modulus, values)

    @staticmethod
    def from_json_dict(data: Mapping) -> "CharTable":
        q = int(data["modulus"])
        values = {}
        for key, val in data["values"].items():
            mat = tuple(int(t) % q for t in key.split(","))
            if len(mat) != 4:
                raise BadArgumentError(f"bad matrix key {key!r}")
            values[mat] = CycElem.from_dict(val)
        return CharTable(q, values)

    def to_json_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "values": {
                ",".join(map(str, k)): v.to_dict() for k, v in sorted(self.values.items())
            },
        }


def tau_from_table(theta: CharTable, r: int, p: int, cap: int = DEFAULT_ENUM_CAP) -> CycElem:
    """tau over GL2(Z/qZ) for a table character and e(1) = zeta_q^r."""
    q = theta.modulus
    if q == p:
        members = enumerate_gl2_prime(p)
    else:
        s = 0
        qq = q
        while qq > 1:
            qq //= p
            s += 1
        members = SubgroupSpec("G", RingParams(p, s)).elements(cap)
    sample = next(iter(theta.values.values()))
    cyc = sample.ring
    if cyc.N % q:
        raise BadConductorError("table conductor does not contain the level")
    total = cyc.zero()
    scale = cyc.N // q
    for x in members:
        total = total + theta(x) * cyc.zeta(scale * r * ((x[0] + x[3]) % q))
    return total


@dataclass(frozen=True)
class X4Value:
    """Result of a level-lowered Gauss sum: the value plus how it was obtained."""

    kind: str  # "zero" | "recursion" | "residual"
    value: GaussValue


def tau_X4(i: int, theta: CharTable, e: AddChar, cap: int = DEFAULT_ENUM_CAP) -> X4Value:
    """tau_l(nu^i theta) for a twist power i and a level-(l-1) base character.

    Cases: vanishing when exactly one of (i, r) is divisible by p in the
    relevant sense; a p^4-recursion to level l-1 when i = 0 and p | r; and
    an unsimplified restricted sum otherwise (flagged "residual").
    """
    ring = e.ring
    p, l, mod, N = ring.p, ring.l, ring.modulus, ring.conductor
    if not 0 <= i < p:
        raise BadArgumentError("twist power out of range [0, p)")
    q = p ** (l - 1)
    if theta.modulus != q:
        raise BadArgumentError(f"base character must live mod {q}")
    r = e.r % mod
    r_div = r % p == 0
    if (1 <= i and r_div) or (i == 0 and not r_div):
        return X4Value("zero", GaussValue(ring.cyc.zero()))
    if i == 0:
        low = tau_from_table(theta, r // p, p, cap)
        return X4Value("recursion", GaussValue(low.lift_to(N) * p**4))
    # residual: entries are the integer lifts below p^(l-1)
    span = p ** (l - 2)
    if span**4 > cap:
        raise TooLargeError("residual index set exceeds cap")
    nu0 = injective_det_char(ring)
    a0 = (-i * pow(r, -1, p)) % p
    diag = [a0 + p * t for t in range(span)]
    offd = [p * t for t in range(span)]
    total = ring.cyc.zero()
    for a in diag:
        for d in diag:
            e_exp = ring.cyc.zeta(e.exp_of(a + d))
            for b in offd:
                for c in offd:
                    det = (a * d - b * c) % mod
                    ex = nu0.exp_of(det) * i % N
                    val = theta((a, b, c, d)).lift_to(N)
                    total = total + val * ring.cyc.zeta(ex) * e_exp
    return X4Value("residual", GaussValue(total * p**4))

"""Exact arithmetic over prime fields F_l, dense polynomials over F_l,
and quotient rings F_l[X]/(p^e) together with their CRT products.

Polynomials are stored as coefficient tuples, low degree first, with no
trailing zeros; the zero polynomial is the empty tuple.  All coefficients
are canonical residues in [0, l).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

__all__ = [
    "PrimeField",
    "Poly",
    "LocalRingSpec",
    "RingSpec",
    "RingElem",
    "poly_mul",
    "poly_divmod",
    "poly_gcd",
    "poly_ext_gcd",
    "is_irreducible",
    "factor_multiplicity",
    "find_irreducible",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_l for an odd prime l."""

    l: int

    def __post_init__(self) -> None:
        if self.l < 3 or not is_prime(self.l):
            raise ValueError(f"modulus must be an odd prime >= 3, got {self.l}")

    def inv(self, a: int) -> int:
        return pow(a % self.l, -1, self.l)


def _normalize(coeffs, l: int) -> tuple[int, ...]:
    cs = [c % l for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class Poly:
    """Dense polynomial over F_l, coefficients low degree first."""

    l: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _normalize(self.coeffs, self.l))

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial assigned -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def leading(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @classmethod
    def zero(cls, l: int) -> "Poly":
        return cls(l, ())

    @classmethod
    def one(cls, l: int) -> "Poly":
        return cls(l, (1,))

    @classmethod
    def x(cls, l: int) -> "Poly":
        return cls(l, (0, 1))

    @classmethod
    def const(cls, l: int, c: int) -> "Poly":
        return cls(l, (c,))

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = (out[i] + c) % self.l
        return Poly(self.l, out)

    def __neg__(self) -> "Poly":
        return Poly(self.l, tuple(-c % self.l for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.l)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(self.l, out)

    def scale(self, c: int) -> "Poly":
        return Poly(self.l, tuple(a * c for a in self.coeffs))

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(pow(self.leading(), -1, self.l))

    def shift(self, k: int) -> "Poly":
        """Multiply by X^k."""
        if self.is_zero():
            return self
        return Poly(self.l, (0,) * k + self.coeffs)

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.l
        return acc

    def _check(self, other: "Poly") -> None:
        if self.l != other.l:
            raise ValueError("mixed moduli")

    def __repr__(self) -> str:
        return f"Poly(l={self.l}, coeffs={list(self.coeffs)})"


def poly_mul(a: Poly, b: Poly) -> Poly:
    return a * b


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Quotient and remainder with deg r < deg b."""
    a._check(b)
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    l = a.l
    if a.degree < b.degree:
        return Poly.zero(l), a
    inv_lead = pow(b.leading(), -1, l)
    rem = list(a.coeffs)
    db = b.degree
    quot = [0] * (len(rem) - db)
    for i in range(len(rem) - 1, db - 1, -1):
        c = rem[i] % l
        if c:
            q = (c * inv_lead) % l
            quot[i - db] = q
            for j, bc in enumerate(b.coeffs):
                rem[i - db + j] -= q * bc
            rem[i] = 0
    return Poly(l, quot), Poly(l, rem)


def poly_mod(a: Poly, b: Poly) -> Poly:
    return poly_divmod(a, b)[1]


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd; gcd(0, b) = monic b."""
    a._check(b)
    while not b.is_zero():
        a, b = b, poly_mod(a, b)
    return a.monic()


def poly_ext_gcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (g, s, t) with g = s*a + t*b and g the monic gcd."""
    l = a.l
    r0, r1 = a, b
    s0, s1 = Poly.one(l), Poly.zero(l)
    t0, t1 = Poly.zero(l), Poly.one(l)
    while not r1.is_zero():
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    c = pow(r0.leading(), -1, l)
    return r0.monic(), s0.scale(c), t0.scale(c)


def _pow_mod(base: Poly, exp: int, modulus: Poly) -> Poly:
    result = Poly.one(base.l)
    base = poly_mod(base, modulus)
    while exp:
        if exp & 1:
            result = poly_mod(result * base, modulus)
        base = poly_mod(base * base, modulus)
        exp >>= 1
    return result


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(p: Poly) -> bool:
    """Rabin's test: p of degree n is irreducible over F_l iff
    X^(l^n) = X mod p and gcd(X^(l^(n/t)) - X, p) = 1 for primes t | n.
    """
    n = p.degree
    if n < 1:
        raise ValueError("irreducibility undefined for constants")
    if n == 1:
        return True
    l = p.l
    x = Poly.x(l)
    for t in _prime_factors(n):
        h = _pow_mod(x, l ** (n // t), p) - poly_mod(x, p)
        if poly_gcd(h, p).degree != 0:
            return False
    return (_pow_mod(x, l**n, p) - poly_mod(x, p)).is_zero()


def factor_multiplicity(f: Poly, p: Poly) -> int:
    """Largest m with p^m dividing f."""
    if f.is_zero():
        raise ValueError("multiplicity undefined for the zero polynomial")
    if p.degree < 1:
        raise ValueError("divisor must be nonconstant")
    m = 0
    while True:
        q, r = poly_divmod(f, p)
        if not r.is_zero():
            return m
        f = q
        m += 1


def find_irreducible(l: int, d: int) -> Poly:
    """Smallest monic irreducible of degree d over F_l, by coefficient order."""
    if d == 1:
        return Poly.x(l)
    for idx in range(l**d):
        coeffs = []
        n = idx
        for _ in range(d):
            coeffs.append(n % l)
            n //= l
        cand = Poly(l, tuple(coeffs) + (1,))
        if is_irreducible(cand):
            return cand
    raise RuntimeError("unreachable: irreducibles exist in every degree")


@dataclass(frozen=True)
class LocalRingSpec:
    """The local ring F_l[X]/(p^e) with p monic irreducible."""

    l: int
    p: Poly
    e: int

    def __post_init__(self) -> None:
        PrimeField(self.l)
        if self.p.l != self.l:
            raise ValueError("modulus mismatch between l and p")
        if self.e < 1:
            raise ValueError("exponent must be >= 1")
        if not self.p.is_monic():
            raise ValueError("p must be monic")
        if not is_irreducible(self.p):
            raise ValueError(f"p = {self.p} is reducible over F_{self.l}")

    @property
    def residue_degree(self) -> int:
        return self.p.degree

    @property
    def Q(self) -> int:
        """Residue field size l^deg(p)."""
        return self.l ** self.p.degree

    @property
    def modulus(self) -> Poly:
        return _local_modulus(self)

    @property
    def size(self) -> int:
        return self.Q**self.e


@lru_cache(maxsize=None)
def _local_modulus(spec: LocalRingSpec) -> Poly:
    m = Poly.one(spec.l)
    for _ in range(spec.e):
        m = m * spec.p
    return m


@dataclass(frozen=True)
class RingSpec:
    """A finite quotient F_l[X]/(prod p_i^{e_i}) held as its CRT factors."""

    factors: tuple[LocalRingSpec, ...]

    def __post_init__(self) -> None:
        if not self.factors:
            raise ValueError("at least one local factor required")
        l = self.factors[0].l
        if any(f.l != l for f in self.factors):
            raise ValueError("all factors must share the same l")
        seen = set()
        for f in self.factors:
            if f.p.coeffs in seen:
                raise ValueError(f"repeated irreducible factor {f.p}")
            seen.add(f.p.coeffs)

    @property
    def l(self) -> int:
        return self.factors[0].l

    @property
    def size(self) -> int:
        n = 1
        for f in self.factors:
            n *= f.size
        return n

    @classmethod
    def local(cls, l: int, p: Poly, e: int) -> "RingSpec":
        return cls((LocalRingSpec(l, p, e),))


@dataclass(frozen=True)
class RingElem:
    """Element of a RingSpec, stored as one residue per CRT factor."""

    ring: RingSpec
    residues: tuple[Poly, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.residues) != len(self.ring.factors):
            raise ValueError("one residue per factor required")
        reduced = tuple(
            poly_mod(r, f.modulus) for r, f in zip(self.residues, self.ring.factors)
        )
        object.__setattr__(self, "residues", reduced)

    @classmethod
    def from_poly(cls, ring: RingSpec, f: Poly) -> "RingElem":
        return cls(ring, tuple(f for _ in ring.factors))

    @classmethod
    def zero(cls, ring: RingSpec) -> "RingElem":
        return cls.from_poly(ring, Poly.zero(ring.l))

    @classmethod
    def one(cls, ring: RingSpec) -> "RingElem":
        return cls.from_poly(ring, Poly.one(ring.l))

    def _check(self, other: "RingElem") -> None:
        if self.ring != other.ring:
            raise ValueError("ring spec mismatch")

    def __add__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return RingElem(
            self.ring, tuple(a + b for a, b in zip(self.residues, other.residues))
        )

    def __neg__(self) -> "RingElem":
        return RingElem(self.ring, tuple(-a for a in self.residues))

    def __sub__(self, other: "RingElem") -> "RingElem":
        return self + (-other)

    def __mul__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return RingElem(
            self.ring, tuple(a * b for a, b in zip(self.residues, other.residues))
        )

    def is_zero(self) -> bool:
        return all(r.is_zero() for r in self.residues)

    def is_unit(self) -> bool:
        """True iff every residue is coprime to its local p."""
        return all(
            not poly_mod(r, f.p).is_zero()
            for r, f in zip(self.residues, self.ring.factors)
        )

    def inverse(self) -> "RingElem":
        if not self.is_unit():
            raise ZeroDivisionError("not a unit")
        out = []
        for r, f in zip(self.residues, self.ring.factors):
            g, s, _ = poly_ext_gcd(r, f.modulus)
            if g.degree != 0:
                raise ZeroDivisionError("not a unit")
            out.append(s)
        return RingElem(self.ring, tuple(out))

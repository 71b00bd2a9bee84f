"""Exact evaluation of the limiting cokernel measure: eta products,
normalizing constants, module masses, rank distributions, moments, and
divisor densities.

Values are carried as an exact rational times a multiset of eta(Q)
factors, so identities between formulas are checked as exact rational
equalities and floats appear only at the final numeric step.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .algebra import LocalRingSpec, Poly, RingSpec, find_irreducible, is_prime
from .modules import (
    ModuleType,
    Partition,
    aut_order,
    d_invariant,
    enumerate_module_types,
    partitions_of,
)

__all__ = [
    "MeasureValue",
    "EtaEval",
    "eta",
    "qbinom",
    "c_constant",
    "mu",
    "rank_distribution",
    "rank_distribution_partition_form",
    "moment_rank",
    "submodule_count",
    "divisor_density",
    "divisor_density_hypothesis",
    "independence_prediction",
    "local_ring_with_residue_size",
]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class MeasureValue:
    """rational * prod of eta(Q) over eta_factors, held exactly."""

    rational: Fraction
    eta_factors: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "rational", Fraction(self.rational))
        object.__setattr__(self, "eta_factors", tuple(sorted(self.eta_factors)))
        if self.rational < 0:
            raise ValueError("measure values are nonnegative")

    def __add__(self, other: "MeasureValue") -> "MeasureValue":
        if self.eta_factors != other.eta_factors:
            if self.rational == 0:
                return other
            if other.rational == 0:
                return self
            raise ValueError("cannot add values with different eta factors")
        return MeasureValue(self.rational + other.rational, self.eta_factors)

    def __mul__(self, other) -> "MeasureValue":
        if isinstance(other, MeasureValue):
            return MeasureValue(
                self.rational * other.rational,
                self.eta_factors + other.eta_factors,
            )
        return MeasureValue(self.rational * Fraction(other), self.eta_factors)

    __rmul__ = __mul__

    def numeric(self, tol: float = DEFAULT_TOL) -> float:
        if not self.eta_factors:
            return float(self.rational)
        per = tol / len(self.eta_factors)
        out = float(self.rational)
        for Q in self.eta_factors:
            out *= eta(Q, per).value
        return out


@dataclass(frozen=True)
class EtaEval:
    """Truncation of eta(Q) = prod_{u>=1} (1 - Q^-u) with a certified tail."""

    Q: int
    tol: float
    value: float
    depth: int


@lru_cache(maxsize=None)
def eta(Q: int, tol: float = DEFAULT_TOL) -> EtaEval:
    if Q < 2:
        raise ValueError("field size must be at least 2")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    # |log tail| <= sum_{u>depth} Q^-u / (1 - Q^-1) bounds the value error
    depth = 0
    while Q ** -(depth + 1) / (1 - 1 / Q) >= tol:
        depth += 1
    value = 1.0
    for u in range(1, depth + 1):
        value *= 1.0 - Q ** (-u)
    return EtaEval(Q, tol, value, depth)


def qbinom(n: int, k: int, Q: int) -> int:
    """Gaussian binomial: subspaces of dimension k in an n-space over F_Q.
    Out-of-range k gives 0."""
    if k < 0 or k > n:
        return 0
    num = 1
    den = 1
    for i in range(1, k + 1):
        num *= Q ** (n - k + i) - 1
        den *= Q**i - 1
    assert num % den == 0
    return num // den


def c_constant(ring: RingSpec, j) -> MeasureValue:
    """The normalizing constant of the stratum with Tor vector j."""
    j = tuple(j)
    if len(j) != len(ring.factors):
        raise ValueError("one stratum index per local factor required")
    rational = Fraction(1)
    factors = []
    for ji, f in zip(j, ring.factors):
        if ji < 0:
            raise ValueError("stratum indices are nonnegative")
        Q = f.Q
        num = Q ** (ji * (ji + 1) // 2)
        den = 1
        for k in range(1, ji + 1):
            den *= Q**k - 1
        rational *= Fraction(num, den)
        factors.append(Q)
    return MeasureValue(rational, tuple(factors))


def mu(t: ModuleType) -> MeasureValue:
    """Mass of the isomorphism class under the limiting cokernel measure."""
    j = tuple(
        d_invariant(lam, f.e) for lam, f in zip(t.local_types, t.ring.factors)
    )
    return c_constant(t.ring, j) * Fraction(1, aut_order(t))


def rank_distribution(local: LocalRingSpec, m: int) -> MeasureValue:
    """eta(Q) times the sum of 1/|Aut| over module types of F_l-dimension m
    over the local ring; zero when the residue degree does not divide m."""
    if m < 0:
        raise ValueError("rank must be nonnegative")
    Q = local.Q
    if m % local.residue_degree:
        return MeasureValue(Fraction(0), (Q,))
    ring = RingSpec((local,))
    total = Fraction(0)
    for t in enumerate_module_types(ring, m):
        total += Fraction(1, aut_order(t))
    return MeasureValue(total, (Q,))


def rank_distribution_partition_form(
    Q: int, e: int, m: int, residue_degree: int = 1
) -> MeasureValue:
    """The partition-sum form of the rank distribution: for each partition of
    m / residue_degree with parts bounded by e, the inverse exponent products
    indexed by the ascending-part runs (d_k the last index of the run, c_k
    the first)."""
    if m < 0:
        raise ValueError("rank must be nonnegative")
    if m % residue_degree:
        return MeasureValue(Fraction(0), (Q,))
    target = m // residue_degree
    total = Fraction(0)
    for lam in partitions_of(target, e):
        es = sorted(lam)
        n = len(es)
        d = [max(r for r in range(n) if es[r] == es[k]) + 1 for k in range(n)]
        c = [min(r for r in range(n) if es[r] == es[k]) + 1 for k in range(n)]
        term = Fraction(1)
        for k in range(n):
            term /= Q ** d[k] - Q**k
        for j in range(n):
            term /= (Q ** es[j]) ** (n - d[j])
        for i in range(n):
            term /= (Q ** (es[i] - 1)) ** (n - c[i] + 1)
        total += term
    return MeasureValue(total, (Q,))


def moment_rank(Q: int, e: int, k: int) -> int:
    """The k-th moment of Q^rank: the number of submodules of the rank-k free
    module over the chain quotient with exponent e."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    total = 0
    for lam in partitions_of_at_most(k, e):
        mu_p = Partition(lam)
        term = 1
        for j in range(1, e + 1):
            a = mu_p.conj_part(j + 1)
            b = mu_p.conj_part(j)
            term *= Q ** (a * (k - b)) * qbinom(k - a, b - a, Q)
        total += term
    return total


def partitions_of_at_most(max_parts: int, max_part: int):
    """Partitions with at most max_parts parts, each bounded by max_part."""
    def rec(remaining_parts, bound):
        yield ()
        if remaining_parts == 0:
            return
        for first in range(bound, 0, -1):
            for rest in rec(remaining_parts - 1, first):
                yield (first,) + rest

    yield from rec(max_parts, max_part)


def submodule_count(e: int, k: int, mu_p: Partition, Q: int) -> int:
    """Number of submodules of type mu inside the free module of rank k over
    the chain quotient with exponent e."""
    if mu_p.parts and (mu_p.parts[0] > e or len(mu_p) > k):
        return 0
    lam = Partition((e,) * k)
    term = 1
    for j in range(1, e + 1):
        a = mu_p.conj_part(j + 1)
        b = mu_p.conj_part(j)
        lj = lam.conj_part(j)
        term *= Q ** (a * (lj - b)) * qbinom(lj - a, b - a, Q)
    return term


def _validate_conditions(l: int, conditions) -> list[tuple[Poly, int]]:
    if l < 3 or not is_prime(l):
        raise ValueError("l must be an odd prime")
    out = []
    seen = set()
    for p, m in conditions:
        if not isinstance(p, Poly):
            raise ValueError("condition polynomials must be Poly values")
        if p.l != l:
            raise ValueError("condition polynomial has the wrong modulus")
        if m < 0:
            raise ValueError("multiplicities are nonnegative")
        if p.coeffs in seen:
            raise ValueError(f"repeated condition polynomial {p}")
        seen.add(p.coeffs)
        out.append((p, m))
    return out


def divisor_density(l: int, conditions) -> MeasureValue:
    """Limiting probability that each P_i divides the reduced Frobenius
    characteristic polynomial with multiplicity exactly m_i.

    Per condition this is the mass of the F_l-dimension 2*m_i*deg(P_i)
    stratum over F_l[X]/(P_i^{m_i+1}); the factor of two reflects that the
    functional equation ties each divisor to its reciprocal partner.
    """
    conds = _validate_conditions(l, conditions)
    out = MeasureValue(Fraction(1))
    for p, m in conds:
        local = LocalRingSpec(l, p, m + 1)
        out = out * rank_distribution(local, 2 * m * p.degree)
    return out


def divisor_density_hypothesis(l: int, conditions, tol: float = DEFAULT_TOL) -> bool:
    """Whether prod eta(F_i) > 1/2, the uniqueness hypothesis."""
    conds = _validate_conditions(l, conditions)
    prod = 1.0
    for p, _ in conds:
        prod *= eta(l**p.degree, tol).value
    return prod > 0.5


def independence_prediction(ring: RingSpec, local_types) -> tuple:
    """Joint mass and the product of per-factor masses; equal exactly."""
    t = ModuleType(ring, tuple(local_types))
    joint = mu(t)
    product = MeasureValue(Fraction(1))
    for lam, f in zip(t.local_types, ring.factors):
        product = product * mu(ModuleType(RingSpec((f,)), (lam,)))
    if joint != product:
        raise AssertionError("joint mass does not factor over the CRT factors")
    return joint, product


@lru_cache(maxsize=None)
def local_ring_with_residue_size(Q: int, e: int) -> LocalRingSpec:
    """A local ring F_l[X]/(p^e) whose residue field has exactly Q elements,
    for the smallest prime l with Q = l^d."""
    for l in range(2, Q + 1):
        if not is_prime(l):
            continue
        d = 0
        n = Q
        while n % l == 0 and n > 1:
            n //= l
            d += 1
        if n == 1 and d >= 1:
            return LocalRingSpec(l, find_irreducible(l, d), e)
    raise ValueError(f"{Q} is not a prime power")

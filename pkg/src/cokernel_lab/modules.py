"""Finite modules over quotients of F_l[X]: classification by partitions,
Smith normal form over the polynomial ring, and exact counts of
automorphisms, homomorphisms, surjections, and submodules."""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

from .algebra import (
    LocalRingSpec,
    Poly,
    RingElem,
    RingSpec,
    factor_multiplicity,
    poly_divmod,
)
from .chainring import _chain_cache, enumerate_submodules_chain

__all__ = [
    "Partition",
    "ModuleType",
    "RingMatrix",
    "enumeration_cap",
    "snf_invariant_factors",
    "coker_type",
    "d_invariant",
    "aut_order",
    "hom_count",
    "surj_count",
    "enumerate_submodules",
    "enumerate_module_types",
    "partitions_of",
]


DEFAULT_CAP = 3**10


def enumeration_cap() -> int:
    """Submodule-lattice size cap, overridable via COKERNEL_LAB_CAP."""
    raw = os.environ.get("COKERNEL_LAB_CAP")
    if raw is None:
        return DEFAULT_CAP
    cap = int(raw)
    if cap < 1:
        raise ValueError("COKERNEL_LAB_CAP must be positive")
    return cap


@dataclass(frozen=True)
class Partition:
    """Weakly decreasing tuple of positive integers; () is the zero module."""

    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple(self.parts))
        for i, p in enumerate(self.parts):
            if p < 1:
                raise ValueError("parts must be positive")
            if i and self.parts[i - 1] < p:
                raise ValueError("parts must be weakly decreasing")

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return Partition(())
        out = []
        for i in range(1, self.parts[0] + 1):
            out.append(sum(1 for p in self.parts if p >= i))
        return Partition(tuple(out))

    def conj_part(self, j: int) -> int:
        """Number of parts >= j, with conj_part(0) = number of parts."""
        if j <= 0:
            return len(self.parts)
        return sum(1 for p in self.parts if p >= j)


@dataclass(frozen=True)
class ModuleType:
    """Isomorphism class of a finite module: one partition per local factor."""

    ring: RingSpec
    local_types: tuple[Partition, ...]

    def __post_init__(self) -> None:
        lt = tuple(
            t if isinstance(t, Partition) else Partition(tuple(t))
            for t in self.local_types
        )
        object.__setattr__(self, "local_types", lt)
        if len(lt) != len(self.ring.factors):
            raise ValueError("one partition per local factor required")
        for t, f in zip(lt, self.ring.factors):
            if t.parts and t.parts[0] > f.e:
                raise ValueError(
                    f"part {t.parts[0]} exceeds the factor exponent {f.e}"
                )

    @property
    def dim_fl(self) -> int:
        return sum(
            f.residue_degree * t.size for t, f in zip(self.local_types, self.ring.factors)
        )

    @property
    def size(self) -> int:
        n = 1
        for t, f in zip(self.local_types, self.ring.factors):
            n *= f.Q**t.size
        return n

    @classmethod
    def trivial(cls, ring: RingSpec) -> "ModuleType":
        return cls(ring, tuple(Partition(()) for _ in ring.factors))


@dataclass(frozen=True)
class RingMatrix:
    """Dense matrix over a RingSpec."""

    ring: RingSpec
    entries: tuple[tuple[RingElem, ...], ...]

    def __post_init__(self) -> None:
        if self.entries:
            w = len(self.entries[0])
            if any(len(r) != w for r in self.entries):
                raise ValueError("ragged matrix")
        for row in self.entries:
            for x in row:
                if x.ring != self.ring:
                    raise ValueError("entry ring mismatch")

    @property
    def n_rows(self) -> int:
        return len(self.entries)

    @property
    def n_cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @classmethod
    def from_polys(cls, ring: RingSpec, rows) -> "RingMatrix":
        return cls(
            ring,
            tuple(tuple(RingElem.from_poly(ring, p) for p in row) for row in rows),
        )


def snf_invariant_factors(mat) -> list[Poly]:
    """Smith normal form diagonal of a matrix over F_l[X]: monic invariant
    factors with d_1 | d_2 | ..., zeros last for rank deficiency."""
    if not mat or not mat[0]:
        return []
    nr, nc = len(mat), len(mat[0])
    M = [list(row) for row in mat]
    r = min(nr, nc)
    for t in range(r):
        while True:
            bd = None
            bi = bj = -1
            for i in range(t, nr):
                for j in range(t, nc):
                    p = M[i][j]
                    if not p.is_zero() and (bd is None or p.degree < bd):
                        bd = p.degree
                        bi, bj = i, j
            if bd is None:
                break
            if bi != t:
                M[t], M[bi] = M[bi], M[t]
            if bj != t:
                for row in M:
                    row[t], row[bj] = row[bj], row[t]
            piv = M[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if not M[i][t].is_zero():
                    q, rem = poly_divmod(M[i][t], piv)
                    M[i] = [M[i][j] - q * M[t][j] for j in range(nc)]
                    if not rem.is_zero():
                        dirty = True
            for j in range(t + 1, nc):
                if not M[t][j].is_zero():
                    q, rem = poly_divmod(M[t][j], piv)
                    for i in range(t, nr):
                        M[i][j] = M[i][j] - q * M[i][t]
                    if not rem.is_zero():
                        dirty = True
            if dirty:
                continue
            bad = -1
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if not poly_divmod(M[i][j], piv)[1].is_zero():
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad >= 0:
                M[t] = [M[t][j] + M[bad][j] for j in range(nc)]
                continue
            break
        if bd is None:
            break
    return [M[i][i].monic() for i in range(r)]


def coker_type(a: RingMatrix) -> ModuleType:
    """Isomorphism class of the cokernel of a square matrix: per local factor
    the entries are lifted to F_l[X] and the block [A | p^e I] is put in
    Smith normal form; the parts are the p-multiplicities of the invariant
    factors."""
    n = a.n_rows
    if n != a.n_cols:
        raise ValueError("cokernel classification requires a square matrix")
    ring = a.ring
    types = []
    for idx, f in enumerate(ring.factors):
        lifted = [
            [a.entries[i][j].residues[idx] for j in range(n)] for i in range(n)
        ]
        modulus = f.modulus
        for i in range(n):
            lifted[i].extend(
                modulus if i == j else Poly.zero(ring.l) for j in range(n)
            )
        diag = snf_invariant_factors(lifted)
        parts = []
        for d in diag:
            m = factor_multiplicity(d, f.p)
            if m:
                parts.append(m)
        parts.sort(reverse=True)
        types.append(Partition(tuple(parts)))
    return ModuleType(ring, tuple(types))


def d_invariant(lam: Partition, e: int) -> int:
    """Number of parts equal to e; the Tor-difference invariant for these
    rings."""
    if lam.parts and lam.parts[0] > e:
        raise ValueError("partition part exceeds the ring exponent")
    return sum(1 for p in lam.parts if p == e)


def _local_aut_order(parts: tuple[int, ...], Q: int) -> int:
    es = sorted(parts)
    n = len(es)
    if n == 0:
        return 1
    d = [max(r for r in range(n) if es[r] == es[k]) + 1 for k in range(n)]
    c = [min(r for r in range(n) if es[r] == es[k]) + 1 for k in range(n)]
    out = 1
    for k in range(n):
        out *= Q ** d[k] - Q**k
    for j in range(n):
        out *= (Q ** es[j]) ** (n - d[j])
    for i in range(n):
        out *= (Q ** (es[i] - 1)) ** (n - c[i] + 1)
    return out


def aut_order(t: ModuleType) -> int:
    out = 1
    for lam, f in zip(t.local_types, t.ring.factors):
        out *= _local_aut_order(lam.parts, f.Q)
    return out


def hom_count(m: ModuleType, a: ModuleType) -> int:
    if m.ring != a.ring:
        raise ValueError("ring mismatch")
    out = 1
    for lm, la, f in zip(m.local_types, a.local_types, m.ring.factors):
        exp = sum(min(x, y) for x in lm.parts for y in la.parts)
        out *= f.Q**exp
    return out


@lru_cache(maxsize=None)
def _local_submodule_counts(l: int, d: int, lam_a: tuple[int, ...]) -> tuple:
    e = lam_a[0] if lam_a else 1
    ring = _chain_cache(l, d, e)
    counts = enumerate_submodules_chain(ring, lam_a)
    return tuple(sorted(counts.items()))


@lru_cache(maxsize=None)
def _local_surj(l: int, d: int, lam_m: tuple[int, ...], lam_a: tuple[int, ...]) -> int:
    Q = l**d
    total = Q ** sum(min(x, y) for x in lam_m for y in lam_a)
    for sub, cnt in _local_submodule_counts(l, d, lam_a):
        if sub != lam_a:
            total -= cnt * _local_surj(l, d, lam_m, sub)
    return total


def surj_count(m: ModuleType, a: ModuleType) -> int:
    """Number of surjections M -> A, by subtracting maps with proper image
    over the submodule lattice of A."""
    if m.ring != a.ring:
        raise ValueError("ring mismatch")
    cap = enumeration_cap()
    if a.size > cap:
        raise ValueError(f"target of size {a.size} exceeds the cap {cap}")
    out = 1
    for lm, la, f in zip(m.local_types, a.local_types, m.ring.factors):
        out *= _local_surj(f.l, f.residue_degree, lm.parts, la.parts)
    return out


def enumerate_submodules(a: ModuleType) -> dict:
    """Submodules of a module of the given type, grouped by isomorphism type
    with exact multiplicities (a dict ModuleType -> count)."""
    cap = enumeration_cap()
    if a.size > cap:
        raise ValueError(f"module of size {a.size} exceeds the cap {cap}")
    per_factor = [
        _local_submodule_counts(f.l, f.residue_degree, lam.parts)
        for lam, f in zip(a.local_types, a.ring.factors)
    ]
    out: dict = {}
    def rec(idx, acc_types, acc_count):
        if idx == len(per_factor):
            t = ModuleType(a.ring, tuple(Partition(x) for x in acc_types))
            out[t] = out.get(t, 0) + acc_count
            return
        for sub, cnt in per_factor[idx]:
            rec(idx + 1, acc_types + [sub], acc_count * cnt)
    rec(0, [], 1)
    return out


def partitions_of(n: int, max_part: int):
    """Weakly decreasing partitions of n with parts bounded by max_part."""
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions_of(n - first, first):
            yield (first,) + rest


def enumerate_module_types(ring: RingSpec, dim_fl: int) -> list[ModuleType]:
    """All isomorphism classes of the given F_l-dimension over the ring."""
    if dim_fl < 0:
        raise ValueError("dimension must be nonnegative")
    factors = ring.factors
    out: list[ModuleType] = []

    def rec(idx, remaining, acc):
        if idx == len(factors):
            if remaining == 0:
                out.append(ModuleType(ring, tuple(acc)))
            return
        f = factors[idx]
        deg = f.residue_degree
        last = idx == len(factors) - 1
        dims = [remaining] if last else range(0, remaining + 1)
        for dim in dims:
            if dim % deg:
                continue
            for lam in partitions_of(dim // deg, f.e):
                rec(idx + 1, remaining - dim, acc + [Partition(lam)])

    rec(0, dim_fl, [])
    return out

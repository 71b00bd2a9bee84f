"""Chain-ring machinery shared by the counting and sampling layers.

Every local ring F_l[X]/(p^e) is, as a ring, a truncated polynomial ring
F_Q[t]/(t^e) over its residue field of size Q = l^deg(p).  This module
provides small-field lookup tables, exact arithmetic on truncated
polynomials, a canonical-form enumeration of submodules, integer-encoded
local tables for fast cokernel classification, and element-level
brute-force counters used as independent oracles.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product

import numpy as np

from .algebra import (
    LocalRingSpec,
    Poly,
    factor_multiplicity,
    find_irreducible,
    poly_ext_gcd,
    poly_mod,
)

__all__ = [
    "FqField",
    "ChainRing",
    "chain_ring_for",
    "enumerate_submodules_chain",
    "LocalTables",
    "local_tables_for",
    "bfs_submodules",
    "brute_hom_count",
    "brute_surj_count",
    "brute_force_aut_order",
]


class FqField:
    """The field F_{l^d} with full lookup tables.

    Elements are encoded as integers in [0, Q): the base-l digits of a code
    are the coefficients of the residue polynomial modulo a fixed monic
    irreducible of degree d.  The code 0 is zero and the code 1 is one.
    """

    def __init__(self, l: int, d: int = 1):
        self.l = l
        self.d = d
        self.Q = l**d
        self.modulus = find_irreducible(l, d)
        Q = self.Q
        polys = [self._decode(c) for c in range(Q)]
        self.add = [
            [self._encode(polys[a] + polys[b]) for b in range(Q)] for a in range(Q)
        ]
        self.mul = [
            [self._encode(poly_mod(polys[a] * polys[b], self.modulus)) for b in range(Q)]
            for a in range(Q)
        ]
        self.neg = [self._encode(-polys[a]) for a in range(Q)]
        inv = [0] * Q
        for a in range(1, Q):
            g, s, _ = poly_ext_gcd(polys[a], self.modulus)
            if g.degree != 0:
                raise AssertionError("nonzero residue not invertible")
            inv[a] = self._encode(poly_mod(s, self.modulus))
        self.inv = inv

    def _decode(self, code: int) -> Poly:
        digits = []
        for _ in range(self.d):
            digits.append(code % self.l)
            code //= self.l
        return Poly(self.l, digits)

    def _encode(self, f: Poly) -> int:
        code = 0
        for c in reversed(poly_mod(f, self.modulus).coeffs):
            code = code * self.l + c
        return code

    def sub(self, a: int, b: int) -> int:
        return self.add[a][self.neg[b]]


@lru_cache(maxsize=None)
def _field_cache(l: int, d: int) -> FqField:
    return FqField(l, d)


class ChainRing:
    """F_Q[t]/(t^e): elements are length-e tuples of field codes, low first."""

    def __init__(self, field: FqField, e: int):
        self.field = field
        self.e = e
        self.zero = (0,) * e
        self.one = (1,) + (0,) * (e - 1)

    def elements(self):
        return [tuple(reversed(t)) for t in product(range(self.field.Q), repeat=self.e)]

    def add(self, x, y):
        add = self.field.add
        return tuple(add[a][b] for a, b in zip(x, y))

    def neg(self, x):
        neg = self.field.neg
        return tuple(neg[a] for a in x)

    def sub(self, x, y):
        f = self.field
        return tuple(f.add[a][f.neg[b]] for a, b in zip(x, y))

    def mul(self, x, y):
        f = self.field
        out = [0] * self.e
        for i, xi in enumerate(x):
            if xi:
                row = f.mul[xi]
                for j in range(self.e - i):
                    yj = y[j]
                    if yj:
                        out[i + j] = f.add[out[i + j]][row[yj]]
        return tuple(out)

    def scalar_mul(self, c: int, x):
        row = self.field.mul[c]
        return tuple(row[a] for a in x)

    def val(self, x) -> int:
        """t-adic valuation, with val(0) = e."""
        for i, a in enumerate(x):
            if a:
                return i
        return self.e

    def shift_up(self, x, i: int):
        if i == 0:
            return x
        if i >= self.e:
            return self.zero
        return (0,) * i + x[: self.e - i]

    def shift_down(self, x, i: int):
        if i == 0:
            return x
        return x[i:] + (0,) * i

    def unit_inv(self, x):
        f = self.field
        if x[0] == 0:
            raise ZeroDivisionError("not a unit in the chain ring")
        u0 = f.inv[x[0]]
        out = [u0] + [0] * (self.e - 1)
        for k in range(1, self.e):
            s = 0
            for i in range(1, k + 1):
                if x[i] and out[k - i]:
                    s = f.add[s][f.mul[x[i]][out[k - i]]]
            out[k] = f.neg[f.mul[u0][s]]
        return tuple(out)


@lru_cache(maxsize=None)
def _chain_cache(l: int, d: int, e: int) -> ChainRing:
    return ChainRing(_field_cache(l, d), e)


def chain_ring_for(spec: LocalRingSpec) -> ChainRing:
    return _chain_cache(spec.l, spec.residue_degree, spec.e)


def _trunc(x, lam: int):
    if lam >= len(x):
        return x
    return x[:lam] + (0,) * (len(x) - lam)


def _vector_space_submodule_counts(Q: int, k: int) -> dict:
    """Subspace counts of F_Q^k grouped by dimension, via reduced-echelon
    pivot profiles: a pivot set S contributes one free field entry for every
    (pivot column, later non-pivot column) pair."""
    counts = {}
    for r in range(k + 1):
        total = 0
        for pivots in combinations(range(k), r):
            pivot_set = set(pivots)
            free = sum(
                sum(1 for c2 in range(c + 1, k) if c2 not in pivot_set)
                for c in pivots
            )
            total += Q**free
        counts[(1,) * r if r else ()] = total
    return counts


def _span_log_size(rows, ambient, ring: ChainRing) -> int:
    """log_Q of the size of the span of the given rows inside the ambient
    module, by Howell-style elimination left to right."""
    k = len(ambient)
    rows = [list(r) for r in rows]
    total = 0
    for c in range(k):
        lam = ambient[c]
        best = None
        bestv = lam
        for idx, r in enumerate(rows):
            a = r[c]
            if a != ring.zero:
                va = ring.val(a)
                if va < bestv:
                    bestv = va
                    best = idx
        if best is None:
            continue
        total += lam - bestv
        piv = rows.pop(best)
        iu = ring.unit_inv(ring.shift_down(piv[c], bestv))
        piv = [_trunc(ring.mul(iu, piv[c3]), ambient[c3]) for c3 in range(k)]
        for r in rows:
            a = r[c]
            if a != ring.zero:
                b = ring.shift_down(a, bestv)
                for c3 in range(c, k):
                    r[c3] = _trunc(
                        ring.sub(r[c3], ring.mul(b, piv[c3])), ambient[c3]
                    )
        shadow = [
            _trunc(ring.shift_up(piv[c3], lam - bestv), ambient[c3]) for c3 in range(k)
        ]
        if any(x != ring.zero for x in shadow):
            rows.append(shadow)
    return total


def _span_type(rows, ambient, ring: ChainRing) -> tuple:
    """Isomorphism type of the span: the partition whose conjugate counts
    come from the sizes of t^i * span."""
    k = len(ambient)
    logs = []
    for i in range(ring.e + 1):
        shifted = [
            [_trunc(ring.shift_up(r[c], i), ambient[c]) for c in range(k)] for r in rows
        ]
        s = _span_log_size(shifted, ambient, ring)
        logs.append(s)
        if s == 0:
            break
    while len(logs) <= ring.e:
        logs.append(0)
    counts = [logs[i] - logs[i + 1] for i in range(ring.e)]
    lam = []
    for i in range(len(counts)):
        here = counts[i] - (counts[i + 1] if i + 1 < len(counts) else 0)
        lam.extend([i + 1] * here)
    lam.sort(reverse=True)
    return tuple(lam)


def _reduce_in_span(w, start_c, rows_by_pivot, v, ambient, ring: ChainRing) -> bool:
    k = len(ambient)
    for c2 in range(start_c + 1, k):
        a = w[c2]
        if a == ring.zero:
            continue
        if v[c2] is None or ring.val(a) < v[c2]:
            return False
        b = ring.shift_down(a, v[c2])
        r2 = rows_by_pivot[c2]
        for c3 in range(c2, k):
            w[c3] = _trunc(ring.sub(w[c3], ring.mul(b, r2[c3])), ambient[c3])
    return all(x == ring.zero for x in w)


def enumerate_submodules_chain(ring: ChainRing, ambient: tuple) -> dict:
    """All submodules of the ambient module ⊕_c C/(t^ambient[c]), grouped by
    isomorphism type (partition tuple), with exact multiplicities.

    Submodules correspond bijectively to canonical row sets: one row per
    pivot coordinate c with pivot t^{v_c}, later entries reduced modulo
    t^{v_{c'}} (modulo t^{ambient[c']} at non-pivot coordinates), subject to
    the closure condition that t^{ambient[c]-v_c} times each row lies in the
    span of the later rows.
    """
    k = len(ambient)
    if k == 0:
        return {(): 1}
    Q = ring.field.Q
    if all(a == 1 for a in ambient):
        return _vector_space_submodule_counts(Q, k)
    counts: dict = {}
    choices = [list(range(lam)) + [None] for lam in ambient]
    field_codes = list(range(Q))
    for v in product(*choices):
        active = [c for c in range(k) if v[c] is not None]
        slots = []
        for c in active:
            for c2 in range(c + 1, k):
                n = ambient[c2] if v[c2] is None else v[c2]
                for pos in range(n):
                    slots.append((c, c2, pos))
        for assignment in product(field_codes, repeat=len(slots)):
            rows = {}
            for c in active:
                row = [ring.zero] * k
                row[c] = tuple(
                    1 if i == v[c] else 0 for i in range(ring.e)
                )
                rows[c] = row
            for (c, c2, pos), code in zip(slots, assignment):
                if code:
                    old = rows[c][c2]
                    rows[c][c2] = old[:pos] + (code,) + old[pos + 1 :]
            ok = True
            for c in reversed(active):
                lam = ambient[c]
                w = [
                    _trunc(ring.shift_up(rows[c][c3], lam - v[c]), ambient[c3])
                    for c3 in range(k)
                ]
                if not _reduce_in_span(w, c, rows, v, ambient, ring):
                    ok = False
                    break
            if not ok:
                continue
            t = _span_type([rows[c] for c in active], ambient, ring)
            counts[t] = counts.get(t, 0) + 1
    return counts


class LocalTables:
    """Integer-encoded arithmetic tables for one local ring F_l[X]/(p^e).

    A code in [0, N) holds the base-l digits of the residue polynomial; the
    tables support the valuation-elimination classification of cokernels
    without any polynomial arithmetic in the inner loop.
    """

    MAX_SIZE = 2048

    def __init__(self, spec: LocalRingSpec):
        if spec.size > self.MAX_SIZE:
            raise ValueError(
                f"local ring of size {spec.size} exceeds the table cap {self.MAX_SIZE}"
            )
        self.spec = spec
        l = spec.l
        e = spec.e
        m = e * spec.residue_degree
        N = spec.size
        self.N = N
        self.e = e
        mod_coeffs = list(spec.modulus.coeffs[:-1])

        codes = np.arange(N)
        D = np.zeros((N, m), dtype=np.int64)
        t = codes.copy()
        for i in range(m):
            D[:, i] = t % l
            t //= l
        DX = np.zeros((m, N, m), dtype=np.int64)
        DX[0] = D
        mod_row = np.array(mod_coeffs, dtype=np.int64)
        for i in range(1, m):
            prev = DX[i - 1]
            shifted = np.zeros_like(prev)
            shifted[:, 1:] = prev[:, :-1]
            top = prev[:, m - 1]
            DX[i] = (shifted - np.outer(top, mod_row)) % l

        prod_digits = np.einsum("ai,ibm->abm", D, DX) % l
        powers = l ** np.arange(m)
        self.mul = (prod_digits @ powers).astype(np.int64)
        sub_digits = (D[:, None, :] - D[None, :, :]) % l
        self.sub = (sub_digits @ powers).astype(np.int64)

        pcode = self._encode_poly(spec.p)
        val = np.zeros(N, dtype=np.int64)
        ideal = codes
        for vstep in range(1, e + 1):
            ideal = np.unique(self.mul[pcode, ideal])
            val[ideal] = vstep
        self.val = val

        sd = np.zeros((e + 1, N), dtype=np.int64)
        sd[0] = codes
        image = codes
        for vstep in range(1, e + 1):
            image = self.mul[pcode, codes] if vstep == 1 else self.mul[pcode, image]
            sd[vstep][image] = codes
        self.shiftdown = sd

        inv = np.zeros(N, dtype=np.int64)
        pairs = np.argwhere(self.mul == 1)
        inv[pairs[:, 0]] = pairs[:, 1]
        self.inv = inv

        self.mul_rows = self.mul.tolist()
        self.sub_rows = self.sub.tolist()
        self.val_list = val.tolist()
        self.sd_rows = sd.tolist()
        self.inv_list = inv.tolist()

    def _encode_poly(self, f: Poly) -> int:
        r = poly_mod(f, self.spec.modulus)
        code = 0
        for c in reversed(r.coeffs):
            code = code * self.spec.l + c
        return code

    def decode_poly(self, code: int) -> Poly:
        digits = []
        l = self.spec.l
        while code:
            digits.append(code % l)
            code //= l
        return Poly(l, digits)

    def coker_partition(self, mat, n: int) -> tuple:
        """Partition of coker of the n x n code matrix, parts descending."""
        e = self.e
        val = self.val_list
        mul = self.mul_rows
        sub = self.sub_rows
        sd = self.sd_rows
        inv = self.inv_list
        A = [list(row) for row in mat]
        rows = list(range(n))
        cols = list(range(n))
        parts = []
        while cols:
            bestv = e
            bi = bj = -1
            for i in rows:
                Ai = A[i]
                for j in cols:
                    v = val[Ai[j]]
                    if v < bestv:
                        bestv = v
                        bi, bj = i, j
                        if v == 0:
                            break
                if bestv == 0:
                    break
            if bi < 0:
                parts.extend([e] * len(cols))
                break
            piv = A[bi]
            u = sd[bestv][piv[bj]]
            iu = inv[u]
            mrow = mul[iu]
            for j in cols:
                piv[j] = mrow[piv[j]]
            for i in rows:
                if i == bi:
                    continue
                Ai = A[i]
                b = Ai[bj]
                if b:
                    c = sd[bestv][b]
                    crow = mul[c]
                    for j in cols:
                        Ai[j] = sub[Ai[j]][crow[piv[j]]]
            parts.append(bestv)
            rows.remove(bi)
            cols.remove(bj)
        out = [p for p in parts if p > 0]
        out.sort(reverse=True)
        return tuple(out)


@lru_cache(maxsize=None)
def local_tables_for(spec: LocalRingSpec) -> LocalTables:
    return LocalTables(spec)


def _module_elements(ring: ChainRing, ambient: tuple):
    per_coord = []
    for lam in ambient:
        per_coord.append(
            [
                tuple(reversed(t)) + (0,) * (ring.e - lam)
                for t in product(range(ring.field.Q), repeat=lam)
            ]
        )
    return [tuple(v) for v in product(*per_coord)]


def _extend_span(ring: ChainRing, ambient: tuple, span: frozenset, g) -> frozenset:
    ring_elems = ring.elements()
    out = set()
    for s in span:
        for r in ring_elems:
            v = tuple(
                _trunc(ring.add(sc, ring.mul(r, gc)), lam)
                for sc, gc, lam in zip(s, g, ambient)
            )
            out.add(v)
    return frozenset(out)


def bfs_submodules(ring: ChainRing, ambient: tuple) -> dict:
    """Element-level submodule enumeration by closing spans, used as an
    independent oracle for the canonical enumeration."""
    zero_vec = tuple(ring.zero for _ in ambient)
    elements = _module_elements(ring, ambient)
    start = frozenset({zero_vec})
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for span in frontier:
            for g in elements:
                if g in span:
                    continue
                bigger = _extend_span(ring, ambient, span, g)
                if bigger not in seen:
                    seen.add(bigger)
                    nxt.append(bigger)
        frontier = nxt
    counts: dict = {}
    for span in seen:
        t = _set_type(ring, ambient, span)
        counts[t] = counts.get(t, 0) + 1
    return counts


def _set_type(ring: ChainRing, ambient: tuple, span: frozenset) -> tuple:
    Q = ring.field.Q
    logs = []
    cur = span
    for i in range(ring.e + 1):
        size = len(cur)
        s = 0
        while Q**s < size:
            s += 1
        logs.append(s)
        if size == 1:
            break
        cur = {
            tuple(_trunc(ring.shift_up(c, 1), lam) for c, lam in zip(v, ambient))
            for v in cur
        }
    while len(logs) <= ring.e:
        logs.append(0)
    lam = []
    counts = [logs[i] - logs[i + 1] for i in range(ring.e)]
    for i in range(len(counts)):
        here = counts[i] - (counts[i + 1] if i + 1 < len(counts) else 0)
        lam.extend([i + 1] * here)
    lam.sort(reverse=True)
    return tuple(lam)


def _admissible_images(ring: ChainRing, ambient: tuple, order: int):
    """Elements of the ambient module killed by t^order."""
    out = []
    for v in _module_elements(ring, ambient):
        killed = all(
            _trunc(ring.shift_up(c, order), lam) == ring.zero
            for c, lam in zip(v, ambient)
        )
        if killed:
            out.append(v)
    return out


def brute_hom_count(ring: ChainRing, lam_m: tuple, lam_a: tuple) -> int:
    total = 1
    for mj in lam_m:
        total *= len(_admissible_images(ring, lam_a, mj))
    return total


def brute_surj_count(ring: ChainRing, lam_m: tuple, lam_a: tuple) -> int:
    zero_vec = tuple(ring.zero for _ in lam_a)
    full_size = ring.field.Q ** sum(lam_a)
    image_sets = [_admissible_images(ring, lam_a, mj) for mj in lam_m]
    count = 0
    for images in product(*image_sets):
        span = frozenset({zero_vec})
        for g in images:
            span = _extend_span(ring, lam_a, span, g)
        if len(span) == full_size:
            count += 1
    return count


def brute_force_aut_order(l: int, lam: tuple, chunk: int = 1 << 18) -> int:
    """Count automorphisms of ⊕_j F_l[t]/(t^lam[j]) by enumerating every
    endomorphism and testing invertibility of its matrix on an F_l basis.

    The basis is {t^i g_j}; an endomorphism is determined by the generator
    images, whose coordinates at g_j2 range over t^{max(0, lam_j2 - lam_j)}
    times the local quotient.  Determinants are expanded by permutations, so
    the total F_l dimension must stay small.
    """
    lam = tuple(sorted(lam, reverse=True))
    m = sum(lam)
    if m == 0:
        return 1
    if m > 5:
        raise ValueError("brute-force determinant expansion capped at dimension 5")
    base_idx = {}
    for j, part in enumerate(lam):
        for i in range(part):
            base_idx[(j, i)] = len(base_idx)
    slots = []
    for j, lj in enumerate(lam):
        for j2, lj2 in enumerate(lam):
            for s in range(max(0, lj2 - lj), lj2):
                slots.append((j, j2, s))
    P = len(slots)
    total = l**P
    perms = [(p, _perm_sign(p)) for p in permutations(range(m))]
    count = 0
    off = 0
    while off < total:
        size = min(chunk, total - off)
        codes = np.arange(off, off + size, dtype=np.int64)
        M = np.zeros((size, m, m), dtype=np.int16)
        for idx, (j, j2, s) in enumerate(slots):
            digit = ((codes // (l**idx)) % l).astype(np.int16)
            for i in range(lam[j]):
                if s + i < lam[j2]:
                    M[:, base_idx[(j2, s + i)], base_idx[(j, i)]] = digit
        # entries < l <= 5 and m <= 5, so signed products and their sum stay
        # far below the int32 range; one final mod suffices
        det = np.zeros(size, dtype=np.int32)
        for p, sign in perms:
            term = M[:, 0, p[0]].astype(np.int32)
            for r in range(1, m):
                term = term * M[:, r, p[r]]
            if sign > 0:
                det += term
            else:
                det -= term
        count += int(np.count_nonzero(det % l))
        off += size
    return count


def _perm_sign(p) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign

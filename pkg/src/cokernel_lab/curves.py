"""Hyperelliptic curve statistics: point counting over small prime fields,
integer Frobenius characteristic polynomials, and divisor-multiplicity
frequencies compared against the exact density predictions."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import sqrt

import numpy as np

from .algebra import Poly, factor_multiplicity, find_irreducible, is_prime, poly_gcd
from .measure import MeasureValue, divisor_density, divisor_density_hypothesis

__all__ = [
    "CurveSample",
    "DensityReport",
    "sample_curve",
    "point_counts",
    "char_poly_from_counts",
    "curve_sample_from_f",
    "all_squarefree_monic",
    "divisibility_stats",
    "independence_stats",
    "weil_root_error",
]


@dataclass(frozen=True)
class CurveSample:
    """y^2 = f(x) over F_q with the integer characteristic polynomial of
    Frobenius, stored low degree first (degree 2g, constant term q^g)."""

    q: int
    g: int
    f: tuple[int, ...]
    char_poly: tuple[int, ...]


@dataclass(frozen=True)
class DensityReport:
    l: int
    q: int
    g: int
    conditions: tuple
    trials: int
    hits: int
    empirical: float
    predicted: MeasureValue
    predicted_value: float
    std_error: float
    hypothesis_eta_gt_half: bool
    exhaustive: bool


class _ExtField:
    """Vectorized arithmetic for F_{q^d}, q an odd prime: all elements as a
    base-q digit matrix, with the quadratic character precomputed."""

    def __init__(self, q: int, d: int):
        self.q = q
        self.d = d
        self.N = q**d
        modulus = find_irreducible(q, d)
        mod_row = np.array(modulus.coeffs[:-1], dtype=np.int64)
        codes = np.arange(self.N)
        E = np.zeros((self.N, d), dtype=np.int64)
        t = codes.copy()
        for k in range(d):
            E[:, k] = t % q
            t //= q
        self.E = E
        red = []
        cur = (-mod_row) % q
        for _ in range(d - 1):
            red.append(cur.copy())
            nxt = np.zeros(d, dtype=np.int64)
            nxt[1:] = cur[:-1]
            top = cur[d - 1]
            if top:
                nxt = (nxt + top * ((-mod_row) % q)) % q
            cur = nxt
        self.red = np.array(red, dtype=np.int64) if d > 1 else None
        sq = self.mul(E, E)
        chi = -np.ones(self.N, dtype=np.int64)
        chi[self.encode(sq)] = 1
        chi[0] = 0
        self.chi = chi

    def mul(self, A, B):
        q, d = self.q, self.d
        n = A.shape[0]
        C = np.zeros((n, 2 * d - 1), dtype=np.int64)
        for i in range(d):
            for j in range(d):
                C[:, i + j] += A[:, i] * B[:, j]
        C %= q
        out = C[:, :d].copy()
        for t in range(d - 1):
            out += np.outer(C[:, d + t], self.red[t])
        return out % q

    def encode(self, A):
        code = np.zeros(A.shape[0], dtype=np.int64)
        for k in range(self.d - 1, -1, -1):
            code = code * self.q + A[:, k]
        return code


@lru_cache(maxsize=None)
def _ext_field(q: int, d: int) -> _ExtField:
    return _ExtField(q, d)


def _validate_q(q: int) -> None:
    if q % 2 == 0 or not is_prime(q):
        raise ValueError("only odd prime base fields are supported")


def point_counts(f, q: int, g: int) -> list[int]:
    """Projective point counts of y^2 = f(x) over F_{q^i}, i = 1..g, with a
    single point at infinity for the odd-degree model."""
    _validate_q(q)
    out = []
    for d in range(1, g + 1):
        ext = _ext_field(q, d)
        acc = np.zeros((ext.N, d), dtype=np.int64)
        for c in reversed(f):
            acc = ext.mul(acc, ext.E)
            acc[:, 0] = (acc[:, 0] + c) % q
        out.append(1 + int((ext.chi[ext.encode(acc)] + 1).sum()))
    return out


def char_poly_from_counts(counts, q: int, g: int) -> tuple[int, ...]:
    """Integer characteristic polynomial of Frobenius from N_1..N_g, via
    power sums, Newton's identities, and the functional equation; returned
    low degree first."""
    p = [0] + [q**i + 1 - counts[i - 1] for i in range(1, g + 1)]
    e = [Fraction(1)]
    for k in range(1, g + 1):
        s = Fraction(0)
        for i in range(1, k + 1):
            s += (-1) ** (i - 1) * e[k - i] * p[i]
        e.append(s / k)
    a = [(-1) ** i * e[i] for i in range(g + 1)]
    if any(x.denominator != 1 for x in a):
        raise ArithmeticError("non-integer Newton output signals a count bug")
    a = [int(x) for x in a]
    full = a + [q ** (g - i) * a[i] for i in range(g - 1, -1, -1)]
    return tuple(full[2 * g - j] for j in range(2 * g + 1))


def weil_root_error(char_poly: tuple[int, ...], q: int) -> float:
    """Largest deviation of |root| from sqrt(q)."""
    roots = np.roots(list(reversed(char_poly)))
    return float(np.max(np.abs(np.abs(roots) - sqrt(q))))


def curve_sample_from_f(f, q: int, g: int) -> CurveSample:
    return CurveSample(q, g, tuple(f), char_poly_from_counts(point_counts(f, q, g), q, g))


def _is_squarefree(f, q: int) -> bool:
    fp = Poly(q, f)
    deriv = Poly(q, [(i * c) % q for i, c in enumerate(f)][1:])
    return poly_gcd(fp, deriv).degree == 0


def sample_curve(q: int, g: int, rng) -> tuple[int, ...]:
    """Uniform monic squarefree f of degree 2g+1 by rejection on gcd(f, f')."""
    _validate_q(q)
    while True:
        f = tuple(int(x) for x in rng.integers(0, q, 2 * g + 1)) + (1,)
        if _is_squarefree(f, q):
            return f


def all_squarefree_monic(q: int, degree: int):
    _validate_q(q)
    out = []
    for idx in range(q**degree):
        coeffs = []
        n = idx
        for _ in range(degree):
            coeffs.append(n % q)
            n //= q
        f = tuple(coeffs) + (1,)
        if _is_squarefree(f, q):
            out.append(f)
    return out


def _child_seed(seed: int, worker: int) -> int:
    h = hashlib.sha256(f"cokernel-lab-curves:{seed}:{worker}".encode()).digest()
    return int.from_bytes(h[:8], "big")


def validate_conditions(l: int, q: int, conditions) -> list[tuple[Poly, int]]:
    """The printed hypotheses, enforced at configuration time with the
    failing condition named: l an odd prime, l coprime to q, l not dividing
    P(q), and the P_i pairwise coprime mod l."""
    if l < 3 or not is_prime(l):
        raise ValueError("l must be an odd prime")
    _validate_q(q)
    if q % l == 0:
        raise ValueError(f"l = {l} divides q = {q}")
    out = []
    seen = set()
    for p, m in conditions:
        if p.l != l:
            raise ValueError(f"condition {p} is not a polynomial over F_{l}")
        if not p.is_monic() or p.degree < 1:
            raise ValueError(f"condition {p} must be monic of positive degree")
        if p(q % l) == 0:
            raise ValueError(
                f"hypothesis violated for condition {p}: l = {l} divides P(q)"
            )
        if m < 0:
            raise ValueError("multiplicities are nonnegative")
        if p.coeffs in seen:
            raise ValueError(f"conditions must be pairwise coprime; {p} repeats")
        seen.add(p.coeffs)
        out.append((p, m))
    return out


def _iter_curves(q, g, trials, seed, workers, exhaustive):
    if exhaustive:
        for f in all_squarefree_monic(q, 2 * g + 1):
            yield f
        return
    base = trials // workers
    sizes = [base] * workers
    for i in range(trials - base * workers):
        sizes[i] += 1
    for worker, count in enumerate(sizes):
        rng = np.random.default_rng(_child_seed(seed, worker))
        for _ in range(count):
            yield sample_curve(q, g, rng)


def _multiplicities(sample: CurveSample, l: int, polys) -> tuple[int, ...]:
    reduced = Poly(l, sample.char_poly)
    return tuple(factor_multiplicity(reduced, p) for p in polys)


def divisibility_stats(
    l: int,
    conditions,
    q: int,
    g: int,
    trials: int,
    seed: int,
    workers: int = 1,
    exhaustive: bool = False,
    on_sample=None,
) -> DensityReport:
    """Empirical frequency of the joint exact-divisibility event
    P_i^{m_i} || P_C mod l over sampled curves, with the exact prediction."""
    conds = validate_conditions(l, q, conditions)
    polys = [p for p, _ in conds]
    targets = tuple(m for _, m in conds)
    hits = 0
    total = 0
    for f in _iter_curves(q, g, trials, seed, workers, exhaustive):
        sample = curve_sample_from_f(f, q, g)
        mults = _multiplicities(sample, l, polys)
        if on_sample is not None:
            on_sample(sample, mults)
        if mults == targets:
            hits += 1
        total += 1
    emp = hits / total
    predicted = divisor_density(l, conds)
    return DensityReport(
        l=l,
        q=q,
        g=g,
        conditions=tuple((p.coeffs, m) for p, m in conds),
        trials=total,
        hits=hits,
        empirical=emp,
        predicted=predicted,
        predicted_value=predicted.numeric(),
        std_error=sqrt(emp * (1 - emp) / total),
        hypothesis_eta_gt_half=divisor_density_hypothesis(l, conds),
        exhaustive=exhaustive,
    )


def independence_stats(
    l: int,
    cond_a,
    cond_b,
    q: int,
    g: int,
    trials: int,
    seed: int,
    workers: int = 1,
    exhaustive: bool = False,
) -> dict:
    """2x2 contingency of the two divisibility events, the chi-square
    statistic, and the joint-vs-product gap with its delta-method standard
    error."""
    conds = validate_conditions(l, q, [cond_a, cond_b])
    (pa, ma), (pb, mb) = conds
    table = [[0, 0], [0, 0]]
    total = 0
    for f in _iter_curves(q, g, trials, seed, workers, exhaustive):
        sample = curve_sample_from_f(f, q, g)
        mult_a, mult_b = _multiplicities(sample, l, [pa, pb])
        table[0 if mult_a == ma else 1][0 if mult_b == mb else 1] += 1
        total += 1
    p11 = table[0][0] / total
    p_a = (table[0][0] + table[0][1]) / total
    p_b = (table[0][0] + table[1][0]) / total
    gap = p11 - p_a * p_b
    # delta method for p11 - (p11+p10)(p11+p01) under the multinomial
    probs = [
        table[0][0] / total,
        table[0][1] / total,
        table[1][0] / total,
        table[1][1] / total,
    ]
    grads = [1 - p_a - p_b, -p_a, -p_b, 0.0]
    mean_g = sum(gi * pi for gi, pi in zip(grads, probs))
    var = sum(gi * gi * pi for gi, pi in zip(grads, probs)) - mean_g * mean_g
    se = sqrt(max(var, 0.0) / total)
    chi2 = 0.0
    for i in range(2):
        for j in range(2):
            row = table[i][0] + table[i][1]
            col = table[0][j] + table[1][j]
            expected = row * col / total
            if expected > 0:
                chi2 += (table[i][j] - expected) ** 2 / expected
    return {
        "table": table,
        "trials": total,
        "joint": p11,
        "marginal_a": p_a,
        "marginal_b": p_b,
        "gap": gap,
        "gap_std_error": se,
        "chi_square": chi2,
    }

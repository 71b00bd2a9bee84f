import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cokernel_lab.algebra import (
    LocalRingSpec,
    Poly,
    RingElem,
    RingSpec,
    factor_multiplicity,
    find_irreducible,
    is_irreducible,
    is_prime,
    poly_divmod,
    poly_ext_gcd,
    poly_gcd,
    poly_mod,
)


def test_is_prime_small():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29}
    for n in range(2, 30):
        assert is_prime(n) == (n in primes)
    assert not is_prime(1)
    assert not is_prime(0)


def test_poly_normalization_strips_leading_zeros():
    p = Poly(3, (1, 2, 0, 0))
    assert p.coeffs == (1, 2)
    assert Poly(3, (0, 0)).is_zero()
    assert Poly(3, ()).degree == -1


def test_poly_arithmetic_hand_values():
    l = 3
    a = Poly(l, (1, 1))
    b = Poly(l, (2, 1))
    assert (a * b).coeffs == (2, 0, 1)
    assert (a + b).coeffs == (0, 2)
    assert (a - b).coeffs == (2,)


def test_divmod_hand_value():
    l = 5
    a = Poly(l, (3, 0, 0, 1))
    b = Poly(l, (1, 1))
    q, r = poly_divmod(a, b)
    assert q * b + r == a
    assert r.degree < b.degree


def test_divmod_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        poly_divmod(Poly(3, (1,)), Poly(3, ()))


@settings(max_examples=200)
@given(
    st.integers(0, 3 ** 6 - 1),
    st.integers(1, 5 ** 4 - 1),
    st.sampled_from([3, 5]),
)
def test_divmod_property(ac, bc, l):
    def decode(n):
        out = []
        while n:
            out.append(n % l)
            n //= l
        return Poly(l, out)

    a = decode(ac)
    b = decode(bc % l ** 4)
    if b.is_zero():
        return
    q, r = poly_divmod(a, b)
    assert q * b + r == a
    assert r.degree < b.degree


def test_gcd_hand_values():
    l = 3
    f = Poly(l, (2, 0, 1))  # X^2 + 2 = (X-1)(X+1)
    g = Poly(l, (2, 1))  # X - 1
    assert poly_gcd(f, g) == g.monic()
    assert poly_gcd(f, Poly(l, (1, 1))).degree == 1


def test_ext_gcd_bezout():
    rng = random.Random(11)
    for _ in range(100):
        l = rng.choice([3, 5])
        a = Poly(l, [rng.randrange(l) for _ in range(rng.randrange(1, 5))])
        b = Poly(l, [rng.randrange(l) for _ in range(rng.randrange(1, 5))])
        if a.is_zero() and b.is_zero():
            continue
        g, u, v = poly_ext_gcd(a, b)
        assert u * a + v * b == g
        if not a.is_zero():
            assert poly_mod(a, g).is_zero()
        if not b.is_zero():
            assert poly_mod(b, g).is_zero()


def _all_polys(l, deg):
    for code in range(l ** deg, 2 * l ** deg):
        coeffs = []
        n = code
        for _ in range(deg + 1):
            coeffs.append(n % l)
            n //= l
        if coeffs[-1]:
            yield Poly(l, coeffs)


def test_irreducibility_against_trial_division():
    """Exhaustive cross-check of the Rabin test for degrees 2..4."""
    for l in (3, 5):
        lower = {
            d: [p for p in _all_polys(l, d)] for d in range(1, 3)
        }
        for deg in (2, 3, 4):
            for p in _all_polys(l, deg):
                has_factor = any(
                    poly_mod(p, q).is_zero()
                    for d in range(1, deg // 2 + 1)
                    for q in lower.get(d, [])
                )
                if deg == 4:
                    has_factor = has_factor or any(
                        poly_mod(p, q).is_zero() for q in _all_polys(l, 2)
                    )
                assert is_irreducible(p) == (not has_factor), p
            if deg < 4:
                lower[deg] = list(_all_polys(l, deg))


def test_find_irreducible_properties():
    for l, d in [(3, 1), (3, 2), (3, 4), (5, 2), (7, 3)]:
        p = find_irreducible(l, d)
        assert p.degree == d
        assert p.is_monic()
        assert is_irreducible(p)


@settings(max_examples=200)
@given(
    st.sampled_from([3, 5]),
    st.integers(0, 4),
    st.integers(0, 3 ** 4 - 1),
)
def test_factor_multiplicity_roundtrip(l, m, code):
    p = find_irreducible(l, 2)
    rest = []
    n = code
    while n:
        rest.append(n % l)
        n //= l
    u = Poly(l, rest)
    if u.is_zero() or poly_mod(u, p).is_zero():
        return
    f = u
    for _ in range(m):
        f = f * p
    assert factor_multiplicity(f, p) == m


def test_local_ring_spec_derived_fields():
    spec = LocalRingSpec(3, find_irreducible(3, 2), 2)
    assert spec.residue_degree == 2
    assert spec.Q == 9
    assert spec.size == 81
    assert spec.modulus.degree == 4


def test_local_ring_spec_validation():
    with pytest.raises(ValueError):
        LocalRingSpec(3, Poly(3, (2, 0, 1)), 1)  # X^2+2 reducible
    with pytest.raises(ValueError):
        LocalRingSpec(4, Poly(3, (1, 1)), 1)


def test_ring_spec_coprime_validation():
    l = 3
    p1 = Poly(l, (2, 1))
    with pytest.raises(ValueError):
        RingSpec((LocalRingSpec(l, p1, 1), LocalRingSpec(l, p1, 2)))


def test_ring_elem_axioms_random():
    """Associativity, distributivity, and unit inversion over a CRT product."""
    l = 3
    ring = RingSpec(
        (
            LocalRingSpec(l, Poly(l, (2, 1)), 2),
            LocalRingSpec(l, Poly(l, (1, 1)), 1),
        )
    )
    rng = random.Random(7)

    def rand_elem():
        residues = []
        for f in ring.factors:
            coeffs = [rng.randrange(l) for _ in range(f.modulus.degree)]
            residues.append(Poly(l, coeffs))
        return RingElem(ring, tuple(residues))

    one = RingElem.one(ring)
    for _ in range(300):
        a, b, c = rand_elem(), rand_elem(), rand_elem()
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        if a.is_unit():
            assert a * a.inverse() == one


def test_ring_elem_unit_detection():
    l = 3
    ring = RingSpec.local(l, Poly(l, (0, 1)), 2)
    x = RingElem.from_poly(ring, Poly(l, (0, 1)))
    assert not x.is_unit()
    u = RingElem.from_poly(ring, Poly(l, (1, 1)))
    assert u.is_unit()

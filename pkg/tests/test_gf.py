"""Prime fields, quadratic extensions, GF(p^m), and coordinate expansion."""

import pytest

from rankfold import FieldMismatch, NotASquare, SingularBasis, SplitMix64
from rankfold.gf import (
    ExtField,
    PrimeField,
    QuadExtField,
    expand_to_base,
    is_probable_prime,
    reconstruct_from_base,
)
from rankfold.serial import field_from_json


def test_primality():
    primes = [2, 3, 5, 7, 23, 97, 2 ** 31 - 1]
    composites = [1, 4, 9, 15, 561, 1105, 2 ** 31 + 1]
    assert all(is_probable_prime(p) for p in primes)
    assert not any(is_probable_prime(c) for c in composites)
    with pytest.raises(ValueError):
        PrimeField(15)


def test_gfp_arithmetic():
    F = PrimeField(23)
    a = F.element(17)
    b = F.element(9)
    assert (a + b).val == 3
    assert (a - b).val == 8
    assert (a * b).val == 153 % 23
    assert (a / b) * b == a
    assert (-a).val == 6
    assert a ** 22 == F.one  # Fermat
    assert F.element(0) ** 0 == F.one
    with pytest.raises(ZeroDivisionError):
        F.zero.inverse()


def test_gfp_sqrt():
    F = PrimeField(23)  # 23 = 3 mod 4
    r = F.sqrt(F.element(2))
    assert r.val == 5 and r * r == F.element(2)
    with pytest.raises(NotASquare):
        F.sqrt(F.element(F.smallest_nonresidue()))
    # p = 1 mod 4 exercises the full Tonelli-Shanks walk
    for p in (13, 17, 29, 101):
        F = PrimeField(p)
        for v in range(p):
            if F.is_square(v):
                r = F.sqrt(v)
                assert (r * r).val == v
                assert r.val <= p - r.val or r.val == 0


def test_is_square_matches_enumeration():
    for p in (3, 5, 7, 11, 23):
        F = PrimeField(p)
        squares = {v * v % p for v in range(p)}
        for v in range(p):
            assert F.is_square(v) == (v in squares)


def test_gf2_allowed_quadext_not():
    F2 = PrimeField(2)
    assert (F2.one + F2.one) == F2.zero
    assert F2.sqrt(F2.one) == F2.one
    with pytest.raises(ValueError):
        QuadExtField(F2)


def test_quadext_arithmetic():
    F = PrimeField(23)
    E = QuadExtField(F)  # smallest non-residue is 5
    assert E.n == 5
    s = E.sqrt_nonresidue
    assert s * s == E.coerce(5)
    rng = SplitMix64(4)
    for _ in range(50):
        x = E.random_element(rng)
        y = E.random_element(rng)
        assert (x + y) * (x - y) == x * x - y * y
        if x:
            assert x * x.inverse() == E.one
        # conjugation is the nontrivial automorphism; norms land in GF(p)
        n = x * x.conjugate()
        assert n.v == 0
    assert E.coerce(7) + 1 == E.coerce(8)


def test_quadext_order_of_multiplicative_group():
    E = QuadExtField(PrimeField(5), 2)
    x = E.element(1, 1)
    assert x ** 24 == E.one


def test_extfield_modulus_and_order():
    F = ExtField(23, 8)
    assert F.order == 23 ** 8
    # lex-first irreducible octic over GF(23), frozen for determinism
    assert F.modulus == (5, 1, 0, 0, 0, 0, 0, 0, 1)
    G = ExtField(2, 4)
    assert G.order == 16
    with pytest.raises(ValueError):
        ExtField(23, 3, modulus=(1, 0, 0, 0))  # not monic of right shape


def test_extfield_arithmetic_axioms():
    F = ExtField(5, 3)
    rng = SplitMix64(8)
    for _ in range(60):
        x = F.random_element(rng)
        y = F.random_element(rng)
        z = F.random_element(rng)
        assert (x + y) * z == x * z + y * z
        assert (x * y) * z == x * (y * z)
        if x:
            assert x * x.inverse() == F.one
    x = F.element((1, 2, 1))
    assert x ** (5 ** 3 - 1) == F.one


def test_frobenius():
    F = ExtField(23, 8)
    rng = SplitMix64(12)
    for _ in range(20):
        x = F.random_element(rng)
        y = F.random_element(rng)
        assert F.frobenius(x) == x ** 23
        assert F.frobenius(x + y, 3) == F.frobenius(x, 3) + F.frobenius(y, 3)
        assert F.frobenius(x, 8) == x  # full orbit
        assert F.frobenius(F.frobenius(x, 2), 3) == F.frobenius(x, 5)


def test_field_mismatch_is_not_equality():
    assert not (PrimeField(5).one == PrimeField(7).one)
    assert not (ExtField(5, 2).one == ExtField(5, 3).one)
    with pytest.raises(FieldMismatch):
        PrimeField(5).one + PrimeField(7).one


def test_expand_to_base_roundtrip():
    F = ExtField(5, 3)
    rng = SplitMix64(21)
    vec = [F.random_element(rng) for _ in range(4)]
    M = expand_to_base(F, vec)
    assert M.shape == (3, 4)
    assert reconstruct_from_base(F, M) == vec
    # custom basis: any invertible change of basis round-trips too
    basis = [F.element((1, 1, 0)), F.element((0, 1, 0)), F.element((2, 0, 1))]
    M2 = expand_to_base(F, vec, basis)
    assert reconstruct_from_base(F, M2, basis) == vec
    with pytest.raises(SingularBasis):
        expand_to_base(F, vec, [F.one, F.one, F.element((0, 1, 0))])


def test_expand_rank_counts_independence():
    # x and x^p are GF(p)-independent unless x is in GF(p)
    F = ExtField(5, 3)
    x = F.element((0, 1, 0))
    M = expand_to_base(F, [x, F.frobenius(x)])
    assert M.rank() == 2
    M1 = expand_to_base(F, [F.one, F.element((2, 0, 0))])
    assert M1.rank() == 1


def test_serialization():
    for F in (PrimeField(23), QuadExtField(PrimeField(5), 2), ExtField(23, 8)):
        back = field_from_json(F.to_json())
        assert back == F
    F = ExtField(7, 2)
    x = F.element((3, 4))
    assert F.element_from_json(F.element_to_json(x)) == x

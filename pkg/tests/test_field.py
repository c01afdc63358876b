import cmath
import math

import numpy as np
import pytest

from paleyrip import InputError, PrimeField, is_prime, primes_in_range
from paleyrip.errors import NumericalError


def test_is_prime_basics():
    assert is_prime(2) and is_prime(3) and is_prime(97) and is_prime(7919)
    assert not is_prime(1) and not is_prime(0) and not is_prime(-7)
    assert not is_prime(561)  # Carmichael number
    assert is_prime(2**61 - 1)
    assert not is_prime(2**61 + 1)


def test_construction_rejects_bad_moduli():
    for bad in (1, 2, 4, 9, 15, 561):
        with pytest.raises(InputError):
            PrimeField(bad)


def test_parity_flag():
    assert PrimeField(5).r == 0
    assert PrimeField(13).r == 0
    assert PrimeField(3).r == 1
    assert PrimeField(7).r == 1


def test_quadratic_residues_examples():
    assert PrimeField(7).residues == (1, 2, 4)
    assert PrimeField(5).residues == (1, 4)
    assert PrimeField(3).residues == (1,)


def test_chi_examples():
    f = PrimeField(7)
    assert f.chi(0) == 0
    assert f.chi(4) == 1
    assert f.chi(3) == -1
    with pytest.raises(InputError):
        f.chi(7)
    with pytest.raises(InputError):
        f.chi(-1)


@pytest.mark.parametrize("p", primes_in_range(3, 199))
def test_chi_table_invariants(p):
    f = PrimeField(p)
    table = f.qr_table
    assert table[0] == 0
    assert int((table == 1).sum()) == (p - 1) // 2
    assert int((table == -1).sum()) == (p - 1) // 2
    assert int(table.sum()) == 0
    # multiplicativity, exhaustively
    idx = np.arange(p)
    products = table[np.outer(idx, idx) % p]
    assert np.array_equal(products, np.outer(table, table))


def test_chi_minus_one_matches_parity():
    for p in primes_in_range(3, 499):
        f = PrimeField(p)
        assert f.chi(p - 1) == (1 if f.r == 0 else -1)


def test_psi_is_homomorphism_to_unit_circle():
    rng = np.random.default_rng(7)
    for p in (3, 7, 13, 101, 499):
        f = PrimeField(p)
        for _ in range(50):
            x, y = int(rng.integers(p)), int(rng.integers(p))
            assert abs(f.psi(x) * f.psi(y) - f.psi((x + y) % p)) < 1e-12
            assert abs(abs(f.psi(x)) - 1.0) < 1e-12
    assert PrimeField(5).psi(0) == 1


def test_psi_value_at_p3():
    value = PrimeField(3).psi(1)
    assert abs(value - complex(-0.5, math.sqrt(3) / 2)) < 1e-12


def test_gauss_sum_examples():
    assert abs(PrimeField(3).gauss_sum(1) - 1j * math.sqrt(3)) < 1e-9
    assert abs(PrimeField(5).gauss_sum(1) - math.sqrt(5)) < 1e-9
    assert abs(PrimeField(5).gauss_sum(2) + math.sqrt(5)) < 1e-9


def test_gauss_sum_closed_form_small_primes():
    for p in primes_in_range(3, 97):
        f = PrimeField(p)
        for a in range(1, p):
            expected = (1j**f.r) * f.chi(a) * math.sqrt(p)
            assert abs(f.gauss_sum(a) - expected) < 1e-9


def test_gauss_sum_rejects_zero():
    with pytest.raises(InputError):
        PrimeField(7).gauss_sum(0)
    with pytest.raises(InputError):
        PrimeField(7).gauss_sum(7)


def test_primes_in_range_with_congruence():
    assert primes_in_range(3, 23, 3) == [3, 7, 11, 19, 23]
    assert primes_in_range(5, 13, 1) == [5, 13]
    assert primes_in_range(3, 10) == [3, 5, 7]
    assert primes_in_range(10, 3) == []

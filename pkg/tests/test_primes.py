import math

import numpy as np
import pytest

from zetalab.errors import DomainError, ResourceError
from zetalab.primes import (PrimeTable, compensated_sum, prime_powers_below,
                            prime_variance, reciprocal_prime_sum, sieve_primes,
                            tapered_von_mangoldt, von_mangoldt)


def reference_sieve(limit):
    """Independent full-array sieve (non-segmented, different code path)."""
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(math.isqrt(limit)) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.nonzero(flags)[0]


def test_sieve_first_primes():
    assert sieve_primes(10).primes.tolist() == [2, 3, 5, 7]


def test_sieve_boundary():
    assert sieve_primes(2).primes.tolist() == [2]


def test_sieve_against_independent_sieve():
    table = sieve_primes(10**5)
    assert np.array_equal(table.primes, reference_sieve(10**5))


def test_sieve_count_1e6(table_1e6):
    assert table_1e6.count() == 78498
    assert np.array_equal(table_1e6.primes, reference_sieve(10**6))


def test_sieve_errors():
    with pytest.raises(DomainError):
        sieve_primes(1)
    with pytest.raises(ResourceError, match="cap"):
        sieve_primes(10**10)


def test_least_prime_factor(table_1e3):
    assert table_1e3.least_prime_factor(2) == 2
    assert table_1e3.least_prime_factor(997) == 997
    assert table_1e3.least_prime_factor(999) == 3
    assert table_1e3.least_prime_factor(343) == 7


def test_prime_cache_roundtrip(tmp_path, table_1e3):
    path = tmp_path / "primes.bin"
    table_1e3.save(path)
    loaded = PrimeTable.load(path)
    assert loaded.limit == table_1e3.limit
    assert np.array_equal(loaded.primes, table_1e3.primes)
    raw = path.read_bytes()
    assert raw[:8] == b"SCLTPRIM"
    assert int.from_bytes(raw[8:16], "little") == 1000


def test_von_mangoldt_values():
    assert von_mangoldt(4) == pytest.approx(math.log(2), abs=1e-12)
    assert von_mangoldt(6) == 0.0
    assert von_mangoldt(97) == pytest.approx(math.log(97), abs=1e-12)
    assert von_mangoldt(1) == 0.0
    assert von_mangoldt(3**5) == pytest.approx(math.log(3), abs=1e-12)
    with pytest.raises(DomainError):
        von_mangoldt(0)


def test_tapered_weight_branches():
    assert tapered_von_mangoldt(4, 100.0) == pytest.approx(math.log(2), abs=1e-15)
    assert tapered_von_mangoldt(6, 100.0) == 0.0
    # n = X^2 exactly (prime power): the taper kills the weight
    assert tapered_von_mangoldt(49, 7.0) == 0.0
    # between X and X^2 the weight interpolates log(X^2/n)/log X
    w = tapered_von_mangoldt(8, 2.5)
    assert w == pytest.approx(math.log(2) * math.log(6.25 / 8) / math.log(2.5), rel=1e-12)
    with pytest.raises(DomainError):
        tapered_von_mangoldt(4, 1.5)


def test_tapered_weight_dominated_by_von_mangoldt():
    for X in (5.0, 31.6227766, 100.0):
        for n in range(1, 10**4 + 1):
            assert tapered_von_mangoldt(n, X) <= von_mangoldt(n) + 1e-15


def test_tapered_weight_continuity_at_cutoff():
    # along prime powers the weight is continuous at n = X and vanishes at X^2
    X = 16.0
    assert tapered_von_mangoldt(16, X) == pytest.approx(von_mangoldt(16), rel=1e-12)
    assert tapered_von_mangoldt(256, X) == 0.0
    below = tapered_von_mangoldt(13, X)
    above = tapered_von_mangoldt(17, X)
    assert below == pytest.approx(math.log(13), rel=1e-12)
    assert above == pytest.approx(math.log(17) * math.log(256 / 17) / math.log(16), rel=1e-12)


def test_reciprocal_prime_sum_small(table_1e3):
    assert reciprocal_prime_sum(0, 10, table_1e3) == pytest.approx(
        1 / 2 + 1 / 3 + 1 / 5 + 1 / 7, abs=1e-15)
    assert reciprocal_prime_sum(0, 2, table_1e3) == 0.5


def test_reciprocal_prime_sum_additive(table_1e3):
    f = lambda a, b: reciprocal_prime_sum(a, b, table_1e3)
    assert abs(f(0, 100) + f(100, 1000) - f(0, 1000)) <= 1e-12


def test_reciprocal_prime_sum_errors(table_1e3):
    with pytest.raises(DomainError):
        reciprocal_prime_sum(0, 2000, table_1e3)
    with pytest.raises(DomainError):
        reciprocal_prime_sum(10, 10, table_1e3)


def test_mertens_sum_1e6(table_1e6):
    total = reciprocal_prime_sum(0, 10**6, table_1e6)
    mertens = 0.26149721
    assert abs(total - math.log(math.log(10**6)) - mertens) <= 1e-3


def test_prime_variance_values(table_1e3):
    assert prime_variance(100, 0.5, table_1e3) == pytest.approx(0.9014088, abs=5e-7)
    assert prime_variance(2, 0.5, table_1e3) == 0.25
    # direct-summation oracle over p <= 100 (not the full prime zeta tail)
    direct = 0.5 * math.fsum(1.0 / p**2 for p in table_1e3.in_range(0, 100).tolist())
    assert prime_variance(100, 1.0, table_1e3) == pytest.approx(direct, abs=1e-15)
    with pytest.raises(DomainError):
        prime_variance(100, 0.3, table_1e3)


def test_prime_powers_below(table_1e3):
    ns, logps, ks = prime_powers_below(table_1e3, 6.0)
    assert ns.tolist() == [2, 3, 4, 5]
    assert ks.tolist() == [1, 1, 2, 1]
    assert logps[2] == pytest.approx(math.log(2), abs=1e-15)
    ns32, _, _ = prime_powers_below(table_1e3, 32.0)
    expected = sorted(p**k for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)
                      for k in range(1, 6) if p**k < 32)
    assert ns32.tolist() == expected


def test_compensated_sum_matches_fsum():
    rng = np.random.default_rng(7)
    vals = rng.normal(size=300001) * 1e6
    assert compensated_sum(vals) == pytest.approx(math.fsum(vals.tolist()), abs=1e-6)

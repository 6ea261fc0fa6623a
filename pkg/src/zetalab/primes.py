"""Prime sieving, von Mangoldt weights, and prime power/reciprocal sums.

A ``PrimeTable`` is an immutable sieve result shared by every module that
sums over primes or prime powers.  Sieving is segmented so that limits up to
the memory cap are reachable in bounded memory; all reciprocal/variance sums
accumulate compensated (``math.fsum`` for moderate counts, chunked Kahan
beyond that).
"""

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from zetalab.errors import DomainError, ResourceError

MEMORY_CAP = 10**9          # largest sieve limit accepted by default
_SEGMENT = 1 << 20
_PRIME_CACHE_MAGIC = b"SCLTPRIM"
_FSUM_MAX = 1 << 21


@dataclass(frozen=True)
class PrimeTable:
    """Primes up to ``limit`` with least-prime-factor access."""

    limit: int
    primes: np.ndarray = field(repr=False)

    def count(self):
        return int(self.primes.size)

    def in_range(self, lo, hi):
        """Primes p with lo < p <= hi, as a view into the table."""
        if hi > self.limit:
            raise DomainError(f"range end {hi} exceeds table limit {self.limit}")
        i = np.searchsorted(self.primes, lo, side="right")
        j = np.searchsorted(self.primes, hi, side="right")
        return self.primes[i:j]

    def is_prime(self, n):
        i = np.searchsorted(self.primes, n)
        return i < self.primes.size and int(self.primes[i]) == n

    def least_prime_factor(self, n):
        """Least prime factor of n <= limit (n itself when n is prime)."""
        if n < 2 or n > self.limit:
            raise DomainError(f"n={n} outside table range [2, {self.limit}]")
        root = math.isqrt(n)
        for p in self.primes[: np.searchsorted(self.primes, root, side="right")]:
            if n % int(p) == 0:
                return int(p)
        return n

    def save(self, path):
        """Binary cache: magic 'SCLTPRIM', u64 limit, little-endian u64 primes."""
        with open(path, "wb") as fh:
            fh.write(_PRIME_CACHE_MAGIC)
            fh.write(struct.pack("<Q", self.limit))
            fh.write(self.primes.astype("<u8").tobytes())

    @staticmethod
    def load(path):
        with open(path, "rb") as fh:
            magic = fh.read(8)
            if magic != _PRIME_CACHE_MAGIC:
                raise DomainError(f"bad prime cache magic {magic!r}")
            (limit,) = struct.unpack("<Q", fh.read(8))
            primes = np.frombuffer(fh.read(), dtype="<u8").astype(np.int64)
        return PrimeTable(limit=int(limit), primes=primes)


def sieve_primes(limit, memory_cap=MEMORY_CAP):
    """Segmented sieve of Eratosthenes; exactly the primes <= limit."""
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if limit > memory_cap:
        raise ResourceError(f"sieve limit {limit} exceeds memory cap {memory_cap}")
    root = math.isqrt(limit)
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for p in range(2, math.isqrt(root) + 1):
        if base[p]:
            base[p * p :: p] = False
    base_primes = np.nonzero(base)[0]

    chunks = [base_primes[base_primes <= limit]]
    lo = root + 1
    while lo <= limit:
        hi = min(lo + _SEGMENT, limit + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base_primes:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                seg[start - lo :: p] = False
        chunks.append(np.nonzero(seg)[0] + lo)
        lo = hi
    primes = np.concatenate(chunks).astype(np.int64)
    return PrimeTable(limit=limit, primes=primes)


def von_mangoldt(n):
    """log p when n = p^k for a prime p and k >= 1, else 0."""
    n = int(n)
    if n < 1:
        raise DomainError(f"von Mangoldt weight needs n >= 1, got {n}")
    if n == 1:
        return 0.0
    p = _least_factor(n)
    m = n
    while m % p == 0:
        m //= p
    return math.log(p) if m == 1 else 0.0


def _least_factor(n):
    if n % 2 == 0:
        return 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return f
        f += 2
    return n


def tapered_von_mangoldt(n, cutoff):
    """von Mangoldt weight with a linear-in-log taper between cutoff and cutoff^2.

    Full weight for n <= cutoff, weight * log(cutoff^2/n)/log(cutoff) for
    cutoff <= n <= cutoff^2, zero beyond.  Continuous along prime powers;
    vanishes at n = cutoff^2.
    """
    if cutoff < 2:
        raise DomainError(f"taper cutoff must be >= 2, got {cutoff}")
    n = int(n)
    w = von_mangoldt(n)
    if w == 0.0 or n <= cutoff:
        return w
    if n > cutoff * cutoff:
        return 0.0
    return w * (2.0 - math.log(n) / math.log(cutoff))


def prime_powers_below(table, bound):
    """Prime powers p^k < bound (strict), with their log p and exponent k.

    Returns (n, logp, k) arrays sorted by n.  Requires bound <= table.limit + 1
    so the prime part of the range is fully covered.
    """
    if bound - 1 > table.limit:
        raise DomainError(f"need primes up to {bound - 1}, table limit {table.limit}")
    ns, logps, ks = [], [], []
    for p in table.in_range(0, min(table.limit, int(math.ceil(bound)))):
        p = int(p)
        if p >= bound:
            break
        lp = math.log(p)
        n, k = p, 1
        while n < bound:
            ns.append(n)
            logps.append(lp)
            ks.append(k)
            n *= p
            k += 1
    order = np.argsort(np.asarray(ns, dtype=np.int64), kind="stable")
    return (
        np.asarray(ns, dtype=np.int64)[order],
        np.asarray(logps, dtype=np.float64)[order],
        np.asarray(ks, dtype=np.int64)[order],
    )


def compensated_sum(values):
    """Compensated sum of a float array: fsum when affordable, chunked Kahan else."""
    values = np.asarray(values, dtype=np.float64)
    if values.size <= _FSUM_MAX:
        return math.fsum(values.tolist())
    acc = 0.0
    comp = 0.0
    for lo in range(0, values.size, _FSUM_MAX):
        block = math.fsum(values[lo : lo + _FSUM_MAX].tolist())
        y = block - comp
        tmp = acc + y
        comp = (tmp - acc) - y
        acc = tmp
    return acc


def reciprocal_prime_sum(lo, hi, table):
    """Sum of 1/p over primes lo < p <= hi."""
    if not lo < hi:
        raise DomainError(f"need lo < hi, got ({lo}, {hi})")
    ps = table.in_range(lo, hi)
    return compensated_sum(1.0 / ps.astype(np.float64))


def prime_variance(X, sigma0, table):
    """(1/2) * sum_{p <= X} p^(-2*sigma0) — the prime-sum variance main term."""
    if not 0.5 <= sigma0 <= 1.0:
        raise DomainError(f"sigma0 must lie in [1/2, 1], got {sigma0}")
    ps = table.in_range(0, X).astype(np.float64)
    return 0.5 * compensated_sum(ps ** (-2.0 * sigma0))

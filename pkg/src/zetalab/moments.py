"""Closed-form prime-sum moments, the exact independent-random-phase oracle,
and empirical moments.

``order`` is always the full exponent on the prime sum: the even closed form
is (2k-1)!! var^k at order 2k, the random-phase oracle is exact for any order
(odd orders vanish by phase symmetry), and empirical moments are plain means.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from zetalab.errors import DomainError, ResourceError
from zetalab.primes import prime_variance

_MAX_EXPANSION_PRIMES = 30
_MAX_EXPANSION_TERMS = 5_000_000

# cumulants of cos(theta), theta uniform: kappa_2, kappa_4, kappa_6, kappa_8
_COS_CUMULANTS = {2: 0.5, 4: -0.375, 6: 1.25, 8: float(Fraction(-1155, 128))}


def closed_form_moment(order, X, sigma0, table):
    """Main term of E[(Re sum_{p<=X} p^{-s0})^order].

    Even order 2k: 2^{-k} (2k)!/k! * prime_variance^k.  Odd orders have main
    term 0; order 0 returns 1.  The k-2 correction and the X^{4k}/T error are
    reported separately (see moment_correction_bound), never added here.
    """
    if order < 0:
        raise DomainError(f"moment order must be >= 0, got {order}")
    if order == 0:
        return 1.0
    if order % 2 == 1:
        return 0.0
    k = order // 2
    var = prime_variance(X, sigma0, table)
    coeff = math.factorial(2 * k) // (math.factorial(k) * 2**k)
    return float(coeff) * var**k


def moment_correction_bound(order, X, sigma0, table):
    """Magnitude of the closed form's var^{k-2} correction term; None where the
    lemma's correction is not applicable (odd orders and k < 2)."""
    if order % 2 == 1 or order < 4:
        return None
    k = order // 2
    var = prime_variance(X, sigma0, table)
    coeff = math.factorial(2 * k) // (math.factorial(k) * 2**k)
    return float(coeff) * var ** (k - 2)


def _even_cos_moments(max_exponent):
    """E[cos^{2m} theta] = C(2m, m) / 4^m for 2m <= max_exponent."""
    out = {0: 1.0}
    for m in range(1, max_exponent // 2 + 1):
        out[2 * m] = float(Fraction(math.comb(2 * m, m), 4**m))
    return out


def _compositions(total, parts):
    """All tuples of ``parts`` nonnegative integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def random_phase_moment(order, X, sigma0, table):
    """Exact E[(sum_{p<=X} p^{-sigma0} cos theta_p)^order] for independent
    uniform phases theta_p.

    Odd orders vanish exactly.  Even orders use the multinomial expansion for
    up to 30 primes; beyond that a cumulant shortcut covers order <= 8.
    """
    if order < 0:
        raise DomainError(f"moment order must be >= 0, got {order}")
    if order == 0:
        return 1.0
    if order % 2 == 1:
        return 0.0
    if not 0.5 <= sigma0 <= 1.0:
        raise DomainError(f"sigma0 must lie in [1/2, 1], got {sigma0}")
    ps = table.in_range(0, X).astype(np.float64)
    if ps.size == 0:
        return 0.0
    ap2 = ps ** (-2.0 * sigma0)          # squared amplitudes, the shared primitive
    k = order // 2
    nprimes = ps.size
    if nprimes <= _MAX_EXPANSION_PRIMES and math.comb(k + nprimes - 1, k) <= _MAX_EXPANSION_TERMS:
        cos_moments = _even_cos_moments(order)
        fact = math.factorial(order)
        terms = []
        for comp in _compositions(k, nprimes):
            coeff = fact
            value = 1.0
            for m, a2 in zip(comp, ap2):
                if m:
                    coeff //= math.factorial(2 * m)
                    value *= a2**m * cos_moments[2 * m]
            terms.append(coeff * value)
        return math.fsum(terms)
    if order <= 8:
        return _cumulant_moment(order, ap2)
    raise ResourceError(
        f"multinomial expansion too large ({nprimes} primes, order {order}); "
        "use a Monte Carlo estimate instead")


def _cumulant_moment(order, ap2):
    """Even moments up to order 8 from per-prime cosine cumulants."""
    kappa = {m: _COS_CUMULANTS[m] * math.fsum((ap2 ** (m // 2)).tolist())
             for m in (2, 4, 6, 8)}
    if order == 2:
        return kappa[2]
    if order == 4:
        return kappa[4] + 3.0 * kappa[2] ** 2
    if order == 6:
        return kappa[6] + 15.0 * kappa[4] * kappa[2] + 15.0 * kappa[2] ** 3
    return (kappa[8] + 28.0 * kappa[6] * kappa[2] + 35.0 * kappa[4] ** 2
            + 210.0 * kappa[4] * kappa[2] ** 2 + 105.0 * kappa[2] ** 4)


def empirical_moment(samples, order):
    """Mean of x^order over the samples (signed for odd orders)."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise DomainError("empirical moment needs at least one sample")
    return float(np.mean(samples**order))


@dataclass(frozen=True)
class MomentReport:
    """Three-way comparison of one even moment order = 2k."""

    k: int
    closed_form: float
    random_phase: float
    empirical: float
    gap_cf_emp: float
    gap_rp_cf: float
    n: int
    correction_bound: float | None
    xpow_over_t: float
    regime_flag: bool

    @staticmethod
    def build(k, closed_form, random_phase, empirical, n, correction_bound, xpow_over_t):
        scale = abs(closed_form) if closed_form else 1.0
        return MomentReport(
            k=k, closed_form=closed_form, random_phase=random_phase,
            empirical=empirical,
            gap_cf_emp=abs(empirical - closed_form) / scale,
            gap_rp_cf=abs(random_phase - closed_form) / scale,
            n=n, correction_bound=correction_bound, xpow_over_t=xpow_over_t,
            regime_flag=bool(xpow_over_t > 0.1 * abs(closed_form)))

    def to_json_dict(self):
        return {
            "k": self.k,
            "closed_form": self.closed_form,
            "random_phase": self.random_phase,
            "empirical": self.empirical,
            "gap_cf_emp": self.gap_cf_emp,
            "gap_rp_cf": self.gap_rp_cf,
            "n": self.n,
            "correction_bound": self.correction_bound,
            "xpow_over_t": self.xpow_over_t,
            "regime_flag": self.regime_flag,
        }

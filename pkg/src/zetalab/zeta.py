"""Riemann zeta evaluation off the critical line, zero finding, and the
mollified log-derivative identity.

Evaluation uses Euler-Maclaurin summation (not Riemann-Siegel): the chain
experiment needs zeta slightly off the line (sigma0 > 1/2), and at desk-scale
heights the O(t) cost of the direct sum is acceptable.  Every value carries
an error bound: the standard truncation bound for the Bernoulli correction
series plus a worst-case roundoff floor for the phase arithmetic t*log n.
The floor is evaluated at the minimal admissible term count for the height,
so raising ``terms``/``bernoulli_order`` never worsens the bound.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from zetalab import backend
from zetalab.errors import ConfigError, DomainError, ZetalabError
from zetalab.primes import prime_powers_below

SIGMA_MIN = 0.4              # supported half-plane
HEIGHT_CAP = 1.0e7           # |t| cap for zeta evaluation (cost is O(t))
ZERO_SCAN_CAP = 1.0e5        # height cap for zero scans
MIN_TERMS = 32
ZERO_FLOOR = 1e-300          # |zeta| below this is a flagged sample
ZERO_VERIFY_TOL = 1e-4
_EPS = float(np.finfo(np.float64).eps)

# B_2, B_4, ..., B_44 as exact fractions (enough for bernoulli_order <= 20
# plus the first omitted term of the error bound).
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
    Fraction(43867, 798), Fraction(-174611, 330), Fraction(854513, 138),
    Fraction(-236364091, 2730), Fraction(8553103, 6), Fraction(-23749461029, 870),
    Fraction(8615841276005, 14322), Fraction(-7709321041217, 510),
    Fraction(2577687858367, 6), Fraction(-26315271553053477373, 1919190),
    Fraction(2929993913841559, 6), Fraction(-261082718496449122051, 13530),
    Fraction(1520097643918070802691, 1806), Fraction(-27833269579301024235023, 690),
]
# _EM_COEF[k] = B_{2k} / (2k)!  for k = 1..22 (index 0 unused)
_EM_COEF = [0.0] + [float(b / math.factorial(2 * k)) for k, b in enumerate(_BERNOULLI, start=1)]
MAX_ORDER = 20


@dataclass(frozen=True)
class SPoint:
    """A point s = sigma + i t in the evaluation half-plane."""

    sigma: float
    t: float

    def as_complex(self):
        return complex(self.sigma, self.t)


@dataclass(frozen=True)
class EMConfig:
    """Euler-Maclaurin evaluation parameters.

    terms=0 picks the minimal admissible count max(32, ceil(|t|/pi)) per
    point.  An explicit ``terms`` below that raises a config error.
    """

    terms: int = 0
    bernoulli_order: int = 12
    error_budget: float = 1e-3

    def __post_init__(self):
        if not 1 <= self.bernoulli_order <= MAX_ORDER:
            raise ConfigError(f"bernoulli_order must be in [1, {MAX_ORDER}]")
        if self.terms < 0:
            raise ConfigError("terms must be >= 0 (0 = automatic)")
        if self.error_budget <= 0:
            raise ConfigError("error_budget must be positive")


class ZetaValue(NamedTuple):
    value: complex
    bound: float


class LogDerivValue(NamedTuple):
    value: complex
    rel_bound: float


def required_terms(t):
    """Minimal admissible direct-sum length at height t."""
    return np.maximum(MIN_TERMS, np.ceil(np.abs(t) / math.pi)).astype(np.int64)


def _check_domain(sigma, t):
    if sigma < SIGMA_MIN:
        raise DomainError(f"sigma={sigma} below supported half-plane sigma >= {SIGMA_MIN}")
    t = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(t)):
        raise DomainError("height t must be finite")
    if np.any(np.abs(t) > HEIGHT_CAP):
        raise DomainError(f"|t| exceeds evaluation height cap {HEIGHT_CAP:g}")
    if sigma == 1.0 and np.any(t == 0.0):
        raise DomainError("s = 1 is the pole of zeta")
    return t


def _terms_for(t, cfg):
    req = required_terms(t)
    if cfg.terms:
        short = req > cfg.terms
        if np.any(short):
            need = int(req[short].max())
            raise ConfigError(
                f"terms={cfg.terms} below accuracy domain: need >= {need} "
                f"at the requested heights (terms >= ceil(|t|/pi))")
        return np.full(t.shape, int(cfg.terms), dtype=np.int64)
    return req


def _roundoff_floor(sigma, t):
    """Worst-case roundoff model at the minimal admissible term count.

    Per-term phase error |t * log n| * eps plus magnitude rounding, summed
    against sum n^{-sigma} <= 1 + (N^{1-sigma}-1)/(1-sigma).
    """
    n0 = required_terms(t).astype(np.float64)
    if sigma == 1.0:
        mag = 1.0 + np.log(n0)
    else:
        mag = 1.0 + (n0 ** (1.0 - sigma) - 1.0) / (1.0 - sigma)
    return _EPS * (2.0 + np.abs(t) * np.log(n0)) * mag


def zeta_batch(sigma, t, cfg=None):
    """Euler-Maclaurin zeta(sigma + i t) over an array of heights.

    Returns (values, bounds); bounds dominate the truncation error and carry
    the roundoff floor for the height.
    """
    cfg = cfg or EMConfig()
    t = _check_domain(sigma, t)
    terms = _terms_for(t, cfg)
    nmax = int(terms.max())
    logn = np.log(np.arange(1, nmax + 1, dtype=np.float64))
    coef = np.exp(-sigma * logn)
    partial = backend.dirichlet_sum_batch(logn, coef, t, terms)

    s = sigma + 1j * t
    n = terms.astype(np.float64)
    logN = np.log(n)
    npow = np.exp(-s * logN)                     # N^{-s}
    value = partial - 0.5 * npow + npow * n / (s - 1.0)

    m = cfg.bernoulli_order
    scale = npow * n                             # N^{1-s}
    nsq = n * n
    rising = s.astype(np.complex128)             # prod_{j=0}^{2k-2} (s+j)
    absrise = np.abs(s)
    for k in range(1, m + 1):
        scale = scale / nsq
        value = value + _EM_COEF[k] * rising * scale
        rising = rising * (s + (2 * k - 1)) * (s + 2 * k)
        absrise = absrise * np.abs(s + (2 * k - 1)) * np.abs(s + 2 * k)
    trunc = (abs(_EM_COEF[m + 1]) * absrise * n ** (-sigma - 2 * m - 1)
             * np.abs(s + (2 * m + 1)) / (sigma + 2 * m + 1))
    bound = trunc + _roundoff_floor(sigma, t)
    worst = float(bound.max()) if bound.size else 0.0
    if worst > cfg.error_budget:
        raise ConfigError(
            f"attached error bound {worst:.3g} exceeds error budget "
            f"{cfg.error_budget:g}; raise the budget or lower the height")
    return value, bound


def zeta(s, cfg=None):
    """zeta at a single point, with its attached error bound."""
    vals, bounds = zeta_batch(s.sigma, np.array([s.t]), cfg)
    return ZetaValue(complex(vals[0]), float(bounds[0]))


def log_abs_zeta_batch(sigma, t, cfg=None):
    """log|zeta| over heights; flags points where |zeta| is below the floor."""
    vals, _ = zeta_batch(sigma, t, cfg)
    mag = np.abs(vals)
    flagged = mag < ZERO_FLOOR
    out = np.empty_like(mag)
    out[~flagged] = np.log(mag[~flagged])
    out[flagged] = -np.inf
    return out, flagged


def log_abs_zeta(s, cfg=None):
    """log|zeta(s)|; -inf signals a below-floor (flagged) sample."""
    vals, flags = log_abs_zeta_batch(s.sigma, np.array([s.t]), cfg)
    return float(vals[0])


def zeta_log_deriv_batch(sigma, t, cfg=None):
    """zeta'/zeta from the term-wise differentiated Euler-Maclaurin formula.

    Returns (values, relative bounds).
    """
    cfg = cfg or EMConfig()
    t = _check_domain(sigma, t)
    terms = _terms_for(t, cfg)
    nmax = int(terms.max())
    logn = np.log(np.arange(1, nmax + 1, dtype=np.float64))
    coef = np.exp(-sigma * logn)
    partial = backend.dirichlet_sum_batch(logn, coef, t, terms)
    dpartial = -backend.dirichlet_sum_batch(logn, coef * logn, t, terms)

    s = sigma + 1j * t
    n = terms.astype(np.float64)
    logN = np.log(n)
    npow = np.exp(-s * logN)
    pole = npow * n / (s - 1.0)
    value = partial - 0.5 * npow + pole
    deriv = dpartial + 0.5 * logN * npow - logN * pole - pole / (s - 1.0)

    m = cfg.bernoulli_order
    scale = npow * n
    nsq = n * n
    rising = s.astype(np.complex128)
    harmonic = 1.0 / s
    absrise = np.abs(s)
    for k in range(1, m + 1):
        scale = scale / nsq
        value = value + _EM_COEF[k] * rising * scale
        deriv = deriv + _EM_COEF[k] * rising * (harmonic - logN) * scale
        rising = rising * (s + (2 * k - 1)) * (s + 2 * k)
        harmonic = harmonic + 1.0 / (s + (2 * k - 1)) + 1.0 / (s + 2 * k)
        absrise = absrise * np.abs(s + (2 * k - 1)) * np.abs(s + 2 * k)
    trunc = (abs(_EM_COEF[m + 1]) * absrise * n ** (-sigma - 2 * m - 1)
             * np.abs(s + (2 * m + 1)) / (sigma + 2 * m + 1))
    bound = trunc + _roundoff_floor(sigma, t)

    mag = np.abs(value)
    if np.any(mag < ZERO_FLOOR):
        raise DomainError("zeta'/zeta requested at a numerical zero of zeta")
    ratio = deriv / value
    # derivative of each EM piece is the piece times a factor <= log N + 2M+2
    deriv_bound = bound * (logN + 2 * m + 2)
    abs_err = (deriv_bound + np.abs(ratio) * bound) / mag
    rel = abs_err / np.maximum(np.abs(ratio), 1e-30)
    return ratio, rel


def zeta_log_deriv(s, cfg=None):
    vals, rels = zeta_log_deriv_batch(s.sigma, np.array([s.t]), cfg)
    return LogDerivValue(complex(vals[0]), float(rels[0]))


# ---------------------------------------------------------------------------
# Hardy Z and zero finding
# ---------------------------------------------------------------------------

def riemann_siegel_theta(t):
    """Stirling asymptotic of the phase theta(t), three correction terms."""
    t = np.asarray(t, dtype=np.float64)
    return (0.5 * t * np.log(t / (2.0 * math.pi)) - 0.5 * t - math.pi / 8.0
            + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t**3) + 31.0 / (80640.0 * t**5))


def hardy_z_batch(t, cfg=None):
    """Hardy Z(t) = exp(i theta(t)) zeta(1/2 + i t); real, zeros = zeta zeros."""
    t = np.asarray(t, dtype=np.float64)
    if np.any(t <= 0):
        raise DomainError("Hardy Z scan needs t > 0")
    vals, bounds = zeta_batch(0.5, t, cfg)
    rotated = np.exp(1j * riemann_siegel_theta(t)) * vals
    theta_err = 127.0 / (430080.0 * t**7)
    return rotated.real, bounds + np.abs(vals) * theta_err


@dataclass(frozen=True)
class ZeroList:
    """Critical-line zero ordinates found in a window."""

    ordinates: np.ndarray = field(repr=False)
    window: tuple
    resolution: float
    count_ok: bool
    expected_count: float

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(f"# window {self.window[0]:.12g} {self.window[1]:.12g} "
                     f"{self.resolution:.12g}\n")
            for g in self.ordinates:
                fh.write(f"{g:.12g}\n")

    @staticmethod
    def load(path):
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) != 5 or header[0] != "#" or header[1] != "window":
                raise DomainError(f"bad zero cache header in {path}")
            t_min, t_max, resolution = map(float, header[2:])
            ordinates = np.array([float(line) for line in fh if line.strip()])
        expected = rvm_count(t_max) - rvm_count(t_min)
        ok = abs(ordinates.size - expected) <= 2.0
        return ZeroList(ordinates=ordinates, window=(t_min, t_max),
                        resolution=resolution, count_ok=ok, expected_count=expected)


def rvm_count(t):
    """Riemann-von Mangoldt main-term count of zeros with 0 < ordinate <= t."""
    if t <= 2.0 * math.pi:
        return 0.0
    x = t / (2.0 * math.pi)
    return x * math.log(x) - x + 7.0 / 8.0


def find_zeros(t_min, t_max, cfg=None, resolution=0.05):
    """All sign changes of Hardy Z on a grid of step <= resolution, refined
    by bisection to 1e-8.  The Riemann-von Mangoldt main-term count check
    sets count_ok=False when the found count is off by more than 2.
    """
    if not 0 < t_min < t_max:
        raise DomainError(f"need 0 < t_min < t_max, got ({t_min}, {t_max})")
    if t_max > ZERO_SCAN_CAP:
        raise ConfigError(f"zero scan window exceeds height cap {ZERO_SCAN_CAP:g}")
    if resolution <= 0:
        raise DomainError("resolution must be positive")
    npts = int(math.ceil((t_max - t_min) / resolution)) + 1
    grid = np.linspace(t_min, t_max, npts)
    z, _ = hardy_z_batch(grid, cfg)

    idx = np.nonzero((z[:-1] < 0) != (z[1:] < 0))[0]
    lo, hi = grid[idx].copy(), grid[idx + 1].copy()
    zlo = z[idx].copy()
    if idx.size:
        iters = int(math.ceil(math.log2(max(resolution, 1e-8) / 1e-8))) + 2
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            zm, _ = hardy_z_batch(mid, cfg)
            left = (zm < 0) == (zlo < 0)
            lo = np.where(left, mid, lo)
            zlo = np.where(left, zm, zlo)
            hi = np.where(left, hi, mid)
    ordinates = 0.5 * (lo + hi)

    if ordinates.size:
        zfin, _ = hardy_z_batch(ordinates, cfg)
        if np.any(np.abs(zfin) > ZERO_VERIFY_TOL):
            raise ZetalabError("refined ordinate failed |zeta| verification")
    expected = rvm_count(t_max) - rvm_count(t_min)
    ok = abs(ordinates.size - expected) <= 2.0
    return ZeroList(ordinates=ordinates, window=(float(t_min), float(t_max)),
                    resolution=float(resolution), count_ok=ok, expected_count=expected)


# ---------------------------------------------------------------------------
# Mollified log-derivative identity (residual check)
# ---------------------------------------------------------------------------

def _model_zero_density(u):
    return max(0.0, math.log(u / (2.0 * math.pi))) / (2.0 * math.pi)


def _gap_integral(a, b, t, sigma):
    """Integral of the zero-density model against 1/|s - rho|^2 over ordinates
    u in (a, b), rho = 1/2 + i u.  b may be inf."""
    off = (sigma - 0.5) ** 2
    hi = b if math.isfinite(b) else max(1e7, 1e4 * (abs(t) + a + 1.0))
    if hi <= a:
        return 0.0
    grid = np.geomspace(max(a, 1.0), hi, 4000)
    dens = np.maximum(0.0, np.log(grid / (2.0 * math.pi))) / (2.0 * math.pi)
    val = float(np.trapezoid(dens / ((t - grid) ** 2 + off), grid))
    if not math.isfinite(b):
        # remainder beyond the numeric horizon
        val += 1.1 * _model_zero_density(hi) / max(hi - abs(t), 1.0)
    return val


def _zero_tail_bound(s, X, zeros):
    """Density-model bound on the zero-sum contribution outside the window."""
    t_min, t_max = zeros.window
    t, sigma = s.t, s.sigma
    logX = math.log(X)
    amp = (X ** (0.5 - sigma) + X ** (2.0 * (0.5 - sigma))) / logX
    total = 0.0
    first_zero = 14.0
    for sign in (1.0, -1.0):
        ts = sign * t
        total += _gap_integral(t_max, math.inf, ts, sigma)
        if t_min > first_zero:
            total += _gap_integral(first_zero, t_min, ts, sigma)
    return amp * total


def mollifier_identity_residual(s, X, zeros, table, cfg=None):
    """Residual of the mollified log-derivative identity at s.

    |zeta'/zeta(s) + sum_{n < X^2} Lambda_X(n) n^{-s}
       - (1/log X) sum_{rho in window} (X^{rho-s} - X^{2(rho-s)})/(s-rho)^2|

    The dropped pole/trivial-zero terms and the off-window zero tail are part
    of the identity's O(1), so residuals stay bounded across sweeps rather
    than vanish.  Raises when the supplied window is too narrow for the tail
    bound to stay below 1.
    """
    if X < 2:
        raise DomainError(f"mollifier cutoff X must be >= 2, got {X}")
    tail = _zero_tail_bound(s, X, zeros)
    if tail >= 1.0:
        raise ConfigError(
            f"zero window {zeros.window} too narrow at t={s.t}: tail bound "
            f"{tail:.3g} >= 1; widen the window (roughly double it)")

    lder = zeta_log_deriv(s, cfg).value

    ns, logps, _ = prime_powers_below(table, X * X)
    logn = np.log(ns.astype(np.float64))
    logX = math.log(X)
    taper = np.clip(2.0 - logn / logX, 0.0, 1.0)
    weights = logps * np.where(ns <= X, 1.0, taper)
    coef = weights * np.exp(-s.sigma * logn)
    moll = complex(backend.dirichlet_sum_batch(logn, coef, np.array([s.t]),
                                               np.array([ns.size], dtype=np.int64))[0])

    gammas = np.concatenate([zeros.ordinates, -zeros.ordinates])
    rho_minus_s = (0.5 - s.sigma) + 1j * (gammas - s.t)
    a = np.exp(rho_minus_s * logX)
    zsum = complex(np.sum((a - a * a) / ((-rho_minus_s) ** 2))) / logX

    return abs(lder + moll - zsum)

"""Parameter ladder and per-sample evaluation of the approximation chain.

Stages at a sampled height tau (all divided by the normaliser):
  v   log|zeta(1/2 + i tau)|
  w   log|zeta(sigma0 + i tau)|
  x   Re of the mollifier sum over prime powers n < X^2
  p   Re sum over primes p <= X of p^{-s0}
  p12 the same sum truncated at X2 (p3 = the discarded X2 < p <= X part)

The ladder's asymptotic cutoff formulas degenerate at reachable T, so
explicit exponents and recorded clamps keep the structural chain intact at
desk scale.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from zetalab import backend
from zetalab.errors import ConfigError, DomainError
from zetalab.primes import prime_powers_below
from zetalab.zeta import EMConfig, SPoint, log_abs_zeta_batch

DEFAULT_X_SQUARED_CAP = 10**8


@dataclass(frozen=True)
class ClampPolicy:
    """Desk-scale clamping: a cap on X^2 plus optional explicit exponents."""

    x_squared_cap: int = DEFAULT_X_SQUARED_CAP
    exponents: tuple | None = None     # (theta_x, theta_1, theta_2) or None


@dataclass(frozen=True)
class ParameterLadder:
    T: float
    sigma0: float
    s_norm: float                      # sqrt(0.5 * log log T)
    X: float
    X1: float
    X2: float
    clamps: tuple = ()

    def describe(self):
        return {"T": self.T, "sigma0": self.sigma0, "s_norm": self.s_norm,
                "X": self.X, "X1": self.X1, "X2": self.X2,
                "clamps": list(self.clamps)}


def ladder_from_T(T, policy=None, sigma0=None):
    """Build the parameter ladder at height T.

    With explicit exponents: X = T^theta_x, X1 = T^theta_1, X2 = T^theta_2.
    Otherwise the asymptotic formulas X = T^(1/(log4 T)^(1/4)),
    X1 = T^(1/loglog T), X2 = T^(1/logloglog T) are used where the iterated
    logs are positive, then clamped to X1 <= X2 <= X and X^2 <= cap with the
    applied clamps recorded.
    """
    policy = policy or ClampPolicy()
    if T < 1e3:
        raise DomainError(f"need T >= 1e3 so that log log T > 0, got {T}")
    logT = math.log(T)
    if sigma0 is None:
        sigma0 = 0.5 + 1.0 / logT
    if sigma0 <= 0.5:
        raise ConfigError(f"off-axis shift must be positive: sigma0={sigma0} <= 1/2")
    s_norm = math.sqrt(0.5 * math.log(logT))

    clamps = []
    if policy.exponents is not None:
        th_x, th_1, th_2 = policy.exponents
        if not 0 < th_1 <= th_2 <= th_x:
            raise ConfigError(
                f"explicit exponents must satisfy 0 < theta_1 <= theta_2 <= theta_x, "
                f"got ({th_x}, {th_1}, {th_2})")
        X, X1, X2 = T**th_x, T**th_1, T**th_2
    else:
        log2T = math.log(logT)
        log3T = math.log(log2T) if log2T > 0 else float("-inf")
        log4T = math.log(log3T) if log3T > 0 else float("-inf")
        if not (log4T > 0):
            raise ConfigError(
                f"iterated-log cutoff formulas are undefined at T={T:g} "
                f"(log4 T <= 0; need T > e^e^e ~ 3.81e6): supply explicit exponents")
        X = T ** (1.0 / log4T**0.25)
        X1 = T ** (1.0 / log2T)
        X2 = T ** (1.0 / log3T)

    cap_x = math.sqrt(policy.x_squared_cap)
    if X > cap_x:
        X = cap_x
        clamps.append(f"X -> sqrt(cap) = {cap_x:g}")
    if X2 > X:
        X2 = X
        clamps.append("X2 -> X")
    if X1 > X2:
        X1 = X2
        clamps.append("X1 -> X2")
    if X1 < 2.0:
        raise ConfigError(
            f"X1 = {X1:g} < 2 leaves no primes in the first truncation stage (empty P1)")
    return ParameterLadder(T=float(T), sigma0=float(sigma0), s_norm=float(s_norm),
                           X=float(X), X1=float(X1), X2=float(X2),
                           clamps=tuple(clamps))


# ---------------------------------------------------------------------------
# Dirichlet sums over the ladder's prime sets
# ---------------------------------------------------------------------------

def _mollifier_arrays(X, table):
    ns, logps, _ = prime_powers_below(table, X * X)
    logn = np.log(ns.astype(np.float64))
    taper = np.clip(2.0 - logn / math.log(X), 0.0, 1.0)
    weights = logps * np.where(ns <= X, 1.0, taper)
    return logn, weights


def mollifier_sum_batch(sigma0, taus, X, table):
    """Mollifier sum over prime powers n < X^2 of Lambda_X(n) n^{-s0}/log n."""
    if X * X - 1 > table.limit:
        raise DomainError(f"mollifier needs primes to {X*X:g}, table limit {table.limit}")
    if sigma0 <= 0:
        raise DomainError("mollifier needs sigma0 > 0")
    logn, weights = _mollifier_arrays(X, table)
    coef = weights / logn * np.exp(-sigma0 * logn)
    taus = np.asarray(taus, dtype=np.float64)
    nterms = np.full(taus.shape, logn.size, dtype=np.int64)
    return backend.dirichlet_sum_batch(logn, coef, taus, nterms)


def mollifier_sum(s0, X, table):
    """Single-point mollifier sum (complex)."""
    return complex(mollifier_sum_batch(s0.sigma, np.array([s0.t]), X, table)[0])


def prime_sum_batch(sigma0, taus, lo, hi, table):
    """Re sum_{lo < p <= hi} p^{-(sigma0 + i tau)} over an array of taus."""
    ps = table.in_range(lo, hi).astype(np.float64)
    taus = np.asarray(taus, dtype=np.float64)
    if ps.size == 0:
        return np.zeros(taus.shape)
    logp = np.log(ps)
    coef = np.exp(-sigma0 * logp)
    return backend.cosine_sum_batch(logp, coef, taus)


def prime_sum(s0, lo, hi, table):
    """Re sum over primes lo < p <= hi of p^{-s0} at a single point."""
    return float(prime_sum_batch(s0.sigma, np.array([s0.t]), lo, hi, table)[0])


# ---------------------------------------------------------------------------
# Chain samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainSample:
    """All chain stages at one sampled tau, normalised by the ladder's s_norm."""

    tau: float
    v: float
    w: float
    x: float
    p: float
    p12: float
    p3: float
    flags: tuple = ()


def evaluate_chain_batch(taus, ladder, table, cfg=None):
    """Evaluate every chain stage at each tau; apply s_norm normalisation.

    Deterministic: per-tau results are independent of batching and order.
    """
    cfg = cfg or EMConfig()
    taus = np.asarray(taus, dtype=np.float64)
    if np.any((taus < ladder.T) | (taus > 2.0 * ladder.T)):
        raise DomainError("tau samples must lie in [T, 2T]")
    sn = ladder.s_norm
    v_raw, v_flag = log_abs_zeta_batch(0.5, taus, cfg)
    w_raw, w_flag = log_abs_zeta_batch(ladder.sigma0, taus, cfg)
    x_raw = mollifier_sum_batch(ladder.sigma0, taus, ladder.X, table).real
    p1 = prime_sum_batch(ladder.sigma0, taus, 0.0, ladder.X1, table)
    p2 = prime_sum_batch(ladder.sigma0, taus, ladder.X1, ladder.X2, table)
    p3 = prime_sum_batch(ladder.sigma0, taus, ladder.X2, ladder.X, table)
    p_raw = prime_sum_batch(ladder.sigma0, taus, 0.0, ladder.X, table)

    samples = []
    for i in range(taus.size):
        flags = []
        if v_flag[i]:
            flags.append("v_near_zero")
        if w_flag[i]:
            flags.append("w_near_zero")
        samples.append(ChainSample(
            tau=float(taus[i]),
            v=float(v_raw[i] / sn), w=float(w_raw[i] / sn), x=float(x_raw[i] / sn),
            p=float(p_raw[i] / sn), p12=float((p1[i] + p2[i]) / sn),
            p3=float(p3[i] / sn), flags=tuple(flags)))
    return samples


def evaluate_chain(tau, ladder, table, cfg=None):
    """Single-tau chain sample (same numbers as the batched path)."""
    return evaluate_chain_batch(np.array([tau]), ladder, table, cfg)[0]

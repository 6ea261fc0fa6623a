"""Bounded-Lipschitz (Dudley) distance, Kolmogorov distance, empirical
characteristic functions, and the Fourier-to-distance bound.

The BL distance between discrete measures is computed exactly as a linear
program over test-function values at the merged support: the optimal 1-Lipschitz,
[-1,1]-bounded test function is piecewise linear between atoms, so restricting
to atom values is lossless.  Chain constraints |f_{i+1}-f_i| <= x_{i+1}-x_i are
the only rows; the box is handled as variable bounds.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import linprog
from scipy.stats import norm

from zetalab.errors import DomainError

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Weighted atoms on the line; atoms strictly increasing, weights sum to 1."""

    atoms: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if atoms.size == 0:
            raise DomainError("empirical measure needs at least one atom")
        if atoms.shape != weights.shape:
            raise DomainError("atoms and weights must have matching shapes")
        if not np.all(np.isfinite(atoms)):
            raise DomainError("atoms must be finite")
        if np.any(np.diff(atoms) <= 0):
            raise DomainError("atoms must be strictly increasing (consolidate duplicates)")
        if np.any(weights <= 0):
            raise DomainError("weights must be positive")
        if abs(float(weights.sum()) - 1.0) > WEIGHT_TOL:
            raise DomainError(f"weights sum to {weights.sum()!r}, not 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @staticmethod
    def from_samples(values):
        """Equal-weight measure of a sample vector; duplicates consolidated."""
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0:
            raise DomainError("empirical measure needs at least one sample")
        atoms, counts = np.unique(values, return_counts=True)
        return EmpiricalMeasure(atoms=atoms, weights=counts / values.size)

    @staticmethod
    def from_atoms(atoms, weights):
        """Measure from (atom, weight) pairs; duplicates consolidated, order free."""
        atoms = np.asarray(atoms, dtype=np.float64)
        weights = np.asarray(weights, dtype=np.float64)
        uniq, inverse = np.unique(atoms, return_inverse=True)
        w = np.zeros(uniq.size)
        np.add.at(w, inverse, weights)
        return EmpiricalMeasure(atoms=uniq, weights=w)

    def cdf(self):
        return np.cumsum(self.weights)

    def save_csv(self, path):
        with open(path, "w") as fh:
            fh.write("atom,weight\n")
            for a, w in zip(self.atoms, self.weights):
                fh.write(f"{a!r},{w!r}\n")

    @staticmethod
    def load_csv(path):
        with open(path) as fh:
            header = fh.readline().strip()
            if header != "atom,weight":
                raise DomainError(f"measure CSV must start with 'atom,weight', got {header!r}")
            rows = [line.split(",") for line in fh if line.strip()]
        atoms = np.array([float(r[0]) for r in rows])
        weights = np.array([float(r[1]) for r in rows])
        return EmpiricalMeasure.from_atoms(atoms, weights)


@dataclass(frozen=True)
class GaussianRef:
    """Standard normal discretised into equal-mass quantile atoms."""

    quantization: int = 10000

    def __post_init__(self):
        if self.quantization < 100:
            raise DomainError("Gaussian quantization needs N >= 100")

    def measure(self):
        n = self.quantization
        atoms = norm.ppf((np.arange(n) + 0.5) / n)
        return EmpiricalMeasure(atoms=atoms, weights=np.full(n, 1.0 / n))

    def quantization_error(self):
        """Deterministic bound on d_BL(quantized, exact standard normal)."""
        n = self.quantization
        edge = norm.ppf(1.0 - 0.5 / n)
        # in-range CDF wiggle <= 1/2N, plus mass beyond the extreme quantiles
        return (2.0 * edge) / (2.0 * n) + 2.0 * (norm.pdf(edge) - edge * norm.sf(edge))


def _merged_signed_mass(mu, nu):
    """Merged support and per-atom signed mass mu - nu (zero-mass points dropped:
    the Lipschitz extension through them is free, so they cannot bind)."""
    support = np.union1d(mu.atoms, nu.atoms)
    c = np.zeros(support.size)
    c[np.searchsorted(support, mu.atoms)] += mu.weights
    c[np.searchsorted(support, nu.atoms)] -= nu.weights
    keep = c != 0.0
    return support[keep], c[keep]


def bl_distance(mu, nu):
    """Exact sup over 1-Lipschitz, sup-norm <= 1 test functions of
    |E_mu f - E_nu f|, via the chain LP at the merged support."""
    support, c = _merged_signed_mass(mu, nu)
    if support.size <= 1:
        return 0.0
    gaps = np.diff(support)
    m = support.size
    rows = m - 1
    # rows: f_{i+1} - f_i <= gap_i  and  f_i - f_{i+1} <= gap_i
    idx = np.arange(rows)
    data = np.concatenate([np.ones(rows), -np.ones(rows), -np.ones(rows), np.ones(rows)])
    row_ind = np.concatenate([idx, idx, idx + rows, idx + rows])
    col_ind = np.concatenate([idx + 1, idx, idx + 1, idx])
    a_ub = sparse.csr_matrix((data, (row_ind, col_ind)), shape=(2 * rows, m))
    b_ub = np.concatenate([gaps, gaps])
    res = linprog(-c, A_ub=a_ub, b_ub=b_ub, bounds=(-1.0, 1.0), method="highs")
    if res.status != 0:
        raise RuntimeError(f"BL distance LP failed: {res.message}")
    return max(0.0, float(-res.fun))


def w1_distance(mu, nu):
    """Wasserstein-1 (unbounded Lipschitz class) via the CDF-difference formula."""
    support, c = _merged_signed_mass(mu, nu)
    if support.size <= 1:
        return 0.0
    cum = np.cumsum(c)[:-1]
    return float(np.sum(np.abs(cum) * np.diff(support)))


def bl_distance_to_gaussian(mu, ref=None):
    """BL distance to the quantized standard normal; the quantization adds a
    deterministic ref.quantization_error() uncertainty on top."""
    ref = ref or GaussianRef()
    return bl_distance(mu, ref.measure())


def kolmogorov_distance(mu, other):
    """Sup-norm distance between CDFs, evaluated at all atoms.

    ``other`` may be an EmpiricalMeasure or a GaussianRef (compared against
    the exact normal CDF).
    """
    if isinstance(other, GaussianRef):
        f = mu.cdf()
        g = norm.cdf(mu.atoms)
        return float(max(np.max(np.abs(f - g)), np.max(np.abs(f - mu.weights - g))))
    support = np.union1d(mu.atoms, other.atoms)
    f = np.zeros(support.size)
    g = np.zeros(support.size)
    f[np.searchsorted(support, mu.atoms)] = mu.weights
    g[np.searchsorted(support, other.atoms)] = other.weights
    return float(np.max(np.abs(np.cumsum(f) - np.cumsum(g))))


# ---------------------------------------------------------------------------
# Characteristic functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CFGrid:
    """Characteristic-function values on a symmetric grid (0 included)."""

    xi: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @property
    def xi_max(self):
        return float(self.xi[-1])

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=np.float64)
        if xi.size < 3 or xi.size % 2 == 0:
            raise DomainError("CF grid needs an odd number of points >= 3")
        if not np.allclose(xi, -xi[::-1]):
            raise DomainError("CF grid must be symmetric about 0")
        if self.values[xi.size // 2] != 1.0:
            raise DomainError("CF grid must carry the exact value 1 at xi = 0")


def cf_grid_nodes(xi_max, points):
    """Symmetric grid with 0 as an exact node (odd point count required)."""
    if points < 3 or points % 2 == 0:
        raise DomainError("CF grid needs an odd number of points >= 3")
    if xi_max <= 0:
        raise DomainError("xi_max must be positive")
    half = np.linspace(0.0, xi_max, points // 2 + 1)
    return np.concatenate([-half[:0:-1], half])


def empirical_cf(mu, xi_max, points):
    """CF of an empirical measure on a symmetric grid of ``points`` nodes."""
    xi = cf_grid_nodes(xi_max, points)
    values = np.exp(1j * np.outer(xi, mu.atoms)) @ mu.weights
    values[points // 2] = 1.0    # exact: e^{i*0*X} == 1 and weights sum to 1
    return CFGrid(xi=xi, values=values)


def gaussian_cf(xi_max, points):
    """CF grid of the standard normal: exp(-xi^2/2)."""
    xi = cf_grid_nodes(xi_max, points)
    values = np.exp(-0.5 * xi * xi).astype(np.complex128)
    values[points // 2] = 1.0
    return CFGrid(xi=xi, values=values)


def tail_probability(mu, r):
    """Total weight of atoms with |x| >= r."""
    if r <= 0:
        raise DomainError("tail radius must be positive")
    return float(mu.weights[np.abs(mu.atoms) >= r].sum())


def fourier_bound(mu_hat, nu_hat, r, f, mu_tail, nu_tail):
    """Smoothing bound 1/F + (R F) sup_{|xi|<F} |mu_hat - nu_hat| + tails,
    instantiated for the Dudley class (sup-norm of the test function <= 1)."""
    if mu_hat.xi.shape != nu_hat.xi.shape or not np.array_equal(mu_hat.xi, nu_hat.xi):
        raise DomainError("CF grids must share identical xi nodes")
    if f <= 0 or r <= 0:
        raise DomainError("R and F must be positive")
    if mu_hat.xi_max < f:
        raise DomainError(f"CF grid xi_max {mu_hat.xi_max} < F {f}")
    mask = np.abs(mu_hat.xi) < f
    gap = float(np.max(np.abs(mu_hat.values[mask] - nu_hat.values[mask])))
    return 1.0 / f + (r * f) * gap + mu_tail + nu_tail

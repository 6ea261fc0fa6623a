import math

import numpy as np
import pytest
from scipy.ndimage import maximum_filter1d
from scipy.stats import norm

from zetalab.errors import DomainError
from zetalab.metrics import (CFGrid, EmpiricalMeasure, GaussianRef, bl_distance,
                             bl_distance_to_gaussian, empirical_cf, fourier_bound,
                             gaussian_cf, kolmogorov_distance, tail_probability,
                             w1_distance)


def brute_force_bl(mu, nu, step=1e-3):
    """Grid-DP maximisation of the chain LP: f-values restricted to a step grid.

    Independent of the LP path; agrees with the exact optimum to O(step).
    """
    support = np.union1d(mu.atoms, nu.atoms)
    c = np.zeros(support.size)
    c[np.searchsorted(support, mu.atoms)] += mu.weights
    c[np.searchsorted(support, nu.atoms)] -= nu.weights
    grid = np.arange(-1.0, 1.0 + step / 2, step)
    best = c[0] * grid
    for i in range(1, support.size):
        reach = int(math.floor((support[i] - support[i - 1]) / step + 1e-9))
        window = maximum_filter1d(best, size=2 * reach + 1, mode="constant",
                                  cval=-np.inf)
        best = window + c[i] * grid
    return float(best.max())


def random_measure(rng, max_atoms=50):
    n = rng.integers(1, max_atoms + 1)
    atoms = np.unique(rng.normal(scale=2.0, size=n))
    w = rng.random(atoms.size) + 0.1
    return EmpiricalMeasure(atoms=atoms, weights=w / w.sum())


def test_identical_measures_zero():
    m = EmpiricalMeasure.from_samples(np.array([0.0, 1.0, 1.0, 2.5]))
    assert bl_distance(m, m) == 0.0
    assert kolmogorov_distance(m, m) == 0.0


def test_two_atom_lp_by_hand():
    for t in (0.5, 1.0, 3.0):
        d = bl_distance(EmpiricalMeasure(np.array([0.0]), np.array([1.0])),
                        EmpiricalMeasure(np.array([t]), np.array([1.0])))
        assert d == pytest.approx(min(t, 2.0), abs=1e-9)


def test_lp_matches_grid_dp_small_measures():
    rng = np.random.default_rng(3)
    for _ in range(25):
        mu = random_measure(rng, max_atoms=6)
        nu = random_measure(rng, max_atoms=6)
        exact = bl_distance(mu, nu)
        brute = brute_force_bl(mu, nu)
        assert abs(exact - brute) <= 2e-3


def test_metric_axioms_on_random_triples():
    rng = np.random.default_rng(4)
    for _ in range(100):
        a, b, c = (random_measure(rng) for _ in range(3))
        dab, dba = bl_distance(a, b), bl_distance(b, a)
        assert abs(dab - dba) <= 1e-12
        assert bl_distance(a, a) == 0.0
        assert dab <= bl_distance(a, c) + bl_distance(c, b) + 1e-9
        assert 0.0 <= dab <= 2.0
        assert dab <= w1_distance(a, b) + 1e-12


def test_bl_between_two_normal_empiricals():
    rng = np.random.default_rng(5)
    a = EmpiricalMeasure.from_samples(rng.normal(size=100000))
    b = EmpiricalMeasure.from_samples(rng.normal(size=100000))
    assert bl_distance(a, b) <= 0.02


def test_gaussian_ref_and_distance():
    ref = GaussianRef(1000)
    g = ref.measure()
    assert bl_distance(g, ref.measure()) == 0.0
    assert ref.quantization_error() <= 0.01
    with pytest.raises(DomainError):
        GaussianRef(50)


def test_bl_to_gaussian_of_delta_zero():
    d0 = EmpiricalMeasure(np.array([0.0]), np.array([1.0]))
    d = bl_distance_to_gaussian(d0, GaussianRef(10000))
    assert 0.7 <= d <= 0.9
    # analytic optimum: f(x) = max(1-|x|, -1) is pointwise minimal under the
    # Lipschitz/box constraints given f(0) = 1, so
    # d = 1 - [P(|Z|<=2) - (E|Z| - 2 phi(2)) - P(|Z|>2)], E|Z| = sqrt(2/pi)
    in_two = norm.cdf(2.0) - norm.cdf(-2.0)
    expect = 1.0 - (in_two - (math.sqrt(2 / math.pi) - 2 * norm.pdf(2.0))
                    - (1.0 - in_two))
    assert d == pytest.approx(expect, abs=2e-3)


def test_normal_empirical_close_to_quantized_gaussian():
    rng = np.random.default_rng(6)
    m = EmpiricalMeasure.from_samples(rng.normal(size=100000))
    assert bl_distance_to_gaussian(m, GaussianRef(10000)) <= 0.02


def test_kolmogorov_basics():
    d0 = EmpiricalMeasure(np.array([0.0]), np.array([1.0]))
    d1 = EmpiricalMeasure(np.array([1.0]), np.array([1.0]))
    assert kolmogorov_distance(d0, d1) == 1.0


def test_kolmogorov_normal_sample_vs_gaussian():
    rng = np.random.default_rng(7)
    m = EmpiricalMeasure.from_samples(rng.normal(size=100000))
    assert kolmogorov_distance(m, GaussianRef()) <= 0.006


def test_empirical_cf_basics():
    d0 = EmpiricalMeasure(np.array([0.0]), np.array([1.0]))
    grid = empirical_cf(d0, 5.0, 11)
    assert np.allclose(grid.values, 1.0)
    m = EmpiricalMeasure.from_samples(np.array([-1.0, 2.0, 0.5]))
    g = empirical_cf(m, 3.0, 21)
    assert g.values[10] == 1.0
    with pytest.raises(DomainError):
        empirical_cf(m, 3.0, 10)


def test_empirical_cf_of_normal_sample():
    rng = np.random.default_rng(8)
    m = EmpiricalMeasure.from_samples(rng.normal(size=10000))
    g = empirical_cf(m, 2.0, 5)
    at_one = g.values[3]            # xi = 1
    assert abs(at_one - math.exp(-0.5)) <= 0.02


def test_tail_probability():
    m = EmpiricalMeasure.from_samples(np.array([-3.0, -0.5, 0.5, 3.0]))
    assert tail_probability(m, 10.0) == 0.0
    assert tail_probability(m, 2.0) == pytest.approx(0.5)
    d0 = EmpiricalMeasure(np.array([0.0]), np.array([1.0]))
    assert tail_probability(d0, 0.5) == 0.0


def test_tail_probability_normal_two_sigma():
    rng = np.random.default_rng(9)
    m = EmpiricalMeasure.from_samples(rng.normal(size=100000))
    assert abs(tail_probability(m, 2.0) - 2 * norm.sf(2.0)) <= 0.005


def test_fourier_bound_identical_cfs():
    g = gaussian_cf(10.0, 41)
    assert fourier_bound(g, g, r=3.0, f=10.0, mu_tail=0.0, nu_tail=0.0) == pytest.approx(0.1)


def test_fourier_bound_matches_assembled_terms():
    # the bound with R = sqrt(llT), F = C sqrt(llT) and a CF gap of 1/llT^2
    # reassembles as 1/F + C/llT + tails
    llT = math.log(math.log(1e12))
    r = math.sqrt(llT)
    c = 1.7
    f = c * math.sqrt(llT)
    gap = 1.0 / llT**2
    xi = np.linspace(-f - 1, f + 1, 201)
    vals = np.exp(-0.5 * xi * xi).astype(np.complex128)
    vals[100] = 1.0
    base = CFGrid(xi=xi, values=vals)
    shifted = CFGrid(xi=xi, values=np.where(xi == 0, 1.0, vals + gap))
    tail_mu, tail_nu = 1e-3, 2e-3
    got = fourier_bound(base, shifted, r=r, f=f, mu_tail=tail_mu, nu_tail=tail_nu)
    want = 1.0 / f + (r * f) * gap + tail_mu + tail_nu
    assert got == pytest.approx(want, rel=1e-12)
    assert got == pytest.approx(1.0 / f + c * llT * (1.0 / llT**2) + tail_mu + tail_nu,
                                rel=1e-9)


def test_fourier_bound_dominates_bl_distance():
    rng = np.random.default_rng(10)
    violations = 0
    for _ in range(100):
        mu = random_measure(rng, max_atoms=30)
        nu = random_measure(rng, max_atoms=30)
        f = float(rng.uniform(1.0, 8.0))
        r = float(max(np.max(np.abs(mu.atoms)), np.max(np.abs(nu.atoms))) * rng.uniform(0.5, 1.5))
        r = max(r, 0.1)
        mu_hat = empirical_cf(mu, f + 1.0, 257)
        nu_hat = empirical_cf(nu, f + 1.0, 257)
        bound = fourier_bound(mu_hat, nu_hat, r=r, f=f,
                              mu_tail=tail_probability(mu, r),
                              nu_tail=tail_probability(nu, r))
        if bound < bl_distance(mu, nu):
            violations += 1
    assert violations == 0


def test_measure_validation():
    with pytest.raises(DomainError):
        EmpiricalMeasure(np.array([]), np.array([]))
    with pytest.raises(DomainError):
        EmpiricalMeasure(np.array([0.0, 0.0]), np.array([0.5, 0.5]))
    with pytest.raises(DomainError):
        EmpiricalMeasure(np.array([0.0, 1.0]), np.array([0.5, 0.6]))


def test_measure_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(11)
    m = random_measure(rng)
    path = tmp_path / "measure.csv"
    m.save_csv(path)
    back = EmpiricalMeasure.load_csv(path)
    assert np.array_equal(back.atoms, m.atoms)
    assert np.array_equal(back.weights, m.weights)
    assert path.read_text().splitlines()[0] == "atom,weight"
    with pytest.raises(DomainError):
        (tmp_path / "bad.csv").write_text("x,y\n0,1\n")
        EmpiricalMeasure.load_csv(tmp_path / "bad.csv")

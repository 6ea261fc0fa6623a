"""Shared fixtures: sieves, zero lists, and the T=1e6 chain run reused by the
acceptance suite (criteria 4 and 8 share the same run parameters)."""

import numpy as np
import pytest

from zetalab.config import RunConfig
from zetalab.experiment import run_chain_experiment
from zetalab.primes import sieve_primes
from zetalab.zeta import find_zeros

ACCEPT_SEED = 20260810


@pytest.fixture(scope="session")
def table_1e6():
    return sieve_primes(10**6)


@pytest.fixture(scope="session")
def table_1e3():
    return sieve_primes(1000)


@pytest.fixture(scope="session")
def zeros_10_100():
    return find_zeros(10.0, 100.0)


@pytest.fixture(scope="session")
def zeros_50_550():
    return find_zeros(50.0, 550.0)


@pytest.fixture(scope="session")
def accept_chain_config():
    return RunConfig(T=1e6, samples=2000, seed=ACCEPT_SEED, threads=2,
                     normalization="variance",
                     theta_x=0.25, theta_1=0.10, theta_2=0.18)


@pytest.fixture(scope="session")
def accept_chain_report(accept_chain_config, table_1e6):
    return run_chain_experiment(accept_chain_config, table=table_1e6,
                                keep_samples=True)

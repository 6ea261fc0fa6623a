"""zetalab: desk-scale measurements of the Gaussian approximation chain for
log|zeta(1/2 + i tau)| in the bounded-Lipschitz (Dudley) metric."""

from zetalab.backend import backend_name
from zetalab.chain import (ChainSample, ClampPolicy, ParameterLadder,
                           evaluate_chain, evaluate_chain_batch, ladder_from_T,
                           mollifier_sum, prime_sum)
from zetalab.config import RunConfig, load_config, save_config
from zetalab.errors import ConfigError, DomainError, ResourceError, ZetalabError
from zetalab.experiment import (ChainReport, IdentitySweepResult,
                                MomentCheckResult, run_chain_experiment,
                                run_identity_sweep, run_moment_check,
                                run_rate_ladder, write_chain_csv)
from zetalab.metrics import (CFGrid, EmpiricalMeasure, GaussianRef, bl_distance,
                             bl_distance_to_gaussian, empirical_cf, fourier_bound,
                             gaussian_cf, kolmogorov_distance, tail_probability,
                             w1_distance)
from zetalab.moments import (MomentReport, closed_form_moment, empirical_moment,
                             random_phase_moment)
from zetalab.primes import (PrimeTable, prime_variance, reciprocal_prime_sum,
                            sieve_primes, tapered_von_mangoldt, von_mangoldt)
from zetalab.sampling import counter_uniforms, sample_tau
from zetalab.zeta import (EMConfig, SPoint, ZeroList, find_zeros, hardy_z_batch,
                          log_abs_zeta, mollifier_identity_residual, zeta,
                          zeta_batch, zeta_log_deriv)

__version__ = "0.1.0"

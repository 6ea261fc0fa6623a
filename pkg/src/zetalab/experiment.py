"""Orchestration: the five-stage chain experiment, moment checks, rate
ladders, and identity sweeps, with CSV/JSON emission.

Parallelism is block-wise over samples with a fixed block size and ordered
gather, so output bytes do not depend on the thread count.  All reductions
run in a fixed order.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from zetalab.chain import evaluate_chain_batch, ladder_from_T, prime_sum_batch
from zetalab.errors import ConfigError, ZetalabError
from zetalab.metrics import (EmpiricalMeasure, GaussianRef, bl_distance,
                             bl_distance_to_gaussian)
from zetalab.moments import (MomentReport, closed_form_moment,
                             moment_correction_bound, random_phase_moment)
from zetalab.primes import compensated_sum, sieve_primes
from zetalab.sampling import sample_tau
from zetalab.zeta import (EMConfig, SPoint, find_zeros, log_abs_zeta_batch,
                          mollifier_identity_residual)

CHAIN_CSV_COLUMNS = ("T", "samples", "excluded", "norm_mode", "d_v_w", "d_w_x",
                     "d_x_p", "d_p_p12", "d_p12_z", "d_sum", "d_v_z_direct",
                     "X", "X1", "X2", "sigma0", "s_norm", "seed", "status")
_BLOCK = 256
TRIANGLE_TOL = 1e-9
DEGRADED_RATE = 0.01


def _em_config(config):
    return EMConfig(terms=config.em_terms, bernoulli_order=config.bernoulli_order,
                    error_budget=config.error_budget)


def _blocks(n):
    return [(lo, min(lo + _BLOCK, n)) for lo in range(0, n, _BLOCK)]


def _pooled(fn, n, threads):
    """Evaluate fn(lo, hi) over fixed blocks; gather in block order."""
    blocks = _blocks(n)
    if threads <= 1 or len(blocks) <= 1:
        return [fn(lo, hi) for lo, hi in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda b: fn(b[0], b[1]), blocks))


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


@dataclass(frozen=True)
class ChainReport:
    """Per-stage pairwise BL distances, their sum, and the direct distance."""

    T: float
    samples: int
    excluded: int
    norm_mode: str
    d_v_w: float
    d_w_x: float
    d_x_p: float
    d_p_p12: float
    d_p12_z: float
    d_sum: float
    d_v_z_direct: float
    X: float
    X1: float
    X2: float
    sigma0: float
    s_norm: float
    seed: int
    status: str
    norm_value: float = float("nan")
    clamps: tuple = ()
    triangle_ok: bool = True
    chain_samples: tuple = field(default=(), repr=False)

    def csv_row(self):
        return ",".join(_fmt(getattr(self, c)) for c in CHAIN_CSV_COLUMNS)

    def to_json_dict(self):
        out = {c: getattr(self, c) for c in CHAIN_CSV_COLUMNS}
        out["norm_value"] = self.norm_value
        out["clamps"] = list(self.clamps)
        out["triangle_ok"] = self.triangle_ok
        return out


def chain_table_limit(ladder):
    """Sieve limit needed by the chain: prime powers below X^2."""
    return max(100, int(math.ceil(ladder.X * ladder.X)))


def run_chain_experiment(config, table=None, keep_samples=False):
    """Sample tau on [T, 2T], evaluate all chain stages, and measure the five
    pairwise BL distances plus the direct distance to the Gaussian."""
    ladder = ladder_from_T(config.T, config.clamp_policy(), sigma0=config.sigma0)
    if table is None:
        table = sieve_primes(chain_table_limit(ladder))
    if table.in_range(0, ladder.X1).size == 0:
        raise ConfigError(f"no primes at or below X1={ladder.X1:g}: empty P1 stage")

    taus = sample_tau(config.T, config.samples, config.seed)
    cfg = _em_config(config)
    parts = _pooled(lambda lo, hi: evaluate_chain_batch(taus[lo:hi], ladder, table, cfg),
                    config.samples, config.threads)
    samples = [s for part in parts for s in part]

    kept = [s for s in samples if not s.flags]
    excluded = len(samples) - len(kept)
    status = "ok" if excluded <= DEGRADED_RATE * len(samples) else "degraded"
    if not kept:
        raise ConfigError("all samples were excluded (near-zero zeta everywhere?)")

    sn = ladder.s_norm
    stage = {name: np.array([getattr(s, name) for s in kept])
             for name in ("v", "w", "x", "p", "p12")}
    if config.normalization == "variance":
        raw_p12 = stage["p12"] * sn
        norm_value = float(np.std(raw_p12))
        if not norm_value > 0:
            raise ConfigError("empirical variance of the P1+P2 stage vanishes")
        rescale = sn / norm_value
    else:
        norm_value = sn
        rescale = 1.0
    meas = {k: EmpiricalMeasure.from_samples(v * rescale) for k, v in stage.items()}

    ref = GaussianRef(config.gaussian_n)
    d_v_w = bl_distance(meas["v"], meas["w"])
    d_w_x = bl_distance(meas["w"], meas["x"])
    d_x_p = bl_distance(meas["x"], meas["p"])
    d_p_p12 = bl_distance(meas["p"], meas["p12"])
    d_p12_z = bl_distance_to_gaussian(meas["p12"], ref)
    d_sum = d_v_w + d_w_x + d_x_p + d_p_p12 + d_p12_z
    d_v_z = bl_distance_to_gaussian(meas["v"], ref)

    return ChainReport(
        T=ladder.T, samples=len(samples), excluded=excluded,
        norm_mode=config.normalization,
        d_v_w=d_v_w, d_w_x=d_w_x, d_x_p=d_x_p, d_p_p12=d_p_p12, d_p12_z=d_p12_z,
        d_sum=d_sum, d_v_z_direct=d_v_z,
        X=ladder.X, X1=ladder.X1, X2=ladder.X2, sigma0=ladder.sigma0,
        s_norm=sn, seed=config.seed, status=status,
        norm_value=norm_value, clamps=ladder.clamps,
        triangle_ok=bool(d_v_z <= d_sum + TRIANGLE_TOL),
        chain_samples=tuple(samples) if keep_samples else ())


def write_chain_csv(reports, path):
    with open(path, "w") as fh:
        fh.write(",".join(CHAIN_CSV_COLUMNS) + "\n")
        for r in reports:
            fh.write(r.csv_row() + "\n")


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OddMomentCheck:
    order: int
    empirical: float
    stderr: float
    zscore: float

    def to_json_dict(self):
        return {"order": self.order, "empirical": self.empirical,
                "stderr": self.stderr, "zscore": self.zscore}


@dataclass(frozen=True)
class MomentCheckResult:
    reports: tuple
    odd_checks: tuple
    nodes: int

    def to_json_dict(self):
        return {"moments": [r.to_json_dict() for r in self.reports],
                "odd_checks": [c.to_json_dict() for c in self.odd_checks],
                "n": self.nodes}


def _trapezoid_mean(values):
    n = values.size
    return (compensated_sum(values) - 0.5 * (values[0] + values[-1])) / (n - 1)


def run_moment_check(config, table=None):
    """Three-way moment comparison on a deterministic trapezoid t-grid."""
    if config.moment_nodes < 2:
        raise ConfigError("moment quadrature needs at least 2 nodes")
    X = config.moment_x
    T = config.T
    sigma0 = config.sigma0 if config.sigma0 is not None else 0.5 + 1.0 / math.log(T)
    if table is None:
        table = sieve_primes(max(100, int(math.ceil(X))))
    grid = np.linspace(T, 2.0 * T, config.moment_nodes)
    parts = _pooled(lambda lo, hi: prime_sum_batch(sigma0, grid[lo:hi], 0.0, X, table),
                    config.moment_nodes, config.threads)
    values = np.concatenate(parts)

    reports = []
    for k in range(1, config.moment_k_max + 1):
        order = 2 * k
        emp = _trapezoid_mean(values**order)
        reports.append(MomentReport.build(
            k=k,
            closed_form=closed_form_moment(order, X, sigma0, table),
            random_phase=random_phase_moment(order, X, sigma0, table),
            empirical=emp, n=config.moment_nodes,
            correction_bound=moment_correction_bound(order, X, sigma0, table),
            xpow_over_t=X ** (4 * k) / T))
    odd = []
    for k in range(1, config.moment_k_max + 1):
        order = 2 * k - 1
        emp = _trapezoid_mean(values**order)
        second = _trapezoid_mean(values ** (2 * order))
        se = math.sqrt(max(second - emp * emp, 0.0) / config.moment_nodes)
        odd.append(OddMomentCheck(order=order, empirical=emp, stderr=se,
                                  zscore=abs(emp) / se if se else math.inf))
    return MomentCheckResult(reports=tuple(reports), odd_checks=tuple(odd),
                             nodes=config.moment_nodes)


# ---------------------------------------------------------------------------
# Rate ladder
# ---------------------------------------------------------------------------

def spearman_sign(xs, ys):
    """Sign of the Spearman rank correlation (0 when undefined)."""
    if len(xs) < 2:
        return 0
    rho = stats.spearmanr(xs, ys).statistic
    if math.isnan(rho) or rho == 0:
        return 0
    return 1 if rho > 0 else -1


def run_rate_ladder(config, t_values=None):
    """One chain report per T; per-T failures become status rows, the run
    continues.  Returns (reports, diagnostics)."""
    ts = tuple(t_values) if t_values is not None else tuple(config.t_values)
    reports = []
    for T in ts:
        sub = replace(config, T=float(T))
        try:
            reports.append(run_chain_experiment(sub))
        except ZetalabError as exc:
            reports.append(ChainReport(
                T=float(T), samples=config.samples, excluded=0,
                norm_mode=config.normalization,
                d_v_w=math.nan, d_w_x=math.nan, d_x_p=math.nan,
                d_p_p12=math.nan, d_p12_z=math.nan, d_sum=math.nan,
                d_v_z_direct=math.nan, X=math.nan, X1=math.nan, X2=math.nan,
                sigma0=math.nan, s_norm=math.nan, seed=config.seed,
                status="error: " + str(exc).replace(",", ";")))
    ok = [r for r in reports if r.status in ("ok", "degraded")]
    diagnostics = {
        "rows": len(reports),
        "ok_rows": len(ok),
        "gaussian_stage_vs_cutoff_spearman_sign":
            spearman_sign([r.X2 for r in ok], [r.d_p12_z for r in ok]),
    }
    return reports, diagnostics


# ---------------------------------------------------------------------------
# Identity sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentitySweepResult:
    ts: np.ndarray
    residuals: np.ndarray
    max_residual: float
    off_axis_mean: float
    off_axis_reference: float
    off_axis_excluded: int
    samples: int

    def to_json_dict(self):
        return {"max_residual": self.max_residual,
                "off_axis_mean": self.off_axis_mean,
                "off_axis_reference": self.off_axis_reference,
                "off_axis_excluded": self.off_axis_excluded,
                "samples": self.samples,
                "points": int(self.ts.size)}


def run_identity_sweep(config, table=None, zeros=None):
    """Residuals of the mollified log-derivative identity over a t-sweep,
    plus the off-axis mean |log|zeta(1/2+i tau)| - log|zeta(sigma0+i tau)||
    against its (sigma0 - 1/2) log T reference."""
    X = config.identity_x
    w = config.identity_zero_window
    cfg = _em_config(config)
    if zeros is None:
        zmin = max(1.0, config.identity_t_lo - w)
        zmax = config.identity_t_hi + w
        zeros = find_zeros(zmin, zmax, cfg, resolution=config.zero_resolution)
    if table is None:
        table = sieve_primes(max(100, int(math.ceil(X * X))))
    ts = np.linspace(config.identity_t_lo, config.identity_t_hi, config.identity_points)
    residuals = np.array([
        mollifier_identity_residual(SPoint(config.identity_sigma, float(t)),
                                    X, zeros, table, cfg)
        for t in ts])

    ladder = ladder_from_T(config.T, config.clamp_policy(), sigma0=config.sigma0)
    taus = sample_tau(config.T, config.samples, config.seed)
    vparts = _pooled(lambda lo, hi: log_abs_zeta_batch(0.5, taus[lo:hi], cfg),
                     config.samples, config.threads)
    wparts = _pooled(lambda lo, hi: log_abs_zeta_batch(ladder.sigma0, taus[lo:hi], cfg),
                     config.samples, config.threads)
    v = np.concatenate([p[0] for p in vparts])
    vf = np.concatenate([p[1] for p in vparts])
    wv = np.concatenate([p[0] for p in wparts])
    wf = np.concatenate([p[1] for p in wparts])
    keep = ~(vf | wf)
    diff = np.abs(v[keep] - wv[keep])
    return IdentitySweepResult(
        ts=ts, residuals=residuals, max_residual=float(residuals.max()),
        off_axis_mean=float(diff.mean()),
        off_axis_reference=(ladder.sigma0 - 0.5) * math.log(config.T),
        off_axis_excluded=int(config.samples - keep.sum()),
        samples=config.samples)


def write_identity_csv(result, path):
    with open(path, "w") as fh:
        fh.write("t,residual\n")
        for t, r in zip(result.ts, result.residuals):
            fh.write(f"{t:.9g},{r:.9g}\n")


# ---------------------------------------------------------------------------
# Plot script emission
# ---------------------------------------------------------------------------

def write_gnuplot_script(csv_path, kind):
    """Emit a gnuplot script next to the CSV, referencing it by relative path."""
    gp_path = os.path.splitext(csv_path)[0] + ".gp"
    rel = os.path.basename(csv_path)
    lines = ["set datafile separator ','", "set key outside"]
    if kind == "identity":
        lines += [f"plot '{rel}' using 1:2 with lines title 'identity residual'"]
    else:
        lines += [
            "set logscale x",
            "plot " + ", ".join(
                f"'{rel}' using 1:{col} with linespoints title '{name}'"
                for col, name in ((5, "d(V,W)"), (6, "d(W,X)"), (7, "d(X,P)"),
                                  (8, "d(P,P12)"), (9, "d(P12,Z)"),
                                  (11, "d(V,Z) direct"))),
        ]
    with open(gp_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return gp_path

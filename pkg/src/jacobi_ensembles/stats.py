"""Monte Carlo experiments for the limit theorems of random Jacobi matrices.

Every trial draws its own stream ``RngStream(seed).spawn(trial_index)`` and
results are reduced in trial order, so a report depends only on the
configuration and seed, never on the worker count.
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .distributions import RngStream, dirichlet_sym_moments, sample_dirichlet_sym
from .ensembles import (
    HermiteConfig,
    LaguerreConfig,
    ManovaConfig,
    fluctuation_variances,
    sample_ensemble,
)
from .errors import ExperimentError, ParameterError, UnsupportedEnsembleError, NumericalError
from .limit_laws import as_polynomial, variance_functional
from .spectral import EmpiricalMeasure, empirical_measure, spectral_measure

log = logging.getLogger(__name__)

MAX_FAILURE_FRACTION = 1e-3
MIN_TRIALS_FOR_NORMALITY = 100
WORKERS_ENV = "JACOBI_ENSEMBLES_WORKERS"


def default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_trials(trial_fn, seed, trials, workers=None, stream_offset=0):
    """Run ``trial_fn(stream)`` for each trial and return ``(results, failures)``.

    ``results`` keeps trial order and holds ``None`` for trials whose
    eigensolve failed.  More than 0.1% failures raises ExperimentError.
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    root = RngStream(seed, stream_offset)
    workers = default_workers() if workers is None else max(1, int(workers))

    def one(index):
        try:
            return trial_fn(root.spawn(index))
        except NumericalError as exc:
            log.warning("trial %d failed: %s", index, exc)
            return None

    if workers == 1:
        results = [one(i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(trials)))
    failures = sum(r is None for r in results)
    if failures > MAX_FAILURE_FRACTION * trials:
        raise ExperimentError(f"{failures} of {trials} trials failed")
    return results, failures


def sample_moments(x):
    """Return ``(mean, unbiased variance, skewness, excess kurtosis)`` of ``x``."""
    x = np.asarray(x, dtype=float)
    mean = float(np.mean(x))
    c = x - mean
    m2 = float(np.mean(c * c))
    var = float(np.var(x, ddof=1)) if x.size > 1 else 0.0
    if m2 == 0.0:
        return mean, var, 0.0, 0.0
    skew = float(np.mean(c**3)) / m2**1.5
    kurt = float(np.mean(c**4)) / m2**2 - 3.0
    return mean, var, skew, kurt


def variance_standard_error(x):
    """Standard error of the sample variance, ``sqrt((m4 - s^4) / N)``."""
    x = np.asarray(x, dtype=float)
    c = x - x.mean()
    m2 = float(np.mean(c * c))
    m4 = float(np.mean(c**4))
    return math.sqrt(max(m4 - m2 * m2, 0.0) / x.size)


def ks_normal(x):
    """One-sample Kolmogorov statistic of ``x`` against the normal fitted by mean and sd."""
    x = np.sort(np.asarray(x, dtype=float))
    sd = float(np.std(x, ddof=1))
    if sd == 0.0:
        return 1.0
    cdf = ndtr((x - x.mean()) / sd)
    n = x.size
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    return float(min(1.0, max(upper.max(), lower.max())))


def kolmogorov_distance(mu, nu):
    """``sup_x |F_mu(x) - F_nu(x)|`` for two finite atomic measures.

    Both distribution functions are right-continuous step functions that
    only jump at atoms, so evaluating them on the merged atom grid is exact.
    """
    grid = np.union1d(mu.atoms, nu.atoms)
    diff = np.abs(mu.cdf(grid) - nu.cdf(grid))
    return float(min(1.0, diff.max()))


# ----------------------------------------------------------------------------
# law of large numbers


@dataclass
class LlnPoint:
    n: int
    moment_errors: np.ndarray  # (trials, k_max + 1), |<mu_n, x^k> - <mu_inf, x^k>|
    kolmogorov: np.ndarray  # d_K(L_n, mu_n) per trial
    failures: int = 0

    @property
    def kolmogorov_median(self):
        return float(np.median(self.kolmogorov))

    @property
    def moment_error_median(self):
        return np.median(self.moment_errors, axis=0)


@dataclass
class LlnReport:
    per_n: list

    def medians(self):
        return [p.kolmogorov_median for p in self.per_n]


def lln_experiment(configs, k_max, trials, seed, workers=None):
    """Moment errors and ``d_K(L_n, mu_n)`` across a schedule of increasing n."""
    configs = list(configs)
    if not configs:
        raise ParameterError("the ensemble schedule must be nonempty")
    ns = [c.n for c in configs]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ParameterError(f"n must be strictly increasing, got {ns}")
    points = []
    for index, cfg in enumerate(configs):
        law = cfg.limit_law()
        targets = np.array([law.moment(k) for k in range(k_max + 1)])

        def trial(stream, cfg=cfg, targets=targets):
            mu = spectral_measure(sample_ensemble(cfg, stream))
            moments = np.array([mu.moment(k) for k in range(k_max + 1)])
            return np.abs(moments - targets), kolmogorov_distance(EmpiricalMeasure(mu.atoms), mu)

        results, failures = run_trials(trial, seed, trials, workers, stream_offset=index)
        ok = [r for r in results if r is not None]
        points.append(
            LlnPoint(
                n=cfg.n,
                moment_errors=np.array([r[0] for r in ok]),
                kolmogorov=np.array([r[1] for r in ok]),
                failures=failures,
            )
        )
    return LlnReport(points)


# ----------------------------------------------------------------------------
# central limit theorem


@dataclass(frozen=True)
class ExperimentConfig:
    ensemble: object
    test_function: object
    trials: int
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        object.__setattr__(self, "test_function", as_polynomial(self.test_function))


@dataclass
class CltReport:
    scaled_samples: np.ndarray
    sample_variance: float
    target_sigma2: float
    skewness: float = None
    excess_kurtosis: float = None
    ks_vs_normal: float = None
    failures: int = 0

    @property
    def trials(self):
        return self.scaled_samples.size

    @property
    def variance_se(self):
        return variance_standard_error(self.scaled_samples)

    def to_dict(self):
        return {
            "scaled_samples": [float(v) for v in self.scaled_samples],
            "sample_variance": self.sample_variance,
            "target_sigma2": self.target_sigma2,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "ks_vs_normal": self.ks_vs_normal,
            "failures": self.failures,
        }


def linear_statistics(cfg, f, trials, seed, workers=None):
    """``<mu_n, f - f(0)>`` per trial; dropping the constant keeps constant f exactly zero."""
    f = as_polynomial(f)
    rest = f - f.coef[0]

    def trial(stream):
        return spectral_measure(sample_ensemble(cfg, stream)).integrate(rest)

    results, failures = run_trials(trial, seed, trials, workers)
    return np.array([r for r in results if r is not None]), failures


def clt_experiment(cfg, workers=None):
    """Scaled fluctuations ``sqrt(n beta / 2)(<mu_n, f> - mean)`` against ``Var_{mu_inf}[f]``."""
    ens = cfg.ensemble
    values, failures = linear_statistics(ens, cfg.test_function, cfg.trials, cfg.seed, workers)
    scaled = math.sqrt(ens.n * ens.beta / 2.0) * (values - values.mean())
    _, var, skew, kurt = sample_moments(scaled)
    target = variance_functional(ens.limit_law(), cfg.test_function)
    report = CltReport(scaled_samples=scaled, sample_variance=var, target_sigma2=target, failures=failures)
    if scaled.size >= MIN_TRIALS_FOR_NORMALITY:
        report.skewness = skew
        report.excess_kurtosis = kurt
        report.ks_vs_normal = ks_normal(scaled) if var > 0 else 0.0
    return report


# ----------------------------------------------------------------------------
# identities for the Dirichlet weights


@dataclass
class MeanIdentityReport:
    mu_values: np.ndarray
    empirical_values: np.ndarray
    conditional_residuals: np.ndarray
    failures: int = 0

    @property
    def paired_difference(self):
        return float(np.mean(self.mu_values - self.empirical_values))

    @property
    def paired_se(self):
        d = self.mu_values - self.empirical_values
        return float(np.std(d, ddof=1) / math.sqrt(d.size)) if d.size > 1 else float("inf")

    @property
    def max_conditional_residual(self):
        return float(np.max(self.conditional_residuals))


def mean_identity_check(cfg, f, trials, seed, workers=None):
    """Compare ``<mu_n, f>`` with ``<L_n, f>`` on the same draws.

    Per draw, the weight-averaged statistic ``sum_i E[w_i] f(lambda_i)`` is
    checked against ``<L_n, f>`` (relative residual recorded); across draws
    the paired difference is a Monte Carlo check of equal expectations.
    """
    if trials < MIN_TRIALS_FOR_NORMALITY:
        raise ParameterError(f"mean identity check needs >= {MIN_TRIALS_FOR_NORMALITY} trials")
    f = as_polynomial(f)
    mean_w = dirichlet_sym_moments(cfg.n, cfg.beta / 2.0)[0]

    def trial(stream):
        mu = spectral_measure(sample_ensemble(cfg, stream))
        fl = f(mu.atoms)
        emp = EmpiricalMeasure(mu.atoms).integrate(f)
        conditional = float(np.dot(np.full(mu.size, mean_w), fl))
        resid = abs(conditional - emp) / max(1.0, abs(emp))
        return mu.integrate(f), emp, resid

    results, failures = run_trials(trial, seed, trials, workers)
    ok = np.array([r for r in results if r is not None])
    return MeanIdentityReport(ok[:, 0], ok[:, 1], ok[:, 2], failures)


@dataclass
class VarianceIdentityReport:
    n: int
    beta: float
    closed_form: float
    relation_value: float
    mc_variance: float
    mc_se: float

    @property
    def z_score(self):
        if self.mc_se == 0.0:
            return 0.0 if self.mc_variance == self.closed_form else math.inf
        return (self.mc_variance - self.closed_form) / self.mc_se


def weight_variance(atoms, beta, f):
    """``Var_w[<mu, f>]`` for fixed atoms and Dirichlet(beta/2) weights, from the weight moments."""
    n = len(atoms)
    _, second, cross = dirichlet_sym_moments(n, beta / 2.0)
    f = as_polynomial(f)
    # the variance ignores the constant term; dropping it keeps constant f exactly 0
    fl = np.asarray((f - f.coef[0])(np.asarray(atoms, dtype=float)), dtype=float)
    cov = np.full((n, n), cross - 1.0 / n**2)
    np.fill_diagonal(cov, second - 1.0 / n**2)
    return float(fl @ cov @ fl)


def variance_identity_check(fixed_spectrum, beta, f, trials, seed):
    """Fixed-spectrum variance of ``<mu_n, f>``: closed form, variance relation and Monte Carlo.

    With the eigenvalues held fixed ``Var[<L_n, f>] = 0`` and the relation
    reduces to ``2/(n beta + 2) (<L_n, f^2> - <L_n, f>^2)``.
    """
    atoms = np.asarray(fixed_spectrum.atoms if hasattr(fixed_spectrum, "atoms") else fixed_spectrum, dtype=float)
    n = atoms.size
    f = as_polynomial(f)
    rest = (f - f.coef[0])(atoms)
    closed = weight_variance(atoms, beta, f)
    relation = 2.0 / (n * beta + 2.0) * (float(np.mean(rest * rest)) - float(np.mean(rest)) ** 2)
    w = sample_dirichlet_sym(RngStream(seed), n, beta / 2.0, size=trials)
    stats = w @ rest
    mc = float(np.var(stats, ddof=1)) if trials > 1 else 0.0
    se = variance_standard_error(stats)
    return VarianceIdentityReport(n, beta, closed, max(0.0, relation), mc, se)


# ----------------------------------------------------------------------------
# Poincare-type variance bounds


@dataclass
class PoincareReport:
    lhs: float
    lhs_se: float
    rhs: float
    rhs_se: float

    @property
    def ratio(self):
        if self.rhs == 0.0:
            return 0.0 if self.lhs == 0.0 else math.inf
        return self.lhs / self.rhs

    @property
    def ratio_se(self):
        if self.rhs == 0.0 or self.lhs == 0.0:
            return 0.0
        return self.ratio * math.hypot(self.lhs_se / self.lhs, self.rhs_se / self.rhs)

    @property
    def holds(self):
        return self.ratio <= 1.0 + 5.0 * self.ratio_se


def poincare_bound_check(cfg, f, trials, seed, workers=None):
    """Monte Carlo sides of ``Var[<L_n, f>] <= C E[<L_n, (f')^2>]``.

    ``C = 2/(n^2 beta)`` for Hermite and ``1/(n(a + b))`` for MANOVA with
    ``a, b > 0``.  Laguerre uses the largest-eigenvalue form
    ``(1/a_L) E[lambda_max^2 / n <L_n, (f')^2>]`` with
    ``a_L = beta (m - n + 1) / 2 - 1 > 0``.
    """
    f = as_polynomial(f)
    rest = f - f.coef[0]
    fp2 = f.deriv() ** 2
    if not isinstance(cfg, (HermiteConfig, ManovaConfig, LaguerreConfig)):
        raise UnsupportedEnsembleError(f"no variance bound for {cfg!r}")
    n = cfg.n
    if isinstance(cfg, HermiteConfig):
        const = 2.0 / (n * n * cfg.beta)
        lam_weight = False
    elif isinstance(cfg, ManovaConfig):
        if not (cfg.a > 0 and cfg.b > 0):
            raise UnsupportedEnsembleError("the MANOVA bound needs a > 0 and b > 0")
        const = 1.0 / (n * (cfg.a + cfg.b))
        lam_weight = False
    elif isinstance(cfg, LaguerreConfig):
        a_l = cfg.beta * (cfg.m - n + 1.0) / 2.0 - 1.0
        if a_l <= 0:
            raise UnsupportedEnsembleError("the Laguerre bound needs beta (m - n + 1) / 2 > 1")
        const = 1.0 / a_l
        lam_weight = True

    def trial(stream):
        L = empirical_measure(sample_ensemble(cfg, stream))
        right = L.integrate(fp2)
        if lam_weight:
            right *= L.atoms[-1] ** 2 / n
        return L.integrate(rest), right

    results, _ = run_trials(trial, seed, trials, workers)
    ok = np.array([r for r in results if r is not None])
    left_vals, right_vals = ok[:, 0], ok[:, 1]
    lhs = float(np.var(left_vals, ddof=1))
    rhs = const * float(np.mean(right_vals))
    rhs_se = const * float(np.std(right_vals, ddof=1)) / math.sqrt(right_vals.size)
    return PoincareReport(lhs, variance_standard_error(left_vals), rhs, rhs_se)


# ----------------------------------------------------------------------------
# entry fluctuations


@dataclass
class EntryStats:
    samples: np.ndarray
    target_variance: float
    mean: float = field(init=False)
    variance: float = field(init=False)
    skewness: float = field(init=False)
    excess_kurtosis: float = field(init=False)

    def __post_init__(self):
        self.mean, self.variance, self.skewness, self.excess_kurtosis = sample_moments(self.samples)

    @property
    def variance_se(self):
        return variance_standard_error(self.samples)

    @property
    def mean_se(self):
        return math.sqrt(self.variance / self.samples.size)


@dataclass
class EntryFluctuationReport:
    index: int
    diag: EntryStats
    offdiag: EntryStats


def entry_fluctuation_check(cfg, i, trials, seed, workers=None):
    """Samples of ``sqrt(n beta)(a_i - abar_i)`` and ``sqrt(n beta)(b_i - bbar_i)``; ``i`` is 1-based."""
    if not 1 <= i < cfg.n:
        raise IndexError(f"entry index must satisfy 1 <= i < n = {cfg.n}, got {i}")
    a1, b1, a, b = cfg.limit_law().jacobi_entries()
    abar = a1 if i == 1 else a
    bbar = b1 if i == 1 else b
    scale = math.sqrt(cfg.n * cfg.beta)

    def trial(stream):
        J = sample_ensemble(cfg, stream)
        return scale * (J.diag[i - 1] - abar), scale * (J.offdiag[i - 1] - bbar)

    results, _ = run_trials(trial, seed, trials, workers)
    ok = np.array(results)
    var_a, var_b = fluctuation_variances(cfg, i)
    return EntryFluctuationReport(i, EntryStats(ok[:, 0], var_a), EntryStats(ok[:, 1], var_b))

"""Acceptance criteria as runnable checks.

Each ``criterion_*`` function returns a :class:`CriterionResult` with the
measured values, the tolerance and where it comes from, and the runtime.
Seeds are fixed constants; changing them is a change to the suite.
"""

import inspect
import json
import math
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad

from . import cli as _cli
from .distributions import RngStream
from .ensembles import HermiteConfig, JacobiMatrix, LaguerreConfig, ManovaConfig, limit_matrix, sample_hermite
from .limit_laws import KestenMcKay, MarchenkoPastur, Semicircle, stieltjes_inversion
from .spectral import (
    discrete_m_function,
    empirical_measure,
    moment_oracle,
    spectral_measure,
    truncate_top,
)
from .stats import (
    ExperimentConfig,
    clt_experiment,
    entry_fluctuation_check,
    lln_experiment,
    mean_identity_check,
    poincare_bound_check,
    variance_identity_check,
)

SEED_BASE = 20240611


def _seed(number):
    return SEED_BASE + number


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: dict
    tolerance: str
    runtime: float
    budget: float = None
    details: list = field(default_factory=list)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{status}] {self.number:2d} {self.name}: {shown} | tol: {self.tolerance} | {self.runtime:.1f}s"

    def to_dict(self):
        return _jsonable(asdict(self))


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _finish(number, name, checks, measured, tolerance, start, budget, details=()):
    runtime = time.perf_counter() - start
    within = budget is None or runtime < budget
    if not within:
        details = list(details) + [f"runtime {runtime:.1f}s exceeds budget {budget:.0f}s"]
    return CriterionResult(number, name, bool(all(checks) and within), measured, tolerance, runtime, budget, list(details))


def _random_jacobi(rng, n):
    diag = rng.uniform(-2.0, 2.0, n)
    # U(0, 2]: reflect the half-open numpy interval
    off = 2.0 - rng.uniform(0.0, 2.0, n - 1)
    return JacobiMatrix(diag, off)


def _warmup():
    spectral_measure(JacobiMatrix([0.0, 0.0], [1.0]))
    empirical_measure(JacobiMatrix([0.0, 0.0], [1.0]))


# ----------------------------------------------------------------------------


def criterion_oracle(matrices=200, max_n=12):
    """Spectral-measure moments against ``J^k(1,1)`` by matrix-vector products."""
    _warmup()
    start = time.perf_counter()
    rng = np.random.default_rng(_seed(1))
    worst = 0.0
    for _ in range(matrices):
        n = int(rng.integers(1, max_n + 1))
        J = _random_jacobi(rng, n)
        mu = spectral_measure(J)
        for k in range(2 * n + 1):
            oracle = moment_oracle(J, k)
            err = abs(mu.moment(k) - oracle) / max(1.0, abs(oracle))
            worst = max(worst, err)
    return _finish(1, "oracle equivalence", [worst < 1e-10], {"max_rel_error": worst}, "1e-10 relative to max(1, |J^k(1,1)|)", start, 5.0)


def criterion_m_recursion(matrices=50, max_n=50, points=20):
    """``-1/m(z) = z - a_1 + b_1^2 m_1(z)`` with ``m_1`` from the truncated matrix."""
    _warmup()
    start = time.perf_counter()
    rng = np.random.default_rng(_seed(2))
    worst = 0.0
    herglotz = True
    for _ in range(matrices):
        n = int(rng.integers(2, max_n + 1))
        J = _random_jacobi(rng, n)
        mu = spectral_measure(J)
        mu1 = spectral_measure(truncate_top(J))
        z = rng.uniform(-4.0, 4.0, points) + 1j * rng.uniform(0.1, 3.0, points)
        m = discrete_m_function(mu, z)
        m1 = discrete_m_function(mu1, z)
        herglotz &= bool(np.all(m.imag > 0))
        lhs = -1.0 / m
        rhs = z - J.diag[0] + J.offdiag[0] ** 2 * m1
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs)))))
    return _finish(
        2, "m-function recursion", [worst < 1e-10, herglotz],
        {"max_residual": worst, "herglotz": herglotz}, "1e-10 relative to max(1, |1/m|)", start, 5.0,
    )


TRIANGLE_LAWS = (
    Semicircle(),
    MarchenkoPastur(0.25),
    MarchenkoPastur(0.5),
    MarchenkoPastur(0.9),
    KestenMcKay(0.0, 0.0),
    KestenMcKay(1.0, 0.5),
    KestenMcKay(3.0, 3.0),
)


def _ratio(num, den):
    return 1.0 if num == den else num / den


def _quad_stieltjes(law, z):
    """Reference ``int density(x) / (x - z) dx`` by scipy's algebraic-weight quadrature."""
    lo, hi = law.edges()
    if isinstance(law, KestenMcKay):
        # density = t (x-lo)(hi-x) / (2 pi x (1-x)) * ((x-lo)(hi-x))^(-1/2); the
        # first factor is smooth even when an edge sits at 0 or 1
        t = 2.0 + law.kappa_a + law.kappa_b

        def smooth(x):
            return t / (2.0 * math.pi) * _ratio(x - lo, x) * _ratio(hi - x, 1.0 - x)

        wvar = (-0.5, -0.5)
    else:

        def smooth(x):
            return law._kernel(np.array([x]), np.array([1.0 - x]))[0]

        wvar = (0.5, 0.5)

    def kern(x, part):
        v = smooth(x) / (x - z)
        return v.real if part == 0 else v.imag

    opts = dict(weight="alg", wvar=wvar, epsabs=1e-14, epsrel=1e-12, limit=200)
    re = quad(kern, lo, hi, args=(0,), **opts)[0]
    im = quad(kern, lo, hi, args=(1,), **opts)[0]
    return complex(re, im)


def criterion_triangle(laws=TRIANGLE_LAWS, k_max=20, stieltjes_points=10, inversion_points=20):
    """Density, moments, Stieltjes transform and inversion agree for every law."""
    start = time.perf_counter()
    rng = np.random.default_rng(_seed(3))
    mass_err = moment_err = stieltjes_err = inversion_err = 0.0
    truncation = k_max // 2 + 1
    for law in laws:
        mass_err = max(mass_err, abs(law.total_mass() - 1.0))
        J = limit_matrix(law, truncation)
        for k in range(k_max + 1):
            oracle = moment_oracle(J, k)
            moment_err = max(moment_err, abs(law.moment(k) - oracle) / max(1.0, abs(oracle)))
        lo, hi = law.edges()
        zs = rng.uniform(lo - 1.0, hi + 1.0, stieltjes_points) + 1j * rng.uniform(0.05, 2.0, stieltjes_points)
        for z in zs:
            ref = _quad_stieltjes(law, z)
            stieltjes_err = max(stieltjes_err, abs(law.stieltjes(z) - ref) / max(1.0, abs(ref)))
        xs = lo + (hi - lo) * np.linspace(0.05, 0.95, inversion_points)
        for x in xs:
            est = stieltjes_inversion(law.stieltjes, x, (1e-2, 1e-3, 1e-4))
            d = law.density(x)
            inversion_err = max(inversion_err, abs(est - d) / max(1.0, d))
    measured = {
        "mass_error": mass_err,
        "moment_error": moment_err,
        "stieltjes_error": stieltjes_err,
        "inversion_error": inversion_err,
    }
    checks = [mass_err < 1e-10, moment_err < 1e-8, stieltjes_err < 1e-8, inversion_err < 1e-3]
    tol = "mass 1e-10, moments 1e-8 rel, stieltjes 1e-8 rel, inversion 1e-3 rel to max(1, density)"
    return _finish(3, "limit-law consistency", checks, measured, tol, start, 30.0)


def criterion_lln(n=2000, trials=20, workers=None):
    """Moments of single-draw spectral measures near their limits in >= 19/20 trials."""
    _warmup()
    start = time.perf_counter()
    herm = lln_experiment([HermiteConfig(n, 2.0)], 4, trials, _seed(4), workers).per_n[0]
    ok2 = herm.moment_errors[:, 2] < 0.15
    ok4 = herm.moment_errors[:, 4] < 0.5
    hermite_hits = int(np.sum(ok2 & ok4))
    lag = lln_experiment([LaguerreConfig(n, 2 * n, 2.0)], 1, trials, _seed(4) + 1, workers).per_n[0]
    laguerre_hits = int(np.sum(lag.moment_errors[:, 1] < 0.15))
    need = math.ceil(0.95 * trials)
    measured = {
        "hermite_hits": hermite_hits,
        "laguerre_hits": laguerre_hits,
        "max_err_x2": float(herm.moment_errors[:, 2].max()),
        "max_err_x4": float(herm.moment_errors[:, 4].max()),
        "max_err_laguerre_x": float(lag.moment_errors[:, 1].max()),
    }
    tol = f">= {need}/{trials} trials with |x^2 err| < 0.15 and |x^4 err| < 0.5 (Hermite), |x err| < 0.15 (Laguerre)"
    return _finish(4, "law of large numbers", [hermite_hits >= need, laguerre_hits >= need], measured, tol, start, 120.0)


def criterion_clt(trials=2000, n=400, workers=None):
    """Variance, skewness and kurtosis of the scaled linear statistics."""
    _warmup()
    start = time.perf_counter()
    seed = _seed(5)
    herm = clt_experiment(ExperimentConfig(HermiteConfig(n, 2.0), [0, 0, 1], trials, seed), workers)
    lag = clt_experiment(ExperimentConfig(LaguerreConfig(n, 2 * n, 1.0), [0, 1], trials, seed + 1), workers)
    man = clt_experiment(ExperimentConfig(ManovaConfig(n, 2.0, 0.0, 0.0), [0, 1], trials, seed + 2), workers)
    checks = [
        abs(herm.sample_variance - herm.target_sigma2) <= 0.15,
        herm.skewness is not None and abs(herm.skewness) <= 0.15,
        herm.excess_kurtosis is not None and abs(herm.excess_kurtosis) <= 0.3,
        abs(lag.sample_variance - lag.target_sigma2) <= 0.1,
        abs(man.sample_variance - man.target_sigma2) <= 0.2 * man.target_sigma2,
    ]
    measured = {
        "hermite_variance": herm.sample_variance,
        "hermite_target": herm.target_sigma2,
        "hermite_skewness": herm.skewness,
        "hermite_excess_kurtosis": herm.excess_kurtosis,
        "laguerre_variance": lag.sample_variance,
        "laguerre_target": lag.target_sigma2,
        "manova_variance": man.sample_variance,
        "manova_target": man.target_sigma2,
    }
    se = {
        "hermite_variance_se": herm.variance_se,
        "skewness_se": math.sqrt(6.0 / trials),
        "kurtosis_se": math.sqrt(24.0 / trials),
    }
    tol = (
        "Hermite var +-0.15 (~4.5 SE), skew +-0.15, excess kurtosis +-0.3; "
        "Laguerre var +-0.1; MANOVA var +-20%; "
        + ", ".join(f"{k}={v:.3g}" for k, v in se.items())
    )
    return _finish(5, "CLT variance", checks, measured, tol, start, 600.0)


def criterion_mean_identity(trials=100, n=100, workers=None):
    """Per-draw conditional mean of ``<mu_n, f>`` over the weights equals ``<L_n, f>``."""
    _warmup()
    start = time.perf_counter()
    worst = 0.0
    z_max = 0.0
    configs = [HermiteConfig(n, 2.0), LaguerreConfig(n, 2 * n, 2.0), ManovaConfig(n, 2.0, 1.0, 1.0)]
    for offset, cfg in enumerate(configs):
        rep = mean_identity_check(cfg, [0, 0, 0, 1], trials, _seed(6) + offset, workers)
        worst = max(worst, rep.max_conditional_residual)
        z_max = max(z_max, abs(rep.paired_difference) / rep.paired_se)
    measured = {"max_conditional_residual": worst, "max_paired_z": z_max}
    tol = "conditional residual < 1e-12 on every draw (paired z reported, not gated)"
    return _finish(6, "mean identity", [worst < 1e-12], measured, tol, start, None)


def criterion_variance_identity(trials=100_000, sizes=(2, 5, 20), betas=(1.0, 2.0, 4.0)):
    """Fixed-spectrum weight variance: closed form, relation and Monte Carlo."""
    start = time.perf_counter()
    seed = _seed(7)
    z_max = 0.0
    rel_max = 0.0
    details = []
    for n in sizes:
        for beta in betas:
            if n == 2:
                atoms = np.array([0.0, 1.0])
            else:
                atoms = empirical_measure(sample_hermite(HermiteConfig(n, beta), RngStream(seed, n))).atoms
            rep = variance_identity_check(atoms, beta, [0, 1], trials, seed + 10 * n + int(beta))
            z_max = max(z_max, abs(rep.z_score))
            rel_max = max(rel_max, abs(rep.relation_value - rep.closed_form) / rep.closed_form)
            details.append(f"n={n} beta={beta:g}: closed={rep.closed_form:.6g} mc={rep.mc_variance:.6g} z={rep.z_score:.2f}")
    exact = variance_identity_check(np.array([0.0, 1.0]), 2.0, [0, 1], 2, seed).closed_form
    measured = {"max_abs_z": z_max, "max_relation_rel_error": rel_max, "n2_beta2_closed_form": exact}
    checks = [z_max <= 5.0, rel_max < 1e-12, abs(exact - 1.0 / 12.0) < 1e-15]
    tol = "MC within 5 SE of closed form; relation equal to 1e-12; n=2 beta=2 f=x equals 1/12"
    return _finish(7, "variance identity", checks, measured, tol, start, None, details)


def criterion_kolmogorov(sizes=(100, 400, 1600), trials=50, workers=None):
    """Median ``d_K(L_n, mu_n)`` strictly decreases in n."""
    _warmup()
    start = time.perf_counter()
    rep = lln_experiment([HermiteConfig(n, 2.0) for n in sizes], 0, trials, _seed(8), workers)
    med = rep.medians()
    decreasing = all(b < a for a, b in zip(med, med[1:]))
    return _finish(8, "Kolmogorov decay", [decreasing], {"medians": med}, "strictly decreasing medians", start, 180.0)


def criterion_poincare(trials=2000, workers=None):
    """Monte Carlo variance bounds for Hermite (f = x^2) and MANOVA (f = x)."""
    _warmup()
    start = time.perf_counter()
    herm = poincare_bound_check(HermiteConfig(200, 2.0), [0, 0, 1], trials, _seed(9), workers)
    man = poincare_bound_check(ManovaConfig(100, 2.0, 5.0, 5.0), [0, 1], trials, _seed(9) + 1, workers)
    measured = {
        "hermite_ratio": herm.ratio,
        "hermite_ratio_se": herm.ratio_se,
        "manova_ratio": man.ratio,
        "manova_ratio_se": man.ratio_se,
    }
    return _finish(9, "Poincare bounds", [herm.holds, man.holds], measured, "ratio <= 1 + 5 SE", start, None)


def criterion_entries(n=10_000, trials=2000, workers=None):
    """Fluctuation variances of the first Hermite entries at beta = 1."""
    start = time.perf_counter()
    rep = entry_fluctuation_check(HermiteConfig(n, 1.0), 1, trials, _seed(10), workers)
    measured = {
        "diag_variance": rep.diag.variance,
        "offdiag_variance": rep.offdiag.variance,
        "diag_mean": rep.diag.mean,
        "offdiag_mean": rep.offdiag.mean,
    }
    checks = [abs(rep.diag.variance - 2.0) <= 0.3, abs(rep.offdiag.variance - 0.5) <= 0.08]
    return _finish(10, "entry fluctuations", checks, measured, "diag 2 +- 0.3, offdiag 0.5 +- 0.08", start, None)


def criterion_determinism(n=100, trials=200):
    """``clt`` output with 1 and 8 workers has byte-identical sample arrays."""
    _warmup()
    start = time.perf_counter()
    arrays = []
    with tempfile.TemporaryDirectory() as tmp:
        for workers in (1, 8):
            out = os.path.join(tmp, f"clt_{workers}.json")
            argv = [
                "clt", "--ensemble", "hermite", "--n", str(n), "--beta", "2", "--f", "0,0,1",
                "--trials", str(trials), "--seed", str(_seed(11)), "--workers", str(workers), "--out", out,
            ]
            code = _cli.main(argv)
            if code != 0:
                return _finish(11, "determinism", [False], {"exit_code": code}, "byte-identical", start, None)
            with open(out) as fh:
                arrays.append(np.asarray(json.load(fh)["scaled_samples"], dtype=float).tobytes())
    same = arrays[0] == arrays[1]
    return _finish(11, "determinism", [same], {"identical": same, "trials": trials}, "byte-identical samples", start, None)


CRITERIA = {
    1: criterion_oracle,
    2: criterion_m_recursion,
    3: criterion_triangle,
    4: criterion_lln,
    5: criterion_clt,
    6: criterion_mean_identity,
    7: criterion_variance_identity,
    8: criterion_kolmogorov,
    9: criterion_poincare,
    10: criterion_entries,
    11: criterion_determinism,
}


# ----------------------------------------------------------------------------
# extended checks run by the full suite


def extended_entry_targets(trials=2000, n=20_000, workers=None):
    """Laguerre and MANOVA entry fluctuation variances within 5 SE of their targets."""
    start = time.perf_counter()
    zs = {}
    for offset, (label, cfg) in enumerate(
        [("laguerre", LaguerreConfig(n, 2 * n, 2.0)), ("manova", ManovaConfig(n, 2.0, 0.0, 0.0))]
    ):
        for i in (1, 3):
            rep = entry_fluctuation_check(cfg, i, trials, _seed(21) + 10 * offset + i, workers)
            for part in ("diag", "offdiag"):
                s = getattr(rep, part)
                zs[f"{label}_{part}_{i}"] = (s.variance - s.target_variance) / s.variance_se
    worst = max(abs(v) for v in zs.values())
    return _finish(21, "entry targets (Laguerre, MANOVA)", [worst <= 5.0], {"max_abs_z": worst}, "5 SE", start, None)


def extended_clt_normality(trials=2000, n=400, workers=None):
    """Skewness and excess kurtosis within 5 SE of 0 for all three CLT settings."""
    start = time.perf_counter()
    seed = _seed(22)
    reports = [
        clt_experiment(ExperimentConfig(HermiteConfig(n, 2.0), [0, 1], trials, seed), workers),
        clt_experiment(ExperimentConfig(LaguerreConfig(n, 2 * n, 2.0), [0, 0, 1], trials, seed + 1), workers),
        clt_experiment(ExperimentConfig(ManovaConfig(n, 2.0, 0.0, 0.0), [0, 0, 1], trials, seed + 2), workers),
    ]
    skew_se = math.sqrt(6.0 / trials)
    kurt_se = math.sqrt(24.0 / trials)
    worst_skew = max(abs(r.skewness) / skew_se for r in reports)
    worst_kurt = max(abs(r.excess_kurtosis) / kurt_se for r in reports)
    worst_var = max(abs(r.sample_variance - r.target_sigma2) / r.variance_se for r in reports)
    measured = {"skew_z": worst_skew, "kurtosis_z": worst_kurt, "variance_z": worst_var}
    return _finish(22, "CLT normality", [worst_skew <= 5, worst_kurt <= 5, worst_var <= 5], measured, "5 SE", start, None)


EXTENDED = {21: extended_entry_targets, 22: extended_clt_normality}


def run_suite(suite="quick", only=None, workers=None, log=None):
    """Run the criteria and return the list of results; ``log`` receives each summary line."""
    if suite not in ("quick", "full"):
        raise ValueError(f"unknown suite {suite!r}")
    table = dict(CRITERIA)
    if suite == "full":
        table.update(EXTENDED)
    numbers = sorted(table) if not only else [int(k) for k in only]
    results = []
    for number in numbers:
        if number not in table:
            raise KeyError(f"no criterion {number} in the {suite} suite")
        fn = table[number]
        kwargs = {"workers": workers} if "workers" in inspect.signature(fn).parameters else {}
        res = fn(**kwargs)
        results.append(res)
        if log is not None:
            log(res.line())
    return results

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jacobi_ensembles.distributions import RngStream
from jacobi_ensembles.ensembles import HermiteConfig, LaguerreConfig, ManovaConfig
from jacobi_ensembles.errors import ExperimentError, NumericalError, ParameterError, UnsupportedEnsembleError
from jacobi_ensembles.spectral import EmpiricalMeasure, SpectralMeasure
from jacobi_ensembles.stats import (
    ExperimentConfig,
    clt_experiment,
    entry_fluctuation_check,
    kolmogorov_distance,
    ks_normal,
    linear_statistics,
    lln_experiment,
    mean_identity_check,
    poincare_bound_check,
    run_trials,
    sample_moments,
    variance_identity_check,
    weight_variance,
)


@st.composite
def atomic_measures(draw):
    atoms = draw(st.lists(st.integers(-20, 20), min_size=1, max_size=8, unique=True))
    raw = draw(st.lists(st.floats(0.01, 1.0), min_size=len(atoms), max_size=len(atoms)))
    w = np.array(raw) / sum(raw)
    w[np.argmax(w)] += 1.0 - math.fsum(w)
    return SpectralMeasure(np.sort(np.array(atoms, dtype=float) / 4), w)


def test_kolmogorov_examples():
    mu = SpectralMeasure([0.0, 1.0, 2.0], [0.5, 0.3, 0.2])
    L = EmpiricalMeasure([0.0, 1.0, 2.0])
    assert kolmogorov_distance(mu, L) == pytest.approx(1 / 6, abs=1e-15)
    assert kolmogorov_distance(mu, mu) == 0.0
    assert kolmogorov_distance(SpectralMeasure([0.0], [1.0]), SpectralMeasure([1.0], [1.0])) == 1.0


@given(atomic_measures(), atomic_measures(), atomic_measures())
def test_kolmogorov_metric(a, b, c):
    ab = kolmogorov_distance(a, b)
    assert ab == kolmogorov_distance(b, a)
    assert 0.0 <= ab <= 1.0
    assert ab <= kolmogorov_distance(a, c) + kolmogorov_distance(c, b) + 1e-15


def test_run_trials_order_and_workers():
    fn = lambda s: float(s.generator.random())
    a, fa = run_trials(fn, 5, 50, workers=1)
    b, fb = run_trials(fn, 5, 50, workers=4)
    assert a == b and fa == fb == 0
    assert a[3] == float(RngStream(5).spawn(3).generator.random())


def test_run_trials_failure_accounting():
    def fails_once(stream):
        if stream.stream_id == RngStream(1).spawn(7).stream_id:
            raise NumericalError("boom", size=3, index=1)
        return 1.0

    results, failures = run_trials(fails_once, 1, 2000)
    assert failures == 1 and results[7] is None
    with pytest.raises(ExperimentError):
        run_trials(fails_once, 1, 500)


def test_run_trials_rejects_zero():
    with pytest.raises(ParameterError):
        run_trials(lambda s: 0, 0, 0)


def test_sample_moments_normal():
    x = np.random.default_rng(0).standard_normal(200_000)
    mean, var, skew, kurt = sample_moments(x)
    assert abs(skew) < 0.03 and abs(kurt) < 0.06 and abs(var - 1) < 0.02
    assert ks_normal(x) < 0.01


def test_clt_constant_function():
    rep = clt_experiment(ExperimentConfig(ManovaConfig(20), [2.5], 120, 3))
    assert np.all(rep.scaled_samples == 0.0)
    assert rep.sample_variance == 0.0 and rep.target_sigma2 == 0.0


def test_clt_small_trials_skip_normality():
    rep = clt_experiment(ExperimentConfig(HermiteConfig(20), [0, 1], 50, 3))
    assert rep.skewness is None and rep.excess_kurtosis is None and rep.ks_vs_normal is None
    assert rep.scaled_samples.size == 50 and rep.sample_variance >= 0


def test_clt_deterministic_across_workers():
    cfg = ExperimentConfig(LaguerreConfig(30, 60.0, 1.0), [0, 1, 1], 150, 9)
    a = clt_experiment(cfg, workers=1)
    b = clt_experiment(cfg, workers=3)
    assert a.scaled_samples.tobytes() == b.scaled_samples.tobytes()
    assert a.to_dict() == b.to_dict()


def test_clt_hermite_small_scale():
    rep = clt_experiment(ExperimentConfig(HermiteConfig(100), [0, 0, 1], 600, 21))
    # 0.15 at 2000 trials is ~4.5 SE; at 600 trials the same 4.5 SE is ~0.27
    assert abs(rep.sample_variance - 1.0) < 0.27
    assert rep.target_sigma2 == pytest.approx(1.0, abs=1e-12)


def test_experiment_config_validation():
    with pytest.raises(ParameterError):
        ExperimentConfig(HermiteConfig(5), [0, 1], 0)


def test_lln_single_draw():
    rep = lln_experiment([HermiteConfig(2000)], 2, 1, 4)
    assert rep.per_n[0].moment_errors[0, 2] < 0.15
    assert np.all(rep.per_n[0].moment_errors[:, 0] == 0.0)


def test_lln_schedule_validation():
    with pytest.raises(ParameterError):
        lln_experiment([HermiteConfig(50), HermiteConfig(50)], 2, 2, 0)
    with pytest.raises(ParameterError):
        lln_experiment([], 2, 2, 0)


def test_mean_identity():
    rep = mean_identity_check(HermiteConfig(100), [0, 0, 0, 1], 500, 12)
    assert rep.max_conditional_residual < 1e-12
    assert abs(rep.paired_difference) < 4 * rep.paired_se
    one = mean_identity_check(LaguerreConfig(20, 30.0), [1.0], 100, 1)
    assert np.all(one.mu_values == 1.0) and np.all(one.empirical_values == 1.0)
    with pytest.raises(ParameterError):
        mean_identity_check(HermiteConfig(10), [0, 1], 50, 1)


def test_variance_identity_two_point():
    rep = variance_identity_check(np.array([0.0, 1.0]), 2.0, [0, 1], 100_000, 3)
    assert rep.closed_form == pytest.approx(1 / 12, abs=1e-16)
    assert rep.relation_value == pytest.approx(1 / 12, abs=1e-16)
    assert abs(rep.z_score) < 5


def test_variance_identity_constant():
    rep = variance_identity_check(EmpiricalMeasure([0.0, 1.0, 3.0]), 1.0, [4.0], 1000, 3)
    assert rep.closed_form == pytest.approx(0.0, abs=1e-16)
    assert rep.mc_variance == 0.0


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=12, unique=True), st.sampled_from([1.0, 2.0, 4.0]))
def test_closed_form_equals_relation(atoms, beta):
    atoms = np.sort(atoms)
    fl = atoms**2 - atoms
    closed = weight_variance(atoms, beta, [0, -1, 1])
    n = atoms.size
    relation = 2 / (n * beta + 2) * (np.mean(fl**2) - np.mean(fl) ** 2)
    assert closed == pytest.approx(relation, rel=1e-9, abs=1e-14)


def test_poincare_hermite():
    rep = poincare_bound_check(HermiteConfig(100), [0, 0, 1], 400, 5)
    assert rep.holds
    assert rep.rhs == pytest.approx(2 / (100**2 * 2) * 4 * 1.0, rel=0.1)


def test_poincare_constant_function():
    rep = poincare_bound_check(HermiteConfig(30), [2.0], 120, 5)
    assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.ratio == 0.0 and rep.holds


def test_poincare_laguerre_supported():
    rep = poincare_bound_check(LaguerreConfig(50, 100.0, 2.0), [0, 1], 200, 5)
    assert rep.holds


def test_poincare_unsupported():
    with pytest.raises(UnsupportedEnsembleError):
        poincare_bound_check(ManovaConfig(20, 2.0, 0.0, 1.0), [0, 1], 10, 0)
    with pytest.raises(UnsupportedEnsembleError):
        poincare_bound_check(LaguerreConfig(20, 19.5, 1.0), [0, 1], 10, 0)
    with pytest.raises(UnsupportedEnsembleError):
        poincare_bound_check(object(), [0, 1], 10, 0)


def test_entry_fluctuations_index():
    with pytest.raises(IndexError):
        entry_fluctuation_check(HermiteConfig(5), 5, 10, 0)
    with pytest.raises(IndexError):
        entry_fluctuation_check(HermiteConfig(5), 0, 10, 0)


def test_entry_fluctuations_laguerre_offdiag():
    rep = entry_fluctuation_check(LaguerreConfig(5000, 10_000.0, 2.0), 2, 1500, 8)
    assert rep.offdiag.target_variance == pytest.approx(0.375)
    assert abs(rep.offdiag.variance - 0.375) < 5 * rep.offdiag.variance_se
    assert abs(rep.diag.variance - rep.diag.target_variance) < 5 * rep.diag.variance_se


def test_linear_statistics_drop_constant():
    vals, _ = linear_statistics(HermiteConfig(10), [7.0, 1.0], 5, 1)
    ref, _ = linear_statistics(HermiteConfig(10), [0.0, 1.0], 5, 1)
    assert np.array_equal(vals, ref)

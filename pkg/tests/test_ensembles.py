import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jacobi_ensembles.distributions import RngStream
from jacobi_ensembles.ensembles import (
    HermiteConfig,
    JacobiMatrix,
    LaguerreConfig,
    ManovaConfig,
    fluctuation_variances,
    limit_matrix,
    manova_beta_parameters,
    manova_from_p,
    sample_ensemble,
    sample_hermite,
    sample_laguerre,
    sample_manova,
    sample_weights,
)
from jacobi_ensembles.errors import ParameterError
from jacobi_ensembles.limit_laws import KestenMcKay, MarchenkoPastur, Semicircle

CONFIGS = [
    HermiteConfig(30, 2.0),
    HermiteConfig(30, 0.7),
    LaguerreConfig(30, 45.5, 1.0),
    ManovaConfig(30, 2.0, 0.0, 0.0),
    ManovaConfig(30, 4.0, 3.0, 1.5),
]


def test_jacobi_validation():
    with pytest.raises(ParameterError):
        JacobiMatrix([], [])
    with pytest.raises(ParameterError):
        JacobiMatrix([0.0, 0.0], [])
    with pytest.raises(ParameterError):
        JacobiMatrix([0.0, 0.0], [0.0])
    with pytest.raises(ParameterError):
        JacobiMatrix([0.0, np.inf], [1.0])
    J = JacobiMatrix([1.0, 2.0], [0.5])
    with pytest.raises(ValueError):
        J.diag[0] = 3.0


def test_jacobi_dense_and_matvec():
    J = JacobiMatrix([1.0, 2.0, 3.0], [0.5, 0.25])
    v = np.array([1.0, -1.0, 2.0])
    assert np.allclose(J.to_dense() @ v, J.matvec(v))
    assert J == JacobiMatrix([1.0, 2.0, 3.0], [0.5, 0.25])


@pytest.mark.parametrize("cfg", CONFIGS, ids=repr)
def test_reproducible(cfg):
    a = sample_ensemble(cfg, RngStream(11, 2))
    b = sample_ensemble(cfg, RngStream(11, 2))
    c = sample_ensemble(cfg, RngStream(12, 2))
    assert a == b
    assert not a == c
    assert a.size == cfg.n


def test_hermite_first_moment_means():
    # E[a_1^2 + b_1^2] = 2/(n beta) + (n-1) beta/(n beta), which is 1 at beta = 2
    n, trials = 20, 20_000
    cfg = HermiteConfig(n, 2.0)
    root = RngStream(3)
    vals = []
    for t in range(trials):
        J = sample_hermite(cfg, root.spawn(t))
        vals.append(J.diag[0] ** 2 + J.offdiag[0] ** 2)
    vals = np.array(vals)
    assert abs(vals.mean() - 1.0) < 5 * vals.std() / math.sqrt(trials)


def test_laguerre_entries_expectations():
    # E[c_1^2] = beta m, so E[a_1] = 1; E[c_1^2 d_1^2] = beta^2 m (n-1)
    n, m, beta, trials = 10, 17.0, 1.0, 20_000
    cfg = LaguerreConfig(n, m, beta)
    root = RngStream(4)
    a1 = np.array([sample_laguerre(cfg, root.spawn(t)).diag[0] for t in range(trials)])
    assert abs(a1.mean() - 1.0) < 5 * a1.std() / math.sqrt(trials)


def test_laguerre_matches_bidiagonal_product():
    cfg = LaguerreConfig(6, 8.5, 2.0)
    J = sample_laguerre(cfg, RngStream(5))
    # rebuild B from the same draws: c then d
    s = RngStream(5)
    from jacobi_ensembles.distributions import sample_chi

    i = np.arange(1, 7, dtype=float)
    c = sample_chi(s, 2.0 * (8.5 - i + 1))
    d = sample_chi(s, 2.0 * (6 - i[:-1]))
    B = np.diag(c) + np.diag(d, -1)
    L = B.T @ B / (8.5 * 2.0)
    L2 = B @ B.T / (8.5 * 2.0)
    # the tridiagonal form is B^t B up to index convention; compare spectra
    assert np.allclose(np.sort(np.linalg.eigvalsh(J.to_dense())), np.sort(np.linalg.eigvalsh(L)), atol=1e-12)
    assert np.allclose(np.linalg.eigvalsh(L), np.linalg.eigvalsh(L2), atol=1e-12)


def test_manova_from_p_small_case():
    # n = 2, p = (p1, p2, p3): a1 = p1, a2 = p2(1-p1) + p3(1-p2), b1 = sqrt(p1(1-p0)p2(1-p1))
    p = np.array([0.3, 0.6, 0.2])
    diag, off = manova_from_p(p)
    assert diag == pytest.approx([0.3, 0.6 * 0.7 + 0.2 * 0.4])
    assert off == pytest.approx([math.sqrt(0.3 * 0.6 * 0.7)])


def test_manova_beta_parameters_first():
    cfg = ManovaConfig(3, 2.0, 0.5, 1.0)
    x, y = manova_beta_parameters(cfg)
    # k = 1 (odd): ((2n-k-1)/4 beta + a + 1, (2n-k-1)/4 beta + b + 1)
    assert x[0] == pytest.approx(4 / 4 * 2 + 1.5)
    assert y[0] == pytest.approx(4 / 4 * 2 + 2.0)
    # k = 2 (even): ((2n-k)/4 beta, (2n-k-2)/4 beta + a + b + 2)
    assert x[1] == pytest.approx(4 / 4 * 2)
    assert y[1] == pytest.approx(2 / 4 * 2 + 3.5)
    assert x.size == 5


@given(st.integers(2, 40), st.floats(0.5, 4.0), st.floats(-0.9, 5.0), st.floats(-0.9, 5.0), st.integers(0, 2**32))
def test_manova_spectrum_in_unit_interval(n, beta, a, b, seed):
    J = sample_manova(ManovaConfig(n, beta, a, b), RngStream(seed))
    lam = np.linalg.eigvalsh(J.to_dense())
    assert lam.min() > -1e-12 and lam.max() < 1 + 1e-12


@given(st.integers(2, 40), st.floats(0.5, 4.0), st.floats(0.0, 20.0), st.integers(0, 2**32))
def test_laguerre_positive_semidefinite(n, beta, extra, seed):
    J = sample_laguerre(LaguerreConfig(n, n - 1 + 0.5 + extra, beta), RngStream(seed))
    assert np.linalg.eigvalsh(J.to_dense()).min() > -1e-12


def test_config_domains():
    with pytest.raises(ParameterError):
        LaguerreConfig(10, 9.0)
    LaguerreConfig(10, 9.5)
    with pytest.raises(ParameterError):
        ManovaConfig(5, 2.0, -1.0, 0.0)
    with pytest.raises(ParameterError):
        HermiteConfig(0)
    with pytest.raises(ParameterError):
        HermiteConfig(5, 0.0)


def test_limit_laws_of_configs():
    assert HermiteConfig(5).limit_law() == Semicircle()
    assert LaguerreConfig(400, 800).limit_law() == MarchenkoPastur(0.5)
    assert ManovaConfig.from_kappa(100, 2.0, 1.0, 0.5).limit_law() == KestenMcKay(1.0, 0.5)
    assert ManovaConfig(100, 2.0, -0.5, 0.0).limit_law() == KestenMcKay(0.0, 0.0)


def test_limit_matrix_entries():
    J = limit_matrix(MarchenkoPastur(0.25), 4)
    assert np.allclose(J.diag, [1.0, 1.25, 1.25, 1.25])
    assert np.allclose(J.offdiag, [0.5, 0.5, 0.5])
    assert limit_matrix(Semicircle(), 1).size == 1


@pytest.mark.parametrize("cfg,i", [
    (HermiteConfig(40_000, 2.0), 1),
    (LaguerreConfig(40_000, 80_000, 2.0), 2),
    (ManovaConfig(40_000, 2.0, 0.0, 0.0), 2),
    (ManovaConfig.from_kappa(40_000, 2.0, 1.0, 0.5), 1),
])
def test_entries_near_limit(cfg, i):
    # entries lie within 0.05 of the limit matrix in >= 95% of draws
    a1, b1, a, b = cfg.limit_law().jacobi_entries()
    abar, bbar = (a1, b1) if i == 1 else (a, b)
    root = RngStream(6)
    hits = 0
    for t in range(100):
        J = sample_ensemble(cfg, root.spawn(t))
        hits += abs(J.diag[i - 1] - abar) < 0.05 and abs(J.offdiag[i - 1] - bbar) < 0.05
    assert hits >= 95


def test_fluctuation_targets():
    assert fluctuation_variances(HermiteConfig(10), 1) == (2.0, 0.5)
    d, o = fluctuation_variances(LaguerreConfig(400, 800), 3)
    assert o == pytest.approx(0.375)
    assert d == pytest.approx(1.5)
    assert fluctuation_variances(LaguerreConfig(400, 800), 1)[0] == pytest.approx(1.0)
    # arcsine case: p_1 ~ Beta(n, n) roughly, Var ~ 1/(8n), times n beta = 2n gives 1/4
    d, o = fluctuation_variances(ManovaConfig(400), 1)
    assert d == pytest.approx(0.25)


def test_weights():
    w = sample_weights(10, 2.0, RngStream(1))
    assert w.shape == (10,) and math.fsum(w) == 1.0

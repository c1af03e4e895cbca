import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import Polynomial

from jacobi_ensembles.ensembles import limit_matrix
from jacobi_ensembles.errors import DomainError, ParameterError
from jacobi_ensembles.limit_laws import (
    KestenMcKay,
    MarchenkoPastur,
    Semicircle,
    as_polynomial,
    stieltjes_inversion,
    variance_functional,
)
from jacobi_ensembles.spectral import moment_oracle

LAWS = [
    Semicircle(),
    MarchenkoPastur(0.25),
    MarchenkoPastur(0.5),
    MarchenkoPastur(0.9),
    KestenMcKay(0.0, 0.0),
    KestenMcKay(1.0, 0.5),
    KestenMcKay(3.0, 3.0),
]


def narayana_moment(k, g):
    # MP moments: sum_j N(k, j) g^(j-1), N(k, j) = C(k,j) C(k,j-1) / k
    return sum(math.comb(k, j) * math.comb(k, j - 1) / k * g ** (j - 1) for j in range(1, k + 1))


def test_semicircle_values():
    sc = Semicircle()
    assert sc.edges() == (-2.0, 2.0)
    assert sc.density(0.0) == pytest.approx(1 / math.pi, rel=1e-15)
    assert sc.density(2.5) == 0.0
    assert sc.stieltjes(2j) == pytest.approx((math.sqrt(2) - 1) * 1j, abs=1e-15)


@pytest.mark.parametrize("k", range(0, 21, 2))
def test_semicircle_catalan_moments(k):
    catalan = math.comb(k, k // 2) / (k // 2 + 1)
    assert Semicircle().moment(k) == pytest.approx(catalan, rel=1e-12)


@pytest.mark.parametrize("k", range(1, 21, 2))
def test_semicircle_odd_moments_vanish(k):
    # cancellation error scales with the absolute moment, at most 2^k
    assert abs(Semicircle().moment(k)) < 1e-15 * 2**k


def test_mp_density_closed_form():
    g = 0.25
    law = MarchenkoPastur(g)
    lo, hi = law.edges()
    assert (lo, hi) == pytest.approx((0.25, 2.25))
    x = 1.0
    ref = math.sqrt((hi - x) * (x - lo)) / (2 * math.pi * g * x)
    assert law.density(x) == pytest.approx(ref, rel=1e-14)


@pytest.mark.parametrize("g", [0.25, 0.5, 0.9])
@pytest.mark.parametrize("k", [1, 2, 3, 6, 10])
def test_mp_narayana_moments(g, k):
    assert MarchenkoPastur(g).moment(k) == pytest.approx(narayana_moment(k, g), rel=1e-11)


@pytest.mark.parametrize("bad", [0.0, 1.0, 1.5, -0.2, float("nan")])
def test_mp_gamma_domain(bad):
    with pytest.raises(ParameterError):
        MarchenkoPastur(bad)


def test_kmk_arcsine_special_case():
    law = KestenMcKay(0.0, 0.0)
    assert law.edges() == pytest.approx((0.0, 1.0), abs=1e-15)
    x = np.linspace(0.01, 0.99, 50)
    assert np.allclose(law.density(x), 1 / (math.pi * np.sqrt(x * (1 - x))), rtol=1e-12, atol=0)
    for k in range(8):
        # arcsine moments C(2k, k) / 4^k
        assert law.moment(k) == pytest.approx(math.comb(2 * k, k) / 4**k, rel=1e-12)


def test_kmk_limit_entries_arcsine():
    assert KestenMcKay(0, 0).jacobi_entries() == pytest.approx((0.5, 1 / math.sqrt(8), 0.5, 0.25))


def test_kmk_domain():
    with pytest.raises(ParameterError):
        KestenMcKay(-0.1, 0.0)


@pytest.mark.parametrize("law", LAWS, ids=repr)
def test_mass_and_oracle_moments(law):
    assert abs(law.total_mass() - 1.0) < 1e-12
    J = limit_matrix(law, 11)
    for k in range(21):
        oracle = moment_oracle(J, k)
        scale = max(abs(law.edges()[0]), abs(law.edges()[1])) ** k
        assert law.moment(k) == pytest.approx(oracle, rel=1e-9, abs=1e-14 * scale)


@pytest.mark.parametrize("law", LAWS, ids=repr)
def test_first_moment_is_top_entry(law):
    assert law.moment(1) == pytest.approx(law.jacobi_entries()[0], abs=1e-13)


@pytest.mark.parametrize("law", LAWS, ids=repr)
def test_stieltjes_matches_quadrature(law):
    x, w = law.quadrature()
    for z in [0.3 + 1.0j, -1.0 + 0.5j, 2.0 + 2.0j]:
        ref = np.sum(w / (x - z))
        assert law.stieltjes(z) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("law", LAWS, ids=repr)
def test_inversion_interior(law):
    lo, hi = law.edges()
    for t in (0.1, 0.5, 0.9):
        x = lo + t * (hi - lo)
        est = stieltjes_inversion(law.stieltjes, x, (1e-2, 1e-3, 1e-4))
        assert est == pytest.approx(law.density(x), abs=1e-3)


@given(
    st.sampled_from(LAWS),
    st.floats(-5, 5),
    st.floats(1e-6, 10),
)
def test_herglotz(law, re, im):
    assert law.stieltjes(complex(re, im)).imag > 0


@given(st.sampled_from(LAWS), st.floats(1, 1e6))
def test_stieltjes_decays_like_minus_one_over_z(law, r):
    z = complex(0.0, r)
    assert abs(law.stieltjes(z) * z + 1.0) < 5.0 / r + 1e-9


def test_stieltjes_domain():
    with pytest.raises(DomainError):
        Semicircle().stieltjes(1.0 + 0j)
    with pytest.raises(DomainError):
        Semicircle().stieltjes(1.0 - 1j)


def test_variance_functional_targets():
    assert variance_functional(Semicircle(), [0, 0, 1]) == pytest.approx(1.0, abs=1e-12)
    assert variance_functional(MarchenkoPastur(0.5), [0, 1]) == pytest.approx(0.5, abs=1e-12)
    assert variance_functional(KestenMcKay(0, 0), [0, 1]) == pytest.approx(0.125, abs=1e-12)
    assert variance_functional(Semicircle(), [3.0]) == 0.0


def test_inversion_schedule_errors():
    m = Semicircle().stieltjes
    for bad in [(), (1e-3, 1e-2), (1e-2, 0.0), (1e-2, 1e-2)]:
        with pytest.raises(ParameterError):
            stieltjes_inversion(m, 0.0, bad)


def test_inversion_extrapolates_linear_term():
    # Im m / pi = c + eps is recovered exactly with two samples
    f = lambda z: complex(0.0, math.pi * (0.7 + z.imag))
    assert stieltjes_inversion(f, 0.0, (0.1, 0.05)) == pytest.approx(0.7, abs=1e-14)


def test_as_polynomial():
    assert as_polynomial([1, 2, 0]).degree() == 1
    assert as_polynomial(Polynomial([3.0]))(5.0) == 3.0
    assert as_polynomial([])(1.0) == 0.0


def test_moment_order_error():
    with pytest.raises(ParameterError):
        Semicircle().moment(-1)

"""Tridiagonal matrix models of the Hermite, Laguerre and Jacobi (MANOVA) beta ensembles.

All models are returned already scaled (by ``sqrt(n beta)`` or ``m beta``)
so their entries converge to the limit matrices of :func:`limit_matrix`.
Draws are taken in a fixed order, diagonal before off-diagonal and
ascending index, so ``(config, stream)`` pins the whole matrix.
"""

import math
from dataclasses import dataclass

import numpy as np

from .distributions import sample_beta, sample_chi, sample_dirichlet_sym, sample_normal
from .errors import ParameterError
from .limit_laws import KestenMcKay, MarchenkoPastur, Semicircle


@dataclass(frozen=True, eq=False)
class JacobiMatrix:
    """Finite symmetric tridiagonal matrix with positive off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diag, dtype=float).ravel()
        offdiag = np.array(self.offdiag, dtype=float).ravel()
        if diag.size < 1:
            raise ParameterError("a Jacobi matrix needs at least one diagonal entry")
        if offdiag.size != diag.size - 1:
            raise ParameterError(
                f"offdiag must have length {diag.size - 1}, got {offdiag.size}"
            )
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offdiag))):
            raise ParameterError("Jacobi matrix entries must be finite")
        if np.any(offdiag <= 0):
            raise ParameterError("Jacobi matrix off-diagonal entries must be > 0")
        diag.flags.writeable = False
        offdiag.flags.writeable = False
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def size(self):
        return self.diag.size

    def to_dense(self):
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, v):
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def __eq__(self, other):
        if not isinstance(other, JacobiMatrix):
            return NotImplemented
        return np.array_equal(self.diag, other.diag) and np.array_equal(self.offdiag, other.offdiag)

    def __repr__(self):
        return f"JacobiMatrix(size={self.size})"


def _positive_int(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ParameterError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def _positive_real(name, value):
    if not (isinstance(value, (int, float, np.number)) and math.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class HermiteConfig:
    n: int
    beta: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "n", _positive_int("n", self.n))
        object.__setattr__(self, "beta", _positive_real("beta", self.beta))

    def limit_law(self):
        return Semicircle()


@dataclass(frozen=True)
class LaguerreConfig:
    """Wishart model; ``m`` is real with ``m > n - 1``."""

    n: int
    m: float
    beta: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "n", _positive_int("n", self.n))
        object.__setattr__(self, "beta", _positive_real("beta", self.beta))
        m = self.m
        if not (isinstance(m, (int, float, np.number)) and math.isfinite(m) and m > self.n - 1):
            raise ParameterError(f"Laguerre model needs m > n - 1 = {self.n - 1}, got {m!r}")
        object.__setattr__(self, "m", float(m))

    @property
    def gamma(self):
        """Realized ratio ``n / m``."""
        return self.n / self.m

    def limit_law(self):
        return MarchenkoPastur(self.gamma)


@dataclass(frozen=True)
class ManovaConfig:
    """Jacobi (MANOVA) model with exponents ``a, b > -1``.

    The limit law uses ``kappa = 2 a / (n beta)`` (clipped at 0), i.e. the
    regime ``a(n) ~ kappa n beta / 2`` read off at the given ``n``.
    """

    n: int
    beta: float = 2.0
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "n", _positive_int("n", self.n))
        object.__setattr__(self, "beta", _positive_real("beta", self.beta))
        for name in ("a", "b"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float, np.number)) and math.isfinite(v) and v > -1):
                raise ParameterError(f"MANOVA parameter {name} must be > -1, got {v!r}")
            object.__setattr__(self, name, float(v))

    @classmethod
    def from_kappa(cls, n, beta, kappa_a, kappa_b):
        scale = n * beta / 2.0
        return cls(n=n, beta=beta, a=kappa_a * scale, b=kappa_b * scale)

    @property
    def kappa(self):
        scale = self.n * self.beta / 2.0
        return max(0.0, self.a / scale), max(0.0, self.b / scale)

    def limit_law(self):
        return KestenMcKay(*self.kappa)


def sample_hermite(cfg, stream):
    """Gaussian beta ensemble: diag ``N(0,2)``, offdiag ``chi_{(n-i) beta}``, all over ``sqrt(n beta)``."""
    n, beta = cfg.n, cfg.beta
    scale = math.sqrt(n * beta)
    diag = sample_normal(stream, 0.0, 2.0, size=n) / scale
    dof = beta * np.arange(n - 1, 0, -1, dtype=float)
    offdiag = sample_chi(stream, dof) / scale if n > 1 else np.empty(0)
    return JacobiMatrix(diag, offdiag)


def sample_laguerre(cfg, stream):
    """Wishart beta ensemble ``B B^t / (m beta)`` assembled directly in tridiagonal form.

    ``c_i ~ chi_{beta(m - i + 1)}`` is the bidiagonal's diagonal and
    ``d_i ~ chi_{beta(n - i)}`` its sub-diagonal.
    """
    n, m, beta = cfg.n, cfg.m, cfg.beta
    i = np.arange(1, n + 1, dtype=float)
    c = sample_chi(stream, beta * (m - i + 1.0))
    d = sample_chi(stream, beta * (n - i[:-1])) if n > 1 else np.empty(0)
    c2 = c * c
    diag = c2.copy()
    diag[1:] += d * d
    scale = m * beta
    return JacobiMatrix(diag / scale, c[:-1] * d / scale)


def manova_beta_parameters(cfg):
    """Beta parameters ``(x_k, y_k)`` of ``p_1 .. p_{2n-1}`` as two arrays."""
    n, beta, a, b = cfg.n, cfg.beta, cfg.a, cfg.b
    k = np.arange(1, 2 * n, dtype=float)
    even = (np.arange(1, 2 * n) % 2) == 0
    x = np.where(even, (2 * n - k) / 4.0 * beta, (2 * n - k - 1) / 4.0 * beta + a + 1.0)
    y = np.where(even, (2 * n - k - 2) / 4.0 * beta + a + b + 2.0, (2 * n - k - 1) / 4.0 * beta + b + 1.0)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ParameterError("MANOVA Beta parameters must be positive")
    return x, y


def manova_from_p(p):
    """Assemble ``(diag, offdiag)`` from ``p_1 .. p_{2n-1}`` with ``p_{-1} = p_0 = 0``."""
    p = np.asarray(p, dtype=float)
    n = (p.size + 1) // 2
    full = np.concatenate(([0.0, 0.0], p))  # full[j + 1] = p_j

    def at(j):
        return full[j + 1]

    k = np.arange(1, n + 1)
    diag = at(2 * k - 2) * (1.0 - at(2 * k - 3)) + at(2 * k - 1) * (1.0 - at(2 * k - 2))
    k = k[:-1]
    offdiag = np.sqrt(at(2 * k - 1) * (1.0 - at(2 * k - 2)) * at(2 * k) * (1.0 - at(2 * k - 1)))
    return diag, offdiag


def sample_manova(cfg, stream):
    """Beta-Jacobi ensemble on [0, 1] from independent Beta variables ``p_k``."""
    x, y = manova_beta_parameters(cfg)
    p = sample_beta(stream, x, y)
    return JacobiMatrix(*manova_from_p(p))


_SAMPLERS = {
    HermiteConfig: sample_hermite,
    LaguerreConfig: sample_laguerre,
    ManovaConfig: sample_manova,
}


def sample_ensemble(cfg, stream):
    try:
        sampler = _SAMPLERS[type(cfg)]
    except KeyError:
        raise ParameterError(f"unknown ensemble config {cfg!r}") from None
    return sampler(cfg, stream)


def sample_weights(n, beta, stream):
    """Spectral weights ``q_i^2``: symmetric Dirichlet with parameter ``beta / 2``."""
    return sample_dirichlet_sym(stream, n, beta / 2.0)


def limit_matrix(law, size):
    """Top-left ``size x size`` block of the non-random limit Jacobi matrix of ``law``."""
    size = _positive_int("size", size)
    a1, b1, a, b = law.jacobi_entries()
    diag = np.full(size, a)
    diag[0] = a1
    offdiag = np.full(size - 1, b)
    if size > 1:
        offdiag[0] = b1
    return JacobiMatrix(diag, offdiag)


def _delta_var(grad, variances):
    return float(sum(g * g * v for g, v in zip(grad, variances)))


def fluctuation_variances(cfg, i):
    """Limiting variances of ``sqrt(n beta)(a_i - abar_i)`` and ``sqrt(n beta)(b_i - bbar_i)``.

    ``i`` is 1-based.  Laguerre targets use the realized ratio ``n / m``;
    MANOVA targets follow from the Beta CLT for the ``p_k`` and the delta
    method applied to the entry formulas.
    """
    if isinstance(cfg, HermiteConfig):
        return 2.0, 0.5
    if isinstance(cfg, LaguerreConfig):
        g = cfg.gamma
        diag = 2.0 * g if i == 1 else 2.0 * g * (1.0 + g)
        return diag, g * (g + 1.0) / 2.0
    if isinstance(cfg, ManovaConfig):
        ka, kb = cfg.kappa
        t = 2.0 + ka + kb
        var_even = 2.0 * (1.0 + ka + kb) / t**3
        var_odd = 2.0 * (1.0 + ka) * (1.0 + kb) / t**3
        e = 1.0 / t
        o = (1.0 + ka) / t
        if i == 1:
            # a_1 = p_1, b_1 = sqrt(p_1 (1 - p_1) p_2)
            diag = var_odd
            g = math.sqrt(o * (1.0 - o) * e)
            off = _delta_var([(1.0 - 2.0 * o) * e / (2.0 * g), o * (1.0 - o) / (2.0 * g)], [var_odd, var_even])
            return diag, off
        # a_k in p_{2k-3}, p_{2k-2}, p_{2k-1}
        diag = _delta_var([-e, 1.0 - 2.0 * o, 1.0 - e], [var_odd, var_even, var_odd])
        # b_k in p_{2k-2}, p_{2k-1}, p_{2k}
        g = math.sqrt(o * (1.0 - o) * e * (1.0 - e))
        grad = [
            -o * (1.0 - o) * e / (2.0 * g),
            (1.0 - 2.0 * o) * e * (1.0 - e) / (2.0 * g),
            o * (1.0 - o) * (1.0 - e) / (2.0 * g),
        ]
        return diag, _delta_var(grad, [var_even, var_odd, var_even])
    raise ParameterError(f"unknown ensemble config {cfg!r}")

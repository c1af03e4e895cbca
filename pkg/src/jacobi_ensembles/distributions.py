"""Seeded scalar samplers used by the matrix models.

Every sampler takes an explicit :class:`RngStream`; there is no global
generator.  All samplers accept an optional ``size`` (or array-valued
parameters) and then return numpy arrays, which is how the matrix models
draw a whole diagonal at once.
"""

import math

import numpy as np

from .errors import ParameterError

_MASK64 = (1 << 64) - 1


def splitmix64(x):
    """One round of the splitmix64 finalizer on a 64-bit unsigned integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_stream_id(seed, stream_id, index):
    """Child stream id as a splitmix hash of (seed, parent stream id, index)."""
    h = splitmix64(seed & _MASK64)
    h = splitmix64(h ^ (stream_id & _MASK64))
    return splitmix64(h ^ (index & _MASK64))


def _check_u64(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if not 0 <= value <= _MASK64:
        raise ParameterError(f"{name} must fit in 64 unsigned bits, got {value}")
    return value


class RngStream:
    """A reproducible random stream identified by ``(seed, stream_id)``.

    The pair is expanded through :class:`numpy.random.SeedSequence` into a
    PCG64 generator, so equal pairs give bitwise-equal draws.  Use
    :meth:`spawn` to derive independent child streams for parallel trials.
    """

    __slots__ = ("seed", "stream_id", "_generator")

    def __init__(self, seed, stream_id=0):
        self.seed = _check_u64("seed", seed)
        self.stream_id = _check_u64("stream_id", stream_id)
        sequence = np.random.SeedSequence([self.seed, self.stream_id])
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    def spawn(self, index):
        """Return the child stream number ``index`` (a fresh, unadvanced stream)."""
        index = _check_u64("index", index)
        return RngStream(self.seed, derive_stream_id(self.seed, self.stream_id, index))

    @property
    def generator(self):
        return self._generator

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def _positive(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or not np.all(arr > 0):
        raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
    return arr if arr.ndim else float(arr)


def sample_gamma(stream, shape, size=None):
    """Gamma(shape, scale 1) draws."""
    shape = _positive("shape", shape)
    return stream.generator.standard_gamma(shape, size)


def sample_normal(stream, mean=0.0, variance=1.0, size=None):
    """Draw from N(mean, variance)."""
    variance = _positive("variance", variance)
    if not math.isfinite(mean):
        raise ParameterError(f"mean must be finite, got {mean!r}")
    return mean + np.sqrt(variance) * stream.generator.standard_normal(size)


def sample_chi(stream, dof, size=None):
    """Draw from the chi distribution with real ``dof`` degrees of freedom.

    Uses ``chi_k = sqrt(2 G)`` with ``G ~ Gamma(k/2)``, so non-integer
    degrees of freedom are fine.
    """
    dof = _positive("dof", dof)
    return np.sqrt(2.0 * stream.generator.standard_gamma(np.divide(dof, 2.0), size))


def sample_beta(stream, x, y, size=None):
    """Draw from Beta(x, y) as ``G1 / (G1 + G2)`` with independent gamma variates."""
    x = _positive("x", x)
    y = _positive("y", y)
    if size is None:
        size = np.broadcast(np.asarray(x), np.asarray(y)).shape or None
    g1 = stream.generator.standard_gamma(x, size)
    g2 = stream.generator.standard_gamma(y, size)
    return g1 / (g1 + g2)


def renormalize_exact(w):
    """Adjust the largest entry of ``w`` in place until ``math.fsum(w) == 1.0``."""
    j = int(np.argmax(w))
    for _ in range(8):
        r = 1.0 - math.fsum(w)
        if r == 0.0:
            break
        w[j] += r
    return w


def sample_dirichlet_sym(stream, n, alpha, size=None):
    """Symmetric Dirichlet(alpha, ..., alpha) vector of length ``n``.

    Built from normalized i.i.d. Gamma(alpha) variates and then corrected so
    that ``math.fsum(w) == 1.0`` holds exactly for every returned row.  With
    ``size`` given the result has shape ``(size, n)``.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    alpha = _positive("alpha", alpha)
    shape = (int(n),) if size is None else (int(size), int(n))
    g = stream.generator.standard_gamma(alpha, shape)
    w = g / g.sum(axis=-1, keepdims=True)
    if w.ndim == 1:
        return renormalize_exact(w)
    for row in w:
        renormalize_exact(row)
    return w


def dirichlet_sym_moments(n, alpha):
    """Return ``(E[w_i], E[w_i^2], E[w_i w_j])`` for symmetric Dirichlet(alpha) of length n.

    With ``alpha = beta/2`` these are ``1/n``, ``(beta+2)/(n(n beta+2))`` and
    ``beta/(n(n beta+2))``.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    alpha = _positive("alpha", alpha)
    mean = 1.0 / n
    second = (alpha + 1.0) / (n * (n * alpha + 1.0))
    cross = alpha / (n * (n * alpha + 1.0))
    return mean, second, cross

"""Semicircle, Marchenko-Pastur and Kesten-McKay laws.

Each law knows its support, density, closed-form Stieltjes transform
(m-function), the entries of its limit Jacobi matrix, and a quadrature rule
for moments.  The quadrature substitutes ``x = lo + (hi - lo) sin^2(phi/2)``
so the square-root edge factors of all three densities become smooth in
``phi``; Gauss-Legendre in ``phi`` is then accurate to rounding.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError, ParameterError

QUADRATURE_NODES = 256


def as_polynomial(f):
    """Coerce ``f`` (a Polynomial or ascending coefficient sequence) to a trimmed Polynomial."""
    if isinstance(f, Polynomial):
        p = f
    else:
        coeffs = np.atleast_1d(np.asarray(f, dtype=float))
        if coeffs.size == 0:
            coeffs = np.zeros(1)
        p = Polynomial(coeffs)
    return p.trim()


def _arc_rule(n):
    t, w = np.polynomial.legendre.leggauss(n)
    # exact mirror symmetry of the nodes
    t = 0.5 * (t - t[::-1])
    w = 0.5 * (w + w[::-1])
    return 0.5 * math.pi * (t + 1.0), 0.5 * math.pi * w


def _upper_root(z, lo, hi):
    # principal roots of each factor: analytic off [lo, hi] and ~ z at infinity
    return np.sqrt(z - lo) * np.sqrt(z - hi)


class _LimitLaw:
    """Shared machinery; subclasses supply edges, the density kernel and the m-function."""

    def edges(self):
        raise NotImplementedError

    def _kernel(self, x, one_minus_x):
        """Density divided by sqrt((x - lo)(hi - x))."""
        raise NotImplementedError

    def _m_from_root(self, z, root):
        raise NotImplementedError

    def jacobi_entries(self):
        """Return ``(a_1, b_1, a, b)``: first and repeated entries of the limit Jacobi matrix."""
        raise NotImplementedError

    @property
    def support(self):
        return self.edges()

    def density(self, x):
        lo, hi = self.edges()
        arr = np.asarray(x, dtype=float)
        out = np.zeros_like(arr)
        inside = (arr > lo) & (arr < hi)
        xi = arr[inside]
        out[inside] = self._kernel(xi, 1.0 - xi) * np.sqrt((xi - lo) * (hi - xi))
        return out if arr.ndim else float(out)

    @cached_property
    def _quadrature(self):
        lo, hi = self.edges()
        phi, w = _arc_rule(QUADRATURE_NODES)
        width = hi - lo
        dl = width * np.sin(0.5 * phi) ** 2
        dh = width * np.cos(0.5 * phi) ** 2
        x = lo + dl
        weights = w * self._kernel(x, (1.0 - hi) + dh) * dl * dh
        return x, weights

    def quadrature(self):
        """Nodes and weights with ``sum(w * g(x)) ~ integral of g against the density``."""
        x, w = self._quadrature
        return x.copy(), w.copy()

    def total_mass(self):
        return math.fsum(self._quadrature[1])

    def integrate(self, g):
        """Expectation of the callable ``g`` under the law (quadrature normalized to mass 1)."""
        x, w = self._quadrature
        return math.fsum(w * g(x)) / math.fsum(w)

    def moment(self, k):
        if k < 0 or int(k) != k:
            raise ParameterError(f"moment order must be a nonnegative integer, got {k!r}")
        if k == 0:
            return 1.0
        return self.integrate(lambda x: x ** int(k))

    def expect(self, f):
        """``<law, f>`` for a polynomial ``f``, summed from the moments of its coefficients."""
        p = as_polynomial(f)
        return float(sum(c * self.moment(k) for k, c in enumerate(p.coef) if c != 0.0))

    def stieltjes(self, z):
        """Closed-form m-function ``int dmu(x) / (x - z)`` for ``Im z > 0``."""
        zz = np.asarray(z, dtype=complex)
        if np.any(zz.imag <= 0):
            raise DomainError("stieltjes transform needs Im z > 0")
        lo, hi = self.edges()
        root = _upper_root(zz, lo, hi)
        m = self._m_from_root(zz, root)
        flipped = self._m_from_root(zz, -root)
        m = np.where(m.imag > 0, m, flipped)
        return m if zz.ndim else complex(m)


@dataclass(frozen=True)
class Semicircle(_LimitLaw):
    """Semicircle law on [-2, 2], the spectral measure of the free Jacobi matrix."""

    def edges(self):
        return (-2.0, 2.0)

    def _kernel(self, x, one_minus_x):
        return np.full_like(x, 1.0 / (2.0 * math.pi))

    def _m_from_root(self, z, root):
        # (root - z)/2 = -2/(z + root); take whichever side does not cancel
        direct = np.abs(z - root) >= np.abs(z + root)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(direct, -0.5 * (z - root), -2.0 / (z + root))

    def jacobi_entries(self):
        return (0.0, 1.0, 0.0, 1.0)


@dataclass(frozen=True)
class MarchenkoPastur(_LimitLaw):
    """Marchenko-Pastur law with ratio ``gamma`` in (0, 1)."""

    gamma: float

    def __post_init__(self):
        g = self.gamma
        if not (isinstance(g, (int, float, np.floating)) and math.isfinite(g) and 0.0 < g < 1.0):
            raise ParameterError(f"Marchenko-Pastur gamma must lie in (0, 1), got {g!r}")
        object.__setattr__(self, "gamma", float(g))

    def edges(self):
        r = math.sqrt(self.gamma)
        return ((1.0 - r) ** 2, (1.0 + r) ** 2)

    def _kernel(self, x, one_minus_x):
        return 1.0 / (2.0 * math.pi * self.gamma * x)

    def _m_from_root(self, z, root):
        g = self.gamma
        u = 1.0 - g - z
        # (u + root)(u - root) = 4 g z, so m = 2/(u - root) avoids the cancellation
        direct = np.abs(u + root) >= np.abs(u - root)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(direct, (u + root) / (2.0 * g * z), 2.0 / (u - root))

    def jacobi_entries(self):
        r = math.sqrt(self.gamma)
        return (1.0, r, 1.0 + self.gamma, r)


@dataclass(frozen=True)
class KestenMcKay(_LimitLaw):
    """Kesten-McKay law parameterized by ``kappa_a, kappa_b >= 0``.

    ``kappa_a = kappa_b = 0`` is the arcsine law on [0, 1].
    """

    kappa_a: float = 0.0
    kappa_b: float = 0.0

    def __post_init__(self):
        for name in ("kappa_a", "kappa_b"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float, np.floating)) and math.isfinite(v) and v >= 0.0):
                raise ParameterError(f"{name} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, name, float(v))

    @property
    def _total(self):
        return 2.0 + self.kappa_a + self.kappa_b

    def edges(self):
        ka, kb = self.kappa_a, self.kappa_b
        p = math.sqrt((1.0 + ka) * (1.0 + ka + kb))
        q = math.sqrt(1.0 + kb)
        t = self._total
        return (((p - q) / t) ** 2, ((p + q) / t) ** 2)

    def _kernel(self, x, one_minus_x):
        return self._total / (2.0 * math.pi * x * one_minus_x)

    def _m_from_root(self, z, root):
        ka, kb = self.kappa_a, self.kappa_b
        return ka / (2.0 * z) + kb / (2.0 * (z - 1.0)) - self._total * root / (2.0 * z * (z - 1.0))

    def jacobi_entries(self):
        ka, kb = self.kappa_a, self.kappa_b
        t = self._total
        a1 = (1.0 + ka) / t
        b1 = math.sqrt((1.0 + ka) * (1.0 + kb)) / t**1.5
        a = (1.0 + kb + (1.0 + ka) * (1.0 + ka + kb)) / t**2
        b = math.sqrt((1.0 + ka) * (1.0 + kb) * (1.0 + ka + kb)) / t**2
        return (a1, b1, a, b)


LimitLaw = (Semicircle, MarchenkoPastur, KestenMcKay)


def density(law, x):
    return law.density(x)


def edges(law):
    return law.edges()


def stieltjes(law, z):
    return law.stieltjes(z)


def moment(law, k):
    return law.moment(k)


def variance_functional(law, f):
    """``<law, f^2> - <law, f>^2``, the limiting variance of the scaled linear statistic."""
    p = as_polynomial(f)
    mean = law.expect(p)
    second = law.expect(p * p)
    return max(0.0, second - mean * mean)


def stieltjes_inversion(m_eval, x, eps_schedule):
    """Density estimate ``lim_{eps -> 0} Im m(x + i eps) / pi``.

    ``Im m(x + i eps) / pi`` is evaluated at every eps in the (strictly
    decreasing, positive) schedule and extrapolated to ``eps = 0`` with
    Neville's scheme, i.e. the interpolating polynomial in eps through all
    samples.  For an atomic measure, keep every eps well above the atom
    spacing near ``x``.
    """
    eps = np.asarray(eps_schedule, dtype=float).ravel()
    if eps.size == 0:
        raise ParameterError("eps schedule must be nonempty")
    if not np.all(np.isfinite(eps)) or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise ParameterError(f"eps schedule must be positive and strictly decreasing, got {eps_schedule!r}")
    values = [complex(m_eval(complex(x, e))).imag / math.pi for e in eps]
    table = list(values)
    n = len(table)
    for level in range(1, n):
        for i in range(n - level):
            # P_{i..i+level}(0) from P_{i..i+level-1}(0) and P_{i+1..i+level}(0)
            num = eps[i] * table[i + 1] - eps[i + level] * table[i]
            table[i] = num / (eps[i] - eps[i + level])
    return float(table[0])

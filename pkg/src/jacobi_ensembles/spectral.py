"""Spectral measures of finite Jacobi matrices, plus resolvent and moment oracles."""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from ._tridiag import MAX_SWEEPS, tql_first_row
from .distributions import renormalize_exact
from .ensembles import JacobiMatrix
from .errors import DomainError, NumericalError, ParameterError


_TINY = np.finfo(float).tiny


def _integrate_atoms(atoms, weights, f):
    if isinstance(f, Polynomial):
        # keep the constant term exact: <mu, c> = c for a probability measure
        c0 = f.coef[0]
        rest = f - c0
        if rest.degree() == 0 and rest.coef[0] == 0:
            return float(c0)
        return float(c0 + np.dot(weights, rest(atoms)))
    return float(np.dot(weights, f(atoms)))


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Atomic probability measure ``sum_i w_i delta_{lambda_i}`` with sorted distinct atoms."""

    atoms: np.ndarray
    weights: np.ndarray
    notes: tuple = field(default=())

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float).ravel()
        weights = np.array(self.weights, dtype=float).ravel()
        if atoms.size == 0 or atoms.size != weights.size:
            raise ParameterError("atoms and weights must be nonempty and of equal length")
        if np.any(np.diff(atoms) <= 0):
            raise ParameterError("atoms must be strictly increasing")
        if np.any(weights <= 0):
            raise ParameterError("weights must be strictly positive")
        if abs(math.fsum(weights) - 1.0) > 1e-10:
            raise ParameterError("weights must sum to 1")
        atoms.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self):
        return self.atoms.size

    def integrate(self, f):
        """``<mu, f>`` for a Polynomial or a vectorized callable."""
        return _integrate_atoms(self.atoms, self.weights, f)

    def moment(self, k):
        if k == 0:
            return 1.0
        return float(np.dot(self.weights, self.atoms**k))

    def cdf(self, x):
        cum = np.concatenate(([0.0], np.cumsum(self.weights)))
        return cum[np.searchsorted(self.atoms, x, side="right")]


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Uniform atomic measure ``(1/n) sum_i delta_{lambda_i}`` on sorted eigenvalues."""

    atoms: np.ndarray

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float).ravel()
        if atoms.size == 0:
            raise ParameterError("an empirical measure needs at least one atom")
        if np.any(np.diff(atoms) < 0):
            raise ParameterError("atoms must be sorted ascending")
        atoms.flags.writeable = False
        object.__setattr__(self, "atoms", atoms)

    @property
    def size(self):
        return self.atoms.size

    @property
    def weights(self):
        return np.full(self.atoms.size, 1.0 / self.atoms.size)

    def integrate(self, f):
        if isinstance(f, Polynomial):
            c0 = f.coef[0]
            rest = f - c0
            if rest.degree() == 0 and rest.coef[0] == 0:
                return float(c0)
            return float(c0 + np.mean(rest(self.atoms)))
        return float(np.mean(f(self.atoms)))

    def moment(self, k):
        if k == 0:
            return 1.0
        return float(np.mean(self.atoms**k))

    def cdf(self, x):
        return np.searchsorted(self.atoms, x, side="right") / self.atoms.size


def _separate_ties(lam):
    """Nudge exactly equal neighbours apart by one ulp; returns (atoms, notes)."""
    if lam.size < 2 or np.all(np.diff(lam) > 0):
        return lam, ()
    lam = lam.copy()
    count = 0
    for i in range(1, lam.size):
        if lam[i] <= lam[i - 1]:
            lam[i] = np.nextafter(lam[i - 1], np.inf)
            count += 1
    return lam, (f"{count} tied eigenvalue(s) separated by one ulp",)


def _diagonalize(J, want_vectors):
    n = J.size
    d = np.array(J.diag, dtype=float)
    e = np.zeros(n)
    e[: n - 1] = J.offdiag
    z = np.zeros(n if want_vectors else 0)
    if want_vectors:
        z[0] = 1.0
    info = tql_first_row(d, e, z, MAX_SWEEPS)
    if info:
        raise NumericalError(
            f"tridiagonal QL did not converge for eigenvalue {info} of a size-{n} matrix "
            f"within {MAX_SWEEPS} sweeps",
            size=n,
            index=int(info),
        )
    order = np.argsort(d, kind="stable")
    return d[order], (z[order] if want_vectors else None)


def spectral_measure(J):
    """Spectral measure of ``(J, e_1)``: eigenvalues with squared first eigenvector components."""
    lam, z = _diagonalize(J, True)
    w = z * z
    if not np.all(np.isfinite(w)) or w.sum() <= 0:
        raise NumericalError(f"non-finite spectral weights for a size-{J.size} matrix", size=J.size)
    w = w / w.sum()
    notes = ()
    # weights below rounding of the eigenvector come out as exact zeros; the true
    # weights are positive, so keep the atom with the smallest normal weight
    floored = w < _TINY
    if np.any(floored):
        w[floored] = _TINY
        notes = (f"{int(floored.sum())} weight(s) below double precision floored to {_TINY:g}",)
    w = renormalize_exact(w)
    lam, tie_notes = _separate_ties(lam)
    return SpectralMeasure(lam, w, notes + tie_notes)


def empirical_measure(J):
    """Empirical eigenvalue distribution ``L_n``; skips eigenvector accumulation."""
    lam, _ = _diagonalize(J, False)
    lam, _ = _separate_ties(lam)
    return EmpiricalMeasure(lam)


def moment_oracle(J, k):
    """``J^k(1, 1)`` by ``k`` tridiagonal products, no eigendecomposition."""
    if k < 0 or int(k) != k:
        raise ParameterError(f"k must be a nonnegative integer, got {k!r}")
    # walks of length k from vertex 1 stay within the first k//2 + 1 indices
    size = min(J.size, int(k) // 2 + 1)
    d = J.diag[:size]
    b = J.offdiag[: size - 1]
    v = np.zeros(size)
    v[0] = 1.0
    for _ in range(int(k)):
        out = d * v
        out[:-1] += b * v[1:]
        out[1:] += b * v[:-1]
        v = out
    return float(v[0])


def discrete_m_function(mu, z):
    """``sum_i w_i / (lambda_i - z)`` for ``z`` off the real axis."""
    zz = np.asarray(z, dtype=complex)
    if np.any(zz.imag == 0):
        raise DomainError("the m-function is only evaluated off the real axis")
    w = mu.weights
    lam = mu.atoms
    if zz.ndim == 0:
        return complex(np.sum(w / (lam - zz)))
    return (w[None, :] / (lam[None, :] - zz.ravel()[:, None])).sum(axis=1).reshape(zz.shape)


def truncate_top(J):
    """Remove the first row and column of ``J``."""
    if J.size < 2:
        raise DomainError("cannot truncate a 1x1 Jacobi matrix")
    return JacobiMatrix(J.diag[1:], J.offdiag[1:])

"""Implicit-shift QL iteration for symmetric tridiagonal matrices.

Only the first row of the eigenvector matrix is accumulated (the
Golub-Welsch layout), which is all a spectral measure needs: O(n^2) time
and O(n) memory.
"""

import numpy as np
from numba import njit

MAX_SWEEPS = 50


@njit(cache=True, nogil=True)
def tql_first_row(d, e, z, max_sweeps):
    """Diagonalize in place.

    ``d`` (length n) holds the diagonal and becomes the unsorted eigenvalues;
    ``e`` (length n) holds the off-diagonal in ``e[:n-1]`` and is destroyed;
    ``z`` (length n, or length 0 to skip vectors) starts as ``e_1`` and ends
    as the first components of the orthonormal eigenvectors.

    Returns 0 on success, otherwise the 1-based index of the eigenvalue whose
    iteration count exceeded ``max_sweeps``.
    """
    n = d.shape[0]
    want = z.shape[0] == n
    eps = 2.0**-52
    tiny = 2.2250738585072014e-308
    if n > 0:
        e[n - 1] = 0.0
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                tst = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * tst or abs(e[m]) <= tiny:
                    break
                m += 1
            if m == l:
                break
            if sweeps == max_sweeps:
                return l + 1
            sweeps += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            restarted = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # rotation underflowed: deflate and restart this eigenvalue
                    d[i + 1] -= p
                    e[m] = 0.0
                    restarted = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want:
                    f = z[i + 1]
                    z[i + 1] = s * z[i] + c * f
                    z[i] = c * z[i] - s * f
            if restarted:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0

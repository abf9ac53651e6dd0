"""Independent oracles shared by the unit and acceptance suites.

The eigenvalue oracle never touches the QZ path under test: it samples
det(A - t B) on a circle (plain LU determinants), interpolates the
degree-d characteristic polynomial through a scaled-roots-of-unity
Vandermonde solve, and takes companion-matrix roots.  Kept to small
dimensions where every step is numerically boring.
"""
import numpy as np
from scipy.optimize import linear_sum_assignment


def random_pencil(rng, dim):
    """A generic dense A with a deliberately well-conditioned B."""
    def ortho():
        q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
        return q

    A = rng.normal(size=(dim, dim))
    B = ortho() @ np.diag(rng.uniform(1.0, 2.0, dim)) @ ortho()
    return A, B


def charpoly_eigenvalues(A, B):
    """Roots of det(A - t B) for a nonsingular B, dimension <= ~10."""
    d = A.shape[0]
    smin = np.linalg.svd(B, compute_uv=False)[-1]
    radius = np.linalg.norm(A, 2) / smin + 1.0
    ts = radius * np.exp(2j * np.pi * np.arange(d + 1) / (d + 1))
    dets = np.array([np.linalg.det(A - t * B) for t in ts])
    V = np.vander(ts, d + 1, increasing=True)
    coeffs = np.linalg.solve(V, dets)       # ascending powers, degree exactly d
    return np.roots(coeffs[::-1])


def max_pairing_distance(a, b):
    """Optimal-assignment max |a_i - b_j| between two equal-size complex sets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    assert a.shape == b.shape
    cost = np.abs(a[:, None] - b[None, :])
    ri, ci = linear_sum_assignment(cost)
    return float(cost[ri, ci].max())

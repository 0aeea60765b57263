"""Independent reference computations used only by the tests.

Nothing here calls the distance transforms or the interval machinery of the
package: distances are double loops over cell centers, images are dense
samples, Lipschitz constants are finite differences.
"""
from fractions import Fraction

import numpy as np


def centers(A):
    return A.centers()


def brute_point_distance(p, A):
    c = centers(A)
    p = np.asarray(p, dtype=float).reshape(1, -1)
    return float(np.sqrt(((c - p) ** 2).sum(axis=1)).min())


def brute_one_sided(A, B):
    ca, cb = centers(A), centers(B)
    best = 0.0
    for a in ca:
        d = np.sqrt(((cb - a) ** 2).sum(axis=1)).min()
        best = max(best, float(d))
    return best


def brute_hausdorff(A, B):
    return max(brute_one_sided(A, B), brute_one_sided(B, A))


def sampled_image(f, lo, hi, n=100_001):
    xs = np.linspace(lo, hi, n)
    ys = np.ravel(f(xs))
    return float(ys.min()), float(ys.max())


def finite_difference_lipschitz(f, lo, hi, n=200_001):
    xs = np.linspace(lo, hi, n)
    ys = np.ravel(f(xs))
    return float(np.max(np.abs(np.diff(ys)) / np.diff(xs)))


def cantor_level_intervals(level, lo=Fraction(0), hi=Fraction(1)):
    """Exact middle-thirds level intervals as Fractions."""
    ivs = [(lo, hi)]
    for _ in range(level):
        nxt = []
        for a, b in ivs:
            t = (b - a) / 3
            nxt.extend([(a, a + t), (b - t, b)])
        ivs = nxt
    return ivs


def raster_intervals(grid, intervals):
    """Cells whose closed extent meets one of the intervals (pure-Python outer cover)."""
    n = grid.resolution[0]
    lo = grid.domain.lower[0]
    w = (grid.domain.upper[0] - lo) / n
    mask = np.zeros(n, dtype=bool)
    for a, b in intervals:
        i0 = int(np.floor((float(a) - lo) / w + 1e-9))
        i1 = max(int(np.ceil((float(b) - lo) / w - 1e-9)) - 1, i0)
        mask[max(i0, 0):min(i1, n - 1) + 1] = True
    return mask


def pwl_exact(vertices):
    """Exact rational evaluation of a piecewise-linear map."""
    vs = [(Fraction(x), Fraction(y)) for x, y in vertices]

    def f(x):
        x = Fraction(x)
        for (x0, y0), (x1, y1) in zip(vs, vs[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        raise ValueError("outside")
    return f


def exact_image(fs, word, lo=Fraction(0), hi=Fraction(1)):
    """Image of [lo, hi] under the coding-order composition, for monotone-piece maps
    given as exact callables with their kink lists: fs[i] = (callable, kinks)."""
    a, b = lo, hi
    for s in reversed(word):
        f, kinks = fs[s - 1]
        pts = [a, b] + [k for k in kinks if a < k < b]
        vals = [f(p) for p in pts]
        a, b = min(vals), max(vals)
    return a, b

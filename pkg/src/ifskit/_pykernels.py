"""Pure-Python/numpy twins of the compiled kernels in ``_core``.

``run_orbit`` mirrors the compiled loop operation for operation so both
backends return bit-identical orbits.
"""
from bisect import bisect_right

import numpy as np
from scipy import ndimage


def edt_1d(mask, h):
    mask = np.asarray(mask, dtype=bool)
    n = mask.shape[0]
    idx = np.flatnonzero(mask)
    out = np.full(n, np.inf)
    if idx.size == 0:
        return out
    q = np.arange(n)
    pos = np.searchsorted(idx, q)
    right = idx[np.minimum(pos, idx.size - 1)]
    left = idx[np.maximum(pos - 1, 0)]
    dr = np.where(right >= q, (right - q) * h, np.inf)
    dl = np.where(left <= q, (q - left) * h, np.inf)
    return np.minimum(dl, dr)


def edt_2d(mask, hx, hy):
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return np.full(mask.shape, np.inf)
    return ndimage.distance_transform_edt(~mask, sampling=(hx, hy))


def _clip(x, lo, hi):
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


def run_orbit(x0, symbols, codes, pstart, nvert, params, mstart, mend, lower, upper):
    d = len(x0)
    n = len(symbols)
    params = [float(p) for p in params]
    codes = [int(c) for c in codes]
    pstart = [int(c) for c in pstart]
    nvert = [int(c) for c in nvert]
    ops = [range(int(a), int(b)) for a, b in zip(mstart, mend)]
    xs_cache = {}
    for op, code in enumerate(codes):
        if code == 1:
            base, m = pstart[op], nvert[op] - 1
            xs_cache[op] = params[base:base + m + 1]
    lo0, hi0 = float(lower[0]), float(upper[0])
    lo1 = float(lower[1]) if d == 2 else 0.0
    hi1 = float(upper[1]) if d == 2 else 0.0
    out = np.empty((n + 1, d))
    x = float(x0[0])
    y = float(x0[1]) if d == 2 else 0.0
    xs_out = [0.0] * (n + 1)
    ys_out = [0.0] * (n + 1)
    xs_out[0], ys_out[0] = x, y
    for step, s in enumerate(symbols.tolist() if hasattr(symbols, "tolist") else symbols):
        for op in ops[s]:
            base = pstart[op]
            code = codes[op]
            if code == 0:
                if d == 1:
                    x = params[base] * x + params[base + 1]
                else:
                    nx = params[base] * x + params[base + 1] * y + params[base + 4]
                    ny = params[base + 2] * x + params[base + 3] * y + params[base + 5]
                    x, y = nx, ny
            elif code == 1:
                m = nvert[op] - 1
                j = bisect_right(xs_cache[op], x) - 1
                if j >= m:
                    x = params[base + m + 1 + m]
                elif j < 0:
                    x = params[base + m + 1]
                else:
                    x = params[base + m + 1 + j] + (x - params[base + j]) * params[base + 2 * (m + 1) + j]
            else:
                x = params[base] * x * x + params[base + 1] * x + params[base + 2]
            x = _clip(x, lo0, hi0)
            if d == 2:
                y = _clip(y, lo1, hi1)
        xs_out[step + 1] = x
        ys_out[step + 1] = y
    out[:, 0] = xs_out
    if d == 2:
        out[:, 1] = ys_out
    return out

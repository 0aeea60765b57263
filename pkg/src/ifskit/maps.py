"""Evaluable continuous self-maps of a box domain and the IFS that bundles them.

Four map families are supported: :class:`Affine` (1D or 2D),
:class:`PiecewiseLinear1D`, :class:`Quadratic1D` and :class:`Composite`.  Each
answers three queries, all vectorized over arrays of shape ``(N, d)``:

* point evaluation,
* an enclosure of the image of a box (exact for every 1D family),
* an upper bound for the Lipschitz constant on a box.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .sets import Box, BoxDomain, GridSet, make_grid

AFFINE, PWL, QUAD = 0, 1, 2


def _as_points(x, dim):
    arr = np.asarray(x, dtype=float)
    if dim == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr.reshape(-1, 1)
    return np.atleast_2d(arr)


class MapDescriptor:
    """Base class; subclasses are frozen dataclasses compared by parameters."""

    dim = 1

    def primitives(self):
        """Non-composite constituents in application order."""
        return [self]

    def evaluate(self, x, lower=None, upper=None):
        """Evaluate on points ``(N, d)``; clip to ``[lower, upper]`` after every primitive."""
        x = _as_points(x, self.dim)
        for p in self.primitives():
            x = p._eval(x)
            if lower is not None:
                x = np.clip(x, lower, upper)
        return x

    def __call__(self, x):
        out = self.evaluate(x)
        if np.ndim(x) == 0:
            return float(out[0, 0])
        return out

    def image_bounds(self, lo, hi):
        """Vectorized enclosure of the images of boxes ``[lo[i], hi[i]]``."""
        raise NotImplementedError

    def kinks(self):
        """Interior points of R where monotonicity or smoothness may change (1D)."""
        return ()

    def lipschitz_on(self, lo, hi):
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class Affine(MapDescriptor):
    """``x -> matrix @ x + offset``.  In 1D, scalars are accepted."""

    matrix: tuple
    offset: tuple

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        b = np.atleast_1d(np.asarray(self.offset, dtype=float))
        if m.shape != (b.size, b.size) or b.size not in (1, 2):
            raise ValueError(f"affine map needs a d x d matrix and d offsets, got {m.shape} and {b.size}")
        object.__setattr__(self, "matrix", tuple(tuple(float(v) for v in row) for row in m))
        object.__setattr__(self, "offset", tuple(float(v) for v in b))

    @property
    def dim(self):
        return len(self.offset)

    @property
    def A(self):
        return np.array(self.matrix)

    @property
    def b(self):
        return np.array(self.offset)

    def _eval(self, x):
        if self.dim == 1:
            return self.matrix[0][0] * x + self.offset[0]
        (a11, a12), (a21, a22) = self.matrix
        out = np.empty_like(x)
        out[:, 0] = a11 * x[:, 0] + a12 * x[:, 1] + self.offset[0]
        out[:, 1] = a21 * x[:, 0] + a22 * x[:, 1] + self.offset[1]
        return out

    def image_bounds(self, lo, hi):
        lo, hi = np.asarray(lo, float), np.asarray(hi, float)
        if self.dim == 1:
            a, b = self.matrix[0][0], self.offset[0]
            u, v = a * lo + b, a * hi + b
            return np.minimum(u, v), np.maximum(u, v)
        c = (lo + hi) / 2
        r = (hi - lo) / 2
        cc = c @ self.A.T + self.b
        rr = r @ np.abs(self.A).T
        return cc - rr, cc + rr

    def lipschitz_on(self, lo, hi):
        return float(np.linalg.norm(self.A, 2))

    def params(self):
        return [v for row in self.matrix for v in row] + list(self.offset)


@dataclass(frozen=True, eq=True)
class PiecewiseLinear1D(MapDescriptor):
    """Linear interpolation through ``vertices``; x-coordinates strictly increasing."""

    vertices: tuple

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise ValueError("piecewise-linear map needs at least two (x, y) vertices")
        if np.any(np.diff(v[:, 0]) <= 0):
            raise ValueError("piecewise-linear vertices need strictly increasing x")
        object.__setattr__(self, "vertices", tuple((float(a), float(b)) for a, b in v))

    @property
    def xs(self):
        return np.array([p[0] for p in self.vertices])

    @property
    def ys(self):
        return np.array([p[1] for p in self.vertices])

    @property
    def slopes(self):
        xs, ys = self.xs, self.ys
        return (ys[1:] - ys[:-1]) / (xs[1:] - xs[:-1])

    def _eval(self, x):
        xs, ys, sl = self.xs, self.ys, self.slopes
        m = len(xs) - 1
        j = np.searchsorted(xs, x, side="right") - 1
        jc = np.clip(j, 0, m - 1)
        y = ys[jc] + (x - xs[jc]) * sl[jc]
        y = np.where(j >= m, ys[m], y)
        return np.where(j < 0, ys[0], y)

    def image_bounds(self, lo, hi):
        lo, hi = np.asarray(lo, float), np.asarray(hi, float)
        u, v = self._eval(lo), self._eval(hi)
        mn, mx = np.minimum(u, v), np.maximum(u, v)
        for xv, yv in self.vertices[1:-1]:
            inside = (lo < xv) & (xv < hi)
            mn = np.where(inside, np.minimum(mn, yv), mn)
            mx = np.where(inside, np.maximum(mx, yv), mx)
        return mn, mx

    def kinks(self):
        return tuple(self.xs[1:-1])

    def lipschitz_on(self, lo, hi):
        lo, hi = float(np.ravel(lo)[0]), float(np.ravel(hi)[0])
        xs, sl = self.xs, np.abs(self.slopes)
        tol = 1e-12 * (xs[-1] - xs[0])
        if hi - lo <= tol:
            # degenerate box: the pieces touching the point
            touch = (xs[:-1] <= hi + tol) & (xs[1:] >= lo - tol)
        else:
            touch = (xs[:-1] < hi - tol) & (xs[1:] > lo + tol)
        if not touch.any():  # outside the vertex range: constant extension
            return 0.0
        return float(sl[touch].max())


@dataclass(frozen=True, eq=True)
class Quadratic1D(MapDescriptor):
    """``x -> a x^2 + b x + c``."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def _eval(self, x):
        return self.a * x * x + self.b * x + self.c

    @property
    def critical_point(self):
        return None if self.a == 0 else -self.b / (2 * self.a)

    def image_bounds(self, lo, hi):
        lo, hi = np.asarray(lo, float), np.asarray(hi, float)
        u, v = self._eval(lo), self._eval(hi)
        mn, mx = np.minimum(u, v), np.maximum(u, v)
        cp = self.critical_point
        if cp is not None:
            inside = (lo < cp) & (cp < hi)
            yv = self._eval(np.float64(cp))
            mn = np.where(inside, np.minimum(mn, yv), mn)
            mx = np.where(inside, np.maximum(mx, yv), mx)
        return mn, mx

    def kinks(self):
        cp = self.critical_point
        return () if cp is None else (cp,)

    def lipschitz_on(self, lo, hi):
        lo, hi = float(np.ravel(lo)[0]), float(np.ravel(hi)[0])
        return float(max(abs(2 * self.a * lo + self.b), abs(2 * self.a * hi + self.b)))


@dataclass(frozen=True, eq=True)
class Composite(MapDescriptor):
    """``maps[0] o maps[1] o ... o maps[-1]``: the last map is applied first."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("composite of no maps")
        dims = {m.dim for m in maps}
        if len(dims) != 1:
            raise ValueError("composite mixes dimensions")
        object.__setattr__(self, "maps", maps)

    @property
    def dim(self):
        return self.maps[0].dim

    def primitives(self):
        out = []
        for m in reversed(self.maps):
            out.extend(m.primitives())
        return out

    def _collapsed_affine(self):
        A, b = np.eye(self.dim), np.zeros(self.dim)
        for p in self.primitives():
            A, b = p.A @ A, p.A @ b + p.b
        return Affine(A, b)

    def _all_affine(self):
        return all(isinstance(p, Affine) for p in self.primitives())

    def image_bounds(self, lo, hi):
        if self.dim == 2:
            if not self._all_affine():
                raise ValueError("2D composites support affine constituents only")
            return self._collapsed_affine().image_bounds(lo, hi)
        lo, hi = np.asarray(lo, float), np.asarray(hi, float)
        for p in self.primitives():
            lo, hi = p.image_bounds(lo, hi)
        return lo, hi

    def lipschitz_on(self, lo, hi):
        if self.dim == 2:
            return self._collapsed_affine().lipschitz_on(lo, hi)
        lo, hi = float(np.ravel(lo)[0]), float(np.ravel(hi)[0])
        prims = self.primitives()
        pts = monotone_partition(prims, lo, hi)
        best = 0.0
        for s, t in zip(pts[:-1], pts[1:]):
            a = np.array([[s]])
            b = np.array([[t]])
            prod = 1.0
            for p in prims:
                prod *= p.lipschitz_on(a, b)
                a, b = p.image_bounds(a, b)
            best = max(best, prod)
        return best


def monotone_partition(prims, lo, hi, bisect_tol=1e-15):
    """Split ``[lo, hi]`` so that, on every piece, each primitive in the chain
    acts on a single smooth monotone piece of itself.

    Kinks of a later primitive are pulled back through the (monotone) partial
    composition by bisection.
    """
    pts = [lo, hi] if hi > lo else [lo, hi]
    partial = []
    for p in prims:
        knots = p.kinks()
        if knots and hi > lo:
            new = set(pts)
            for s, t in zip(pts[:-1], pts[1:]):
                hs, ht = _chain(partial, s), _chain(partial, t)
                for c in knots:
                    if min(hs, ht) < c < max(hs, ht):
                        new.add(_pullback(partial, c, s, t, hs < ht, bisect_tol))
            pts = sorted(new)
        partial.append(p)
    return pts


def _chain(prims, x):
    v = np.array([[x]])
    for p in prims:
        v = p._eval(v)
    return float(v[0, 0])


def _pullback(prims, c, s, t, increasing, tol):
    a, b = s, t
    while b - a > tol * max(1.0, abs(a)):
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        if (_chain(prims, mid) < c) == increasing:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


# -- module-level operations -------------------------------------------------
def eval_map(f, p, domain=None):
    """Exact evaluation of ``f`` at ``p``; composites apply right-to-left."""
    if domain is not None:
        p = domain.check_point(p)
    out = f.evaluate(p)
    if f.dim == 1 and np.ndim(p) <= 1 and np.size(p) == 1:
        return float(out[0, 0])
    return out[0] if np.ndim(p) == 1 else out


def interval_image(f, box, domain=None):
    """Box enclosing ``f(box)``."""
    if domain is not None:
        domain.check_box(box)
    lo, hi = f.image_bounds(box.lo[None, :], box.hi[None, :])
    return Box(lo[0], hi[0])


def lipschitz_bound(f, box, domain=None):
    """Upper bound on the Lipschitz constant of ``f`` restricted to ``box``."""
    if domain is not None:
        domain.check_box(box)
    return f.lipschitz_on(box.lo, box.hi)


def image_of_gridset(f, A):
    """Outer raster of ``f(A)``: union over set cells of their rasterized interval images."""
    lo, hi = _cell_image_bounds(f, A)
    return GridSet(A.grid, A.grid.box_mask(lo, hi))


def _cell_image_bounds(f, A):
    g = A.grid
    idx = A.cells()
    lo = g.domain.lo + idx * g.cell_size
    hi = g.domain.lo + (idx + 1) * g.cell_size
    return f.image_bounds(lo, hi)


def local_slope(f, x, delta=1e-7):
    """Secant slope of a 1D map on ``[x - delta, x + delta]`` (one-sided at edges)."""
    a, b = x - delta, x + delta
    return (f(b) - f(a)) / (b - a)


def fixed_points_1d(f, lo, hi, samples=20001):
    """Fixed points of a 1D map on ``[lo, hi]`` from sign changes of ``f(x) - x``.

    Exact zeros at sample points (including the endpoints) are reported as is;
    sign changes between samples are refined with Brent's method.
    """
    xs = np.unique(np.concatenate([np.linspace(lo, hi, samples),
                                   [k for k in _all_kinks(f) if lo < k < hi]]))
    g = f.evaluate(xs).ravel() - xs
    roots = list(xs[g == 0.0])
    sign = np.sign(g)
    for i in np.flatnonzero(sign[:-1] * sign[1:] < 0):
        roots.append(brentq(lambda t: f(t) - t, xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15))
    return sorted(float(r) for r in roots)


def _all_kinks(f):
    out = []
    for p in f.primitives():
        out.extend(p.kinks())
    return out


# -- the IFS ---------------------------------------------------------------
class IFSystem:
    """``k >= 1`` continuous self-maps of a common box domain, with optional weights.

    Construction checks, cell by cell on a validation grid, that every map's
    image enclosure stays inside the domain.
    """

    def __init__(self, domain, maps, weights=None, names=None, check_resolution=None):
        if not isinstance(domain, BoxDomain):
            domain = BoxDomain(*domain)
        maps = tuple(maps)
        if not maps:
            raise ValueError("an IFS needs at least one map")
        for m in maps:
            if m.dim != domain.dimension:
                raise DomainError(f"map {m} has dimension {m.dim}, domain has {domain.dimension}")
        if weights is not None:
            weights = tuple(float(w) for w in weights)
            if len(weights) != len(maps):
                raise ValueError(f"{len(weights)} weights for {len(maps)} maps")
            if any(w <= 0 for w in weights):
                raise ValueError(f"weights must be strictly positive, got {weights}")
            if abs(sum(weights) - 1.0) > 1e-12:
                raise ValueError(f"weights sum {sum(weights):.12g}, expected 1")
        self.domain = domain
        self.maps = maps
        self.weights = weights
        self.names = tuple(names) if names is not None else tuple(f"f{i + 1}" for i in range(len(maps)))
        self._validate(check_resolution)

    def _validate(self, resolution):
        if resolution is None:
            resolution = 1024 if self.dimension == 1 else 64
        grid = make_grid(self.domain.lower, self.domain.upper, resolution)
        A = grid.full()
        tol = self.domain.tolerance()
        for name, f in zip(self.names, self.maps):
            lo, hi = _cell_image_bounds(f, A)
            bad = np.any(lo < self.domain.lo - tol, axis=1) | np.any(hi > self.domain.hi + tol, axis=1)
            if bad.any():
                cell = A.cells()[np.argmax(bad)]
                raise DomainError(f"map {name} sends cell {grid.cell_box(cell)!r} outside {self.domain!r}")

    @property
    def k(self):
        return len(self.maps)

    @property
    def dimension(self):
        return self.domain.dimension

    def apply(self, symbol, x):
        """Apply map ``symbol`` (1-based) to points, clipping to the domain."""
        return self.maps[symbol - 1].evaluate(x, self.domain.lo, self.domain.hi)

    def __eq__(self, other):
        if not isinstance(other, IFSystem):
            return NotImplemented
        return (self.domain == other.domain and self.maps == other.maps
                and self.weights == other.weights)

    __hash__ = None

    def __repr__(self):
        return f"IFSystem(k={self.k}, domain={self.domain!r}, maps={list(self.names)})"

    def program(self):
        """Flat encoding of all maps for the orbit kernel."""
        codes, pstart, nvert, params, mstart, mend = [], [], [], [], [], []
        for f in self.maps:
            mstart.append(len(codes))
            for p in f.primitives():
                pstart.append(len(params))
                if isinstance(p, Affine):
                    codes.append(AFFINE)
                    nvert.append(0)
                    params.extend(p.params())
                elif isinstance(p, PiecewiseLinear1D):
                    codes.append(PWL)
                    nvert.append(len(p.vertices))
                    params.extend(p.xs.tolist() + p.ys.tolist() + p.slopes.tolist())
                else:
                    codes.append(QUAD)
                    nvert.append(0)
                    params.extend([p.a, p.b, p.c])
            mend.append(len(codes))
        i64 = np.int64
        return (np.array(codes, i64), np.array(pstart, i64), np.array(nvert, i64),
                np.array(params, float), np.array(mstart, i64), np.array(mend, i64))


# -- textual grammar ---------------------------------------------------------
def format_number(v):
    """Shortest text that parses back to exactly ``v``; small fractions stay readable."""
    v = float(v)
    if v == int(v):
        return str(int(v))
    text = repr(v)
    if len(text) <= 10:
        return text
    fr = Fraction(v).limit_denominator(1000)
    if float(fr) == v:
        return f"{fr.numerator}/{fr.denominator}"
    return text


def map_to_grammar(f, names=None):
    if isinstance(f, Affine):
        return "affine " + " ".join(format_number(v) for v in f.params())
    if isinstance(f, PiecewiseLinear1D):
        return "pwl " + " ".join(f"({format_number(x)},{format_number(y)})" for x, y in f.vertices)
    if isinstance(f, Quadratic1D):
        return f"quad {format_number(f.a)} {format_number(f.b)} {format_number(f.c)}"
    if isinstance(f, Composite):
        if names is None:
            raise ValueError("composites are written by referencing named maps")
        return "compose " + " ".join(names[id(m)] for m in f.maps)
    raise TypeError(f"unknown map {f!r}")

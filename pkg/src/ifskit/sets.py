"""Discretized non-empty compact sets on a uniform grid over a box domain.

A :class:`GridSet` is a boolean cell bitmap.  All distances are measured
between cell centers, so every equality that involves a distance carries a
tolerance of one grid unit (:attr:`Grid.unit`: the cell width in 1D, the cell
diagonal in 2D).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError, EmptySetError, IncompatibleGridError, NotNestedError, PreconditionError

# Interval endpoints closer than this (in cell units) to a cell boundary are
# snapped onto it, so rounding noise never adds a neighbouring cell.
SNAP = 1e-9


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box; degenerate extents are allowed."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) != len(hi):
            raise ValueError("lower and upper must have the same length")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"inverted box {lo} > {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dimension(self):
        return len(self.lower)

    @property
    def lo(self):
        return np.array(self.lower)

    @property
    def hi(self):
        return np.array(self.upper)

    @property
    def widths(self):
        return self.hi - self.lo

    @property
    def diameter(self):
        return float(np.hypot.reduce(self.widths)) if self.dimension > 1 else float(self.widths[0])

    @property
    def center(self):
        return (self.lo + self.hi) / 2

    def contains_point(self, p, atol=0.0):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        return bool(np.all(p >= self.lo - atol) and np.all(p <= self.hi + atol))

    def contains(self, other, atol=0.0):
        return bool(np.all(other.lo >= self.lo - atol) and np.all(other.hi <= self.hi + atol))

    def __repr__(self):
        if self.dimension == 1:
            return f"Box([{self.lower[0]!r}, {self.upper[0]!r}])"
        return f"Box({list(self.lower)!r}, {list(self.upper)!r})"


class BoxDomain(Box):
    """The ambient compact space: a non-degenerate box in R^1 or R^2."""

    def __post_init__(self):
        super().__post_init__()
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if any(a >= b for a, b in zip(self.lower, self.upper)):
            raise ValueError(f"domain needs lower < upper on every axis, got {self.lower}, {self.upper}")

    def tolerance(self):
        """Absolute slack used when checking that computed values stay inside."""
        return 1e-12 * float(np.max(self.widths))

    def check_point(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        if p.shape[-1] != self.dimension:
            raise DomainError(f"point {p} has wrong dimension for {self!r}")
        tol = self.tolerance()
        if np.any(p < self.lo - tol) or np.any(p > self.hi + tol):
            raise DomainError(f"point {p.tolist()} outside domain {self!r}")
        return np.clip(p, self.lo, self.hi)

    def check_box(self, box):
        if box.dimension != self.dimension or not self.contains(box, atol=self.tolerance()):
            raise DomainError(f"box {box!r} outside domain {self!r}")
        return box

    def __repr__(self):
        if self.dimension == 1:
            return f"BoxDomain([{self.lower[0]!r}, {self.upper[0]!r}])"
        return f"BoxDomain({list(self.lower)!r}, {list(self.upper)!r})"


@dataclass(frozen=True)
class Grid:
    """Uniform cell grid on a domain."""

    domain: BoxDomain
    resolution: tuple

    def __post_init__(self):
        res = tuple(int(r) for r in np.atleast_1d(self.resolution))
        if len(res) == 1 and self.domain.dimension == 2:
            res = res * 2
        if len(res) != self.domain.dimension:
            raise ValueError(f"resolution {res} does not match dimension {self.domain.dimension}")
        if any(r < 1 for r in res):
            raise ValueError(f"resolution must be positive, got {res}")
        object.__setattr__(self, "resolution", res)

    @property
    def dimension(self):
        return self.domain.dimension

    @property
    def shape(self):
        return self.resolution

    @property
    def cell_size(self):
        return self.domain.widths / np.array(self.resolution)

    @property
    def cell_width(self):
        return float(np.max(self.cell_size))

    @property
    def cell_diagonal(self):
        return float(np.hypot.reduce(self.cell_size)) if self.dimension > 1 else float(self.cell_size[0])

    @property
    def unit(self):
        """One-cell tolerance: cell width in 1D, cell diagonal in 2D."""
        return self.cell_diagonal

    def centers(self, idx):
        """Centers of the cells with integer indices ``idx`` of shape (N, d)."""
        idx = np.asarray(idx)
        return self.domain.lo + (idx + 0.5) * self.cell_size

    def cell_of(self, points):
        """Index of the cell containing each point; boundary points go to the upper cell."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[-1] != self.dimension and self.dimension == 1:
            pts = pts.reshape(-1, 1)
        t = (pts - self.domain.lo) / self.cell_size
        idx = np.floor(t + SNAP).astype(np.int64)
        return np.clip(idx, 0, np.array(self.resolution) - 1)

    def cell_box(self, idx):
        idx = np.asarray(idx)
        lo = self.domain.lo + idx * self.cell_size
        return Box(lo, lo + self.cell_size)

    def check_compatible(self, other):
        if self != other:
            raise IncompatibleGridError(f"grids differ: {self} vs {other}")

    # -- constructors ---------------------------------------------------
    def full(self):
        return GridSet(self, np.ones(self.resolution, dtype=bool))

    def from_mask(self, mask):
        return GridSet(self, mask)

    def from_points(self, points):
        """Rasterize a finite point set (each point sets its containing cell)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.dimension == 1:
            pts = pts.reshape(-1, 1)
        self.domain.check_point(pts)
        mask = np.zeros(self.resolution, dtype=bool)
        mask[tuple(self.cell_of(pts).T)] = True
        return GridSet(self, mask)

    def singleton(self, point):
        return self.from_points([np.atleast_1d(point)])

    def box_mask(self, lo, hi):
        """Bitmap of the union of the closed boxes ``[lo[i], hi[i]]`` (outer cover).

        A cell is set when the box meets its interior; a degenerate box sets
        the cell containing it.
        """
        lo = np.asarray(lo, dtype=float).reshape(-1, self.dimension)
        hi = np.asarray(hi, dtype=float).reshape(-1, self.dimension)
        res = np.array(self.resolution)
        tl = (lo - self.domain.lo) / self.cell_size
        th = (hi - self.domain.lo) / self.cell_size
        i0 = np.floor(tl + SNAP).astype(np.int64)
        i1 = np.ceil(th - SNAP).astype(np.int64) - 1
        i1 = np.maximum(i1, i0)
        i0 = np.clip(i0, 0, res - 1)
        i1 = np.clip(i1, 0, res - 1)
        if self.dimension == 1:
            n = res[0]
            diff = np.bincount(i0[:, 0], minlength=n + 1) - np.bincount(i1[:, 0] + 1, minlength=n + 1)
            return np.cumsum(diff[:n]) > 0
        nx, ny = res
        w = ny + 1
        flat = np.concatenate([
            i0[:, 0] * w + i0[:, 1],
            (i1[:, 0] + 1) * w + (i1[:, 1] + 1),
            i0[:, 0] * w + (i1[:, 1] + 1),
            (i1[:, 0] + 1) * w + i0[:, 1],
        ])
        weights = np.repeat([1.0, 1.0, -1.0, -1.0], len(i0))
        diff = np.bincount(flat, weights=weights, minlength=(nx + 1) * w).reshape(nx + 1, w)
        return np.cumsum(np.cumsum(diff, axis=0), axis=1)[:nx, :ny] > 0.5

    def from_boxes(self, lo, hi):
        return GridSet(self, self.box_mask(lo, hi))

    def from_intervals(self, intervals):
        """1D convenience: rasterize a list of ``(a, b)`` intervals."""
        arr = np.asarray(intervals, dtype=float).reshape(-1, 2)
        return self.from_boxes(arr[:, :1], arr[:, 1:])


def make_grid(lower, upper, resolution):
    return Grid(BoxDomain(lower, upper), resolution)


class GridSet:
    """Immutable non-empty set of grid cells, standing in for an element of H(X)."""

    __slots__ = ("grid", "bitmap", "_field", "_cells")

    def __init__(self, grid, bitmap):
        bm = np.array(bitmap, dtype=bool, copy=True).reshape(grid.resolution)
        if not bm.any():
            raise EmptySetError("grid set would be empty")
        bm.setflags(write=False)
        self.grid = grid
        self.bitmap = bm
        self._field = None
        self._cells = None

    @property
    def domain(self):
        return self.grid.domain

    @property
    def resolution(self):
        return self.grid.resolution

    @property
    def count(self):
        return int(self.bitmap.sum())

    def cells(self):
        """Integer indices of set cells, shape (N, d), in C order."""
        if self._cells is None:
            c = np.argwhere(self.bitmap)
            c.setflags(write=False)
            self._cells = c
        return self._cells

    def centers(self):
        return self.grid.centers(self.cells())

    def contains_point(self, p):
        idx = self.grid.cell_of(self.domain.check_point(p))[0]
        return bool(self.bitmap[tuple(idx)])

    def distance_field(self):
        """Distance from every cell center to the nearest set-cell center (cached)."""
        if self._field is None:
            h = self.grid.cell_size
            if self.grid.dimension == 1:
                f = kernels.edt_1d(self.bitmap, h[0])
            else:
                f = kernels.edt_2d(self.bitmap, h[0], h[1])
            f.setflags(write=False)
            self._field = f
        return self._field

    def diameter(self):
        """Max pairwise center distance plus one cell diagonal (an outer bound)."""
        c = self.centers()
        if len(c) == 1:
            span = 0.0
        elif self.grid.dimension == 1:
            span = float(c[-1, 0] - c[0, 0])
        else:
            span = _planar_span(c)
        return span + self.grid.cell_diagonal

    # -- set algebra ----------------------------------------------------
    def _other(self, other):
        if not isinstance(other, GridSet):
            return NotImplemented
        self.grid.check_compatible(other.grid)
        return other

    def __or__(self, other):
        other = self._other(other)
        return GridSet(self.grid, self.bitmap | other.bitmap)

    def __and__(self, other):
        other = self._other(other)
        return GridSet(self.grid, self.bitmap & other.bitmap)

    def issubset(self, other):
        other = self._other(other)
        return not bool(np.any(self.bitmap & ~other.bitmap))

    __le__ = issubset

    def __eq__(self, other):
        if not isinstance(other, GridSet):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.bitmap, other.bitmap)

    __hash__ = None

    def __repr__(self):
        return f"GridSet({self.count} cells on {self.grid.resolution} over {self.domain!r})"


def _planar_span(c):
    from scipy.spatial import ConvexHull, QhullError
    from scipy.spatial.distance import pdist

    pts = c
    if len(c) > 3:
        try:
            pts = c[ConvexHull(c).vertices]
        except QhullError:  # collinear cells
            lo, hi = np.argmin(c @ [1.0, 0.5]), np.argmax(c @ [1.0, 0.5])
            return float(np.hypot(*(c[hi] - c[lo])))
    return float(pdist(pts).max())


def union_all(sets):
    sets = list(sets)
    if not sets:
        raise EmptySetError("union of no sets")
    bm = sets[0].bitmap.copy()
    for s in sets[1:]:
        sets[0].grid.check_compatible(s.grid)
        bm |= s.bitmap
    return GridSet(sets[0].grid, bm)


# -- metrics ---------------------------------------------------------------
def point_set_distance(p, A):
    """Euclidean distance from ``p`` to the nearest set-cell center of ``A``."""
    p = A.domain.check_point(p)
    return float(np.sqrt(np.min(np.sum((A.centers() - p) ** 2, axis=1))))


def one_sided(A, B):
    """``sup_{a in A} d(a, B)`` over cell centers; note the asymmetry."""
    A.grid.check_compatible(B.grid)
    return float(np.max(B.distance_field()[A.bitmap]))


def hausdorff(A, B):
    return max(one_sided(A, B), one_sided(B, A))


def dilate(A, eps):
    """Closed ``eps``-neighbourhood of ``A`` within the domain, as a grid set."""
    if eps < A.grid.cell_width * (1 - 1e-12):
        raise PreconditionError(f"dilation radius {eps} is below one cell width {A.grid.cell_width}")
    return GridSet(A.grid, A.distance_field() <= eps * (1 + 1e-12))


# -- convergence bookkeeping ----------------------------------------------
class Status(str, enum.Enum):
    CONVERGED = "Converged"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    DIVERGED = "Diverged"

    def __str__(self):
        return self.value


@dataclass
class ConvergenceReport:
    """Per-step distance trace of an iteration.

    Each record is ``(step, d_H, h_forward, h_backward)``.  What the distances
    are measured against (successive iterates, or a fixed reference) is stated
    by ``against``.
    """

    iterations: list
    status: Status
    final_set: GridSet
    tol: float = math.inf
    against: str = "previous"
    sets: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not self.iterations:
            raise ValueError("a convergence report needs at least one record")
        steps = [r[0] for r in self.iterations]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise ValueError("step indices must be strictly increasing")

    @property
    def steps(self):
        return [r[0] for r in self.iterations]

    @property
    def hausdorff_trace(self):
        return [r[1] for r in self.iterations]

    @property
    def forward_trace(self):
        return [r[2] for r in self.iterations]

    @property
    def backward_trace(self):
        return [r[3] for r in self.iterations]

    @property
    def last(self):
        return self.iterations[-1]

    @property
    def converged(self):
        return self.status is Status.CONVERGED

    def to_csv(self):
        lines = ["step,hausdorff,h_forward,h_backward"]
        for step, dh, fw, bw in self.iterations:
            lines.append(f"{step},{dh:.17g},{fw:.17g},{bw:.17g}")
        return "\n".join(lines) + "\n"


def nested_limit(sets, tol=None):
    """Intersection of a decreasing family together with its d_H trace toward it.

    Raises :class:`NotNestedError` naming the first step whose set is not
    contained in its predecessor.
    """
    sets = list(sets)
    if not sets:
        raise ValueError("nested_limit needs at least one set")
    for i in range(1, len(sets)):
        if not sets[i].issubset(sets[i - 1]):
            raise NotNestedError(i)
    limit = sets[-1]
    records = []
    for i, s in enumerate(sets):
        fw, bw = one_sided(s, limit), one_sided(limit, s)
        records.append((i, max(fw, bw), fw, bw))
    tol = limit.grid.unit if tol is None else tol
    status = Status.CONVERGED if records[-1][1] <= tol else Status.BUDGET_EXHAUSTED
    return limit, ConvergenceReport(records, status, limit, tol=tol, against="limit")

"""The Barnsley-Hutchinson operator ``B(A) = f_1(A) u ... u f_k(A)`` on grid sets."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .maps import _cell_image_bounds
from .sets import ConvergenceReport, GridSet, Status, hausdorff, nested_limit, one_sided

CONSECUTIVE = 3


def bh_apply(S, A):
    """Outer raster of ``B(A)``: the union of the map images in index order."""
    if A.grid.dimension != S.dimension:
        raise ValueError("grid and IFS dimensions differ")
    los, his = [], []
    for f in S.maps:
        lo, hi = _cell_image_bounds(f, A)
        los.append(lo)
        his.append(hi)
    return GridSet(A.grid, A.grid.box_mask(np.concatenate(los), np.concatenate(his)))


def _fingerprint(A):
    return hashlib.blake2b(np.packbits(A.bitmap).tobytes(), digest_size=16).digest()


def bh_iterate(S, A, n, tol=None, reference=None, monitor="hausdorff", keep_sets=False):
    """Iterate ``B`` from ``A`` for at most ``n`` steps.

    Without ``reference`` each record compares ``B^m(A)`` with ``B^{m-1}(A)``;
    with one, every record (including step 0) compares ``B^m(A)`` with the
    reference.  ``monitor`` picks which of d_H / forward / backward one-sided
    value decides convergence.  The run stops as ``Converged`` once the
    monitored value stays within ``tol`` for three consecutive steps, or as
    soon as an iterate is exactly reproduced (then all later values are known).
    An exact cycle that never meets the tolerance ends as ``Diverged``.
    """
    if n < 1:
        raise ValueError("bh_iterate needs n >= 1")
    tol = A.grid.unit if tol is None else tol
    pick = {"hausdorff": 1, "forward": 2, "backward": 3}[monitor]
    records = []
    sets = [A] if keep_sets else []
    if reference is not None:
        fw, bw = one_sided(A, reference), one_sided(reference, A)
        records.append((0, max(fw, bw), fw, bw))
    seen = {_fingerprint(A): 0}
    current = A
    run = 0
    status = Status.BUDGET_EXHAUSTED
    for step in range(1, n + 1):
        nxt = bh_apply(S, current)
        if reference is None:
            fw, bw = one_sided(nxt, current), one_sided(current, nxt)
        else:
            fw, bw = one_sided(nxt, reference), one_sided(reference, nxt)
        rec = (step, max(fw, bw), fw, bw)
        records.append(rec)
        if keep_sets:
            sets.append(nxt)
        run = run + 1 if rec[pick] <= tol else 0
        key = _fingerprint(nxt)
        cycle_start = seen.get(key)
        exact_fixed = nxt == current
        current = nxt
        if run >= CONSECUTIVE:
            status = Status.CONVERGED
            break
        if exact_fixed:
            # every later record repeats this one (successive distances are 0)
            final = 0.0 if reference is None else rec[pick]
            status = Status.CONVERGED if final <= tol else Status.DIVERGED
            break
        if cycle_start is not None:
            period = [r[pick] for r in records if cycle_start < r[0] <= step]
            status = Status.CONVERGED if max(period) <= tol else Status.DIVERGED
            break
        seen[key] = step
    return ConvergenceReport(records, status, current, tol=tol,
                             against="previous" if reference is None else "reference", sets=sets)


@dataclass
class FixedPointRecord:
    set: GridSet
    residual: float
    tol: float
    is_forward_invariant: bool
    status: Status = Status.CONVERGED
    report: ConvergenceReport | None = None

    @property
    def is_fixed_within_tolerance(self):
        return self.residual <= self.tol


def fixed_point_record(S, A, tol=None, status=Status.CONVERGED, report=None):
    """Residual ``d_H(B(A), A)`` and forward invariance of a candidate set."""
    tol = A.grid.unit if tol is None else tol
    BA = bh_apply(S, A)
    return FixedPointRecord(A, hausdorff(BA, A), tol, BA.issubset(A), status, report)


def _nested_fixed_point(S, A, budget, tol):
    # a decreasing bitmap sequence stabilizes exactly, so run to stabilization
    it = bh_iterate(S, A, budget, tol=0.0, keep_sets=True)
    limit, _trace = nested_limit(it.sets, tol=tol)
    rec = fixed_point_record(S, limit, tol, report=it)
    rec.status = Status.CONVERGED if rec.is_fixed_within_tolerance else Status.BUDGET_EXHAUSTED
    return rec


def max_fixed_point(S, grid, budget=200, tol=None):
    """Over-approximation of ``X* = n_n B^n(X)`` from the full domain bitmap."""
    return _nested_fixed_point(S, grid.full(), budget, grid.unit if tol is None else tol)


def a_star(S, A, budget=200, tol=None):
    """``A* = n_n B^n(A)`` for a forward-invariant ``A`` (``B(A)`` inside ``A``)."""
    BA = bh_apply(S, A)
    outside = BA.bitmap & ~A.bitmap
    if outside.any():
        cell = np.argwhere(outside)[0]
        witness = A.grid.centers(cell[None, :])[0]
        raise PreconditionError(
            f"B(A) is not contained in A: cell {tuple(cell)} (center {witness.tolist()}) escapes",
            witness=tuple(cell))
    return _nested_fixed_point(S, A, budget, A.grid.unit if tol is None else tol)

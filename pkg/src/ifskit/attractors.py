"""Budgeted checks for minimum fixed points, attraction, Conley attractors and stability.

Every verdict is relative to a finite budget: ``HoldsAtBudget`` means the
property was observed for all steps tried, never that it holds for all n.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .hutchinson import bh_apply, bh_iterate, fixed_point_record, max_fixed_point, _fingerprint
from .sets import GridSet, Status, dilate, hausdorff
from .symbolic import find_seed, semifractal_approx

HOLDS = "HoldsAtBudget"
FAILS = "FailsWithWitness"
UNDETERMINED = "UndeterminedAtBudget"
STABLE = "StableWitness"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (tuple, list)):
        return "(" + ",".join(_fmt(x) for x in v) + ")"
    return str(v)


@dataclass
class CheckResult:
    """One line of a verification report."""

    name: str
    verdict: str
    ok: bool
    data: dict = field(default_factory=dict)

    def line(self):
        extra = " ".join(f"{k}={_fmt(v)}" for k, v in self.data.items())
        return f"{self.name}: {self.verdict}" + (f" {extra}" if extra else "")

    def __str__(self):
        return self.line()


def _rng(seed):
    return np.random.Generator(np.random.Philox(key=seed))


def _cell_center(grid, cell):
    c = grid.centers(np.asarray(cell)[None, :])[0]
    return tuple(float(v) for v in c)


def check_sf_minimum(S, semifractal, candidates, tol=None):
    """The semifractal must sit inside every fixed point (within two cells).

    Candidates whose residual exceeds ``tol`` are not fixed points; they are
    listed as rejected and do not take part in the check.
    """
    grid = semifractal.grid
    tol = grid.unit if tol is None else tol
    margin = 2 * grid.unit
    violations, accepted, rejected = [], 0, 0
    for idx, cand in enumerate(candidates):
        if cand.residual > tol:
            rejected += 1
            continue
        accepted += 1
        grown = dilate(cand.set, margin)
        outside = semifractal.bitmap & ~grown.bitmap
        if outside.any():
            cell = np.argwhere(outside)[0]
            violations.append((idx, _cell_center(grid, cell)))
    data = {"accepted": accepted, "rejected": rejected}
    if violations:
        data["candidate"], data["witness"] = violations[0]
        return CheckResult("sf_minimum", FAILS, False, data)
    return CheckResult("sf_minimum", HOLDS, True, data)


def random_subsets(A, trials, seed=0, max_cells=16):
    """Random non-empty subsets of the cells of ``A`` (compact sets K inside A)."""
    rng = _rng(seed)
    cells = A.cells()
    out = []
    for _ in range(trials):
        m = int(rng.integers(1, min(max_cells, len(cells)) + 1))
        pick = cells[rng.choice(len(cells), size=m, replace=False)]
        mask = np.zeros(A.grid.shape, dtype=bool)
        mask[tuple(pick.T)] = True
        out.append(GridSet(A.grid, mask))
    return out


def check_sf_attraction(S, semifractal, trials=5, n=200, tol=None, seed=0):
    """B-iterates of random compact subsets must converge to the semifractal."""
    grid = semifractal.grid
    tol = grid.unit if tol is None else tol
    bound = tol + 2 * grid.unit
    worst = 0.0
    for K in random_subsets(semifractal, trials, seed):
        rep = bh_iterate(S, K, n, tol=bound, reference=semifractal)
        final = rep.hausdorff_trace[-1]
        worst = max(worst, final)
        if rep.status != Status.CONVERGED:
            return CheckResult("sf_attraction", FAILS, False,
                               {"trials": trials, "dH": final, "witness": _cell_center(grid, K.cells()[0])})
    return CheckResult("sf_attraction", HOLDS, True, {"trials": trials, "dH": worst})


def lemma_dista_trace(S, semifractal, K, n):
    """Trace of ``h_s(semifractal, B^m(K))`` and ``d_H`` for m = 0..n.

    The run stops early only when an iterate repeats exactly; the returned
    flag says whether the tail is then known to repeat for ever.
    """
    rep = bh_iterate(S, K, n, tol=-1.0, reference=semifractal, monitor="backward")
    periodic = rep.status != Status.BUDGET_EXHAUSTED
    return rep, periodic


def check_lemma_dista(S, semifractal, K, n=200, tol=None):
    """Only the one-sided value ``h_s(semifractal, B^n(K))`` is required to vanish."""
    grid = semifractal.grid
    tol = grid.unit if tol is None else tol
    rep, periodic = lemma_dista_trace(S, semifractal, K, n)
    forward = rep.backward_trace  # h_s(reference, iterate)
    threshold = None
    for m in range(len(forward) - 1, -1, -1):
        if forward[m] > tol:
            break
        threshold = m
    data = {"steps": rep.steps[-1], "h_s": forward[-1], "dH": rep.hausdorff_trace[-1]}
    if threshold is None:
        return CheckResult("lemma_dista", FAILS if periodic else UNDETERMINED, False, data)
    data["threshold"] = threshold
    return CheckResult("lemma_dista", HOLDS, True, data)


@dataclass
class ConleyVerdict:
    verdict: str
    steps: int
    final_distance: float
    witness: tuple | None = None
    witness_distance: float | None = None
    trace: list = field(default_factory=list)

    def result(self):
        data = {"steps": self.steps, "dH": self.final_distance}
        if self.witness is not None:
            data["witness"] = self.witness
            data["witness_distance"] = self.witness_distance
        return CheckResult("conley", self.verdict, self.verdict == HOLDS, data)


def check_conley(S, A, eps_neighborhood, n=200, tol=None):
    """Iterate B from the closed ``eps``-dilation of ``A`` and watch for persistent cells.

    ``FailsWithWitness`` needs a cell farther than ``tol`` from ``A`` that is
    present in every iterate, with a distance that is no longer shrinking:
    either the iterates cycle exactly (and so repeat for ever) or ``d_H`` over
    the second half of the budget dropped by less than one cell.  A slow but
    steady approach gives ``UndeterminedAtBudget``.
    """
    grid = A.grid
    tol = grid.unit if tol is None else tol
    if eps_neighborhood < 2 * grid.unit:
        raise PreconditionError(f"neighbourhood radius {eps_neighborhood} is below two cells")
    field_A = A.distance_field()
    current = dilate(A, eps_neighborhood)
    persistent = None
    trace = []
    run = 0
    seen = {_fingerprint(current): 0}
    steps = 0
    cycled = False
    for step in range(1, n + 1):
        current = bh_apply(S, current)
        steps = step
        persistent = current.bitmap.copy() if persistent is None else persistent & current.bitmap
        d = hausdorff(current, A)
        trace.append(d)
        run = run + 1 if d <= tol else 0
        if run >= 3:
            return ConleyVerdict(HOLDS, step, d, trace=trace)
        key = _fingerprint(current)
        if key in seen:
            cycled = True
            break
        seen[key] = step
    stalled = cycled or trace[-1] > trace[len(trace) // 2] - grid.unit
    far = persistent & (field_A > tol)
    if far.any() and stalled:
        cells = np.argwhere(far)
        dist = field_A[far]
        j = int(np.argmax(dist))
        return ConleyVerdict(FAILS, steps, trace[-1], _cell_center(grid, cells[j]), float(dist[j]), trace)
    return ConleyVerdict(UNDETERMINED, steps, trace[-1], trace=trace)


@dataclass
class StabilityVerdict:
    verdict: str
    V_eps: float
    V0_eps: float | None = None
    steps: int = 0

    def result(self):
        data = {"V_eps": self.V_eps}
        if self.V0_eps is not None:
            data["V0_eps"] = self.V0_eps
        data["steps"] = self.steps
        return CheckResult("stability", self.verdict, self.verdict == STABLE, data)


def check_stability(S, K, V_eps, budget=200, shrink_steps=6, tol=None):
    """Search ``V0 = dilate(K, V_eps / 2^j)`` with ``B^n(V0)`` inside ``V = dilate(K, V_eps)``."""
    grid = K.grid
    tol = grid.unit if tol is None else tol
    rec = fixed_point_record(S, K, tol)
    if not rec.is_fixed_within_tolerance:
        raise PreconditionError(f"K is not fixed within tolerance (residual {rec.residual:.3g})")
    V = dilate(K, V_eps)
    steps = 0
    for j in range(shrink_steps + 1):
        r = V_eps / 2 ** j
        if r < grid.cell_width:
            break
        current = dilate(K, r)
        seen = {_fingerprint(current)}
        ok = True
        for step in range(1, budget + 1):
            current = bh_apply(S, current)
            steps = step
            if not current.issubset(V):
                ok = False
                break
            key = _fingerprint(current)
            if key in seen:
                break  # the orbit of V0 cycles inside V for ever
            seen.add(key)
        if ok:
            return StabilityVerdict(STABLE, V_eps, r, steps)
    return StabilityVerdict(UNDETERMINED, V_eps, None, steps)


def spanning_sets(grid, count=5, seed=0, cells=16):
    """The full domain plus random scattered cell sets across the domain."""
    rng = _rng(seed)
    out = [grid.full()]
    for _ in range(count - 1):
        idx = np.stack([rng.integers(0, s, size=cells) for s in grid.shape], axis=1)
        mask = np.zeros(grid.shape, dtype=bool)
        mask[tuple(idx.T)] = True
        out.append(GridSet(grid, mask))
    return out


def check_global_equivalences(S, grid, budget=200, tol=None, seed=0):
    """Semifractal equals X* if and only if X* attracts every compact set.

    Both sides are evaluated at budget.  Agreement (both hold or both fail)
    is consistent with the theory; a mixed outcome flags an error.
    """
    tol = grid.unit if tol is None else tol
    seed_point = find_seed(S, grid)  # NoCertificateError when no word certifies
    sf = semifractal_approx(S, seed_point, grid, n=budget, tol=grid.unit).final_set
    xstar = max_fixed_point(S, grid, budget).set
    d = hausdorff(sf, xstar)
    equal = d <= tol
    attracting = True
    for K in spanning_sets(grid, 5, seed):
        rep = bh_iterate(S, K, budget, tol=tol, reference=xstar)
        if rep.status != Status.CONVERGED:
            attracting = False
            break
    data = {"dH_sf_xstar": d, "equal": equal, "global": attracting}
    if equal and attracting:
        return CheckResult("global_equivalence", "BothHold", True, data)
    if not equal and not attracting:
        return CheckResult("global_equivalence", "BothFail", True, data)
    return CheckResult("global_equivalence", "Mixed", False, data)


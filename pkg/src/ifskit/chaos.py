"""The chaos game: orbits along symbol streams, tail sets, and convergence traces.

Composition order here is CHAOS order: symbol ``n`` is applied at step ``n``,
so ``points[n] = f_{s(n-1)} o ... o f_{s0}(start)`` and the FIRST symbol acts
first.  This is the reverse of the coding order used in
:mod:`ifskit.symbolic`; the chaos orbit of ``w`` equals the coding
evaluation of ``reversed(w)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .attractors import STABLE, check_stability
from .errors import HypothesisUnmetError
from .sets import GridSet, hausdorff
from .symbolic import Disjunctive, Word, find_seed, semifractal_approx

MAX_STORED = 10 ** 6
CHUNK = 2 ** 18


@dataclass
class OrbitRecord:
    start: tuple
    symbols: Word
    points: np.ndarray  # (n + 1, d); points[0] is the start

    @property
    def n(self):
        return len(self.symbols)

    def to_csv(self):
        d = self.points.shape[1]
        head = ["step", "symbol"] + [f"x{j}" for j in range(d)]
        lines = [",".join(head)]
        for step, p in enumerate(self.points):
            sym = "" if step == 0 else str(self.symbols[step - 1])
            lines.append(",".join([str(step), sym] + [f"{v:.17g}" for v in p]))
        return "\n".join(lines) + "\n"


def _orbit_chunks(S, x, symbols):
    """Yield ``(offset, points)`` blocks of the orbit; ``offset`` is the step of points[0]."""
    prog = S.program()
    lo, hi = S.domain.lo, S.domain.hi
    current = np.asarray(x, dtype=float).reshape(S.dimension)
    offset = 0
    yield 0, current[None, :].copy()
    for start in range(0, len(symbols), CHUNK):
        block = np.ascontiguousarray(symbols[start:start + CHUNK] - 1, dtype=np.int64)
        pts = kernels.run_orbit(current, block, *prog, lo, hi)
        yield offset + 1, pts[1:]
        current = pts[-1].copy()
        offset += len(block)


def _start_point(S, x):
    x = np.asarray(x, dtype=float).reshape(1, S.dimension)
    return S.domain.check_point(x)[0]


def chaos_orbit(S, x, stream, n):
    """Orbit of ``x`` along the first ``n`` symbols of ``stream`` (chaos order)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > MAX_STORED:
        raise ValueError(f"orbits longer than {MAX_STORED} are not stored; use last_visits")
    x = _start_point(S, x)
    symbols = stream.take(n)
    if n and (symbols.min() < 1 or symbols.max() > S.k):
        raise ValueError("stream symbol out of range")
    pts = np.concatenate([p for _, p in _orbit_chunks(S, x, symbols)], axis=0)
    return OrbitRecord(tuple(x.tolist()), Word(symbols.tolist()), pts)


def tail_set(orbit, ell, grid):
    """Raster of ``{points[m] : m >= ell}``."""
    if not 0 <= ell < len(orbit.points):
        raise IndexError(f"ell={ell} outside 0..{len(orbit.points) - 1}")
    return grid.from_points(orbit.points[ell:])


def last_visits(S, x, stream, n, grid):
    """Streaming form: for each cell, the last step at which the orbit was in it (-1 if never).

    The tail set for ``ell`` is then ``last >= ell``; memory stays at one
    integer per cell whatever ``n`` is.
    """
    x = _start_point(S, x)
    symbols = stream.take(n)
    last = np.full(grid.shape, -1, dtype=np.int64)
    flat_last = last.reshape(-1)
    for offset, pts in _orbit_chunks(S, x, symbols):
        flat = np.ravel_multi_index(tuple(grid.cell_of(pts).T), grid.shape)
        np.maximum.at(flat_last, flat, offset + np.arange(len(pts), dtype=np.int64))
    return last


def tail_from_visits(grid, last, ell):
    return GridSet(grid, last >= ell)


def default_schedule(n):
    """Powers of two up to ``n / 2``."""
    out, ell = [], 1
    while ell <= n // 2:
        out.append(ell)
        ell *= 2
    return out


@dataclass
class ChaosReport:
    trace: list  # (ell, d_H(tail_ell, semifractal))
    tol: float
    converged: bool
    monotone: bool
    caveat: bool
    semifractal: GridSet = field(repr=False)
    final_tail: GridSet = field(repr=False)
    stability: object = None

    @property
    def ok(self):
        return self.converged and self.monotone

    def lines(self):
        head = "chaos_game: " + ("Converged" if self.ok else "NotConverged")
        head += f" tol={self.tol:.6g} final={self.trace[-1][1]:.6g}"
        if self.caveat:
            head += " caveat=stability-not-witnessed"
        return [head] + [f"  ell={ell} dH={d:.17g}" for ell, d in self.trace]

    def to_csv(self):
        return "ell,hausdorff\n" + "".join(f"{ell},{d:.17g}\n" for ell, d in self.trace)


def verify_chaos_game(S, x, n, grid, ell_schedule=None, tol=None, semifractal=None,
                      stream=None, override_hypothesis=False, stability_eps=None, budget=200):
    """Compare tail sets of a chaos orbit with the semifractal approximation.

    The theorem behind this check assumes the semifractal is a stable fixed
    point.  Without a stability witness the call raises
    :class:`HypothesisUnmetError` unless ``override_hypothesis`` is set, in
    which case the report carries a caveat.
    """
    tol = 5 * grid.unit if tol is None else tol
    if semifractal is None:
        seed = find_seed(S, grid)
        semifractal = semifractal_approx(S, seed, grid, n=budget).final_set
    eps = stability_eps if stability_eps is not None else max(0.025 * S.domain.diameter, 2 * grid.unit)
    stab = check_stability(S, semifractal, eps, budget=budget)
    caveat = stab.verdict != STABLE
    if caveat and not override_hypothesis:
        raise HypothesisUnmetError(
            f"no stability witness for the semifractal at V_eps={eps:g}; rerun with the override to proceed")
    stream = Disjunctive(S.k) if stream is None else stream
    ells = default_schedule(n) if ell_schedule is None else sorted(ell_schedule)
    if not ells:
        raise ValueError("empty ell schedule")
    last = last_visits(S, x, stream, n, grid)
    trace = [(ell, hausdorff(tail_from_visits(grid, last, ell), semifractal)) for ell in ells]
    noise = 2 * grid.unit
    best = np.inf
    monotone = True
    for _, d in trace:
        if d > best + noise:
            monotone = False
        best = min(best, d)
    return ChaosReport(trace, tol, trace[-1][1] <= tol, monotone, caveat, semifractal,
                       tail_from_visits(grid, last, ells[-1]), stab)

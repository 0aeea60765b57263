"""Catalog of worked IFS examples with their hypotheses and claims as executable checks.

Each parameter carries a provenance note: ``stated`` when the value is given
explicitly in the example's definition, ``derived`` when it is an
instantiation chosen here to satisfy qualitative conditions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.optimize import brentq

from .attractors import (FAILS, HOLDS, STABLE, CheckResult, check_conley, check_global_equivalences,
                         check_lemma_dista, check_sf_minimum, check_stability)
from .hutchinson import fixed_point_record, max_fixed_point
from .maps import (Affine, Composite, IFSystem, PiecewiseLinear1D, Quadratic1D, fixed_points_1d,
                   interval_image, lipschitz_bound)
from .sets import Box, hausdorff, make_grid, one_sided
from .symbolic import (Periodic, Undetermined, Word, certify_weak_hyperbolic, find_seed,
                       semifractal_approx, target_sample)

LAMBDA = 0.8
BONY_W = ("111", "112", "221", "22222")
NONREGULAR_F2 = ((0.0, 0.1), (0.2, 0.29), (0.45, 0.415), (0.55, 0.65), (1.0, 0.8))


@dataclass(frozen=True)
class Param:
    value: object
    provenance: str  # "stated" or "derived"
    note: str = ""


@dataclass
class ExampleSpec:
    name: str
    system: IFSystem
    claims: tuple
    params: dict
    resolution: tuple = (2 ** 14,)
    description: str = ""

    def grid(self, resolution=None):
        res = self.resolution if resolution is None else resolution
        d = self.system.domain
        return make_grid(d.lower, d.upper, res)


def _cantor_classic():
    S = IFSystem(([0.0], [1.0]), [Affine(1 / 3, 0), Affine(1 / 3, 2 / 3)])
    params = {"g1": Param("x/3", "stated"), "g2": Param("x/3 + 2/3", "stated")}
    return ExampleSpec("cantor_classic", S, ("global_equivalence", "conley", "stability"), params,
                       description="middle-thirds Cantor IFS")


def _cantor_stable():
    f2 = PiecewiseLinear1D([(0, 2 / 3), (1, 1), (2, 2)])
    S = IFSystem(([0.0], [2.0]), [Affine(1 / 3, 0), f2])
    params = {
        "domain": Param((0, 2), "stated"),
        "f1": Param("x/3", "stated"),
        "f2": Param(f2.vertices, "stated", "x/3 + 2/3 on [0,1], identity on [1,2], as one piecewise-linear map"),
    }
    claims = ("sf_minimum", "conley", "stability", "lemma_dista", "global_equivalence", "chaos_game")
    return ExampleSpec("cantor_stable", S, claims, params,
                       description="stable semifractal that is not a Conley attractor")


def _bony():
    f1 = PiecewiseLinear1D([(0, 0), (0.6, 0.2), (1, 0.8)])
    f2 = PiecewiseLinear1D([(0, 0.15), (0.4, 0.8), (1, 1)])
    S = IFSystem(([0.0], [1.0]), [f1, f2])
    params = {
        "f1": Param(f1.vertices, "stated", "end vertex (1, 0.8) as in the text; a drawing shows 0.75"),
        "f2": Param(f2.vertices, "stated"),
        "W": Param(BONY_W, "stated"),
    }
    return ExampleSpec("bony", S, ("not_weakly_hyperbolic_12", "target_covers"), params,
                       description="non-weakly-hyperbolic IFS whose target set is [0,1]")


def _porcupine():
    S = IFSystem(([0.0], [1.0]), [Affine(-LAMBDA, LAMBDA), Quadratic1D(-1, 2, 0)])
    params = {
        "f1": Param("lambda (1 - x)", "stated"),
        "lambda": Param(LAMBDA, "derived", "contraction of f2 on [f2^-1(lambda), 1] needs lambda > 3/4"),
        "f2": Param("2x - x^2", "derived", "fixed points 0 (repelling) and 1 (attracting)"),
    }
    claims = ("semifractal_full", "periodic_2_undetermined", "global_equivalence")
    return ExampleSpec("porcupine", S, claims, params,
                       description="target set dense in [0,1] but missing 1")


def _involution():
    S = IFSystem(([0.0], [1.0]), [Affine(1, 0), Affine(-1, 1)])
    params = {"f1": Param("x", "stated"), "f2": Param("1 - x", "stated")}
    return ExampleSpec("involution", S, ("swh_empty", "no_minimum_fixed_point"), params,
                       description="IFS without a minimum fixed point")


def _nonregular():
    f2 = PiecewiseLinear1D(NONREGULAR_F2)
    S = IFSystem(([0.0], [1.0]), [Quadratic1D(-1, 2, 0), f2])
    params = {
        "f1": Param("2x - x^2", "derived", "fixed points 0 (repelling) and 1 (attracting)"),
        "f2": Param(f2.vertices, "derived",
                    "three fixed points 0.38, ~0.476, 0.7 with slopes 1/2, 2.35, 1/3; crossing with f1 in (alpha, p1)"),
    }
    return ExampleSpec("nonregular", S, ("two_fixed_points", "swh_nonempty"), params,
                       description="non-regular IFS with weakly hyperbolic sequences")


def _sierpinski():
    maps = [Affine([[0.5, 0], [0, 0.5]], [vx / 2, vy / 2]) for vx, vy in ((0, 0), (1, 0), (0.5, 1))]
    S = IFSystem(([0.0, 0.0], [1.0, 1.0]), maps)
    params = {"vertices": Param(((0, 0), (1, 0), (0.5, 1)), "derived", "classical triangle, ratio 1/2")}
    return ExampleSpec("sierpinski", S, ("global_equivalence",), params, resolution=(1024, 1024),
                       description="Sierpinski triangle on the unit square")


CATALOG = {
    "nonregular": _nonregular,
    "cantor_stable": _cantor_stable,
    "bony": _bony,
    "porcupine": _porcupine,
    "involution": _involution,
    "cantor_classic": _cantor_classic,
    "sierpinski": _sierpinski,
}


def load_example(name):
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(CATALOG)}") from None


def config_path(name):
    """Path of the shipped config file reproducing ``load_example(name)``."""
    if name not in CATALOG:
        raise KeyError(f"unknown example {name!r}")
    return resources.files("ifskit") / "configs" / f"{name}.cfg"


def cantor_raster(grid, level, lo=0.0, hi=1.0):
    """Outer raster of the level-``level`` middle-thirds intervals of ``[lo, hi]``."""
    starts = np.zeros(1)
    for _ in range(level):
        starts = np.concatenate([starts / 3, starts / 3 + 2 / 3])
    width = 3.0 ** -level
    iv = np.stack([lo + (hi - lo) * starts, lo + (hi - lo) * (starts + width)], axis=1)
    return grid.from_intervals(iv)


# -- hypothesis verification --------------------------------------------------------
def _zeros(g, lo, hi, extra=(), samples=20001):
    xs = np.unique(np.concatenate([np.linspace(lo, hi, samples), [e for e in extra if lo < e < hi]]))
    vals = np.array([g(x) for x in xs])
    roots = list(xs[vals == 0.0])
    s = np.sign(vals)
    for i in np.flatnonzero(s[:-1] * s[1:] < 0):
        roots.append(brentq(g, xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15))
    return sorted(float(r) for r in roots)


def _scalar(f):
    return lambda x: float(np.ravel(f(x))[0])


def _slope_kind(f, p, lo, hi, delta=1e-6):
    a, b = max(lo, p - delta), min(hi, p + delta)
    s = abs(_scalar(f)(b) - _scalar(f)(a)) / (b - a)
    return s, ("attracting" if s < 1 else "repelling" if s > 1 else "neutral")


def _strictly_monotone(f, lo, hi, samples=4001):
    ys = np.ravel(f.evaluate(np.linspace(lo, hi, samples)))
    d = np.diff(ys)
    return bool(np.all(d > 0) or np.all(d < 0))


def _cond(name, ok, **data):
    return CheckResult(name, "Holds" if ok else "Fails", bool(ok), data)


def _box(lo, hi):
    return Box([lo], [hi])


@dataclass
class ConditionReport:
    example: str
    results: list = field(default_factory=list)

    @property
    def ok(self):
        return all(r.ok for r in self.results)

    @property
    def failures(self):
        return [r for r in self.results if not r.ok]

    def lines(self):
        return [r.line() for r in self.results]


def _fixed_point_condition(name, f, lo, hi, expected_kinds):
    pts = fixed_points_1d(f, lo, hi)
    kinds = [_slope_kind(f, p, lo, hi)[1] for p in pts]
    ok = kinds == list(expected_kinds)
    return _cond(name, ok, fixed_points=tuple(pts), kinds=tuple(kinds)), pts


def _verify_nonregular(S):
    f1, f2 = S.maps
    out = []
    r, _ = _fixed_point_condition("f1_fixed_points", f1, 0, 1, ("repelling", "attracting"))
    out.append(r)
    r, p = _fixed_point_condition("f2_fixed_points", f2, 0, 1, ("attracting", "repelling", "attracting"))
    out.append(r)
    out.append(_cond("injective", _strictly_monotone(f1, 0, 1) and _strictly_monotone(f2, 0, 1)))
    img = interval_image(f2, _box(0, 1))
    alpha, beta = float(img.lo[0]), float(img.hi[0])
    p1 = p[0] if p else float("nan")
    f1p1 = _scalar(f1)(p1)
    out.append(_cond("f2_image", 0 < alpha < beta < 1 and p1 < f1p1 < beta,
                     alpha=alpha, beta=beta, p1=p1, f1_p1=f1p1))
    g = lambda x: _scalar(f1)(x) - _scalar(f2)(x)
    cs = _zeros(g, 0, 1, extra=f2.kinks())
    c = cs[0] if cs else float("nan")
    out.append(_cond("crossing", len(cs) == 1 and alpha < c < p1, crossings=tuple(cs), alpha=alpha, p1=p1))
    # splitting: f1^n(f2([0,1])) leaves f2([0,1]) for some n
    box, n = img, 0
    while n < 100 and box.lo[0] <= beta:
        box = interval_image(f1, box)
        n += 1
    out.append(_cond("splitting", box.lo[0] > beta, n=n))
    return out


def _verify_cantor_stable(S):
    f1, f2 = S.maps
    xs = np.linspace(0, 2, 2001)
    y2 = np.ravel(f2.evaluate(xs))
    left = xs <= 1
    want = np.where(left, xs / 3 + 2 / 3, xs)
    return [
        _cond("f1_contraction", abs(lipschitz_bound(f1, _box(0, 2)) - 1 / 3) < 1e-12),
        _cond("f2_shape", np.allclose(y2, want, rtol=0, atol=1e-12)),
        _cond("non_expanding", max(lipschitz_bound(f, _box(0, 2)) for f in S.maps) <= 1 + 1e-12),
    ]


def bony_compositions(S):
    """The W-compositions in coding order: word ``abc`` is ``f_a o f_b o f_c``."""
    return {w: Composite([S.maps[int(s) - 1] for s in w]) for w in BONY_W}


def _verify_bony(S):
    f1, f2 = S.maps
    out = []
    comp = Composite([f1, f2])
    pts = fixed_points_1d(comp, 0, 1)
    slopes = [_slope_kind(comp, p, 0, 1)[0] for p in pts]
    rep = [(p, s) for p, s in zip(pts, slopes) if s > 1]
    if rep:
        p = rep[0][0]
        local = lipschitz_bound(comp, _box(p - 1e-3, p + 1e-3))
        out.append(_cond("f1f2_repelling_fixed_point", local > 1, point=p, slope=rep[0][1], lipschitz=local))
    else:
        out.append(_cond("f1f2_repelling_fixed_point", False, fixed_points=tuple(pts)))
    comps = bony_compositions(S)
    lips = {w: lipschitz_bound(c, _box(0, 1)) for w, c in comps.items()}
    out.append(_cond("W_contractions", all(v < 1 for v in lips.values()),
                     **{f"lip_{w}": v for w, v in lips.items()}))
    grid = make_grid([0], [1], 2 ** 14)
    ivs = [interval_image(c, _box(0, 1)) for c in comps.values()]
    cover = grid.from_intervals([[b.lo[0], b.hi[0]] for b in ivs])
    gap = one_sided(grid.full(), cover)
    out.append(_cond("W_images_cover", gap <= grid.cell_width, gap=gap))
    return out


def _verify_porcupine(S):
    f1, f2 = S.maps
    lam = LAMBDA
    p = lam / (1 + lam)
    out = [_cond("f1_fixed_point", abs(_scalar(f1)(p) - p) < 1e-15, p=p)]
    r, _ = _fixed_point_condition("f2_fixed_points", f2, 0, 1, ("repelling", "attracting"))
    out.append(r)
    out.append(_cond("f2_injective", _strictly_monotone(f2, 0, 1)))
    q = brentq(lambda x: _scalar(f2)(x) - lam, 0, 1, xtol=1e-15)
    lip = lipschitz_bound(f2, _box(q, 1))
    out.append(_cond("f2_contraction_near_1", lip < 1, preimage=q, lipschitz=lip))
    return out


def _verify_involution(S):
    f1, f2 = S.maps
    xs = np.linspace(0, 1, 1001)
    y1 = np.ravel(f1.evaluate(xs))
    y2 = np.ravel(f2.evaluate(xs))
    return [
        _cond("f1_identity", np.array_equal(y1, xs)),
        _cond("f2_reflection", np.allclose(y2, 1 - xs, rtol=0, atol=1e-15)),
        _cond("isometries", all(abs(lipschitz_bound(f, _box(0, 1)) - 1) < 1e-12 for f in S.maps)),
    ]


def _verify_contractions(S, ratio):
    unit = Box(S.domain.lower, S.domain.upper)
    lips = [lipschitz_bound(f, unit) for f in S.maps]
    return [_cond("contractions", all(abs(v - ratio) < 1e-12 for v in lips), lipschitz=tuple(lips))]


_VERIFIERS = {
    "nonregular": _verify_nonregular,
    "cantor_stable": _verify_cantor_stable,
    "bony": _verify_bony,
    "porcupine": _verify_porcupine,
    "involution": _verify_involution,
    "cantor_classic": lambda S: _verify_contractions(S, 1 / 3),
    "sierpinski": lambda S: _verify_contractions(S, 1 / 2),
}


def verify_example_conditions(name):
    spec = load_example(name)
    return ConditionReport(name, _VERIFIERS[name](spec.system))


# -- claims ------------------------------------------------------------------------
def _expect(result, verdict, name=None):
    """Relabel a check: ``ok`` now means the verdict matches the expected one."""
    return CheckResult(name or result.name, result.verdict, result.verdict == verdict,
                       dict(result.data, expected=verdict))


class _Context:
    """Lazily computed shared objects for the claim checks of one example."""

    def __init__(self, spec, grid):
        self.spec, self.S, self.grid = spec, spec.system, grid
        self._sf = None

    @property
    def semifractal(self):
        if self._sf is None:
            seed = find_seed(self.S, self.grid)
            self._sf = semifractal_approx(self.S, seed, self.grid, n=400).final_set
        return self._sf


def _claim_global_equivalence(ctx):
    expected = "BothFail" if ctx.spec.name == "cantor_stable" else "BothHold"
    tol = 4 * ctx.grid.unit
    return _expect(check_global_equivalences(ctx.S, ctx.grid, budget=200, tol=tol), expected)


def _claim_conley(ctx):
    expected = FAILS if ctx.spec.name == "cantor_stable" else HOLDS
    return _expect(check_conley(ctx.S, ctx.semifractal, 0.05, n=200).result(), expected)


def _claim_stability(ctx):
    return _expect(check_stability(ctx.S, ctx.semifractal, 0.05, budget=200).result(), STABLE)


def _claim_sf_minimum(ctx):
    S, g = ctx.S, ctx.grid
    cands = [max_fixed_point(S, g), fixed_point_record(S, ctx.semifractal)]
    return _expect(check_sf_minimum(S, ctx.semifractal, cands), HOLDS)


def _claim_lemma_dista(ctx):
    K = ctx.grid.singleton([float(ctx.S.domain.hi[0])])
    return _expect(check_lemma_dista(ctx.S, ctx.semifractal, K, n=200, tol=4 * ctx.grid.unit), HOLDS)


def _claim_chaos_game(ctx):
    from .chaos import verify_chaos_game
    rep = verify_chaos_game(ctx.S, [float(ctx.S.domain.hi[0])], 200000, ctx.grid,
                            semifractal=ctx.semifractal)
    verdict = "Converged" if rep.ok else "NotConverged"
    return CheckResult("chaos_game", verdict, rep.ok, {"final": rep.trace[-1][1], "tol": rep.tol})


def _claim_not_wh_12(ctx):
    res = certify_weak_hyperbolic(ctx.S, Periodic(Word("12")), 0.01, budget=10 ** 4)
    ok = isinstance(res, Undetermined)
    verdict = "Undetermined" if ok else "Certified"
    return CheckResult("periodic_12", verdict, ok, {"eps": 0.01, "budget": 10 ** 4})


def bony_sample(S, max_len=30, eps=0.02, grid=None):
    return target_sample(S, max_len, eps, grid=grid, blocks=[Word(w) for w in BONY_W])


def _claim_target_covers(ctx):
    pts = bony_sample(ctx.S, grid=ctx.grid)
    sample = ctx.grid.from_points(np.array([p.point for p in pts]))
    gap = one_sided(ctx.grid.full(), sample)
    return CheckResult("target_covers", "Holds" if gap <= 0.01 else "Fails", gap <= 0.01,
                       {"points": len(pts), "gap": gap})


def _claim_semifractal_full(ctx):
    d = hausdorff(ctx.semifractal, ctx.grid.full())
    return CheckResult("semifractal_full", "Holds" if d <= 0.01 else "Fails", d <= 0.01, {"dH": d})


def _claim_periodic_2(ctx):
    res = certify_weak_hyperbolic(ctx.S, Periodic(Word("2")), 0.01, budget=10 ** 4)
    ok = isinstance(res, Undetermined)
    return CheckResult("periodic_2", "Undetermined" if ok else "Certified", ok, {"eps": 0.01})


def _claim_swh_empty(ctx):
    pts = target_sample(ctx.S, 16, 0.01)
    return CheckResult("swh_empty", "EmptyAtBudget" if not pts else "NonEmpty", not pts,
                       {"max_len": 16, "points": len(pts)})


def _claim_no_minimum(ctx):
    g = ctx.grid
    a = fixed_point_record(ctx.S, g.from_points([[0.25], [0.75]]))
    b = fixed_point_record(ctx.S, g.from_points([[0.3], [0.7]]))
    disjoint = not (a.set.bitmap & b.set.bitmap).any()
    ok = a.is_fixed_within_tolerance and b.is_fixed_within_tolerance and disjoint
    return CheckResult("no_minimum_fixed_point", "Holds" if ok else "Fails", ok,
                       {"residual_a": a.residual, "residual_b": b.residual, "disjoint": disjoint})


def nonregular_p1(S):
    return fixed_points_1d(S.maps[1], 0, 1)[0]


def _claim_two_fixed_points(ctx):
    g = ctx.grid
    p1 = nonregular_p1(ctx.S)
    full = fixed_point_record(ctx.S, g.full())
    upper = fixed_point_record(ctx.S, g.from_intervals([[p1, 1.0]]))
    distinct = hausdorff(full.set, upper.set) > 2 * g.unit
    ok = full.is_fixed_within_tolerance and upper.is_fixed_within_tolerance and distinct
    return CheckResult("two_fixed_points", "Holds" if ok else "Fails", ok,
                       {"p1": p1, "residual_full": full.residual, "residual_upper": upper.residual})


def _claim_swh_nonempty(ctx):
    seed = find_seed(ctx.S, ctx.grid)
    return CheckResult("swh_nonempty", "Certified", True, {"word": str(seed.word), "point": seed.point})


CLAIMS = {
    "global_equivalence": _claim_global_equivalence,
    "conley": _claim_conley,
    "stability": _claim_stability,
    "sf_minimum": _claim_sf_minimum,
    "lemma_dista": _claim_lemma_dista,
    "chaos_game": _claim_chaos_game,
    "not_weakly_hyperbolic_12": _claim_not_wh_12,
    "target_covers": _claim_target_covers,
    "semifractal_full": _claim_semifractal_full,
    "periodic_2_undetermined": _claim_periodic_2,
    "swh_empty": _claim_swh_empty,
    "no_minimum_fixed_point": _claim_no_minimum,
    "two_fixed_points": _claim_two_fixed_points,
    "swh_nonempty": _claim_swh_nonempty,
}


def check_claims(spec, grid=None, only=None):
    """Run the claim checks of an example; ``ok`` on each line means "as the theory predicts"."""
    ctx = _Context(spec, grid or spec.grid())
    return [CLAIMS[tag](ctx) for tag in spec.claims if only is None or tag in only]

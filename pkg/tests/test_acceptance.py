"""The twelve acceptance criteria, each at its stated tolerance.

Each test records one PASS/FAIL line, printed together at the end of the run.
"""
import numpy as np
import pytest

from ifskit import kernels
from ifskit.attractors import FAILS, STABLE, check_conley, check_global_equivalences, check_stability
from ifskit.chaos import chaos_orbit, tail_set
from ifskit.corpus import BONY_W, bony_compositions, load_example
from ifskit.hutchinson import a_star, bh_apply, bh_iterate, fixed_point_record, max_fixed_point
from ifskit.maps import Composite, fixed_points_1d, interval_image, lipschitz_bound
from ifskit.sets import Box, GridSet, dilate, hausdorff, make_grid, one_sided
from ifskit.symbolic import (Disjunctive, Explicit, Periodic, Undetermined, Word, certify_weak_hyperbolic,
                             coding_composition_image, coding_point, find_seed, semifractal_approx,
                             target_sample)

from oracles import brute_hausdorff, cantor_level_intervals, raster_intervals


def exact_cantor(grid, level):
    """Outer raster of the exact level-``level`` pre-Cantor intervals of [0, 1]."""
    return GridSet(grid, raster_intervals(grid, cantor_level_intervals(level)))


@pytest.fixture(scope="module")
def stable():
    spec = load_example("cantor_stable")
    g = spec.grid()
    sf = semifractal_approx(spec.system, find_seed(spec.system, g), g, n=400).final_set
    return spec.system, g, sf


def test_c01_hausdorff_oracle(criterion):
    d = criterion(1, "fast hausdorff equals brute force on 200 random pairs")
    rng = np.random.default_rng(2024)
    grids = [make_grid([0], [1], 2 ** 14), make_grid([0, 0], [1, 1], (128, 128))]
    worst = 0.0
    for backend in kernels.available_backends():
        prev = kernels.use_backend(backend)
        try:
            for i in range(200):
                g = grids[i % 2]
                size = int(np.prod(g.shape))
                sets = []
                for _ in range(2):
                    m = np.zeros(size, bool)
                    m[rng.choice(size, size=int(rng.integers(1, 257)), replace=False)] = True
                    sets.append(GridSet(g, m.reshape(g.shape)))
                worst = max(worst, abs(hausdorff(*sets) - brute_hausdorff(*sets)))
        finally:
            kernels.use_backend(prev)
    d["max_error"] = worst
    d["backends"] = ",".join(kernels.available_backends())
    assert worst <= 1e-12


def test_c02_cantor_rate(criterion):
    d = criterion(2, "d_H(B^n({0}), Cantor_12) <= 3^-n + 2 cells for n = 1..12")
    spec = load_example("cantor_classic")
    g = spec.grid()
    C12 = exact_cantor(g, 12)
    A = g.singleton([0.0])
    slack = []
    for n in range(1, 13):
        A = bh_apply(spec.system, A)
        slack.append(3.0 ** -n + 2 * g.cell_width - hausdorff(A, C12))
    d["min_slack"] = min(slack)
    assert min(slack) >= 0


def test_c03_minimum_fixed_point(criterion, stable):
    d = criterion(3, "semifractal inside every fixed candidate; equals C within 2 cells")
    S, g, sf = stable
    cell = g.cell_width
    xstar = max_fixed_point(S, g)
    candidates = [
        xstar,
        fixed_point_record(S, bh_iterate(S, g.from_points([[0.0], [2.0]]), 200).final_set),  # C with {2}
        a_star(S, dilate(sf, 0.05)),                                                          # C with [1, 1.05]
        fixed_point_record(S, bh_iterate(S, g.from_intervals([[2 / 3, 2.0]]), 200).final_set),
    ]
    fixed = [c for c in candidates if c.residual <= cell]
    inside = [sf.issubset(dilate(c.set, 2 * cell)) for c in fixed]
    dh_C = hausdorff(sf, exact_cantor(g, 14))
    d.update(candidates=len(fixed), contained=sum(inside), dH_C=dh_C)
    assert xstar in fixed and len(fixed) >= 3
    assert all(inside)
    assert dh_C <= 2 * cell


def test_c04_lemma_asymmetry(criterion, stable):
    d = criterion(4, "K={2}: h_s(C, B^n K) <= 4 cells for n >= 40, d_H >= 0.9 throughout")
    S, g, _ = stable
    C = exact_cantor(g, 14)
    K = g.singleton([2.0])
    forward, dh = [], []
    for n in range(0, 201):
        forward.append(one_sided(C, K))
        dh.append(hausdorff(K, C))
        K = bh_apply(S, K)
    d.update(max_forward_after_40=max(forward[40:]), min_dH=min(dh))
    assert max(forward[40:]) <= 4 * g.cell_width
    assert min(dh) >= 0.9


def test_c05_non_conley_witness(criterion, stable):
    d = criterion(5, "check_conley(C, 0.05) fails with a persistent witness in (1, 1.05]")
    S, g, sf = stable
    res = check_conley(S, sf, 0.05, n=200)
    d["verdict"] = res.verdict
    assert res.verdict == FAILS
    x = res.witness[0]
    d["witness"] = x
    assert 1.0 < x <= 1.05
    cell = tuple(g.cell_of(np.array([x]))[0])
    field = sf.distance_field()
    initial = field[cell]
    U = dilate(sf, 0.05)
    ratios = []
    for _ in range(200):
        U = bh_apply(S, U)
        present = bool(U.bitmap[cell])
        ratios.append(field[cell] / initial if present else 0.0)
    d["min_ratio"] = min(ratios)
    assert min(ratios) >= 0.9


def test_c06_stability(criterion, stable):
    d = criterion(6, "check_stability(C, 0.05, budget 200) gives StableWitness")
    S, _, sf = stable
    res = check_stability(S, sf, 0.05, budget=200)
    d.update(verdict=res.verdict, V0_eps=res.V0_eps)
    assert res.verdict == STABLE


def test_c07_deterministic_chaos_game(criterion, stable):
    d = criterion(7, "disjunctive chaos game from 2: d_H(tail(n/2), C) <= 5 cells")
    S, g, _ = stable
    n = 200_000
    orbit = chaos_orbit(S, [2.0], Disjunctive(2), n)
    dh = hausdorff(tail_set(orbit, n // 2, g), exact_cantor(g, 14))
    d["dH"] = dh
    assert dh <= 5 * g.cell_width


def test_c08_bony(criterion):
    d = criterion(8, "bony: W contractions cover [0,1]; f1 o f2 repels; W-targets cover [0,1]")
    spec = load_example("bony")
    S, g = spec.system, spec.grid()
    unit = Box([0], [1])
    comps = bony_compositions(S)
    lips = {w: lipschitz_bound(c, unit) for w, c in comps.items()}
    images = [interval_image(c, unit) for c in comps.values()]
    cover_gap = one_sided(g.full(), g.from_intervals([[b.lo[0], b.hi[0]] for b in images]))
    a_ok = max(lips.values()) < 1 and cover_gap <= g.cell_width
    f1f2 = Composite([S.maps[0], S.maps[1]])
    expansion = max(lipschitz_bound(f1f2, Box([p - 1e-3], [p + 1e-3])) for p in fixed_points_1d(f1f2, 0, 1))
    b_ok = expansion > 1
    pts = target_sample(S, 20, 0.01, grid=g, blocks=[Word(w) for w in BONY_W])
    sample = g.from_points(np.array([p.point for p in pts]))
    target_gap = one_sided(g.full(), sample)
    c_ok = target_gap <= 0.01
    d.update(a=a_ok, b=b_ok, c=c_ok, max_lip=max(lips.values()), expansion=expansion, target_gap=target_gap)
    assert a_ok and b_ok and c_ok


def test_c09_porcupine(criterion):
    d = criterion(9, "porcupine: semifractal is [0,1]; words with 1 stay below 1 - cell; 2-bar undetermined")
    spec = load_example("porcupine")
    S, g = spec.system, spec.grid()
    seed = coding_point(S, Periodic("1"), g.unit)
    sf = semifractal_approx(S, seed, g, n=400, tol=g.unit).final_set
    dh_full = hausdorff(sf, g.full())
    a_ok = abs(seed.point[0] - 4 / 9) <= g.unit and dh_full <= 0.01
    words = [p.word for p in target_sample(S, 12, 0.01)]
    with_one = [w for w in words if 1 in w]
    highest = max(coding_composition_image(S, w).hi[0] for w in with_one)
    b_ok = highest < 1 - g.cell_width
    res = certify_weak_hyperbolic(S, Periodic("2"), 0.01, budget=10 ** 4)
    c_ok = isinstance(res, Undetermined)
    d.update(a=a_ok, b=b_ok, c=c_ok, dH_full=dh_full, words_with_1=len(with_one), max_image=highest)
    assert a_ok and b_ok and c_ok


def test_c10_involution(criterion):
    d = criterion(10, "involution: no target points; two disjoint fixed pairs")
    spec = load_example("involution")
    S, g = spec.system, spec.grid()
    pts = target_sample(S, 16, 0.01)
    a = fixed_point_record(S, g.from_points([[0.25], [0.75]]))
    b = fixed_point_record(S, g.from_points([[0.3], [0.7]]))
    disjoint = not (a.set.bitmap & b.set.bitmap).any()
    d.update(points=len(pts), residual_a=a.residual, residual_b=b.residual, disjoint=disjoint)
    assert not pts
    assert a.residual <= g.cell_width and b.residual <= g.cell_width
    assert disjoint


def test_c11_global_equivalences(criterion):
    d = criterion(11, "both-hold on cantor/porcupine/sierpinski, both-fail on cantor_stable")
    expected = {"cantor_classic": "BothHold", "porcupine": "BothHold", "sierpinski": "BothHold",
                "cantor_stable": "BothFail"}
    got = {}
    for name in expected:
        spec = load_example(name)
        g = spec.grid()
        res = check_global_equivalences(spec.system, g, budget=200, tol=4 * g.unit)
        got[name] = res.verdict
        assert res.verdict != "Mixed", f"{name}: {res.line()}"
    d.update(got)
    assert got == expected


def test_c12_order_consistency(criterion):
    d = criterion(12, "chaos order of w lies in the coding image of reversed(w)")
    S = load_example("bony").system
    rng = np.random.default_rng(12)
    misses = 0
    for _ in range(500):
        w = Word(rng.integers(1, 3, size=int(rng.integers(1, 7))).tolist())
        x = rng.random(1)
        end = chaos_orbit(S, x, Explicit(w), len(w)).points[-1]
        box = coding_composition_image(S, w.reversed())
        misses += not (np.all(box.lo <= end) and np.all(end <= box.hi))
    d["misses"] = misses
    assert misses == 0

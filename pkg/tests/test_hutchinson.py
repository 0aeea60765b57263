import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ifskit.corpus import cantor_raster, nonregular_p1
from ifskit.errors import PreconditionError
from ifskit.hutchinson import a_star, bh_apply, bh_iterate, fixed_point_record, max_fixed_point
from ifskit.maps import Affine, IFSystem
from ifskit.sets import GridSet, Status, dilate, hausdorff, make_grid

from oracles import brute_hausdorff, cantor_level_intervals, raster_intervals


def test_bh_apply_examples(cantor, involution, bony):
    g = cantor.grid()
    assert bh_apply(cantor.system, g.full()) == g.from_intervals([[0, 1 / 3], [2 / 3, 1]])
    g = involution.grid()
    # 0.25 sits on a cell edge; the reflected cell lands just left of 0.75
    img = bh_apply(involution.system, g.singleton([0.25]))
    assert img.count == 2
    assert hausdorff(img, g.from_points([[0.25], [0.75]])) <= g.cell_width
    g = bony.grid()
    assert bh_apply(bony.system, g.full()) == g.full()


def test_cantor_levels_match_exact_intervals(cantor):
    g = cantor.grid()
    A = g.full()
    for level in range(1, 9):
        A = bh_apply(cantor.system, A)
        exact = raster_intervals(g, cantor_level_intervals(level))
        assert np.array_equal(A.bitmap, exact)


def test_cantor_rate_from_zero(cantor):
    g = cantor.grid()
    C = cantor_raster(g, 12)
    rep = bh_iterate(cantor.system, g.singleton([0.0]), 9, tol=0, reference=C)
    for step, dh, _fw, _bw in rep.iterations:
        assert dh <= 3.0 ** -step + g.cell_width
    # spot-check the fast distance against brute force on the last iterate
    assert rep.last[1] == pytest.approx(brute_hausdorff(rep.final_set, C), abs=1e-12)


def test_involution_period_one(involution):
    g = involution.grid()
    rep = bh_iterate(involution.system, g.singleton([0.25]), 20, keep_sets=True)
    pair = rep.sets[1]
    assert pair.count == 2
    assert hausdorff(pair, g.from_points([[0.25], [0.75]])) <= g.cell_width
    assert all(s == pair for s in rep.sets[1:])
    assert rep.converged


def test_identity_converges_at_step_one():
    S = IFSystem(([0.0], [1.0]), [Affine(1, 0)])
    g = make_grid([0], [1], 1024)
    A = g.from_intervals([[0.2, 0.4]])
    rep = bh_iterate(S, A, 50)
    assert rep.converged and rep.steps[-1] == 1 and rep.final_set == A


def test_bh_iterate_rejects_zero_steps(cantor):
    with pytest.raises(ValueError):
        bh_iterate(cantor.system, cantor.grid().full(), 0)


def test_max_fixed_point_examples(cantor, cantor_stable, involution):
    g = cantor.grid()
    rec = max_fixed_point(cantor.system, g)
    assert rec.status == Status.CONVERGED
    assert rec.residual <= g.cell_width
    assert hausdorff(rec.set, cantor_raster(g, 14)) <= g.cell_width
    g2 = cantor_stable.grid()
    assert max_fixed_point(cantor_stable.system, g2).set == g2.full()
    g3 = involution.grid()
    assert max_fixed_point(involution.system, g3).set == g3.full()


def test_max_fixed_point_nested(bony):
    g = bony.grid()
    rec = max_fixed_point(bony.system, g)
    sets = rec.report.sets
    assert all(b.issubset(a) for a, b in zip(sets, sets[1:]))


def test_a_star_examples(cantor, nonregular):
    S, g = nonregular.system, nonregular.grid()
    p1 = nonregular_p1(S)
    rec = a_star(S, g.from_intervals([[p1, 1.0]]))
    assert rec.is_fixed_within_tolerance
    assert rec.set.cells()[:, 0].min() * g.cell_width >= p1 - g.cell_width
    assert hausdorff(rec.set, g.full()) > 2 * g.unit
    full = a_star(S, g.full())
    assert full.set == max_fixed_point(S, g).set
    gc = cantor.grid()
    C = max_fixed_point(cantor.system, gc).set
    rec = a_star(cantor.system, C)
    assert rec.set == C and rec.residual <= gc.cell_width


def test_a_star_precondition(cantor):
    g = cantor.grid()
    with pytest.raises(PreconditionError) as e:
        a_star(cantor.system, g.from_intervals([[0.4, 0.6]]))
    assert e.value.witness is not None


def test_fixed_point_record_flags(involution):
    g = involution.grid()
    pair = bh_apply(involution.system, g.singleton([0.25]))
    rec = fixed_point_record(involution.system, pair)
    assert rec.residual == 0 and rec.is_fixed_within_tolerance and rec.is_forward_invariant
    rec = fixed_point_record(involution.system, g.singleton([0.25]))
    assert rec.residual > rec.tol and not rec.is_forward_invariant


def _random_set(g, rng):
    n = g.resolution[0]
    m = np.zeros(n, bool)
    m[rng.choice(n, size=int(rng.integers(1, 40)), replace=False)] = True
    return GridSet(g, m)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["cantor_classic", "bony", "porcupine", "nonregular"]))
def test_monotone_and_union(seed, name):
    from ifskit.corpus import load_example
    spec = load_example(name)
    g = make_grid([0], [1], 1024)
    rng = np.random.default_rng(seed)
    a, b = _random_set(g, rng), _random_set(g, rng)
    S = spec.system
    assert bh_apply(S, a).issubset(bh_apply(S, a | b))
    assert bh_apply(S, a | b) == bh_apply(S, a) | bh_apply(S, b)


@pytest.mark.parametrize("name", ["cantor_classic", "nonregular", "porcupine", "involution"])
def test_maximality(name):
    from ifskit.corpus import load_example
    spec = load_example(name)
    S, g = spec.system, spec.grid()
    top = dilate(max_fixed_point(S, g).set, 2 * g.unit)
    found = [bh_iterate(S, g.singleton([x]), 200).final_set for x in (0.0, 0.3, 1.0)]
    for A in found:
        rec = fixed_point_record(S, A)
        if rec.is_fixed_within_tolerance:
            assert rec.set.issubset(top)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ifskit import kernels
from ifskit.corpus import CATALOG, load_example


def brute_edt_1d(mask, h):
    idx = np.flatnonzero(mask)
    q = np.arange(mask.size)
    return np.abs(q[:, None] - idx[None, :]).min(axis=1) * h


def brute_edt_2d(mask, hx, hy):
    pts = np.argwhere(mask) * [hx, hy]
    q = np.argwhere(np.ones_like(mask)) * [hx, hy]
    d = np.sqrt(((q[:, None, :] - pts[None, :, :]) ** 2).sum(-1)).min(axis=1)
    return d.reshape(mask.shape)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_edt_1d_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    mask = rng.random(int(rng.integers(1, 300))) < rng.random()
    if not mask.any():
        mask[rng.integers(mask.size)] = True
    for b in kernels.available_backends():
        prev = kernels.use_backend(b)
        try:
            assert np.allclose(kernels.edt_1d(mask, 0.01), brute_edt_1d(mask, 0.01), rtol=0, atol=1e-12)
        finally:
            kernels.use_backend(prev)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_edt_2d_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    shape = tuple(int(v) for v in rng.integers(1, 30, size=2))
    mask = rng.random(shape) < 0.05
    if not mask.any():
        mask[0, 0] = True
    for b in kernels.available_backends():
        prev = kernels.use_backend(b)
        try:
            got = kernels.edt_2d(mask, 0.5, 0.25)
            assert np.allclose(got, brute_edt_2d(mask, 0.5, 0.25), rtol=0, atol=1e-12)
        finally:
            kernels.use_backend(prev)


def test_edt_empty_mask_is_infinite(backend):
    assert np.isinf(kernels.edt_1d(np.zeros(8, bool), 1.0)).all()
    assert np.isinf(kernels.edt_2d(np.zeros((3, 4), bool), 1.0, 1.0)).all()


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_orbit_backends_bit_identical(name):
    S = load_example(name).system
    rng = np.random.default_rng(11)
    syms = rng.integers(0, S.k, size=5000).astype(np.int64)
    x0 = (S.domain.lo + S.domain.hi) / 3
    outs = []
    for b in kernels.available_backends():
        prev = kernels.use_backend(b)
        try:
            outs.append(kernels.run_orbit(x0, syms, *S.program(), S.domain.lo, S.domain.hi))
        finally:
            kernels.use_backend(prev)
    for o in outs[1:]:
        assert np.array_equal(o, outs[0])
    # and both agree with step-by-step map evaluation
    x = x0[None, :]
    for n, s in enumerate(syms[:200], 1):
        x = S.apply(int(s) + 1, x)
        assert np.array_equal(outs[0][n], x[0])


def test_compiled_backend_present():
    # the extension is part of the build; its absence is worth noticing
    assert "python" in kernels.available_backends()
    assert kernels.backend_name() in kernels.available_backends()

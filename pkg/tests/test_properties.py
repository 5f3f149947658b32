import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from srvreg.curves import SampledCurve, inverse_srvt, srvt
from srvreg.diagnostics import linf_error
from srvreg.registration import backtrack, compute_dts
from srvreg.solver import PolicyField
from srvreg.updates import MONOTONE_UPDATES, brute_force_update

unit = st.floats(0.0, 1.0)
forcing = st.floats(0.0, 0.5)


@settings(max_examples=60, deadline=None)
@given(unit, unit, unit, forcing, st.sampled_from(sorted(MONOTONE_UPDATES)))
def test_closed_form_matches_oracle(u00, u01, u10, hf, key):
    rep, aset = key
    val, _ = MONOTONE_UPDATES[key](u00, u01, u10, hf)
    ref, _ = brute_force_update(u00, u01, u10, hf, aset=aset, repr=rep)
    assert abs(float(val) - ref) <= 1e-6


@settings(max_examples=60, deadline=None)
@given(unit, unit, unit, forcing, st.sampled_from(sorted(MONOTONE_UPDATES)))
def test_update_bounds(u00, u01, u10, hf, key):
    rep, aset = key
    val, alpha = MONOTONE_UPDATES[key](u00, u01, u10, hf)
    # no worse than continuing from a neighbour, no better than the forcing allows
    assert float(val) >= max(u01, u10) - 1e-12
    assert np.all(alpha >= -1e-12) and np.all(alpha <= 1 + 1e-12)
    if aset == "1":
        assert abs(alpha.sum() - 1) < 1e-12
    else:
        assert abs(alpha.max() - 1) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 25), st.sampled_from(["1", "inf"]), st.integers(0, 2**32 - 1))
def test_random_policies_backtrack(N, aset, seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0, 1, (N, N))
    if aset == "1":
        alpha = np.stack([a, 1 - a], axis=-1)
    else:
        first = rng.uniform(size=(N, N)) < 0.5
        alpha = np.where(first[..., None], np.stack([np.ones_like(a), a], -1), np.stack([a, np.ones_like(a)], -1))
    path = backtrack(PolicyField(alpha))
    path.check(N)
    assert abs(compute_dts(path).sum() - 1) < 1e-12


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (8, 2), elements=st.floats(-3, 3)))
def test_srvt_round_trip_on_polygons(steps):
    steps = steps + np.array([1e-3, 0.0]) * (np.linalg.norm(steps, axis=1, keepdims=True) < 1e-3)
    pts = np.vstack([[0.0, 0.0], np.cumsum(steps, axis=0)])
    c = SampledCurve(pts)
    back = inverse_srvt(srvt(c))
    np.testing.assert_allclose(back.points, c.normalized().points, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (9, 9), elements=st.floats(0, 1)), st.floats(0.01, 1.0))
def test_linf_offset(ref, delta):
    coarse = ref[::2, ::2]
    assert linf_error(coarse, ref) == 0.0
    assert abs(linf_error(coarse + delta, ref) - delta) < 1e-12

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strikedip.cloud_io import GroundTruthSurface
from strikedip.errors import InvalidArgumentError
from strikedip.orientation import normal_from_orientation, orientation_from_normal
from strikedip.quality import (match_regions, score_orientations, z_component, z_region, z_run)

angles = st.floats(0, 360, allow_nan=False, exclude_max=True)
unit_scores = st.floats(0, 1, allow_nan=False)


def surface(sid, dip, dipdir):
    o = orientation_from_normal(normal_from_orientation(dip, dipdir))
    return GroundTruthSurface(sid, o.strike_deg, o.dip_deg, o.dipdir_deg, o.source_normal)


def test_component_examples():
    assert z_component(87, 87, 0, 360, circular=True) == 0.0
    assert z_component(123, 87, 0, 360) == pytest.approx(0.1, abs=1e-12)
    assert z_component(359, 1, 0, 360, circular=True) == pytest.approx(2 / 360, abs=1e-12)
    assert z_component(359, 1, 0, 360) == pytest.approx(358 / 360, abs=1e-12)
    assert z_component(80, 40, 0, 90) == pytest.approx(40 / 90, abs=1e-12)


def test_component_clamps_and_missing():
    assert z_component(200, 0, 0, 90) == 1.0
    assert z_component(5, 0, 10, 90) == 0.0
    assert z_component(None, 10, 0, 360, circular=True) == 1.0
    assert z_component(None, None, 0, 360, circular=True) == 0.0
    with pytest.raises(InvalidArgumentError):
        z_component(1, 2, 5, 5)


def test_region_examples():
    assert z_region(0, 0, 0) == 0.0
    assert z_region(1, 1, 1) == 1.0
    assert z_region(0.1, 0.0111, 0.1) == pytest.approx(0.0704, abs=1e-4)
    with pytest.raises(InvalidArgumentError):
        z_region(1.5, 0, 0)


def test_region_mean_equals_literal_form():
    rng = np.random.default_rng(17)
    for z in rng.uniform(0, 1, size=(1000, 3)):
        literal = math.sqrt(sum(z) ** 2) / 3
        assert abs(z_region(*z) - literal) <= 1e-12


def test_run_examples():
    assert z_run([0.0] * 4) == 0.0
    assert z_run([1.0] * 6) == pytest.approx(math.sqrt(6) / 6, abs=1e-12)
    assert z_run([0.3]) == pytest.approx(0.3, abs=1e-12)
    with pytest.raises(InvalidArgumentError):
        z_run([])


@settings(max_examples=200, deadline=None)
@given(angles, angles, st.integers(-3, 3))
def test_component_symmetry_and_wrap(a, b, turns):
    z = z_component(a, b, 0, 360, circular=True)
    assert 0.0 <= z <= 1.0
    assert z == pytest.approx(z_component(b, a, 0, 360, circular=True), abs=1e-12)
    assert z == pytest.approx(z_component(a + 360 * turns, b, 0, 360, circular=True), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.lists(unit_scores, min_size=1, max_size=12), st.data())
def test_run_bounds_and_monotonicity(scores, data):
    z = z_run(scores)
    assert 0.0 <= z <= 1.0
    i = data.draw(st.integers(0, len(scores) - 1))
    worse = list(scores)
    worse[i] = data.draw(st.floats(scores[i], 1.0))
    assert z_run(worse) >= z - 1e-15


def test_identity_matching():
    truth = [surface(i, d, a) for i, (d, a) in enumerate([(89, 177), (40, 89), (87, 69)], 1)]
    measured = [(10 + t.id, np.array(t.normal)) for t in truth]
    m = match_regions(measured, truth)
    assert m == {11: (1, pytest.approx(0.0, abs=1e-6)), 12: (2, pytest.approx(0.0, abs=1e-6)),
                 13: (3, pytest.approx(0.0, abs=1e-6))}


def test_permuted_matching():
    truth = [surface(i, d, a) for i, (d, a) in enumerate([(89, 177), (40, 89), (87, 69), (10, 300)], 1)]
    perm = [2, 0, 3, 1]
    measured = [(k, orientation_from_normal(truth[p].normal)) for k, p in enumerate(perm)]
    m = match_regions(measured, truth)
    assert {k: v[0] for k, v in m.items()} == {k: truth[p].id for k, p in enumerate(perm)}


def test_reject_gate():
    truth = [surface(1, 30, 0)]
    far = orientation_from_normal(normal_from_orientation(80, 0))
    assert match_regions([(0, far)], truth) == {}


def test_dropout_scores_one():
    attitudes = [(89, 177), (89, 94), (87, 69), (86, 192), (89, 80), (40, 89)]
    truth = [surface(i, d, a) for i, (d, a) in enumerate(attitudes, 1)]
    measured = [(t.id, orientation_from_normal(t.normal)) for t in truth if t.id != 3]
    q = score_orientations(measured, truth)
    assert len(q.matching) == 5
    by_truth = {e["truth_id"]: e for e in q.entries}
    assert by_truth[3]["z_region"] == 1.0 and by_truth[3]["region_id"] is None
    assert q.z_run == pytest.approx(1.0 / 6.0, abs=1e-9)


def test_horizontal_truth_ignores_azimuths():
    truth = [surface(1, 0.0, 0.0)]
    measured = [(0, orientation_from_normal(normal_from_orientation(0.3, 123)))]
    q = score_orientations(measured, truth)
    e = q.entries[0]
    assert e["z_strike"] == 0.0 and e["z_dipdir"] == 0.0
    assert e["z_dip"] == pytest.approx(0.3 / 90, abs=1e-9)


def test_score_needs_truth():
    with pytest.raises(InvalidArgumentError):
        score_orientations([], [])


def test_breakdown_serializes():
    truth = [surface(1, 45, 10)]
    q = score_orientations([(0, orientation_from_normal(truth[0].normal))], truth)
    d = q.to_dict()
    assert d["z_run"] == pytest.approx(0.0, abs=1e-9)
    assert d["matching"] == {"0": 1}

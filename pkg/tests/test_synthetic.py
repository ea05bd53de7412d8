import numpy as np
import pytest

from strikedip.errors import InvalidArgumentError
from strikedip.orientation import orientation_from_normal
from strikedip.synthetic import (FIELD_ATTITUDES, SyntheticScene, box_scene, generate_synthetic,
                                 observatory_scene, oriented_face, prism_scene)


def test_noiseless_box_is_exactly_planar():
    for open_top, faces in ((False, 6), (True, 5)):
        sample = generate_synthetic(box_scene(points_per_face=10_000, open_top=open_top))
        assert len(sample.truth) == faces
        assert len(sample.cloud) == faces * 10_000
        for face in sample.scene.faces:
            pts = sample.cloud.points[sample.face_labels == face.id]
            assert np.abs((pts - face.center) @ face.normal).max() < 1e-12


def test_same_seed_same_cloud():
    a = generate_synthetic(observatory_scene(seed=3))
    b = generate_synthetic(observatory_scene(seed=3))
    assert a.cloud.points.tobytes() == b.cloud.points.tobytes()
    c = generate_synthetic(observatory_scene(seed=4))
    assert a.cloud.points.tobytes() != c.cloud.points.tobytes()


def test_tilted_face_reproduces_roof_row():
    face = oriented_face(40.0, 89.0, 5.0, 5.0, base_center=(0, 0, 0), id=6)
    t = generate_synthetic(SyntheticScene([face], points_per_face=10)).truth[0]
    assert (t.strike_deg, t.dip_deg, t.dipdir_deg) == pytest.approx((359.0, 40.0, 89.0), abs=1e-9)


def test_observatory_truth_matches_field_attitudes():
    sample = generate_synthetic(observatory_scene(points_per_face=10))
    for t in sample.truth:
        dip, dipdir = FIELD_ATTITUDES[t.id]
        assert t.dip_deg == pytest.approx(dip, abs=1e-9)
        assert t.dipdir_deg == pytest.approx(dipdir, abs=1e-9)
        assert 0 <= t.strike_deg < 360 and 0 <= t.dipdir_deg < 360
        o = orientation_from_normal(t.normal)
        assert o.dipdir_deg == pytest.approx(t.dipdir_deg, abs=1e-9)


def test_noise_and_outliers():
    scene = observatory_scene(noise_fraction=0.003, outlier_fraction=0.02, seed=1)
    sample = generate_synthetic(scene)
    assert sample.outlier_mask.sum() == round(0.02 * 60_000)
    assert sample.noise_sigma == pytest.approx(0.003 * scene.extent())
    face = scene.faces[0]
    d = (sample.cloud.points[sample.face_labels == face.id] - face.center) @ face.normal
    assert d.std() == pytest.approx(sample.noise_sigma, rel=0.05)


def test_invalid_scenes():
    with pytest.raises(InvalidArgumentError):
        generate_synthetic(SyntheticScene([]))
    with pytest.raises(InvalidArgumentError):
        prism_scene(sides=2)


def test_prism_faces_are_vertical():
    sample = generate_synthetic(prism_scene(sides=6, points_per_face=50))
    assert all(t.dip_deg == pytest.approx(90.0) for t in sample.truth)

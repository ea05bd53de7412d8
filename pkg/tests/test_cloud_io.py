import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strikedip.cloud_io import (GroundTruthSurface, PointCloud, default_ground_truth_path,
                                read_ground_truth, read_ply, write_ground_truth, write_ply)
from strikedip.errors import InvalidArgumentError, ParseError, SchemaError, ValidationError

HEADER = "id,strike,dip,dipdir,nx,ny,nz\n"


def write_text(path, text):
    path.write_bytes(text.encode("ascii"))
    return str(path)


def test_three_point_ascii(tmp_path):
    p = write_text(tmp_path / "a.ply", "ply\nformat ascii 1.0\nelement vertex 3\n"
                   "property float x\nproperty float y\nproperty float z\nend_header\n"
                   "0 0 0\n1 2 3\n-1.5 0.25 9\n")
    cloud = read_ply(p)
    np.testing.assert_array_equal(cloud.points, [[0, 0, 0], [1, 2, 3], [-1.5, 0.25, 9]])
    assert cloud.colors is None


def test_ascii_and_binary_agree(tmp_path, rng):
    cloud = PointCloud(rng.normal(size=(500, 3)) * 100)
    write_ply(cloud, tmp_path / "a.ply", binary=False)
    write_ply(cloud, tmp_path / "b.ply", binary=True)
    a, b = read_ply(tmp_path / "a.ply"), read_ply(tmp_path / "b.ply")
    np.testing.assert_allclose(a.points, b.points, atol=1e-6)


def test_binary_round_trip_bitwise(tmp_path, rng):
    cloud = PointCloud(rng.normal(size=(100, 3)), rng.integers(0, 256, (100, 3)))
    write_ply(cloud, tmp_path / "c.ply", binary=True)
    back = read_ply(tmp_path / "c.ply")
    assert back.points.tobytes() == cloud.points.tobytes()
    np.testing.assert_array_equal(back.colors, cloud.colors)


def test_ascii_round_trip_keeps_colors(tmp_path, rng):
    cloud = PointCloud(rng.normal(size=(50, 3)), rng.integers(0, 256, (50, 3)))
    write_ply(cloud, tmp_path / "c.ply", binary=False)
    back = read_ply(tmp_path / "c.ply")
    np.testing.assert_allclose(back.points, cloud.points, atol=1e-6)
    np.testing.assert_array_equal(back.colors, cloud.colors)


def test_missing_z_is_schema_error(tmp_path):
    p = write_text(tmp_path / "xy.ply", "ply\nformat ascii 1.0\nelement vertex 1\n"
                   "property float x\nproperty float y\nend_header\n1 2\n")
    with pytest.raises(SchemaError):
        read_ply(p)


def test_truncated_binary_names_offset(tmp_path, rng):
    write_ply(PointCloud(rng.normal(size=(10, 3))), tmp_path / "t.ply", binary=True)
    raw = (tmp_path / "t.ply").read_bytes()
    (tmp_path / "t.ply").write_bytes(raw[:-5])
    with pytest.raises(ParseError, match="byte offset"):
        read_ply(tmp_path / "t.ply")


def test_truncated_ascii_names_offset(tmp_path):
    p = write_text(tmp_path / "t.ply", "ply\nformat ascii 1.0\nelement vertex 3\n"
                   "property float x\nproperty float y\nproperty float z\nend_header\n0 0 0\n")
    with pytest.raises(ParseError, match="byte offset"):
        read_ply(p)


def test_malformed_header(tmp_path):
    p = write_text(tmp_path / "h.ply", "plx\nformat ascii 1.0\nend_header\n")
    with pytest.raises(ParseError):
        read_ply(p)
    p = write_text(tmp_path / "h2.ply", "ply\nformat ascii 1.0\nelement vertex 1\n"
                   "property float x\n")
    with pytest.raises(ParseError, match="byte offset"):
        read_ply(p)


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(OSError):
        read_ply(tmp_path / "nope.ply")


def test_skips_other_elements_and_properties(tmp_path):
    text = ("ply\nformat ascii 1.0\nelement camera 1\nproperty float a\n"
            "element vertex 2\nproperty float nx\nproperty float x\nproperty float y\n"
            "property float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\n"
            "element face 0\nproperty list uchar int vertex_indices\nend_header\n"
            "7\n9 1 2 3 10 20 30\n9 4 5 6 40 50 60\n")
    cloud = read_ply(write_text(tmp_path / "m.ply", text))
    np.testing.assert_array_equal(cloud.points, [[1, 2, 3], [4, 5, 6]])
    np.testing.assert_array_equal(cloud.colors, [[10, 20, 30], [40, 50, 60]])


def test_write_empty_cloud_rejected(tmp_path):
    with pytest.raises(InvalidArgumentError):
        write_ply(PointCloud(np.empty((0, 3))), tmp_path / "e.ply")


def test_unwritable_path(tmp_path, rng):
    with pytest.raises(OSError):
        write_ply(PointCloud(rng.normal(size=(3, 3))), tmp_path / "missing" / "x.ply")


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 10_000), binary=st.booleans(), seed=st.integers(0, 2**32 - 1),
       colored=st.booleans())
def test_round_trip_property(tmp_path_factory, n, binary, seed, colored):
    rng = np.random.default_rng(seed)
    cloud = PointCloud(rng.normal(size=(n, 3)) * 10 ** rng.uniform(-3, 3),
                       rng.integers(0, 256, (n, 3)) if colored else None)
    path = tmp_path_factory.mktemp("rt") / "c.ply"
    write_ply(cloud, path, binary=binary)
    back = read_ply(path)
    if binary:
        assert back.points.tobytes() == cloud.points.tobytes()
    else:
        np.testing.assert_allclose(back.points, cloud.points, atol=1e-6)
    if colored:
        np.testing.assert_array_equal(back.colors, cloud.colors)


def test_ground_truth_rows_of_the_survey(tmp_path):
    p = write_text(tmp_path / "gt.csv", HEADER + "1,87,89,177,-0.9985,-0.0523,0.0175\n"
                   "6,359,40,89,0.0112,-0.6427,0.7660\n")
    s1, s6 = read_ground_truth(p)
    assert (s1.id, s1.strike_deg, s1.dip_deg, s1.dipdir_deg) == (1, 87, 89, 177)
    assert (s6.id, s6.strike_deg, s6.dip_deg, s6.dipdir_deg) == (6, 359, 40, 89)
    assert np.linalg.norm(s1.normal) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(s6.normal, [0.0112, -0.6427, 0.7660], atol=1e-3)


def test_ground_truth_dip_out_of_range_names_row(tmp_path):
    p = write_text(tmp_path / "gt.csv", HEADER + "1,87,89,177,-0.9985,-0.0523,0.0175\n"
                   "2,4,95,94,-0.0697,-0.9974,0.0175\n")
    with pytest.raises(ValidationError, match="row 2"):
        read_ground_truth(p)


def test_ground_truth_bad_header(tmp_path):
    p = write_text(tmp_path / "gt.csv", "id,strike,dip\n1,2,3\n")
    with pytest.raises(SchemaError):
        read_ground_truth(p)


def test_ground_truth_round_trip(tmp_path):
    truth = [GroundTruthSurface(3, 10.5, 45.0, 100.5, (0.6, 0.0, 0.8))]
    write_ground_truth(truth, tmp_path / "t.csv")
    assert read_ground_truth(tmp_path / "t.csv") == truth


def test_bundled_fixture_has_six_surfaces():
    truth = read_ground_truth(default_ground_truth_path())
    assert [t.id for t in truth] == [1, 2, 3, 4, 5, 6]

"""Point cloud (PLY) and ground-truth (CSV) input/output."""

import csv
import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArgumentError, ParseError, SchemaError, ValidationError
from .geometry import as_points

_PLY_TYPES = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "i2", "int16": "i2",
    "ushort": "u2", "uint16": "u2",
    "int": "i4", "int32": "i4",
    "uint": "u4", "uint32": "u4",
    "float": "f4", "float32": "f4",
    "double": "f8", "float64": "f8",
}

GROUND_TRUTH_HEADER = ("id", "strike", "dip", "dipdir", "nx", "ny", "nz")


@dataclass
class PointCloud:
    """Ordered 3D points with optional per-point RGB colors."""

    points: np.ndarray
    colors: Optional[np.ndarray] = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        if self.colors is not None:
            self.colors = np.asarray(self.colors, dtype=np.uint8).reshape(-1, 3)
            if len(self.colors) != len(self.points):
                raise InvalidArgumentError("colors and points differ in length")

    def __len__(self):
        return len(self.points)

    def subset(self, mask_or_index):
        colors = None if self.colors is None else self.colors[mask_or_index]
        return PointCloud(self.points[mask_or_index], colors)


@dataclass(frozen=True)
class GroundTruthSurface:
    id: int
    strike_deg: float
    dip_deg: float
    dipdir_deg: float
    normal: tuple

    def to_dict(self):
        return {
            "id": self.id,
            "strike": self.strike_deg,
            "dip": self.dip_deg,
            "dipdir": self.dipdir_deg,
            "normal": list(self.normal),
        }


@dataclass
class _Element:
    name: str
    count: int
    properties: list  # (name, dtype) or (name, ("list", count_dtype, item_dtype))


def _parse_header(raw):
    end = raw.find(b"end_header")
    if not raw.startswith(b"ply"):
        raise ParseError("missing 'ply' magic", offset=0)
    if end < 0:
        raise ParseError("header has no 'end_header'", offset=len(raw))
    nl = raw.find(b"\n", end)
    if nl < 0:
        raise ParseError("header not terminated by newline", offset=len(raw))
    body_offset = nl + 1

    fmt = None
    elements = []
    offset = 0
    for line in raw[:body_offset].split(b"\n"):
        line_offset = offset
        offset += len(line) + 1
        text = line.decode("ascii", errors="replace").strip()
        if not text or text in ("ply", "end_header"):
            continue
        words = text.split()
        key = words[0]
        if key in ("comment", "obj_info"):
            continue
        if key == "format":
            if len(words) != 3 or words[2] != "1.0":
                raise ParseError(f"bad format line {text!r}", offset=line_offset)
            if words[1] not in ("ascii", "binary_little_endian"):
                raise ParseError(f"unsupported PLY encoding {words[1]!r}", offset=line_offset)
            fmt = words[1]
        elif key == "element":
            if len(words) != 3 or not words[2].isdigit():
                raise ParseError(f"bad element line {text!r}", offset=line_offset)
            elements.append(_Element(words[1], int(words[2]), []))
        elif key == "property":
            if not elements:
                raise ParseError("property before any element", offset=line_offset)
            if len(words) == 5 and words[1] == "list":
                if words[2] not in _PLY_TYPES or words[3] not in _PLY_TYPES:
                    raise ParseError(f"unknown list type in {text!r}", offset=line_offset)
                spec = ("list", _PLY_TYPES[words[2]], _PLY_TYPES[words[3]])
                elements[-1].properties.append((words[4], spec))
            elif len(words) == 3 and words[1] in _PLY_TYPES:
                elements[-1].properties.append((words[2], _PLY_TYPES[words[1]]))
            else:
                raise ParseError(f"bad property line {text!r}", offset=line_offset)
        else:
            raise ParseError(f"unknown header keyword {key!r}", offset=line_offset)
    if fmt is None:
        raise ParseError("header has no format line", offset=0)
    return fmt, elements, body_offset


def _vertex_from_table(table, names):
    for axis in "xyz":
        if axis not in names:
            raise SchemaError(f"vertex element lacks required property {axis!r}")
    points = np.column_stack([np.asarray(table[a], dtype=np.float64) for a in "xyz"])
    colors = None
    if all(c in names for c in ("red", "green", "blue")):
        colors = np.column_stack([np.asarray(table[c]) for c in ("red", "green", "blue")])
        colors = colors.astype(np.uint8)
    return PointCloud(points, colors)


def _read_ascii(raw, elements, body_offset):
    pos = body_offset
    for el in elements:
        names = [p[0] for p in el.properties]
        rows = []
        for _ in range(el.count):
            nl = raw.find(b"\n", pos)
            if nl < 0:
                nl = len(raw)
            if pos >= len(raw):
                raise ParseError(f"truncated body in element {el.name!r}", offset=pos)
            words = raw[pos:nl].split()
            if el.name == "vertex":
                if any(isinstance(p[1], tuple) for p in el.properties):
                    raise SchemaError("list properties on vertex are not supported")
                if len(words) < len(names):
                    raise ParseError(f"short vertex row ({len(words)} of {len(names)} values)", offset=pos)
                try:
                    rows.append([float(w) for w in words[: len(names)]])
                except ValueError as exc:
                    raise ParseError(f"non-numeric vertex value: {exc}", offset=pos) from None
            pos = nl + 1
        if el.name == "vertex":
            data = np.array(rows, dtype=np.float64).reshape(el.count, len(names))
            return _vertex_from_table({n: data[:, i] for i, n in enumerate(names)}, names)
    raise SchemaError("PLY file has no vertex element")


def _read_binary(raw, elements, body_offset):
    pos = body_offset
    for el in elements:
        if any(isinstance(p[1], tuple) for p in el.properties):
            if el.name == "vertex":
                raise SchemaError("list properties on vertex are not supported")
            raise ParseError(f"cannot skip list element {el.name!r} preceding vertex", offset=pos)
        dtype = np.dtype([(n, "<" + t) for n, t in el.properties])
        nbytes = dtype.itemsize * el.count
        if pos + nbytes > len(raw):
            raise ParseError(
                f"truncated body in element {el.name!r}: need {nbytes} bytes, have {len(raw) - pos}",
                offset=len(raw),
            )
        if el.name == "vertex":
            table = np.frombuffer(raw, dtype=dtype, count=el.count, offset=pos)
            return _vertex_from_table(table, [p[0] for p in el.properties])
        pos += nbytes
    raise SchemaError("PLY file has no vertex element")


def read_ply(path):
    """Read the vertex element of an ASCII or binary little-endian PLY file."""
    with open(path, "rb") as fh:
        raw = fh.read()
    fmt, elements, body_offset = _parse_header(raw)
    if fmt == "ascii":
        return _read_ascii(raw, elements, body_offset)
    return _read_binary(raw, elements, body_offset)


def write_ply(cloud, path, binary=True):
    """Write ``cloud`` as PLY; coordinates are stored as doubles."""
    if len(cloud) == 0:
        raise InvalidArgumentError("cannot write an empty point cloud")
    points = as_points(cloud.points, "cloud.points")
    has_color = cloud.colors is not None
    header = [
        "ply",
        f"format {'binary_little_endian' if binary else 'ascii'} 1.0",
        f"element vertex {len(points)}",
        "property double x",
        "property double y",
        "property double z",
    ]
    if has_color:
        header += ["property uchar red", "property uchar green", "property uchar blue"]
    header.append("end_header")
    head = ("\n".join(header) + "\n").encode("ascii")

    with open(path, "wb") as fh:
        fh.write(head)
        if binary:
            fields = [("x", "<f8"), ("y", "<f8"), ("z", "<f8")]
            if has_color:
                fields += [("red", "u1"), ("green", "u1"), ("blue", "u1")]
            table = np.empty(len(points), dtype=fields)
            table["x"], table["y"], table["z"] = points.T
            if has_color:
                table["red"], table["green"], table["blue"] = cloud.colors.T
            fh.write(table.tobytes())
        else:
            lines = []
            for i, p in enumerate(points):
                row = " ".join(repr(float(c)) for c in p)
                if has_color:
                    row += " " + " ".join(str(int(c)) for c in cloud.colors[i])
                lines.append(row)
            fh.write(("\n".join(lines) + "\n").encode("ascii"))


def _parse_float(value, row, column):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"row {row}: column {column!r} is not a number: {value!r}") from None
    if not math.isfinite(out):
        raise ValidationError(f"row {row}: column {column!r} is not finite")
    return out


def read_ground_truth(path):
    """Load ground-truth surfaces from a CSV with header ``id,strike,dip,dipdir,nx,ny,nz``.

    Normals are renormalized on load (tabulated values carry 4 decimals).
    """
    surfaces = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = tuple(h.strip() for h in (reader.fieldnames or ()))
        if header != GROUND_TRUTH_HEADER:
            raise SchemaError(f"ground-truth header must be {','.join(GROUND_TRUTH_HEADER)}, got {header}")
        for row_no, row in enumerate(reader, start=1):
            row = {k.strip(): v for k, v in row.items()}
            try:
                sid = int(row["id"])
            except (TypeError, ValueError):
                raise ValidationError(f"row {row_no}: id is not an integer: {row['id']!r}") from None
            strike = _parse_float(row["strike"], row_no, "strike")
            dip = _parse_float(row["dip"], row_no, "dip")
            dipdir = _parse_float(row["dipdir"], row_no, "dipdir")
            normal = np.array([_parse_float(row[c], row_no, c) for c in ("nx", "ny", "nz")])
            if not 0.0 <= strike < 360.0:
                raise ValidationError(f"row {row_no}: strike {strike} outside [0, 360)")
            if not 0.0 <= dipdir < 360.0:
                raise ValidationError(f"row {row_no}: dipdir {dipdir} outside [0, 360)")
            if not 0.0 <= dip <= 90.0:
                raise ValidationError(f"row {row_no}: dip {dip} outside [0, 90]")
            norm = float(np.linalg.norm(normal))
            if abs(norm - 1.0) > 0.01:
                raise ValidationError(f"row {row_no}: normal is not unit length (|n| = {norm:.4f})")
            surfaces.append(GroundTruthSurface(sid, strike, dip, dipdir, tuple(normal / norm)))
    return surfaces


def write_ground_truth(surfaces, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(GROUND_TRUTH_HEADER)
        for s in surfaces:
            writer.writerow([s.id, repr(s.strike_deg), repr(s.dip_deg), repr(s.dipdir_deg),
                             *(repr(float(c)) for c in s.normal)])


def default_ground_truth_path():
    """Path of the bundled fixture holding the observatory field survey (ground truth)."""
    return os.path.join(os.path.dirname(__file__), "data", "observatory_ground_truth.csv")

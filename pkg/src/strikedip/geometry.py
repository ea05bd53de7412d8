"""3D primitives: Rodrigues rotations and analytic 3x3 symmetric eigensolves."""

import math

import numpy as np

from .errors import InvalidArgumentError

_SYM_TOL = 1e-9
_UNIT_TOL = 1e-9


def as_points(X, name="X"):
    """Validate and return an ``(n, 3)`` float64 array of finite points."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1 and arr.shape[0] == 3:
        arr = arr.reshape(1, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise InvalidArgumentError(f"{name} must have shape (n, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} contains non-finite coordinates")
    return arr


def as_unit_vector(v, name="vector", tol=_UNIT_TOL):
    arr = np.asarray(v, dtype=np.float64).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} must be a finite 3-vector")
    if abs(np.linalg.norm(arr) - 1.0) > tol:
        raise InvalidArgumentError(f"{name} must be unit-norm (|v| = {np.linalg.norm(arr)!r})")
    return arr


def normalize(v):
    arr = np.asarray(v, dtype=np.float64)
    norm = np.linalg.norm(arr)
    if norm == 0.0 or not np.isfinite(norm):
        raise InvalidArgumentError("cannot normalize a zero or non-finite vector")
    return arr / norm


def skew(axis):
    """Cross-product matrix K such that ``K @ w == axis x w``."""
    x, y, z = (float(c) for c in axis)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rodrigues_rotation(axis, angle):
    """Rotation by ``angle`` radians about the unit vector ``axis``.

    Uses ``R = I + sin(a) K + (1 - cos(a)) K^2`` with ``K`` the skew matrix of
    the axis.
    """
    angle = float(angle)
    if not math.isfinite(angle):
        raise InvalidArgumentError("rotation angle must be finite")
    K = skew(as_unit_vector(axis, "axis"))
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)


def canonical_sign(v):
    """Flip ``v`` so z >= 0; exact ties fall back to +x, then +y."""
    v = np.asarray(v, dtype=np.float64)
    for c in (v[2], v[0], v[1]):
        if c > 0.0:
            return v.copy()
        if c < 0.0:
            return -v
    return v.copy()


def _jacobi_eigh(a):
    """Cyclic Jacobi sweeps on a symmetric 3x3 given as nested lists.

    Returns (eigenvalues, eigenvectors-as-columns) with plain floats.
    """
    a = [row[:] for row in a]
    v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    scale = max(abs(a[i][j]) for i in range(3) for j in range(3))
    if scale == 0.0:
        return [0.0, 0.0, 0.0], v
    for _ in range(50):
        off = a[0][1] ** 2 + a[0][2] ** 2 + a[1][2] ** 2
        if off <= (1e-22 * scale) ** 2:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p][q]
            if apq == 0.0:
                continue
            theta = (a[q][q] - a[p][p]) / (2.0 * apq)
            t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            for k in range(3):
                akp, akq = a[k][p], a[k][q]
                a[k][p] = c * akp - s * akq
                a[k][q] = s * akp + c * akq
            for k in range(3):
                apk, aqk = a[p][k], a[q][k]
                a[p][k] = c * apk - s * aqk
                a[q][k] = s * apk + c * aqk
            for k in range(3):
                vkp, vkq = v[k][p], v[k][q]
                v[k][p] = c * vkp - s * vkq
                v[k][q] = s * vkp + c * vkq
    return [a[0][0], a[1][1], a[2][2]], v


def symmetric_eigh(A):
    """All eigenpairs of a symmetric 3x3, ascending by eigenvalue."""
    A = np.asarray(A, dtype=np.float64)
    if A.shape != (3, 3) or not np.all(np.isfinite(A)):
        raise InvalidArgumentError("expected a finite 3x3 matrix")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.T)) > _SYM_TOL * scale:
        raise InvalidArgumentError("matrix is not symmetric")
    sym = 0.5 * (A + A.T)
    w, V = _jacobi_eigh(sym.tolist())
    order = sorted(range(3), key=lambda i: (w[i], i))
    vals = np.array([w[i] for i in order])
    vecs = np.array([[V[r][i] for i in order] for r in range(3)])
    return vals, vecs


def smallest_eigenvector(A):
    """Eigenpair of a symmetric 3x3 with the smallest eigenvalue.

    The eigenvector is sign-normalized with :func:`canonical_sign`.
    """
    vals, vecs = symmetric_eigh(A)
    return float(vals[0]), canonical_sign(normalize(vecs[:, 0]))


def largest_eigenvector(A):
    vals, vecs = symmetric_eigh(A)
    return float(vals[2]), canonical_sign(normalize(vecs[:, 2]))


def acute_angle(n1, n2):
    """Unsigned acute angle in radians between two lines with directions n1, n2."""
    c = abs(float(np.dot(n1, n2)))
    return math.acos(min(1.0, c))

"""Input validation helpers shared across modules."""

import numpy as np

from .errors import DimensionMismatch, ValidationError

DET_TOL = 1e-9
DET_RENORM_LIMIT = 1e-3


def as_matrix(g, n=None):
    """Coerce to a finite square float array, optionally of size n."""
    m = np.asarray(g, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch("expected a square matrix, got shape %s" % (m.shape,))
    if n is not None and m.shape[0] != n:
        raise DimensionMismatch("expected size %d, got %d" % (n, m.shape[0]))
    if not np.isfinite(m).all():
        raise ValidationError("matrix has non-finite entries")
    return m


def as_group_element(g, n=None):
    """Validate unit determinant; renormalize mild drift, reject beyond.

    Drift in (DET_TOL, DET_RENORM_LIMIT] is corrected by scaling;
    larger deviations raise.  det <= 0 always raises.
    """
    m = as_matrix(g, n)
    d = np.linalg.det(m)
    if d <= 0:
        raise ValidationError("determinant %g is not positive" % d)
    err = abs(d - 1.0)
    if err <= DET_TOL:
        return m
    if err <= DET_RENORM_LIMIT:
        return m / d ** (1.0 / m.shape[0])
    raise ValidationError("determinant %.17g too far from 1" % d)


def as_vector(v, n=None):
    a = np.asarray(v, dtype=float)
    if a.ndim != 1:
        raise DimensionMismatch("expected a vector, got shape %s" % (a.shape,))
    if n is not None and a.shape[0] != n:
        raise DimensionMismatch("expected length %d, got %d" % (n, a.shape[0]))
    if not np.isfinite(a).all():
        raise ValidationError("vector has non-finite entries")
    return a


def check_orthogonal(q, tol=1e-12):
    q = np.asarray(q, dtype=float)
    defect = np.abs(q.T @ q - np.eye(q.shape[0])).max()
    if defect > tol:
        raise ValidationError("orthogonality defect %g exceeds %g" % (defect, tol))
    return q


def orthogonality_defect(q):
    q = np.asarray(q, dtype=float)
    return float(np.abs(q.T @ q - np.eye(q.shape[0])).max())

"""SL(n,R) elements, Iwasawa decomposition, flags, and attractor flags.

The decomposition g = k exp(H) n uses the positive-diagonal QR convention:
k is special orthogonal, H is the trace-zero log-diagonal, n is unit upper
triangular.  Flags are carried by special-orthogonal frames, considered
modulo right multiplication by sign-diagonal matrices.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import as_group_element, as_matrix, orthogonality_defect
from .errors import NotRegular, NumericFailure, ValidationError

ORTHOGONALITY_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-10
FLAG_TOL = 1e-8


def _qr_pos(m):
    """QR with positive diagonal R; works on single matrices or stacks."""
    q, r = np.linalg.qr(m)
    d = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    d = np.where(d == 0.0, 1.0, d)
    q = q * d[..., None, :]
    r = r * d[..., :, None]
    return q, r


@dataclass(frozen=True)
class IwasawaFactors:
    """Triple (k, H, n_u) with g = k diag(exp(H)) n_u."""

    k: np.ndarray
    H: np.ndarray
    n_u: np.ndarray

    def reconstruct(self):
        return self.k @ (np.exp(self.H)[:, None] * self.n_u)

    def residual(self, g):
        g = np.asarray(g, dtype=float)
        return float(np.abs(self.reconstruct() - g).max() / max(np.abs(g).max(), 1.0))


def iwasawa_decompose(g):
    """Factor a unit-determinant matrix as k exp(H) n_u."""
    g = as_group_element(g)
    q, r = _qr_pos(g)
    diag = np.diagonal(r)
    if not (diag > 0).all() or not np.isfinite(r).all():
        raise NumericFailure("triangular factor is singular or non-finite")
    H = np.log(diag)
    n_u = r / diag[:, None]
    return IwasawaFactors(k=q, H=H, n_u=n_u)


class Flag:
    """Full flag represented by a special-orthogonal frame.

    Column j of the frame spans the j-th step of V_1 c ... c V_{n-1};
    two frames differing by right sign-diagonal factors carry the same
    flag.
    """

    def __init__(self, frame):
        frame = as_matrix(frame)
        defect = orthogonality_defect(frame)
        if defect > ORTHOGONALITY_TOL:
            raise ValidationError(
                "frame orthogonality defect %g exceeds %g" % (defect, ORTHOGONALITY_TOL)
            )
        if np.linalg.det(frame) < 0:
            frame = frame.copy()
            frame[:, -1] = -frame[:, -1]
        frame.setflags(write=False)
        self.frame = frame

    @property
    def n(self):
        return self.frame.shape[0]

    @classmethod
    def from_matrix(cls, m):
        """Flag spanned by the leading columns of an invertible matrix."""
        m = as_matrix(m)
        if abs(np.linalg.det(m)) < 1e-300:
            raise ValidationError("matrix is numerically singular")
        q, _ = _qr_pos(m)
        return cls(q)

    def subspace(self, d):
        """Orthonormal basis of V_d as an (n, d) array."""
        return self.frame[:, :d]

    def sign_flipped(self, signs):
        """Same flag under a sign-diagonal frame change (testing hook)."""
        s = np.asarray(signs, dtype=float)
        return Flag(self.frame * s[None, :])

    def __repr__(self):
        return "Flag(n=%d)" % self.n


class PartialFlag:
    """View of a full frame retaining only the dimensions Theta keeps."""

    def __init__(self, frame_or_flag, theta):
        if isinstance(frame_or_flag, Flag):
            full = frame_or_flag
        else:
            full = Flag(frame_or_flag)
        if theta.n != full.n:
            raise ValidationError("Theta rank %d vs frame size %d" % (theta.n, full.n))
        self.frame = full.frame
        self.theta = theta

    @property
    def n(self):
        return self.frame.shape[0]

    def subspace(self, d):
        return self.frame[:, :d]

    def __repr__(self):
        return "PartialFlag(n=%d, theta=%s)" % (self.n, sorted(self.theta.indices))


def standard_flag(n):
    """Flag of the coordinate chain span(e_1) c span(e_1,e_2) c ..."""
    return Flag(np.eye(int(n)))


def random_flag(n, rng):
    """Haar-ish random flag from a Gaussian frame."""
    q, _ = _qr_pos(rng.standard_normal((int(n), int(n))))
    return Flag(q)


def act(g, x):
    """Left action on flags: the frame of g applied to the frame of x."""
    g = as_group_element(g, x.n)
    q, _ = _qr_pos(g @ x.frame)
    if isinstance(x, PartialFlag):
        return PartialFlag(q, x.theta)
    return Flag(q)


def a_cocycle(g, x):
    """Iwasawa a-part of g at the flag x; trace-zero n-vector of nats."""
    g = as_group_element(g, x.n)
    _, r = _qr_pos(g @ x.frame)
    diag = np.diagonal(r)
    if not (diag > 0).all() or not np.isfinite(diag).all():
        raise NumericFailure("degenerate triangular factor in cocycle")
    return np.log(diag)


def _largest_principal_angle(u, v):
    """Largest principal angle between equal-dimension column spans.

    arccos of the cosine loses half the digits near zero angle, so small
    angles are taken from the sine instead: the norm of the part of v
    orthogonal to u.
    """
    s = np.linalg.svd(u.T @ v, compute_uv=False)
    c = np.clip(s.min(), -1.0, 1.0)
    if c * c > 0.5:
        w = v - u @ (u.T @ v)
        sn = np.linalg.svd(w, compute_uv=False)
        return float(np.arcsin(np.clip(sn.max(), -1.0, 1.0)))
    return float(np.arccos(c))


def flag_distance(x, y):
    """Max over retained dimensions of the largest principal angle."""
    if x.n != y.n:
        raise ValidationError("flags of different sizes %d vs %d" % (x.n, y.n))
    xp = isinstance(x, PartialFlag)
    yp = isinstance(y, PartialFlag)
    if xp != yp:
        raise ValidationError("cannot compare full and partial flags")
    if xp:
        if x.theta != y.theta:
            raise ValidationError("partial flags of different types")
        dims = x.theta.kept_dimensions()
    else:
        dims = range(1, x.n)
    best = 0.0
    for d in dims:
        ang = _largest_principal_angle(x.subspace(d), y.subspace(d))
        if ang > best:
            best = ang
    return best


def project(x, theta):
    """Partial flag of type Theta under the canonical fibration."""
    return PartialFlag(x, theta)


def _iterate_to_fixed(g, x, tol, max_iter):
    """Orthogonal iteration with squaring warmup, then single-step polish.

    Returns (flag, converged).  The squaring phase applies g^(2^j) with
    Frobenius renormalization (flags are scale-invariant); the polish
    phase verifies the single-step fixed-point property the caller needs.
    """
    frame = x.frame
    b = g.copy()
    for _ in range(60):
        q, _ = _qr_pos(b @ frame)
        frame = q
        b = b @ b
        norm = np.linalg.norm(b)
        if not np.isfinite(norm) or norm == 0.0:
            break
        b /= norm
    cur = Flag(q)
    for _ in range(max_iter):
        nxt = act(g, cur)
        if flag_distance(nxt, cur) <= tol:
            return nxt, True
        cur = nxt
    return cur, False


def _perturbed(flag, rng, scale=1e-3):
    z = rng.standard_normal((flag.n, flag.n)) * scale
    q, _ = _qr_pos(flag.frame + z)
    return Flag(q)


def attractor_flag(g, rng=None, tol=FLAG_TOL, max_iter=500, restarts=3):
    """Limit flag of orthogonal iteration for a regular element.

    Starts at the standard flag; a candidate fixed point is accepted only
    if iteration restarted from a small random perturbation returns to it
    (rejecting saddle fixed points), with randomized restarts otherwise.
    """
    g = as_group_element(g)
    if rng is None:
        rng = np.random.default_rng(0)
    start = standard_flag(g.shape[0])
    for attempt in range(restarts + 1):
        cand, ok = _iterate_to_fixed(g, start, tol, max_iter)
        if ok:
            probe, ok2 = _iterate_to_fixed(g, _perturbed(cand, rng), tol, max_iter)
            if ok2 and flag_distance(probe, cand) <= 10.0 * tol:
                return cand
            if ok2:
                # The perturbation escaped: cand was a saddle, the probe's
                # limit is the better candidate next round.
                start = probe
                continue
        start = random_flag(g.shape[0], rng)
    raise NotRegular("no attracting fixed flag found (eigenvalue-modulus ties?)")

"""The rank-one worked example: the SL(2,R) cone-compression semigroup.

W is the cone spanned by (1,1) and (1,-1).  In the coordinates of those
rays a matrix belongs to S_W exactly when it has nonnegative entries, so
members can be drawn directly (no rejection beyond the determinant
sign).  Three quantitative facts are exercised here:

  * every member satisfies ||g(1,0)|| >= 1/2, and the infimum over the
    semigroup is 1, attained at the identity;
  * the hyperbolic family h_t stays in S_W for all t, yet its alpha
    cocycle at lines approaching [(1,-1)] tends to exp(-2t): no uniform
    positive lower bound holds near the control-set boundary;
  * upper-triangular members fix the standard line and satisfy mu >= 1,
    so their mu_1 cocycle there is >= 1.
"""

import numpy as np

from .group import Flag
from .semigroups import ConeCompression

RAYS = ((1.0, 1.0), (1.0, -1.0))
_M = np.array([[1.0, 1.0], [1.0, -1.0]])
_M_INV = np.linalg.inv(_M)


def cone_spec():
    return ConeCompression([np.array(r) for r in RAYS])


def h_t(t):
    """The hyperbolic one-parameter family, in S_W for every t."""
    t = float(t)
    return np.array([[np.cosh(t), np.sinh(t)], [np.sinh(t), np.cosh(t)]])


def sample_members(count, seed):
    """Members of S_W as a (count, 2, 2) stack.

    Drawn in ray coordinates: nonnegative matrices with positive
    determinant, rescaled to determinant one, then conjugated back.
    The identity (where ||g(1,0)|| attains its infimum 1) and a thin
    family of boundary members are mixed in so the observed range
    touches the extremes.
    """
    count = int(count)
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    out = np.empty((count, 2, 2))
    out[0] = np.eye(2)
    filled = 1
    n_tri = min(count - filled, max(0, count // 100))
    if n_tri:
        a = rng.exponential(0.1, n_tri)
        tri = np.zeros((n_tri, 2, 2))
        tri[:, 0, 0] = 1.0
        tri[:, 1, 1] = 1.0
        half = n_tri // 2
        tri[:half, 0, 1] = a[:half]
        tri[half:, 1, 0] = a[half:]
        out[filled : filled + n_tri] = _M @ tri @ _M_INV
        filled += n_tri
    while filled < count:
        draw = rng.exponential(1.0, (2 * (count - filled) + 8, 2, 2))
        det = draw[:, 0, 0] * draw[:, 1, 1] - draw[:, 0, 1] * draw[:, 1, 0]
        keep = draw[det > 1e-12]
        keep = keep / np.sqrt(det[det > 1e-12])[:, None, None]
        take = min(len(keep), count - filled)
        out[filled : filled + take] = _M @ keep[:take] @ _M_INV
        filled += take
    return out


def first_column_norms(members):
    """||g (1,0)|| for a stack of members."""
    return np.hypot(members[:, 0, 0], members[:, 1, 0])


def sample_upper_triangular_members(count, seed, mu_max=4.0):
    """Upper-triangular members [[mu, x], [0, 1/mu]] of S_W.

    Feasibility in ray coordinates pins x to [1/mu - mu, mu - 1/mu],
    an interval that is nonempty exactly when mu >= 1; mu and x are
    drawn uniformly from that region (mu log-uniform).
    """
    rng = np.random.default_rng(seed)
    mu = np.exp(rng.uniform(0.0, np.log(mu_max), int(count)))
    lo = 1.0 / mu - mu
    hi = mu - 1.0 / mu
    x = rng.uniform(lo, hi)
    g = np.zeros((int(count), 2, 2))
    g[:, 0, 0] = mu
    g[:, 0, 1] = x
    g[:, 1, 1] = 1.0 / mu
    return g


def boundary_line_flag(distance):
    """Flag at the given angular distance from the line [(1,-1)]."""
    v = np.array([1.0, -1.0]) / np.sqrt(2.0)
    w = np.array([1.0, 1.0]) / np.sqrt(2.0)
    base = np.column_stack([v, w])
    c, s = np.cos(float(distance)), np.sin(float(distance))
    rot = np.array([[c, -s], [s, c]])
    return Flag(rot @ base)


def alpha_value_along_h(t, flag):
    """The displayed non-uniformity quotient at a line flag.

    Equals ((a^2+b^2) cosh 2t + 2ab sinh 2t) / (a^2+b^2) for the line
    spanned by (a, b); also equals exp(2 log rho_{mu_1}(h_t, flag)).
    """
    a, b = flag.frame[:, 0]
    t = float(t)
    return float(
        ((a * a + b * b) * np.cosh(2 * t) + 2 * a * b * np.sinh(2 * t))
        / (a * a + b * b)
    )

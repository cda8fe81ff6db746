"""Cocycle evaluation in log domain, with an independent volume oracle.

rho_lambda(g, x) = exp(lambda(a(g, x))) multiplies along words, so all
arithmetic here stays on logarithms; words of length 10^3 with entries of
norm ~10 would overflow the exponential otherwise.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_group_element, as_matrix, orthogonality_defect
from .errors import ValidationError
from .group import Flag, _qr_pos, a_cocycle
from .roots import Functional, RootDatum

BLOCK_TOL = 1e-10


def _as_functional(lam, n):
    if isinstance(lam, Functional):
        if lam.n != n:
            raise ValidationError("functional length %d vs rank %d" % (lam.n, n))
        return lam
    return Functional(np.asarray(lam, dtype=float))


def rho_log(lam, g, x):
    """log rho_lambda(g, x) = lambda(a(g, x)), in nats."""
    lam = _as_functional(lam, x.n)
    return lam(a_cocycle(g, x))


def rho_mu_oracle(i, g, x):
    """log rho_{mu_i} as i-volume distortion of the leading frame columns.

    Computed from the Gram determinant of the image, a path independent
    of the triangular factorization; i = n is allowed as a diagnostic and
    returns log|det g|.
    """
    i = int(i)
    if not 1 <= i <= x.n:
        raise ValidationError("weight index %d outside 1..%d" % (i, x.n))
    g = as_group_element(g, x.n)
    m = g @ x.frame[:, :i]
    sign, logdet = np.linalg.slogdet(m.T @ m)
    if sign <= 0:
        raise ValidationError("degenerate image volume")
    return 0.5 * float(logdet)


def rho_alpha_log(i, g, x, datum=None):
    """log rho_{alpha_i}(g, x) for the i-th simple root."""
    if datum is None:
        datum = RootDatum(x.n)
    return rho_log(datum.simple_root(i), g, x)


@dataclass
class WordTrace:
    """Per-prefix accumulated lambda-cocycle logs along a word."""

    letters: list
    base: Flag
    partial_logs: np.ndarray
    final_flag: Flag = field(repr=False, default=None)

    @property
    def length(self):
        return len(self.letters)

    @property
    def final_log(self):
        return float(self.partial_logs[-1])


def word_cocycle(lam, letters, base):
    """Accumulate log rho_lambda along prefixes of a word.

    Letters act left to right: prefix m is g_m ... g_1.  The moving flag
    is re-orthonormalized every step, so the accumulated value stays
    accurate for words far beyond the reach of a direct product.
    """
    if len(letters) == 0:
        raise ValidationError("empty word")
    lam = _as_functional(lam, base.n)
    c = lam.coeffs
    frame = base.frame
    logs = np.empty(len(letters))
    total = 0.0
    for m, g in enumerate(letters):
        g = as_group_element(g, base.n)
        q, r = _qr_pos(g @ frame)
        diag = np.diagonal(r)
        if not (diag > 0).all() or not np.isfinite(diag).all():
            raise ValidationError("degenerate step at letter %d" % m)
        total += float(c @ np.log(diag))
        logs[m] = total
        frame = q
    return WordTrace(
        letters=list(letters), base=base, partial_logs=logs, final_flag=Flag(frame)
    )


def is_block_orthogonal(u, theta, tol=BLOCK_TOL):
    """Structural K_Theta test: special orthogonal, supported on the
    diagonal blocks of the Theta-merged partition."""
    u = as_matrix(u, theta.n)
    if orthogonality_defect(u) > tol:
        return False
    if np.linalg.det(u) < 0:
        return False
    mask = np.zeros((theta.n, theta.n), dtype=bool)
    for block in theta.blocks():
        lo, hi = block[0] - 1, block[-1]
        mask[lo:hi, lo:hi] = True
    return bool(np.abs(u[~mask]).max(initial=0.0) <= tol)


def restriction_invariance_check(lam, theta, g, x, u):
    """Defect of cocycle invariance under a K_Theta move in the fiber of x.

    The move is applied in the frame of x (u conjugated by the frame), so
    it changes x within its Theta-fiber only.  For lambda vanishing on the
    Theta-part of a the defect should be at numerical zero; functionals
    violating that condition serve as negative controls and are not
    rejected here.
    """
    if not is_block_orthogonal(u, theta):
        raise ValidationError("u is not block-special-orthogonal for this Theta")
    g = as_group_element(g, x.n)
    u_x = x.frame @ as_matrix(u, x.n) @ x.frame.T
    return abs(rho_log(lam, g @ u_x, x) - rho_log(lam, g, x))

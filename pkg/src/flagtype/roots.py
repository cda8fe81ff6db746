"""Root data for A_{n-1}: simple roots, fundamental weights, Weyl group.

Functionals on the trace-zero diagonal subalgebra are stored as raw
n-vectors of coefficients; adding a constant vector does not change the
value on trace-zero arguments, so vectors are canonicalized (by mean
centering) only inside the pairing.
"""

from itertools import permutations

import numpy as np

from ._validation import as_vector
from .errors import DimensionMismatch, ValidationError

WEYL_RANK_LIMIT = 8


class Functional:
    """Linear functional H -> sum(c_i h_i) on trace-zero diagonals."""

    def __init__(self, coeffs):
        self.coeffs = as_vector(coeffs)

    @property
    def n(self):
        return self.coeffs.shape[0]

    def __call__(self, H):
        H = as_vector(H, self.n)
        return float(self.coeffs @ H)

    def __add__(self, other):
        return Functional(self.coeffs + _coeffs(other, self.n))

    def __sub__(self, other):
        return Functional(self.coeffs - _coeffs(other, self.n))

    def __mul__(self, scalar):
        return Functional(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __repr__(self):
        return "Functional(%s)" % np.array2string(self.coeffs, separator=", ")


def _coeffs(lam, n=None):
    if isinstance(lam, Functional):
        return as_vector(lam.coeffs, n)
    return as_vector(lam, n)


def pairing(lam, beta):
    """Euclidean pairing of the mean-centered coefficient vectors.

    Computed as a.b - sum(a) sum(b)/n, which is exact in floating point
    whenever either sum vanishes exactly (true for every simple root).
    """
    a = _coeffs(lam)
    b = _coeffs(beta)
    if a.shape != b.shape:
        raise DimensionMismatch("functionals of length %d vs %d" % (a.shape[0], b.shape[0]))
    return float(a @ b - a.sum() * b.sum() / a.shape[0])


class ThetaSet:
    """Subset of simple-root indices {1, ..., n-1}."""

    def __init__(self, indices, n):
        if n < 2:
            raise ValidationError("rank parameter must be >= 2")
        idx = frozenset(int(i) for i in indices)
        for i in idx:
            if not 1 <= i <= n - 1:
                raise ValidationError("root index %d outside 1..%d" % (i, n - 1))
        self.indices = idx
        self.n = n

    def __contains__(self, i):
        return int(i) in self.indices

    def __iter__(self):
        return iter(sorted(self.indices))

    def __len__(self):
        return len(self.indices)

    def __eq__(self, other):
        return (
            isinstance(other, ThetaSet)
            and self.n == other.n
            and self.indices == other.indices
        )

    def __hash__(self):
        return hash((self.n, self.indices))

    def __repr__(self):
        return "ThetaSet(%s, n=%d)" % (sorted(self.indices), self.n)

    def complement(self):
        return ThetaSet(set(range(1, self.n)) - self.indices, self.n)

    def blocks(self):
        """Partition of {1..n} obtained by merging i with i+1 for i in Theta.

        Block boundaries sit exactly at the dimensions d whose root alpha_d
        is outside Theta; those are the dimensions a type-Theta partial flag
        retains.
        """
        out = []
        block = [1]
        for d in range(1, self.n):
            if d in self.indices:
                block.append(d + 1)
            else:
                out.append(block)
                block = [d + 1]
        out.append(block)
        return out

    def kept_dimensions(self):
        """Dimensions d with alpha_d outside Theta (V_d is semantically real)."""
        return [d for d in range(1, self.n) if d not in self.indices]


class WeylElement:
    """Permutation of {1..n} acting on a-coordinates by position shuffle."""

    def __init__(self, perm):
        self.perm = tuple(int(p) for p in perm)
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValidationError("not a permutation of 0..n-1: %s" % (self.perm,))

    @property
    def n(self):
        return len(self.perm)

    def __mul__(self, other):
        if self.n != other.n:
            raise DimensionMismatch("Weyl elements of different rank")
        return WeylElement(tuple(self.perm[p] for p in other.perm))

    def act(self, H):
        """(w H)_{perm[i]} = H_i, i.e. coordinate i is carried to slot perm[i]."""
        H = as_vector(H, self.n)
        out = np.empty_like(H)
        out[list(self.perm)] = H
        return out

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.perm == other.perm

    def __hash__(self):
        return hash(self.perm)

    def __repr__(self):
        return "WeylElement%s" % (self.perm,)


def identity_weyl(n):
    return WeylElement(range(n))


def simple_reflection(i, n):
    """Reflection at the i-th simple root: the transposition (i, i+1)."""
    if not 1 <= i <= n - 1:
        raise ValidationError("root index %d outside 1..%d" % (i, n - 1))
    perm = list(range(n))
    perm[i - 1], perm[i] = perm[i], perm[i - 1]
    return WeylElement(perm)


class RootDatum:
    """Simple roots and fundamental weights of A_{n-1} for SL(n, R)."""

    def __init__(self, n):
        n = int(n)
        if n < 2:
            raise ValidationError("rank parameter must be >= 2")
        self.n = n
        self.simple_roots = []
        self.fundamental_weights = []
        for i in range(1, n):
            alpha = np.zeros(n)
            alpha[i - 1] = 1.0
            alpha[i] = -1.0
            mu = np.zeros(n)
            mu[:i] = 1.0
            self.simple_roots.append(Functional(alpha))
            self.fundamental_weights.append(Functional(mu))

    def simple_root(self, i):
        """alpha_i = e_i - e_{i+1}, 1-indexed."""
        return self.simple_roots[self._check(i)]

    def fundamental_weight(self, i):
        """mu_i = e_1 + ... + e_i, 1-indexed."""
        return self.fundamental_weights[self._check(i)]

    def _check(self, i):
        i = int(i)
        if not 1 <= i <= self.n - 1:
            raise ValidationError("root index %d outside 1..%d" % (i, self.n - 1))
        return i - 1

    def theta(self, indices):
        return ThetaSet(indices, self.n)

    def in_partial_chamber(self, lam, theta, tol=1e-9):
        """True iff <alpha_i, lam> = 0 on Theta and > 0 off Theta."""
        if theta.n != self.n:
            raise DimensionMismatch("Theta rank %d vs datum rank %d" % (theta.n, self.n))
        for i in range(1, self.n):
            p = pairing(self.simple_root(i), lam)
            if i in theta:
                if abs(p) > tol:
                    return False
            elif p <= tol:
                return False
        return True

    def weyl_theta_members(self, theta):
        """Subgroup of W generated by the reflections at roots in Theta.

        Exhaustive closure; guarded to rank <= WEYL_RANK_LIMIT.
        """
        if self.n > WEYL_RANK_LIMIT:
            raise ValidationError(
                "Weyl enumeration limited to n <= %d, got n = %d"
                % (WEYL_RANK_LIMIT, self.n)
            )
        if theta.n != self.n:
            raise DimensionMismatch("Theta rank %d vs datum rank %d" % (theta.n, self.n))
        gens = [simple_reflection(i, self.n) for i in theta]
        members = {identity_weyl(self.n)}
        frontier = list(members)
        while frontier:
            nxt = []
            for w in frontier:
                for s in gens:
                    ws = s * w
                    if ws not in members:
                        members.add(ws)
                        nxt.append(ws)
            frontier = nxt
        return members

    def weyl_group(self):
        """Full Weyl group as permutations (rank-guarded)."""
        if self.n > WEYL_RANK_LIMIT:
            raise ValidationError(
                "Weyl enumeration limited to n <= %d, got n = %d"
                % (WEYL_RANK_LIMIT, self.n)
            )
        return {WeylElement(p) for p in permutations(range(self.n))}

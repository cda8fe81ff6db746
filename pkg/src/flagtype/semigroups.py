"""Semigroup specifications, word sampling, and core-point estimation.

Two kinds of semigroup are supported: finitely generated sets of
unit-determinant matrices (with multiplicative epsilon-thickening, since
a finite generating set has empty interior), and compression semigroups
of pointed polyhedral cones, where membership is decidable.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linprog

from ._parallel import parallel_map
from ._validation import as_group_element, as_matrix, as_vector
from .errors import (
    MembershipUndecidable,
    NoRegularWordFound,
    NotRegular,
    RejectionBudgetExhausted,
    ValidationError,
)
from .group import Flag, a_cocycle, act, attractor_flag

MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class SamplingParams:
    """Knobs shared by word sampling and core-point search."""

    samples_per_length: int = 16
    length_min: int = 8
    length_max: int = 1024
    regularity_budget: int = 64
    proposal_scale: float = 0.5
    rejection_budget: int = 200

    def __post_init__(self):
        if self.length_min < 1 or self.length_max < self.length_min:
            raise ValidationError("bad length ladder bounds")
        if self.samples_per_length < 1 or self.regularity_budget < 1:
            raise ValidationError("budgets must be positive")

    def ladder(self):
        """Geometric length ladder from length_min to length_max."""
        out = []
        bound = self.length_min
        while bound < self.length_max:
            out.append(bound)
            bound *= 2
        out.append(self.length_max)
        return out


class SemigroupSpec:
    """Base for semigroup descriptions; see the two variants below."""

    n = None

    def validate(self):
        raise NotImplementedError


class FinitelyGenerated(SemigroupSpec):
    """Semigroup generated by finitely many unit-determinant matrices.

    epsilon > 0 targets the thickened semigroup whose letters are
    generators times exp(epsilon Z) for random trace-zero Z of unit
    Frobenius scale; a finite set of matrices itself has empty interior,
    which the theory this estimator relies on does not cover.
    """

    def __init__(self, generators, epsilon=1e-3):
        if len(generators) == 0:
            raise ValidationError("at least one generator required")
        gens = [as_group_element(g) for g in generators]
        n = gens[0].shape[0]
        self.generators = [as_group_element(g, n) for g in gens]
        self.n = n
        if epsilon < 0:
            raise ValidationError("epsilon must be >= 0")
        self.epsilon = float(epsilon)

    def validate(self):
        return self

    def __repr__(self):
        return "FinitelyGenerated(%d generators, n=%d, epsilon=%g)" % (
            len(self.generators),
            self.n,
            self.epsilon,
        )


class ConeCompression(SemigroupSpec):
    """Compression semigroup of a pointed polyhedral cone W.

    Membership of g means g maps every extreme ray of W back into W.
    Rays must span R^n and the cone must be pointed; both are verified
    at construction, pointedness by linear feasibility.
    """

    def __init__(self, rays):
        rays = [as_vector(r) for r in rays]
        if len(rays) == 0:
            raise ValidationError("at least n rays required")
        n = rays[0].shape[0]
        ray_mat = np.column_stack([as_vector(r, n) for r in rays])
        if np.linalg.matrix_rank(ray_mat) < n:
            raise ValidationError("rays do not span R^n")
        norms = np.linalg.norm(ray_mat, axis=0)
        if (norms == 0).any():
            raise ValidationError("zero ray")
        self.n = n
        self.rays = ray_mat
        self.simplicial = ray_mat.shape[1] == n
        self._ray_inv = np.linalg.inv(ray_mat) if self.simplicial else None
        if not self._pointed():
            raise ValidationError("cone is not pointed")

    def _pointed(self):
        """Pointed iff no nonzero nonnegative combination of rays is zero."""
        m = self.rays.shape[1]
        a_eq = np.vstack([self.rays, np.ones((1, m))])
        b_eq = np.concatenate([np.zeros(self.n), [1.0]])
        res = linprog(np.zeros(m), A_eq=a_eq, b_eq=b_eq, bounds=(0, None))
        return not res.success

    def ray_coords(self, vectors):
        """Coordinates in the ray basis (simplicial cones only)."""
        if not self.simplicial:
            raise ValidationError("ray coordinates need a simplicial cone")
        return self._ray_inv @ vectors

    def contains_vector(self, v, tol=MEMBERSHIP_TOL):
        """Is v in the cone W?"""
        v = as_vector(v, self.n)
        scale = max(1.0, float(np.abs(v).max()))
        if self.simplicial:
            return bool((self.ray_coords(v) >= -tol * scale).all())
        m = self.rays.shape[1]
        res = linprog(
            np.zeros(m), A_eq=self.rays, b_eq=v, bounds=(0, None),
            method="highs",
        )
        return bool(res.success)

    def compresses(self, g, tol=MEMBERSHIP_TOL):
        """Does g map W into itself?  Checked on extreme rays."""
        g = as_matrix(g, self.n)
        images = g @ self.rays
        if self.simplicial:
            coords = self._ray_inv @ images
            scale = np.maximum(1.0, np.abs(coords).max(axis=0))
            return bool((coords >= -tol * scale).all())
        return all(self.contains_vector(images[:, j], tol) for j in range(images.shape[1]))

    def interior_margin(self, g):
        """Smallest normalized ray coordinate over images of extreme rays.

        Positive values witness strict compression (images interior to W);
        simplicial cones only.
        """
        g = as_matrix(g, self.n)
        coords = self._ray_inv @ (g @ self.rays)
        coords = coords / np.linalg.norm(coords, axis=0, keepdims=True)
        return float(coords.min())

    def validate(self):
        return self

    def __repr__(self):
        return "ConeCompression(n=%d, %d rays)" % (self.n, self.rays.shape[1])


def membership(spec, g):
    """Decide g in S.  Only cone-compression specs are decidable."""
    if isinstance(spec, ConeCompression):
        g = as_group_element(g, spec.n)
        return spec.compresses(g)
    if isinstance(spec, FinitelyGenerated):
        raise MembershipUndecidable(
            "membership in a finitely generated semigroup has no decision procedure"
        )
    raise ValidationError("unknown semigroup spec %r" % (spec,))


@dataclass
class SampledWord:
    """A word in the semigroup: letters, their product, and provenance."""

    letters: list
    product: np.ndarray
    length: int
    letter_indices: list = None
    seed_key: tuple = None

    def __post_init__(self):
        if self.length != len(self.letters):
            raise ValidationError("length field disagrees with letters")


def _random_traceless(rng, n):
    z = rng.standard_normal((n, n))
    z -= np.trace(z) / n * np.eye(n)
    nrm = np.linalg.norm(z)
    if nrm == 0.0:
        z = np.eye(n) * 0.0
        z[0, 0], z[1, 1] = 1.0, -1.0
        nrm = np.sqrt(2.0)
    return z / nrm


def _unit_det(m):
    d = np.linalg.det(m)
    if d <= 0 or not np.isfinite(d):
        raise ValidationError("perturbation left the orientation component")
    return m / d ** (1.0 / m.shape[0])


def _stable_product(letters):
    p = letters[0]
    for g in letters[1:]:
        p = g @ p
    return p


def sample_word(spec, length, seed, params=None):
    """Draw one word from the semigroup, deterministically in the seed.

    Finitely generated: uniform letters, each thickened multiplicatively
    by exp(epsilon Z) and renormalized to unit determinant.  Cone
    compression: a constrained walk whose every prefix product compresses
    the cone, with per-step rejection sampling of Gaussian proposals.
    """
    if length < 1:
        raise ValidationError("length must be >= 1")
    params = params or SamplingParams()
    rng = np.random.default_rng(seed)
    if isinstance(spec, FinitelyGenerated):
        idx = rng.integers(0, len(spec.generators), size=length)
        letters = []
        for i in idx:
            g = spec.generators[int(i)]
            if spec.epsilon > 0:
                z = _random_traceless(rng, spec.n)
                g = _unit_det(g @ expm(spec.epsilon * z))
            letters.append(g)
        return SampledWord(
            letters=letters,
            product=_stable_product(letters),
            length=length,
            letter_indices=[int(i) for i in idx],
        )
    if isinstance(spec, ConeCompression):
        letters = []
        prefix = np.eye(spec.n)
        for pos in range(length):
            accepted = False
            for _ in range(params.rejection_budget):
                step = expm(params.proposal_scale * _random_traceless(rng, spec.n))
                step = _unit_det(step)
                cand = step @ prefix
                if spec.compresses(cand):
                    letters.append(step)
                    prefix = cand
                    accepted = True
                    break
            if not accepted:
                raise RejectionBudgetExhausted(
                    "no feasible step at position %d after %d proposals"
                    % (pos, params.rejection_budget)
                )
            nrm = np.abs(prefix).max()
            if nrm > 1e100:
                prefix = prefix / nrm
        return SampledWord(
            letters=letters, product=_stable_product(letters), length=length
        )
    raise ValidationError("unknown semigroup spec %r" % (spec,))


@dataclass
class CorePointEstimate:
    """Attractor flag of a regular sampled word, with the word as witness."""

    flag: Flag
    witness: SampledWord
    contraction_rate: float


def _core_ladder(params):
    """Candidate word lengths for the regularity search, starting at 1."""
    out = []
    bound = 1
    while bound < params.length_max:
        out.append(bound)
        bound *= 2
    out.append(params.length_max)
    return out


def estimate_core_point(spec, params=None, seed=0):
    """Find a regular word and return its attractor flag as the core proxy.

    Words of doubling lengths are sampled until one has a well-separated
    attractor; cone words must additionally compress strictly (positive
    interior margin), the numerical stand-in for interiority.
    """
    params = params or SamplingParams()
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    ladder = _core_ladder(params)
    per_rung = max(1, params.regularity_budget // len(ladder))
    tried = 0
    children = root.spawn(params.regularity_budget + len(ladder))
    child_iter = iter(children)
    for length in ladder:
        for _ in range(per_rung):
            if tried >= params.regularity_budget:
                break
            tried += 1
            child = next(child_iter)
            try:
                word = sample_word(spec, length, child, params)
            except RejectionBudgetExhausted:
                continue
            try:
                rng = np.random.default_rng(child.spawn(1)[0])
                flag = attractor_flag(word.product, rng=rng)
            except (NotRegular, ValidationError):
                continue
            if isinstance(spec, ConeCompression) and spec.simplicial:
                if spec.interior_margin(word.product) <= 0:
                    continue
            h = a_cocycle(word.product, flag)
            gaps = h[:-1] - h[1:]
            if gaps.min() <= 0:
                continue
            return CorePointEstimate(
                flag=flag, witness=word, contraction_rate=float(gaps.min())
            )
    raise NoRegularWordFound(
        "no regular word in %d candidates up to length %d"
        % (tried, params.length_max)
    )


def ics_sample(spec, x0, count, max_length, seed, params=None):
    """Flags word . x0 for sampled words: an empirical sketch of the
    invariant control set around the core point (diagnostic only)."""
    params = params or SamplingParams()
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = root.spawn(count)

    def one(child):
        rng = np.random.default_rng(child)
        length = int(rng.integers(1, max_length + 1))
        word = sample_word(spec, length, child.spawn(1)[0], params)
        return act(word.product, x0)

    return parallel_map(one, children)

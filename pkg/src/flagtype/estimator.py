"""Per-root cocycle decay curves and the flag-type decision layer.

For each simple root alpha the estimator tracks the running minimum of
log rho_alpha(word, x0) over sampled words as word length grows.  The
dichotomy this probes: the minimum stays bounded below for roots outside
the flag type and decays linearly to -inf for roots inside it.

Finite sampling can only bound the true infimum from above, so passive
word draws are combined with two adversarial strategies: a greedy beam
walk that extends words by the locally worst admissible letter, and
cyclic powering of the best word found so far (a word with negative
per-letter rate drives the cocycle down geometrically under repetition).
A three-way decision with an abstain state guards against overclaiming.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from sklearn.base import BaseEstimator

from ._parallel import parallel_map
from .cocycles import rho_log, word_cocycle
from .errors import FlagTypeError, ValidationError
from .group import _qr_pos
from .roots import RootDatum, ThetaSet
from .semigroups import (
    ConeCompression,
    FinitelyGenerated,
    SamplingParams,
    estimate_core_point,
    sample_word,
)

DECAYING = "Decaying"
BOUNDED_BELOW = "BoundedBelow"
INCONCLUSIVE = "Inconclusive"

FEAS_TOL = 1e-12


@dataclass(frozen=True)
class Thresholds:
    """Data-relative decision thresholds.

    slope_min is slope_min_fraction times the median per-letter gain
    |min_log_rho(L)| / L of the curve under test; floors sit at
    -floor_nats for both decisions (a Decaying call needs the final
    minimum below the floor, a BoundedBelow call needs it above).
    """

    slope_min_fraction: float = 0.01
    floor_nats: float = 8.0

    @property
    def floor_min(self):
        return -self.floor_nats

    @property
    def floor_max(self):
        return -self.floor_nats


@dataclass
class RootDecayCurve:
    """Running minimum of log rho_alpha over words of length <= L."""

    root_index: int
    lengths: list
    min_log_rho: list
    samples_per_length: int

    def __post_init__(self):
        diffs = np.diff(self.min_log_rho)
        if diffs.size and diffs.max() > 1e-12:
            raise ValidationError("running minimum must be non-increasing")


def _seedseq(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


class _BatchWalk:
    """Vectorized semigroup walks evaluating one root cocycle per step.

    Each of B walkers extends a word one letter at a time; every prefix
    of a cone walk stays inside the compression semigroup (checked in
    cone coordinates).  In greedy mode the admissible candidate with the
    smallest cocycle increment is chosen, otherwise a random admissible
    one.  Letters, per-walker totals and prefix minima are retained so
    the best prefix can be reused for powering.
    """

    def __init__(self, spec, x0, alpha, walkers, rng, params, greedy, candidates):
        self.spec = spec
        self.n = x0.n
        self.alpha = np.asarray(alpha, dtype=float)
        self.b = int(walkers)
        self.rng = rng
        self.params = params
        self.greedy = bool(greedy)
        # The identity compresses any cone, so a greedy cone walker may
        # hold its state rather than accept an increasing letter; without
        # this the Perron drift compounds and the walker cannot dig back.
        self.idle_ok = bool(greedy) and isinstance(spec, ConeCompression)
        self.c = int(candidates)
        self.frames = np.broadcast_to(x0.frame, (self.b, self.n, self.n)).copy()
        self.totals = np.zeros(self.b)
        # prefix minima over nonempty prefixes only: the empty word is not
        # a semigroup element and must not enter the curve
        self.best = np.full(self.b, np.inf)
        self.letters = [[] for _ in range(self.b)]
        self.best_pos = np.full(self.b, -1, dtype=int)
        # per-position minimum across walkers, indexed by accepted length
        self.pos_min = np.full(params.length_max, np.inf)
        self.lens = np.zeros(self.b, dtype=int)
        self.length = 0
        if isinstance(spec, ConeCompression):
            if not spec.simplicial:
                raise ValidationError("batched walks require a simplicial cone")
            self.coords = np.broadcast_to(
                np.eye(self.n), (self.b, self.n, self.n)
            ).copy()
        else:
            self.coords = None

    def _propose(self):
        """Candidate letters (b, c, n, n) and admissibility mask."""
        b, c, n = self.b, self.c, self.n
        if isinstance(self.spec, FinitelyGenerated):
            gens = self.spec.generators
            idx = self.rng.integers(0, len(gens), size=(b, c))
            letters = np.stack(gens, axis=0)[idx]
            if self.spec.epsilon > 0:
                z = self.rng.standard_normal((b, c, n, n))
                tr = np.trace(z, axis1=-2, axis2=-1) / n
                z -= tr[..., None, None] * np.eye(n)
                z /= np.linalg.norm(z, axis=(-2, -1), keepdims=True)
                letters = letters @ expm(self.spec.epsilon * z)
                det = np.linalg.det(letters)
                letters /= det[..., None, None] ** (1.0 / n)
            feasible = np.ones((b, c), dtype=bool)
            new_coords = None
        else:
            z = self.rng.standard_normal((b, c, n, n))
            tr = np.trace(z, axis1=-2, axis2=-1) / n
            z -= tr[..., None, None] * np.eye(n)
            z /= np.linalg.norm(z, axis=(-2, -1), keepdims=True)
            letters = expm(self.params.proposal_scale * z)
            det = np.linalg.det(letters)
            letters /= det[..., None, None] ** (1.0 / n)
            step_cone = self.spec._ray_inv @ letters @ self.spec.rays
            new_coords = step_cone @ self.coords[:, None]
            scale = np.maximum(1.0, np.abs(new_coords).max(axis=(-2, -1)))
            feasible = (
                new_coords.min(axis=(-2, -1)) >= -FEAS_TOL * scale
            )
        return letters, feasible, new_coords

    def extend(self, steps):
        b, n = self.b, self.n
        eye = np.eye(n)
        for _ in range(int(steps)):
            letters, feasible, new_coords = self._propose()
            q, r = _qr_pos(letters @ self.frames[:, None])
            diag = np.diagonal(r, axis1=-2, axis2=-1)
            inc = np.log(diag) @ self.alpha
            inc = np.where(feasible, inc, np.inf)
            if self.greedy:
                choice = np.argmin(inc, axis=1)
            else:
                # random admissible candidate, first index by a random shift
                shift = self.rng.integers(0, self.c, size=b)
                order = (np.arange(self.c)[None, :] + shift[:, None]) % self.c
                feas_shifted = np.take_along_axis(feasible, order, axis=1)
                first = np.argmax(feas_shifted, axis=1)
                choice = order[np.arange(b), first]
            ok = feasible[np.arange(b), choice]
            if self.idle_ok:
                ok = ok & (inc[np.arange(b), choice] <= 0.0)
                ok = ok & (self.lens < self.params.length_max)
            self.length += 1
            for w in range(b):
                if not ok[w]:
                    if self.idle_ok:
                        # Hold the state and redraw next round; an identity
                        # letter would burn a position without progress, and
                        # dropping it leaves the same value at shorter length.
                        continue
                    # Passive walk with no admissible proposal: idle on the
                    # identity letter, which compresses any cone, so the
                    # idling prefix is still a semigroup word and may score.
                    self.letters[w].append(eye)
                    self.lens[w] += 1
                    j = self.lens[w] - 1
                    self.pos_min[j] = min(self.pos_min[j], self.totals[w])
                    if self.totals[w] < self.best[w]:
                        self.best[w] = self.totals[w]
                        self.best_pos[w] = self.lens[w] - 1
                    continue
                k = choice[w]
                self.letters[w].append(letters[w, k])
                self.frames[w] = q[w, k]
                self.totals[w] += inc[w, k]
                self.lens[w] += 1
                if self.coords is not None:
                    cc = new_coords[w, k]
                    self.coords[w] = cc / max(1.0, np.abs(cc).max())
                j = self.lens[w] - 1
                self.pos_min[j] = min(self.pos_min[j], self.totals[w])
                if self.totals[w] <= self.best[w] or not np.isfinite(self.best[w]):
                    self.best[w] = self.totals[w]
                    self.best_pos[w] = self.lens[w] - 1

    def position_minima(self):
        """Per-position minimum across walkers; entry j is a word length j+1."""
        return self.pos_min

    def best_min(self):
        """Smallest prefix value seen across walkers (0 for empty words)."""
        return float(self.best.min())

    def best_prefix(self):
        """Letters of the best prefix across walkers, or None."""
        w = int(np.argmin(self.best))
        if self.best_pos[w] < 0:
            return None
        return self.letters[w][: self.best_pos[w] + 1]


def _power_min(alpha, letters, x0, target_len):
    """Prefix-min of the cyclic repetition of a word, length target_len."""
    reps = max(1, math.ceil(target_len / len(letters)))
    seq = (list(letters) * reps)[:target_len]
    trace = word_cocycle(alpha, seq, x0)
    return float(trace.partial_logs.min())


def decay_curve(spec, x0, i, params=None, seed=0, datum=None):
    """Empirical minimum of log rho_alpha_i over sampled words, by length.

    Words come from fresh passive batches per rung, one deep greedy beam,
    wide short greedy beams, and cyclic powers of the best prefix found,
    all seeded from independent substreams.  A word of length j found by
    any leg is a semigroup element at every ladder length >= j, so the
    curve is assembled from per-length minima across the whole run rather
    than from discovery order; converged curves come out flat.
    """
    params = params or SamplingParams()
    datum = datum or RootDatum(x0.n)
    alpha = datum.simple_root(i).coeffs
    ladder = params.ladder()
    length_max = ladder[-1]
    ss = _seedseq(seed)
    beam_ss, iid_ss, wide_ss = ss.spawn(3)
    n_iid = max(1, params.samples_per_length // 2)
    n_beam = max(2, min(16, params.samples_per_length - n_iid))
    by_length = np.full(length_max, np.inf)
    if isinstance(spec, ConeCompression):
        by_length[0] = 0.0  # the identity is itself a compressing word
    best_word = None
    best_word_min = np.inf

    def fold(walk):
        nonlocal best_word, best_word_min
        pm = walk.position_minima()
        np.minimum(by_length[: pm.size], pm, out=by_length[: pm.size])
        if walk.best_min() < best_word_min:
            best_word_min = walk.best_min()
            best_word = walk.best_prefix()

    beam = _BatchWalk(
        spec, x0, alpha, n_beam, np.random.default_rng(beam_ss), params,
        greedy=True, candidates=8,
    )
    beam.extend(length_max)
    fold(beam)
    iid_children = iid_ss.spawn(len(ladder))
    wide_children = wide_ss.spawn(len(ladder))
    for rung, length in enumerate(ladder):
        fresh = _BatchWalk(
            spec, x0, alpha, n_iid,
            np.random.default_rng(iid_children[rung]), params,
            greedy=False,
            candidates=1 if isinstance(spec, FinitelyGenerated) else 8,
        )
        fresh.extend(length)
        fold(fresh)
        if length <= 4 * params.length_min:
            # Plateau values live on short words; wide throwaway beams at
            # the short lengths hunt them with breadth instead of depth.
            wide = _BatchWalk(
                spec, x0, alpha, 8 * n_beam,
                np.random.default_rng(wide_children[rung]), params,
                greedy=True, candidates=8,
            )
            wide.extend(length)
            fold(wide)
    running = np.minimum.accumulate(by_length)
    mins = []
    value = np.inf
    for length in ladder:
        value = min(value, float(running[length - 1]))
        if best_word:
            value = min(value, _power_min(alpha, best_word, x0, length))
        mins.append(value)
    return RootDecayCurve(
        root_index=int(i),
        lengths=list(ladder),
        min_log_rho=mins,
        samples_per_length=params.samples_per_length,
    )


def classify(curve, thresholds=None):
    """Three-way decision on one decay curve.

    Least-squares slope over the top half of the ladder; Decaying needs
    slope <= -slope_min and a final minimum below the floor, BoundedBelow
    needs |slope| < slope_min and a final minimum above it.
    """
    thresholds = thresholds or Thresholds()
    lengths = np.asarray(curve.lengths, dtype=float)
    values = np.asarray(curve.min_log_rho, dtype=float)
    if lengths.size < 4:
        raise ValidationError("classification needs at least 4 ladder points")
    half = lengths.size // 2
    ls, vs = lengths[half:], values[half:]
    slope = float(np.polyfit(ls, vs, 1)[0])
    gains = np.abs(values) / lengths
    slope_min = max(1e-12, thresholds.slope_min_fraction * float(np.median(gains)))
    final = float(values[-1])
    if slope <= -slope_min and final <= thresholds.floor_max:
        decision = DECAYING
    elif abs(slope) < slope_min and final >= thresholds.floor_min:
        decision = BOUNDED_BELOW
    else:
        decision = INCONCLUSIVE
    stats = {
        "slope": slope,
        "slope_min": slope_min,
        "final_min": final,
        "floor_min": thresholds.floor_min,
        "floor_max": thresholds.floor_max,
    }
    return decision, stats


@dataclass
class FlagTypeReport:
    """Estimated flag type with the evidence behind it."""

    theta_hat: ThetaSet
    curves: dict
    decisions: dict
    stats: dict
    core_point: object
    seed: int
    params: SamplingParams
    thresholds: Thresholds
    cross_check: dict = None

    def inconclusive_roots(self):
        return sorted(i for i, d in self.decisions.items() if d == INCONCLUSIVE)

    def to_dict(self):
        """JSON-ready summary (witness letters elided, product kept)."""
        core = self.core_point
        return {
            "n": core.flag.n,
            "seed": int(self.seed),
            "theta_hat": sorted(self.theta_hat.indices),
            "decisions": {str(i): d for i, d in sorted(self.decisions.items())},
            "stats": {
                str(i): {k: _json_num(v) for k, v in sorted(s.items())}
                for i, s in sorted(self.stats.items())
            },
            "curves": {
                str(i): {
                    "lengths": [int(v) for v in c.lengths],
                    "min_log_rho": [_json_num(v) for v in c.min_log_rho],
                    "samples_per_length": int(c.samples_per_length),
                }
                for i, c in sorted(self.curves.items())
                if c is not None
            },
            "core_point": {
                "flag_frame": _json_mat(core.flag.frame),
                "witness_length": int(core.witness.length),
                "witness_product": _json_mat(core.witness.product),
                "contraction_rate": _json_num(core.contraction_rate),
            },
            "params": {
                "samples_per_length": self.params.samples_per_length,
                "length_min": self.params.length_min,
                "length_max": self.params.length_max,
                "regularity_budget": self.params.regularity_budget,
                "proposal_scale": _json_num(self.params.proposal_scale),
                "rejection_budget": self.params.rejection_budget,
            },
            "thresholds": {
                "slope_min_fraction": _json_num(self.thresholds.slope_min_fraction),
                "floor_nats": _json_num(self.thresholds.floor_nats),
            },
            "cross_check": self.cross_check,
        }


def _json_num(v):
    return float("%.17g" % float(v))


def _json_mat(m):
    return [[_json_num(v) for v in row] for row in np.asarray(m, dtype=float)]


def estimate_flag_type(
    spec, params=None, seed=0, thresholds=None, datum=None, cross_check=False
):
    """Estimate the flag type: core point, per-root curves, decisions.

    The core point is held fixed across roots; roots run in parallel on
    independent substreams and are merged in index order, so the result
    is a pure function of (spec, params, seed).
    """
    params = params or SamplingParams()
    thresholds = thresholds or Thresholds()
    n = spec.n
    datum = datum or RootDatum(n)
    ss = _seedseq(seed)
    core_ss, roots_ss, cross_ss = ss.spawn(3)
    core = estimate_core_point(spec, params, core_ss)
    root_children = roots_ss.spawn(n - 1)

    def one_root(item):
        i, child = item
        try:
            curve = decay_curve(spec, core.flag, i, params, child, datum)
            decision, stats = classify(curve, thresholds)
            return i, curve, decision, stats
        except FlagTypeError as exc:
            return i, None, INCONCLUSIVE, {"error": str(exc)}

    results = parallel_map(one_root, list(zip(range(1, n), root_children)))
    curves = {i: c for i, c, _, _ in results}
    decisions = {i: d for i, _, d, _ in results}
    stats = {i: s for i, _, _, s in results}
    theta_hat = ThetaSet([i for i, d in decisions.items() if d == DECAYING], n)
    cc = None
    if cross_check:
        second = estimate_flag_type(
            spec, params, cross_ss, thresholds, datum, cross_check=False
        )
        cc = {
            "theta_hat": sorted(second.theta_hat.indices),
            "agrees": second.theta_hat == theta_hat,
        }
    return FlagTypeReport(
        theta_hat=theta_hat,
        curves=curves,
        decisions=decisions,
        stats=stats,
        core_point=core,
        seed=seed if isinstance(seed, int) else -1,
        params=params,
        thresholds=thresholds,
        cross_check=cc,
    )


def coset_uniform_check(
    spec, lam, t_power, grid, params=None, seed=0, count=64, datum=None
):
    """Empirical uniform lower bound for the cocycle over a coset S h.

    h is the witness word's product raised to t_power.  Reports the
    minimum of log rho_lambda(g h, y) over sampled g and grid flags y
    (the empirical log c), next to the same minimum without h, whose
    collapse near the control-set boundary is the negative control.
    """
    params = params or SamplingParams()
    ss = _seedseq(seed)
    core_ss, words_ss = ss.spawn(2)
    core = estimate_core_point(spec, params, core_ss)
    h = np.linalg.matrix_power(core.witness.product, int(t_power))
    children = words_ss.spawn(count)

    def one(child):
        rng = np.random.default_rng(child)
        length = int(rng.integers(1, params.length_min + 1))
        word = sample_word(spec, length, child.spawn(1)[0], params)
        with_h = min(rho_log(lam, word.product @ h, y) for y in grid)
        without_h = min(rho_log(lam, word.product, y) for y in grid)
        return with_h, without_h

    pairs = parallel_map(one, children)
    return {
        "t_power": int(t_power),
        "samples": int(count),
        "grid_size": len(grid),
        "empirical_c_log": float(min(p[0] for p in pairs)),
        "control_min_log": float(min(p[1] for p in pairs)),
        "witness_length": int(core.witness.length),
    }


class FlagTypeEstimator(BaseEstimator):
    """Estimator-style front end: configure once, fit on a semigroup spec.

    After fit, theta_hat_ holds the estimated flag type and report_ the
    full evidence.  There is no predict: the fitted object describes one
    semigroup rather than a map over samples, so only the fit/attribute
    half of the estimator protocol applies.
    """

    def __init__(
        self,
        samples_per_length=16,
        length_min=8,
        length_max=1024,
        regularity_budget=64,
        proposal_scale=0.35,
        rejection_budget=200,
        slope_min_fraction=0.01,
        floor_nats=8.0,
        seed=0,
    ):
        self.samples_per_length = samples_per_length
        self.length_min = length_min
        self.length_max = length_max
        self.regularity_budget = regularity_budget
        self.proposal_scale = proposal_scale
        self.rejection_budget = rejection_budget
        self.slope_min_fraction = slope_min_fraction
        self.floor_nats = floor_nats
        self.seed = seed

    def _params(self):
        return SamplingParams(
            samples_per_length=self.samples_per_length,
            length_min=self.length_min,
            length_max=self.length_max,
            regularity_budget=self.regularity_budget,
            proposal_scale=self.proposal_scale,
            rejection_budget=self.rejection_budget,
        )

    def _thresholds(self):
        return Thresholds(
            slope_min_fraction=self.slope_min_fraction,
            floor_nats=self.floor_nats,
        )

    def fit(self, X, y=None):
        """X is a SemigroupSpec; y is ignored (estimator protocol)."""
        if not isinstance(X, (FinitelyGenerated, ConeCompression)):
            raise ValidationError("fit expects a SemigroupSpec")
        report = estimate_flag_type(
            X, self._params(), self.seed, self._thresholds()
        )
        self.report_ = report
        self.theta_hat_ = report.theta_hat
        self.decisions_ = report.decisions
        return self

"""Acceptance gate: eleven end-to-end checks at fixed tolerances.

Each criterion records a single PASS/FAIL line (shown in the pytest
terminal summary) and asserts it.  Tolerances and sample counts are the
contract; loosening them here is not allowed.
"""

import os
import subprocess
import sys
import time

import numpy as np

from conftest import ACCEPTANCE_RESULTS, random_unit_det, random_functional_coeffs
from oracles import OCTANT_BRUTE_MINIMA, TOTALLY_POSITIVE_STEP

from flagtype import sl2demo
from flagtype.cocycles import (
    restriction_invariance_check,
    rho_log,
    rho_mu_oracle,
)
from flagtype.config import parse_config_file
from flagtype.estimator import BOUNDED_BELOW, DECAYING, estimate_flag_type
from flagtype.group import act, random_flag, standard_flag
from flagtype.roots import RootDatum

CONFIG_DIR = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
    "src",
    "flagtype",
    "configs",
)
SEEDS = (1, 2, 3, 4, 5)


def record(num, ok, detail):
    line = "criterion %02d: %s - %s" % (num, "PASS" if ok else "FAIL", detail)
    ACCEPTANCE_RESULTS.append(line)
    assert ok, line


def block_rotation(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def test_criterion_01_cone_lower_bound():
    """min ||g (1,0)|| over >= 1e5 cone members stays above 1/2."""
    t0 = time.perf_counter()
    count = 100_000
    members = sl2demo.sample_members(count, seed=101)
    spec = sl2demo.cone_spec()
    coords = np.linalg.inv(spec.rays) @ members @ spec.rays
    dets = np.linalg.det(members)
    in_cone = (
        float(coords.min()) >= -1e-9 and float(np.abs(dets - 1.0).max()) <= 1e-9
    )
    norms = sl2demo.first_column_norms(members)
    violations = int((norms < 0.5 - 1e-12).sum())
    elapsed = time.perf_counter() - t0
    ok = in_cone and violations == 0 and elapsed < 30.0
    record(
        1,
        ok,
        "%d members, min norm %.6f (bound 0.5), %d violations, %.1fs"
        % (count, float(norms.min()), violations, elapsed),
    )


def test_criterion_02_non_uniformity_curve():
    """Cocycle along h_t at a near-boundary line matches the closed form
    and approaches exp(-2t)."""
    t0 = time.perf_counter()
    datum = RootDatum(2)
    mu1 = datum.fundamental_weight(1)
    z = sl2demo.boundary_line_flag(1e-3)
    worst_closed = 0.0
    worst_limit = 0.0
    for t in (0.5, 1.0, 2.0):
        value = float(np.exp(2.0 * rho_log(mu1, sl2demo.h_t(t), z)))
        closed = sl2demo.alpha_value_along_h(t, z)
        worst_closed = max(worst_closed, abs(value - closed))
        worst_limit = max(worst_limit, abs(value - np.exp(-2.0 * t)))
    at_rest = float(np.exp(2.0 * rho_log(mu1, sl2demo.h_t(0.0), z)))
    elapsed = time.perf_counter() - t0
    ok = (
        worst_closed <= 1e-9
        and worst_limit <= 1e-2
        and abs(at_rest - 1.0) <= 1e-12
        and elapsed < 5.0
    )
    record(
        2,
        ok,
        "closed-form defect %.2e (tol 1e-9), distance to exp(-2t) %.2e "
        "(tol 1e-2), %.2fs" % (worst_closed, worst_limit, elapsed),
    )


def test_criterion_03_fixer_bound():
    """Upper-triangular members never contract the fixed line."""
    count = 10_000
    members = sl2demo.sample_upper_triangular_members(count, seed=303)
    datum = RootDatum(2)
    mu1 = datum.fundamental_weight(1)
    x0 = standard_flag(2)
    values = np.array(
        [np.exp(rho_log(mu1, g, x0)) for g in members[:200]]
    )
    norms = sl2demo.first_column_norms(members)
    agree = float(np.abs(values - norms[:200]).max()) <= 1e-12
    low = int((norms < 1.0 - 1e-12).sum())
    ok = agree and low == 0
    record(
        3,
        ok,
        "%d members, min rho_mu1 %.6f (bound 1), %d below, "
        "cocycle/norm agreement %s" % (count, float(norms.min()), low, agree),
    )


def test_criterion_04_reconstruction():
    """KAN reconstruction to 1e-10 relative, orthogonality to 1e-12."""
    from flagtype.group import iwasawa_decompose

    rng = np.random.default_rng(404)
    worst_rel = 0.0
    worst_orth = 0.0
    total = 0
    for n in (2, 3, 4, 5):
        eye = np.eye(n)
        for _ in range(2500):
            g = random_unit_det(rng, n)
            fac = iwasawa_decompose(g)
            rel = np.linalg.norm(fac.reconstruct() - g) / np.linalg.norm(g)
            worst_rel = max(worst_rel, rel)
            worst_orth = max(worst_orth, np.linalg.norm(fac.k.T @ fac.k - eye))
            total += 1
    ok = worst_rel <= 1e-10 and worst_orth <= 1e-12
    record(
        4,
        ok,
        "%d matrices over n in 2..5, worst relative error %.2e (tol 1e-10), "
        "worst orthogonality defect %.2e (tol 1e-12)" % (total, worst_rel, worst_orth),
    )


def test_criterion_05_cocycle_identity():
    """log rho(gh, x) = log rho(g, hx) + log rho(h, x) to 1e-9."""
    rng = np.random.default_rng(505)
    worst = 0.0
    total = 0
    for n in (2, 3, 4):
        for _ in range(334):
            lam = random_functional_coeffs(rng, n)
            g = random_unit_det(rng, n)
            h = random_unit_det(rng, n)
            x = random_flag(n, rng)
            lhs = rho_log(lam, g @ h, x)
            rhs = rho_log(lam, g, act(h, x)) + rho_log(lam, h, x)
            worst = max(worst, abs(lhs - rhs))
            total += 1
    ok = worst <= 1e-9
    record(
        5,
        ok,
        "%d cases over n in 2..4, worst identity defect %.2e (tol 1e-9)"
        % (total, worst),
    )


def test_criterion_06_oracle_equivalence():
    """Weight cocycle agrees with the volume-distortion oracle."""
    rng = np.random.default_rng(606)
    datum_cache = {n: RootDatum(n) for n in (2, 3, 4)}
    worst = 0.0
    total = 0
    while total < 1000:
        for n in (2, 3, 4):
            for i in range(1, n):
                g = random_unit_det(rng, n)
                x = random_flag(n, rng)
                a = rho_log(datum_cache[n].fundamental_weight(i), g, x)
                b = rho_mu_oracle(i, g, x)
                worst = max(worst, abs(a - b) / max(1.0, abs(b)))
                total += 1
    ok = worst <= 1e-9
    record(
        6,
        ok,
        "%d cases, worst relative defect %.2e (tol 1e-9)" % (total, worst),
    )


def test_criterion_07_restriction_invariance():
    """mu_2 is blind to K_Theta moves for Theta = {alpha_1}; mu_1 is not."""
    rng = np.random.default_rng(707)
    datum = RootDatum(3)
    theta = datum.theta([1])
    mu2 = datum.fundamental_weight(2)
    mu1 = datum.fundamental_weight(1)
    worst = 0.0
    for _ in range(1000):
        g = random_unit_det(rng, 3)
        x = random_flag(3, rng)
        u = block_rotation(rng.uniform(0.0, 2 * np.pi))
        worst = max(worst, restriction_invariance_check(mu2, theta, g, x, u))
    hits = 0
    for _ in range(1000):
        g = random_unit_det(rng, 3)
        x = random_flag(3, rng)
        u = block_rotation(rng.uniform(0.2, 2 * np.pi - 0.2))
        if restriction_invariance_check(mu1, theta, g, x, u) > 1e-3:
            hits += 1
    ok = worst <= 1e-9 and hits >= 990
    record(
        7,
        ok,
        "invariance defect %.2e over 1000 cases (tol 1e-9), negative "
        "control fired %d/1000 (needs >= 990)" % (worst, hits),
    )


def _run_bundled(name, seed):
    cfg = parse_config_file(os.path.join(CONFIG_DIR, name))
    return estimate_flag_type(cfg.to_spec(), cfg.sampling, seed, cfg.thresholds)


def _no_seed_contradiction(reports):
    """No root may be bounded-below at one seed and decaying at another."""
    for i in reports[0].decisions:
        seen = {r.decisions[i] for r in reports}
        if DECAYING in seen and BOUNDED_BELOW in seen:
            return False
    return True


def test_criterion_08_rank_one_cone():
    """sl2_cone.cfg estimates the empty flag type at five seeds."""
    reports = [_run_bundled("sl2_cone.cfg", s) for s in SEEDS]
    hits = sum(sorted(r.theta_hat.indices) == [] for r in reports)
    ok = hits == len(SEEDS) and _no_seed_contradiction(reports)
    record(
        8,
        ok,
        "theta_hat = {} at %d/%d seeds, no cross-seed contradiction"
        % (hits, len(SEEDS)),
    )


def test_criterion_09_octant_dichotomy():
    """sl3_octant.cfg: alpha_2 decays (slope <= -0.1), alpha_1 floors out."""
    drop = np.diff(OCTANT_BRUTE_MINIMA, axis=0)
    brute_ok = (
        float(drop[:, 1].max()) < -0.2  # alpha_2 keeps falling at every length
        and float(np.abs(drop[1:, 0]).max()) < 0.05  # alpha_1 stalls once settled
    )
    reports = [_run_bundled("sl3_octant.cfg", s) for s in SEEDS]
    hits = sum(sorted(r.theta_hat.indices) == [2] for r in reports)
    slopes = [r.stats[2]["slope"] for r in reports]
    finals = [r.stats[1]["final_min"] for r in reports]
    floors = [r.stats[1]["floor_min"] for r in reports]
    slope_ok = all(s <= -0.1 for s in slopes)
    floor_ok = all(f >= fl for f, fl in zip(finals, floors))
    ok = (
        brute_ok
        and hits == len(SEEDS)
        and slope_ok
        and floor_ok
        and _no_seed_contradiction(reports)
    )
    record(
        9,
        ok,
        "theta_hat = {alpha_2} at %d/%d seeds, alpha_2 slopes %.3f..%.3f "
        "(need <= -0.1), alpha_1 finals above floor: %s, short-word "
        "dichotomy in frozen table: %s"
        % (hits, len(SEEDS), max(slopes), min(slopes), floor_ok, brute_ok),
    )


def test_criterion_10_totally_positive():
    """sl3_totally_positive.cfg estimates the empty flag type at five seeds."""
    brute_ok = TOTALLY_POSITIVE_STEP > 0.5  # frozen per-letter growth rate
    reports = [_run_bundled("sl3_totally_positive.cfg", s) for s in SEEDS]
    hits = sum(sorted(r.theta_hat.indices) == [] for r in reports)
    ok = brute_ok and hits == len(SEEDS) and _no_seed_contradiction(reports)
    record(
        10,
        ok,
        "theta_hat = {} at %d/%d seeds, frozen per-letter growth %.3f > 0"
        % (hits, len(SEEDS), TOTALLY_POSITIVE_STEP),
    )


def test_criterion_11_worker_count_determinism(tmp_path):
    """Identical report bytes with 1 worker and with 4."""
    config = os.path.join(CONFIG_DIR, "sl3_octant.cfg")
    outputs = []
    for threads, sub in (("1", "a"), ("4", "b")):
        out_dir = tmp_path / sub
        env = dict(os.environ, FLAGTYPE_THREADS=threads)
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "flagtype.cli",
                "estimate",
                "--config",
                config,
                "--out-dir",
                str(out_dir),
            ],
            capture_output=True,
            text=True,
            env=env,
        )
        assert proc.returncode == 0, proc.stderr
        stem = parse_config_file(config).out_stem
        outputs.append(
            (
                (out_dir / ("%s_report.json" % stem)).read_bytes(),
                (out_dir / ("%s_curves.csv" % stem)).read_bytes(),
            )
        )
    same_json = outputs[0][0] == outputs[1][0]
    same_csv = outputs[0][1] == outputs[1][1]
    ok = same_json and same_csv
    record(
        11,
        ok,
        "FLAGTYPE_THREADS=1 vs 4: report bytes equal %s, curve bytes equal %s"
        % (same_json, same_csv),
    )

import numpy as np
import pytest

from conftest import random_functional_coeffs, random_unit_det

from flagtype.cocycles import (
    is_block_orthogonal,
    restriction_invariance_check,
    rho_alpha_log,
    rho_log,
    rho_mu_oracle,
    word_cocycle,
)
from flagtype.errors import ValidationError
from flagtype.group import Flag, act, random_flag, standard_flag
from flagtype.roots import RootDatum, ThetaSet


def block_rotation(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def test_cocycle_identity(rng):
    for n in (2, 3, 4):
        for _ in range(100):
            lam = random_functional_coeffs(rng, n)
            g = random_unit_det(rng, n)
            h = random_unit_det(rng, n)
            x = random_flag(n, rng)
            lhs = rho_log(lam, g @ h, x)
            rhs = rho_log(lam, g, act(h, x)) + rho_log(lam, h, x)
            assert abs(lhs - rhs) <= 1e-9


def test_weight_cocycle_matches_volume_oracle(rng):
    for n in (2, 3, 4):
        datum = RootDatum(n)
        for _ in range(80):
            g = random_unit_det(rng, n)
            x = random_flag(n, rng)
            for i in range(1, n):
                main = rho_log(datum.fundamental_weight(i), g, x)
                orac = rho_mu_oracle(i, g, x)
                assert abs(main - orac) <= 1e-9 * max(1.0, abs(orac))


def test_full_weight_is_determinant_diagnostic(rng):
    g = random_unit_det(rng, 3)
    x = random_flag(3, rng)
    assert rho_mu_oracle(3, g, x) == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(ValidationError):
        rho_mu_oracle(4, g, x)


def test_simple_root_cocycle_is_weight_quotient(rng):
    # alpha_i = 2 mu_i - mu_{i-1} - mu_{i+1} on the trace-zero subspace
    datum = RootDatum(3)
    g = random_unit_det(rng, 3)
    x = random_flag(3, rng)
    a1 = rho_alpha_log(1, g, x, datum)
    assert a1 == pytest.approx(
        2 * rho_mu_oracle(1, g, x) - rho_mu_oracle(2, g, x), abs=1e-9
    )
    a2 = rho_alpha_log(2, g, x, datum)
    assert a2 == pytest.approx(
        2 * rho_mu_oracle(2, g, x) - rho_mu_oracle(1, g, x) - rho_mu_oracle(3, g, x),
        abs=1e-9,
    )


def test_word_cocycle_matches_direct_product(rng):
    n = 3
    lam = random_functional_coeffs(rng, n)
    x = random_flag(n, rng)
    letters = [random_unit_det(rng, n) for _ in range(20)]
    trace = word_cocycle(lam, letters, x)
    assert trace.length == 20
    prod = np.eye(n)
    for m, g in enumerate(letters):
        prod = g @ prod
        direct = rho_log(lam, prod, x)
        # the direct product is the less accurate side once the prefix
        # gets ill-conditioned; the bound only needs to catch real bugs
        assert abs(trace.partial_logs[m] - direct) <= 1e-7 * max(1.0, abs(direct))
    assert trace.final_log == pytest.approx(rho_log(lam, prod, x), abs=1e-7)


def test_word_cocycle_survives_depths_that_overflow_products():
    # a direct product of these letters reaches magnitude exp(700) and
    # rank-collapses in float64; the per-step accumulation must not
    n = 2
    g = np.array([[2.0, 0.0], [1.0, 0.5]])
    x = standard_flag(n)
    trace = word_cocycle([1.0, -1.0], [g] * 1024, x)
    assert np.isfinite(trace.partial_logs).all()
    assert trace.partial_logs[-1] == pytest.approx(1024 * 2 * np.log(2.0), rel=1e-2)


def test_word_cocycle_rejects_empty_word(rng):
    with pytest.raises(ValidationError):
        word_cocycle([1.0, -1.0], [], standard_flag(2))


def test_block_orthogonal_structure():
    theta = ThetaSet([1], 3)
    assert is_block_orthogonal(np.eye(3), theta)
    assert is_block_orthogonal(block_rotation(0.8), theta)
    # rotation across the 2|3 cut leaves the Theta blocks
    c, s = np.cos(0.8), np.sin(0.8)
    across = np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    assert not is_block_orthogonal(across, theta)
    assert is_block_orthogonal(across, ThetaSet([2], 3))
    # reflections are rejected even when block-supported
    assert not is_block_orthogonal(np.diag([1.0, -1.0, 1.0]), theta)
    assert not is_block_orthogonal(np.diag([2.0, 0.5, 1.0]), theta)


def test_restriction_invariance_positive_case(rng):
    datum = RootDatum(3)
    theta = datum.theta([1])
    mu2 = datum.fundamental_weight(2)
    for _ in range(100):
        g = random_unit_det(rng, 3)
        x = random_flag(3, rng)
        u = block_rotation(rng.uniform(0.0, 2 * np.pi))
        assert restriction_invariance_check(mu2, theta, g, x, u) <= 1e-9


def test_restriction_invariance_negative_control(rng):
    datum = RootDatum(3)
    theta = datum.theta([1])
    mu1 = datum.fundamental_weight(1)
    hits = 0
    for _ in range(100):
        g = random_unit_det(rng, 3)
        x = random_flag(3, rng)
        u = block_rotation(rng.uniform(0.0, 2 * np.pi))
        if restriction_invariance_check(mu1, theta, g, x, u) > 1e-3:
            hits += 1
    assert hits >= 90


def test_restriction_check_rejects_bad_u(rng):
    datum = RootDatum(3)
    c, s = np.cos(0.5), np.sin(0.5)
    across = np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    with pytest.raises(ValidationError):
        restriction_invariance_check(
            datum.fundamental_weight(2),
            datum.theta([1]),
            random_unit_det(rng, 3),
            random_flag(3, rng),
            across,
        )

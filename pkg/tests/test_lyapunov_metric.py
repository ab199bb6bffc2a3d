import math

import numpy as np
import pytest

from cocycle_lab.cocycle import CocycleError, product
from cocycle_lab.fixtures import (
    LOG2,
    LOG3,
    chi_bernoulli,
    diag_cocycle,
    diag_splitting,
    triangular_cocycle,
    triangular_splitting,
)
from cocycle_lab.lyapunov_metric import (
    LyapunovNormContext,
    cone_check,
    direction_norm_profile,
    in_regular_set,
    k_epsilon,
    k_epsilon_profile,
    lyapunov_gram,
    lyapunov_norm,
    lyapunov_operator_norm,
    raw_comparison,
    verify_norm_estimate,
)
from cocycle_lab.measures import bernoulli
from cocycle_lab.shadowing import PseudoOrbit, shadow
from cocycle_lab.shift_space import constant_point, full_shift, periodic_point

FULL = full_shift()
A = diag_cocycle(FULL)
ZEROS = constant_point(FULL, 0)
ONES = constant_point(FULL, 1)
E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])


def ctx_for(eps=0.1, window=240, temper=48, tol=3e-5):
    return LyapunovNormContext(epsilon=eps, window=window,
                               rel_tail_tol=tol, temper_window=temper)


def series_oracle(eps, W=2000):
    """Direct summation of m * sum exp(-eps |n|) for the fixed-point case."""
    n = np.arange(-W, W + 1)
    return math.sqrt(2.0 * np.exp(-eps * np.abs(n)).sum())


# ---------------------------------------------------------------- closed forms

def test_norm_closed_form_at_fixed_point():
    # at 0^inf with chi = log 2 the push-forward exactly cancels the weight
    ctx = ctx_for()
    sp = diag_splitting(LOG2)
    got = lyapunov_norm(ctx, sp, A, ZEROS, E1)
    expect = series_oracle(0.1)
    assert got.value == pytest.approx(expect, abs=10 * got.tail_bound + 1e-9)
    assert got.tail_bound < 1e-7 * got.value ** 2 + 1e-12


def test_k_epsilon_closed_form_at_fixed_point():
    ctx = ctx_for()
    sp = diag_splitting(LOG2)
    k = k_epsilon(ctx, sp, A, ZEROS)
    assert k.value == pytest.approx(series_oracle(0.1), rel=1e-6)
    assert k.raw == pytest.approx(k.value)  # fixed point: envelope peaks at 0


def test_norm_lower_bound_euclidean():
    # ||u|| <= ||u||_{x,eps} always (the n = 0 term already dominates)
    ctx = ctx_for()
    sp = diag_splitting(chi_bernoulli(0.1))
    x = bernoulli(0.1).sample_point(half_window=400, seed=3)
    rng = np.random.default_rng(0)
    G, _ = lyapunov_gram(ctx, sp, A, x)
    q = raw_comparison(ctx, sp, A, x)
    for _ in range(1000):
        u = rng.standard_normal(2)
        val = math.sqrt(u @ G @ u)
        assert val >= np.linalg.norm(u) - 1e-9
        assert val <= q * np.linalg.norm(u) + 1e-9


def test_growth_bounds_single_direction():
    # exp(n chi - eps|n|) ||u||_x <= ||A(x,n) u||_{f^n x} <= exp(n chi + eps|n|) ||u||_x
    ctx = ctx_for()
    chi = chi_bernoulli(0.1)
    sp = diag_splitting(chi)
    x = bernoulli(0.1).sample_point(half_window=500, seed=11)
    for idx, chi_i in ((1, chi), (0, -chi)):
        prof = direction_norm_profile(ctx, sp, A, x, idx, -50, 50)
        base = prof[50]
        for n in range(-50, 51):
            lo = math.exp(n * chi_i - ctx.epsilon * abs(n)) * base
            hi = math.exp(n * chi_i + ctx.epsilon * abs(n)) * base
            assert lo - 1e-6 * hi <= prof[n + 50] <= hi * (1 + 1e-6)


def test_direction_profile_matches_pointwise_norm():
    # p = 0.5 has the largest per-step deviation from chi, so the window-240
    # tail is only ~1e-5 of the partial sum; both computations share it
    ctx = ctx_for(tol=1e-4)
    chi = chi_bernoulli(0.5)
    sp = diag_splitting(chi)
    x = bernoulli(0.5).sample_point(half_window=400, seed=8)
    prof = direction_norm_profile(ctx, sp, A, x, 1, 0, 5)
    for n in range(6):
        v = product(A, x, n) @ E1
        direct = lyapunov_norm(ctx, sp, A, x.shift(n), v)
        assert prof[n] == pytest.approx(direct.value, rel=1e-9)


# ---------------------------------------------------------------- tempering

def test_k_epsilon_tempering_along_orbit():
    ctx = ctx_for()
    sp = diag_splitting(chi_bernoulli(0.1))
    x = bernoulli(0.1).sample_point(half_window=600, seed=5)
    prof = k_epsilon_profile(ctx, sp, A, x, 0, 50)
    k0 = prof[0]
    for n in range(1, 51):
        assert k0 * math.exp(-ctx.epsilon * n) <= prof[n] + 1e-9
        assert prof[n] <= k0 * math.exp(ctx.epsilon * n) + 1e-9


def test_raw_comparison_can_violate_tempering():
    # the raw ratio genuinely jumps faster than e^eps at some steps, which
    # is why the tempered envelope exists at all
    ctx = ctx_for()
    sp = diag_splitting(chi_bernoulli(0.1))
    x = bernoulli(0.1).sample_point(half_window=600, seed=5)
    raws = [raw_comparison(ctx, sp, A, x.shift(j)) for j in range(40)]
    jumps = [abs(math.log(b) - math.log(a)) for a, b in zip(raws, raws[1:])]
    assert max(jumps) > ctx.epsilon


def test_regular_set_membership_equivalence():
    ctx = ctx_for()
    sp = diag_splitting(chi_bernoulli(0.1))
    x = bernoulli(0.1).sample_point(half_window=600, seed=9)
    k = k_epsilon(ctx, sp, A, x).value
    assert in_regular_set(ctx, sp, A, x, k + 0.01)
    assert not in_regular_set(ctx, sp, A, x, k - 0.01)


def test_regular_set_measure_grows():
    # marginal samples need a longer window before their tail certifies;
    # refused points count as outside every tested block
    ctx = ctx_for(window=360, temper=32, tol=1e-3)
    sp = diag_splitting(chi_bernoulli(0.1))
    mu = bernoulli(0.1)
    ks = []
    for i in range(30):
        x = mu.sample_point(half_window=600, seed=(21, i))
        try:
            ks.append(k_epsilon(ctx, sp, A, x).value)
        except CocycleError:
            ks.append(math.inf)
    levels = [2.0 ** e for e in range(1, 14)]
    fractions = [np.mean([k <= l for k in ks]) for l in levels]
    assert all(b >= a for a, b in zip(fractions, fractions[1:]))
    assert max(fractions) > 0.99


# ---------------------------------------------------------------- operator norms

def test_operator_norm_comparison():
    # K(x)^-1 ||B|| <= ||B||_{y<-x} <= K(y) ||B||
    ctx = ctx_for()
    sp = diag_splitting(chi_bernoulli(0.1))
    mu = bernoulli(0.1)
    x = mu.sample_point(half_window=600, seed=31)
    y = mu.sample_point(half_window=600, seed=32)
    kx = k_epsilon(ctx, sp, A, x).value
    ky = k_epsilon(ctx, sp, A, y).value
    rng = np.random.default_rng(4)
    for _ in range(50):
        B = rng.standard_normal((2, 2))
        std = np.linalg.norm(B, 2)
        lyap = lyapunov_operator_norm(ctx, sp, A, x, y, B)
        assert std / kx <= lyap + 1e-9
        assert lyap <= ky * std + 1e-9


# ---------------------------------------------------------------- norm estimate

def test_verify_norm_estimate_degenerate_y_equals_x():
    ctx = ctx_for()
    sp = diag_splitting(LOG3)
    k = k_epsilon(ctx, sp, A, ONES).value
    l = math.ceil(k) + 1.0
    rep = verify_norm_estimate(ctx, sp, A, ONES, ONES, 12, l)
    assert rep.status == "ok"
    assert rep.slack_std > 0 and rep.slack_op > 0


def test_verify_norm_estimate_shadowing_pair():
    ctx = ctx_for()
    sp = diag_splitting(LOG3)
    n = 10
    lead = periodic_point(FULL, [1], [1] * n, [0], offset=0)
    tail = periodic_point(FULL, [1], [0] * 6, [0], offset=0)
    po = PseudoOrbit(segments=[(lead, n), (tail, 6)], delta=0.5)
    y = shadow(po)
    k = k_epsilon(ctx, sp, A, ONES).value
    rep = verify_norm_estimate(ctx, sp, A, ONES, y, n, math.ceil(k) + 1.0)
    assert rep.status == "ok", rep
    assert rep.slack_std > 0


def test_verify_norm_estimate_adversarial_midpoint():
    ctx = ctx_for()
    sp = diag_splitting(LOG3)
    n = 12
    y = periodic_point(FULL, [1], [1] * 6 + [0] + [1] * 5, [1], offset=0)
    rep = verify_norm_estimate(ctx, sp, A, ONES, y, n, 8.0)
    assert rep.status == "indeterminate"
    assert "close" in rep.reason


def test_verify_norm_estimate_needs_lambda_above_eps():
    ctx = ctx_for(eps=0.1)
    sp = diag_splitting(LOG3)
    rep = verify_norm_estimate(ctx, sp, A, ONES, ONES, 5, 8.0, lam=0.05)
    assert rep.status == "indeterminate"


# ---------------------------------------------------------------- cones

def test_cone_invariance_diagonal_fixture():
    ctx = ctx_for()
    sp = diag_splitting(LOG3)
    rep = cone_check(ctx, sp, A, ONES, ONES, n=6, eta=0.5, n_samples=12, seed=1)
    assert rep.status == "ok"
    assert rep.worst_cone_margin > 0
    assert rep.worst_growth_margin > 0


def test_cone_boundary_vector_on_one_blocks():
    # at 1^inf the two axis norms agree, so the boundary vector maps to
    # relative tilt 1/9 and stays inside the shrunken cone up to eta = 8/9
    ctx = ctx_for()
    sp = diag_splitting(LOG3)
    good = cone_check(ctx, sp, A, ONES, ONES, n=1, eta=8.0 / 9.0 - 1e-6,
                      n_samples=8, seed=2)
    assert good.status == "ok"
    tight = cone_check(ctx, sp, A, ONES, ONES, n=1, eta=8.0 / 9.0 + 1e-6,
                       n_samples=8, seed=2)
    assert tight.status == "violated"
    assert tight.worst_cone_margin <= 0


def test_cone_growth_factor_exact_on_one_blocks():
    ctx = ctx_for()
    sp = diag_splitting(LOG3)
    rep = cone_check(ctx, sp, A, ONES, ONES, n=1, eta=0.5, n_samples=4, seed=3)
    # growth margin = 3 u' - e^{chi - 2 eps} u' with u' = 1 by normalization
    expect = 3.0 - math.exp(LOG3 - 2 * ctx.epsilon)
    assert rep.worst_growth_margin == pytest.approx(expect, rel=1e-6)


def test_cone_degenerate_eta_reports_not_raises():
    ctx = ctx_for()
    sp = diag_splitting(LOG3)
    rep = cone_check(ctx, sp, A, ONES, ONES, n=2, eta=1.0, n_samples=4, seed=4)
    assert rep.status == "violated"
    assert rep.worst_cone_margin <= 0


# ---------------------------------------------------------------- triangular

def test_triangular_splitting_invariance():
    T = triangular_cocycle(FULL)
    chi = chi_bernoulli(0.3)
    sp = triangular_splitting(T, chi)
    x = bernoulli(0.3).sample_point(half_window=300, seed=41)
    for j in range(10):
        xi = x.shift(j)
        v = sp.basis_at(xi)[0][:, 0]
        im = T.generator_at(xi, 0) @ v
        im = im / np.linalg.norm(im)
        w = sp.basis_at(x.shift(j + 1))[0][:, 0]
        assert min(np.linalg.norm(im - w), np.linalg.norm(im + w)) < 1e-10


def test_triangular_norm_bounds():
    T = triangular_cocycle(FULL)
    chi = chi_bernoulli(0.3)
    sp = triangular_splitting(T, chi)
    ctx = ctx_for()
    x = bernoulli(0.3).sample_point(half_window=500, seed=43)
    rng = np.random.default_rng(7)
    G, _ = lyapunov_gram(ctx, sp, T, x)
    q = raw_comparison(ctx, sp, T, x)
    for _ in range(200):
        u = rng.standard_normal(2)
        val = math.sqrt(u @ G @ u)
        assert np.linalg.norm(u) - 1e-9 <= val <= q * np.linalg.norm(u) + 1e-9


def test_non_regular_point_rejected():
    # 0^inf is not regular for the Bernoulli(0.1) exponents: the series must
    # be refused rather than silently truncated
    ctx = ctx_for()
    sp = diag_splitting(chi_bernoulli(0.1))
    with pytest.raises(CocycleError):
        lyapunov_norm(ctx, sp, A, ZEROS, E2)


def test_epsilon_gap_guard():
    sp = diag_splitting(LOG2)
    with pytest.raises(ValueError, match="gap"):
        lyapunov_norm(ctx_for(eps=LOG2), sp, A, ZEROS, E1)

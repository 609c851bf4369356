"""Top-level acceptance suite.

Each test pins one headline deliverable of the package at its stated
tolerance and wall-clock budget: dispersion recovery for Gaussian noise,
exact exponential-channel bounds against the normal approximation, the
minimum-energy-per-bit curves, the Monte-Carlo/closed-form agreement for
the spherically symmetric output beta, codebook existence at the
guaranteed size, the randomized beta-inequality suite, the
dependence-testing equivalence, and the MIMO block-fading rates.
"""

import math
import time

import numpy as np
import pytest

from fblbounds import awgn, expnoise, mimo, nptest
from fblbounds.bounds import bb_achievability, dt_form, verify_code_existence
from fblbounds.dispersion import dispersion, gaussian_noise
from fblbounds.numerics import substream

LOG2 = math.log(2.0)


# 1. Gaussian-noise dispersion recovers P(2+P)/(2(1+P)^2) nats^2.

@pytest.mark.parametrize("p", [0.5, 1.0, 4.0])
def test_gaussian_dispersion_recovery(p):
    start = time.monotonic()
    rep = dispersion(gaussian_noise(), p, mc_samples=10 ** 6, seed=101)
    elapsed = time.monotonic() - start
    v_exact = p * (2.0 + p) / (2.0 * (1.0 + p) ** 2)
    assert abs(rep.v_nats2 - v_exact) <= max(1e-3, 3.0 * rep.se_v)
    assert elapsed < 60.0


# 2. Exponential-noise channel: exact achievability and meta-converse
#    straddle the normal approximation within 5 log(n)/n nats.

def test_exponential_channel_straddles_normal_approx():
    start = time.monotonic()
    for n in (100, 1000, 10 ** 4):
        spec = expnoise.ExpSpec(n=n, sigma=1.0, eps=1e-3)
        ach = expnoise.exact_bb_achievability(spec).rate
        conv = expnoise.meta_converse_rate(spec)
        approx = expnoise.normal_approx_rate(spec)
        slack = 5.0 * math.log(n) / n
        assert ach <= approx <= conv
        assert abs(ach - approx) <= slack
        assert abs(conv - approx) <= slack
    assert time.monotonic() - start < 10.0


# 3. Minimum energy per bit at k=2000 information bits.

def test_energy_per_bit_curves():
    k, eps = 2000.0, 1e-3
    start = time.monotonic()
    rows = awgn.eb_curves(k, eps, np.geomspace(0.05, 0.5, 6), tau_points=4)
    elapsed = time.monotonic() - start
    # zero-rate limit of the approximation
    assert awgn.eb_approx_db(k, eps, 1e-4) == pytest.approx(-1.110,
                                                            abs=0.005)
    for row in rows:
        assert row["eb_ach_db"] >= row["eb_conv_db"]
        assert abs(row["eb_ach_db"] - row["eb_approx_db"]) <= 0.25
        assert abs(row["eb_conv_db"] - row["eb_approx_db"]) <= 0.25
    assert elapsed < 120.0


# 4. Spherically symmetric output beta: Monte-Carlo thresholding of the
#    squared norm matches the chi-squared closed form at n=4, P=1.

def test_output_beta_mc_matches_chi_squared_closed_form():
    from scipy import stats

    n, p, samples = 4, 1.0, 10 ** 7
    start = time.monotonic()
    rng = substream(404)
    s_p = 0.5 * rng.noncentral_chisquare(2 * n, 2 * n * p, samples)
    s_q = 0.5 * rng.chisquare(2 * n, samples)
    for a in (0.1, 0.5, 0.9):
        thr = np.quantile(s_p, 1.0 - a)
        bhat = float(np.mean(s_q >= thr))
        # the estimator error has two independent parts: the binomial
        # fluctuation of the Q-tail at a fixed threshold, and the error of
        # the estimated P-quantile propagated through the Q-density
        # (delta method: d beta / d thr = -f_Q(thr), Var(thr) =
        # a(1-a)/(N f_P(thr)^2))
        f_p = 2.0 * stats.ncx2.pdf(2.0 * thr, 2 * n, 2 * n * p)
        f_q = 2.0 * stats.chi2.pdf(2.0 * thr, 2 * n)
        se = math.sqrt((bhat * (1.0 - bhat)
                        + (f_q / f_p) ** 2 * a * (1.0 - a)) / samples)
        exact = awgn.beta_y(n, p, a)
        assert abs(bhat - exact) <= 3.0 * se
    assert time.monotonic() - start < 120.0


# 5. Codebook existence at the guaranteed size on random small channels.

def test_code_existence_on_random_channels():
    start = time.monotonic()
    rng = substream(505)
    for i in range(50):
        n_in = int(rng.integers(2, 5))
        n_out = int(rng.integers(2, 5))
        ch = nptest.random_channel(rng, n_in, n_out)
        p_x = nptest.random_dist(rng, n_in)
        eps = 0.1 if i % 2 == 0 else 0.3
        q_y = ch.output_dist(p_x)
        trial = verify_code_existence(ch, p_x, q_y, eps, tau=eps / 2.0,
                                      trials=200, seed=1000 + i)
        assert trial.found
        assert trial.avg_error <= eps
    assert time.monotonic() - start < 60.0


# 6. Randomized beta-inequality suite: zero violations beyond -1e-12.

def test_property_suite_no_violations():
    start = time.monotonic()
    for rec in nptest.run_property_trials(1000, seed=42):
        assert rec["violations"] == 0
        assert rec["min_slack"] >= -1e-12
    assert time.monotonic() - start < 120.0


# 7. With the induced output as reference the two-beta bound equals the
#    dependence-testing evaluation.

def test_dt_equivalence_hundred_channels():
    rng = substream(707)
    for _ in range(100):
        n_in = int(rng.integers(2, 5))
        n_out = int(rng.integers(2, 5))
        ch = nptest.random_channel(rng, n_in, n_out)
        p_x = nptest.random_dist(rng, n_in)
        eps = float(rng.uniform(0.05, 0.5))
        p_y = ch.output_dist(p_x)
        a = bb_achievability(ch, p_x, p_y, eps)
        d = dt_form(ch, p_x, eps)
        assert a.log_m == pytest.approx(d.log_m, abs=1e-10)


# 8. MIMO block fading with receiver side information.

def _desk_spec(l, seed=0):
    return mimo.MimoSpec(m_t=2, m_r=2, n_c=2, l=l, rho=1.0, eps=0.01,
                         samples=10 ** 6, seed=seed)


@pytest.mark.xfail(strict=True,
                   reason="the certified rate at l=4 is negative (about "
                          "-0.92 bits per use at 1e6 samples); positivity "
                          "starts at l=8 in this configuration")
def test_mimo_desk_scale_positive_at_l4():
    res = mimo.rate_lower_bound(_desk_spec(4))
    assert res.rate_bits > 0.0


def test_mimo_desk_scale_positive_increasing_seed_stable():
    r8 = mimo.rate_lower_bound(_desk_spec(8))
    r16 = mimo.rate_lower_bound(_desk_spec(16))
    assert r8.components["certified"] and r16.components["certified"]
    assert r8.rate_bits > 0.0
    assert r16.rate_bits > r8.rate_bits
    a = mimo.rate_lower_bound(_desk_spec(8, seed=1))
    b = mimo.rate_lower_bound(_desk_spec(8, seed=2))
    gap = abs(a.components["rate_point"] - b.components["rate_point"])
    assert gap <= (a.components["ci_radius_rate"]
                   + b.components["ci_radius_rate"])


def test_mimo_large_scale_curve():
    # 4x4, coherence 4, 0 dB, eps=1e-3, blocklengths up to 500
    start = time.monotonic()
    rows = mimo.rate_curve(4, 4, 4, 1.0, 1e-3, 500, samples=10 ** 7,
                           seed=3, l_grid=[2, 16, 125])
    elapsed = time.monotonic() - start
    rates = [r["rate_bits_lower"] for r in rows]
    assert rates == sorted(rates)
    for r in rows:
        assert r["rate_bits_lower"] < r["normal_approx_bits"]
        assert r["ci_radius_bits"] >= 0.0
    assert elapsed < 1800.0

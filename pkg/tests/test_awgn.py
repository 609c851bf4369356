import math

import numpy as np
import pytest

from fblbounds import awgn
from fblbounds.numerics import substream


def mc_radial_betas(n, p, alphas, samples, seed, reference):
    """Monte-Carlo beta_alpha(P_Y^n, Q_Y^n) for a shell input.

    Both laws are spherically symmetric, so the squared norm is a
    sufficient statistic: a scaled noncentral chi-squared under P, a
    scaled central chi-squared under Q.  For the noise reference the
    density ratio is increasing in the squared norm and thresholding it is
    the exact NP test; for the capacity reference the ratio is unimodal,
    so the exact test thresholds the ratio itself.
    """
    from fblbounds.numerics import _ncx2_logpdf

    rng = substream(seed)
    s_p = 0.5 * rng.noncentral_chisquare(2 * n, 2 * n * p, samples)
    if reference == "noise":
        stat_p = s_p
        stat_q = 0.5 * rng.chisquare(2 * n, samples)
    else:
        s_q = 0.5 * (1.0 + p) * rng.chisquare(2 * n, samples)

        def log_ratio(u):
            return (_ncx2_logpdf(2.0 * n, 2.0 * n * p, 2.0 * u)
                    + math.log(2.0)
                    - ((n - 1.0) * np.log(u) - u / (1.0 + p)
                       - n * math.log(1.0 + p) - math.lgamma(n)))

        stat_p = log_ratio(s_p)
        stat_q = log_ratio(s_q)
    out = []
    for a in alphas:
        thr = np.quantile(stat_p, 1.0 - a)
        bhat = float(np.mean(stat_q >= thr))
        se = math.sqrt(bhat * (1.0 - bhat) / samples)
        out.append((bhat, se))
    return out


def mc_joint_beta_cap(n, p, alphas, samples, seed):
    """Monte-Carlo beta_alpha(P_XY, P_X Q_Y) with the capacity reference.

    Conditioned on a shell codeword the LLR is the same affine function of
    a noncentral chi-squared variable under both measures, so sampling the
    chi-squared suffices.
    """
    rng = substream(seed)
    # LLR = A - (p/(2(1+p))) * T_P with T_P ~ ncx2(2n, 2n/p) under P
    # LLR = A - (p/2) * T_Q with T_Q ~ ncx2(2n, 2n(1+p)/p) under Q
    t_p = rng.noncentral_chisquare(2 * n, 2 * n / p, samples)
    t_q = rng.noncentral_chisquare(2 * n, 2 * n * (1.0 + p) / p, samples)
    out = []
    for a in alphas:
        # LLR is decreasing in T; power alpha under P needs the test
        # region {(p/(2(1+p))) T <= thr}, whose Q-mass is
        # P[(p/2) T_Q <= thr], i.e. T_Q <= q_thr / (1+p)
        q_thr = np.quantile(t_p, a)
        bhat = float(np.mean(t_q <= q_thr / (1.0 + p)))
        se = math.sqrt(max(bhat * (1.0 - bhat), 1.0 / samples) / samples)
        out.append((bhat, se))
    return out


def test_beta_y_noise_reference_mc():
    n, p = 4, 1.0
    alphas = (0.1, 0.5, 0.9)
    mc = mc_radial_betas(n, p, alphas, 10 ** 6, 77, "noise")
    for a, (bhat, se) in zip(alphas, mc):
        assert awgn.beta_y(n, p, a) == pytest.approx(bhat, abs=3.5 * se)


def test_beta_y_capacity_reference_mc():
    n, p = 4, 1.0
    alphas = (0.1, 0.5, 0.9)
    mc = mc_radial_betas(n, p, alphas, 10 ** 6, 78, "capacity")
    for a, (bhat, se) in zip(alphas, mc):
        assert awgn.beta_y_cap(n, p, a) == pytest.approx(bhat, abs=3.5 * se)


def test_beta_xy_capacity_reference_mc():
    n, p = 4, 1.0
    alphas = (0.5, 0.9)
    mc = mc_joint_beta_cap(n, p, alphas, 10 ** 6, 79)
    for a, (bhat, se) in zip(alphas, mc):
        assert awgn.beta_xy_cap(n, p, a) == pytest.approx(bhat, abs=3.5 * se)


def test_beta_xy_noise_reference_closed_form_consistency():
    # beta against the noise reference is a central-vs-noncentral
    # chi-squared test; check monotonicity and the alpha -> 1 limit
    n, p = 8, 0.5
    vals = [awgn.beta_xy(n, p, a) for a in np.linspace(0.05, 0.95, 10)]
    assert all(0.0 < v <= 1.0 for v in vals)
    assert all(x < y for x, y in zip(vals, vals[1:]))
    assert awgn.beta_xy(n, p, 1.0 - 1e-12) == pytest.approx(1.0, abs=1e-4)


def test_log_betas_match_linear_scale():
    n, p, a = 6, 1.3, 0.4
    assert awgn.log_beta_xy(n, p, a) == pytest.approx(
        math.log(awgn.beta_xy(n, p, a)), rel=1e-10)
    assert awgn.log_beta_y(n, p, a) == pytest.approx(
        math.log(awgn.beta_y(n, p, a)), rel=1e-10)
    assert awgn.log_beta_xy_cap(n, p, a) == pytest.approx(
        math.log(awgn.beta_xy_cap(n, p, a)), rel=1e-10)
    assert awgn.log_beta_y_cap(n, p, a) == pytest.approx(
        math.log(awgn.beta_y_cap(n, p, a)), rel=1e-10)


def test_rate_bounds_ordering_and_capacity_gap():
    # achievability <= converse, both below capacity, both sane
    for n in (50, 200):
        spec = awgn.AwgnSpec(n=n, p=1.0, eps=1e-3)
        r_ach, tau = awgn.bb_rate_achievability(spec)
        r_conv, alpha = awgn.bb_rate_converse(spec)
        cap = math.log(2.0)  # nats, complex channel at P=1
        assert r_ach <= r_conv + 1e-9
        assert r_conv < cap
        assert 0.0 < tau < spec.eps
    # converse approaches capacity with n
    spec = awgn.AwgnSpec(n=2000, p=1.0, eps=1e-3)
    r_conv, _ = awgn.bb_rate_converse(spec)
    assert cap - r_conv < 0.08


def test_rate_bounds_straddle_normal_approximation():
    # second-order expansion with the complex-AWGN dispersion
    n, p, eps = 500, 1.0, 1e-3
    from fblbounds.numerics import q_inv
    v = p * (2.0 + p) / (1.0 + p) ** 2
    approx = math.log(1.0 + p) - math.sqrt(v / n) * float(q_inv(eps))
    spec = awgn.AwgnSpec(n=n, p=p, eps=eps)
    r_ach, _ = awgn.bb_rate_achievability(spec)
    r_conv, _ = awgn.bb_rate_converse(spec)
    slack = 4.0 * math.log(n) / n
    assert r_ach >= approx - slack
    assert r_conv <= approx + slack


def test_noise_reference_weaker_than_capacity_reference():
    spec = awgn.AwgnSpec(n=200, p=1.0, eps=1e-3)
    r_cap, _ = awgn.bb_rate_achievability(spec, reference="capacity")
    r_noise, _ = awgn.bb_rate_achievability(spec, reference="noise")
    assert r_cap > r_noise
    with pytest.raises(ValueError):
        awgn.bb_rate_achievability(spec, reference="bogus")


def test_tau_schedule_inside_range():
    eps = 1e-3
    for n in (10, 100, 10000):
        tau = awgn.tau_schedule(n, 1.0)
        assert tau > 0.0


def test_eb_approx_low_rate_limit():
    # the minimum-energy-per-bit approximation tends to the known
    # wideband limit as the rate goes to zero
    val = awgn.eb_approx_db(2000, 1e-3, 1e-4)
    assert val == pytest.approx(-1.110, abs=0.005)
    # monotone increasing in rate
    assert awgn.eb_approx_db(2000, 1e-3, 0.5) > val


def test_eb_curves_single_point():
    rows = awgn.eb_curves(2000, 1e-3, [0.5])
    row = rows[0]
    assert row["eb_ach_db"] >= row["eb_conv_db"]
    assert abs(row["eb_ach_db"] - row["eb_approx_db"]) < 0.25
    assert abs(row["eb_conv_db"] - row["eb_approx_db"]) < 0.25


def test_spec_validation():
    with pytest.raises(ValueError):
        awgn.AwgnSpec(n=0, p=1.0, eps=0.1)
    with pytest.raises(ValueError):
        awgn.AwgnSpec(n=10, p=-1.0, eps=0.1)
    with pytest.raises(ValueError):
        awgn.AwgnSpec(n=10, p=1.0, eps=1.5)

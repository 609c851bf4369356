import math

import numpy as np
import pytest
from scipy import stats

from fblbounds.mimo import (
    MimoSpec,
    csir_normal_approx,
    default_tau_grid,
    mc_beta,
    rate_lower_bound,
    sample_denominator_llr,
    sample_numerator_llr,
    wishart_sq_singular_values,
)
from fblbounds.nptest import DiscreteDist, beta
from fblbounds.numerics import substream


def spec_2x2(l=2, samples=10 ** 5, seed=0, eps=0.01):
    return MimoSpec(m_t=2, m_r=2, n_c=2, l=l, rho=1.0, eps=eps,
                    samples=samples, seed=seed)


def test_wishart_singular_values_against_eigvalsh():
    # squared singular values of an m_r x m_t iid CN(0,1) matrix
    m_t, m_r, N = 2, 3, 20000
    rng = substream(100)
    fast = np.sort(wishart_sq_singular_values(rng, m_t, m_r, (N,)), axis=-1)
    rng2 = substream(101)
    h = (rng2.standard_normal((N, m_r, m_t))
         + 1j * rng2.standard_normal((N, m_r, m_t))) / math.sqrt(2.0)
    direct = np.sort(np.linalg.eigvalsh(
        np.swapaxes(h.conj(), -1, -2) @ h).real, axis=-1)
    # same law: compare moments and a KS statistic per component
    for j in range(min(m_t, m_r)):
        a, b = fast[:, j], direct[:, j]
        assert np.mean(a) == pytest.approx(np.mean(b), abs=0.05)
        assert np.var(a) == pytest.approx(np.var(b), rel=0.1)
        ks = stats.ks_2samp(a, b)
        assert ks.pvalue > 1e-4


def test_wishart_trace_moment():
    # E[sum of squared singular values] = m_t * m_r
    rng = substream(102)
    lam = wishart_sq_singular_values(rng, 3, 3, (50000,))
    assert float(lam.sum(axis=-1).mean()) == pytest.approx(9.0, abs=0.1)


def test_denominator_change_of_measure():
    spec = spec_2x2(l=2, samples=2 * 10 ** 5, seed=5)
    den = sample_denominator_llr(spec)
    w = np.exp(den.q)
    mean = float(w.mean())
    se = float(w.std(ddof=1)) / math.sqrt(w.size)
    assert mean == pytest.approx(1.0, abs=3.5 * se)
    assert np.all(np.isfinite(den.p))
    # information inequality: E_P[LLR] >= 0
    assert float(den.p.mean()) > 0.0


def test_numerator_change_of_measure_and_concentration():
    variances = []
    for l in (1, 2, 4, 8):
        spec = spec_2x2(l=l, samples=10 ** 5, seed=6)
        num = sample_numerator_llr(spec)
        w = np.exp(num.q)
        mean = float(w.mean())
        se = float(w.std(ddof=1)) / math.sqrt(w.size)
        assert mean == pytest.approx(1.0, abs=4.0 * se)
        variances.append(float(num.p.var()))
    # the shell rescaling factor concentrates as l grows
    assert variances[-1] < variances[0]


def test_mc_beta_gaussian_shift_oracle():
    # consistent LLR model: P = N(m,1) vs Q = N(0,1); the LLR is
    # N(m^2/2, m^2) under P and N(-m^2/2, m^2) under Q, and
    # beta_alpha = Phi(Phi^{-1}(1-alpha)... ) has the classical closed form
    m = 1.0
    rng = substream(7)
    zp = m * rng.standard_normal(10 ** 5) + m * m / 2.0
    zq = m * rng.standard_normal(10 ** 5) - m * m / 2.0
    for alpha in (0.3, 0.7):
        exact = float(stats.norm.sf(m - stats.norm.ppf(alpha)))
        est = mc_beta(zp, zq, alpha)
        assert est.point == pytest.approx(exact, rel=0.05)
        assert est.lower <= exact <= est.upper


def test_mc_beta_monotone_in_alpha():
    rng = substream(8)
    x = rng.standard_normal(10 ** 5) + 1.0
    y = rng.standard_normal(10 ** 5)
    pts = [mc_beta(x, y, a).point for a in (0.2, 0.4, 0.6, 0.8)]
    assert all(p <= q + 1e-12 for p, q in zip(pts, pts[1:]))


def test_mc_beta_coverage_against_exact_oracle():
    # 6-atom discrete laws: the certified interval must contain the exact
    # beta in at least 90 of 100 repetitions at 95% confidence
    p = np.array([0.30, 0.25, 0.20, 0.12, 0.08, 0.05])
    q = np.array([0.05, 0.10, 0.15, 0.20, 0.22, 0.28])
    llr = np.log(p / q)
    alpha = 0.5
    exact = beta(alpha, DiscreteDist(p), DiscreteDist(q))[0]
    hits = 0
    reps = 100
    for r in range(reps):
        rng = substream(900 + r)
        xs = llr[rng.choice(6, size=10 ** 4, p=p)]
        ys = llr[rng.choice(6, size=10 ** 4, p=q)]
        est = mc_beta(xs, ys, alpha, confidence=0.95)
        if est.lower <= exact <= est.upper:
            hits += 1
    assert hits >= 90


def test_rate_lower_bound_certified_and_seed_stable():
    r1 = rate_lower_bound(spec_2x2(l=8, samples=2 * 10 ** 5, seed=1))
    r2 = rate_lower_bound(spec_2x2(l=8, samples=2 * 10 ** 5, seed=2))
    assert r1.components["certified"]
    assert r2.components["certified"]
    pt1, pt2 = r1.components["rate_point"], r2.components["rate_point"]
    ci = (r1.components["ci_radius_rate"] + r2.components["ci_radius_rate"])
    assert abs(pt1 - pt2) <= ci
    # the certified bound is below the point estimate
    assert r1.rate <= pt1


def test_rate_lower_bound_tau_inside_grid():
    res = rate_lower_bound(spec_2x2(l=8, samples=2 * 10 ** 5, seed=3))
    taus = default_tau_grid(0.01)
    assert taus[0] <= res.param <= taus[-1]
    with pytest.raises(ValueError):
        rate_lower_bound(spec_2x2(l=2, samples=10 ** 4), tau_grid=[0.5])


def test_csir_normal_approx_below_capacity():
    # the reference curve approaches the ergodic CSIR capacity from below
    na_small = csir_normal_approx(2, 2, 2, 1.0, 0.01, n=16, samples=10 ** 5)
    na_big = csir_normal_approx(2, 2, 2, 1.0, 0.01, n=10 ** 6,
                                samples=10 ** 5)
    assert na_small < na_big
    # ergodic capacity oracle by direct MC
    rng = substream(200)
    lam = wishart_sq_singular_values(rng, 2, 2, (10 ** 5,))
    cap = float(np.log1p(0.5 * lam).sum(axis=-1).mean())
    assert na_big == pytest.approx(cap, abs=0.05)
    assert na_big < cap


def test_spec_validation():
    with pytest.raises(ValueError):
        MimoSpec(m_t=0, m_r=2, n_c=2, l=2, rho=1.0, eps=0.01,
                 samples=100, seed=0)
    with pytest.raises(ValueError):
        MimoSpec(m_t=2, m_r=2, n_c=2, l=2, rho=-1.0, eps=0.01,
                 samples=100, seed=0)
    with pytest.raises(ValueError):
        MimoSpec(m_t=2, m_r=2, n_c=2, l=2, rho=1.0, eps=2.0,
                 samples=100, seed=0)

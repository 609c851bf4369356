import math

import numpy as np
import pytest
from scipy import stats

from fblbounds.numerics import (
    berry_esseen_normal_tail,
    gamma_cdf,
    gamma_quantile,
    gamma_sf,
    log1mexp,
    log_add,
    log_gamma_cdf,
    log_gamma_sf,
    log_ncx2_cdf,
    log_sub,
    logsumexp,
    ncx2_cdf,
    ncx2_pdf,
    ncx2_quantile,
    ncx2_sf,
    q_func,
    q_inv,
    substream,
)


def test_log_arithmetic():
    a, b = math.log(0.3), math.log(0.2)
    assert log_add(a, b) == pytest.approx(math.log(0.5), rel=1e-14)
    assert log_sub(a, b) == pytest.approx(math.log(0.1), rel=1e-12)
    assert log1mexp(math.log(0.25)) == pytest.approx(math.log(0.75), rel=1e-14)
    vals = np.log([0.1, 0.2, 0.3])
    assert logsumexp(vals) == pytest.approx(math.log(0.6), rel=1e-14)
    assert log_add(-math.inf, a) == a


def test_q_func_round_trip():
    for p in [1e-12, 1e-6, 0.01, 0.3, 0.5, 0.9, 1 - 1e-9]:
        assert q_func(q_inv(p)) == pytest.approx(p, rel=1e-10)
    assert q_func(0.0) == pytest.approx(0.5)


def test_gamma_against_scipy():
    for shape, scale, x in [(1.0, 1.0, 0.7), (4.0, 2.0, 11.0),
                            (100.0, 0.5, 49.0), (3.5, 1.3, 0.2)]:
        ref = stats.gamma(shape, scale=scale)
        assert gamma_cdf(shape, scale, x) == pytest.approx(
            ref.cdf(x), rel=1e-12)
        assert gamma_sf(shape, scale, x) == pytest.approx(
            ref.sf(x), rel=1e-12)
        p = ref.cdf(x)
        assert gamma_quantile(shape, scale, p) == pytest.approx(x, rel=1e-9)


def test_log_gamma_tails_deep():
    # frozen 50-digit arbitrary-precision oracle values
    cases = [
        ((4, 2.0, 300.0), -136.73978781344122),
        ((100, 1.0, 400.0), -165.695943537660965),
        ((1000, 2.0, 9000.0), -2001.54863281307703),
    ]
    for (shape, scale, x), ref in cases:
        assert log_gamma_sf(shape, scale, x) == pytest.approx(ref, rel=1e-12)
    # cdf deep tail: P[Gamma(k,1) <= x] small for x << k
    ref = stats.gamma(50.0).logcdf(5.0)
    assert log_gamma_cdf(50.0, 1.0, 5.0) == pytest.approx(ref, rel=1e-10)


def test_ncx2_against_scipy():
    for k, lam, x in [(2, 1.0, 0.5), (8, 16.0, 20.0), (40, 80.0, 200.0),
                      (5, 0.0, 3.0), (200, 300.0, 480.0)]:
        ref = stats.ncx2(k, lam) if lam > 0 else stats.chi2(k)
        assert ncx2_cdf(k, lam, x) == pytest.approx(ref.cdf(x), rel=1e-10)
        assert ncx2_sf(k, lam, x) == pytest.approx(ref.sf(x), rel=1e-10)
        assert ncx2_pdf(k, lam, x) == pytest.approx(ref.pdf(x), rel=1e-10)
    assert ncx2_cdf(4, 10.0, 0.0) == 0.0
    assert ncx2_sf(4, 10.0, 0.0) == pytest.approx(1.0, abs=1e-13)


def test_log_ncx2_cdf_deep_tail():
    # frozen 50-digit arbitrary-precision oracle values
    cases = [
        ((8, 16.0, 2.0), -10.5706519729144381),
        ((200, 300.0, 120.0), -94.9914294840759607),
        ((2000, 4000.0, 2500.0), -483.665879435970598),
        ((6, 0.0, 3.0), -1.6546802379573417),
        ((40, 80.0, 200.0), -0.000247454979271796938),
    ]
    for (k, lam, x), ref in cases:
        assert log_ncx2_cdf(k, lam, x) == pytest.approx(ref, rel=1e-10)
    assert log_ncx2_cdf(8, 16.0, 0.0) == -math.inf


def test_ncx2_quantile_round_trip():
    for k, lam in [(2, 1.0), (8, 16.0), (200, 300.0), (8000, 21600.0)]:
        for p in [1e-4, 0.05, 0.5, 0.95]:
            x = ncx2_quantile(k, lam, p, tail="lower")
            assert ncx2_cdf(k, lam, x) == pytest.approx(p, rel=1e-9)
            x = ncx2_quantile(k, lam, p, tail="upper")
            assert ncx2_sf(k, lam, x) == pytest.approx(p, rel=1e-9)


def test_ncx2_quantile_against_scipy():
    for k, lam, p in [(8, 16.0, 0.01), (8, 16.0, 0.9), (200, 300.0, 0.5)]:
        assert ncx2_quantile(k, lam, p, "lower") == pytest.approx(
            stats.ncx2.ppf(p, k, lam), rel=1e-8)
        assert ncx2_quantile(k, lam, p, "upper") == pytest.approx(
            stats.ncx2.isf(p, k, lam), rel=1e-8)


def test_berry_esseen_bracket():
    # sum of n chi-squared(1) summands is chi-squared(n); the certified
    # band must contain the true tail probability of the sum
    n = 400
    thr = 1.05 * n
    third = stats.chi2(1).expect(lambda x: abs(x - 1.0) ** 3)
    lo, hi = berry_esseen_normal_tail(n, 1.0, 2.0, third, thr)
    true = stats.chi2(n).sf(thr)
    assert lo <= true <= hi
    assert hi - lo < 0.4


def test_substream_reproducible_and_disjoint():
    a = substream(7, 0).standard_normal(4)
    b = substream(7, 0).standard_normal(4)
    c = substream(7, 1).standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)

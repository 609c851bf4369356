"""Power-constrained complex AWGN channel: closed-form beta expressions,
rate bounds, and minimum-energy-per-bit curves.

Conventions: n complex channel uses, per-symbol SNR P (linear), unit noise
variance per complex dimension, codewords on the equal-power shell
||x||^2 = nP.  All rates are nats per channel use unless suffixed _bits.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .numerics import (QuantileError, _ncx2_logpdf, gamma_cdf, gamma_sf,
                        log_gamma_sf, log_ncx2_cdf, log_q_func, ncx2_cdf,
                        ncx2_quantile, q_func, q_inv)

LOG2 = math.log(2.0)
LN2 = LOG2


@dataclass(frozen=True)
class AwgnSpec:
    n: float          # blocklength (complex channel uses)
    p: float          # SNR per symbol, linear
    eps: float        # target error probability

    def __post_init__(self):
        if self.n < 1 or self.p <= 0 or not 0.0 < self.eps < 1.0:
            raise ValueError("need n >= 1, P > 0, eps in (0,1)")


@dataclass(frozen=True)
class EbResult:
    rate_bits: float
    eb_db: float
    kind: str         # achievability | converse | approximation


def beta_xy(n, p, alpha):
    """beta_alpha between the shell-input joint law and the product with the
    unit-variance output reference: Q(sqrt(2nP) + Q^{-1}(alpha))."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0,1)")
    return float(q_func(math.sqrt(2.0 * n * p) + q_inv(alpha)))


def log_beta_xy(n, p, alpha):
    return float(log_q_func(math.sqrt(2.0 * n * p) + q_inv(alpha)))


def beta_y(n, p, a):
    """Output-distribution beta: central chi-squared (2n dof) upper tail at
    the gamma with noncentral (2n, 2nP) upper-tail probability a.

    Upper bound in general; exact for the uniform-on-shell input.
    """
    if not 0.0 < a < 1.0:
        raise ValueError("a must be in (0,1)")
    gam = ncx2_quantile(2.0 * n, 2.0 * n * p, a, tail="upper")
    return float(gamma_sf(n, 2.0, gam))


def log_beta_y(n, p, a):
    if not 0.0 < a < 1.0:
        raise ValueError("a must be in (0,1)")
    gam = ncx2_quantile(2.0 * n, 2.0 * n * p, a, tail="upper")
    return float(log_gamma_sf(n, 2.0, gam))


def log_beta_xy_cap(n, p, alpha):
    """log beta_alpha between the shell-input joint law and the product with
    the capacity-achieving output reference CN(0, (1+P) I_n).

    Conditioned on a shell codeword the log likelihood ratio is an affine
    function of a noncentral chi-squared variable under both measures:

        LLR | P  =  A - (P / (2(1+P))) * chi2_{2n}(2n/P)
        LLR | Q  =  A - (P / 2)        * chi2_{2n}(2n(1+P)/P)

    with the same constant A, so beta_alpha is the Q-law CDF evaluated at
    the P-law alpha-quantile rescaled by 1/(1+P).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0,1)")
    q_p = ncx2_quantile(2.0 * n, 2.0 * n / p, alpha, tail="lower")
    return float(log_ncx2_cdf(2.0 * n, 2.0 * n * (1.0 + p) / p,
                              q_p / (1.0 + p)))


def beta_xy_cap(n, p, alpha):
    return math.exp(log_beta_xy_cap(n, p, alpha))


def log_beta_y_cap(n, p, a):
    """log beta_a(P_Y, Q_Y) with the capacity-achieving output reference.

    Both laws are radial, so the optimal test is a function of ||y||^2:
    noncentral chi-squared under the shell-input output law, Gamma(n, 1+P)
    under the reference.  Both laws share the mean n(1+P); the density
    ratio is unimodal near it, so the exact acceptance region is an
    interval, solved here by root-finding on the ratio threshold.  Because
    neither law outruns the other, the value never reaches the deep-tail
    regime and linear-probability arithmetic suffices.

    Exact for the uniform-on-shell input.  Any radial region has the same
    power under every shell codeword, so the value also upper-bounds
    beta_a(P_Y', Q_Y) uniformly over shell codebooks, which is what the
    converse direction needs.
    """
    if not 0.0 < a < 1.0:
        raise ValueError("a must be in (0,1)")
    return _log_beta_y_cap_interval(n, p, a)


def _log_beta_y_cap_interval(n, p, a):
    """Exact interval Neyman-Pearson region for beta_a(P_Y, Q_Y)."""

    def log_ratio(u):
        # density ratio of ||y||^2 under the two radial laws
        return (float(_ncx2_logpdf(2.0 * n, 2.0 * n * p, 2.0 * u)[0]) + LOG2
                - ((n - 1.0) * math.log(u) - u / (1.0 + p)
                   - n * math.log(1.0 + p) - math.lgamma(n)))

    # locate the mode of the ratio; it sits near the common mean n(1+p)
    mean = n * (1.0 + p)
    res = minimize_scalar(lambda u: -log_ratio(u),
                          bounds=(mean / 20.0, 20.0 * mean),
                          method="bounded",
                          options={"xatol": 1e-9 * mean})
    u_star = float(res.x)
    r_peak = log_ratio(u_star)

    def lower_endpoint(u2):
        # matching point with equal ratio on the rising branch; collapses
        # to 0 when the threshold drops below the u -> 0 ratio limit
        log_g = log_ratio(u2)
        if log_g >= r_peak:
            return u_star
        lo = u_star
        while log_ratio(lo) > log_g and lo > 1e-12:
            lo /= 4.0
        if log_ratio(lo) > log_g:
            return 0.0
        return brentq(lambda u: log_ratio(u) - log_g, lo, u_star)

    def power(u2):
        u1 = lower_endpoint(u2)
        top = ncx2_cdf(2.0 * n, 2.0 * n * p, 2.0 * u2)
        return top - (ncx2_cdf(2.0 * n, 2.0 * n * p, 2.0 * u1)
                      if u1 > 0.0 else 0.0)

    # power is increasing in the upper endpoint; bracket and solve for it
    step = math.sqrt(n * (1.0 + 2.0 * p)) * (1.0 + p)
    hi = u_star + step
    while power(hi) < a:
        hi += step
        step *= 2.0
    u2 = brentq(lambda u: power(u) - a, u_star, hi,
                xtol=1e-12 * mean, rtol=1e-14)
    u1 = lower_endpoint(u2)
    val = gamma_cdf(n, 1.0 + p, u2) - (gamma_cdf(n, 1.0 + p, u1)
                                       if u1 > 0.0 else 0.0)
    if val <= 0.0:
        raise QuantileError("interval beta underflowed; parameters are in "
                            "the deep-tail regime")
    return math.log(val)


def beta_y_cap(n, p, a):
    return math.exp(log_beta_y_cap(n, p, a))


def tau_schedule(n, p):
    """Blocklength-dependent tau used in the asymptotic analysis."""
    return max((1.0 + 3.0 * math.sqrt(2.0)) / math.sqrt(n),
               math.exp(-n * p * p / 2.0))


def _default_tau_grid(eps, points=16):
    return np.geomspace(eps / 100.0, eps * 0.9, points)


def bb_rate_achievability(spec, tau_grid=None, schedule=False,
                          reference="capacity"):
    """Achievable rate (nats/use): max over tau of
    (1/n)[log 2 + log beta_tau(P_Y, Q_Y) - log beta_{1-eps+tau}(P_XY, P_X Q_Y)]
    with Q_Y either the capacity-achieving output CN(0,(1+P)I) (default,
    tighter at moderate rate) or the noise law CN(0,I) (tight as P -> 0).
    """
    n, p, eps = spec.n, spec.p, spec.eps
    if reference == "capacity":
        f_num, f_den = log_beta_y_cap, log_beta_xy_cap
    elif reference == "noise":
        f_num, f_den = log_beta_y, log_beta_xy
    else:
        raise ValueError("reference must be 'capacity' or 'noise'")
    if schedule:
        taus = [tau_schedule(n, p)]
        if taus[0] >= eps:
            raise ValueError(
                f"scheduled tau {taus[0]:.3g} >= eps {eps:.3g}: infeasible")
    elif tau_grid is not None:
        taus = list(np.asarray(tau_grid, dtype=float))
        if not taus or any(t <= 0 or t >= eps for t in taus):
            raise ValueError("tau grid must be nonempty and inside (0, eps)")
    else:
        taus = list(_default_tau_grid(eps))
    best = -np.inf
    best_tau = taus[0]
    for tau in taus:
        num = f_num(n, p, tau)
        den = f_den(n, p, 1.0 - eps + tau)
        val = (LOG2 + num - den) / n
        if val > best:
            best, best_tau = val, tau
    return best, best_tau


def bb_rate_converse(spec, alpha_grid=None, schedule=False,
                     reference="capacity"):
    """Converse rate (nats/use): min over alpha in (eps,1) of
    (1/n)[log beta_alpha(P_Y, Q_Y) - log beta_{alpha-eps}(P_XY, P_X Q_Y)].

    Valid for every equal-power-shell code: the radial-threshold value
    upper-bounds beta_alpha(P_Y, Q_Y) uniformly over shell inputs, and the
    per-codeword beta is shell-invariant.
    """
    n, p, eps = spec.n, spec.p, spec.eps
    if reference == "capacity":
        f_num, f_den = log_beta_y_cap, log_beta_xy_cap
    elif reference == "noise":
        f_num, f_den = log_beta_y, log_beta_xy
    else:
        raise ValueError("reference must be 'capacity' or 'noise'")
    if schedule:
        alphas = [1.0 - tau_schedule(n, p)]
        if alphas[0] <= eps:
            raise ValueError("scheduled alpha <= eps: infeasible")
    elif alpha_grid is not None:
        alphas = list(np.asarray(alpha_grid, dtype=float))
        if not alphas or any(a <= eps or a >= 1 for a in alphas):
            raise ValueError("alpha grid must lie in (eps, 1)")
    else:
        alphas = list(1.0 - np.geomspace(1e-8, (1.0 - eps) * 0.9, 16))
    best = np.inf
    best_alpha = alphas[0]
    for alpha in alphas:
        num = f_num(n, p, alpha)
        den = f_den(n, p, alpha - eps)
        val = (num - den) / n
        if val < best:
            best, best_alpha = val, alpha
    return best, best_alpha


# ---------------------------------------------------------------------------
# minimum energy per bit
# ---------------------------------------------------------------------------

def eb_approx_db(k, eps, r_bits):
    """Second-order closed-form approximation of the minimum Eb/N0 in dB."""
    val = LN2 + math.sqrt(2.0 * LN2 / k) * float(q_inv(eps)) \
        + (LN2 ** 2 / 2.0) * r_bits
    return 10.0 * math.log10(val)


class BracketError(RuntimeError):
    pass


def _solve_snr(rate_fn, target_nats, p_lo=1e-6, p_hi=10.0, iters=80):
    """Solve rate_fn(P) = target for P (rate is increasing in P).

    Expands the bracket geometrically if needed, then runs Brent's
    method on log P.
    """
    f_lo = rate_fn(p_lo) - target_nats
    f_hi = rate_fn(p_hi) - target_nats
    tries = 0
    while f_lo > 0.0 and p_lo > 1e-8:
        p_hi, f_hi = p_lo, f_lo
        p_lo /= 8.0
        f_lo = rate_fn(p_lo) - target_nats
        tries += 1
        if tries > 12:
            break
    while f_hi < 0.0 and p_hi < 1e4:
        p_lo, f_lo = p_hi, f_hi
        p_hi *= 8.0
        f_hi = rate_fn(p_hi) - target_nats
        tries += 1
        if tries > 24:
            break
    if f_lo > 0 or f_hi < 0:
        raise BracketError(
            f"target rate {target_nats:.4g} nats not bracketed in "
            f"[{p_lo}, {p_hi}]")
    u = brentq(lambda v: rate_fn(math.exp(v)) - target_nats,
               math.log(p_lo), math.log(p_hi), xtol=1e-10, maxiter=iters)
    return math.exp(u)


def eb_curves(k, eps, r_grid_bits, tau_points=4):
    """Energy-per-bit triples (achievability, converse, approximation) for
    each rate in r_grid_bits; blocklength n = k / R.

    Returns a list of dicts with keys r_bits, eb_ach_db, eb_conv_db,
    eb_approx_db; bisection failures are reported as None per point.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    out = []
    for r_bits in r_grid_bits:
        if r_bits <= 0:
            raise ValueError("rates must be positive")
        n = k / r_bits
        target = r_bits * LN2

        def ach(p, n=n):
            return bb_rate_achievability(
                AwgnSpec(n, p, eps),
                tau_grid=_default_tau_grid(eps, tau_points))[0]

        def conv(p, n=n):
            return bb_rate_converse(
                AwgnSpec(n, p, eps),
                alpha_grid=1.0 - np.geomspace(1e-8, (1 - eps) * 0.9,
                                              tau_points))[0]

        # bracket the SNR search around the closed-form approximation;
        # both reference distributions give valid bounds, so keep the
        # better one per point (smaller Eb for achievability, larger
        # for the converse)
        p_guess = r_bits * 10.0 ** (eb_approx_db(k, eps, r_bits) / 10.0)
        lo, hi = p_guess / 3.0, p_guess * 3.0
        rec = {"r_bits": r_bits,
               "eb_approx_db": eb_approx_db(k, eps, r_bits),
               "eb_ach_db": None, "eb_conv_db": None}
        try:
            p_a = _solve_snr(ach, target, p_lo=lo, p_hi=hi)
            rec["eb_ach_db"] = 10.0 * math.log10(p_a / r_bits)
        except BracketError as exc:
            rec["eb_ach_error"] = str(exc)
        try:
            p_c = _solve_snr(conv, target, p_lo=lo, p_hi=hi)
            rec["eb_conv_db"] = 10.0 * math.log10(p_c / r_bits)
        except BracketError as exc:
            rec["eb_conv_error"] = str(exc)
        out.append(rec)
    return out

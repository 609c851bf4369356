"""Achievability and converse bounds on code size via ratios of beta functions.

All bounds are returned as BoundResult records holding log M in nats.
On a finite alphabet beta_alpha(P,Q) is piecewise linear in alpha, so the
ratio of two betas is monotone within each linearity segment and the
tau/delta optimization is exact when evaluated at the union of segment
breakpoints.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .nptest import (AlphabetCapError, DiscreteDist, NPTest, beta,
                     independent_joint, joint_dist, _llr, _paired)
from .numerics import substream

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class BoundResult:
    log_m: float                 # nats
    kind: str                    # bb_achievability | bb_converse | dt | kappa_beta_relaxed
    param: float                 # optimizing tau (achievability) or delta (converse)
    n: int = 1
    components: dict = field(default_factory=dict)

    @property
    def rate(self):
        return self.log_m / self.n

    @property
    def rate_bits(self):
        return self.rate / LOG2


class BetaCurve:
    """Piecewise-linear alpha -> beta_alpha(P,Q) curve on a finite alphabet.

    Blocks are LLR-sorted (descending) with ties merged; evaluating at many
    alphas is a binary search into the cumulative P-masses.
    """

    def __init__(self, P, Q):
        p, q = _paired(P, Q)
        llr = _llr(p, q)
        order = np.argsort(-llr, kind="stable")
        llr_s, p_s, q_s = llr[order], p[order], q[order]
        keep = ~((p_s == 0) & (q_s == 0))
        llr_s, p_s, q_s = llr_s[keep], p_s[keep], q_s[keep]
        # merge equal-LLR runs
        if llr_s.size:
            new_block = np.ones(llr_s.size, dtype=bool)
            new_block[1:] = ~np.isclose(llr_s[1:], llr_s[:-1],
                                        rtol=1e-12, atol=0.0) \
                & (llr_s[1:] != llr_s[:-1])
            idx = np.cumsum(new_block) - 1
            nb = idx[-1] + 1
            self.llr = llr_s[new_block]
            self.p = np.bincount(idx, weights=p_s, minlength=nb)
            self.q = np.bincount(idx, weights=q_s, minlength=nb)
        else:
            self.llr = llr_s
            self.p = p_s
            self.q = q_s
        self.cum_p = np.cumsum(self.p)
        self.cum_q = np.cumsum(self.q)

    def value(self, alpha):
        """beta at power level(s) alpha; vectorized."""
        alpha = np.asarray(alpha, dtype=float)
        a = np.atleast_1d(alpha)
        k = np.searchsorted(self.cum_p, a - 1e-15, side="left")
        k = np.minimum(k, self.p.size - 1)
        prev_p = np.where(k > 0, self.cum_p[k - 1], 0.0)
        prev_q = np.where(k > 0, self.cum_q[k - 1], 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(self.p[k] > 0, (a - prev_p) / self.p[k], 0.0)
        t = np.clip(t, 0.0, 1.0)
        out = prev_q + t * self.q[k]
        # power beyond the total P-mass of the support: saturate
        out = np.where(a > self.cum_p[-1] + 1e-15, self.cum_q[-1], out)
        return out.reshape(alpha.shape) if alpha.ndim else float(out[0])

    def breakpoints(self):
        """Interior alpha values where the slope changes."""
        return self.cum_p[:-1]


def _candidate_taus(curve_num, curve_den, eps, shift):
    """Breakpoint tau candidates in [lo, hi] for ratio optimization.

    shift maps tau to the alpha at which curve_den is evaluated.
    """
    cands = [curve_num.breakpoints(), curve_den.breakpoints() - shift]
    cands.append(np.array([1e-15, eps * 0.5, eps - 1e-15, eps]))
    taus = np.concatenate(cands)
    taus = taus[(taus > 0.0) & (taus <= eps)]
    return np.unique(taus)


def bb_achievability(channel, p_x, q_y, eps, tau_grid=None):
    """Largest guaranteed log M from the two-beta ratio achievability bound.

    log M >= log 2 + log beta_tau(P_Y, Q_Y)
                   - log beta_{1-eps+tau}(P_XY, P_X Q_Y), optimized over tau.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0,1)")
    p_y = channel.output_dist(p_x)
    joint = joint_dist(p_x, channel)
    ref = independent_joint(p_x, q_y)
    curve_num = BetaCurve(p_y, q_y)
    curve_den = BetaCurve(joint, ref)
    if tau_grid is None:
        taus = _candidate_taus(curve_num, curve_den, eps, 1.0 - eps)
    else:
        taus = np.asarray(tau_grid, dtype=float)
        if taus.size == 0:
            raise ValueError("empty tau grid")
        if np.any((taus <= 0) | (taus >= 1)) or np.any(taus > eps):
            raise ValueError("tau grid must lie in (0, eps]")
    nums = curve_num.value(taus)
    dens = curve_den.value(1.0 - eps + taus)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.log(nums) - np.log(dens)
    log_ratio[dens == 0.0] = -np.inf  # zero denominator: bound vacuous there
    best = int(np.argmax(log_ratio))
    log_m = LOG2 + float(log_ratio[best])
    return BoundResult(
        log_m=log_m, kind="bb_achievability", param=float(taus[best]),
        components={"log_beta_num": float(np.log(nums[best]))
                    if nums[best] > 0 else -np.inf,
                    "log_beta_den": float(np.log(dens[best]))
                    if dens[best] > 0 else -np.inf})


def bb_converse(channel, p_x, q_y, eps, delta_grid=None):
    """Meta-converse upper bound on log M as a ratio of two betas."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0,1)")
    p_y = channel.output_dist(p_x)
    joint = joint_dist(p_x, channel)
    ref = independent_joint(p_x, q_y)
    curve_num = BetaCurve(p_y, q_y)
    curve_den = BetaCurve(joint, ref)
    if delta_grid is None:
        ds = [1.0 - curve_num.breakpoints(),
              (1.0 - eps) - curve_den.breakpoints(),
              np.array([0.0, (1.0 - eps) / 2, 1.0 - eps - 1e-15])]
        deltas = np.unique(np.concatenate(ds))
        deltas = deltas[(deltas >= 0.0) & (deltas < 1.0 - eps)]
    else:
        deltas = np.asarray(delta_grid, dtype=float)
        if deltas.size == 0:
            raise ValueError("empty delta grid")
        if np.any((deltas < 0) | (deltas >= 1.0 - eps)):
            raise ValueError("delta grid must lie in [0, 1-eps)")
    nums = curve_num.value(1.0 - deltas)
    dens = curve_den.value(1.0 - eps - deltas)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.log(nums) - np.log(dens)
    log_ratio[dens == 0.0] = np.inf
    best = int(np.argmin(log_ratio))
    return BoundResult(
        log_m=float(log_ratio[best]), kind="bb_converse",
        param=float(deltas[best]),
        components={"log_beta_num": float(np.log(nums[best])),
                    "log_beta_den": float(np.log(dens[best]))
                    if dens[best] > 0 else -np.inf})


def dt_form(channel, p_x, eps):
    """Independent dependence-testing evaluation (Q_Y = P_Y special case).

    Scans information-density thresholds directly: with
    alpha(t) = P_XY[i >= t] the bound reads
    eps >= 1 - alpha(t) + (M/2) * P_X P_Y[i >= t], solved for the largest M
    with log(M/2) consistent with the segment.  No beta() calls.
    """
    p_y = channel.output_dist(p_x)
    joint = joint_dist(p_x, channel)
    ref = independent_joint(p_x, p_y)
    p, q = _paired(joint, ref)
    i_dens = _llr(p, q)
    order = np.argsort(-i_dens, kind="stable")
    i_s, p_s, q_s = i_dens[order], p[order], q[order]
    cum_p = np.cumsum(p_s)
    cum_q = np.cumsum(q_s)
    best = -np.inf
    # candidate tests accept atoms 0..k (threshold at i_s[k]); M/2 solves
    # eps = 1 - cum_p[k] + (M/2) cum_q[k].  The inf over interpolated alpha
    # is attained at these breakpoints, so the scan is exact.
    for k in range(i_s.size):
        if cum_q[k] <= 0.0:
            continue
        slack = eps - (1.0 - cum_p[k])
        if slack <= 0.0:
            continue
        best = max(best, math.log(slack / cum_q[k]))
    if best == -np.inf:
        raise ValueError("dependence-testing bound infeasible at this eps")
    return BoundResult(log_m=LOG2 + best, kind="dt", param=eps)


def kappa_beta_relaxed(channel, p_x, q_y, eps, tau, permissible=None):
    """Relaxed maximal-error bound: beta_tau(P_Y,Q_Y) over the worst
    per-input beta_{1-eps+tau}(P_{Y|X=x}, Q_Y)."""
    if not 0.0 < tau < eps:
        raise ValueError("need 0 < tau < eps")
    p_y = channel.output_dist(p_x)
    b_num = beta(tau, p_y, q_y)[0]
    inputs = range(channel.n_inputs) if permissible is None else permissible
    b_den = 0.0
    for x in inputs:
        row = DiscreteDist(channel.matrix[x])
        b_den = max(b_den, beta(1.0 - eps + tau, row, q_y)[0])
    if b_den == 0.0:
        return BoundResult(log_m=np.inf, kind="kappa_beta_relaxed", param=tau)
    return BoundResult(log_m=math.log(b_num) - math.log(b_den),
                       kind="kappa_beta_relaxed", param=tau,
                       components={"log_beta_num": math.log(b_num)
                                   if b_num > 0 else -np.inf,
                                   "log_beta_den": math.log(b_den)})


@dataclass(frozen=True)
class CodebookTrial:
    codewords: np.ndarray
    avg_error: float
    m: int
    trials_used: int
    found: bool
    decoder: NPTest


def exact_average_error(channel, codewords, accept):
    """Exact average error of the first-accept decoder, by full summation.

    accept[x, y] is the probability that the (randomized) per-codeword test
    fires; the decoder returns the smallest message index whose test fires.
    """
    W = channel.matrix
    Z = accept[codewords]                     # (M, |B|)
    no_earlier = np.cumprod(1.0 - Z, axis=0)
    shifted = np.vstack([np.ones(Z.shape[1]), no_earlier[:-1]])
    p_correct = np.sum(W[codewords] * Z * shifted, axis=1)
    return 1.0 - float(np.mean(p_correct))


def verify_code_existence(channel, p_x, q_y, eps, tau, trials=200, seed=0):
    """Search random codebooks for one meeting the guaranteed (M, eps) pair.

    M = ceil(2 beta_tau / beta_{1-eps+tau}); codewords drawn iid from P_X,
    decoded by the first-accept rule on the joint NP test at power
    1 - eps + tau.  The bound guarantees E[P_e] <= eps over codebooks, so a
    codebook with exact average error <= eps must exist.
    """
    if not 0.0 < tau < eps:
        raise ValueError("need 0 < tau < eps")
    p_y = channel.output_dist(p_x)
    joint = joint_dist(p_x, channel)
    ref = independent_joint(p_x, q_y)
    b_num = beta(tau, p_y, q_y)[0]
    b_den, test = beta(1.0 - eps + tau, joint, ref)
    if b_den <= 0.0:
        raise ValueError("degenerate denominator beta; bound gives M = inf")
    m = max(1, math.ceil(2.0 * b_num / b_den))
    pj, qj = _paired(joint, ref)
    accept = test.accept_probs(pj, qj).reshape(channel.n_inputs,
                                               channel.n_outputs)
    rng = substream(seed)
    best_err = np.inf
    best_cw = None
    used = 0
    for t in range(trials):
        used = t + 1
        cw = rng.choice(channel.n_inputs, size=m, p=p_x.probs)
        err = exact_average_error(channel, cw, accept)
        if err < best_err:
            best_err = err
            best_cw = cw
        if err <= eps:
            return CodebookTrial(codewords=best_cw, avg_error=best_err,
                                 m=m, trials_used=used, found=True,
                                 decoder=test)
    return CodebookTrial(codewords=best_cw, avg_error=best_err, m=m,
                         trials_used=used, found=False, decoder=test)


# ---------------------------------------------------------------------------
# memoryless product extension
# ---------------------------------------------------------------------------

def product_channel(channel, n, cap=10 ** 6):
    """Explicit n-fold memoryless extension (inputs/outputs are tuples)."""
    from .nptest import DiscreteChannel
    size = channel.n_inputs ** n * channel.n_outputs ** n
    if size > cap:
        raise AlphabetCapError(f"product channel would have {size} atoms")
    m = channel.matrix
    out = np.array([[1.0]])
    for _ in range(n):
        out = np.kron(out, m)
    return DiscreteChannel(out)


def llr_spectrum(P, Q, n, lattice=1e-9):
    """Distribution of the n-fold iid LLR sum under P and Q.

    Returns (llr_values, p_mass, q_mass) sorted by descending LLR, with
    values rounded to the lattice so atom counts stay bounded.
    """
    p, q = _paired(P, Q)
    keep = ~((p == 0) & (q == 0))
    p, q = p[keep], q[keep]
    llr = _llr(p, q)
    vals, pm, qm = llr, p.copy(), q.copy()
    for _ in range(n - 1):
        v = vals[:, None] + llr[None, :]
        pm2 = pm[:, None] * p[None, :]
        qm2 = qm[:, None] * q[None, :]
        v, pm2, qm2 = v.ravel(), pm2.ravel(), qm2.ravel()
        # inf + (-inf) pairs carry zero mass on both sides; drop them
        bad = np.isnan(v)
        if np.any(bad):
            v, pm2, qm2 = v[~bad], pm2[~bad], qm2[~bad]
        key = np.where(np.isfinite(v), np.round(v / lattice), v)
        uniq, inv = np.unique(key, return_inverse=True)
        pm = np.bincount(inv, weights=pm2)
        qm = np.bincount(inv, weights=qm2)
        vals = np.where(np.isfinite(uniq), uniq * lattice, uniq)
    order = np.argsort(-vals, kind="stable")
    return vals[order], pm[order], qm[order]


def product_beta_spectrum(P, Q, n, alpha, lattice=1e-9):
    """beta_alpha(P^n, Q^n) via the LLR-sum spectrum (exact to the lattice)."""
    vals, pm, qm = llr_spectrum(P, Q, n, lattice=lattice)
    cum_p = np.cumsum(pm)
    cum_q = np.cumsum(qm)
    k = int(np.searchsorted(cum_p, alpha - 1e-15, side="left"))
    k = min(k, pm.size - 1)
    prev_p = cum_p[k - 1] if k > 0 else 0.0
    prev_q = cum_q[k - 1] if k > 0 else 0.0
    t = 0.0 if pm[k] == 0 else min(max((alpha - prev_p) / pm[k], 0.0), 1.0)
    return float(prev_q + t * qm[k])

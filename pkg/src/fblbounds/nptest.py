"""Exact Neyman-Pearson binary hypothesis testing on finite alphabets.

The central object is beta(alpha, P, Q): the minimum Q-measure of a
(randomized) test whose P-power is at least alpha.  The optimal test
thresholds the log-likelihood ratio and randomizes on the boundary atom;
ties in the LLR are merged into a single boundary block so the returned
test is canonical.
"""

import math
from dataclasses import dataclass

import numpy as np

PROB_ATOL = 1e-12
SLACK_TOL = -1e-12


class AlphabetMismatchError(ValueError):
    pass


class AlphabetCapError(ValueError):
    pass


@dataclass(frozen=True)
class DiscreteDist:
    """Probability vector over an indexed finite alphabet."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a nonempty 1-D vector")
        if np.any(p < 0):
            raise ValueError("negative probability entry")
        if abs(p.sum() - 1.0) > PROB_ATOL * max(1, p.size):
            raise ValueError(f"probabilities sum to {p.sum()}, not 1")

    def __len__(self):
        return self.probs.size


@dataclass(frozen=True)
class DiscreteChannel:
    """Row-stochastic |input| x |output| transition matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.size == 0:
            raise ValueError("matrix must be 2-D and nonempty")
        if np.any(m < 0):
            raise ValueError("negative transition probability")
        rowsums = m.sum(axis=1)
        if np.any(np.abs(rowsums - 1.0) > PROB_ATOL * max(1, m.shape[1])):
            raise ValueError("rows must each sum to 1")

    @property
    def n_inputs(self):
        return self.matrix.shape[0]

    @property
    def n_outputs(self):
        return self.matrix.shape[1]

    def output_dist(self, p_x):
        """P_Y = channel applied to the input distribution."""
        if len(p_x) != self.n_inputs:
            raise AlphabetMismatchError("input distribution size mismatch")
        return DiscreteDist(p_x.probs @ self.matrix)


def parse_dist(text):
    """One whitespace-separated line of decimals."""
    vals = [float(t) for t in text.split()]
    return DiscreteDist(np.array(vals))


def parse_channel(text):
    """One line per input row, whitespace-separated decimals."""
    rows = [[float(t) for t in line.split()]
            for line in text.strip().splitlines() if line.strip()]
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError("ragged channel matrix")
    return DiscreteChannel(np.array(rows))


def load_dist(path):
    with open(path) as fh:
        return parse_dist(fh.read())


def load_channel(path):
    with open(path) as fh:
        return parse_channel(fh.read())


@dataclass(frozen=True)
class NPTest:
    """Canonical optimal randomized LLR-threshold test.

    Accept fully when log(dP/dQ) > llr_threshold, accept with probability
    boundary_prob on the (merged) boundary block, reject below.
    """

    llr_threshold: float
    boundary_prob: float
    achieved_power: float
    achieved_size: float

    def accept_probs(self, p, q):
        """Per-atom acceptance probability of this test on the pair (p, q)."""
        llr = _llr(p, q)
        z = np.zeros_like(p, dtype=float)
        z[llr > self.llr_threshold] = 1.0
        z[np.isclose(llr, self.llr_threshold, rtol=1e-12, atol=1e-12)] \
            = self.boundary_prob
        # +inf boundary: atoms with q == 0, p > 0 are always accepted
        if math.isinf(self.llr_threshold) and self.llr_threshold > 0:
            z[(q == 0) & (p > 0)] = self.boundary_prob
        return z

    def apply(self, P, Q):
        """Forward evaluation: (power under P, size under Q) by summation."""
        p, q = _paired(P, Q)
        z = self.accept_probs(p, q)
        return float(np.dot(z, p)), float(np.dot(z, q))


def _paired(P, Q):
    if len(P) != len(Q):
        raise AlphabetMismatchError(
            f"alphabet sizes differ: {len(P)} vs {len(Q)}")
    return P.probs, Q.probs


def _llr(p, q):
    with np.errstate(divide="ignore", invalid="ignore"):
        llr = np.log(p) - np.log(q)
    llr[(p > 0) & (q == 0)] = np.inf
    llr[p == 0] = -np.inf  # never needed by an optimal test; placed last
    return llr


def beta(alpha, P, Q):
    """Exact minimum type-II error at power alpha, with the optimal test.

    Returns (beta_value, NPTest).  Atoms are sorted by decreasing LLR,
    equal-LLR atoms merged, and the boundary block randomized so the
    achieved power equals alpha exactly.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0,1]")
    p, q = _paired(P, Q)
    llr = _llr(p, q)
    order = np.argsort(-llr, kind="stable")
    llr_s, p_s, q_s = llr[order], p[order], q[order]

    # merge equal-LLR runs into blocks
    blocks = []
    i = 0
    while i < llr_s.size:
        j = i + 1
        while j < llr_s.size and (llr_s[j] == llr_s[i]
                                  or abs(llr_s[j] - llr_s[i]) < 1e-14):
            j += 1
        blocks.append((llr_s[i], p_s[i:j].sum(), q_s[i:j].sum()))
        i = j

    cum_p = 0.0
    cum_q = 0.0
    for g, pb, qb in blocks:
        if pb == 0.0:
            continue
        if cum_p + pb >= alpha - PROB_ATOL:
            t = 0.0 if pb == 0 else min(max((alpha - cum_p) / pb, 0.0), 1.0)
            b = cum_q + t * qb
            test = NPTest(llr_threshold=float(g), boundary_prob=float(t),
                          achieved_power=float(alpha), achieved_size=float(b))
            return float(b), test
        cum_p += pb
        cum_q += qb
    # alpha exceeds total P-mass of the support (numerically alpha ~ 1)
    test = NPTest(llr_threshold=-np.inf, boundary_prob=0.0,
                  achieved_power=float(cum_p), achieved_size=float(cum_q))
    return float(cum_q), test


def product_dist(factors, cap=10 ** 6):
    """Explicit product of factor distributions, capped in size."""
    total = 1
    for f in factors:
        total *= len(f)
        if total > cap:
            raise AlphabetCapError(
                f"product alphabet exceeds cap of {cap} atoms")
    out = np.array([1.0])
    for f in factors:
        out = np.kron(out, f.probs)
    return DiscreteDist(out)


def product_beta(alpha, p_factors, q_factors, cap=10 ** 6):
    """Exact beta on the explicitly formed product alphabet."""
    if len(p_factors) != len(q_factors):
        raise AlphabetMismatchError("factor count mismatch")
    P = product_dist(p_factors, cap=cap)
    Q = product_dist(q_factors, cap=cap)
    return beta(alpha, P, Q)[0]


def joint_dist(p_x, channel):
    """Joint over (x, y) atoms, flattened row-major."""
    if len(p_x) != channel.n_inputs:
        raise AlphabetMismatchError("input distribution size mismatch")
    return DiscreteDist((p_x.probs[:, None] * channel.matrix).ravel())


def independent_joint(p_x, q_y):
    return DiscreteDist(np.outer(p_x.probs, q_y.probs).ravel())


def check_dpi(p_x, q_x, kernel, alpha):
    """beta(P_X,Q_X) <= beta(kernel∘P_X, kernel∘Q_X); returns (ok, slack)."""
    b_in = beta(alpha, p_x, q_x)[0]
    b_out = beta(alpha, kernel.output_dist(p_x), kernel.output_dist(q_x))[0]
    slack = b_out - b_in
    return slack >= SLACK_TOL, slack


def mixture_grid_infimum(weights, components, channel, q_y, alpha,
                         grid_points=200):
    """Grid infimum of sum_j w_j beta_{a_j} over {a_j in [0,1]:
    sum w_j a_j = alpha}; two-component case only (the oracle used for the
    disjoint-support equality)."""
    if len(weights) != 2:
        raise ValueError("grid oracle supports exactly two components")
    w1, w2 = weights
    betas = []
    for comp in components:
        betas.append(lambda a, c=comp: beta(
            a, joint_dist(c, channel), independent_joint(c, q_y))[0])
    lo = max(0.0, (alpha - w2) / w1) if w1 > 0 else 0.0
    hi = min(1.0, alpha / w1) if w1 > 0 else 1.0
    best = np.inf
    for a1 in np.linspace(lo, hi, grid_points):
        a2 = (alpha - w1 * a1) / w2 if w2 > 0 else 0.0
        if not -1e-12 <= a2 <= 1.0 + 1e-12:
            continue
        a2 = min(max(a2, 0.0), 1.0)
        best = min(best, w1 * betas[0](a1) + w2 * betas[1](a2))
    return best


def check_mixture_bound(weights, components, channel, q_y, alpha):
    """Mixture lower bound on the joint beta; returns (ok, per-j slacks).

    P_X = sum_j w_j P_{X_j}.  For each j the joint beta must dominate
    w_j * beta_{1-(1-alpha)/w_j}(P_{X_j,Y}, P_{X_j} Q_Y), with the subscript
    clamped to [0,1].
    """
    weights = np.asarray(weights, dtype=float)
    if abs(weights.sum() - 1.0) > PROB_ATOL * max(1, weights.size):
        raise ValueError("weights must sum to 1")
    p_x = DiscreteDist(sum(w * c.probs for w, c in zip(weights, components)))
    b_mix = beta(alpha, joint_dist(p_x, channel),
                 independent_joint(p_x, q_y))[0]
    slacks = []
    for w, comp in zip(weights, components):
        if w == 0.0:
            continue
        a_j = min(max(1.0 - (1.0 - alpha) / w, 0.0), 1.0)
        b_j = beta(a_j, joint_dist(comp, channel),
                   independent_joint(comp, q_y))[0]
        slacks.append(b_mix - w * b_j)
    ok = all(s >= SLACK_TOL for s in slacks)
    return ok, slacks


def output_llr_gamma(p_y, q_y, delta2):
    """Largest gamma with P_Y[dP_Y/dQ_Y >= gamma] >= 1 - delta2."""
    p, q = _paired(p_y, q_y)
    with np.errstate(divide="ignore"):
        ratio = np.where(q > 0, p / q, np.inf)
    ratio[p == 0] = 0.0
    order = np.argsort(-ratio)
    cum = np.cumsum(p[order])
    idx = np.searchsorted(cum, 1.0 - delta2 - PROB_ATOL)
    idx = min(idx, len(cum) - 1)
    return float(ratio[order][idx])


def check_sandwich(p_x, channel, q_y, alpha, delta1, delta2):
    """Two-sided relation between beta against P_X P_Y and against P_X Q_Y.

    Upper:  beta_{alpha+d1}(P_XY, P_X Q_Y) / beta_{d1}(P_Y, Q_Y)
              >= beta_alpha(P_XY, P_X P_Y)
    Lower:  beta_alpha(P_XY, P_X P_Y)
              >= gamma * beta_{alpha-d2}(P_XY, P_X Q_Y)
    with gamma the largest value satisfying
    P_Y[dP_Y/dQ_Y >= gamma] >= 1 - d2 (restrict the optimal test to the
    set where the output ratio is at least gamma; on that set
    dP_Y >= gamma dQ_Y, and the restriction costs at most d2 of power).
    Returns (ok, (upper_slack, lower_slack)).
    """
    if not (0.0 < delta1 < 1.0 - alpha and 0.0 < delta2 < alpha):
        raise ValueError("need delta1 in (0,1-alpha) and delta2 in (0,alpha)")
    p_y = channel.output_dist(p_x)
    joint = joint_dist(p_x, channel)
    ref_q = independent_joint(p_x, q_y)
    ref_p = independent_joint(p_x, p_y)
    b_mid = beta(alpha, joint, ref_p)[0]

    b_num = beta(alpha + delta1, joint, ref_q)[0]
    b_den = beta(delta1, p_y, q_y)[0]
    upper_slack = (b_num / b_den if b_den > 0 else np.inf) - b_mid

    g = output_llr_gamma(p_y, q_y, delta2)
    b_lo = beta(alpha - delta2, joint, ref_q)[0]
    lower_slack = b_mid - g * b_lo if math.isfinite(g) else 0.0
    ok = upper_slack >= SLACK_TOL and lower_slack >= SLACK_TOL
    return ok, (upper_slack, lower_slack)


def renyi_divergence(P, Q, lam):
    """Renyi divergence of order lam > 1, in nats; inf if P not << Q."""
    p, q = _paired(P, Q)
    if np.any((p > 0) & (q == 0)):
        return np.inf
    mask = p > 0
    return float(np.log(np.sum(p[mask] ** lam * q[mask] ** (1.0 - lam)))
                 / (lam - 1.0))


def renyi_lower_bound(P, Q, alpha, lam):
    """Closed-form lower bound on beta via the Renyi divergence of order lam."""
    if lam <= 1.0:
        raise ValueError("requires lam > 1")
    d = renyi_divergence(P, Q, lam)
    if not math.isfinite(d):
        return 0.0
    if alpha <= 0.0:
        return 0.0
    base = math.exp((lam - 1.0) * d) - (1.0 - alpha) ** lam
    if base <= 0.0:
        return 1.0
    return alpha ** (lam / (lam - 1.0)) * base ** (-1.0 / (lam - 1.0))


# ---------------------------------------------------------------------------
# randomized property suite
# ---------------------------------------------------------------------------

def random_dist(rng, size):
    return DiscreteDist(rng.dirichlet(np.ones(size)))


def random_channel(rng, n_in, n_out):
    return DiscreteChannel(rng.dirichlet(np.ones(n_out), size=n_in))


def run_property_trials(trials, seed, max_alphabet=5):
    """Randomized checks of the core beta inequalities.

    Runs `trials` independent draws per property (data processing, mixture,
    product, sandwich, Renyi) on random small-alphabet instances and returns
    one summary dict per property with the violation count and the most
    negative slack observed.
    """
    from .numerics import substream
    rng = substream(seed)
    names = ["dpi", "mixture", "product", "sandwich", "renyi"]
    counts = {k: 0 for k in names}
    worst = {k: np.inf for k in names}

    def record(name, slack):
        worst[name] = min(worst[name], slack)
        if slack < SLACK_TOL:
            counts[name] += 1

    for _ in range(trials):
        na = int(rng.integers(2, max_alphabet + 1))
        nb = int(rng.integers(2, max_alphabet + 1))
        alpha = float(rng.uniform(0.05, 0.95))

        # data processing through a random kernel
        p_x = random_dist(rng, na)
        q_x = random_dist(rng, na)
        kern = random_channel(rng, na, nb)
        record("dpi", check_dpi(p_x, q_x, kern, alpha)[1])

        # mixture lower bound on the joint beta
        w1 = float(rng.uniform(0.05, 0.95))
        comps = [random_dist(rng, na), random_dist(rng, na)]
        ch = random_channel(rng, na, nb)
        mix = DiscreteDist(w1 * comps[0].probs + (1.0 - w1) * comps[1].probs)
        q_y = ch.output_dist(random_dist(rng, na))
        _, slacks = check_mixture_bound([w1, 1.0 - w1], comps, ch, q_y, alpha)
        record("mixture", min(slacks))

        # composition bound on products: beta of the pair dominates the
        # second-stage beta evaluated at the first-stage beta
        a1 = float(rng.uniform(0.3, 0.99))
        p1, q1 = random_dist(rng, na), random_dist(rng, na)
        p2, q2 = random_dist(rng, nb), random_dist(rng, nb)
        joint_b = product_beta(a1, [p1, p2], [q1, q2])
        record("product",
               joint_b - beta(beta(a1, p1, q1)[0], p2, q2)[0])

        # two-sided sandwich between the P_X P_Y and P_X Q_Y references
        d1 = float(rng.uniform(0.05, 1.0 - alpha)) * 0.9
        d2 = float(rng.uniform(0.05, alpha)) * 0.9
        _, (s_up, s_lo) = check_sandwich(mix, ch, q_y, alpha, d1, d2)
        record("sandwich", min(s_up, s_lo))

        # Renyi closed form lower-bounds the exact beta
        lam = float(rng.uniform(1.1, 4.0))
        p_r, q_r = random_dist(rng, na), random_dist(rng, na)
        record("renyi",
               beta(alpha, p_r, q_r)[0] - renyi_lower_bound(p_r, q_r,
                                                            alpha, lam))

    return [{"property": k, "trials": trials, "violations": counts[k],
             "min_slack": (float(worst[k]) if trials else 0.0)}
            for k in names]

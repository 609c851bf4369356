"""Special functions, quantile inversion, log-domain helpers, and splittable RNG.

All probabilities are handled in nats internally; log-domain variants are
provided wherever linear-domain values can underflow (Gaussian tails beyond
~38 sigma, chi-squared tails at large blocklength).
"""

import functools
import math

import numpy as np
from scipy import special


# ---------------------------------------------------------------------------
# log-domain arithmetic
# ---------------------------------------------------------------------------

LOG_ZERO = -np.inf


def log_add(log_a, log_b):
    """log(exp(log_a) + exp(log_b)), safe for very negative inputs."""
    return np.logaddexp(log_a, log_b)


def log_sub(log_a, log_b):
    """log(exp(log_a) - exp(log_b)); requires log_a >= log_b."""
    if log_b == LOG_ZERO:
        return log_a
    if log_a < log_b:
        raise ValueError("log_sub requires log_a >= log_b")
    d = log_b - log_a
    if d == 0.0:
        return LOG_ZERO
    return log_a + log1mexp(d)


def log1mexp(x):
    """log(1 - exp(x)) for x <= 0, accurate near both endpoints."""
    x = np.asarray(x, dtype=float)
    out = np.where(x > -math.log(2.0),
                   np.log(-np.expm1(x)),
                   np.log1p(-np.exp(x)))
    return out if out.ndim else float(out)


def logsumexp(values):
    return float(special.logsumexp(np.asarray(values, dtype=float)))


# ---------------------------------------------------------------------------
# Gaussian tail
# ---------------------------------------------------------------------------

def q_func(x):
    """Upper tail P[N(0,1) > x] of the standard normal."""
    return 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def log_q_func(x):
    """log Q(x), valid far beyond the underflow point of q_func."""
    return special.log_ndtr(-np.asarray(x, dtype=float))


def q_inv(p):
    """Inverse of q_func on (0,1)."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError("q_inv requires p in (0,1)")
    out = -special.ndtri(p)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# gamma distribution
# ---------------------------------------------------------------------------

def gamma_cdf(shape, scale, x):
    """CDF of Gamma(shape, scale) via the regularized lower incomplete gamma."""
    if shape <= 0 or scale <= 0:
        raise ValueError("shape and scale must be positive")
    return special.gammainc(shape, np.asarray(x, dtype=float) / scale)


def gamma_sf(shape, scale, x):
    if shape <= 0 or scale <= 0:
        raise ValueError("shape and scale must be positive")
    return special.gammaincc(shape, np.asarray(x, dtype=float) / scale)


def log_gamma_sf(shape, scale, x):
    """log of the Gamma upper tail, stable when the tail underflows.

    Uses the series gammaincc(a, z) = z^a e^{-z}/Gamma(a) * sum_{k>=0}
    prod_{j<=k} 1/(z ... ) only when the direct value underflows; otherwise
    takes the log of the scipy value.
    """
    v = gamma_sf(shape, scale, x)
    if v > 0.0:
        return float(np.log(v))
    # continued-fraction-free fallback: log of the leading asymptotic term
    # gammaincc(a, z) ~ z^(a-1) e^(-z) / Gamma(a) * (1 + (a-1)/z + ...)
    z = float(x) / scale
    a = float(shape)
    acc = 1.0
    term = 1.0
    for k in range(1, 60):
        term *= (a - k) / z
        if abs(term) < 1e-18 * abs(acc):
            break
        acc += term
    return (a - 1.0) * math.log(z) - z - special.gammaln(a) + math.log(acc)


def log_gamma_cdf(shape, scale, x):
    """log of the Gamma lower tail, stable deep in the left tail."""
    v = gamma_cdf(shape, scale, x)
    if v > 0.0:
        return float(np.log(v))
    # left-tail series: P(a, z) = z^a e^{-z}/Gamma(a+1) * sum z^k/((a+1)...(a+k))
    z = float(x) / scale
    a = float(shape)
    acc = 1.0
    term = 1.0
    for k in range(1, 500):
        term *= z / (a + k)
        acc += term
        if term < 1e-18 * acc:
            break
    return a * math.log(z) - z - special.gammaln(a + 1.0) + math.log(acc)


def gamma_quantile(shape, scale, p):
    """Inverse of gamma_cdf in p."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0,1)")
    return scale * special.gammaincinv(shape, p)


# ---------------------------------------------------------------------------
# noncentral chi-squared
# ---------------------------------------------------------------------------

def _poisson_window(half_lam, tail_tol=1e-15):
    """Index window [j_lo, j_hi] holding all but tail_tol of Pois(half_lam)."""
    if half_lam == 0.0:
        return 0, 0
    w = 10.0 * math.sqrt(half_lam) + 40.0
    j_lo = max(0, int(half_lam - w))
    j_hi = int(half_lam + w) + 1
    # neglected mass: P[N < j_lo] + P[N > j_hi]; widen until provably small
    while j_lo > 0 and special.gammaincc(j_lo, half_lam) > tail_tol / 2:
        j_lo = max(0, j_lo - int(w))
    while special.gammainc(j_hi + 1, half_lam) > tail_tol / 2:
        j_hi += int(w)
    return j_lo, j_hi


def _poisson_logpmf(j, half_lam):
    return j * math.log(half_lam) - half_lam - special.gammaln(j + 1.0)


@functools.lru_cache(maxsize=8)
def _mixture_weights(half_lam):
    """Poisson index window and weights for the noncentral mixture."""
    j_lo, j_hi = _poisson_window(half_lam)
    j = np.arange(j_lo, j_hi + 1)
    w = np.exp(_poisson_logpmf(j, half_lam))
    j.setflags(write=False)
    w.setflags(write=False)
    return j, w


def ncx2_cdf(k, lam, x):
    """CDF of the noncentral chi-squared with k dof and noncentrality lam.

    Poisson mixture of central chi-squared CDFs, truncated so the neglected
    Poisson mass (times the trivial bound 1 on the central CDF) is < 1e-14.
    """
    if k < 1 or lam < 0:
        raise ValueError("need k >= 1 and lam >= 0")
    x = np.asarray(x, dtype=float)
    if lam == 0.0:
        out = special.gammainc(k / 2.0, np.maximum(x, 0.0) / 2.0)
        return out if out.ndim else float(out)
    j, w = _mixture_weights(lam / 2.0)
    xs = np.maximum(np.atleast_1d(x), 0.0)
    out = np.empty_like(xs)
    for i, xi in enumerate(xs):
        out[i] = float(np.dot(w, special.gammainc(k / 2.0 + j, xi / 2.0)))
    out = np.clip(out, 0.0, 1.0)
    return out.reshape(x.shape) if x.ndim else float(out[0])


def ncx2_sf(k, lam, x):
    """Upper tail of the noncentral chi-squared, computed directly."""
    if k < 1 or lam < 0:
        raise ValueError("need k >= 1 and lam >= 0")
    x = np.asarray(x, dtype=float)
    if lam == 0.0:
        out = special.gammaincc(k / 2.0, np.maximum(x, 0.0) / 2.0)
        return out if out.ndim else float(out)
    j, w = _mixture_weights(lam / 2.0)
    xs = np.maximum(np.atleast_1d(x), 0.0)
    out = np.empty_like(xs)
    for i, xi in enumerate(xs):
        out[i] = float(np.dot(w, special.gammaincc(k / 2.0 + j, xi / 2.0)))
    out = np.clip(out, 0.0, 1.0)
    return out.reshape(x.shape) if x.ndim else float(out[0])


def ncx2_pdf(k, lam, x):
    if lam == 0.0:
        a = k / 2.0
        x = float(x)
        if x <= 0.0:
            return 0.0
        return math.exp((a - 1.0) * math.log(x / 2.0) - x / 2.0
                        - special.gammaln(a)) / 2.0
    j_lo, j_hi = _poisson_window(lam / 2.0)
    j = np.arange(j_lo, j_hi + 1)
    x = float(x)
    if x <= 0.0:
        return 0.0
    a = k / 2.0 + j
    logpdf = (_poisson_logpmf(j, lam / 2.0)
              + (a - 1.0) * math.log(x / 2.0) - x / 2.0
              - special.gammaln(a) - math.log(2.0))
    return float(np.sum(np.exp(logpdf)))


@functools.lru_cache(maxsize=1)
def _leggauss_160():
    return np.polynomial.legendre.leggauss(160)


def _log_bessel_i(nu, z):
    """log I_nu(z) for nu >= 0, z > 0, without under/overflow.

    Uses the exponentially scaled Bessel function where it is
    representable and the large-order uniform asymptotic expansion
    (leading term) where it underflows.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    with np.errstate(divide="ignore"):
        out = np.log(special.ive(nu, z)) + z
    bad = ~np.isfinite(out)
    if np.any(bad):
        zb = z[bad]
        if nu <= 0.0:
            raise ValueError("scaled Bessel underflow at nonpositive order")
        t = zb / nu
        eta = np.sqrt(1.0 + t * t) + np.log(t / (1.0 + np.sqrt(1.0 + t * t)))
        out[bad] = (-0.5 * math.log(2.0 * math.pi * nu)
                    - 0.25 * np.log1p(t * t) + nu * eta)
    return out


def _ncx2_logpdf(k, lam, t):
    """Log density via the scaled Bessel function; stable for huge k, lam."""
    nu = k / 2.0 - 1.0
    t = np.asarray(t, dtype=float)
    z = np.sqrt(lam * t)
    return (-math.log(2.0) - (t + lam) / 2.0 + (k / 4.0 - 0.5) * np.log(t / lam)
            + _log_bessel_i(nu, z))


def log_ncx2_cdf(k, lam, x):
    """log of the noncentral chi-squared lower tail, stable deep in the tail.

    For arguments where the CDF is representable the mixture form is used
    directly.  Otherwise the density rises essentially exponentially on the
    far left of the bulk, so the integral over [0, x] is dominated by a
    short window below x; it is evaluated there by Gauss-Legendre quadrature
    of exp(logpdf) in log domain.  The neglected piece below the window is
    smaller by a factor e^{-120}.
    """
    if x <= 0.0:
        return -np.inf
    if lam == 0.0:
        return log_gamma_cdf(k / 2.0, 2.0, x)
    # the mixture CDF is absolutely accurate to ~1e-14, so its log is only
    # trustworthy well above that level
    v = ncx2_cdf(k, lam, x)
    if v > 1e-8:
        return float(np.log(v))
    # local exponential growth rate of the density at x
    h = 1e-6 * x
    r = float((_ncx2_logpdf(k, lam, x) - _ncx2_logpdf(k, lam, x - h))[0]) / h
    if r <= 0.0:
        raise QuantileError("log_ncx2_cdf called outside the lower tail")
    w = min(x * (1.0 - 1e-12), 120.0 / r)
    nodes, weights = _leggauss_160()
    t = (x - w / 2.0) + (w / 2.0) * nodes
    logvals = _ncx2_logpdf(k, lam, t) + np.log(weights * w / 2.0)
    m = float(np.max(logvals))
    return m + math.log(float(np.sum(np.exp(logvals - m))))


class QuantileError(RuntimeError):
    """Raised when quantile inversion fails to converge."""


def ncx2_quantile(k, lam, p, tail="lower"):
    """gamma with P[X <= gamma] = p (lower) or P[X >= gamma] = p (upper).

    Bracketing bisection to relative width 1e-12, then a few Newton steps.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0,1)")
    if tail not in ("lower", "upper"):
        raise ValueError("tail must be 'lower' or 'upper'")
    target = p if tail == "lower" else 1.0 - p
    # For extreme upper-tail targets work on the sf to avoid 1-p cancellation.
    use_sf = tail == "upper" and p < 0.5

    def f(x):
        if use_sf:
            return p - ncx2_sf(k, lam, x)
        return ncx2_cdf(k, lam, x) - target

    mean = k + lam
    spread = math.sqrt(2.0 * k + 4.0 * lam)
    lo = max(0.0, mean - 10.0 * spread)
    hi = mean + 10.0 * spread
    it = 0
    while f(lo) > 0.0:
        hi = lo
        lo = max(0.0, lo - 10.0 * spread)
        it += 1
        if lo == 0.0:
            break
        if it > 200:
            raise QuantileError("noncentral chi-squared bracket search failed")
    it = 0
    while f(hi) < 0.0:
        lo = hi
        hi += 10.0 * spread
        spread *= 2.0
        it += 1
        if it > 200:
            raise QuantileError("noncentral chi-squared bracket search failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-4 * max(1.0, abs(mid)):
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    else:
        raise QuantileError("bisection did not converge")
    # Newton polish, clamped to the bracket
    x = 0.5 * (lo + hi)
    for _ in range(60):
        fx = f(x)
        if fx < 0.0:
            lo = max(lo, x)
        else:
            hi = min(hi, x)
        d = ncx2_pdf(k, lam, x)
        if d <= 0.0:
            break
        x_new = x - fx / d
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-13 * max(1.0, abs(x)):
            x = x_new
            break
        x = x_new
    return x


# ---------------------------------------------------------------------------
# Berry-Esseen diagnostic band
# ---------------------------------------------------------------------------

BERRY_ESSEEN_CONST = 0.5600


def berry_esseen_normal_tail(n, mean, var, third_abs_moment, threshold):
    """Band containing P[S_n > threshold] for S_n a sum of n iid variables.

    mean/var/third_abs_moment are per-summand; third_abs_moment is the
    centered absolute third moment E|X - mean|^3.
    """
    if var <= 0 or n < 1:
        raise ValueError("need var > 0 and n >= 1")
    z = (threshold - n * mean) / math.sqrt(n * var)
    q = float(q_func(z))
    rho = third_abs_moment / var ** 1.5
    half = BERRY_ESSEEN_CONST * rho / math.sqrt(n)
    return max(q - half, 0.0), min(q + half, 1.0)


# ---------------------------------------------------------------------------
# splittable RNG
# ---------------------------------------------------------------------------

def substream(seed, index=0):
    """Independent, reproducible generator for (seed, index).

    Counter-based (Philox) so substreams are independent of how work is
    chunked across threads.
    """
    seed = int(seed)
    index = int(index)
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    return np.random.Generator(np.random.Philox(key=(seed << 64) + index))

"""Achievable dispersion of additive non-Gaussian noise channels under a
power-constrained Gaussian random codebook.

The mutual information, the MMSE correction constant, and the conditional
moments of the input given the output are computed by Gauss-Legendre
quadrature against the Gaussian input density; the two variance summands of
the dispersion are estimated by Monte Carlo with paired conditionally
independent noise draws (the pairing makes both summands unbiased without
nested conditional expectations).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .numerics import q_inv, substream


class NoiseModelError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseModel:
    """Absolutely continuous real noise law with finite sixth moment."""

    name: str
    logpdf: callable          # vectorized log density
    sampler: callable         # sampler(rng, size) -> ndarray
    moment: callable          # moment(k) -> E[Z^k], k <= 6
    support_radius: float     # radius holding all but ~1e-12 of the mass

    def __post_init__(self):
        if not math.isfinite(self.moment(6)):
            raise NoiseModelError(f"{self.name}: E|Z|^6 must be finite")
        # normalization check on a fine uniform grid; trapezoid handles
        # kinked (laplace) and piecewise-linear (tabulated) densities that
        # defeat high-order quadrature
        x = np.linspace(-self.support_radius, self.support_radius, 400001)
        total = float(np.trapezoid(np.exp(self.logpdf(x)), x))
        if abs(total - 1.0) > 1e-8:
            raise NoiseModelError(
                f"{self.name}: density integrates to {total}, not 1")

    @property
    def variance(self):
        return self.moment(2) - self.moment(1) ** 2


def gaussian_noise(std=1.0):
    v = std ** 2

    def moment(k):
        if k % 2 == 1:
            return 0.0
        return v ** (k // 2) * {0: 1, 2: 1, 4: 3, 6: 15}[k]

    return NoiseModel(
        name=f"gaussian(std={std})",
        logpdf=lambda z: -0.5 * np.asarray(z) ** 2 / v
        - 0.5 * math.log(2 * math.pi * v),
        sampler=lambda rng, size: std * rng.standard_normal(size),
        moment=moment,
        support_radius=10.0 * std)


def laplace_noise(scale=1.0):
    b = scale

    def moment(k):
        if k % 2 == 1:
            return 0.0
        return math.factorial(k) * b ** k

    return NoiseModel(
        name=f"laplace(scale={b})",
        logpdf=lambda z: -np.abs(np.asarray(z)) / b - math.log(2 * b),
        sampler=lambda rng, size: rng.laplace(0.0, b, size),
        moment=moment,
        support_radius=35.0 * b)


def uniform_noise(halfwidth=1.0):
    a = halfwidth

    def moment(k):
        return a ** k / (k + 1) if k % 2 == 0 else 0.0

    def logpdf(z):
        z = np.asarray(z, dtype=float)
        out = np.full(z.shape, -np.inf)
        out[np.abs(z) <= a] = -math.log(2 * a)
        return out

    return NoiseModel(
        name=f"uniform(halfwidth={a})",
        logpdf=logpdf,
        sampler=lambda rng, size: rng.uniform(-a, a, size),
        moment=moment,
        support_radius=a)


def student_t_noise(df=8.0):
    if df <= 6:
        raise NoiseModelError("student-t needs df > 6 for a finite E|Z|^6")

    def moment(k):
        if k % 2 == 1:
            return 0.0
        # E[T^k] for even k: df^{k/2} * prod odd / prod (df-2j)
        num = 1.0
        den = 1.0
        for j in range(1, k // 2 + 1):
            num *= 2 * j - 1
            den *= df - 2 * j
        return df ** (k // 2) * num / den

    radius = float(-stats.t.ppf(5e-13, df))
    return NoiseModel(
        name=f"student_t(df={df})",
        logpdf=lambda z: stats.t.logpdf(np.asarray(z), df),
        sampler=lambda rng, size: rng.standard_t(df, size),
        moment=moment,
        support_radius=radius)


def tabulated_noise(xs, density, name="tabulated"):
    """Noise from a tabulated (x, density) grid with trapezoid interpolation."""
    xs = np.asarray(xs, dtype=float)
    density = np.asarray(density, dtype=float)
    if xs.ndim != 1 or xs.size < 3 or np.any(np.diff(xs) <= 0):
        raise NoiseModelError("grid must be strictly increasing, size >= 3")
    if np.any(density < 0):
        raise NoiseModelError("density must be nonnegative")
    total = np.trapezoid(density, xs)
    if total <= 0:
        raise NoiseModelError("density integrates to zero")
    density = density / total  # renormalize; the grid is the ground truth
    cdf = np.concatenate([[0.0], np.cumsum(
        0.5 * (density[1:] + density[:-1]) * np.diff(xs))])
    cdf /= cdf[-1]

    def logpdf(z):
        z = np.asarray(z, dtype=float)
        vals = np.interp(z, xs, density, left=0.0, right=0.0)
        with np.errstate(divide="ignore"):
            return np.log(vals)

    def sampler(rng, size):
        return np.interp(rng.random(size), cdf, xs)

    def moment(k):
        return float(np.trapezoid(xs ** k * density, xs))

    return NoiseModel(name=name, logpdf=logpdf, sampler=sampler,
                      moment=moment,
                      support_radius=float(max(abs(xs[0]), abs(xs[-1]))))


def load_tabulated_noise(path):
    data = np.loadtxt(path)
    return tabulated_noise(data[:, 0], data[:, 1], name=str(path))


BUILTIN_NOISE = {
    "gaussian": gaussian_noise,
    "laplace": laplace_noise,
    "uniform": uniform_noise,
    "student-t": student_t_noise,
}


# ---------------------------------------------------------------------------
# quadrature machinery
# ---------------------------------------------------------------------------

def _gauss_legendre(lo, hi, nodes):
    x, w = np.polynomial.legendre.leggauss(nodes)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid + half * x, half * w


class OutputDensity:
    """q_Y and conditional input moments for Y = X + Z, X ~ N(0, P)."""

    def __init__(self, noise, p, nodes=240):
        if p <= 0:
            raise ValueError("P must be positive")
        self.noise = noise
        self.p = p
        r = 10.0 * math.sqrt(p)
        self.x, self.w = _gauss_legendre(-r, r, nodes)
        self.log_prior = (-0.5 * self.x ** 2 / p
                          - 0.5 * math.log(2 * math.pi * p)
                          + np.log(self.w))

    def stats(self, y, chunk=20000):
        """(log q_Y(y), E[X|Y=y], Var[X|Y=y]) for an array of y values."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        logq = np.empty(y.size)
        m = np.empty(y.size)
        v = np.empty(y.size)
        for s in range(0, y.size, chunk):
            ys = y[s:s + chunk]
            logk = self.log_prior[None, :] \
                + self.noise.logpdf(ys[:, None] - self.x[None, :])
            top = logk.max(axis=1, keepdims=True)
            top = np.where(np.isfinite(top), top, 0.0)
            k = np.exp(logk - top)
            z0 = k.sum(axis=1)
            with np.errstate(divide="ignore"):
                logq[s:s + chunk] = np.log(z0) + top[:, 0]
            z1 = k @ self.x
            z2 = k @ self.x ** 2
            with np.errstate(divide="ignore", invalid="ignore"):
                mean = z1 / z0
                var = z2 / z0 - mean ** 2
            m[s:s + chunk] = np.nan_to_num(mean)
            v[s:s + chunk] = np.nan_to_num(np.maximum(var, 0.0))
        return logq, m, v

    def logq(self, y):
        return self.stats(y)[0]

    def __call__(self, y):
        """Density value(s) q_Y(y)."""
        out = np.exp(self.logq(y))
        return out if np.ndim(y) else float(out[0])


def output_density(noise, p, y, nodes=240):
    """Convenience wrapper: q_Y(y) by quadrature."""
    return OutputDensity(noise, p, nodes=nodes)(y)


def d2_log_output_density(noise, p, y, nodes=240):
    """Identity form of (log q_Y)'': -1/P + Var[X|Y=y]/P^2 (nats)."""
    _, _, v = OutputDensity(noise, p, nodes=nodes).stats(y)
    return -1.0 / p + v / p ** 2


# ---------------------------------------------------------------------------
# dispersion report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DispersionReport:
    i_nats: float            # mutual information, quadrature
    v_nats2: float           # dispersion = var_cond + var_dq
    c: float                 # MMSE correction constant (nats)
    mmse: float
    var_cond: float          # E Var[i(X;Y)|X]
    var_dq: float            # Var over X of E[i|X] + c X^2
    se_v: float              # Monte-Carlo standard error of v_nats2
    i_mc: float
    samples: int
    seed: int


def _mutual_information(noise, od, p, nodes=800):
    """I = h(Y) - h(Z) by quadrature."""
    ry = 10.0 * math.sqrt(p) + noise.support_radius
    y, wy = _gauss_legendre(-ry, ry, nodes)
    logq = od.logq(y)
    q = np.exp(logq)
    qlogq = np.zeros_like(q)
    mask = q > 0
    qlogq[mask] = q[mask] * logq[mask]
    h_y = -float(np.dot(wy, qlogq))
    rz = noise.support_radius
    z, wz = _gauss_legendre(-rz, rz, nodes)
    logpz = noise.logpdf(z)
    pz = np.exp(logpz)
    h_z = -float(np.dot(wz, np.where(pz > 0, pz * logpz, 0.0)))
    return h_y - h_z


def _mmse_quadrature(noise, od, p, nodes=800):
    """mmse = P - E[E[X|Y]^2] with the outer expectation over q_Y."""
    ry = 10.0 * math.sqrt(p) + noise.support_radius
    y, wy = _gauss_legendre(-ry, ry, nodes)
    logq, m, _ = od.stats(y)
    q = np.exp(logq)
    return p - float(np.dot(wy, q * m ** 2))


def dispersion(noise, p, mc_samples=10 ** 6, seed=0, nodes=240):
    """Full dispersion report for noise model `noise` at input power p.

    mmse and c come from deterministic quadrature; the two variance
    summands come from Monte Carlo over (X, Z, Z') with X antithetic and
    two conditionally independent noise draws per input:
      E[(i1 - i2)^2]/2          -> E Var[i|X]
      E[g1 g2] - E[g]^2         -> Var(E[i|X] + c X^2),  g = i + c X^2.
    """
    if mc_samples < 2:
        raise ValueError("need at least 2 samples")
    od = OutputDensity(noise, p, nodes=nodes)
    mmse = _mmse_quadrature(noise, od, p)
    c = (mmse - p) / (2.0 * p ** 2)
    i_quad = _mutual_information(noise, od, p)

    rng = substream(seed)
    half = mc_samples // 2
    n = 2 * half
    x = rng.standard_normal(half) * math.sqrt(p)
    x = np.concatenate([x, -x])
    z1 = noise.sampler(rng, n)
    z2 = noise.sampler(rng, n)
    logpz1 = noise.logpdf(z1)
    logpz2 = noise.logpdf(z2)
    i1 = logpz1 - od.logq(x + z1)
    i2 = logpz2 - od.logq(x + z2)
    if not (np.all(np.isfinite(i1)) and np.all(np.isfinite(i2))):
        raise NoiseModelError(
            f"{noise.name}: non-finite information density sample "
            "(absolute continuity violated on the grid)")
    third = float(np.mean(np.abs(i1 - np.mean(i1)) ** 3))
    if not math.isfinite(third):
        raise NoiseModelError(
            f"{noise.name}: third absolute moment of the information "
            "density is not finite on the sample")

    d = i1 - i2
    var_cond = float(np.mean(d * d)) / 2.0
    g1 = i1 + c * x ** 2
    g2 = i2 + c * x ** 2
    gbar = 0.5 * (g1 + g2)
    mean_g = float(np.mean(gbar))
    var_dq = float(np.mean(g1 * g2)) - mean_g ** 2
    var_dq = max(var_dq, 0.0)
    v = var_cond + var_dq

    # delta-method standard error for v
    u = 0.5 * d * d + g1 * g2 - 2.0 * mean_g * gbar
    se_v = float(np.std(u)) / math.sqrt(n)

    return DispersionReport(
        i_nats=i_quad, v_nats2=v, c=c, mmse=mmse,
        var_cond=var_cond, var_dq=var_dq, se_v=se_v,
        i_mc=float(np.mean(0.5 * (i1 + i2))), samples=n, seed=seed)


def rate_second_order(noise, p, n, eps, mc_samples=10 ** 6, seed=0):
    """Leading two terms of the achievable rate, nats per channel use."""
    rep = dispersion(noise, p, mc_samples=mc_samples, seed=seed)
    return rep.i_nats - math.sqrt(rep.v_nats2 / n) * float(q_inv(eps)), rep


def awgn_reference_dispersion(p):
    """Closed-form real-AWGN dispersion P(2+P)/(2(1+P)^2) in nats^2."""
    return p * (2.0 + p) / (2.0 * (1.0 + p) ** 2)

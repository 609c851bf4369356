"""Finite-blocklength channel-coding bounds.

Achievability and converse bounds on the size of channel codes built
from ratios of binary hypothesis-testing error curves, with exact
evaluations on finite alphabets, closed forms for the power-constrained
Gaussian and exponential-noise channels, a dispersion calculator for
general additive noise, and certified Monte-Carlo bounds for MIMO block
fading.
"""

from .nptest import (DiscreteDist, DiscreteChannel, NPTest, beta,
                     parse_dist, parse_channel, load_dist, load_channel,
                     joint_dist, independent_joint, product_dist,
                     product_beta, run_property_trials)
from .bounds import (BoundResult, BetaCurve, bb_achievability, bb_converse,
                     dt_form, kappa_beta_relaxed, verify_code_existence,
                     product_channel)
from .awgn import AwgnSpec, bb_rate_achievability, bb_rate_converse, eb_curves
from .expnoise import ExpSpec, exact_bb_achievability, meta_converse_rate
from .dispersion import (NoiseModel, gaussian_noise, laplace_noise,
                         uniform_noise, student_t_noise, tabulated_noise,
                         dispersion, rate_second_order)
from .mimo import MimoSpec, rate_lower_bound, rate_curve, csir_normal_approx

__version__ = "0.1.0"

__all__ = [
    "DiscreteDist", "DiscreteChannel", "NPTest", "beta",
    "parse_dist", "parse_channel", "load_dist", "load_channel",
    "joint_dist", "independent_joint", "product_dist", "product_beta",
    "run_property_trials",
    "BoundResult", "BetaCurve", "bb_achievability", "bb_converse",
    "dt_form", "kappa_beta_relaxed", "verify_code_existence",
    "product_channel",
    "AwgnSpec", "bb_rate_achievability", "bb_rate_converse", "eb_curves",
    "ExpSpec", "exact_bb_achievability", "meta_converse_rate",
    "NoiseModel", "gaussian_noise", "laplace_noise", "uniform_noise",
    "student_t_noise", "tabulated_noise", "dispersion",
    "rate_second_order",
    "MimoSpec", "rate_lower_bound", "rate_curve", "csir_normal_approx",
]

"""Garsia entropy bounds, complete vanishing and Fourier decay for algebraic contraction ratios."""

from .algebra import IntPolynomial, RationalAngle, conjugate_profile, parse_polynomial
from .classify import angle_weight, classify_interval, classify_measure, enumerate_minimal_families, kill_coset
from .entropy import bound_schedule, conditional_entropy_step, distribution_Xn, distribution_Yn
from .errors import GarsiaError
from .fourier import decay_scan, nu_hat, select_lambda
from .group import build_group
from .measure import FiniteMeasure, golden_ratio_measure, zero_angles
from .vanishing import charequi_check, is_complete_vanishing, search_vanishing, spectrum_support

__version__ = "0.1.0"

__all__ = [
    "FiniteMeasure", "GarsiaError", "IntPolynomial", "RationalAngle", "angle_weight", "bound_schedule",
    "build_group", "charequi_check", "classify_interval", "classify_measure", "conditional_entropy_step",
    "conjugate_profile", "decay_scan", "distribution_Xn", "distribution_Yn", "enumerate_minimal_families",
    "golden_ratio_measure", "is_complete_vanishing", "kill_coset", "nu_hat", "parse_polynomial",
    "search_vanishing", "select_lambda", "spectrum_support", "zero_angles",
]

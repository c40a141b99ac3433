"""Explicit witnesses for quantitative Ornstein non-inequalities on the torus."""
from .certsearch import Certificate, certify, find_eps, find_gamma, find_lambda
from .indexcore import DerivativeSystem, MultiIndex, inner, total_order, validate_system
from .normest import NormEstimate, grid_norm, mc_norm
from .trigpoly import GaussianRational, TorusPoint, TrigPoly, differentiate, product_expand
from .witness import WitnessFamily, WitnessParams, build_family

__all__ = [
    "Certificate", "certify", "find_eps", "find_gamma", "find_lambda",
    "DerivativeSystem", "MultiIndex", "inner", "total_order", "validate_system",
    "NormEstimate", "grid_norm", "mc_norm",
    "GaussianRational", "TorusPoint", "TrigPoly", "differentiate", "product_expand",
    "WitnessFamily", "WitnessParams", "build_family",
]

"""Prototype clustering of probability vectors under Kullback-Leibler divergence."""

from .cm import Assignment, CmResult, CmTrace, assign, run_cm, run_cm_restarts, update_centers
from .datagen import MixtureSpec, generate, load_preset
from .divergence import kl, kl_smoothed, kls, pairwise_kl
from .estimators import KLKMeans, RegularizedKSelector
from .model_selection import RegularizationParams, SelectionReport, select_k
from .risk import apply_merge, empirical_risk, merge_bound, risk_decomposition
from .simplex import entropy, smooth, uniform_center, validate

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "CmResult",
    "CmTrace",
    "KLKMeans",
    "MixtureSpec",
    "RegularizationParams",
    "RegularizedKSelector",
    "SelectionReport",
    "apply_merge",
    "assign",
    "empirical_risk",
    "entropy",
    "generate",
    "kl",
    "kl_smoothed",
    "kls",
    "load_preset",
    "merge_bound",
    "pairwise_kl",
    "risk_decomposition",
    "run_cm",
    "run_cm_restarts",
    "select_k",
    "smooth",
    "uniform_center",
    "update_centers",
    "validate",
]

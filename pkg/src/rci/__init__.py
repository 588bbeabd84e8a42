"""Fair premiums for reinsurance by capital injections (RCI).

The premium of a contract that refunds the deficits of an insurer's surplus
process after ruin is computed from q-scale functions for three
spectrally negative Levy models, and cross-checked by Monte Carlo.
"""
from .exceptions import DeltaMismatchError, ModelError, NumericsError
from .model import ModelKind, ModelSpec, make_model, phi_inverse, theta_root
from .premium import (ExtremeLoss, PremiumBreakdown, PremiumQuery, Proportional,
                      delta_factor, kappa, premium_extreme_loss, premium_proportional,
                      varphi)
from .scale import ScaleEvaluator, scale_evaluator
from .simulate import McConfig, McEstimate, PathOutcome

__all__ = [
    "DeltaMismatchError", "ModelError", "NumericsError",
    "ModelKind", "ModelSpec", "make_model", "phi_inverse", "theta_root",
    "ExtremeLoss", "Proportional", "PremiumQuery", "PremiumBreakdown",
    "premium_extreme_loss", "premium_proportional", "kappa", "varphi", "delta_factor",
    "ScaleEvaluator", "scale_evaluator",
    "McConfig", "McEstimate", "PathOutcome",
]

__version__ = "0.1.0"

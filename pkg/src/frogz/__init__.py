"""Finite-lifetime random-walk (frog) systems on the integers: exact
computations, survival/extinction classification, and Monte Carlo simulation."""

__version__ = "0.1.0"

from .classify import Outcome, ProcessParams, Verdict, classify
from .mc import SimConfig, SimResult, estimate_survival, simulate_trial
from .sequences import (
    ConstantForm,
    LogInverse,
    PowerLaw,
    SequenceSpec,
    SparseOverride,
    single,
)

__all__ = [
    "ConstantForm",
    "LogInverse",
    "Outcome",
    "PowerLaw",
    "ProcessParams",
    "SequenceSpec",
    "SimConfig",
    "SimResult",
    "SparseOverride",
    "Verdict",
    "classify",
    "estimate_survival",
    "simulate_trial",
    "single",
    "__version__",
]

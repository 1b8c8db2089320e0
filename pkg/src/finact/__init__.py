"""Finite isometric models for actions of residually finite groups."""
from .actions import (SampledAction, make_builtin_action, sample_action, table_action,
                      validate_pseudometric)
from .estimators import FiniteModelEstimator, SeminormApproximator
from .exceptions import BudgetExceeded, FamilyMismatch, FinactError, ProblemError
from .model import (Caps, FiniteModel, VerificationReport, act, build_epsilon_metric, build_model, eta,
                    verify_model)
from .norms import approximate_seminorm, seminorm_to_window, validate_norm
from .quotients import check_injective, enumerate_image, quotient_for
from .sequence import SequencePlan, run_sequence

__version__ = "0.1.0"

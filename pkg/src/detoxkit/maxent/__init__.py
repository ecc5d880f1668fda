"""L2-regularized maximum-entropy (multinomial logistic regression) classifiers."""

from .loss import gradient, objective
from .model import (MaxentConfig, MaxentModel, SolverKind, decision_scores, fit_maxent,
                    predict_maxent, write_trace_csv)

__all__ = ["MaxentConfig", "MaxentModel", "SolverKind", "decision_scores", "fit_maxent",
           "gradient", "objective", "predict_maxent", "write_trace_csv"]

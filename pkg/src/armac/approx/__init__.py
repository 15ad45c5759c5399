"""Regression and classification heads: exact lookup tables and small MLPs."""

from . import checkpoint
from .feedforward import Adam, FeedForward, Parameters, finite_difference_check, masked_softmax, random_gradient_checks
from .spec import STEP_SIZES, RegressorSpec
from .tabular import TabularMean


def make_regressor(spec: RegressorSpec):
    if spec.kind == "tabular_mean":
        return TabularMean(spec.output_width)
    return FeedForward(spec)


__all__ = [
    "Adam",
    "FeedForward",
    "Parameters",
    "RegressorSpec",
    "STEP_SIZES",
    "TabularMean",
    "checkpoint",
    "finite_difference_check",
    "make_regressor",
    "masked_softmax",
    "random_gradient_checks",
]

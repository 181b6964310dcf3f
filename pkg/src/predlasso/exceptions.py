"""Exceptions and warnings shared across the package."""

from __future__ import annotations


class PredlassoError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(PredlassoError, ValueError):
    """Array shapes are inconsistent with each other or with the contract."""


class NonFiniteValue(PredlassoError, ValueError):
    """An input contains NaN or infinity where finite values are required."""


class SingularDesign(PredlassoError, ValueError):
    """A least-squares subproblem is rank-deficient beyond tolerance."""


class MissingTruth(PredlassoError, ValueError):
    """An operation needs the data-generating truth but the dataset has none."""


class EmptyWindow(PredlassoError, ValueError):
    """A forecasting window contains no observations."""


class LengthMismatch(PredlassoError, ValueError):
    """Two paired sequences differ in length."""


class DomainError(PredlassoError, ValueError):
    """A numeric argument lies outside the mathematical domain of the formula."""


class AllCandidatesFailed(PredlassoError, RuntimeError):
    """Every candidate in a tuning grid failed to produce a usable fit."""


class MissingColumn(PredlassoError, ValueError):
    """A required column is absent from an input table."""


class NonMonotoneDates(PredlassoError, ValueError):
    """A date index is not strictly increasing at monthly frequency."""


class SeriesTooShort(PredlassoError, ValueError):
    """A series is shorter than the transformation requires."""


class ConstantColumnWarning(UserWarning):
    """A predictor column is constant; its coefficient is forced to zero."""

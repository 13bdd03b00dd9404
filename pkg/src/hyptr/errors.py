"""Exception types shared across the package.

Each error carries a CLI exit code so that the command-line layer can map
failures onto the documented codes without inspecting messages.
"""

from __future__ import annotations


class HyptrError(Exception):
    """Base class for all library errors."""

    exit_code = 3


class DegenerateInput(HyptrError):
    """Input that lies on a degeneracy locus (coincident roots, zero scale...)."""

    exit_code = 2


class DegenerateDiscriminant(DegenerateInput):
    pass


class ZeroLeadingCoefficient(DegenerateInput):
    pass


class AZero(DegenerateInput):
    pass


class RootAtZero(DegenerateInput):
    pass


class CoincidentShifts(DegenerateInput):
    pass


class ZeroScale(DegenerateInput):
    pass


class LeadingCoefficientZero(DegenerateInput):
    pass


class ModelMismatch(HyptrError):
    exit_code = 2


class NumericFailure(HyptrError):
    """Numerical procedure did not reach its accuracy target."""

    exit_code = 3


class NonFiniteSample(NumericFailure):
    pass


class QuadratureFailure(NumericFailure):
    pass


class BilinearRelationViolated(NumericFailure):
    pass


class TruncationTooShallow(NumericFailure):
    pass


class NotInSiegelSpace(DegenerateInput):
    pass


class DenominatorVanishes(NumericFailure):
    pass


class CharacteristicResolutionFailed(NumericFailure):
    pass


class SingularDenominator(NumericFailure):
    pass


class PathThroughBranchPoint(NumericFailure):
    pass


class OnThetaDivisor(NumericFailure):
    pass


class WeierstrassPointLimit(DegenerateInput):
    pass


class CoincidentPoints(DegenerateInput):
    pass


class CoincidentX(DegenerateInput):
    pass


class NonSimpleRamification(NumericFailure):
    pass


class LogBranchPointAtRamification(DegenerateInput):
    pass


class RamificationAtXZero(DegenerateInput):
    pass


class PointAtRamification(DegenerateInput):
    pass


class UsageError(HyptrError):
    exit_code = 64

"""Exception hierarchy shared by every layer of the toolkit."""


class RStandardError(Exception):
    """Base class; ``stage`` is filled in by the discrimination pipeline."""

    stage = None


class ModulusMismatch(RStandardError):
    pass


class NotAUnit(RStandardError):
    pass


class InexactDivision(RStandardError):
    pass


class DescriptorMismatch(RStandardError):
    pass


class NonzeroConstantTerm(RStandardError):
    pass


class ValuationTooLow(RStandardError):
    pass


class ConvergenceFailure(RStandardError):
    pass


class InvalidLaw(RStandardError):
    pass


class InvalidPoint(RStandardError):
    pass


class NotAPower(RStandardError):
    pass


class NoStabilization(RStandardError):
    pass


class NotPowerful(RStandardError):
    pass


class NoStrategyApplies(RStandardError):
    pass


class UnfaithfulRep(RStandardError):
    pass


class RelationFailure(RStandardError):
    """Supplied matrices do not satisfy the bracket relations."""


class TransversalVerificationFailed(RStandardError):
    pass


class IndistinguishableAtPrecision(RStandardError):
    pass


class PrecisionExhausted(RStandardError):
    pass


class SpecializedLawInvalid(RStandardError):
    pass


class UnboundVariable(RStandardError):
    pass


class SentenceSyntaxError(RStandardError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position

"""Error hierarchy for the component library, policy language, and runtime."""


class AgoraError(Exception):
    """Base class for all errors raised by this package."""


# --- library loading ---

class ParseError(AgoraError):
    """Malformed document (bad JSON, unknown keys, schema violations)."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class DuplicateComponent(AgoraError):
    pass


class UnknownBehavior(AgoraError):
    pass


class BadIdentifier(AgoraError):
    pass


class FilterWithoutAppliesTo(AgoraError):
    pass


class NotFound(AgoraError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its payload; keep the message readable
        return Exception.__str__(self)


# --- reference grammar ---

class UnterminatedReference(AgoraError):
    pass


class BadScope(AgoraError):
    pass


# --- compiler ---

class StaleRegistry(AgoraError):
    pass


class InternalLinkError(AgoraError):
    pass


class InvalidPolicy(AgoraError):
    """Compilation attempted on a document whose validation report is non-empty."""

    def __init__(self, report):
        lines = "; ".join(f"{d.path}: {d.code}" for d in report.diagnostics)
        super().__init__(f"policy has {len(report.diagnostics)} diagnostic(s): {lines}")
        self.report = report


# --- engine ---

class DuplicateEvent(AgoraError):
    pass


class UnknownActionKind(AgoraError):
    pass


class MalformedFields(AgoraError):
    pass


class UnknownProposal(AgoraError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class ProposalClosed(AgoraError):
    pass


class IneligibleVoter(AgoraError):
    pass


class BallotFormMismatch(AgoraError):
    pass


class ClockRegression(AgoraError):
    pass


# --- procedures ---

class JuryTooLarge(AgoraError):
    pass


class EmptyPool(AgoraError):
    pass


class NoBallots(AgoraError):
    pass


class BallotNotTotalOrder(AgoraError):
    pass


class BudgetExceeded(AgoraError):
    pass


class SelfDelegation(AgoraError):
    pass


# --- platform and executions ---

class UnknownChannel(AgoraError):
    pass


class UnknownUser(AgoraError):
    pass


class UnknownRole(AgoraError):
    pass


class UnknownDocument(AgoraError):
    pass


class UnfilledSlot(AgoraError):
    pass


class UnknownDecorator(AgoraError):
    pass


# --- scenarios ---

class ScriptOrderViolation(AgoraError):
    pass


class UnresolvedProposalRef(AgoraError):
    pass

"""Exception hierarchy shared by all modules.

Every error carries a stable machine-readable ``code`` (emitted by the CLI as
a single-line JSON document on stderr) and an ``exit_code``: 2 for input or
contract violations, 1 for internal numerical failures.
"""


class QsxError(Exception):
    code = "Error"
    exit_code = 2


# --- input / contract violations (exit 2) ---------------------------------

class NegativeCoordinate(QsxError):
    code = "NegativeCoordinate"


class SumNotOne(QsxError):
    code = "SumNotOne"


class DimensionMismatch(QsxError):
    code = "DimensionMismatch"


class UnknownGenerator(QsxError):
    code = "UnknownGenerator"


class InvalidParameter(QsxError):
    code = "InvalidParameter"


class InvalidInput(QsxError):
    code = "InvalidInput"


class NotTangent(QsxError):
    code = "NotTangent"


class InvalidExponent(QsxError):
    code = "InvalidExponent"


class PartitionMismatch(QsxError):
    code = "PartitionMismatch"


class EndpointMismatch(QsxError):
    code = "EndpointMismatch"


class NotMonotone(QsxError):
    code = "NotMonotone"


class OutOfDomain(QsxError):
    code = "OutOfDomain"


class NotC1(QsxError):
    code = "NotC1"


class BoundaryPoint(QsxError):
    code = "BoundaryPoint"


class BaseMismatch(QsxError):
    code = "BaseMismatch"


class LeavesSimplex(QsxError):
    code = "LeavesSimplex"


class DegenerateEndpoints(QsxError):
    code = "DegenerateEndpoints"


class FlagMissing(QsxError):
    code = "FlagMissing"


class NoPerfectMatching(QsxError):
    code = "NoPerfectMatching"


class UnsupportedDimension(QsxError):
    code = "UnsupportedDimension"


# --- numerical failures (exit 1) -------------------------------------------

class NoConvergence(QsxError):
    code = "NoConvergence"
    exit_code = 1


class BracketFailure(QsxError):
    code = "BracketFailure"
    exit_code = 1


class NotRectifiable(QsxError):
    code = "NotRectifiable"
    exit_code = 1


class ProfileNotInvertible(QsxError):
    code = "ProfileNotInvertible"
    exit_code = 1

"""Exception hierarchy.

Every error raised on bad input derives from :class:`SimplexClusterError`,
which is itself a :class:`ValueError` so sklearn-style callers that catch
``ValueError`` keep working.
"""


class SimplexClusterError(ValueError):
    pass


class NegativeComponent(SimplexClusterError):
    pass


class SumOutOfTolerance(SimplexClusterError):
    pass


class DimensionTooSmall(SimplexClusterError):
    pass


class DimensionMismatch(SimplexClusterError):
    pass


class ThetaOutOfRange(SimplexClusterError):
    pass


class EmptyCluster(SimplexClusterError):
    pass


class EmptyDataset(SimplexClusterError):
    pass


class KTooLarge(SimplexClusterError):
    pass


class StaleCenters(SimplexClusterError):
    pass


class InvalidMergeSet(SimplexClusterError):
    pass


class InvalidRadii(SimplexClusterError):
    pass


class InvalidSpec(SimplexClusterError):
    pass


class CSVFormatError(SimplexClusterError):
    """Raised by CSV ingestion; ``row`` is the 0-based data row, if known."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class NegativeEntry(CSVFormatError):
    pass


class ZeroRowSum(CSVFormatError):
    pass


class RaggedRows(CSVFormatError):
    pass


class NonNumericCell(CSVFormatError):
    pass

"""Exception types raised across the toolkit."""


class DescError(Exception):
    """Base class for every error raised by this package."""


class MalformedRow(DescError, ValueError):
    def __init__(self, path, row, reason):
        self.path = str(path)
        self.row = row
        self.reason = reason
        super().__init__(f"{path}: row {row}: {reason}")


class MissingFile(DescError, FileNotFoundError):
    pass


class EmptyFile(DescError, ValueError):
    pass


class InconsistentDimension(DescError, ValueError):
    pass


class EmptyCorpus(DescError, ValueError):
    pass


class ShapeMismatch(DescError, ValueError):
    pass


class NonScalarLoss(DescError, ValueError):
    pass


class EmptySequence(DescError, ValueError):
    pass


class DimensionMismatch(DescError, ValueError):
    pass


class LabelOutOfRange(DescError, ValueError):
    pass


class EmptyDataset(DescError, ValueError):
    pass


class OutOfRangeF1(DescError, ValueError):
    pass


class TooFewSamplesPerClass(DescError, ValueError):
    pass


class LengthMismatch(DescError, ValueError):
    pass


class EmptyInput(DescError, ValueError):
    pass


class SingleClassInput(DescError, ValueError):
    pass


class EmptyClass(DescError, ValueError):
    pass


class DuplicateId(DescError, ValueError):
    pass


class UnparseableLabel(DescError, ValueError):
    pass


class MissingArtifact(DescError, FileNotFoundError):
    pass


class VersionMismatch(DescError, ValueError):
    pass


class ConfigError(DescError, ValueError):
    pass

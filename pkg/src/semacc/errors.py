"""Exception types raised across the evaluation pipeline."""


class SemaccError(Exception):
    """Base class for all errors raised by this package."""


# -- feature files / datasets ------------------------------------------------

class FeatureFileError(SemaccError, ValueError):
    pass


class MissingFile(SemaccError, FileNotFoundError):
    def __init__(self, path):
        self.path = str(path)
        super().__init__(f"file not found: {self.path}")


class MalformedHeader(FeatureFileError):
    pass


class NonFiniteValue(FeatureFileError):
    def __init__(self, row):
        self.row = row
        super().__init__(f"non-finite value in data row {row}")


class MalformedValue(FeatureFileError):
    def __init__(self, row, value):
        self.row = row
        self.value = value
        super().__init__(f"unparsable number {value!r} in data row {row}")


class DuplicateId(FeatureFileError):
    def __init__(self, point_id):
        self.id = point_id
        super().__init__(f"duplicate id {point_id!r}")


class RaggedRow(FeatureFileError):
    def __init__(self, row):
        self.row = row
        super().__init__(f"data row {row} has the wrong number of columns")


class InvalidDataset(SemaccError, ValueError):
    pass


class DimensionMismatch(SemaccError, ValueError):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"dimension mismatch: {expected} vs {got}")


class UnknownSyntheticLabel(SemaccError, ValueError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"synthetic label {label!r} has no real exemplars")


# -- numerical stages ----------------------------------------------------------

class KTooLarge(SemaccError, ValueError):
    def __init__(self, k, n, d):
        self.k, self.n, self.d = k, n, d
        super().__init__(f"k={k} exceeds min(n={n}, D={d})")


class AllZeroDistances(SemaccError, ValueError):
    pass


class CalibrationFailed(UserWarning):
    """Perplexity tolerance was not met; the best-effort row is kept."""


class NumericalDivergence(SemaccError, ArithmeticError):
    def __init__(self, iteration):
        self.iteration = iteration
        super().__init__(f"t-SNE produced non-finite coordinates at iteration {iteration}")


class EmptyClusterCollapse(SemaccError, RuntimeError):
    pass


class InsufficientClasses(SemaccError, ValueError):
    def __init__(self, n_classes, n_clusters):
        self.n_classes = n_classes
        self.n_clusters = n_clusters
        super().__init__(f"{n_classes} distinct classes cannot label {n_clusters} clusters")


class TooFewRows(SemaccError, ValueError):
    pass


class InvalidDistribution(SemaccError, ValueError):
    def __init__(self, row):
        self.row = row
        super().__init__(f"row {row} is not a probability distribution")


class UnknownLabel(SemaccError, ValueError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"label {label!r} is not one of the class names")


# -- plotting / pipeline ----------------------------------------------------------

class MissingClassification(SemaccError, ValueError):
    pass


class EmptyEmbedding(SemaccError, ValueError):
    pass


class StaleArtifact(SemaccError, RuntimeError):
    pass


class TooManyPoints(SemaccError, ValueError):
    pass


class StageError(SemaccError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")

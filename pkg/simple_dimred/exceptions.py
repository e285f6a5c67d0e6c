"""
Exception hierarchy for simple-dimred

Validation failures also subclass ValueError so callers that only know about
builtin exceptions keep working.
"""

from typing import Optional


class DimredError(Exception):
    """Base class for every error raised by simple-dimred"""


# ===== Linear algebra =====

class NonSymmetric(DimredError, ValueError):
    """Matrix expected to be symmetric is not (relative tolerance exceeded)"""


class NonFinite(DimredError, ValueError):
    """Input contains NaN or infinite entries"""


class DimensionMismatch(DimredError, ValueError):
    """Operand shapes are incompatible"""


class NotPositiveDefinite(DimredError, ArithmeticError):
    """Cholesky factorisation failed even at the largest ridge"""


class Singular(DimredError, ArithmeticError):
    """Normal matrix of a least-squares solve is not invertible"""


# ===== Graphs and methods =====

class TooFewSamples(DimredError, ValueError):
    """Not enough samples for the requested neighbour count or rank"""


class SingularLocalGram(DimredError, ArithmeticError):
    """LLE local Gram system unsolvable without regularisation"""


class SingleClass(DimredError, ValueError):
    """Supervised operation received labels from a single class"""


class Diverged(DimredError, RuntimeError):
    """Alternating solver objective increased beyond slack"""


class AllZeroSpectrum(DimredError, ArithmeticError):
    """Spectrum has no positive mass to select a rank from"""


class DegenerateData(DimredError, ValueError):
    """All samples identical, nothing to reduce"""


class OutOfSampleUnsupported(DimredError, NotImplementedError):
    """Method defines an embedding of its training samples only"""


# ===== Evaluation =====

class TooFewSubjects(DimredError, ValueError):
    """Fewer distinct subjects than requested folds"""


class NoPositives(DimredError, ValueError):
    """Sample selection needs at least one positive sample"""


class SubjectLeakage(DimredError, AssertionError):
    """A subject appears on both sides of a split"""


# ===== Data and configuration =====

class ParseError(DimredError, ValueError):
    """Feature file could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaMismatch(DimredError, ValueError):
    """Feature file lacks columns required by the schema"""


class ConfigError(DimredError, ValueError):
    """Experiment configuration is invalid"""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class MissingCell(DimredError, KeyError):
    """Report has no (label, method) cell"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "missing cell"


class CellError(DimredError, RuntimeError):
    """A module error raised while evaluating one (label, method) cell"""

    def __init__(self, label: str, method: str, cause: Exception):
        self.label = label
        self.method = method
        self.cause = cause
        super().__init__(f"[{label}/{method}] {type(cause).__name__}: {cause}")

"""Exception hierarchy shared across the package."""


class VertexflowError(Exception):
    pass


class LatticeError(VertexflowError):
    pass


class NotSymmetric(LatticeError):
    pass


class NotEven(LatticeError):
    pass


class NotPositiveDefinite(LatticeError):
    pass


class NonIntegerVector(VertexflowError):
    pass


class TruncationExceeded(VertexflowError):
    pass


class NotWeightOne(VertexflowError):
    pass


class NonIntegralSpectrum(VertexflowError):
    pass


class WeightOutOfRange(VertexflowError):
    pass


class UnsupportedGrading(VertexflowError):
    """Raised where an operation requires a semisimple (Cartan) deformation."""


class SpectrumNotResolved(VertexflowError):
    """Eigenvalue candidates failed to exhaust a level; spectrum leaves Q(i)."""


class ConfigError(VertexflowError):
    """Invalid run configuration; carries a field path for diagnostics."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")

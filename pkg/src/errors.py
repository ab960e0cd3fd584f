from typing import Optional


class L2ApproxError(ValueError):
    """Base class for every domain error raised by the package"""


class GeneratorRangeError(L2ApproxError):
    """A word uses a generator index outside the model's rank"""


class ModelMismatchError(L2ApproxError):
    """Two values built over different group models were combined"""


class IdentityUndecidableError(L2ApproxError):
    """The model cannot decide whether a word is the identity"""


class QuotientError(L2ApproxError):
    """Quotient spec is malformed, unsupported, or its closure is too large"""


class DimensionError(L2ApproxError):
    """Cell dimension or matrix shape out of range"""


class SizeCapError(L2ApproxError):
    """A dense matrix would exceed the configured size cap"""


class SpectralError(L2ApproxError):
    """Eigensolver failure or an invalid spectral density"""


class CertificationError(L2ApproxError):
    """No sandwich polynomial could be certified below the degree cap"""


class SchemaError(L2ApproxError):
    """Input document does not match the expected schema"""


class ChainConditionError(L2ApproxError):
    """d_{j-1} . d_j is not zero"""

    def __init__(
        self,
        dimension: int,
        row: int,
        col: int,
        residual: str,
        quotient: Optional[str] = None,
    ):
        self.dimension = dimension
        self.row = row
        self.col = col
        self.residual = residual
        self.quotient = quotient
        where = f" in quotient '{quotient}'" if quotient else ""
        super().__init__(
            f"chain condition fails at j={dimension}, entry ({row}, {col}){where}: "
            f"residual {residual}"
        )


class NotSelfAdjointError(L2ApproxError):
    """Matrix flagged self-adjoint differs from its adjoint"""

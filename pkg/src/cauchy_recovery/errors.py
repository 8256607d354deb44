"""Exception types shared across the package.

All indices reported in error messages are 1-based, matching the usual
mathematical numbering of matrix entries.
"""

from __future__ import annotations


class CauchyRecoveryError(Exception):
    """Base class for all errors raised by this package."""


class ZeroEntry(CauchyRecoveryError):
    """A matrix entry that must be nonzero is exactly zero."""

    def __init__(self, i: int, j: int):
        self.i = i
        self.j = j
        super().__init__(f"zero entry at position ({i}, {j})")


class SeparationViolated(CauchyRecoveryError):
    """Some difference x_i - y_j vanishes, so no Cauchy matrix exists."""


class DimensionMismatch(CauchyRecoveryError):
    """Operands have incompatible shapes."""


class SpecInvalid(CauchyRecoveryError):
    """Projector weight vectors do not have unit entry sums."""


class Singular(CauchyRecoveryError):
    """A linear system is numerically singular."""


class NoConvergence(CauchyRecoveryError):
    """An iterative kernel failed to converge."""


class SizeTooLarge(CauchyRecoveryError):
    """Input exceeds the size supported by a brute-force routine."""


class SizeTooSmall(CauchyRecoveryError):
    """Input is below the minimum size required by an operation."""


class DegenerateFit(CauchyRecoveryError):
    """Regression data does not determine a fit."""


class MatrixFormatError(CauchyRecoveryError):
    """A matrix text file failed to parse.

    Carries the 1-based line number and, when meaningful, the 1-based
    field (column) number of the offending token.
    """

    def __init__(self, message: str, line: int, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{message} ({where})")

"""Exception hierarchy shared across the pipeline."""

from __future__ import annotations

from typing import Sequence


class KgforgeError(Exception):
    """Base class for all library errors."""


class SchemaError(KgforgeError):
    """Structurally invalid input: duplicate columns, ragged rows, bad index."""


class MissingValuesError(KgforgeError):
    """Operation requires a table without missing cells."""


class SeriesTooShortError(KgforgeError):
    """Not enough observations for the requested operation."""


class DegenerateSeriesError(KgforgeError):
    """Zero variance (or zero range) where variation is required."""


class RankDeficiencyError(KgforgeError):
    """Regressor matrix is rank deficient; carries the offending columns."""

    def __init__(self, columns: Sequence[str], message: str | None = None):
        self.columns = tuple(columns)
        super().__init__(
            message
            or "rank-deficient design; dependent regressors: " + ", ".join(self.columns)
        )


class DeterministicRelationError(KgforgeError):
    """Full model fits exactly; the variance-ratio test is undefined."""


class UnstableSpecError(KgforgeError):
    """Synthetic process specification is not stable (spectral radius >= 1)."""


class ColumnMismatchError(KgforgeError):
    """A referenced column or node id does not exist in the target universe."""


class TurtleParseError(KgforgeError):
    """Text is not parseable with the graph serialization vocabulary."""

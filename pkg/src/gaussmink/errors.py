"""Exception types shared across the library.

Every error that callers are expected to branch on gets its own class; all of
them subclass :class:`GaussMinkError` so "anything this library rejected" can
be caught in one clause.  Geometry errors carry the offending index where one
exists.
"""


class GaussMinkError(ValueError):
    """Base class for all library-specific errors."""


class EmptyInputError(GaussMinkError):
    pass


class NotPointedError(GaussMinkError):
    """The generator set spans a line, so the cone contains a subspace."""


class NotFullDimensionalError(GaussMinkError):
    """The generators do not span the ambient space."""


class NotInteriorToPolarError(GaussMinkError):
    def __init__(self, index, margin, required):
        self.index = index
        self.margin = margin
        self.required = required
        super().__init__(
            f"direction {index} has interiority margin {margin:.3e} "
            f"< required {required:.3e} against the polar cone"
        )


class DuplicateDirectionError(GaussMinkError):
    def __init__(self, i, j):
        self.indices = (i, j)
        super().__init__(f"directions {i} and {j} coincide within angular tolerance")


class NonPositiveSupportError(GaussMinkError):
    def __init__(self, index, value):
        self.index = index
        super().__init__(f"support value {index} must be positive, got {value!r}")


class DirectionNotInteriorToConeError(GaussMinkError):
    """A radial query direction lies outside the open cone."""


class DimensionUnsupportedError(GaussMinkError):
    """The requested deterministic path does not exist in this dimension."""


class NonPositiveRadiusError(GaussMinkError):
    pass


class StepTooLargeError(GaussMinkError):
    """A finite-difference step left the admissible coordinate domain."""


class SwitchPointTooCloseError(GaussMinkError):
    """A radial derivative was requested too close to a facet switch."""


class DegenerateDirectionError(GaussMinkError):
    """A positively weighted direction keeps an empty facet at the floor."""


class PeakNotBracketedError(GaussMinkError):
    """The profile scan found its maximum on the bracket boundary."""


class PGreaterEqualNError(GaussMinkError):
    def __init__(self, p, n):
        super().__init__(
            f"non-uniqueness construction needs exponent p < dimension n, got p={p}, n={n}"
        )

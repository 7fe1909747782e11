"""Exception hierarchy shared by all modules."""


class DilationError(Exception):
    """Base class for every error raised by cpdilation."""


class InvalidInputError(DilationError, ValueError):
    """Malformed input: shape mismatch, wrong algebra, negative multiplicity."""


class NotCompletelyPositiveError(DilationError):
    """A Choi block has an eigenvalue below the positivity tolerance."""

    def __init__(self, block, eigenvalue):
        self.block = block
        self.eigenvalue = float(eigenvalue)
        super().__init__(
            f"map is not completely positive: Choi block {block} has eigenvalue {eigenvalue:.3e}"
        )


class MustBeMinimalError(DilationError):
    """The operation is only defined for minimal representations."""


class RepresentationsInequivalentError(DilationError):
    """Two representations do not reconstruct to the same CP map."""


class NoDecompositionError(DilationError):
    """A decomposition was requested for an extremal map."""


class GeneratorFailureError(DilationError):
    """A random generator exhausted its resampling budget."""


class NumericalError(DilationError):
    """An internal numerical consistency check failed."""

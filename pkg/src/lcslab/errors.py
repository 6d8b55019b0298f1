"""Exception hierarchy shared by all lcslab modules."""


class LabError(Exception):
    """Base class for all errors raised by lcslab."""


class ConfigInvalid(LabError):
    """A config file or in-memory specification failed validation."""


class DimensionMismatch(LabError):
    """Vector/matrix shapes do not line up."""


class NotIrreducible(LabError):
    """The transition matrix does not define an irreducible chain."""


class NotMixing(LabError):
    """Mixing quantities requested for a chain that is not irreducible
    and aperiodic."""


class IterationCap(LabError):
    """An iterative search exceeded its step cap before converging."""


class NoPositivePower(LabError):
    """No matrix power P^k with all entries positive was found within
    the allowed range of k."""


class LengthMismatch(LabError):
    """Word lengths incompatible with the requested operation."""


class AlphabetTooLarge(LabError):
    """Alphabet exceeds the mask-memory budget of the bit-parallel kernel."""


class InvalidPartition(LabError):
    """A block partition violates its structural constraints."""


class EnumerationCapExceeded(LabError):
    """An exhaustive enumeration would exceed the configured cap."""


class PreconditionViolated(LabError):
    """Model does not satisfy the hypotheses required by an estimator."""

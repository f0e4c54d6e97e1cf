"""Exception types shared across the package."""


class KmlError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(KmlError):
    """An input document does not match its schema.

    Carries a ``path`` into the offending document, such as
    ``$.entries[1][2]``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class RingMismatch(KmlError):
    """An operation received operands over incompatible base rings."""


class AmbientMismatch(KmlError):
    """Submodules of free modules of different ranks were combined."""


class NotAComplex(KmlError):
    """Differentials whose composite is nonzero were passed to homology."""


class InvalidCube(KmlError):
    """A cube fails functoriality (some square does not commute)."""


class UnknownDirection(KmlError):
    """A direction label is not part of the cube."""


class InvalidGradedModule(KmlError):
    """A graded module has inconsistent shapes or non-commuting maps."""


class InvalidAffineObject(KmlError):
    """An affine object has non-commuting or ill-defined endomorphisms."""


class BoundExceeded(KmlError):
    """Annihilation could not be decided within the configured bound."""


class WindowTooSmall(KmlError):
    """The truncation window is too small for the requested computation."""


class NotTRegular(KmlError):
    """Higher Koszul homology does not vanish on the window."""


class NotNil(KmlError):
    """The object is not supported in finitely many degrees within the window."""


class NotFound(KmlError):
    """A searched-for index does not exist within the window."""


class InvalidFiltration(KmlError):
    """A filtration violates decreasingness or the endomorphism condition."""


class NotNilpotent(KmlError):
    """The selected endomorphisms are not jointly nilpotent."""


class NotInvariant(KmlError):
    """A submodule is not stable under the chosen endomorphisms."""


class NotExact(KmlError):
    """A claimed short exact sequence fails exactness at some degree."""

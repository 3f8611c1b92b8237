"""Exception hierarchy.

Every failure mode that tests are allowed to rely on gets its own class;
`IdentityFalsifiedError` is special: it is raised when a closed-form identity
that the library's constructions depend on fails symbolically, which means a
mathematical claim has been falsified rather than an input being bad.
"""


class GrassblowError(Exception):
    pass


class DimensionError(GrassblowError):
    """Matrix or block shapes do not match the required layout."""


class DivisibilityError(GrassblowError):
    """Exact polynomial division requested but the divisor does not divide."""


class MissingAssignmentError(GrassblowError):
    """A substitution did not cover every variable of the polynomial."""


class RangeError(GrassblowError):
    """An index (stratum, stage, layer) is outside its admissible range."""


class UndefinedPointError(GrassblowError):
    """A rational map is undefined at the given point."""

    def __init__(self, msg, stratum=None):
        super().__init__(msg)
        self.stratum = stratum


class InvalidGroupElementError(GrassblowError):
    """A matrix that should act invertibly is singular."""


class InvalidParameterError(GrassblowError):
    """Scalar or structural parameters violate a precondition."""


class ChartDomainError(GrassblowError):
    """A point does not lie in the domain/image of the requested chart."""


class IdentityFalsifiedError(GrassblowError):
    """A symbolic identity the construction relies on does not hold."""


class PivotFailureError(GrassblowError):
    """A Gaussian-elimination style recursion hit a zero pivot."""

    def __init__(self, msg, stage=None):
        super().__init__(msg)
        self.stage = stage


class DegenerateOrbitError(GrassblowError):
    """The orbit of the point is a single fixed point."""


class StratifiedOrbitError(GrassblowError):
    """The point's flow does not run from the source to the sink."""


class InternalInconsistencyError(GrassblowError):
    """A condition that should be mathematically impossible occurred."""

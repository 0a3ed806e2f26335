"""Exception taxonomy shared by all modules.

The CLI maps these onto exit codes: usage problems exit 2, stratum or
hypothesis failures exit 3, internal invariant violations exit 4.
"""


class MorselabError(Exception):
    """Base class for all library errors."""


class SpaceError(MorselabError):
    """A point chart, window, or space description is invalid for the space."""


class GeodesicError(MorselabError):
    """A geodesic request is ill-posed (equal endpoints, wrong space kind)."""


class ProjectionUndefined(MorselabError):
    """Projection of a boundary point onto a geodesic it bounds."""


class StratumViolation(MorselabError):
    """A tuple failed a pairwise contracting-constant bound."""

    def __init__(self, pair, constant, bound):
        super().__init__(
            f"pair {pair} has contracting constant {constant:.6g} > {bound:.6g}"
        )
        self.pair = pair
        self.constant = constant
        self.bound = bound


class HypothesisFailure(MorselabError):
    """A construction's hypothesis (e.g. 2-stability of the input map) failed."""


class EmptyPreimage(MorselabError):
    """No triangle barycenter lands in the requested ball; enlarge the radius."""


class InvariantViolation(MorselabError):
    """An internal consistency check failed; indicates a geometry bug."""

"""Exception hierarchy shared by all neutralspec modules."""


class NeutralSpecError(Exception):
    """Base class for all neutralspec-specific failures."""


class ToleranceNotMet(NeutralSpecError):
    """A refinement loop stagnated before reaching the requested residual.

    Typically signals pathological parameters near a double root.
    """


class BoundaryTooClose(NeutralSpecError):
    """A zero of the characteristic function lies too close to a contour.

    The winding number cannot be trusted; the caller must perturb the
    rectangle or contour.
    """


class DerivativeVanished(NeutralSpecError):
    """Newton iteration hit a point with |h'| below the safe floor.

    Possible multiple root; callers fall back to contour subdivision.
    """


class InsufficientRoots(NeutralSpecError):
    """Not enough certified eigenvalues to resolve the requested gaps."""


class IncompleteEnumeration(NeutralSpecError):
    """The asymptotic tail bound cannot guarantee spectral completeness."""


class NearSpectrum(NeutralSpecError):
    """Resolvent requested at a point too close to the spectrum."""


class MultipleRoot(NeutralSpecError):
    """A projection formula valid only for simple eigenvalues was applied
    to a multiple root."""


class WrongCount(NeutralSpecError):
    """A contour that must enclose exactly one eigenvalue encloses a
    different number."""


class DoubleRootExcluded(NeutralSpecError):
    """Auxiliary index n = 0 requested for c = -1, where the auxiliary
    characteristic function has a double root at 0."""


class InconsistentHistory(NeutralSpecError):
    """Initial derivative data is not the derivative of the initial state."""


class SignalUnderflow(NeutralSpecError):
    """The trajectory norm fell below measurable size inside the fit window."""

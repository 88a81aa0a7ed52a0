"""Exception types shared across the package."""


class BiphotonError(Exception):
    """Base class for all domain errors raised by this package."""


class PoleAtK(BiphotonError):
    """Wavenumber sits on a superradiant singularity of the dispersion."""


class ChiralNoGap(BiphotonError):
    """Gap-regime query on a fully chiral coupling, which has no band gap."""


class DegenerateOmega(BiphotonError):
    """Quartic reduction undefined at omega ~ 0; use the reduced equation."""


class NoConvergence(BiphotonError):
    """Root polishing failed the residual check or a root sits on a pole."""


class PoleAtZ(BiphotonError):
    """Ansatz argument z hits a denominator zero of the rational functions."""


class NotBoundCandidate(BiphotonError):
    """(K, omega) does not classify as a two-inside-root bound candidate."""


class NotResonanceCandidate(BiphotonError):
    """(K, omega) does not classify as a one-inside/two-unit resonance candidate."""


class NoBoundState(BiphotonError):
    """No determinant sign change found inside the gap window at this K."""


class NotInGap(BiphotonError):
    """Center-of-mass momentum outside the gap regime."""


class NotChiral(BiphotonError):
    """Chiral closed form requested for a coupling that is not fully chiral."""


class NotRealizable(BiphotonError):
    """Wavefunction keeps a nonzero imaginary part after global phase fixing."""


class SingularSystem(BiphotonError):
    """Resonance 2x2 constraint system is rank deficient."""


class UnitarityViolation(BiphotonError):
    """Propagating-pair coefficient failed the unit-modulus physics check."""


class EmptyRange(BiphotonError):
    """No scan point in the requested range is a resonance candidate."""


class DivergentAnsatz(BiphotonError):
    """Truncated-lattice residual requested for a non-decaying component."""


class IoFailure(BiphotonError):
    """Output table could not be written."""

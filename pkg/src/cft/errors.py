"""Exception types shared across the package."""


class CftError(Exception):
    """Base class for all package-specific errors."""


class DegenerateExtension(CftError):
    """Conductor too small: the Galois group is trivial."""


class NotInField(CftError):
    """Element is not fixed by the subgroup that defines the field."""


class NotAGenerator(CftError):
    """Element does not generate the expected field."""


class NotAlgebraicInteger(CftError):
    """Characteristic polynomial has a non-integer coefficient."""


class GeneratorSearchExhausted(CftError):
    """Bounded search for a subfield generator ran out of candidates."""


class VerificationFailed(CftError):
    """A constructed certificate failed its own verification.

    This indicates an implementation bug, never an expected runtime
    condition, and is deliberately loud.
    """


class SizeGuardExceeded(CftError):
    """A coprime-denominator table would exceed the digit budget."""


class PrecisionUnreachable(CftError):
    """Requested precision needs more series terms than the iteration budget."""


class DenominatorVanishes(CftError):
    """A ratio of modular values has a vanishing denominator at this point."""


class IndexCollision(CftError):
    """Fractional indices congruent up to sign where distinct ones are required."""


class LatticePoint(CftError):
    """Weierstrass argument lies on the period lattice."""


class UnsupportedDiscriminant(CftError):
    """Imaginary quadratic field outside the supported class-number-one list."""


class IndexLevelMismatch(CftError):
    """Fractional index and matrix have different levels."""


class RecognitionFailed(CftError):
    """Numeric conjugates did not round to an integer polynomial within tolerance."""


class SeparationTooTight(CftError):
    """Conjugate values closer than the separation tolerance; raise precision."""

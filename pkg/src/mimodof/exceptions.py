"""Custom exceptions for mimodof."""


class MimoDofError(Exception):
    """Base exception for mimodof."""


class ProfileError(MimoDofError):
    """Missing or invalid antenna profile."""


class UnsupportedProfileError(ProfileError):
    """Valid profile that an operation cannot handle."""

    def __init__(self, profile: tuple[int, ...], reason: str):
        self.profile = profile
        self.reason = reason
        super().__init__(f"Profile {profile} unsupported: {reason}")


class NumericsError(MimoDofError):
    """Non-finite or badly shaped matrix."""


class ShapeMismatchError(MimoDofError):
    """Channel, transform pair and pattern disagree on shapes."""


class NonGenericChannelError(MimoDofError):
    """A null space did not have its generic dimension."""

    def __init__(self, step: str, expected: int, actual: int):
        self.step = step
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"Non-generic channel at step '{step}': "
            f"expected null space of dimension {expected}, found {actual}"
        )


class InvertibilityError(MimoDofError):
    """Constructed beamforming or shaping matrix is not safely invertible."""

    def __init__(self, matrix: str, condition: float, limit: float):
        self.matrix = matrix
        self.condition = condition
        self.limit = limit
        super().__init__(f"{matrix} has condition number {condition:.3g} (limit {limit:.3g})")


class RegionError(MimoDofError):
    """Empty or unbounded DoF region."""


class SimulationError(MimoDofError):
    """Invalid power grid or regression window."""

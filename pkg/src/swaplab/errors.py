"""Exception types shared across the package."""


class RegisterCollisionError(ValueError):
    """Two operands carry a qubit register with the same label."""


class UnknownRegisterError(KeyError):
    """A register label is not present in the operator it was asked of."""


class NotHermitianError(ValueError):
    """A matrix that must be Hermitian is not, beyond tolerance."""


class NotUnitaryError(ValueError):
    """A matrix that must be unitary is not, beyond tolerance."""


class DimensionMismatchError(ValueError):
    """Operand dimensions are incompatible."""


class StateValidationError(ValueError):
    """A state violates a structural invariant (trace, positivity, range)."""


class InfeasibleDecompositionError(ValueError):
    """Requested mixing weight exceeds the largest feasible one."""


class ChainSizeError(ValueError):
    """Chain too long for the dense brute-force path."""


class UnsupportedConfigurationError(ValueError):
    """Requested combination of options is not supported."""


class CertificateError(RuntimeError):
    """An optimality certificate failed re-verification."""

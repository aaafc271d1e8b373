"""Exception types shared across the package."""


class MathieuNVError(Exception):
    pass


class NonConverged(MathieuNVError, ArithmeticError):
    """A truncated series failed its doubling test below the size ceiling."""


class InvalidOrder(MathieuNVError, ValueError):
    pass


class MismatchedBarrier(MathieuNVError, ValueError):
    pass


class NoResonantAction(MathieuNVError, ValueError):
    pass


class SeparatrixEnergy(MathieuNVError, ValueError):
    pass


class DegenerateFrequency(MathieuNVError, ArithmeticError):
    pass


class NonHermitian(MathieuNVError, ValueError):
    pass


class StepTooLarge(MathieuNVError, ValueError):
    pass


class UnnormalizedInput(MathieuNVError, ValueError):
    pass


class NonOrthonormalBasis(MathieuNVError, ValueError):
    pass


class SingularLambda(MathieuNVError, ArithmeticError):
    pass


class ConfigError(MathieuNVError, ValueError):
    pass

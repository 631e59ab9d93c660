"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`RadixAsymError`; the CLI maps the three families below onto exit
codes (input problems, validation failures, unsupported computations).
"""


class RadixAsymError(Exception):
    """Base class."""


class InputError(RadixAsymError, ValueError):
    """Malformed or inconsistent input (exit code 2)."""


class RadixMismatchError(InputError):
    pass


class EnumerationGuardError(InputError):
    """A brute-force enumeration would exceed its configured size guard."""


class MantissaError(InputError):
    pass


class NotZeroInsensitiveError(InputError):
    """The representation does not satisfy ``L A_0 = L``."""


class ValidationError(RadixAsymError):
    """A checked identity does not hold (exit code 1)."""


class DimensionCapError(ValidationError):
    pass


class VerificationError(ValidationError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class UnsupportedError(RadixAsymError):
    """The computation lies outside what the library handles (exit code 3)."""


class IrrationalEigenvalueError(UnsupportedError):
    pass


class IllConditionedError(UnsupportedError):
    pass


class ResonanceError(UnsupportedError):
    def __init__(self, message, ell=None):
        super().__init__(message)
        self.ell = ell


class MellinDerivativeError(UnsupportedError):
    """Fourier coefficients of a primitive with a binomial weight and no closed form."""


class RefinementDepthError(RadixAsymError):
    pass


class InsufficientTermsError(RadixAsymError):
    def __init__(self, message, last_term=None):
        super().__init__(message)
        self.last_term = last_term

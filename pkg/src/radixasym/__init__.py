"""Asymptotic expansions of radix-rational sequences.

A sequence given by a linear representation ``u_n = L A_{msd} ... A_{lsd} C``
is turned into an expansion of its partial sums, term by term, with
evaluable periodic fluctuations and their Fourier coefficients.
"""

__version__ = "0.1.0"

from .errors import (InputError, RadixAsymError, UnsupportedError,  # noqa: E402
                     ValidationError)
from .linrep import LinearRepresentation, eval_range, eval_seq, load  # noqa: E402

__all__ = ["__version__", "LinearRepresentation", "eval_seq", "eval_range", "load",
           "RadixAsymError", "InputError", "ValidationError", "UnsupportedError"]

"""Shipped example representations and brute-force oracles.

The JSON files under ``data/`` are produced by :func:`build_all`; the
oracles below are independent of the representation machinery and serve as
ground truth in tests.
"""

import json
import math
from functools import lru_cache
from importlib import resources

from . import exact as ex
from .errors import InputError
from .linrep import LinearRepresentation, close_under_multisection, from_dict, to_dict

FIXTURES = ("dichopile", "rudin_shapiro", "rudin_shapiro4", "biased_coin",
            "sum_of_digits", "triangular_tiling", "zero")


# -- oracles -----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _dichopile_fg(n_max):
    f = [0] * (n_max + 1)
    g = [0] * (n_max + 1)
    if n_max >= 1:
        f[1] = 1
    for n in range(2, n_max + 1):
        g[n] = f[n // 2 - 1] + g[(n + 1) // 2]
        f[n] = n + g[n]
    return tuple(f), tuple(g)


def dichopile_costs(n_max):
    """``f_n`` for ``n <= n_max`` from the divide-and-conquer recurrence."""
    return list(_dichopile_fg(n_max)[0])


def dichopile_oracle(n_max):
    """Backward differences ``u_n = f_n - f_(n-1)`` (``u_0 = 0``)."""
    f = _dichopile_fg(n_max)[0]
    return [0] + [f[n] - f[n - 1] for n in range(1, n_max + 1)]


def rudin_shapiro(n):
    """``(-1)`` to the number of (overlapping) ``11`` blocks in binary ``n``."""
    return -1 if bin(n & (n >> 1)).count("1") % 2 else 1


def sum_of_digits(n, B=2):
    s = 0
    while n:
        n, r = divmod(n, B)
        s += r
    return s


def binary_powering_cost(n):
    """``c_0 = 0``, ``c_(2n) = c_n + 1`` (n >= 1), ``c_(2n+1) = c_n + 2``."""
    c = 0
    while n:
        n, r = divmod(n, 2)
        c += 1 + r
    return c


# -- representations ----------------------------------------------------------------

def dichopile():
    A0 = [[0, 0, 0, 0, 0, 0], [1, 0, 0, 1, 0, 0], [0, 0, 1, 0, 0, 0],
          [0, 1, 0, 0, 0, 0], [0, 0, 0, 0, 1, 0], [1, 1, 0, 0, 0, 1]]
    A1 = [[0, 0, 1, 0, 0, 0], [0, 1, 0, 0, 0, 0], [1, 0, 0, 1, 0, 0],
          [0, 0, 0, 0, 0, 0], [1, 0, 0, 0, 1, 1], [0, 1, 0, 0, 0, 0]]
    P = [[0, 2, 0, 6, -2, -6], [0, 4, 0, -6, 2, 0], [0, 4, 0, 6, 2, 0],
         [0, 2, 0, -6, -2, 6], [12, -16, 6, 15, 1, 0], [0, 10, -6, -15, -1, 6]]
    basis = [[ex.format_rational(ex.mpq(a, 12)) for a in row] for row in P]
    return LinearRepresentation([0, 0, 0, 0, 1, 0], [A0, A1], [1, 0, 0, 0, 0, 0], radix=2,
                                name="dichopile", meta={"jordan_basis": basis})


def rudin_shapiro_rep():
    return LinearRepresentation([1, 1], [[[1, 1], [0, 0]], [[0, 0], [1, -1]]], [1, 0],
                                radix=2, name="rudin_shapiro")


def rudin_shapiro4_rep():
    from .linrep import radix_power
    rep = radix_power(rudin_shapiro_rep(), 2)
    rep.name = "rudin_shapiro4"
    return rep


def biased_coin(p0=ex.mpq(1, 5)):
    p0 = ex.to_rational(p0)
    return LinearRepresentation([1], [[[p0]], [[1 - p0]]], [1], radix=2, name="biased_coin")


def sum_of_digits_rep(B=2):
    rep = close_under_multisection(lambda n: sum_of_digits(n, B), B, window=64, dim_cap=16)
    rep.name = "sum_of_digits"
    return rep


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return [[c, -s], [s, c]]


def triangular_tiling():
    return LinearRepresentation([1.0, 0.0], [rotation(-math.pi / 3), rotation(math.pi / 3)],
                                [1.0, 0.0], radix=2, name="triangular_tiling")


def tiling_point(K):
    """Mantissa word of ``x_(2K+2) = (0.11(01)^K)_2``."""
    return (1, 1) + (0, 1) * K


def zero_rep(B=2):
    rep = close_under_multisection(lambda n: 0, B, window=32, dim_cap=16)
    rep.name = "zero"
    return rep


_BUILDERS = {
    "dichopile": dichopile,
    "rudin_shapiro": rudin_shapiro_rep,
    "rudin_shapiro4": rudin_shapiro4_rep,
    "biased_coin": biased_coin,
    "sum_of_digits": sum_of_digits_rep,
    "triangular_tiling": triangular_tiling,
    "zero": zero_rep,
}


def build(name):
    """Construct a fixture from scratch (no file access)."""
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise InputError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}") from None


def load_fixture(name):
    """Load a shipped fixture JSON file."""
    if name not in FIXTURES:
        raise InputError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    text = resources.files("radixasym").joinpath("data", f"{name}.json").read_text()
    return from_dict(json.loads(text))


def fixture_path(name):
    return str(resources.files("radixasym").joinpath("data", f"{name}.json"))


def build_all(directory):
    """Write every fixture as JSON into ``directory``."""
    import os
    os.makedirs(directory, exist_ok=True)
    for name in FIXTURES:
        with open(os.path.join(directory, f"{name}.json"), "w") as fh:
            json.dump(to_dict(build(name)), fh, indent=1)
            fh.write("\n")

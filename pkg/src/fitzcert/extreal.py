"""Extended-real helpers.

Extended reals are plain floats; ``math.inf`` and ``-math.inf`` are the two
infinite points.  The only thing floats get wrong for our purposes is
``inf + (-inf)``, which silently yields ``nan``; the helpers here refuse it.
"""

import math

INF = math.inf


class ExtRealError(ArithmeticError):
    """Raised on an undefined extended-real operation such as (+inf) + (-inf)."""


def ext_add(a, b):
    if (a == INF and b == -INF) or (a == -INF and b == INF):
        raise ExtRealError("(+inf) + (-inf) is undefined")
    return a + b


def ext_sum(values):
    total = 0.0
    for v in values:
        total = ext_add(total, v)
    return total


def ext_mul(a, b):
    """Product with the convention 0 * (+-inf) = 0 used for indicator calculus."""
    if a == 0 or b == 0:
        return 0.0
    return a * b


def is_finite(x):
    return math.isfinite(x)


def to_json(x):
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return float(x)


def from_json(x):
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity", "+infinity"):
            return INF
        if s in ("-inf", "-infinity"):
            return -INF
        return float(s)
    return float(x)

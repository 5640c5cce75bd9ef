"""Independent reference computations for the test suite.

Exact rational arithmetic only (``math.comb`` / ``math.factorial`` /
``Fraction``); nothing here touches the package's log-space evaluation
paths, so agreement is a genuine two-route check.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import comb, factorial


def binom_tail(n: int, p, k: int) -> Fraction:
    """Pr(Bin(n, p) >= k), exact for rational (or float-rational) p."""
    p = Fraction(p)
    if k <= 0:
        return Fraction(1)
    if k > n:
        return Fraction(0)
    q = 1 - p
    return sum(Fraction(comb(n, j)) * p**j * q ** (n - j) for j in range(k, n + 1))


def reg_inc_beta_int(x, a: int, b: int) -> Fraction:
    """I_x(a, b) for integer shapes via the identity
    I_x(a, b) = Pr(Bin(a+b-1, x) >= a)."""
    return binom_tail(a + b - 1, x, a)


def beta_survival_int(t, a: int, b: int) -> Fraction:
    """Pr(Z >= t) for Z ~ Beta(a, b) with integer shapes."""
    return 1 - reg_inc_beta_int(t, a, b)


def beta_fn(x: int, y: int) -> Fraction:
    """B(x, y) for positive integers: (x-1)! (y-1)! / (x+y-1)!."""
    return Fraction(factorial(x - 1) * factorial(y - 1), factorial(x + y - 1))


def bb_pmf(r: int, m: int, a: int, b: int) -> Fraction:
    """Beta-Binomial(m; a, b) pmf at r, exact for integer shapes."""
    return Fraction(comb(m, r)) * beta_fn(r + a, m - r + b) / beta_fn(a, b)


def bb_survival(x_star: int, m: int, a: int, b: int) -> Fraction:
    """Pr(X >= x_star) for X ~ Beta-Binomial(m; a, b), integer shapes."""
    return sum((bb_pmf(r, m, a, b) for r in range(max(0, x_star), m + 1)), Fraction(0))


def log_beta_int(a: int, b: int) -> float:
    """ln B(a, b) through exact integer factorials.

    The ratio is rescaled by a power of two before the single ``log`` call,
    so no precision is lost to cancellation even when both factorials are
    astronomically large.
    """
    num = factorial(a - 1) * factorial(b - 1)
    den = factorial(a + b - 1)
    shift = num.bit_length() - den.bit_length()
    if shift >= 0:
        mantissa = Fraction(num, den << shift)
    else:
        mantissa = Fraction(num << -shift, den)
    return math.log(float(mantissa)) + shift * math.log(2.0)


def ols_slope_through_origin(pairs) -> float:
    """Least-squares slope of y on x with zero intercept."""
    sxy = math.fsum(x * y for x, y in pairs)
    sxx = math.fsum(x * x for x, _ in pairs)
    return sxy / sxx


def total_variation(counts, pmf) -> float:
    """TV distance between a histogram (counts) and a pmf on the same grid."""
    total = sum(counts)
    return 0.5 * math.fsum(abs(c / total - p) for c, p in zip(counts, pmf))

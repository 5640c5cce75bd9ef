"""Scalar special functions for Beta and Beta-Binomial coverage laws.

Everything is evaluated in log space (via ``math.lgamma``) and exponentiated
at the end, so shape parameters in the thousands remain accurate.  Accuracy
contract: absolute error <= 1e-12 for the continuous functions, <= 1e-10 for
discrete sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_CF_MAX_ITER = 1000
_CF_EPS = 1e-15
_CF_TINY = 1e-300


@dataclass(frozen=True)
class BetaParams:
    """Shape pair (a, b) of a Beta distribution, both strictly positive."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"Beta shape a must be positive and finite, got {self.a!r}")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ValueError(f"Beta shape b must be positive and finite, got {self.b!r}")


@dataclass(frozen=True)
class BetaBinomialParams:
    """Trial count m >= 1 plus Beta shapes (a, b) of the mixing law."""

    m: int
    a: float
    b: float

    def __post_init__(self) -> None:
        if not isinstance(self.m, int) or self.m < 1:
            raise ValueError(f"trial count m must be an integer >= 1, got {self.m!r}")
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"shape a must be positive and finite, got {self.a!r}")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ValueError(f"shape b must be positive and finite, got {self.b!r}")


def _stirling_tail(x: float) -> float:
    """ln Gamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2], series for x >= 30."""
    inv2 = 1.0 / (x * x)
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - inv2 / 1680.0) * inv2) * inv2) / x


def _lgamma_step(large: float, small: float) -> float:
    """ln Gamma(large + small) - ln Gamma(large), cancellation-free for
    large >= 30: the naive difference of two huge lgamma values would wipe
    out the small result."""
    return (
        (large - 0.5) * math.log1p(small / large)
        + small * math.log(large + small)
        - small
        + _stirling_tail(large + small)
        - _stirling_tail(large)
    )


def log_beta(a: float, b: float) -> float:
    """ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a+b).

    When the direct three-term form would cancel badly (one huge shape, a
    small result), the Gamma-ratio step is evaluated through a Stirling
    expansion instead.
    """
    if not (a > 0 and math.isfinite(a)) or not (b > 0 and math.isfinite(b)):
        raise ValueError(f"log_beta requires positive finite shapes, got a={a!r}, b={b!r}")
    lga, lgb, lgab = math.lgamma(a), math.lgamma(b), math.lgamma(a + b)
    direct = lga + lgb - lgab
    rounding = 2.3e-16 * (abs(lga) + abs(lgb) + abs(lgab))
    if rounding <= 1e-13 * abs(direct) or max(a, b) < 30.0:
        return direct
    small, large = (a, b) if a <= b else (b, a)
    return math.lgamma(small) - _lgamma_step(large, small)


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for i in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * i
        # even step
        aa = i * (b - i) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        # odd step
        aa = -(a + i) * (qab + i) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= _CF_EPS:
            return h
    raise RuntimeError(
        f"incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}"
    )


def _inc_beta_lower(x: float, a: float, b: float) -> float:
    """I_x(a, b) on the branch x < (a+1)/(a+b+2); small, no cancellation."""
    log_front = a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
    return math.exp(log_front) * _beta_cont_frac(a, b, x) / a


def reg_inc_beta(x: float, params: BetaParams) -> float:
    """Regularized incomplete beta I_x(a, b), i.e. the Beta(a, b) CDF at x.

    Uses the continued-fraction expansion with the symmetry switch at
    x > (a+1)/(a+b+2) so that the directly computed piece is always the
    small one.
    """
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"x must lie in [0, 1], got {x!r}")
    a, b = params.a, params.b
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    if x < (a + 1.0) / (a + b + 2.0):
        return _inc_beta_lower(x, a, b)
    return 1.0 - _inc_beta_lower(1.0 - x, b, a)


def beta_survival(t: float, params: BetaParams) -> float:
    """Pr(Z >= t) for Z ~ Beta(a, b).

    Mirrors the CDF branch switch: when I_t is close to 1 the survival is
    evaluated directly on the upper branch instead of as 1 - I_t.
    """
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"t must lie in [0, 1], got {t!r}")
    a, b = params.a, params.b
    if t == 0.0:
        return 1.0
    if t == 1.0:
        return 0.0
    if t < (a + 1.0) / (a + b + 2.0):
        return 1.0 - _inc_beta_lower(t, a, b)
    return _inc_beta_lower(1.0 - t, b, a)


def _betabinom_log_pmf(r: int, params: BetaBinomialParams) -> float:
    m, a, b = params.m, params.a, params.b
    log_choose = math.lgamma(m + 1) - math.lgamma(r + 1) - math.lgamma(m - r + 1)
    return log_choose + log_beta(r + a, m - r + b) - log_beta(a, b)


def betabinom_pmf(r: int, params: BetaBinomialParams) -> float:
    """Pr(X = r) for X ~ Beta-Binomial(m; a, b) = C(m,r) B(r+a, m-r+b) / B(a,b)."""
    if not isinstance(r, int) or not (0 <= r <= params.m):
        raise ValueError(f"r must be an integer in [0, {params.m}], got {r!r}")
    return math.exp(_betabinom_log_pmf(r, params))


def betabinom_pmf_vector(params: BetaBinomialParams) -> list[float]:
    """The full pmf over r = 0..m as a list."""
    return [math.exp(_betabinom_log_pmf(r, params)) for r in range(params.m + 1)]


def betabinom_survival(x_star: int, params: BetaBinomialParams) -> float:
    """Pr(X >= x_star) for X ~ Beta-Binomial(m; a, b).

    The smaller of the two tails is accumulated (with exact summation), so
    the result keeps full absolute accuracy whether it is near 0 or near 1.
    """
    m = params.m
    if not isinstance(x_star, int) or not (0 <= x_star <= m + 1):
        raise ValueError(f"x_star must be an integer in [0, {m + 1}], got {x_star!r}")
    n_upper = m - x_star + 1
    if n_upper <= x_star:
        return math.fsum(betabinom_pmf(r, params) for r in range(x_star, m + 1))
    return 1.0 - math.fsum(betabinom_pmf(r, params) for r in range(0, x_star))

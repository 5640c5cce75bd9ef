"""Attainability limits: what (alpha_target, delta) pairs a calibration set
of size n can certify, exactly and in closed form.

The most conservative usable rung is u = 1, where coverage follows
Beta(n, 1) (or Beta-Binomial(m; n, 1) over a finite window).  Solving the
tail constraint at that rung yields the minimal certifiable target level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .coverage import CoverageRegime, coverage_law, tail_prob
from .specfun import BetaBinomialParams, betabinom_pmf_vector


@dataclass(frozen=True)
class Rung:
    u: int
    alpha_prime: float
    attainable_delta: float


@dataclass(frozen=True)
class RungTable:
    """Per-rung attainable risk: attainable_delta(u) is the smallest delta
    for which the rung u/(n+1) satisfies the tail constraint."""

    n: int
    alpha_target: float
    regime: CoverageRegime
    rungs: tuple[Rung, ...]

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "alpha_target": self.alpha_target,
            "regime": self.regime.kind,
        }
        if self.regime.is_window:
            out["m"] = self.regime.m
        out["rungs"] = [
            {"u": r.u, "alpha_prime": r.alpha_prime, "attainable_delta": r.attainable_delta}
            for r in self.rungs
        ]
        return out


@dataclass(frozen=True)
class FeasibilityReport:
    """Feasibility thresholds for calibration size n and risk delta.

    ``alpha_star_inf`` is the exact infinite-window minimum 1 - delta^(1/n);
    ``implementable`` records whether that threshold lies on or above the
    first grid rung, i.e. delta <= (n/(n+1))^n.  The finite-window fields
    are present when a window size was supplied.
    """

    n: int
    delta: float
    alpha_star_inf: float
    delta_max_grid: float
    implementable: bool
    m: int | None = None
    alpha_star_m: float | None = None
    alpha_star_m_laplace: float | None = None

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "delta": self.delta,
            "alpha_star_inf": self.alpha_star_inf,
            "delta_max_grid": self.delta_max_grid,
            "implementable": self.implementable,
        }
        if self.m is not None:
            out["m"] = self.m
            out["alpha_star_m"] = self.alpha_star_m
            out["alpha_star_m_laplace"] = self.alpha_star_m_laplace
        return out


def _validate(n: int, delta: float) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n!r}")
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")


def alpha_star_infinite(n: int, delta: float) -> float:
    """Minimal certifiable target level for an infinite test stream:
    1 - delta^(1/n)."""
    _validate(n, delta)
    return 1.0 - delta ** (1.0 / n)


def grid_implementable(n: int, delta: float) -> tuple[bool, float]:
    """Whether the continuous threshold lies on or above the first grid
    rung: delta <= (n/(n+1))^n.  Returns (implementable, delta_max)."""
    _validate(n, delta)
    delta_max = (n / (n + 1.0)) ** n
    return delta <= delta_max, delta_max


def alpha_star_laplace(n: int, delta: float, m: int) -> float:
    """First-order finite-window approximation:
    1 - delta^(1/n) + sqrt(delta^(1/n) (1 - delta^(1/n)) / (2 pi m))."""
    _validate(n, delta)
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"m must be an integer >= 1, got {m!r}")
    root = delta ** (1.0 / n)
    return 1.0 - root + math.sqrt(root * (1.0 - root) / (2.0 * math.pi * m))


def alpha_star_exact_finite(n: int, delta: float, m: int) -> float:
    """Exact finite-window threshold on the coverage lattice.

    Finds the largest integer x* with Pr(X >= x*) >= 1 - delta for
    X ~ Beta-Binomial(m; n, 1) and reports alpha* = 1 - x*/m, the left edge
    of the passing step (the tail is a step function of alpha, so this is
    exact, quantized to the 1/m lattice).
    """
    _validate(n, delta)
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"m must be an integer >= 1, got {m!r}")
    pmf = betabinom_pmf_vector(BetaBinomialParams(m, float(n), 1.0))
    threshold = 1.0 - delta
    survival = 0.0
    # survival(x) accumulated from the top; the first x (largest) that
    # passes is the answer.  x = 0 always passes since survival(0) = 1.
    for x in range(m, 0, -1):
        survival += pmf[x]
        if survival >= threshold:
            return 1.0 - x / m
    return 1.0


def rung_table(n: int, alpha_target: float, regime: CoverageRegime) -> RungTable:
    """Attainable delta at every rung u = 1..n for the given target."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n!r}")
    if not (0.0 < alpha_target < 1.0):
        raise ValueError(f"alpha_target must lie in (0, 1), got {alpha_target!r}")
    rungs = []
    for u in range(1, n + 1):
        alpha_prime = u / (n + 1)
        tail = tail_prob(coverage_law(alpha_prime, n, regime), alpha_target)
        rungs.append(Rung(u=u, alpha_prime=alpha_prime, attainable_delta=1.0 - tail))
    return RungTable(n=n, alpha_target=alpha_target, regime=regime, rungs=tuple(rungs))


def feasibility_report(n: int, delta: float, m: int | None = None) -> FeasibilityReport:
    """Aggregate of the feasibility computations, windowed fields optional."""
    implementable, delta_max = grid_implementable(n, delta)
    report = FeasibilityReport(
        n=n,
        delta=delta,
        alpha_star_inf=alpha_star_infinite(n, delta),
        delta_max_grid=delta_max,
        implementable=implementable,
    )
    if m is None:
        return report
    return FeasibilityReport(
        n=n,
        delta=delta,
        alpha_star_inf=report.alpha_star_inf,
        delta_max_grid=delta_max,
        implementable=implementable,
        m=m,
        alpha_star_m=alpha_star_exact_finite(n, delta, m),
        alpha_star_m_laplace=alpha_star_laplace(n, delta, m),
    )

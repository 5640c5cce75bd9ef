"""Level adjusters: the small-sample beta correction and the DKWM baseline.

Both return an :class:`AdjustmentReport`.  Infeasible is a valid report,
not an error: it means no adjusted level below the target can satisfy the
requested tail guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .coverage import (
    CalibrationContext,
    CoverageRegime,
    coverage_law,
    order_index,
    snapped_ceil,
    tail_prob,
)
from .specfun import BetaParams, beta_survival

METHOD_SSBC = "ssbc"
METHOD_DKWM = "dkwm"


@dataclass(frozen=True)
class AdjustmentReport:
    """Outcome of a level adjustment.

    For feasible reports ``alpha_adj`` is the adjusted miscoverage level and
    ``achieved_tail`` the verified probability (over calibration draws) of
    meeting the coverage target; ``achieved_violation`` is its complement.
    The DKWM adjuster also records its concentration margin ``epsilon``, and
    the class-conditional variant lists grid rungs it had to skip because
    their miscoverage-rate law is degenerate.
    """

    feasible: bool
    method: str
    context: CalibrationContext
    regime: CoverageRegime
    alpha_adj: float | None = None
    u_star: int | None = None
    achieved_tail: float | None = None
    achieved_violation: float | None = None
    epsilon: float | None = None
    skipped_rungs: tuple[int, ...] = field(default=())
    note: str | None = None

    def to_dict(self) -> dict:
        inputs = {
            "n": self.context.n,
            "alpha_target": self.context.alpha_target,
            "delta": self.context.delta,
            "regime": self.regime.kind,
        }
        if self.regime.is_window:
            inputs["m"] = self.regime.m
        out = {
            "feasible": self.feasible,
            "alpha_adj": self.alpha_adj,
            "u_star": self.u_star,
            "achieved_tail": self.achieved_tail,
            "achieved_violation": self.achieved_violation,
            "method": self.method,
            "inputs": inputs,
        }
        if self.epsilon is not None:
            out["epsilon"] = self.epsilon
        if self.skipped_rungs:
            out["skipped_rungs"] = list(self.skipped_rungs)
        if self.note is not None:
            out["note"] = self.note
        return out


def highest_grid_index_below(alpha_target: float, n: int) -> int:
    """Largest u with u/(n+1) strictly below alpha_target (0 if none)."""
    u_max = snapped_ceil(alpha_target * (n + 1), scale=n + 1) - 1
    return max(0, min(n, u_max))


def ssbc_adjust(ctx: CalibrationContext, regime: CoverageRegime) -> AdjustmentReport:
    """Largest grid level u/(n+1) below the target whose coverage-law tail
    meets the 1-delta guarantee.

    The tail probability is nonincreasing in u, so the scan walks down from
    the largest admissible rung and stops at the first success.
    """
    n = ctx.n
    threshold = 1.0 - ctx.delta
    for u in range(highest_grid_index_below(ctx.alpha_target, n), 0, -1):
        alpha_prime = u / (n + 1)
        tail = tail_prob(coverage_law(alpha_prime, n, regime), ctx.alpha_target)
        if tail >= threshold:
            return AdjustmentReport(
                feasible=True,
                method=METHOD_SSBC,
                context=ctx,
                regime=regime,
                alpha_adj=alpha_prime,
                u_star=u,
                achieved_tail=tail,
                achieved_violation=1.0 - tail,
            )
    return AdjustmentReport(
        feasible=False,
        method=METHOD_SSBC,
        context=ctx,
        regime=regime,
        note="no grid level below alpha_target satisfies the tail constraint",
    )


def _ssbc_full_scan(ctx: CalibrationContext, regime: CoverageRegime) -> AdjustmentReport:
    """Debug oracle: exhaustive scan over every admissible rung.  Must agree
    with :func:`ssbc_adjust` exactly; kept separate so tests can prove the
    early-exit search loses nothing."""
    n = ctx.n
    best: tuple[int, float] | None = None
    for u in range(1, highest_grid_index_below(ctx.alpha_target, n) + 1):
        tail = tail_prob(coverage_law(u / (n + 1), n, regime), ctx.alpha_target)
        if tail >= 1.0 - ctx.delta:
            best = (u, tail)
    if best is None:
        return AdjustmentReport(
            feasible=False,
            method=METHOD_SSBC,
            context=ctx,
            regime=regime,
            note="no grid level below alpha_target satisfies the tail constraint",
        )
    u, tail = best
    return AdjustmentReport(
        feasible=True,
        method=METHOD_SSBC,
        context=ctx,
        regime=regime,
        alpha_adj=u / (n + 1),
        u_star=u,
        achieved_tail=tail,
        achieved_violation=1.0 - tail,
    )


def dkwm_eps(n: int, delta: float) -> float:
    """One-sided DKW-Massart margin sqrt(ln(1/delta) / (2n))."""
    return math.sqrt(math.log(1.0 / delta) / (2.0 * n))


def dkwm_adjust(ctx: CalibrationContext) -> AdjustmentReport:
    """Concentration-bound baseline: alpha_adj = alpha_target - eps.

    The adjusted level is left continuous (not snapped to the grid); the
    achieved tail is evaluated with the exact Beta law at the order index
    the adjusted level induces, so the baseline's conservatism is measured
    with the same machinery as the beta correction.
    """
    n = ctx.n
    regime = CoverageRegime.infinite()
    eps = dkwm_eps(n, ctx.delta)
    alpha_adj = ctx.alpha_target - eps
    if alpha_adj <= 0.0:
        return AdjustmentReport(
            feasible=False,
            method=METHOD_DKWM,
            context=ctx,
            regime=regime,
            epsilon=eps,
            note="alpha_target - eps is not positive",
        )
    k = order_index(alpha_adj, n)
    if k == n + 1:
        # everything-set: coverage is identically 1
        tail = 1.0
    else:
        tail = beta_survival(1.0 - ctx.alpha_target, BetaParams(float(k), float(n + 1 - k)))
    return AdjustmentReport(
        feasible=True,
        method=METHOD_DKWM,
        context=ctx,
        regime=regime,
        alpha_adj=alpha_adj,
        u_star=n + 1 - k,
        achieved_tail=tail,
        achieved_violation=1.0 - tail,
        epsilon=eps,
    )

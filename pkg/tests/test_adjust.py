import math
import random

import pytest

from ssbc.adjust import (
    _ssbc_full_scan,
    dkwm_adjust,
    dkwm_eps,
    highest_grid_index_below,
    ssbc_adjust,
)
from ssbc.coverage import CalibrationContext, CoverageRegime, coverage_law, tail_prob

from oracles import beta_survival_int, bb_survival


def _ssbc_oracle_infinite(n, alpha_target, delta):
    """Exhaustive exact-rational grid scan, fully independent of the package."""
    from fractions import Fraction

    best = None
    for u in range(1, n + 1):
        if Fraction(u, n + 1) >= Fraction(alpha_target):
            continue
        tail = beta_survival_int(Fraction(1) - Fraction(alpha_target), n + 1 - u, u)
        if tail >= 1 - Fraction(delta):
            best = (u, tail)
    return best


class TestHighestGridIndexBelow:
    def test_strictness_at_grid_point(self):
        # 13/26 equals 0.5 exactly: excluded by the strict inequality
        assert highest_grid_index_below(0.5, 25) == 12
        assert highest_grid_index_below(0.5, 50) == 25

    def test_off_grid(self):
        assert highest_grid_index_below(0.1, 50) == 5  # 5/51 < 0.1 < 6/51

    def test_none_below(self):
        assert highest_grid_index_below(0.01, 5) == 0


class TestSsbcAdjust:
    def test_table_case(self):
        report = ssbc_adjust(CalibrationContext(25, 0.5, 0.1), CoverageRegime.infinite())
        assert report.feasible
        assert report.u_star == 9
        assert report.alpha_adj == pytest.approx(9 / 26, abs=1e-15)
        assert report.achieved_violation == pytest.approx(0.0538760721683502, abs=1e-12)
        assert report.method == "ssbc"

    def test_windowed_case(self):
        report = ssbc_adjust(CalibrationContext(50, 0.1, 0.1), CoverageRegime.window(100))
        assert report.feasible
        assert report.u_star == 2
        assert report.achieved_violation == pytest.approx(0.0471632080144703, abs=1e-10)

    def test_infinite_case_small_target(self):
        report = ssbc_adjust(CalibrationContext(50, 0.1, 0.1), CoverageRegime.infinite())
        assert report.u_star == 2
        assert report.alpha_adj == pytest.approx(2 / 51, abs=1e-15)
        assert report.achieved_violation == pytest.approx(0.0337858596924319, abs=1e-12)

    def test_infeasible(self):
        report = ssbc_adjust(CalibrationContext(5, 0.01, 0.05), CoverageRegime.infinite())
        assert not report.feasible
        assert report.alpha_adj is None
        assert report.u_star is None
        assert report.note

    def test_matches_exact_oracle_scan(self):
        rng = random.Random(91)
        for _ in range(40):
            n = rng.randint(1, 120)
            alpha_target = rng.uniform(0.02, 0.98)
            delta = rng.uniform(0.01, 0.9)
            report = ssbc_adjust(
                CalibrationContext(n, alpha_target, delta), CoverageRegime.infinite()
            )
            oracle = _ssbc_oracle_infinite(n, alpha_target, delta)
            if oracle is None:
                assert not report.feasible
            else:
                assert report.feasible
                assert report.u_star == oracle[0]

    def test_full_scan_agrees_with_early_exit(self):
        rng = random.Random(17)
        for _ in range(60):
            n = rng.randint(1, 150)
            ctx = CalibrationContext(n, rng.uniform(0.02, 0.98), rng.uniform(0.01, 0.9))
            regime = (
                CoverageRegime.window(rng.randint(1, 60))
                if rng.random() < 0.4
                else CoverageRegime.infinite()
            )
            fast = ssbc_adjust(ctx, regime)
            slow = _ssbc_full_scan(ctx, regime)
            assert fast.feasible == slow.feasible
            assert fast.u_star == slow.u_star
            assert fast.achieved_tail == slow.achieved_tail

    def test_reverification_and_maximality(self):
        rng = random.Random(5)
        for _ in range(80):
            n = rng.randint(2, 150)
            ctx = CalibrationContext(n, rng.uniform(0.05, 0.95), rng.uniform(0.01, 0.9))
            regime = CoverageRegime.infinite()
            report = ssbc_adjust(ctx, regime)
            if not report.feasible:
                continue
            assert report.alpha_adj < ctx.alpha_target
            assert report.alpha_adj == report.u_star / (n + 1)
            tail = tail_prob(coverage_law(report.alpha_adj, n, regime), ctx.alpha_target)
            assert tail >= 1 - ctx.delta
            next_u = report.u_star + 1
            if next_u <= highest_grid_index_below(ctx.alpha_target, n):
                worse = tail_prob(coverage_law(next_u / (n + 1), n, regime), ctx.alpha_target)
                assert worse < 1 - ctx.delta

    def test_monotone_in_delta(self):
        n, alpha_target = 60, 0.3
        regime = CoverageRegime.infinite()
        previous = 0
        for delta in (0.01, 0.05, 0.1, 0.2, 0.4, 0.8):
            report = ssbc_adjust(CalibrationContext(n, alpha_target, delta), regime)
            u = report.u_star if report.feasible else 0
            assert u >= previous
            previous = u

    def test_infeasible_iff_first_rung_fails(self):
        rng = random.Random(23)
        for _ in range(60):
            n = rng.randint(1, 80)
            alpha_target = rng.uniform(0.01, 0.99)
            delta = rng.uniform(0.01, 0.9)
            report = ssbc_adjust(
                CalibrationContext(n, alpha_target, delta), CoverageRegime.infinite()
            )
            first_below = 1 / (n + 1) < alpha_target
            first_passes = first_below and (1 - alpha_target) ** n <= delta + 1e-13
            assert report.feasible == (first_below and first_passes)


class TestDkwmAdjust:
    def test_margin_value(self):
        assert dkwm_eps(25, 0.1) == pytest.approx(0.214596602628935, rel=1e-12)

    def test_feasible_case(self):
        report = dkwm_adjust(CalibrationContext(25, 0.5, 0.1))
        assert report.feasible
        assert report.epsilon == pytest.approx(0.214596602628935, rel=1e-12)
        assert report.alpha_adj == pytest.approx(0.285403397371065, rel=1e-12)
        # induced order index k = 19, grid rung u = 7
        assert report.u_star == 7
        assert report.achieved_violation == pytest.approx(0.00731664896011353, abs=1e-12)

    def test_infeasible_case(self):
        report = dkwm_adjust(CalibrationContext(50, 0.05, 0.1))
        assert not report.feasible
        assert report.epsilon == pytest.approx(0.151742712939, rel=1e-9)

    def test_alpha_adj_converges_to_target(self):
        previous = -1.0
        for n in (100, 1000, 10_000, 100_000, 1_000_000):
            report = dkwm_adjust(CalibrationContext(n, 0.2, 0.1))
            assert report.alpha_adj > previous
            previous = report.alpha_adj
        assert 0.2 - previous < 0.002

    def test_everything_set_rung(self):
        # alpha_adj lands below the first rung: order index n+1, coverage 1
        report = dkwm_adjust(CalibrationContext(3, 0.4, 0.45))
        assert report.feasible
        assert 0 < report.alpha_adj < 1 / 4
        assert report.u_star == 0
        assert report.achieved_tail == 1.0


class TestDominance:
    def test_ssbc_never_more_conservative(self):
        rng = random.Random(7)
        checked = 0
        for _ in range(300):
            n = rng.randint(1, 200)
            ctx = CalibrationContext(n, rng.uniform(0.02, 0.98), rng.uniform(0.01, 0.9))
            ssbc = ssbc_adjust(ctx, CoverageRegime.infinite())
            dkwm = dkwm_adjust(ctx)
            if not (ssbc.feasible and dkwm.feasible):
                continue
            checked += 1
            assert ssbc.u_star >= dkwm.u_star
            assert ssbc.alpha_adj >= dkwm.u_star / (n + 1) - 1e-15
            assert ssbc.achieved_violation >= dkwm.achieved_violation - 1e-12
        assert checked > 50

import itertools
import math
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oneshot.metrics import (
    BoundCheckReport, check_lhs_corner_bound, check_middle_point_theorem, check_projected_jittered,
    default_checks, lhs_corner_bound, min_distance, projected_jittered_bound, star_discrepancy,
    stochastic_dispersion, unit_ball_volume,
)
from oneshot.sequences import Base, gen_base


def brute_star_discrepancy(x):
    """Every anchored box with corners on the sample grid, open and closed."""
    n, d = x.shape
    grids = [sorted(set(x[:, j].tolist()) | {1.0}) for j in range(d)]
    worst = 0.0
    for corner in itertools.product(*grids):
        c = np.array(corner)
        vol = float(np.prod(c))
        open_frac = np.all(x < c, axis=1).mean()
        closed_frac = np.all(x <= c, axis=1).mean()
        worst = max(worst, vol - open_frac, closed_frac - vol)
    return worst


def lhs_miss_probability(n, m):
    """Exact P(LHS(n) in d=2 has no point in [0, m/n]^2).

    Column 1 puts points 0..m-1 (strata) in the box range; column 2 is a
    uniform permutation, so the count of those landing in the first m
    strata is hypergeometric. The boundary stratum m is reached only at
    the single value m/n, which has probability zero.
    """
    return comb(n - m, m) / comb(n, m)


# ---- min distance


def test_min_distance_examples():
    x = np.random.default_rng(0).random((5, 3))
    assert min_distance(x[2], x) == 0.0
    assert min_distance([0.4], [[0.0], [1.0]]) == pytest.approx(0.4)
    assert min_distance([3.0, 4.0], [[0.0, 0.0]]) == 5.0


def test_min_distance_rejects_empty_and_mismatch():
    with pytest.raises(ValueError):
        min_distance([0.1], np.empty((0, 1)))
    with pytest.raises(ValueError):
        min_distance([0.1, 0.2], [[0.0]])


@given(st.integers(0, 2**32))
def test_min_distance_permutation_invariant_and_lipschitz(seed):
    rng = np.random.default_rng(seed)
    x = rng.random((20, 4))
    p, q = rng.random(4), rng.random(4)
    assert min_distance(p, x) == min_distance(p, x[rng.permutation(20)])
    assert abs(min_distance(p, x) - min_distance(q, x)) <= np.linalg.norm(p - q) + 1e-12


# ---- star discrepancy


def test_discrepancy_single_midpoint():
    est = star_discrepancy(np.array([[0.5]]))
    assert est.method == "exact" and est.value == pytest.approx(0.5)


@pytest.mark.parametrize("n", [1, 2, 5, 8, 33])
def test_discrepancy_equispaced_line(n):
    x = ((np.arange(n) + 0.5) / n)[:, None]
    v = star_discrepancy(x).value
    assert v == pytest.approx(1 / (2 * n))
    assert v <= 1 / n


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(1, 3), st.integers(0, 2**32))
def test_exact_discrepancy_matches_brute_force(n, d, seed):
    x = np.random.default_rng(seed).random((n, d))
    assert star_discrepancy(x, "exact").value == pytest.approx(brute_star_discrepancy(x), abs=1e-12)


def test_exact_discrepancy_with_ties_matches_brute_force():
    x = gen_base(Base.GRID, 16, 2)
    assert star_discrepancy(x, "exact").value == pytest.approx(brute_star_discrepancy(x), abs=1e-12)


def test_exact_limits_enforced():
    with pytest.raises(ValueError):
        star_discrepancy(np.random.default_rng(0).random((10, 4)), "exact")
    with pytest.raises(ValueError):
        star_discrepancy(np.random.default_rng(0).random((257, 2)), "exact")
    with pytest.raises(ValueError):
        star_discrepancy(np.random.default_rng(0).random((10, 2)), "mc", boxes=10)


@pytest.mark.parametrize("seed", range(3))
def test_monte_carlo_is_lower_bound(seed):
    x = np.random.default_rng(seed).random((100, 3))
    mc = star_discrepancy(x, "mc", seed=seed)
    assert mc.method == "mc" and mc.boxes >= 100_000
    assert mc.value <= star_discrepancy(x, "exact").value + 1e-12


# ---- stochastic dispersion


def test_dispersion_argument_checks():
    with pytest.raises(ValueError):
        stochastic_dispersion("Random", 10, 2, replicas=10)
    with pytest.raises(ValueError):
        stochastic_dispersion("Random", 10, 2, probes=50)


def test_dispersion_random_rate():
    # O(n^(-1/2)) in two dimensions: quadrupling n roughly halves the estimate
    est = [stochastic_dispersion("Random", n, 2, replicas=60, probes=256, seed=1)[0] for n in (100, 400, 1600)]
    assert est[0] > est[1] > est[2]
    for a, b in zip(est, est[1:]):
        assert 1.6 < a / b < 2.5


def test_dispersion_decreases_with_n():
    est = [stochastic_dispersion("ScrHalton", n, 3, replicas=30, probes=128, seed=2)[0] for n in (16, 32, 64, 128)]
    assert all(a > b for a, b in zip(est, est[1:]))


# ---- bound checks


def test_unit_ball_volumes():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_lhs_corner_d1_is_zero():
    rep = check_lhs_corner_bound(16, 2, 1, replicas=500)
    assert rep.estimate == 0.0 and rep.passed


def test_lhs_corner_full_box():
    rep = check_lhs_corner_bound(16, 16, 3, replicas=200)
    assert rep.estimate == 0.0 and rep.passed


def test_lhs_corner_rejects_non_powers():
    with pytest.raises(ValueError):
        check_lhs_corner_bound(60, 4, 3, replicas=10)
    with pytest.raises(ValueError):
        check_lhs_corner_bound(64, 3, 3, replicas=10)


@pytest.mark.parametrize("n,m", [(16, 2), (32, 4), (64, 4)])
def test_lhs_corner_against_exact_hypergeometric(n, m):
    rep = check_lhs_corner_bound(n, m, 2, replicas=4000, seed=7)
    p = lhs_miss_probability(n, m)
    assert abs(rep.estimate - p) <= 4 * math.sqrt(p * (1 - p) / 4000) + 1e-9
    assert p <= lhs_corner_bound(n, m, 2) + 1e-12


def test_lhs_corner_stderr_shrinks():
    a = check_lhs_corner_bound(32, 4, 3, replicas=400, seed=1)
    b = check_lhs_corner_bound(32, 4, 3, replicas=3600, seed=1)
    assert b.stderr < a.stderr
    assert b.stderr == pytest.approx(math.sqrt(b.estimate * (1 - b.estimate) / 3600))


def test_projected_jittered_bound_value():
    v = projected_jittered_bound(81, 2, 0.1)
    assert v == pytest.approx(2 ** 1.5 * math.sqrt(math.log(10)) / math.sqrt(math.pi * 81))


def test_projected_jittered_small():
    rep = check_projected_jittered(81, 4, 2, 0.1, replicas=1000, seed=3)
    assert rep.passed and rep.estimate < rep.bound
    full = check_projected_jittered(16, 2, 2, 0.2, replicas=500, seed=3)
    assert full.passed


def test_projected_jittered_rejects():
    with pytest.raises(ValueError):
        check_projected_jittered(80, 4, 2, 0.1, replicas=10)
    with pytest.raises(ValueError):
        check_projected_jittered(81, 4, 5, 0.1, replicas=10)
    with pytest.raises(ValueError):
        check_projected_jittered(81, 4, 2, 1.5, replicas=10)


def test_middle_point_out_of_regime():
    rep = check_middle_point_theorem(1, 2, replicas=100)
    assert rep.passed is None and rep.extras["in_regime"] is False


def test_middle_point_chi_square_median():
    rep = check_middle_point_theorem(30, 100, replicas=1000, seed=0)
    # chi-square(100) median is about 99.33; sampling sd of the median here is about 0.55
    assert abs(rep.extras["median_sq_norm"] - 99.33) < 2.5
    assert rep.extras["strictly_greater"] and rep.passed


def test_report_line_round_trip():
    rep = check_lhs_corner_bound(16, 2, 2, replicas=100, seed=5)
    line = rep.to_line()
    assert "\n" not in line
    assert BoundCheckReport.from_line(line) == rep
    assert rep.passed == (rep.estimate <= rep.bound + 3 * rep.stderr)


def test_reports_reproducible():
    a = check_projected_jittered(16, 2, 1, 0.1, replicas=300, seed=9)
    b = check_projected_jittered(16, 2, 1, 0.1, replicas=300, seed=9)
    assert a.to_line() == b.to_line()


def test_default_suite_has_one_report_per_bound():
    reps = default_checks(replicas=200, seed=1)
    assert [r.name for r in reps] == ["lhs_corner", "projected_jittered", "middle_point"]

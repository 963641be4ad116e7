import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import integrate, special, stats

from kinex.analytics import (
    closed_form_variance,
    empirical_moments,
    estimate_distribution,
    gini,
    gini_pairwise,
    gini_rows,
    inequality_report,
    ks_critical,
    ks_statistic,
    moving_average,
)

LAMS = np.round(np.arange(0, 10) / 10, 1)
ALPHAS = [0.0, 0.25, 0.5, 0.75, 1.0]


def printed_variance(lam, alpha):
    """The variance expression exactly as it is usually printed, with its z term."""
    z = (1 - lam) ** 2 * (1 / 3 + lam / (1 - lam) ** 2 + (alpha**2 + (1 - alpha) ** 2) / 3 + alpha * (1 - alpha) / 2)
    return 2 * (1 - lam) * (alpha * (1 - lam) / 3 + lam / 2 + (1 - lam) * (1 - alpha) / 4) / (1 - z) - 1


def quadrature_variance(lam, alpha):
    """Second-moment fixed point with every expectation done by 2-D quadrature."""

    def expect(f):
        return integrate.dblquad(lambda w2, w1: f(w1, w2), 0, 1, 0, 1, epsabs=1e-13, epsrel=1e-13)[0]

    own = lambda w1, w2: lam + w1 * (1 - lam)
    cross = lambda w1, w2: (alpha * w1 + (1 - alpha) * w2) * (1 - lam)
    z = expect(lambda a, b: own(a, b) ** 2) + expect(lambda a, b: cross(a, b) ** 2)
    c = expect(lambda a, b: own(a, b) * cross(a, b))
    return 2 * c / (1 - z) - 1


@pytest.mark.parametrize(
    "lam, alpha, expected",
    [(0.0, 1.0, 1.0), (0.0, 0.0, 0.5), (0.5, 1.0, 0.25)],
)
def test_closed_form_anchors(lam, alpha, expected):
    assert closed_form_variance(lam, alpha) == pytest.approx(expected, abs=1e-15)


def test_closed_form_exact_at_integer_anchors():
    assert closed_form_variance(0.0, 1.0) == 1.0
    assert closed_form_variance(0.0, 0.0) == 0.5


@pytest.mark.parametrize("lam", LAMS)
@pytest.mark.parametrize("alpha", ALPHAS)
def test_closed_form_matches_printed_expression(lam, alpha):
    assert closed_form_variance(lam, alpha) == pytest.approx(printed_variance(lam, alpha), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("lam, alpha", [(0.0, 0.3), (0.35, 0.8), (0.7, 0.1), (0.9, 0.5)])
def test_closed_form_matches_quadrature(lam, alpha):
    assert closed_form_variance(lam, alpha) == pytest.approx(quadrature_variance(lam, alpha), rel=1e-9)


@pytest.mark.parametrize("lam", LAMS[1:])
def test_closed_form_cc_line(lam):
    assert abs(closed_form_variance(lam, 1.0) - (1 - lam) / (1 + 2 * lam)) < 1e-12


def test_closed_form_vectorized():
    lam, alpha = np.meshgrid(LAMS, ALPHAS)
    grid = closed_form_variance(lam, alpha)
    assert grid.shape == lam.shape
    assert grid[0, 0] == closed_form_variance(0.0, 0.0)
    assert np.all(grid >= 0)


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.7, 1.0])
def test_delta_function_limit(alpha):
    assert closed_form_variance(1 - 1e-6, alpha) < 1e-4
    assert closed_form_variance(1.0, alpha, delta_limit=True) == 0.0
    with pytest.raises(ValueError):
        closed_form_variance(1.0, alpha)


@pytest.mark.parametrize("lam, alpha", [(-0.1, 0.5), (0.5, 1.5), (1.2, 0.5)])
def test_closed_form_domain(lam, alpha):
    with pytest.raises(ValueError):
        closed_form_variance(lam, alpha)


def test_alpha_effect_without_savings():
    # With lam = 0 the variance is (1 + a^2) / (2 + a - a^2): it dips to a
    # minimum at a = sqrt(10) - 3 and then rises to 1. The curves A (a=0),
    # B (a=0.7), C (a=1) are still ordered by increasing variance.
    a_star = math.sqrt(10) - 3
    assert closed_form_variance(0.0, 0.0) < closed_form_variance(0.0, 0.7) < closed_form_variance(0.0, 1.0)
    rising = np.linspace(a_star, 1.0, 200)
    assert np.all(np.diff(closed_form_variance(0.0, rising)) > 0)
    falling = np.linspace(0.0, a_star, 50)
    assert np.all(np.diff(closed_form_variance(0.0, falling)) < 0)


def test_empirical_moments_examples():
    assert empirical_moments([1, 1, 1, 1]) == (1.0, 0.0)
    assert empirical_moments([0, 2]) == (1.0, 2.0)
    with pytest.raises(ValueError):
        empirical_moments([])


def test_empirical_moments_exponential():
    mean, var = empirical_moments(np.random.default_rng(0).exponential(1.0, 100_000))
    assert abs(mean - 1) < 0.02
    assert abs(var - 1) < 0.05


def test_gini_examples():
    assert gini(np.full(10, 3.0)) == 0.0
    assert gini([2.0, 0.0]) == 1.0
    assert gini([5e-324, 0.0]) == 1.0  # mean of the raw values underflows
    with pytest.raises(ValueError):
        gini([0.0, 0.0])
    with pytest.raises(ValueError):
        gini([1.0])


def test_gini_exponential_sample():
    assert abs(gini(np.random.default_rng(1).exponential(1.0, 10_000)) - 0.5) < 0.02


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, st.integers(2, 200), elements=st.floats(0, 100)))
def test_gini_sorted_equals_double_sum(x):
    if x.sum() <= 0:
        return
    assert abs(gini(x) - gini_pairwise(x)) < 1e-12
    assert 0.0 <= gini(x) <= 1.0


def test_gini_rows_matches_gini():
    s = np.random.default_rng(2).gamma(2.0, 0.5, size=(20, 50))
    assert np.allclose(gini_rows(s), [gini(r) for r in s], atol=1e-14)


def test_histogram_density_normalized():
    h = estimate_distribution(np.random.default_rng(3).exponential(size=(40, 100)), bins=50)
    assert abs(h.integral() - 1.0) < 1e-6
    assert h.edges[0] == 0.0 and h.edges.size == 51
    assert np.all(h.densities >= 0)
    with pytest.raises(ValueError):
        estimate_distribution([], bins=10)
    with pytest.raises(ValueError):
        estimate_distribution([1.0, 2.0], bins=1)


def test_histogram_exponential_slope_and_gamma_mode():
    rng = np.random.default_rng(4)
    assert abs(estimate_distribution(rng.exponential(size=200_000)).log_slope(0.5, 4.0) + 1) < 0.1
    assert abs(estimate_distribution(rng.gamma(2.0, 0.5, size=200_000)).mode() - 0.5) < 0.1


def test_inequality_report_consistency():
    s = np.random.default_rng(5).exponential(size=(30, 100))
    rep = inequality_report(s)
    assert rep.cv == pytest.approx(math.sqrt(rep.variance) / rep.mean)
    assert rep.variance == pytest.approx(np.mean([empirical_moments(r)[1] for r in s]))
    assert rep.n_snapshots == 30
    assert 0 <= rep.gini <= 1


def test_moving_average():
    assert np.allclose(moving_average([1, 2, 3, 4], 3), [1.5, 2, 3, 3.5])
    assert np.allclose(moving_average([5.0, 1.0], 1), [5.0, 1.0])


def test_ks_statistic_against_scipy():
    rng = np.random.default_rng(6)
    a, b = rng.exponential(size=700), rng.gamma(1.1, size=900)
    assert ks_statistic(a, b) == pytest.approx(stats.ks_2samp(a, b).statistic, abs=1e-15)
    # leading term of the Kolmogorov tail series; exact inverse differs below 1e-7
    assert ks_critical(1000, 1000, 0.01) == pytest.approx(special.kolmogi(0.01) * math.sqrt(2 / 1000), rel=1e-7)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

import mcfa

BASE = mcfa.HittingKernel(distance=6.0, radius=1.0, diffusion=79.4)


def test_kernel_rejects_bad_parameters():
    with pytest.raises(ValueError):
        mcfa.HittingKernel(distance=0.9, radius=1.0, diffusion=79.4)
    with pytest.raises(ValueError):
        mcfa.HittingKernel(distance=6.0, radius=-1.0, diffusion=79.4)
    with pytest.raises(ValueError):
        mcfa.HittingKernel(distance=6.0, radius=1.0, diffusion=0.0)


def test_hitting_rate_zero_before_release():
    t = np.array([-1.0, 0.0, 1.0])
    rate = mcfa.hitting_rate(BASE, t)
    assert rate[0] == 0.0 and rate[1] == 0.0 and rate[2] > 0.0


def test_hitting_rate_peak_location():
    # the density peaks at (d-R)^2 / (6 D)
    t_star = 25.0 / (6.0 * 79.4)
    t = np.linspace(0.5 * t_star, 2.0 * t_star, 20001)
    rate = mcfa.hitting_rate(BASE, t)
    assert t[np.argmax(rate)] == pytest.approx(t_star, rel=1e-3)


def test_hitting_rate_scalar_and_array():
    scalar = mcfa.hitting_rate(BASE, 0.5)
    array = mcfa.hitting_rate(BASE, np.array([0.5]))
    assert isinstance(scalar, float)
    assert array[0] == scalar


@pytest.mark.parametrize("d", [2.0, 6.0, 20.0])
@pytest.mark.parametrize("radius", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("diffusion", [10.0, 79.4, 500.0])
def test_cumulative_is_integral_of_rate(d, radius, diffusion):
    if d <= radius:
        pytest.skip("release point inside the sphere")
    kernel = mcfa.HittingKernel(d, radius, diffusion)
    t_end = 2.0 * (d - radius) ** 2 / diffusion + 0.5
    t_peak = (d - radius) ** 2 / (6.0 * diffusion)
    integral, err = quad(lambda u: mcfa.hitting_rate(kernel, u), 0.0, t_end,
                         points=[t_peak, 10.0 * t_peak], limit=200)
    expected = mcfa.cumulative_siso(kernel, 1.0, t_end)
    assert integral == pytest.approx(expected, rel=1e-6)


def test_cumulative_long_time_limit():
    value = mcfa.cumulative_siso(BASE, 1e4, 1e12)
    assert value == pytest.approx(1e4 / 6.0, rel=1e-5)


def test_cumulative_zero_at_zero():
    assert mcfa.cumulative_siso(BASE, 1e4, 0.0) == 0.0


def test_kernel_laplace_matches_quadrature():
    for s in (0.01, 0.1, 1.0, 10.0):
        head, _ = quad(lambda u: math.exp(-s * u) * mcfa.hitting_rate(BASE, u),
                       0.0, 1.0, points=[25.0 / (6.0 * 79.4)], limit=400)
        tail, _ = quad(lambda u: math.exp(-s * u) * mcfa.hitting_rate(BASE, u),
                       1.0, np.inf, limit=400)
        assert mcfa.kernel_laplace(BASE, s) == pytest.approx(head + tail, rel=1e-6)


def test_kernel_laplace_zero_frequency():
    assert mcfa.kernel_laplace(BASE, 0.0) == pytest.approx(1.0 / 6.0, rel=1e-15)


def test_siso_asymptote_value():
    assert mcfa.siso_asymptote(BASE, 1e4) == pytest.approx(1e4 / 6.0)


def sito_baseline(d=4.0):
    top = mcfa.build_sito_scenario(6.0, d, 0.0)
    rx_rx, tx_rx = mcfa.pair_distances(top)
    return mcfa.SitoGeometry(tx_rx[0, 0], tx_rx[0, 1], rx_rx[0, 1],
                             rx_rx[1, 0], 1.0)


def test_sito_geometry_rejects_divergent_series():
    with pytest.raises(ValueError, match="divergence"):
        mcfa.SitoGeometry(d1=3.0, d2=3.0, d12=0.9, d21=0.9, radius=1.0)


def test_sito_geometry_swap_round_trip():
    g = sito_baseline()
    assert g.swapped().swapped() == g
    assert g.swapped().ratio == g.ratio


def test_sito_series_below_uncoupled():
    g = sito_baseline()
    t = np.array([1.0, 10.0, 100.0, 300.0])
    n1 = mcfa.sito_series(g, 1e4, 79.4, t)
    uncoupled = mcfa.cumulative_siso(BASE, 1e4, t)
    assert np.all(n1 > 0.0)
    assert np.all(n1 < uncoupled)


def test_sito_series_early_dip_at_strong_coupling():
    # with receiver 2 directly in the line of sight the interference term
    # transiently exceeds the direct term; the formula value goes negative
    # and is reported as computed
    g = sito_baseline()
    assert mcfa.sito_series(g, 1e4, 79.4, 0.1) < 0.0


def test_sito_series_term_count_converged():
    g = sito_baseline()
    scale = 1e4 * (1.0 / g.d1 + 1.0 / (g.d12 * g.d2))
    loose = mcfa.sito_series(g, 1e4, 79.4, 300.0, n_terms=4)
    tight = mcfa.sito_series(g, 1e4, 79.4, 300.0, n_terms=40)
    default = mcfa.sito_series(g, 1e4, 79.4, 300.0)
    # the default stops once the tail bound is below 1e-10 of the scale
    assert abs(default - tight) <= 1e-10 * scale
    assert abs(loose - tight) < 1e-2


def test_sito_series_tail_bound_honest():
    g = sito_baseline()
    value_4, bound_4 = mcfa.sito_series(g, 1e4, 79.4, 300.0, n_terms=4,
                                        return_bound=True)
    exact = mcfa.sito_series(g, 1e4, 79.4, 300.0, n_terms=60)
    assert abs(value_4 - exact) <= bound_4


def test_sito_series_truncation_warning():
    g = sito_baseline()
    with pytest.warns(UserWarning, match="truncation"):
        mcfa.sito_series(g, 1e4, 79.4, 300.0, tolerance=0.0)


def test_sito_series_approaches_asymptote():
    g = sito_baseline()
    target = mcfa.sito_asymptote(g, 1e4)
    samples = mcfa.sito_series(g, 1e4, 79.4, np.array([1e4, 1e6, 1e8]))
    gaps = np.abs(samples - target) / target
    assert np.all(np.diff(gaps) < 0.0)
    assert gaps[-1] <= 1e-4


def test_sito_asymptote_strong_coupling_value():
    g = sito_baseline(d=4.0)
    # d1=6, d2=2, d12=d21=4: N_T * R (d12 d2 - R d1) / (d1 d2 d12) * corr
    # with corr = d12 d21 / (d12 d21 - R^2) = 16/15
    expected = 1e4 * (4.0 * 2.0 - 6.0) / (6.0 * 2.0 * 4.0) * 16.0 / 15.0
    assert mcfa.sito_asymptote(g, 1e4) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(4000.0 / 9.0, rel=1e-14)


def test_sito_asymptote_far_receiver_recovers_isolated():
    g = sito_baseline(d=2000.0)
    isolated = mcfa.siso_asymptote(BASE, 1e4)
    assert mcfa.sito_asymptote(g, 1e4) == pytest.approx(isolated, rel=1e-3)


@settings(max_examples=80, deadline=None)
@given(d=st.floats(1.2, 100.0), radius=st.floats(0.1, 1.0),
       diffusion=st.floats(1.0, 1000.0), t=st.floats(1e-6, 1e6))
def test_cumulative_bounds(d, radius, diffusion, t):
    kernel = mcfa.HittingKernel(d, radius, diffusion)
    value = mcfa.cumulative_siso(kernel, 1.0, t)
    assert 0.0 <= value <= radius / d * (1.0 + 1e-12)


@settings(max_examples=50, deadline=None)
@given(t_lo=st.floats(1e-4, 10.0), factor=st.floats(1.01, 100.0))
def test_cumulative_nondecreasing(t_lo, factor):
    assert (mcfa.cumulative_siso(BASE, 1e4, t_lo * factor)
            >= mcfa.cumulative_siso(BASE, 1e4, t_lo))

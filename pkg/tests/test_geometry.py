import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import mcfa
from mcfa.errors import TopologyError


def make_topology(centers, radii, txs=((0.0, 0.0, 0.0),), D=79.4, NT=1e4):
    return mcfa.Topology(
        transmitters=tuple(mcfa.Point3(*t) for t in txs),
        receivers=tuple(mcfa.Receiver(mcfa.Point3(*c), r)
                        for c, r in zip(centers, radii)),
        diffusion_coefficient=D,
        molecules_per_release=NT,
    )


def test_validate_accepts_baseline():
    top = make_topology([(6.0, 0.0, 0.0)], [1.0])
    assert mcfa.validate(top) == []


def test_validate_rejects_empty_receivers():
    top = make_topology([], [])
    messages = mcfa.validate(top)
    assert any("receiver" in m for m in messages)


def test_validate_rejects_transmitter_inside_receiver():
    top = make_topology([(0.5, 0.0, 0.0)], [1.0])
    messages = mcfa.validate(top)
    assert len(messages) == 1
    assert "transmitter" in messages[0]


def test_validate_rejects_touching_receivers():
    top = make_topology([(6.0, 0.0, 0.0), (8.0, 0.0, 0.0)], [1.0, 1.0])
    messages = mcfa.validate(top)
    assert any("overlap" in m for m in messages)
    # the offending distance shows up in the message
    assert any("2" in m for m in messages)


def test_validate_rejects_bad_scalars():
    top = make_topology([(6.0, 0.0, 0.0)], [1.0], D=-1.0, NT=0.0)
    messages = mcfa.validate(top)
    assert len(messages) == 2


def test_validate_rejects_nonfinite_coordinates():
    top = make_topology([(math.nan, 0.0, 0.0)], [1.0])
    assert mcfa.validate(top)


def test_require_valid_raises_with_details():
    top = make_topology([(6.0, 0.0, 0.0), (7.5, 0.0, 0.0)], [1.0, 1.0])
    with pytest.raises(TopologyError, match="overlap"):
        mcfa.require_valid(top)


def test_pair_distances_triangle():
    top = make_topology([(3.0, 0.0, 0.0), (0.0, 4.0, 0.0)], [1.0, 1.0],
                        txs=[(0.0, 0.0, 0.0)])
    rx_rx, tx_rx = mcfa.pair_distances(top)
    assert rx_rx.shape == (2, 2) and tx_rx.shape == (1, 2)
    assert rx_rx[0, 0] == 0.0 and rx_rx[1, 1] == 0.0
    assert rx_rx[0, 1] == pytest.approx(5.0)
    assert rx_rx[1, 0] == pytest.approx(5.0)
    assert tx_rx[0, 0] == pytest.approx(3.0)
    assert tx_rx[0, 1] == pytest.approx(4.0)


def test_build_sito_scenario_places_receivers():
    top = mcfa.build_sito_scenario(6.0, 4.0, 0.0)
    assert top.q == 1 and top.p == 2
    centers = top.receiver_centers()
    np.testing.assert_allclose(centers[0], [6.0, 0.0, 0.0])
    np.testing.assert_allclose(centers[1], [2.0, 0.0, 0.0], atol=1e-12)


def test_build_sito_scenario_opposite_side():
    top = mcfa.build_sito_scenario(6.0, 4.0, math.pi)
    _, tx_rx = mcfa.pair_distances(top)
    assert tx_rx[0, 1] == pytest.approx(10.0)


def test_build_sito_scenario_rejects_bad_angle():
    with pytest.raises(ValueError, match="omega"):
        mcfa.build_sito_scenario(6.0, 4.0, -0.1)
    with pytest.raises(ValueError, match="omega"):
        mcfa.build_sito_scenario(6.0, 4.0, math.pi + 0.1)


def test_build_sito_scenario_rejects_overlap():
    with pytest.raises(TopologyError):
        mcfa.build_sito_scenario(6.0, 1.5, 0.0)


def test_build_mimo_scenario_adds_transmitter():
    top = mcfa.build_mimo_scenario(6.0, 4.0, 0.0, mcfa.Point3(6.0, 6.0, 0.0))
    assert top.q == 2 and top.p == 2
    _, tx_rx = mcfa.pair_distances(top)
    assert tx_rx[1, 0] == pytest.approx(6.0)
    assert tx_rx[1, 1] == pytest.approx(math.sqrt(52.0))


@settings(max_examples=50, deadline=None)
@given(d1=st.floats(2.2, 50.0), d=st.floats(2.2, 40.0), omega=st.floats(0.0, math.pi))
def test_sito_law_of_cosines(d1, d, omega):
    expected = math.sqrt(max(d1 * d1 + d * d - 2.0 * d1 * d * math.cos(omega), 0.0))
    assume(expected > 1.05)  # transmitter must sit outside receiver 2
    top = mcfa.build_sito_scenario(d1, d, omega)
    assert mcfa.validate(top) == []
    rx_rx, tx_rx = mcfa.pair_distances(top)
    assert tx_rx[0, 1] == pytest.approx(expected, rel=1e-9, abs=1e-9)
    assert rx_rx[0, 1] == pytest.approx(d, rel=1e-12)

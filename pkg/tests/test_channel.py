import math

import numpy as np
import pytest

from aoi_dpp.channel import (RadioConstants, Topology, channel_stream, draw_channel_block,
                             draw_channels, rate_bits_per_slot, snr)


def unit():
    return RadioConstants(1.0, 1.0, 1)


def test_packet_bytes_converted_to_bits():
    assert RadioConstants.from_bytes(180e3, 1e-17, 600).packet_size_bits == 4800


@pytest.mark.parametrize("field", ["bandwidth_per_subchannel_hz", "noise_psd_w_per_hz",
                                   "packet_size_bits", "slot_duration_s"])
def test_radio_constants_must_be_positive(field):
    kwargs = dict(bandwidth_per_subchannel_hz=1.0, noise_psd_w_per_hz=1.0, packet_size_bits=1)
    kwargs[field] = 0
    with pytest.raises(ValueError, match=field):
        RadioConstants(**kwargs)


def test_sensor_on_sink_rejected():
    with pytest.raises(ValueError):
        Topology([(0, 0)])
    with pytest.raises(ValueError):
        Topology([(1, 0)], reference_distance_m=0)


def test_snr_examples():
    assert snr(0.0, 0.7, unit()) == 0.0
    assert snr(1.0, 1.0, unit()) == 1.0
    assert snr(2.0, 0.5, RadioConstants(180000.0, 1e-17, 1)) == pytest.approx(5.5556e11, rel=1e-4)


def test_rate_examples():
    assert rate_bits_per_slot(0.0, 3.0, unit()) == 0.0
    assert rate_bits_per_slot(1.0, 1.0, unit()) == 1.0
    c = RadioConstants(180000.0, 1.0, 1)
    # snr = p * g / (W N0) = 3
    assert rate_bits_per_slot(3 * 180000.0, 1.0, c) == pytest.approx(360000.0, rel=1e-12)


def test_rate_strictly_increasing_in_power():
    c = RadioConstants(180e3, 4e-21, 4800)
    powers = np.linspace(0, 1, 50)
    rates = [rate_bits_per_slot(p, 7e-16, c) for p in powers]
    assert all(b > a for a, b in zip(rates, rates[1:]))


def test_path_loss_factor_300m():
    topo = Topology([(0, 300), (300, 0)], path_loss_exponent=-3, reference_distance_m=1)
    np.testing.assert_allclose(topo.large_scale_amplitude(), [300.0 ** -3] * 2, rtol=1e-15)
    assert topo.large_scale_amplitude()[0] == pytest.approx(3.7037e-8, rel=1e-4)


def test_rayleigh_second_moment_monte_carlo():
    # unit distance: gain = c^2, E[c^2] = 2 sigma^2 = 0.5
    topo = Topology([(1.0, 0.0)], reference_distance_m=1.0, rayleigh_scale=0.5)
    gains = draw_channel_block(topo, 1, 10 ** 6, channel_stream(7))
    assert abs(gains.mean() - 0.5) / 0.5 < 0.01


def test_gain_is_squared_amplitude_product():
    topo = Topology([(0, 300), (300, 0)])
    rng_a, rng_b = channel_stream(3), channel_stream(3)
    gains = draw_channel_block(topo, 2, 5, rng_a)
    u = 1.0 - rng_b.random((5, 2, 2))
    c = 0.5 * np.sqrt(-2 * np.log(u))
    expected = (300.0 ** -3 * c) ** 2
    np.testing.assert_allclose(gains, expected, rtol=1e-14)
    assert np.all(gains >= 0) and np.all(np.isfinite(gains))


def test_same_seed_same_channels():
    topo = Topology([(0, 300), (300, 0)])
    a = draw_channels(topo, 2, 1, channel_stream(11))
    b = draw_channels(topo, 2, 1, channel_stream(11))
    assert a.gains.shape == (2, 2)
    assert np.array_equal(a.gains, b.gains)


def test_block_draw_matches_per_slot_draws():
    topo = Topology([(0, 300), (300, 0), (100, 100)])
    rng = channel_stream(5)
    per_slot = np.stack([draw_channels(topo, 3, t, rng).gains for t in range(1, 40)])
    block = draw_channel_block(topo, 3, 39, channel_stream(5))
    assert np.array_equal(per_slot, block)

"""Transmit/receive synthesis and raw-frame file tests."""

import numpy as np
import pytest

from pmcwnet import (
    AntennaPattern,
    BasebandFrame,
    CodeSequence,
    IoError,
    LengthMismatchError,
    PnDurationTooShortError,
    RadarNode,
    Scenario,
    Target,
    default_pll_mask,
    enumerate_paths,
    evaluate,
    generate_p3,
    load_raw_frame,
    save_raw_frame,
    synthesize,
    synthesize_rx,
    tx_baseband,
)

CARRIER_HZ = 79e9
CHIP_S = 1e-9


def antenna():
    return AntennaPattern.two_point(10.0, -7.0)


def single_radar_scenario(targets, n_bursts=4, pn_enabled=False, pn_mode="exact"):
    nodes = [RadarNode(1, [0.0, 0.0], [0.0, 1.0], 10.0, antenna())]
    return Scenario(
        nodes=nodes,
        targets=targets,
        code=generate_p3(504),
        chip_s=CHIP_S,
        carrier_hz=CARRIER_HZ,
        n_bursts=n_bursts,
        pn_enabled=pn_enabled,
        pn_mode=pn_mode,
    )


def pair_scenario(targets, n_bursts=2, pn_enabled=False):
    nodes = [
        RadarNode(1, [-0.5, 0.0], [0.0, 1.0], 10.0, antenna()),
        RadarNode(2, [0.5, 0.0], [0.0, 1.0], 10.0, antenna()),
    ]
    return Scenario(
        nodes=nodes,
        targets=targets,
        code=generate_p3(504),
        chip_s=CHIP_S,
        carrier_hz=CARRIER_HZ,
        n_bursts=n_bursts,
        pn_enabled=pn_enabled,
    )


class TestTxBaseband:
    def test_shift_and_tiling(self):
        code = CodeSequence(np.array([1.0, 1.0, -1.0, 1.0]))
        frame = tx_baseband(code, shift=1, n_bursts=2, chip_s=CHIP_S, carrier_hz=CARRIER_HZ)
        # Circular shift moves the last chip to the front.
        expected = np.array([1, 1, 1, -1, 1, 1, 1, -1], dtype=np.complex128)
        assert np.array_equal(frame.samples, expected)
        assert frame.n_bursts == 2
        assert frame.rx_id == 0

    def test_polyphase_chips_preserved(self):
        code = generate_p3(8)
        frame = tx_baseband(code, shift=0, n_bursts=3, chip_s=CHIP_S, carrier_hz=CARRIER_HZ)
        assert np.array_equal(frame.samples, np.tile(code.chips, 3))

    def test_sample_rate(self):
        code = generate_p3(8)
        frame = tx_baseband(code, 0, 1, 2e-9, CARRIER_HZ)
        assert frame.sample_rate_hz == pytest.approx(5e8, rel=1e-15)


class TestBasebandFrameValidation:
    def test_rejects_2d(self):
        with pytest.raises(LengthMismatchError):
            BasebandFrame(np.zeros((2, 4)), 1, 4, CHIP_S, CARRIER_HZ)

    def test_rejects_partial_burst(self):
        with pytest.raises(LengthMismatchError):
            BasebandFrame(np.zeros(7), 1, 4, CHIP_S, CARRIER_HZ)

    def test_burst_count(self):
        frame = BasebandFrame(np.zeros(12), 1, 4, CHIP_S, CARRIER_HZ)
        assert frame.n_bursts == 3


class TestSynthesizeRxNoiseless:
    def test_static_target_matches_direct_construction(self):
        sc = single_radar_scenario([Target([0.0, 3.0], [0.0, 0.0], 10.0)])
        frame = synthesize_rx(sc, 1)
        path = enumerate_paths(sc, 1)[0]
        d = path.delay_bins(CHIP_S)
        n = sc.n_bursts * sc.code_length
        idx = np.mod(np.arange(n) - d, sc.code_length)
        expected = path.amplitude * sc.code.chips[idx]
        err = np.max(np.abs(frame.samples - expected))
        assert err <= 1e-15 * path.amplitude

    def test_moving_target_phase_progression(self):
        sc = single_radar_scenario([Target([0.0, 3.0], [0.0, 20.0], 10.0)])
        frame = synthesize_rx(sc, 1)
        path = enumerate_paths(sc, 1)[0]
        assert path.doppler_hz > 0.0
        d = path.delay_bins(CHIP_S)
        n = sc.n_bursts * sc.code_length
        i = np.arange(n)
        expected = (
            path.amplitude
            * sc.code.chips[np.mod(i - d, sc.code_length)]
            * np.exp(-2j * np.pi * path.doppler_hz * CHIP_S * i)
        )
        err = np.max(np.abs(frame.samples - expected))
        assert err <= 1e-9 * path.amplitude

        # Burst-to-burst: a receding target winds phase backwards by
        # exactly 2*pi*f_D*T_burst per burst.
        burst_s = sc.code_length * CHIP_S
        per_burst = np.exp(-2j * np.pi * path.doppler_hz * burst_s)
        s = frame.samples.reshape(sc.n_bursts, sc.code_length)
        ratio = s[1:] / s[:-1]
        assert np.max(np.abs(ratio - per_burst)) <= 1e-9

    def test_superposition_over_targets(self):
        # With phase noise off the channel is linear: the two-target frame
        # equals the sum of single-target frames minus the doubly counted
        # LOS-only frame.
        t_a = Target([0.0, 2.0], [0.0, 0.0], 10.0)
        t_b = Target([1.0, 3.0], [0.0, 0.0], 5.0)
        both = synthesize_rx(pair_scenario([t_a, t_b]), 1).samples
        only_a = synthesize_rx(pair_scenario([t_a]), 1).samples
        only_b = synthesize_rx(pair_scenario([t_b]), 1).samples
        los_only = synthesize_rx(pair_scenario([]), 1).samples
        recombined = only_a + only_b - los_only
        err = np.max(np.abs(both - recombined))
        assert err <= 1e-12 * np.max(np.abs(both))

    def test_code_shift_applied_to_remote_radar(self):
        # LOS-only network: the remote radar's stream must appear shifted
        # by its MIMO code shift plus the propagation delay.
        sc = pair_scenario([])
        frame = synthesize_rx(sc, 1)
        path = enumerate_paths(sc, 1)[0]
        assert path.kind == "los"
        d = path.delay_bins(CHIP_S)
        shift = sc.node(2).code_shift
        assert shift == 126
        n = sc.n_bursts * sc.code_length
        idx = np.mod(np.arange(n) - d - shift, sc.code_length)
        expected = path.amplitude * sc.code.chips[idx]
        err = np.max(np.abs(frame.samples - expected))
        assert err <= 1e-15 * path.amplitude


class TestSynthesizeRxPhaseNoise:
    def _pll(self, sc, seed, duration=None):
        return synthesize(
            default_pll_mask(),
            sc.frame_s if duration is None else duration,
            1e8,
            seed,
        )

    def test_mono_path_carries_delay_difference_phase(self):
        sc = single_radar_scenario(
            [Target([0.0, 3.0], [0.0, 0.0], 10.0)], pn_enabled=True
        )
        sc.node(1).pll = self._pll(sc, seed=11)
        frame = synthesize_rx(sc, 1)

        path = enumerate_paths(sc, 1)[0]
        d = path.delay_bins(CHIP_S)
        n = sc.n_bursts * sc.code_length
        i = np.arange(n)
        times = i * CHIP_S
        phi = evaluate(sc.node(1).pll, times)
        phi_delayed = evaluate(sc.node(1).pll, times - path.delay_s)
        expected = (
            path.amplitude
            * sc.code.chips[np.mod(i - d, sc.code_length)]
            * np.exp(1j * (phi_delayed - phi))
        )
        err = np.max(np.abs(frame.samples - expected))
        assert err <= 1e-8 * path.amplitude

    def test_linearized_mode(self):
        sc = single_radar_scenario(
            [Target([0.0, 3.0], [0.0, 0.0], 10.0)],
            pn_enabled=True,
            pn_mode="linearized",
        )
        sc.node(1).pll = self._pll(sc, seed=11)
        frame = synthesize_rx(sc, 1)

        path = enumerate_paths(sc, 1)[0]
        d = path.delay_bins(CHIP_S)
        n = sc.n_bursts * sc.code_length
        i = np.arange(n)
        times = i * CHIP_S
        delta = evaluate(sc.node(1).pll, times - path.delay_s) - evaluate(
            sc.node(1).pll, times
        )
        expected = (
            path.amplitude
            * sc.code.chips[np.mod(i - d, sc.code_length)]
            * (1.0 + 1j * delta)
        )
        err = np.max(np.abs(frame.samples - expected))
        assert err <= 1e-8 * path.amplitude

    def test_cross_radar_phase_uses_both_plls(self):
        sc = pair_scenario([], pn_enabled=True)
        sc.node(1).pll = self._pll(sc, seed=21)
        sc.node(2).pll = self._pll(sc, seed=22)
        frame = synthesize_rx(sc, 1)

        path = enumerate_paths(sc, 1)[0]
        d = path.delay_bins(CHIP_S)
        shift = sc.node(2).code_shift
        n = sc.n_bursts * sc.code_length
        i = np.arange(n)
        times = i * CHIP_S
        phi_tx = evaluate(sc.node(2).pll, times - path.delay_s)
        phi_rx = evaluate(sc.node(1).pll, times)
        expected = (
            path.amplitude
            * sc.code.chips[np.mod(i - d - shift, sc.code_length)]
            * np.exp(1j * (phi_tx - phi_rx))
        )
        err = np.max(np.abs(frame.samples - expected))
        assert err <= 1e-8 * path.amplitude

    def test_disabled_pn_ignores_attached_plls(self):
        sc_off = single_radar_scenario([Target([0.0, 3.0], [0.0, 0.0], 10.0)])
        sc_with = single_radar_scenario([Target([0.0, 3.0], [0.0, 0.0], 10.0)])
        sc_with.node(1).pll = self._pll(sc_with, seed=5)
        a = synthesize_rx(sc_off, 1).samples
        b = synthesize_rx(sc_with, 1).samples
        assert np.array_equal(a, b)

    def test_missing_pll_rejected(self):
        sc = single_radar_scenario(
            [Target([0.0, 3.0], [0.0, 0.0], 10.0)], pn_enabled=True
        )
        with pytest.raises(PnDurationTooShortError):
            synthesize_rx(sc, 1)

    def test_short_pll_rejected(self):
        sc = single_radar_scenario(
            [Target([0.0, 3.0], [0.0, 0.0], 10.0)], pn_enabled=True
        )
        sc.node(1).pll = self._pll(sc, seed=5, duration=sc.frame_s / 2.0)
        with pytest.raises(PnDurationTooShortError):
            synthesize_rx(sc, 1)


class TestRawFrameFiles:
    def _frame(self):
        rng = np.random.default_rng(7)
        samples = rng.standard_normal(24) + 1j * rng.standard_normal(24)
        return BasebandFrame(samples, 3, 8, CHIP_S, CARRIER_HZ)

    def test_round_trip_bit_exact(self, tmp_path):
        frame = self._frame()
        path = tmp_path / "frame.bin"
        save_raw_frame(frame, path)
        back = load_raw_frame(path, rx_id=3)
        assert np.array_equal(back.samples, frame.samples)
        assert back.code_length == 8
        assert back.n_bursts == 3
        assert back.chip_s == frame.chip_s
        assert back.carrier_hz == frame.carrier_hz
        assert back.rx_id == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            load_raw_frame(tmp_path / "nope.bin")

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOTAFRAME 1 2 3 4\n")
        with pytest.raises(IoError):
            load_raw_frame(path)

    def test_truncated_body(self, tmp_path):
        frame = self._frame()
        path = tmp_path / "frame.bin"
        save_raw_frame(frame, path)
        data = path.read_bytes()
        path.write_bytes(data[:-16])
        with pytest.raises(IoError):
            load_raw_frame(path)

import numpy as np
import pytest

from pmcwnet.errors import BadBandError, BadDurationError, TooFewSamplesError
from pmcwnet.phasenoise import (
    PhaseNoiseProcess,
    PsdMask,
    default_pll_mask,
    estimate_psd,
    evaluate,
    evaluate_grid,
    load_mask,
    modulation,
    save_mask,
    synthesize,
)

TWO_SEGMENT = PsdMask(
    freqs_hz=np.array([1e3, 1e5, 1e7]),
    levels_dbc_hz=np.array([-70.0, -90.0, -120.0]),
)


def test_synthesize_line_grid_and_amplitudes():
    T = 1e-4
    proc = synthesize(TWO_SEGMENT, total_duration_s=T, f_max_hz=1e6, seed=3)
    df = 1.0 / T
    assert proc.delta_f == df
    k = np.round(proc.freqs / df)
    assert np.max(np.abs(proc.freqs - k * df)) == 0.0
    # amplitude law: alpha = sqrt(2 * 10^(mask/10) * delta_f), checked
    # independently through the mask's own interpolator
    want = np.sqrt(2.0 * 10.0 ** (TWO_SEGMENT.level_db(proc.freqs) / 10.0) * df)
    assert np.max(np.abs(proc.alphas - want)) < 1e-15


def test_synthesize_is_deterministic_per_seed():
    kw = dict(total_duration_s=1e-4, f_max_hz=1e6)
    a = synthesize(TWO_SEGMENT, seed=7, **kw)
    b = synthesize(TWO_SEGMENT, seed=7, **kw)
    c = synthesize(TWO_SEGMENT, seed=8, **kw)
    assert np.array_equal(a.thetas, b.thetas)
    assert not np.array_equal(a.thetas, c.thetas)


def test_pruning_preserves_draw_order():
    # dropping a line below the pruning threshold must not change the
    # phases of the lines that survive
    strong = PsdMask(np.array([1e3, 1e6]), np.array([-80.0, -80.0]))
    notched = PsdMask(np.array([1e3, 2e5, 2.01e5, 1e6]), np.array([-80.0, -260.0, -260.0, -80.0]))
    kw = dict(total_duration_s=1e-4, f_max_hz=1e6, seed=11)
    a = synthesize(strong, **kw)
    b = synthesize(notched, **kw)
    assert b.n_pruned > 0
    common = np.isin(a.freqs, b.freqs)
    assert np.array_equal(a.thetas[common], b.thetas)


def test_synthesize_errors():
    with pytest.raises(BadDurationError):
        synthesize(TWO_SEGMENT, total_duration_s=0.0, f_max_hz=1e6, seed=0)
    with pytest.raises(BadBandError):
        # band edge below the first line frequency leaves nothing to draw
        synthesize(TWO_SEGMENT, total_duration_s=1e-4, f_max_hz=1e3, seed=0)


def test_grid_matches_trig_sum():
    T = 1e-4
    proc = synthesize(TWO_SEGMENT, total_duration_s=T, f_max_hz=1e6, seed=5)
    n, fs = 2000, 2e7
    grid = evaluate_grid(proc, n, fs)
    direct = evaluate(proc, np.arange(n) / fs)
    assert np.max(np.abs(grid - direct)) < 1e-9


def test_grid_delay_matches_shifted_times():
    T = 1e-4
    proc = synthesize(TWO_SEGMENT, total_duration_s=T, f_max_hz=1e6, seed=5)
    tau = 3.3356e-9
    n, fs = 1000, 2e7
    delayed = evaluate_grid(proc, n, fs, delay_s=tau)
    direct = evaluate(proc, np.arange(n) / fs - tau)
    assert np.max(np.abs(delayed - direct)) < 1e-9


def test_grid_folds_lines_above_output_rate():
    # Band extends well past the requested sample rate: the folded FFT
    # evaluation must still equal the direct trig sum at those times.
    T = 1e-5
    proc = synthesize(TWO_SEGMENT, total_duration_s=T, f_max_hz=1e8, seed=2)
    n, fs = 100, 1e7
    assert np.max(proc.freqs) > fs
    grid = evaluate_grid(proc, n, fs)
    direct = evaluate(proc, np.arange(n) / fs)
    assert np.max(np.abs(grid - direct)) < 1e-9


def test_shifted_process_equals_retimed_evaluation():
    proc = synthesize(TWO_SEGMENT, total_duration_s=1e-4, f_max_hz=1e5, seed=9)
    tau = 1.7e-8
    times = np.linspace(0.0, 5e-5, 400)
    a = evaluate(proc.shifted(tau), times)
    b = evaluate(proc, times - tau)
    assert np.max(np.abs(a - b)) < 1e-12


def test_rms_closed_form_and_sample_rms():
    T = 1e-4
    proc = synthesize(TWO_SEGMENT, total_duration_s=T, f_max_hz=1e6, seed=2)
    assert abs(proc.rms_rad - np.sqrt(np.sum(proc.alphas**2) / 2.0)) < 1e-15
    # over one full period the grid samples are orthogonal, so the sample
    # RMS equals the closed form exactly
    fs = 2e7
    n = int(round(T * fs))
    phi = evaluate_grid(proc, n, fs)
    assert abs(np.sqrt(np.mean(phi**2)) - proc.rms_rad) < 1e-9


def test_delay_difference_rms_follows_sine_law():
    # RMS of phi(t - tau) - phi(t): each line contributes amplitude
    # alpha * 2|sin(pi f tau)|
    T = 1e-4
    proc = synthesize(TWO_SEGMENT, total_duration_s=T, f_max_hz=1e6, seed=4)
    tau = 33.356e-9
    fs = 2e7
    n = int(round(T * fs))
    diff = evaluate_grid(proc, n, fs, delay_s=tau) - evaluate_grid(proc, n, fs)
    want = np.sqrt(
        np.sum((proc.alphas * 2.0 * np.abs(np.sin(np.pi * proc.freqs * tau))) ** 2) / 2.0
    )
    assert abs(np.sqrt(np.mean(diff**2)) - want) < 1e-9


def test_independent_seeds_decorrelate():
    T = 1e-4
    fs = 2e7
    n = int(round(T * fs))
    a = evaluate_grid(synthesize(TWO_SEGMENT, total_duration_s=T, f_max_hz=1e6, seed=100), n, fs)
    b = evaluate_grid(synthesize(TWO_SEGMENT, total_duration_s=T, f_max_hz=1e6, seed=101), n, fs)
    rho = np.corrcoef(a, b)[0, 1]
    assert abs(rho) < 0.05


def test_psd_roundtrip_exact_on_grid():
    # full-length rectangular periodogram of on-grid lines reproduces the
    # mask bin for bin
    T = 1e-3
    fs = 2e7
    n = int(round(T * fs))
    proc = synthesize(TWO_SEGMENT, total_duration_s=T, f_max_hz=1e7, seed=0)
    phi = evaluate_grid(proc, n, fs)
    freqs, db = estimate_psd(phi, fs, n_segments=1)
    df = 1.0 / T
    band = (freqs >= 10 * df) & (freqs <= 5e6)
    err = db[band] - TWO_SEGMENT.level_db(freqs[band])
    assert np.max(np.abs(err)) < 1e-9


def test_psd_single_tone_level():
    fs = 1e6
    n = 4096
    f0 = 100 * fs / n
    alpha = 0.03
    phi = alpha * np.cos(2 * np.pi * f0 * np.arange(n) / fs + 0.3)
    freqs, db = estimate_psd(phi, fs, n_segments=1)
    bin_hz = fs / n
    idx = int(np.argmin(np.abs(freqs - f0)))
    want = 10.0 * np.log10((alpha**2 / 2.0) / bin_hz)
    assert abs(db[idx] - want) < 1e-9


def test_psd_too_few_samples():
    with pytest.raises(TooFewSamplesError):
        estimate_psd(np.zeros(16), 1e6, n_segments=4)


def test_empty_process_is_silent():
    proc = PhaseNoiseProcess(
        delta_f=1e4, freqs=np.array([]), alphas=np.array([]), thetas=np.array([])
    )
    assert proc.rms_rad == 0.0
    assert np.array_equal(evaluate_grid(proc, 64, 1e6), np.zeros(64))
    assert np.array_equal(evaluate(proc, np.linspace(0, 1e-5, 7)), np.zeros(7))


def test_modulation_modes():
    phi = np.array([0.0, 1e-3, -2e-3, 0.5])
    exact = modulation(phi, "exact")
    assert np.max(np.abs(np.abs(exact) - 1.0)) < 1e-12
    assert np.max(np.abs(np.angle(exact) - phi)) < 1e-12
    lin = modulation(phi, "linearized")
    assert np.array_equal(lin, 1.0 + 1j * phi)
    with pytest.raises(ValueError):
        modulation(phi, "quadratic")


def test_default_mask_frozen_points():
    mask = default_pll_mask()
    assert np.array_equal(mask.freqs_hz, [1e4, 1e5, 1e6, 1e7, 1e8])
    assert np.array_equal(mask.levels_dbc_hz, [-70, -80, -85, -110, -120])


def test_mask_interpolation_and_clamp():
    mask = TWO_SEGMENT
    # halfway in log frequency between 1e3 (-70) and 1e5 (-90)
    assert abs(mask.level_db(1e4) - (-80.0)) < 1e-12
    assert mask.level_db(1.0) == -70.0
    assert mask.level_db(1e9) == -120.0


def test_mask_validation():
    with pytest.raises(ValueError):
        PsdMask(np.array([1e4]), np.array([-70.0]))
    with pytest.raises(ValueError):
        PsdMask(np.array([1e5, 1e4]), np.array([-70.0, -80.0]))
    with pytest.raises(ValueError):
        PsdMask(np.array([0.0, 1e4]), np.array([-70.0, -80.0]))


def test_mask_file_roundtrip(tmp_path):
    path = tmp_path / "mask.txt"
    save_mask(TWO_SEGMENT, path)
    back = load_mask(path)
    assert np.array_equal(back.freqs_hz, TWO_SEGMENT.freqs_hz)
    assert np.array_equal(back.levels_dbc_hz, TWO_SEGMENT.levels_dbc_hz)

"""PLL phase noise as a deterministic sum of spectral lines.

A phase-noise trajectory is modeled as

    phi(t) = sum_k alpha_k * cos(2*pi*f_k*t + theta_k)

with lines on the grid f_k = k * delta_f, where delta_f is the reciprocal of
the synthesis duration.  The theta_k are i.i.d. uniform draws from a seeded
generator, and alpha_k is set from a single-sideband PSD mask so that the
one-sided PSD of phi at f_k equals the mask level:

    alpha_k = sqrt(2 * 10**(mask(f_k)/10) * delta_f)

Because the model is a finite trig sum, a delayed copy phi(t - tau) can be
evaluated exactly for any real tau; no resampling or interpolation is ever
involved.  That exactness is what makes delayed-oscillator effects (range
correlation, LOS-based compensation residuals) reproduce their closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadBandError, BadDurationError, IoError, TooFewSamplesError

__all__ = [
    "PsdMask",
    "PhaseNoiseProcess",
    "default_pll_mask",
    "synthesize",
    "evaluate",
    "evaluate_grid",
    "modulation",
    "estimate_psd",
    "load_mask",
    "save_mask",
]

# Lines with amplitude below this contribute nothing at double precision and
# are dropped at synthesis time (count recorded on the process).
PRUNE_THRESHOLD = 1e-10

DB_FLOOR = -300.0


@dataclass
class PsdMask:
    """Piecewise-linear single-sideband phase-noise mask.

    Points are (frequency_hz, level_dbc_hz) with strictly increasing
    positive frequencies.  Between points the level is interpolated
    linearly in dB versus log-frequency; outside the covered band the
    nearest endpoint level is held (clamped).
    """

    freqs_hz: np.ndarray
    levels_dbc_hz: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freqs_hz, dtype=np.float64)
        lv = np.asarray(self.levels_dbc_hz, dtype=np.float64)
        if f.ndim != 1 or f.size < 2 or lv.shape != f.shape:
            raise ValueError("mask needs at least 2 (freq, level) points")
        if np.any(f <= 0.0):
            raise ValueError("mask frequencies must be positive")
        if np.any(np.diff(f) <= 0.0):
            raise ValueError("mask frequencies must be strictly increasing")
        self.freqs_hz = f
        self.levels_dbc_hz = lv

    def level_db(self, freq_hz) -> np.ndarray:
        """Mask level in dBc/Hz at one or more positive frequencies."""
        f = np.asarray(freq_hz, dtype=np.float64)
        if np.any(f <= 0.0):
            raise ValueError("mask evaluated at non-positive frequency")
        return np.interp(np.log10(f), np.log10(self.freqs_hz), self.levels_dbc_hz)


def default_pll_mask() -> PsdMask:
    """Stand-in mask for a millimeter-wave radar PLL.

    Chosen for this simulator (not measured from any device): -70 dBc/Hz at
    10 kHz, -80 at 100 kHz, -85 at 1 MHz, -110 at 10 MHz, -120 at 100 MHz,
    clamped beyond both ends.
    """
    return PsdMask(
        freqs_hz=np.array([1e4, 1e5, 1e6, 1e7, 1e8]),
        levels_dbc_hz=np.array([-70.0, -80.0, -85.0, -110.0, -120.0]),
    )


@dataclass
class PhaseNoiseProcess:
    """A frozen realization of the spectral-line phase-noise model.

    delta_f   line spacing in Hz (reciprocal of the synthesis duration)
    freqs     line frequencies, each an exact multiple of delta_f
    alphas    per-line amplitudes in radians
    thetas    per-line phases in radians
    seed      generator seed the thetas were drawn from (None if built by hand)
    n_pruned  number of negligible lines dropped at synthesis time
    """

    delta_f: float
    freqs: np.ndarray
    alphas: np.ndarray
    thetas: np.ndarray
    seed: int | None = None
    n_pruned: int = 0

    def __post_init__(self):
        self.freqs = np.asarray(self.freqs, dtype=np.float64)
        self.alphas = np.asarray(self.alphas, dtype=np.float64)
        self.thetas = np.asarray(self.thetas, dtype=np.float64)
        if not (self.freqs.shape == self.alphas.shape == self.thetas.shape):
            raise ValueError("freqs, alphas, thetas must have matching shapes")
        if self.delta_f <= 0.0:
            raise ValueError("delta_f must be positive")

    @property
    def period_s(self) -> float:
        """The model is periodic with the synthesis duration."""
        return 1.0 / self.delta_f

    @property
    def rms_rad(self) -> float:
        return float(np.sqrt(np.sum(self.alphas**2) / 2.0))

    def shifted(self, delay_s: float) -> "PhaseNoiseProcess":
        """Process whose evaluation equals this one delayed by delay_s.

        Implemented exactly: each line phase moves by -2*pi*f_k*delay_s.
        """
        return PhaseNoiseProcess(
            delta_f=self.delta_f,
            freqs=self.freqs.copy(),
            alphas=self.alphas.copy(),
            thetas=self.thetas - 2.0 * np.pi * self.freqs * delay_s,
            seed=self.seed,
            n_pruned=self.n_pruned,
        )


def synthesize(
    mask: PsdMask,
    total_duration_s: float,
    f_max_hz: float,
    seed: int,
) -> PhaseNoiseProcess:
    """Draw one phase-noise realization from a PSD mask.

    The line grid spacing is 1/total_duration_s; lines run from delta_f up
    to f_max_hz inclusive (k = 0 carries no phase noise and is excluded).
    Per-line phases are drawn in a single pass from a PCG64 generator, so a
    given seed always produces the identical process, and pruning of
    negligible lines cannot perturb the phases of the survivors.
    """
    if total_duration_s <= 0.0:
        raise BadDurationError(f"synthesis duration must be positive, got {total_duration_s}")
    delta_f = 1.0 / total_duration_s
    k_max = int(np.floor(f_max_hz / delta_f))
    if k_max < 1:
        raise BadBandError(
            f"f_max {f_max_hz} Hz leaves no spectral line above delta_f {delta_f} Hz"
        )
    rng = np.random.Generator(np.random.PCG64(seed))
    thetas = rng.uniform(0.0, 2.0 * np.pi, k_max)
    freqs = np.arange(1, k_max + 1, dtype=np.float64) * delta_f
    alphas = np.sqrt(2.0 * 10.0 ** (mask.level_db(freqs) / 10.0) * delta_f)
    keep = alphas >= PRUNE_THRESHOLD
    n_pruned = int(np.count_nonzero(~keep))
    return PhaseNoiseProcess(
        delta_f=delta_f,
        freqs=freqs[keep],
        alphas=alphas[keep],
        thetas=thetas[keep],
        seed=seed,
        n_pruned=n_pruned,
    )


def evaluate(process: PhaseNoiseProcess, times_s: np.ndarray) -> np.ndarray:
    """Exact trig-sum evaluation of phi at arbitrary times.

    Cost is O(n_lines * n_times); fine for analysis and tests.  Frame-rate
    synthesis should go through evaluate_grid, which computes the same sum
    through an inverse FFT when the sample grid is commensurate with the
    line grid.
    """
    t = np.asarray(times_s, dtype=np.float64)
    flat = t.reshape(-1)
    phi = np.zeros(flat.size, dtype=np.float64)
    if process.freqs.size == 0:
        return phi.reshape(t.shape)
    # Bound the temporary to roughly 32 MB regardless of problem size; the
    # block/chunk walk order is fixed, so accumulation is reproducible.
    line_block = 64
    time_chunk = 65536
    two_pi = 2.0 * np.pi
    for t0 in range(0, flat.size, time_chunk):
        chunk = flat[t0 : t0 + time_chunk]
        acc = np.zeros(chunk.size, dtype=np.float64)
        for k0 in range(0, process.freqs.size, line_block):
            f = process.freqs[k0 : k0 + line_block, None]
            a = process.alphas[k0 : k0 + line_block, None]
            th = process.thetas[k0 : k0 + line_block, None]
            acc += np.sum(a * np.cos(two_pi * f * chunk[None, :] + th), axis=0)
        phi[t0 : t0 + time_chunk] = acc
    return phi.reshape(t.shape)


def evaluate_grid(
    process: PhaseNoiseProcess,
    n_samples: int,
    sample_rate_hz: float,
    delay_s: float = 0.0,
) -> np.ndarray:
    """Evaluate phi(i/fs - delay) for i = 0..n_samples-1.

    When the sample rate is an integer multiple of the line spacing (one
    process period spans a whole number of samples), every line lands on an
    FFT bin of that period and the trig sum collapses to one inverse FFT:
    the delay enters as an exact per-line phase rotation, so the result is
    the same sum evaluated a different way, not an approximation.  Grids
    that do not line up fall back to direct summation.
    """
    ratio = sample_rate_hz / process.delta_f
    n_fft = int(round(ratio))
    commensurate = n_fft >= 2 and abs(ratio - n_fft) <= 1e-6 * ratio
    if not commensurate or n_fft < n_samples:
        times = np.arange(n_samples, dtype=np.float64) / sample_rate_hz
        return evaluate(process, times - delay_s)
    spectrum = np.zeros(n_fft, dtype=np.complex128)
    if process.freqs.size:
        k = np.rint(process.freqs / process.delta_f).astype(np.int64)
        phase = process.thetas - 2.0 * np.pi * process.freqs * delay_s
        # Lines at or above the output rate fold onto bin k mod n_fft; a
        # sampled cosine at integer k hits those samples exactly, so the
        # folded sum still equals the direct evaluation.
        np.add.at(
            spectrum, k % n_fft, n_fft * process.alphas * np.exp(1j * phase)
        )
    return np.fft.ifft(spectrum).real[:n_samples]


def modulation(phases_rad: np.ndarray, mode: str = "exact") -> np.ndarray:
    """Complex oscillator factor carrying a phase trajectory.

    mode "exact" gives exp(j*phi); mode "linearized" gives the small-angle
    form 1 + j*phi, which keeps each spectral line's effect first-order and
    is what closed-form sideband predictions assume.
    """
    phi = np.asarray(phases_rad, dtype=np.float64)
    if mode == "exact":
        return np.exp(1j * phi)
    if mode == "linearized":
        return 1.0 + 1j * phi
    raise ValueError(f"unknown modulation mode {mode!r}")


def estimate_psd(
    samples: np.ndarray,
    sample_rate_hz: float,
    n_segments: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """One-sided averaged-periodogram PSD of a phase trajectory.

    Splits the record into n_segments equal non-overlapping rectangular
    windowed segments, averages their periodograms, and returns
    (freqs_hz, level_db) excluding the DC bin.  Levels use the same
    convention as PsdMask: 10*log10 of the one-sided PSD of phi in
    rad^2/Hz, so a synthesized process estimates back to its mask.
    """
    x = np.asarray(samples, dtype=np.float64)
    if n_segments < 1:
        raise ValueError("n_segments must be at least 1")
    seg_len = x.size // n_segments
    if seg_len < 8:
        raise TooFewSamplesError(
            f"{x.size} samples in {n_segments} segments leaves {seg_len} per segment"
        )
    acc = None
    for s in range(n_segments):
        seg = x[s * seg_len : (s + 1) * seg_len]
        spec = np.fft.rfft(seg)
        pxx = (np.abs(spec) ** 2) / (sample_rate_hz * seg_len)
        pxx[1:] *= 2.0
        if seg_len % 2 == 0:
            pxx[-1] /= 2.0
        acc = pxx if acc is None else acc + pxx
    acc /= n_segments
    freqs = np.fft.rfftfreq(seg_len, d=1.0 / sample_rate_hz)
    with np.errstate(divide="ignore"):
        level_db = 10.0 * np.log10(acc)
    level_db = np.maximum(level_db, DB_FLOOR)
    return freqs[1:], level_db[1:]


def save_mask(mask: PsdMask, path) -> None:
    """Write a mask as '<freq_hz> <level_dbc_hz>' lines."""
    lines = ["# phase-noise mask: <freq_hz> <level_dbc_hz>"]
    lines += [f"{float(f)!r} {float(lv)!r}" for f, lv in zip(mask.freqs_hz, mask.levels_dbc_hz)]
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write mask file {path}: {exc}") from exc


def load_mask(path) -> PsdMask:
    """Read a mask file written by save_mask (comments allowed)."""
    try:
        with open(path) as fh:
            raw = fh.readlines()
    except OSError as exc:
        raise IoError(f"cannot read mask file {path}: {exc}") from exc
    freqs, levels = [], []
    for lineno, line in enumerate(raw, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) != 2:
            raise IoError(f"{path}:{lineno}: expected '<freq_hz> <level_dbc_hz>'")
        try:
            freqs.append(float(parts[0]))
            levels.append(float(parts[1]))
        except ValueError as exc:
            raise IoError(f"{path}:{lineno}: bad number: {exc}") from exc
    try:
        return PsdMask(freqs_hz=np.array(freqs), levels_dbc_hz=np.array(levels))
    except ValueError as exc:
        raise IoError(f"{path}: invalid mask: {exc}") from exc

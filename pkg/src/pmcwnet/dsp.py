"""Range and Doppler processing for chip-rate PMCW frames.

Range processing is periodic correlation of each burst against one period
of the reference code:

    R[p, n] = sum_l frame[n*L + ((l + p) mod L)] * conj(ref[l])

computed burst-by-burst through length-L FFTs (identical to the direct sum
to rounding error; tests pin the equivalence).  Only the first L/2 range
rows are kept: the almost-perfect code family is unambiguous over half a
period, and code-domain MIMO divides exactly that half among the radars.

Doppler processing transforms each kept range row across bursts.  The
convention is fixed so that a received rotation exp(-j*2*pi*f_D*n*T) peaks
at the bin labeled +f_D: the slow-time transform uses the conjugate
(inverse-DFT) kernel without the 1/N factor, then a center shift, so bin d
of the shifted axis represents frequency (d - N//2) / (N * T).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CodeSequence
from .errors import (
    BadBinError,
    IoError,
    LengthMismatchError,
    OverExcludedError,
    WindowedMapError,
)
from .txrx import BasebandFrame

__all__ = [
    "RangeSlowTimeMatrix",
    "RangeDopplerMap",
    "periodic_correlate",
    "doppler_dft",
    "doppler_idft",
    "noise_floor",
    "ridge_power",
    "save_matrix_csv",
    "save_matrix_binary",
    "load_matrix_binary",
    "save_heatmap",
    "DB_FLOOR",
]

DB_FLOOR = -300.0

MATRIX_MAGIC = "PMCWMAT1"


def _power_db(power: np.ndarray | float, ref_power: float) -> np.ndarray | float:
    """10*log10(power/ref) with the documented -300 dB floor."""
    if ref_power <= 0.0:
        return np.full_like(np.asarray(power, dtype=np.float64), DB_FLOOR)
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(np.asarray(power, dtype=np.float64) / ref_power)
    return np.maximum(db, DB_FLOOR)


@dataclass
class RangeSlowTimeMatrix:
    """Correlator output: rows are kept range bins, columns are bursts.

    values      complex, shape (L/2, N)
    n_sections  number of radars sharing the range axis; section m
                (1-based) covers rows [(m-1)*w, m*w) with w = (L/2)/M
    burst_s     burst duration, the slow-time sample interval
    """

    values: np.ndarray
    n_sections: int
    burst_s: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim != 2:
            raise LengthMismatchError("matrix must be 2-D")
        if self.n_sections < 1 or self.values.shape[0] % self.n_sections != 0:
            raise LengthMismatchError(
                f"{self.values.shape[0]} rows not divisible into "
                f"{self.n_sections} sections"
            )

    @property
    def n_range_bins(self) -> int:
        return self.values.shape[0]

    @property
    def n_bursts(self) -> int:
        return self.values.shape[1]

    @property
    def section_bins(self) -> int:
        return self.n_range_bins // self.n_sections

    def section_slice(self, section: int) -> slice:
        """Row slice owned by radar `section` (1-based)."""
        if not 1 <= section <= self.n_sections:
            raise BadBinError(
                f"section {section} outside 1..{self.n_sections}"
            )
        w = self.section_bins
        return slice((section - 1) * w, section * w)


@dataclass
class RangeDopplerMap:
    """Slow-time spectrum of a range/slow-time matrix.

    Bin d on the (already center-shifted) Doppler axis represents
    frequency (d - N//2) / (N * burst_s); a target receding at rate
    matching +f_D peaks at doppler_bin(+f_D).
    """

    values: np.ndarray
    n_sections: int
    burst_s: float
    window: str = "none"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim != 2:
            raise LengthMismatchError("map must be 2-D")

    @property
    def n_range_bins(self) -> int:
        return self.values.shape[0]

    @property
    def n_doppler_bins(self) -> int:
        return self.values.shape[1]

    @property
    def center_bin(self) -> int:
        return self.values.shape[1] // 2

    def doppler_freqs_hz(self) -> np.ndarray:
        n = self.n_doppler_bins
        return (np.arange(n) - n // 2) / (n * self.burst_s)

    def doppler_bin(self, freq_hz: float) -> int:
        """Axis bin whose labeled frequency is nearest freq_hz."""
        n = self.n_doppler_bins
        d = int(round(freq_hz * n * self.burst_s)) + n // 2
        if not 0 <= d < n:
            raise BadBinError(f"{freq_hz} Hz outside the unambiguous axis")
        return d

    def section_slice(self, section: int) -> slice:
        if self.n_range_bins % self.n_sections != 0 or not (
            1 <= section <= self.n_sections
        ):
            raise BadBinError(f"bad section {section}")
        w = self.n_range_bins // self.n_sections
        return slice((section - 1) * w, section * w)


def periodic_correlate(
    frame: BasebandFrame,
    reference: CodeSequence,
    n_sections: int = 1,
) -> RangeSlowTimeMatrix:
    """Correlate every burst against one period of the reference code.

    Returns the first L/2 range rows (the unambiguous half-period).  The
    FFT realization equals the direct O(L^2) sum at double precision; the
    test suite pins agreement to 1e-9 relative.
    """
    length = reference.length
    if frame.code_length != length:
        raise LengthMismatchError(
            f"frame built on {frame.code_length}-chip bursts, reference has {length}"
        )
    if frame.samples.size % length != 0:
        raise LengthMismatchError("frame is not a whole number of bursts")
    bursts = frame.samples.reshape(-1, length)
    ref_spec = np.conj(np.fft.fft(reference.chips))
    corr = np.fft.ifft(np.fft.fft(bursts, axis=1) * ref_spec[None, :], axis=1)
    kept = np.ascontiguousarray(corr.T[: length // 2, :])
    return RangeSlowTimeMatrix(
        values=kept,
        n_sections=n_sections,
        burst_s=length * frame.chip_s,
    )


def doppler_dft(rst: RangeSlowTimeMatrix, window: str = "none") -> RangeDopplerMap:
    """Slow-time spectrum of every range row, center-shifted.

    window "none" (default) keeps the map exactly invertible; "hann" is
    available for presentation but blocks doppler_idft.
    """
    n = rst.n_bursts
    if window == "none":
        x = rst.values
    elif window == "hann":
        x = rst.values * np.hanning(n)[None, :]
    else:
        raise ValueError(f"unknown window {window!r}")
    spec = np.fft.fftshift(np.fft.ifft(x, axis=1) * n, axes=1)
    return RangeDopplerMap(
        values=spec,
        n_sections=rst.n_sections,
        burst_s=rst.burst_s,
        window=window,
    )


def doppler_idft(rdm: RangeDopplerMap) -> RangeSlowTimeMatrix:
    """Exact inverse of doppler_dft for unwindowed maps.

    Raises WindowedMapError when the map was windowed: dividing the taper
    back out would blow up the edge bursts, so the inverse is refused
    rather than silently wrong.
    """
    if rdm.window != "none":
        raise WindowedMapError(f"cannot invert a {rdm.window!r}-windowed map")
    x = np.fft.fft(np.fft.ifftshift(rdm.values, axes=1), axis=1) / rdm.n_doppler_bins
    return RangeSlowTimeMatrix(
        values=x,
        n_sections=rdm.n_sections,
        burst_s=rdm.burst_s,
    )


def noise_floor(rdm: RangeDopplerMap, exclusion: list | tuple = ()) -> float:
    """Median cell power over non-excluded range rows, in dB re map peak.

    exclusion lists (range_bin, radius) pairs; every row within radius of
    a listed bin is dropped before taking the median.  The median (not the
    mean) keeps isolated leftover peaks from biasing the floor.  Raises
    OverExcludedError when less than 25% of cells survive.
    """
    power = np.abs(rdm.values) ** 2
    keep = np.ones(rdm.n_range_bins, dtype=bool)
    for bin_idx, radius in exclusion:
        lo = max(0, int(bin_idx) - int(radius))
        hi = min(rdm.n_range_bins, int(bin_idx) + int(radius) + 1)
        keep[lo:hi] = False
    surviving = power[keep, :]
    if surviving.size < 0.25 * power.size:
        raise OverExcludedError(
            f"exclusions leave {surviving.size} of {power.size} cells"
        )
    peak = float(np.max(power))
    return float(_power_db(float(np.median(surviving)), peak))


def ridge_power(rdm: RangeDopplerMap, range_bin: int) -> float:
    """Mean power along one range row, in dB re map peak.

    The row's own strongest Doppler bin and its two neighbors are excluded
    so the metric reads the spread-out ridge, not the target peak sitting
    on it.
    """
    if not 0 <= range_bin < rdm.n_range_bins:
        raise BadBinError(f"range bin {range_bin} outside 0..{rdm.n_range_bins - 1}")
    power = np.abs(rdm.values) ** 2
    row = power[range_bin, :]
    peak_idx = int(np.argmax(row))
    keep = np.ones(row.size, dtype=bool)
    keep[max(0, peak_idx - 1) : min(row.size, peak_idx + 2)] = False
    rest = row[keep]
    if rest.size == 0:
        return DB_FLOOR
    return float(_power_db(float(np.mean(rest)), float(np.max(power))))


def _matrix_values(obj) -> np.ndarray:
    if isinstance(obj, (RangeSlowTimeMatrix, RangeDopplerMap)):
        return obj.values
    return np.asarray(obj, dtype=np.complex128)


def save_matrix_csv(matrix, path) -> None:
    """Write cell magnitudes in dB re the matrix peak, one range row per line."""
    values = _matrix_values(matrix)
    power = np.abs(values) ** 2
    db = _power_db(power, float(np.max(power)))
    try:
        with open(path, "w") as fh:
            for row in db:
                fh.write(",".join(f"{v:.6f}" for v in row) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write matrix CSV {path}: {exc}") from exc


def save_matrix_binary(matrix, path) -> None:
    """Write complex cells: "PMCWMAT1 <rows> <cols>" then LE float64 pairs.

    Values are interleaved (re, im), row-major, exactly as stored, so the
    dump round-trips bit-for-bit.
    """
    values = _matrix_values(matrix)
    rows, cols = values.shape
    inter = np.empty(2 * values.size, dtype="<f8")
    inter[0::2] = values.real.ravel()
    inter[1::2] = values.imag.ravel()
    try:
        with open(path, "wb") as fh:
            fh.write(f"{MATRIX_MAGIC} {rows} {cols}\n".encode("ascii"))
            fh.write(inter.tobytes())
    except OSError as exc:
        raise IoError(f"cannot write matrix dump {path}: {exc}") from exc


def load_matrix_binary(path) -> np.ndarray:
    """Read a complex matrix written by save_matrix_binary."""
    try:
        with open(path, "rb") as fh:
            header = fh.readline().decode("ascii").split()
            body = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise IoError(f"cannot read matrix dump {path}: {exc}") from exc
    if len(header) != 3 or header[0] != MATRIX_MAGIC:
        raise IoError(f"{path}: not a {MATRIX_MAGIC} file")
    rows, cols = int(header[1]), int(header[2])
    inter = np.frombuffer(body, dtype="<f8")
    if inter.size != 2 * rows * cols:
        raise IoError(f"{path}: expected {rows}x{cols} cells")
    return (inter[0::2] + 1j * inter[1::2]).reshape(rows, cols)


def save_heatmap(
    rdm: RangeDopplerMap,
    path,
    vmin_db: float = -80.0,
    vmax_db: float = 0.0,
    title: str | None = None,
) -> None:
    """Render a range/Doppler map as a PNG heatmap.

    Color is cell magnitude in dB re the map peak, clamped to
    [vmin_db, vmax_db] on the fixed 'viridis' colormap; range bins run
    bottom-to-top, the Doppler axis is labeled in kHz.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    power = np.abs(rdm.values) ** 2
    db = np.clip(_power_db(power, float(np.max(power))), vmin_db, vmax_db)
    freqs_khz = rdm.doppler_freqs_hz() / 1e3
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    img = ax.imshow(
        db,
        origin="lower",
        aspect="auto",
        cmap="viridis",
        vmin=vmin_db,
        vmax=vmax_db,
        extent=(freqs_khz[0], freqs_khz[-1], 0, rdm.n_range_bins),
        interpolation="nearest",
    )
    ax.set_xlabel("Doppler (kHz)")
    ax.set_ylabel("range bin")
    if title:
        ax.set_title(title)
    fig.colorbar(img, ax=ax, label="dB re peak")
    fig.tight_layout()
    try:
        fig.savefig(path, dpi=110)
    except OSError as exc:
        raise IoError(f"cannot write heatmap {path}: {exc}") from exc
    finally:
        plt.close(fig)

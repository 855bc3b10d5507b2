"""LOS-referenced slow-time phase-noise compensation.

Radars in the network run separate PLLs, so paths that cross between two
radars (bi-static and LOS) carry the *difference* of two uncorrelated
phase-noise trajectories.  After range processing that difference shows up
as a common burst-to-burst phase on every row of the remote radar's range
section, smearing a Doppler ridge across the section's target rows.

The LOS path is the clean probe of that common phase: it has zero Doppler
and a known bin, so the per-burst angle of the LOS row *is* the composite
oscillator phase.  Multiplying the whole remote section by exp(-j*xi[n])
removes it.  What survives on a bi-static row is only the part of the
phase noise that decorrelates over the delay difference between that path
and the LOS path: each spectral line of amplitude alpha_k comes back
attenuated to alpha_k * 2*|sin(pi*f_k*(tau_bi - tau_los))|, the same
range-correlation form that protects a mono-static radar over tau_mono.

Processing order: correlate -> extract -> compensate -> Doppler transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsp import RangeSlowTimeMatrix
from .errors import (
    BadBinError,
    EmptySectionError,
    IoError,
    LengthMismatchError,
    LOSNotFoundError,
)

__all__ = [
    "PnVector",
    "locate_los_bin",
    "extract_pn_vector",
    "apply_compensation",
    "predicted_attenuation",
    "mono_range_correlation_factor",
    "save_pn_vector_csv",
    "save_attenuation_csv",
]

# A row qualifies as the LOS peak only when its mean power is within
# 40 dB of the strongest cell in the matrix; below that there is no
# usable LOS reference.
LOS_DETECTION_GATE = 1e-4

# Compensation (and mono range correlation) hold their closed forms in the
# regime where f * |delay| stays below this bound.
EFFECTIVE_LIMIT = 1.0 / 6.0


@dataclass
class PnVector:
    """Per-burst composite oscillator phase lifted from the LOS row.

    xi          radians in (-pi, pi], one entry per burst
    source_bin  range bin the vector was extracted from
    """

    xi: np.ndarray
    source_bin: int

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=np.float64)
        if self.xi.ndim != 1:
            raise LengthMismatchError("xi must be a 1-D vector")


def locate_los_bin(rst: RangeSlowTimeMatrix, section: int) -> int:
    """Direct-path range bin of a remote section.

    The direct path from the remote transmitter is strictly shorter than
    any transmitter-target-receiver bounce, so the LOS is the EARLIEST
    detected return in that transmitter's section, not necessarily the
    strongest one (a close bi-static target can out-power it).  A row
    counts as detected when its slow-time mean power is within 40 dB of
    the strongest cell in the matrix and it is a local maximum along
    range inside the section; the local-max test rejects the leakage
    skirt a strong peak spreads over neighboring bins, which can itself
    poke above the gate.

    Raises LOSNotFoundError when nothing in the section passes the gate,
    which means no direct path was actually received.
    """
    rows = rst.section_slice(section)
    if rows.stop <= rows.start:
        raise EmptySectionError(f"section {section} has no range bins")
    power = np.abs(rst.values) ** 2
    mean_rows = np.mean(power[rows, :], axis=1)
    peak = float(np.max(power))
    gate = LOS_DETECTION_GATE * peak
    higher_left = np.empty(mean_rows.size, dtype=np.float64)
    higher_right = np.empty(mean_rows.size, dtype=np.float64)
    higher_left[0] = -np.inf
    higher_left[1:] = mean_rows[:-1]
    higher_right[-1] = -np.inf
    higher_right[:-1] = mean_rows[1:]
    detected = (
        (mean_rows >= gate)
        & (mean_rows >= higher_left)
        & (mean_rows >= higher_right)
    )
    if peak <= 0.0 or not np.any(detected):
        raise LOSNotFoundError(
            f"no row in section {section} passes the detection gate"
        )
    return rows.start + int(np.argmax(detected))


def extract_pn_vector(rst: RangeSlowTimeMatrix, los_bin: int) -> PnVector:
    """Per-burst angle of the LOS row."""
    if not 0 <= los_bin < rst.n_range_bins:
        raise BadBinError(f"LOS bin {los_bin} outside 0..{rst.n_range_bins - 1}")
    return PnVector(xi=np.angle(rst.values[los_bin, :]), source_bin=los_bin)


def apply_compensation(
    rst: RangeSlowTimeMatrix,
    pn: PnVector,
    section: int,
) -> RangeSlowTimeMatrix:
    """Rotate one section's rows by exp(-j*xi[n]); other sections untouched.

    Returns a new matrix.  The receiving radar's own section is left alone:
    its paths share one PLL, so their phase noise is already range-
    correlated and the LOS reference does not apply to them.
    """
    if pn.xi.size != rst.n_bursts:
        raise LengthMismatchError(
            f"xi has {pn.xi.size} entries for {rst.n_bursts} bursts"
        )
    rows = rst.section_slice(section)
    out = rst.values.copy()
    out[rows, :] = out[rows, :] * np.exp(-1j * pn.xi)[None, :]
    return RangeSlowTimeMatrix(
        values=out,
        n_sections=rst.n_sections,
        burst_s=rst.burst_s,
    )


def _attenuation(freqs_hz: np.ndarray, delay_s: float):
    f = np.asarray(freqs_hz, dtype=np.float64)
    factors = 2.0 * np.abs(np.sin(np.pi * f * delay_s))
    effective = f * abs(delay_s) <= EFFECTIVE_LIMIT
    return factors, effective


def predicted_attenuation(
    freqs_hz: np.ndarray,
    delay_diff_s: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Residual per-line factor after LOS compensation.

    For a spectral line at f_k, the compensated bi-static row retains
    amplitude alpha_k * 2*|sin(pi * f_k * (tau_bi - tau_los))| summed over
    the +/- sideband pair (that pair is where the factor 2 comes from).
    The second array flags lines inside the small-argument regime
    f_k * |delay| <= 1/6 where compensation actually attenuates.
    """
    return _attenuation(freqs_hz, delay_diff_s)


def mono_range_correlation_factor(
    freqs_hz: np.ndarray,
    delay_mono_s: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Self-correlation factor for a shared-PLL (mono-static) path.

    Same 2*|sin(pi*f*tau)| form: a mono return at delay tau_mono only sees
    the part of its own oscillator noise that decorrelates over tau_mono.
    """
    return _attenuation(freqs_hz, delay_mono_s)


def save_pn_vector_csv(pn: PnVector, path) -> None:
    """Write the extracted phase vector as 'n,xi_radians' lines."""
    try:
        with open(path, "w") as fh:
            fh.write("n,xi_radians\n")
            for n, v in enumerate(pn.xi):
                fh.write(f"{n},{float(v)!r}\n")
    except OSError as exc:
        raise IoError(f"cannot write PN vector {path}: {exc}") from exc


def save_attenuation_csv(
    freqs_hz: np.ndarray,
    delay_s: float,
    path,
) -> None:
    """Write the predicted attenuation curve as 'f_hz,factor_linear,effective'."""
    factors, effective = _attenuation(np.asarray(freqs_hz, dtype=np.float64), delay_s)
    try:
        with open(path, "w") as fh:
            fh.write("f_hz,factor_linear,effective\n")
            for f, fac, eff in zip(np.asarray(freqs_hz, dtype=np.float64), factors, effective):
                fh.write(f"{float(f)!r},{float(fac)!r},{int(eff)}\n")
    except OSError as exc:
        raise IoError(f"cannot write attenuation curve {path}: {exc}") from exc

"""Baseband transmit and receive chains.

The ADC runs at the chip rate, so a frame of N bursts of an L-chip code is
exactly N*L complex samples, sample i taken at t_i = i * chip_s.  Each
receiver sees the coherent sum over its propagation paths of

    amp * tx_stream[(i - d) mod L] * exp(-j*2*pi*f_D*t_i)
        * exp(j * (phi_tx(t_i - tau) - phi_rx(t_i)))

where d = floor(tau / chip_s) quantizes the code delay to whole chips while
the oscillator terms keep the exact continuous delay tau: the sub-chip part
of the envelope delay is a fixed phase absorbed into calibration, but the
phase-noise difference depends on tau with full precision, and that
dependence is exactly what range correlation and LOS compensation live on.
Transmission is continuous-wave, so the delayed code stream wraps
periodically across burst boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CodeSequence
from .errors import IoError, LengthMismatchError, PnDurationTooShortError
from .phasenoise import evaluate_grid, modulation
from .scene import Scenario, enumerate_paths

__all__ = [
    "BasebandFrame",
    "tx_baseband",
    "synthesize_rx",
    "save_raw_frame",
    "load_raw_frame",
]

RAW_MAGIC = "PMCWRAW1"


@dataclass
class BasebandFrame:
    """One coherent processing interval of chip-rate complex samples.

    samples      complex baseband, length n_bursts * code_length
    rx_id        receiving node id (0 for a plain TX stream)
    code_length  chips per burst
    chip_s       chip duration in seconds
    carrier_hz   RF carrier the baseband is referred to
    """

    samples: np.ndarray
    rx_id: int
    code_length: int
    chip_s: float
    carrier_hz: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.ndim != 1:
            raise LengthMismatchError("frame samples must be 1-D")
        if self.samples.size % self.code_length != 0:
            raise LengthMismatchError(
                f"{self.samples.size} samples not a whole number of "
                f"{self.code_length}-chip bursts"
            )

    @property
    def n_bursts(self) -> int:
        return self.samples.size // self.code_length

    @property
    def sample_rate_hz(self) -> float:
        return 1.0 / self.chip_s


def tx_baseband(
    code: CodeSequence,
    shift: int,
    n_bursts: int,
    chip_s: float,
    carrier_hz: float,
) -> BasebandFrame:
    """Ideal transmit stream: the shifted code repeated for n_bursts."""
    chips = np.roll(code.chips, shift)
    return BasebandFrame(
        samples=np.tile(chips, n_bursts),
        rx_id=0,
        code_length=code.length,
        chip_s=chip_s,
        carrier_hz=carrier_hz,
    )


def synthesize_rx(scenario: Scenario, rx_id: int) -> BasebandFrame:
    """Received baseband frame at one node, summed over all paths.

    Phase noise enters as exp(j*(phi_tx(t - tau) - phi_rx(t))) per path,
    with phi evaluated through the exact line-sum model (no interpolation);
    scenario.pn_mode selects the exact or linearized oscillator factor.
    With phase noise disabled the oscillator factors are exactly 1.

    Raises PnDurationTooShortError when any participating PLL process was
    synthesized over less than the frame duration (its line grid would be
    too coarse to place one line per Doppler bin).
    """
    code_len = scenario.code_length
    n = scenario.n_bursts * code_len
    fs = 1.0 / scenario.chip_s
    paths = enumerate_paths(scenario, rx_id)
    rx = scenario.node(rx_id)

    if scenario.pn_enabled:
        involved = sorted({p.tx_id for p in paths} | {rx_id})
        for node_id in involved:
            pll = scenario.node(node_id).pll
            if pll is None:
                raise PnDurationTooShortError(
                    f"node {node_id} has no synthesized PLL process"
                )
            if pll.period_s < scenario.frame_s * (1.0 - 1e-9):
                raise PnDurationTooShortError(
                    f"node {node_id} PLL covers {pll.period_s:.3e} s, "
                    f"frame needs {scenario.frame_s:.3e} s"
                )
        phi_rx = evaluate_grid(rx.pll, n, fs)

    sample_idx = np.arange(n, dtype=np.int64)
    out = np.zeros(n, dtype=np.complex128)
    for path in paths:
        tx = scenario.node(path.tx_id)
        d = path.delay_bins(scenario.chip_s)
        chip_idx = np.mod(sample_idx - d - tx.code_shift, code_len)
        contrib = path.amplitude * scenario.code.chips[chip_idx]
        if path.doppler_hz != 0.0:
            contrib = contrib * np.exp(
                -2j * np.pi * path.doppler_hz * scenario.chip_s * sample_idx
            )
        if scenario.pn_enabled:
            phi_tx = evaluate_grid(tx.pll, n, fs, delay_s=path.delay_s)
            contrib = contrib * modulation(phi_tx - phi_rx, scenario.pn_mode)
        out += contrib

    return BasebandFrame(
        samples=out,
        rx_id=rx_id,
        code_length=code_len,
        chip_s=scenario.chip_s,
        carrier_hz=scenario.carrier_hz,
    )


def save_raw_frame(frame: BasebandFrame, path) -> None:
    """Dump a frame: one ASCII header line, then little-endian float64 pairs.

    Header: "PMCWRAW1 <n_bursts> <code_length> <chip_s> <carrier_hz>".
    Samples follow as interleaved (re, im) in range-then-burst order, i.e.
    exactly the in-memory sample order.
    """
    header = (
        f"{RAW_MAGIC} {frame.n_bursts} {frame.code_length} "
        f"{float(frame.chip_s)!r} {float(frame.carrier_hz)!r}\n"
    )
    inter = np.empty(2 * frame.samples.size, dtype="<f8")
    inter[0::2] = frame.samples.real
    inter[1::2] = frame.samples.imag
    try:
        with open(path, "wb") as fh:
            fh.write(header.encode("ascii"))
            fh.write(inter.tobytes())
    except OSError as exc:
        raise IoError(f"cannot write raw frame {path}: {exc}") from exc


def load_raw_frame(path, rx_id: int = 0) -> BasebandFrame:
    """Read a frame written by save_raw_frame."""
    try:
        with open(path, "rb") as fh:
            header = fh.readline().decode("ascii").split()
            body = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise IoError(f"cannot read raw frame {path}: {exc}") from exc
    if len(header) != 5 or header[0] != RAW_MAGIC:
        raise IoError(f"{path}: not a {RAW_MAGIC} file")
    n_bursts, code_len = int(header[1]), int(header[2])
    chip_s, carrier_hz = float(header[3]), float(header[4])
    inter = np.frombuffer(body, dtype="<f8")
    if inter.size != 2 * n_bursts * code_len:
        raise IoError(
            f"{path}: expected {n_bursts * code_len} complex samples, "
            f"found {inter.size // 2}"
        )
    samples = inter[0::2] + 1j * inter[1::2]
    return BasebandFrame(
        samples=samples,
        rx_id=rx_id,
        code_length=code_len,
        chip_s=chip_s,
        carrier_hz=carrier_hz,
    )

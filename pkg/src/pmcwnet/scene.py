"""Radar network geometry, propagation paths, and link budgets.

A scenario is a set of radar nodes (co-calibrated, sharing one chip clock
and frame trigger, each with its own PLL) plus point targets in a 2-D plane.
Every receiver sees three kinds of paths:

* mono-static:  its own transmission scattered back by a target,
* bi-static:    another radar's transmission scattered by a target,
* line-of-sight: another radar's transmission arriving directly.

Path delays are kept in seconds at full precision; quantization to range
bins happens only at the signal-synthesis and range-processing stages.
Received powers follow the standard mono-static, bi-static, and free-space
link equations, and path amplitudes are the linear-voltage equivalents of
those powers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CodeSequence, radar_code_shift
from .errors import ZeroRangeError
from .phasenoise import PhaseNoiseProcess

__all__ = [
    "SPEED_OF_LIGHT",
    "AntennaPattern",
    "RadarNode",
    "Target",
    "PropagationPath",
    "Scenario",
    "enumerate_paths",
    "mono_rx_power",
    "los_rx_power",
    "bistatic_rx_power",
    "los_to_mono_ratio",
]

SPEED_OF_LIGHT = 299792458.0

_FOUR_PI_DB = 10.0 * np.log10(4.0 * np.pi)


@dataclass
class AntennaPattern:
    """Axially symmetric gain pattern, dB versus angle off boresight.

    Gain is interpolated linearly in dB between the given (angle, gain)
    points and clamped to the end values outside them.  Angles are in
    degrees, strictly increasing, starting at 0; gains must be
    non-increasing away from boresight.
    """

    angles_deg: np.ndarray
    gains_db: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.angles_deg, dtype=np.float64)
        g = np.asarray(self.gains_db, dtype=np.float64)
        if a.ndim != 1 or a.size < 2 or g.shape != a.shape:
            raise ValueError("pattern needs at least 2 (angle, gain) points")
        if a[0] != 0.0:
            raise ValueError("pattern must start at 0 degrees (boresight)")
        if np.any(np.diff(a) <= 0.0) or a[-1] > 180.0:
            raise ValueError("pattern angles must increase strictly, at most 180")
        if np.any(np.diff(g) > 0.0):
            raise ValueError("pattern gain may not increase away from boresight")
        self.angles_deg = a
        self.gains_db = g

    @classmethod
    def two_point(cls, boresight_db: float, broadside_db: float) -> "AntennaPattern":
        """Minimal pattern pinned at 0 and 90 degrees."""
        return cls(
            angles_deg=np.array([0.0, 90.0]),
            gains_db=np.array([boresight_db, broadside_db]),
        )

    def gain_db(self, angle_deg: float) -> float:
        return float(np.interp(abs(angle_deg), self.angles_deg, self.gains_db))


@dataclass
class RadarNode:
    """One radar in the network.

    node_id       1-based index, also the XOR tag for per-radar PN seeding
    position_m    2-D position
    boresight     2-D antenna pointing direction (normalized at init)
    tx_power_dbm  transmitted power
    antenna       gain pattern shared by TX and RX
    pll           phase-noise process of this radar's local PLL (set by the
                  experiment layer; None means not yet synthesized)
    code_shift    circular code shift in chips (assigned by the scenario)
    """

    node_id: int
    position_m: np.ndarray
    boresight: np.ndarray
    tx_power_dbm: float
    antenna: AntennaPattern
    pll: PhaseNoiseProcess | None = None
    code_shift: int = 0

    def __post_init__(self):
        if self.node_id < 1:
            raise ValueError("node ids are 1-based")
        self.position_m = np.asarray(self.position_m, dtype=np.float64).reshape(2)
        b = np.asarray(self.boresight, dtype=np.float64).reshape(2)
        norm = float(np.hypot(b[0], b[1]))
        if norm == 0.0:
            raise ValueError("boresight vector must be nonzero")
        self.boresight = b / norm


@dataclass
class Target:
    """Point scatterer with constant velocity and RCS."""

    position_m: np.ndarray
    velocity_mps: np.ndarray
    rcs_dbsm: float

    def __post_init__(self):
        self.position_m = np.asarray(self.position_m, dtype=np.float64).reshape(2)
        self.velocity_mps = np.asarray(self.velocity_mps, dtype=np.float64).reshape(2)


@dataclass
class PropagationPath:
    """One resolved propagation path into a given receiver.

    kind          "mono", "bistatic", or "los"
    tx_id/rx_id   transmitting and receiving node ids
    delay_s       exact propagation delay (not bin-quantized)
    doppler_hz    Doppler shift; positive for increasing path length
    rx_power_dbm  received power from the link budget
    amplitude     linear-voltage amplitude, 10**(rx_power_dbm/20)
    aod_deg       departure angle off the TX boresight
    aoa_deg       arrival angle off the RX boresight
    """

    kind: str
    tx_id: int
    rx_id: int
    delay_s: float
    doppler_hz: float
    rx_power_dbm: float
    amplitude: float
    aod_deg: float
    aoa_deg: float

    def delay_bins(self, chip_s: float) -> int:
        return int(np.floor(self.delay_s / chip_s))


@dataclass
class Scenario:
    """Complete description of one networked-radar experiment.

    All nodes share the chip clock, the frame trigger, and the same base
    code; radar m transmits the code circularly shifted by its assigned
    MIMO shift.  Node ids must be exactly 1..M.  The code length must be
    divisible by 2*M so those shifts are whole chips.
    """

    nodes: list
    targets: list
    code: CodeSequence
    chip_s: float
    carrier_hz: float
    n_bursts: int
    pn_enabled: bool = True
    pn_mode: str = "exact"

    def __post_init__(self):
        if self.chip_s <= 0.0 or self.carrier_hz <= 0.0:
            raise ValueError("chip duration and carrier must be positive")
        if self.n_bursts < 1:
            raise ValueError("need at least one burst")
        if self.pn_mode not in ("exact", "linearized"):
            raise ValueError(f"unknown pn mode {self.pn_mode!r}")
        ids = sorted(node.node_id for node in self.nodes)
        if ids != list(range(1, len(self.nodes) + 1)):
            raise ValueError(f"node ids must be exactly 1..M, got {ids}")
        # Raises IndivisibleCodeError when 2M does not divide the length.
        for node in self.nodes:
            node.code_shift = radar_code_shift(
                node.node_id, len(self.nodes), self.code.length
            )

    @property
    def n_radars(self) -> int:
        return len(self.nodes)

    @property
    def code_length(self) -> int:
        return self.code.length

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def burst_s(self) -> float:
        return self.code.length * self.chip_s

    @property
    def frame_s(self) -> float:
        return self.n_bursts * self.burst_s

    @property
    def section_bins(self) -> int:
        """Width of each radar's slice of the usable range axis."""
        return self.code.length // (2 * self.n_radars)

    def node(self, node_id: int) -> RadarNode:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise KeyError(f"no node with id {node_id}")


def _angle_between_deg(a: np.ndarray, b: np.ndarray) -> float:
    an = a / np.hypot(a[0], a[1])
    bn = b / np.hypot(b[0], b[1])
    return float(np.degrees(np.arccos(np.clip(np.dot(an, bn), -1.0, 1.0))))


def mono_rx_power(
    tx_power_dbm: float,
    gain_db: float,
    wavelength_m: float,
    rcs_dbsm: float,
    range_m: float,
) -> float:
    """Received power for a round trip to one scatterer and back (dBm).

    Standard mono-static link equation with the same gain on TX and RX:
    P * G^2 * lambda^2 * sigma / ((4*pi)^3 * R^4).
    """
    if range_m <= 0.0:
        raise ZeroRangeError(f"mono range must be positive, got {range_m}")
    return (
        tx_power_dbm
        + 2.0 * gain_db
        + 20.0 * np.log10(wavelength_m)
        + rcs_dbsm
        - 3.0 * _FOUR_PI_DB
        - 40.0 * np.log10(range_m)
    )


def los_rx_power(
    tx_power_dbm: float,
    gain_tx_db: float,
    gain_rx_db: float,
    wavelength_m: float,
    range_m: float,
) -> float:
    """Received power over a direct free-space path (dBm).

    Friis equation: P * G_tx * G_rx * (lambda / (4*pi*R))^2.
    """
    if range_m <= 0.0:
        raise ZeroRangeError(f"LOS range must be positive, got {range_m}")
    return (
        tx_power_dbm
        + gain_tx_db
        + gain_rx_db
        + 20.0 * np.log10(wavelength_m)
        - 20.0 * np.log10(4.0 * np.pi * range_m)
    )


def bistatic_rx_power(
    tx_power_dbm: float,
    gain_tx_db: float,
    gain_rx_db: float,
    wavelength_m: float,
    rcs_dbsm: float,
    range_tx_m: float,
    range_rx_m: float,
) -> float:
    """Received power for a TX -> scatterer -> other RX path (dBm).

    Bi-static link equation:
    P * G_tx * G_rx * lambda^2 * sigma / ((4*pi)^3 * R_tx^2 * R_rx^2).
    """
    if range_tx_m <= 0.0 or range_rx_m <= 0.0:
        raise ZeroRangeError(
            f"bistatic legs must be positive, got {range_tx_m}, {range_rx_m}"
        )
    return (
        tx_power_dbm
        + gain_tx_db
        + gain_rx_db
        + 20.0 * np.log10(wavelength_m)
        + rcs_dbsm
        - 3.0 * _FOUR_PI_DB
        - 20.0 * np.log10(range_tx_m)
        - 20.0 * np.log10(range_rx_m)
    )


def los_to_mono_ratio(
    gain_broadside_db: float,
    gain_boresight_db: float,
    range_mono_m: float,
    range_los_m: float,
    rcs_dbsm: float,
) -> float:
    """LOS received power relative to the mono-static return, in dB.

    Closed form of los_rx_power minus mono_rx_power for a network whose
    LOS path sits at broadside (90 degrees) while the target sits on
    boresight; transmit power and wavelength cancel:

        10*log10( 4*pi * g90^2 * R_mono^4 / (g_t^2 * R_los^2 * rcs) )
    """
    if range_mono_m <= 0.0 or range_los_m <= 0.0:
        raise ZeroRangeError("ranges must be positive")
    return (
        _FOUR_PI_DB
        + 2.0 * gain_broadside_db
        - 2.0 * gain_boresight_db
        + 40.0 * np.log10(range_mono_m)
        - 20.0 * np.log10(range_los_m)
        - rcs_dbsm
    )


def enumerate_paths(scenario: Scenario, rx_id: int) -> list:
    """All propagation paths arriving at one receiver, in a fixed order.

    Order: mono-static returns (target order), then bi-static returns
    (target-major, then transmitter id), then LOS paths (transmitter id).
    Doppler uses the rate of change of total path length; radar nodes are
    static, so LOS paths carry zero Doppler.
    """
    rx = scenario.node(rx_id)
    lam = scenario.wavelength_m
    paths = []

    for tgt in scenario.targets:
        vec = tgt.position_m - rx.position_m
        rng = float(np.hypot(vec[0], vec[1]))
        if rng == 0.0:
            raise ZeroRangeError("target coincides with a radar node")
        unit = vec / rng
        radial_v = float(np.dot(tgt.velocity_mps, unit))
        angle = _angle_between_deg(rx.boresight, unit)
        power = mono_rx_power(
            rx.tx_power_dbm, rx.antenna.gain_db(angle), lam, tgt.rcs_dbsm, rng
        )
        paths.append(
            PropagationPath(
                kind="mono",
                tx_id=rx_id,
                rx_id=rx_id,
                delay_s=2.0 * rng / SPEED_OF_LIGHT,
                doppler_hz=2.0 * radial_v / lam,
                rx_power_dbm=power,
                amplitude=10.0 ** (power / 20.0),
                aod_deg=angle,
                aoa_deg=angle,
            )
        )

    others = sorted(
        (n for n in scenario.nodes if n.node_id != rx_id), key=lambda n: n.node_id
    )
    for tgt in scenario.targets:
        for tx in others:
            v1 = tgt.position_m - tx.position_m
            r1 = float(np.hypot(v1[0], v1[1]))
            v2 = tgt.position_m - rx.position_m
            r2 = float(np.hypot(v2[0], v2[1]))
            if r1 == 0.0 or r2 == 0.0:
                raise ZeroRangeError("target coincides with a radar node")
            u1, u2 = v1 / r1, v2 / r2
            rate = float(np.dot(tgt.velocity_mps, u1) + np.dot(tgt.velocity_mps, u2))
            aod = _angle_between_deg(tx.boresight, u1)
            aoa = _angle_between_deg(rx.boresight, u2)
            power = bistatic_rx_power(
                tx.tx_power_dbm,
                tx.antenna.gain_db(aod),
                rx.antenna.gain_db(aoa),
                lam,
                tgt.rcs_dbsm,
                r1,
                r2,
            )
            paths.append(
                PropagationPath(
                    kind="bistatic",
                    tx_id=tx.node_id,
                    rx_id=rx_id,
                    delay_s=(r1 + r2) / SPEED_OF_LIGHT,
                    doppler_hz=rate / lam,
                    rx_power_dbm=power,
                    amplitude=10.0 ** (power / 20.0),
                    aod_deg=aod,
                    aoa_deg=aoa,
                )
            )

    for tx in others:
        vec = rx.position_m - tx.position_m
        rng = float(np.hypot(vec[0], vec[1]))
        if rng == 0.0:
            raise ZeroRangeError("two radar nodes share a position")
        unit = vec / rng
        aod = _angle_between_deg(tx.boresight, unit)
        aoa = _angle_between_deg(rx.boresight, -unit)
        power = los_rx_power(
            tx.tx_power_dbm,
            tx.antenna.gain_db(aod),
            rx.antenna.gain_db(aoa),
            lam,
            rng,
        )
        paths.append(
            PropagationPath(
                kind="los",
                tx_id=tx.node_id,
                rx_id=rx_id,
                delay_s=rng / SPEED_OF_LIGHT,
                doppler_hz=0.0,
                rx_power_dbm=power,
                amplitude=10.0 ** (power / 20.0),
                aod_deg=aod,
                aoa_deg=aoa,
            )
        )

    return paths

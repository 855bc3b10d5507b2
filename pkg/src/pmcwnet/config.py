"""Experiment configuration: flat key = value files with [section] headers.

Sections:

    [waveform]   carrier_hz, chip_s, code_length, n_bursts, code_family
                 (p3 | file), code_file
    [pn]         enabled, mode (exact | linearized), mask_file, f_max_hz,
                 seed (master seed; per-radar seeds are master XOR node id)
    [node]       repeated once per radar: id, position_m, boresight,
                 tx_power_dbm, and either antenna_deg_db (angle:gain list)
                 or gain_boresight_db + gain_broadside_db
    [target]     repeated: position_m, velocity_mps, rcs_dbsm
    [pipeline]   compensation, window (none | hann)
    [outputs]    dir, heatmaps, raw_frames

Numeric unit conversions (dB and dBm values to linear, file paths to
absolute) happen here and only here; everything downstream works with the
parsed values.  Relative paths resolve against the config file's directory
so a run does not depend on the caller's working directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codes import CodeSequence, generate_p3, load_sequence
from .errors import ConfigError, IndivisibleCodeError, IoError
from .phasenoise import PsdMask, default_pll_mask, load_mask
from .scene import (
    SPEED_OF_LIGHT,
    AntennaPattern,
    RadarNode,
    Scenario,
    Target,
)

__all__ = [
    "Diagnostic",
    "ExperimentConfig",
    "parse_config",
    "validate",
]

_SEED_MASK = (1 << 64) - 1


@dataclass
class Diagnostic:
    """One validation finding: severity is 'error', 'warning', or 'info'."""

    severity: str
    code: str
    message: str

    def __str__(self):
        return f"{self.severity.upper()} {self.code}: {self.message}"


@dataclass
class ExperimentConfig:
    """Parsed experiment description; no domain objects constructed yet."""

    carrier_hz: float
    chip_s: float
    code_length: int
    n_bursts: int
    code_family: str
    code_file: str | None
    pn_enabled: bool
    pn_mode: str
    mask_file: str | None
    f_max_hz: float
    master_seed: int
    nodes: list
    targets: list
    compensation: bool
    window: str
    out_dir: str
    heatmaps: bool
    raw_frames: bool

    def node_seed(self, node_id: int) -> int:
        """Per-radar PN seed: the master seed XOR the node id, as u64."""
        return (self.master_seed ^ node_id) & _SEED_MASK

    @property
    def frame_s(self) -> float:
        return self.n_bursts * self.code_length * self.chip_s

    def load_psd_mask(self) -> PsdMask:
        if self.mask_file is None:
            return default_pll_mask()
        return load_mask(self.mask_file)

    def build_code(self) -> CodeSequence:
        if self.code_family == "p3":
            return generate_p3(self.code_length)
        if self.code_family == "file":
            if not self.code_file:
                raise ConfigError("code_family = file needs code_file")
            seq = load_sequence(self.code_file)
            if seq.length != self.code_length:
                raise ConfigError(
                    f"code_file has {seq.length} chips, config says {self.code_length}"
                )
            return seq
        raise ConfigError(f"unknown code_family {self.code_family!r}")

    def build_scenario(self) -> Scenario:
        """Construct the domain scenario; raises on inconsistent geometry."""
        nodes = []
        for entry in self.nodes:
            nodes.append(
                RadarNode(
                    node_id=entry["id"],
                    position_m=np.array(entry["position_m"]),
                    boresight=np.array(entry["boresight"]),
                    tx_power_dbm=entry["tx_power_dbm"],
                    antenna=AntennaPattern(
                        angles_deg=np.array([a for a, _ in entry["antenna"]]),
                        gains_db=np.array([g for _, g in entry["antenna"]]),
                    ),
                )
            )
        targets = [
            Target(
                position_m=np.array(t["position_m"]),
                velocity_mps=np.array(t["velocity_mps"]),
                rcs_dbsm=t["rcs_dbsm"],
            )
            for t in self.targets
        ]
        return Scenario(
            nodes=nodes,
            targets=targets,
            code=self.build_code(),
            chip_s=self.chip_s,
            carrier_hz=self.carrier_hz,
            n_bursts=self.n_bursts,
            pn_enabled=self.pn_enabled,
            pn_mode=self.pn_mode,
        )


def _read_sections(path: Path) -> list:
    """Raw parse: ordered list of (section_name, {key: value_string})."""
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    sections = []
    current = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = (line[1:-1].strip().lower(), {})
            sections.append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        if current is None:
            raise ConfigError(f"{path}:{lineno}: key before any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in current[1]:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        current[1][key.lower()] = value
    return sections


def _as_float(table: dict, key: str, where: str, default=None) -> float:
    if key not in table:
        if default is None:
            raise ConfigError(f"missing {key} in [{where}]")
        return default
    try:
        return float(table[key])
    except ValueError as exc:
        raise ConfigError(f"bad number for {key} in [{where}]: {table[key]!r}") from exc


def _as_int(table: dict, key: str, where: str, default=None) -> int:
    if key not in table:
        if default is None:
            raise ConfigError(f"missing {key} in [{where}]")
        return default
    try:
        return int(table[key], 0)
    except ValueError as exc:
        raise ConfigError(f"bad integer for {key} in [{where}]: {table[key]!r}") from exc


def _as_bool(table: dict, key: str, where: str, default: bool) -> bool:
    if key not in table:
        return default
    text = table[key].lower()
    if text in ("true", "yes", "1", "on"):
        return True
    if text in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"bad boolean for {key} in [{where}]: {table[key]!r}")


def _as_pair(table: dict, key: str, where: str, default=None) -> tuple:
    if key not in table:
        if default is None:
            raise ConfigError(f"missing {key} in [{where}]")
        return default
    parts = table[key].split(",")
    if len(parts) != 2:
        raise ConfigError(f"{key} in [{where}] must be 'x, y'")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ConfigError(f"bad pair for {key} in [{where}]") from exc


def _parse_antenna(table: dict, where: str) -> list:
    if "antenna_deg_db" in table:
        points = []
        for item in table["antenna_deg_db"].split(","):
            if ":" not in item:
                raise ConfigError(
                    f"antenna_deg_db in [{where}] needs 'angle:gain' entries"
                )
            a_s, g_s = item.split(":", 1)
            try:
                points.append((float(a_s), float(g_s)))
            except ValueError as exc:
                raise ConfigError(f"bad antenna point in [{where}]: {item!r}") from exc
        return points
    g0 = _as_float(table, "gain_boresight_db", where)
    g90 = _as_float(table, "gain_broadside_db", where)
    return [(0.0, g0), (90.0, g90)]


def parse_config(path) -> ExperimentConfig:
    """Parse a config file into an ExperimentConfig.

    Raises ConfigError for structural problems; geometric or numeric
    inconsistencies that deserve diagnostics instead are left for
    validate().
    """
    path = Path(path)
    base = path.parent
    sections = _read_sections(path)

    waveform, pn, pipeline, outputs = {}, {}, {}, {}
    nodes, targets = [], []
    for name, table in sections:
        # [node3] is a node section whose implied id is 3; an explicit
        # id key inside wins.  Same suffix rule for [target2].
        stem = name.rstrip("0123456789")
        suffix = name[len(stem) :]
        if name == "waveform":
            waveform = table
        elif name == "pn":
            pn = table
        elif name == "pipeline":
            pipeline = table
        elif name == "outputs":
            outputs = table
        elif stem == "node":
            if suffix and "id" not in table:
                table["id"] = suffix
            nodes.append(table)
        elif stem == "target":
            targets.append(table)
        else:
            raise ConfigError(f"{path}: unknown section [{name}]")
    if not waveform:
        raise ConfigError(f"{path}: missing [waveform] section")
    if not nodes:
        raise ConfigError(f"{path}: no [node] sections")

    code_family = waveform.get("code_family", "p3").lower()
    code_file = waveform.get("code_file")
    if code_file is not None:
        code_file = str((base / code_file).resolve())
    code_length = _as_int(waveform, "code_length", "waveform", default=-1)
    if code_length < 0:
        if code_family != "file":
            raise ConfigError("missing code_length in [waveform]")
        code_length = load_sequence(code_file).length

    mask_file = pn.get("mask_file")
    if mask_file is not None:
        mask_file = str((base / mask_file).resolve())

    node_specs = []
    for idx, table in enumerate(nodes, start=1):
        where = f"node #{idx}"
        node_specs.append(
            {
                "id": _as_int(table, "id", where),
                "position_m": _as_pair(table, "position_m", where),
                "boresight": _as_pair(table, "boresight", where, default=(0.0, 1.0)),
                "tx_power_dbm": _as_float(table, "tx_power_dbm", where),
                "antenna": _parse_antenna(table, where),
            }
        )
    target_specs = []
    for idx, table in enumerate(targets, start=1):
        where = f"target #{idx}"
        target_specs.append(
            {
                "position_m": _as_pair(table, "position_m", where),
                "velocity_mps": _as_pair(table, "velocity_mps", where, default=(0.0, 0.0)),
                "rcs_dbsm": _as_float(table, "rcs_dbsm", where),
            }
        )

    window = pipeline.get("window", "none").lower()
    if window not in ("none", "hann"):
        raise ConfigError(f"window must be none or hann, got {window!r}")
    pn_mode = pn.get("mode", "exact").lower()
    if pn_mode not in ("exact", "linearized"):
        raise ConfigError(f"pn mode must be exact or linearized, got {pn_mode!r}")

    out_dir = outputs.get("dir", "out")
    if not Path(out_dir).is_absolute():
        out_dir = str(base / out_dir)

    return ExperimentConfig(
        carrier_hz=_as_float(waveform, "carrier_hz", "waveform"),
        chip_s=_as_float(waveform, "chip_s", "waveform"),
        code_length=code_length,
        n_bursts=_as_int(waveform, "n_bursts", "waveform"),
        code_family=code_family,
        code_file=code_file,
        pn_enabled=_as_bool(pn, "enabled", "pn", default=True),
        pn_mode=pn_mode,
        mask_file=mask_file,
        f_max_hz=_as_float(pn, "f_max_hz", "pn", default=1e8),
        master_seed=_as_int(pn, "master_seed", "pn", default=_as_int(pn, "seed", "pn", default=0)),
        nodes=node_specs,
        targets=target_specs,
        compensation=_as_bool(pipeline, "compensation", "pipeline", default=True),
        window=window,
        out_dir=out_dir,
        heatmaps=_as_bool(outputs, "heatmaps", "outputs", default=True),
        raw_frames=_as_bool(outputs, "raw_frames", "outputs", default=False),
    )


def validate(config: ExperimentConfig) -> list:
    """Consistency diagnostics for a parsed config.

    Returns Diagnostic entries; 'error' severity means run() would refuse
    the config.  Checks cover MIMO divisibility, node id numbering, the
    phase-noise line budget, antenna monotonicity, and whether every
    propagation path's range bin lands inside the transmitting radar's
    section of the range axis.
    """
    diags = []
    n_radars = len(config.nodes)

    ids = sorted(entry["id"] for entry in config.nodes)
    if ids != list(range(1, n_radars + 1)):
        diags.append(
            Diagnostic("error", "node-ids", f"node ids must be 1..{n_radars}, got {ids}")
        )

    if config.code_length % (2 * n_radars) != 0:
        diags.append(
            Diagnostic(
                "error",
                "mimo-divisibility",
                f"code length {config.code_length} not divisible by 2*{n_radars}; "
                "per-radar code shifts would not be whole chips",
            )
        )
    section_bins = config.code_length // (2 * n_radars)

    if config.chip_s <= 0 or config.n_bursts < 1 or config.carrier_hz <= 0:
        diags.append(
            Diagnostic("error", "waveform", "chip_s, n_bursts, carrier_hz must be positive")
        )
        return diags

    delta_f = 1.0 / config.frame_s
    n_lines = int(np.floor(config.f_max_hz / delta_f))
    if config.pn_enabled and n_lines < 1:
        diags.append(
            Diagnostic(
                "error",
                "pn-band",
                f"f_max_hz {config.f_max_hz} leaves no line above delta_f {delta_f:.3f} Hz",
            )
        )
    elif config.pn_enabled:
        diags.append(
            Diagnostic(
                "info",
                "pn-lines",
                f"phase noise synthesized over the frame ({config.frame_s:.6e} s): "
                f"{n_lines} lines at {delta_f:.3f} Hz spacing",
            )
        )
        try:
            mask = config.load_psd_mask()
            diags.append(
                Diagnostic(
                    "info",
                    "pn-mask",
                    f"mask covers {mask.freqs_hz[0]:.3e}..{mask.freqs_hz[-1]:.3e} Hz "
                    f"({mask.freqs_hz.size} points, clamped outside)",
                )
            )
        except (IoError, ValueError) as exc:
            diags.append(Diagnostic("error", "pn-mask", str(exc)))

    for entry in config.nodes:
        gains = [g for _, g in entry["antenna"]]
        if any(b > a for a, b in zip(gains, gains[1:])):
            diags.append(
                Diagnostic(
                    "error",
                    "antenna",
                    f"node {entry['id']}: antenna gain increases away from boresight",
                )
            )

    if not config.targets and config.compensation and n_radars >= 2:
        diags.append(
            Diagnostic(
                "warning",
                "no-targets",
                "no targets configured; LOS paths still exist, so compensation "
                "remains meaningful",
            )
        )

    # Geometric section check: every path's range bin must stay inside the
    # transmitting radar's 1/(2M)-period slice, or it aliases into another
    # radar's section.
    if section_bins > 0 and not any(d.severity == "error" for d in diags):
        for rx in config.nodes:
            rx_pos = np.array(rx["position_m"])
            for t_idx, tgt in enumerate(config.targets):
                t_pos = np.array(tgt["position_m"])
                r_rx = float(np.hypot(*(t_pos - rx_pos)))
                for tx in config.nodes:
                    tx_pos = np.array(tx["position_m"])
                    r_tx = float(np.hypot(*(t_pos - tx_pos)))
                    delay = (r_tx + r_rx) / SPEED_OF_LIGHT
                    d_bin = int(np.floor(delay / config.chip_s))
                    kind = "mono" if tx["id"] == rx["id"] else "bistatic"
                    if d_bin >= section_bins:
                        diags.append(
                            Diagnostic(
                                "warning",
                                "section-alias",
                                f"{kind} path node {tx['id']} -> target {t_idx + 1} -> "
                                f"node {rx['id']} at bin {d_bin} exceeds the "
                                f"{section_bins}-bin section; it will alias",
                            )
                        )
            for tx in config.nodes:
                if tx["id"] == rx["id"]:
                    continue
                r = float(np.hypot(*(np.array(tx["position_m"]) - rx_pos)))
                if r == 0.0:
                    diags.append(
                        Diagnostic(
                            "error",
                            "geometry",
                            f"nodes {tx['id']} and {rx['id']} share a position",
                        )
                    )
                    continue
                d_bin = int(np.floor(r / SPEED_OF_LIGHT / config.chip_s))
                if d_bin >= section_bins:
                    diags.append(
                        Diagnostic(
                            "warning",
                            "section-alias",
                            f"LOS path node {tx['id']} -> node {rx['id']} at bin "
                            f"{d_bin} exceeds the {section_bins}-bin section",
                        )
                    )

    return diags

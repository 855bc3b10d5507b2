"""End-to-end experiment runner.

One run: build the scenario, synthesize each radar's PLL realization from
the master seed (per-radar seed = master XOR node id), synthesize every
receiver's frame, range-process, extract and apply LOS compensation on the
remote sections, Doppler-process pre- and post-compensation, measure
floors and ridges, and write the artifact files.

Every numeric artifact (CSV, binary dumps, metrics JSON) is a pure
function of the config and master seed; nothing in the pipeline depends
on thread count or wall clock, so reruns are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .compensation import (
    apply_compensation,
    extract_pn_vector,
    locate_los_bin,
    save_attenuation_csv,
    save_pn_vector_csv,
)
from .config import ExperimentConfig, validate
from .dsp import (
    doppler_dft,
    noise_floor,
    periodic_correlate,
    ridge_power,
    save_heatmap,
    save_matrix_binary,
    save_matrix_csv,
)
from .errors import ConfigError
from .phasenoise import synthesize
from .scene import Scenario, enumerate_paths, los_to_mono_ratio
from .txrx import save_raw_frame, synthesize_rx

__all__ = ["RunResult", "run", "prepare_scenario"]

# Rows this close to an expected peak are excluded from floor estimates.
_PEAK_EXCLUSION_RADIUS = 2


@dataclass
class RunResult:
    """Everything a caller needs after a run."""

    out_dir: Path
    metrics: dict
    files: list


def prepare_scenario(config: ExperimentConfig) -> Scenario:
    """Build the scenario and attach per-radar PLL realizations."""
    diags = validate(config)
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        raise ConfigError("; ".join(str(d) for d in errors))
    scenario = config.build_scenario()
    if config.pn_enabled:
        mask = config.load_psd_mask()
        for node in scenario.nodes:
            node.pll = synthesize(
                mask,
                total_duration_s=scenario.frame_s,
                f_max_hz=config.f_max_hz,
                seed=config.node_seed(node.node_id),
            )
    return scenario


def _expected_bins(scenario: Scenario, rx_id: int) -> list:
    """Predicted peak bin for each path into rx: delay bin + TX code shift."""
    rows = []
    for path in enumerate_paths(scenario, rx_id):
        shift = scenario.node(path.tx_id).code_shift
        rows.append(
            {
                "kind": path.kind,
                "tx_id": path.tx_id,
                "delay_s": path.delay_s,
                "doppler_hz": path.doppler_hz,
                "rx_power_dbm": path.rx_power_dbm,
                "expected_bin": path.delay_bins(scenario.chip_s) + shift,
            }
        )
    return rows


def _headline_link_budget(scenario: Scenario, rx_id: int) -> dict | None:
    """LOS-vs-mono ratio for the first target and first remote radar."""
    rx = scenario.node(rx_id)
    others = [n for n in scenario.nodes if n.node_id != rx_id]
    if not others or not scenario.targets:
        return None
    tx = min(others, key=lambda n: n.node_id)
    tgt = scenario.targets[0]
    r_mono = float(np.hypot(*(tgt.position_m - rx.position_m)))
    r_los = float(np.hypot(*(tx.position_m - rx.position_m)))
    ratio = los_to_mono_ratio(
        gain_broadside_db=rx.antenna.gain_db(90.0),
        gain_boresight_db=rx.antenna.gain_db(0.0),
        range_mono_m=r_mono,
        range_los_m=r_los,
        rcs_dbsm=tgt.rcs_dbsm,
    )
    return {
        "los_to_mono_db": ratio,
        "range_mono_m": r_mono,
        "range_los_m": r_los,
        "remote_tx_id": tx.node_id,
    }


def _write_range_profile(rdm, path) -> None:
    """Zero-Doppler slice, peak-normalized dB, as 'bin,db' lines."""
    col = np.abs(rdm.values[:, rdm.center_bin])
    peak = float(np.max(col))
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(col / peak) if peak > 0 else np.full(col.size, -300.0)
    db = np.maximum(db, -300.0)
    with open(path, "w") as fh:
        fh.write("bin,db\n")
        for idx, v in enumerate(db):
            fh.write(f"{idx},{v:.6f}\n")


def run(config: ExperimentConfig) -> RunResult:
    """Execute one experiment and write its artifacts.

    Per receiving radar: range profile CSV (zero-Doppler slice), pre- and
    post-compensation range/Doppler maps (CSV of dB magnitudes plus binary
    complex dumps, heatmaps optional), the extracted per-burst phase
    vector, and a predicted residual-attenuation curve.  A metrics.json
    summarizes located LOS bins, noise floors, ridge powers, and the
    headline link budget.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scenario = prepare_scenario(config)
    files = []
    metrics = {
        "master_seed": config.master_seed,
        "pn_enabled": config.pn_enabled,
        "pn_mode": config.pn_mode,
        "compensation": config.compensation,
        "window": config.window,
        "n_radars": scenario.n_radars,
        "code_length": scenario.code_length,
        "n_bursts": scenario.n_bursts,
        "section_bins": scenario.section_bins,
        "radars": {},
    }

    for rx in sorted(scenario.nodes, key=lambda n: n.node_id):
        rx_id = rx.node_id
        tag = f"radar{rx_id}"
        frame = synthesize_rx(scenario, rx_id)
        if config.raw_frames:
            raw_path = out_dir / f"{tag}_raw.bin"
            save_raw_frame(frame, raw_path)
            files.append(raw_path)

        rst = periodic_correlate(frame, scenario.code, n_sections=scenario.n_radars)
        pre_map = doppler_dft(rst, window=config.window)

        expected = _expected_bins(scenario, rx_id)
        exclusions = [(row["expected_bin"], _PEAK_EXCLUSION_RADIUS) for row in expected]

        radar_metrics = {
            "paths": expected,
            "los": {},
            "noise_floor_db_pre": noise_floor(pre_map, exclusions),
        }

        post_rst = rst
        remote_sections = [
            n.node_id for n in scenario.nodes if n.node_id != rx_id
        ]
        if config.compensation:
            for section in sorted(remote_sections):
                los_bin = locate_los_bin(post_rst, section)
                pn_vec = extract_pn_vector(post_rst, los_bin)
                post_rst = apply_compensation(post_rst, pn_vec, section)
                pn_path = out_dir / f"{tag}_pn_vector_sec{section}.csv"
                save_pn_vector_csv(pn_vec, pn_path)
                files.append(pn_path)
                expected_los = [
                    row["expected_bin"]
                    for row in expected
                    if row["kind"] == "los" and row["tx_id"] == section
                ]
                radar_metrics["los"][str(section)] = {
                    "located_bin": los_bin,
                    "expected_bin": expected_los[0] if expected_los else None,
                }
        post_map = doppler_dft(post_rst, window=config.window)
        radar_metrics["noise_floor_db_post"] = noise_floor(post_map, exclusions)

        ridge = {}
        for row in expected:
            if row["kind"] == "mono":
                continue
            bin_idx = row["expected_bin"]
            if not 0 <= bin_idx < pre_map.n_range_bins:
                continue
            key = f"{row['kind']}_tx{row['tx_id']}_bin{bin_idx}"
            ridge[key] = {
                "pre_db": ridge_power(pre_map, bin_idx),
                "post_db": ridge_power(post_map, bin_idx),
            }
        radar_metrics["ridge"] = ridge

        budget = _headline_link_budget(scenario, rx_id)
        if budget is not None:
            radar_metrics["link_budget"] = budget
            # Predicted residual attenuation for the first bistatic path
            # relative to the LOS reference, over the positive Doppler axis.
            bi = [r for r in expected if r["kind"] == "bistatic"]
            los = [r for r in expected if r["kind"] == "los"]
            if bi and los and config.compensation:
                delay_diff = bi[0]["delay_s"] - los[0]["delay_s"]
                freqs = pre_map.doppler_freqs_hz()
                pos = freqs[freqs > 0]
                att_path = out_dir / f"{tag}_attenuation.csv"
                save_attenuation_csv(pos, delay_diff, att_path)
                files.append(att_path)

        profile_path = out_dir / f"{tag}_range_profile.csv"
        _write_range_profile(pre_map, profile_path)
        files.append(profile_path)
        for label, mat in (("pre", pre_map), ("post", post_map)):
            csv_path = out_dir / f"{tag}_rd_{label}.csv"
            bin_path = out_dir / f"{tag}_rd_{label}.bin"
            save_matrix_csv(mat, csv_path)
            save_matrix_binary(mat, bin_path)
            files += [csv_path, bin_path]
            if config.heatmaps:
                png_path = out_dir / f"{tag}_rd_{label}.png"
                save_heatmap(
                    mat,
                    png_path,
                    title=f"radar {rx_id} range/Doppler ({label}-compensation)",
                )
                files.append(png_path)

        metrics["radars"][str(rx_id)] = radar_metrics

    metrics_path = out_dir / "metrics.json"
    metrics_path.write_text(json.dumps(metrics, indent=2, sort_keys=True) + "\n")
    files.append(metrics_path)
    return RunResult(out_dir=out_dir, metrics=metrics, files=files)

"""End-to-end run: synchronization -> photon overlap -> swapping -> CHSH."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .chsh import ChshResult, chsh_analytic, run_chsh_experiment
from .laser_sync import CrossCorrelation, cross_correlate, locking_range, steady_state_jitter
from .scenario import Scenario
from .swapping import BsmSpec, SwapOutcome, coincidence_curve, fit_visibility, swap
from .wavepacket import WavepacketParams, coherence_time, mode_overlap

RECORD_FILE = "run_record.json"
CURVE_FILE = "coincidence_curve.csv"
TRACE_FILE = "sync_trace.csv"
XCORR_FILE = "cross_correlation.csv"
COUNTS_FILE = "chsh_counts.csv"


@dataclass
class RunRecord:
    scenario: dict[str, Any]
    seed: int
    derived: dict[str, Any] = field(default_factory=dict)
    swap: dict[str, Any] | None = None
    chsh: dict[str, Any] | None = None
    version: str = __version__
    # Bulk data written to CSV, not to the record file.
    sync_trace: np.ndarray | None = field(default=None, repr=False)
    cross_correlation: CrossCorrelation | None = field(default=None, repr=False)
    curve: tuple[np.ndarray, np.ndarray, np.ndarray] | None = field(default=None, repr=False)
    counts: list[tuple] | None = field(default=None, repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "tool": "swapsim",
            "version": self.version,
            "seed": self.seed,
            "scenario": self.scenario,
            "derived": self.derived,
            "swap": self.swap,
            "chsh": self.chsh,
        }


def stage_seeds(seed: int) -> tuple[int, int]:
    """Independent integer seeds for the sync and CHSH stages."""
    sync_seed, chsh_seed = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    return int(sync_seed), int(chsh_seed)


def run_sync(s: Scenario, record: RunRecord):
    sync_seed, _ = stage_seeds(s.seed)
    jitter, trace = steady_state_jitter(s.coupling, s.sync_noise_rms_fs, s.sync_rounds,
                                        seed=sync_seed, cavities=s.cavities, return_trace=True)
    xc0 = cross_correlate(s.pump1, s.pump2, 0.0)
    xc = cross_correlate(s.pump1, s.pump2, jitter)
    record.sync_trace = trace
    record.cross_correlation = xc
    record.derived.update(
        locking_range_fs=locking_range(s.coupling),
        steady_state_jitter_fs=jitter,
        xcorr_fwhm_no_jitter_fs=xc0.fwhm_fs,
        xcorr_fwhm_fs=xc.fwhm_fs,
    )
    return jitter


def run_overlap(s: Scenario, record: RunRecord, jitter_fs: float) -> float:
    """Photon 2 arrives ``jitter_fs`` late relative to photon 3."""
    tau_c = coherence_time(s.filter)
    if s.jitter_override_fs is not None:
        jitter_fs = s.jitter_override_fs
    p2 = WavepacketParams(tau_c, jitter_fs, s.pump1_fwhm_fs)
    p3 = WavepacketParams(tau_c, 0.0, s.pump2_fwhm_fs)
    res = mode_overlap(p2, p3)
    overlap = res.overlap if s.overlap_override is None else s.overlap_override
    record.derived.update(
        coherence_time_fs=tau_c,
        jitter_used_fs=jitter_fs,
        overlap_timing=res.timing,
        overlap_pump=res.pump,
        overlap_model=res.overlap,
        overlap=overlap,
    )
    return overlap


def run_swap(s: Scenario, record: RunRecord, overlap: float) -> SwapOutcome:
    out = swap(s.sources, BsmSpec(overlap))
    grid = np.asarray(s.theta4_grid())
    par, perp = coincidence_curve(out.rho_14, s.photon1_basis_deg, grid)
    vis, phase, offset = fit_visibility(grid, par, perp)
    record.curve = (grid, par, perp)
    record.swap = out.summary()
    record.swap.update(curve_fit_visibility=vis, curve_fit_phase_deg=phase,
                       curve_fit_offset=offset)
    return out


def run_chsh(s: Scenario, record: RunRecord, rho_14: np.ndarray) -> ChshResult:
    _, chsh_seed = stage_seeds(s.seed)
    res = run_chsh_experiment(rho_14, s.chsh_settings, s.events_per_setting, chsh_seed,
                              s.accidental_fraction)
    record.counts = [(e.counts.theta_a, e.counts.theta_b, e.counts.n_pp, e.counts.n_pr,
                      e.counts.n_rp, e.counts.n_rr) for e in res.estimates]
    record.chsh = {
        "s_value": res.s_value,
        "s_sigma": res.s_sigma,
        "sigma_violation": res.sigma_violation,
        "s_analytic": chsh_analytic(rho_14, s.chsh_settings),
        "e_values": [e.e_value for e in res.estimates],
        "e_sigmas": [e.sigma for e in res.estimates],
    }
    return res


def run_pipeline(s: Scenario) -> RunRecord:
    """Full chain; raises NotLockedError / NullOutcomeError from the stages."""
    record = RunRecord(scenario=s.to_dict(), seed=s.seed)
    jitter = run_sync(s, record)
    overlap = run_overlap(s, record, jitter)
    out = run_swap(s, record, overlap)
    run_chsh(s, record, out.rho_14)
    return record


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(f"{x:.17g}") if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def emit_outputs(record: RunRecord, out_dir: str | Path) -> list[Path]:
    """Write the run record and whichever CSV tables the record carries."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = []
        path = out / RECORD_FILE
        path.write_text(json.dumps(_jsonable(record.to_dict()), indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        written.append(path)
        if record.curve is not None:
            path = out / CURVE_FILE
            _write_csv(path, ["theta4_deg", "p_parallel", "p_perp"], zip(*record.curve))
            written.append(path)
        if record.sync_trace is not None:
            path = out / TRACE_FILE
            _write_csv(path, ["round", "dt_fs"], enumerate(record.sync_trace))
            written.append(path)
        if record.cross_correlation is not None:
            xc = record.cross_correlation
            path = out / XCORR_FILE
            _write_csv(path, ["delay_fs", "signal"], zip(xc.delays_fs, xc.signal))
            written.append(path)
        if record.counts is not None:
            path = out / COUNTS_FILE
            _write_csv(path, ["theta_a", "theta_b", "n_pp", "n_pr", "n_rp", "n_rr"], record.counts)
            written.append(path)
    except OSError as exc:
        raise OSError(f"failed writing outputs to {out}: {exc}") from exc
    return written

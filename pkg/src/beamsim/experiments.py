"""Seeded Monte Carlo sweeps over the four built-in simulation scenarios.

Each sweep cell (one grid point, one run) draws a single snapshot block that
every selected beamformer sees, so comparisons are paired.  Per-run streams
are derived from the master seed and the run index, and per-cell streams add
the grid index, so results are reproducible regardless of execution order.
The per-run steering distortion is drawn once and reused across grid points.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .array_model import (
    ScenarioConfig,
    apply_phase_distortion,
    generate_snapshots,
    sample_covariance,
    steering_vector,
)
from .beamformer import evaluate_beamformer
from .estimators import (
    Certificate,
    EstimationError,
    solve_alg1,
    solve_alg2,
    solve_alg3,
    solve_alg4,
    solve_kvh,
)
from .sectors import (
    SectorModel,
    UncertaintyModel,
    build_ellipsoid_model,
    build_sector_model,
    build_similarity_model,
)

__all__ = [
    "BEAMFORMER_LABELS",
    "SweepSpec",
    "ResultRow",
    "ExampleSetup",
    "builtin_example",
    "run_sweep",
    "write_results",
    "read_results",
    "summarize",
    "format_summary",
    "write_summary",
]

BEAMFORMER_LABELS = {
    "kvh": "KVH Beamformer",
    "new1": "New Beamformer 1",
    "new2": "New Beamformer 2",
    "new3": "New Beamformer 3",
    "new4": "New Beamformer 4",
}

DEFAULT_SNR_GRID = tuple(float(s) for s in range(-10, 61, 5))
DEFAULT_RUNS = 50
DEFAULT_SEED = 20240601


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep: scenario, grids, run count, beamformers, seed, output."""

    example_id: int
    snr_grid: tuple[float, ...]
    snapshot_grid: tuple[int, ...]
    runs: int
    beamformers: tuple[str, ...]
    master_seed: int = DEFAULT_SEED
    output_path: str | None = None
    record_timing: bool = False

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("need at least one run")
        if not self.snr_grid or not self.snapshot_grid:
            raise ValueError("grids must be nonempty")
        unknown = set(self.beamformers) - set(BEAMFORMER_LABELS)
        if unknown:
            raise ValueError(f"unknown beamformers: {sorted(unknown)}")


@dataclass(frozen=True)
class ResultRow:
    example_id: int
    beamformer: str
    snr_db: float
    snapshots: int
    run_index: int
    output_sinr_db: float
    output_power_db: float
    certificate: str
    branch: str
    sdp_value: float
    solve_ms: float


RESULT_FIELDS = tuple(f.name for f in fields(ResultRow))


@dataclass(frozen=True)
class ExampleSetup:
    """Scenario plus the constraint models each beamformer consumes."""

    config: ScenarioConfig
    sector_model: SectorModel
    similarity: UncertaintyModel
    ellipsoid: UncertaintyModel | None
    defaults: SweepSpec


def builtin_example(example_id: int) -> ExampleSetup:
    """Canned scenarios 1-4: look-direction mismatch, accumulated phase
    distortion, ellipsoid uncertainty, and a far-from-broadside sector."""
    n = 12
    eta = 0.5
    eps_similarity = 0.3 * n
    eps_ellipsoid = 0.45 * n
    if example_id == 1:
        cfg = ScenarioConfig(
            n_elements=n, sector=(0.0, 10.0), presumed_direction=5.0, actual_direction=7.0,
            interferers=((-15.0, 30.0), (15.0, 30.0)), snr_db=30.0, snapshots=100,
        )
        sector_model = build_sector_model(cfg.sector, n, center_direction=cfg.presumed_direction)
        similarity = build_similarity_model(sector_model, eta, eta, eps_similarity)
        ellipsoid = None
        bfs = ("kvh", "new1", "new2")
    elif example_id == 2:
        cfg = ScenarioConfig(
            n_elements=n, sector=(0.0, 10.0), presumed_direction=9.0, actual_direction=9.0,
            interferers=((-15.0, 30.0), (15.0, 30.0)), snr_db=30.0, snapshots=100,
            phase_distortion_std=0.01,
        )
        sector_model = build_sector_model(cfg.sector, n, center_direction=cfg.presumed_direction)
        similarity = build_similarity_model(sector_model, eta, eta, eps_similarity)
        ellipsoid = None
        bfs = ("kvh", "new1", "new2")
    elif example_id == 3:
        cfg = ScenarioConfig(
            n_elements=n, sector=(0.0, 10.0), presumed_direction=9.0, actual_direction=9.0,
            interferers=((-15.0, 30.0), (15.0, 30.0)), snr_db=30.0, snapshots=100,
            phase_distortion_std=0.01,
        )
        sector_model = build_sector_model(cfg.sector, n, center_direction=cfg.presumed_direction)
        ellipsoid = build_ellipsoid_model(cfg.sector, n, l=100, epsilon=eps_ellipsoid,
                                          eta1=eta, eta2=eta)
        # every constrained beamformer centers on the sampled sector mean here
        similarity = UncertaintyModel(eta1=eta, eta2=eta, epsilon=eps_similarity,
                                      q=np.eye(n, dtype=complex), a0=ellipsoid.a0)
        bfs = ("kvh", "new1", "new2", "new3", "new4")
    elif example_id == 4:
        cfg = ScenarioConfig(
            n_elements=n, sector=(50.0, 60.0), presumed_direction=55.0, actual_direction=55.0,
            interferers=((25.0, 30.0), (85.0, 30.0)), snr_db=30.0, snapshots=100,
            phase_distortion_std=0.02,
        )
        sector_model = build_sector_model(cfg.sector, n, center_direction=cfg.presumed_direction)
        similarity = build_similarity_model(sector_model, eta, eta, eps_similarity)
        ellipsoid = build_ellipsoid_model(cfg.sector, n, l=64, epsilon=eps_ellipsoid,
                                          eta1=eta, eta2=eta)
        bfs = ("kvh", "new1", "new2", "new3", "new4")
    else:
        raise ValueError(f"unknown example id {example_id}")
    defaults = SweepSpec(
        example_id=example_id,
        snr_grid=DEFAULT_SNR_GRID,
        snapshot_grid=(cfg.snapshots,),
        runs=DEFAULT_RUNS,
        beamformers=bfs,
    )
    return ExampleSetup(cfg, sector_model, similarity, ellipsoid, defaults)


def _estimator_call(name: str, setup: ExampleSetup):
    if name == "kvh":
        return lambda r: solve_kvh(r, setup.sector_model)
    if name == "new1":
        return lambda r: solve_alg1(r, setup.sector_model, setup.similarity)
    if name == "new2":
        return lambda r: solve_alg3(r, setup.sector_model, setup.similarity)
    if setup.ellipsoid is None:
        raise ValueError(f"beamformer '{name}' needs an ellipsoid model (examples 3 and 4)")
    if name == "new3":
        return lambda r: solve_alg2(r, setup.sector_model, setup.ellipsoid)
    if name == "new4":
        return lambda r: solve_alg4(r, setup.sector_model, setup.ellipsoid)
    raise ValueError(f"unknown beamformer '{name}'")


def run_sweep(spec: SweepSpec, setup: ExampleSetup | None = None) -> list[ResultRow]:
    """Run the sweep and return one row per (beamformer, grid point, run).

    Estimator failures become rows with certificate ``failed`` and NaN scores;
    the sweep always continues.  When ``spec.output_path`` is set the rows are
    also written there as CSV.
    """
    if setup is None:
        setup = builtin_example(spec.example_id)
    estimators = {name: _estimator_call(name, setup) for name in spec.beamformers}
    cfg = setup.config
    n = cfg.n_elements
    base_steering = steering_vector(cfg.actual_direction, n)
    grid = [(snr, t) for snr in spec.snr_grid for t in spec.snapshot_grid]

    rows: list[ResultRow] = []
    for run in range(spec.runs):
        run_rng = np.random.default_rng([spec.master_seed, run])
        a_true = apply_phase_distortion(base_steering, cfg.phase_distortion_std, run_rng)
        for grid_index, (snr_db, snapshots) in enumerate(grid):
            cell_cfg = cfg.with_updates(snr_db=snr_db, snapshots=snapshots)
            cell_rng = np.random.default_rng([spec.master_seed, run, grid_index])
            block = generate_snapshots(cell_cfg, cell_rng, true_steering=a_true)
            r_hat = sample_covariance(block.samples)
            if np.linalg.eigvalsh(r_hat)[0] <= 0:
                raise RuntimeError("sample covariance is singular; increase snapshots")
            for name in spec.beamformers:
                start = time.perf_counter()
                try:
                    est = estimators[name](r_hat)
                except EstimationError as exc:
                    est = None
                    failure_branch = type(exc).__name__
                elapsed_ms = (time.perf_counter() - start) * 1000.0
                solve_ms = elapsed_ms if spec.record_timing else 0.0
                if est is None or est.certificate == Certificate.FAILED or est.a_star is None:
                    rows.append(ResultRow(
                        spec.example_id, name, snr_db, snapshots, run,
                        float("nan"), float("nan"), Certificate.FAILED.value,
                        est.branch if est is not None else failure_branch,
                        est.sdp_value if est is not None else float("nan"), solve_ms,
                    ))
                    continue
                perf = evaluate_beamformer(
                    r_hat, est.a_star, block.true_steering, cell_cfg.signal_power,
                    block.true_interference_plus_noise_cov,
                )
                rows.append(ResultRow(
                    spec.example_id, name, snr_db, snapshots, run,
                    perf.output_sinr_db, perf.output_power_db,
                    est.certificate.value, est.branch, est.sdp_value, solve_ms,
                ))
    if spec.output_path:
        write_results(spec.output_path, rows)
    return rows


def write_results(path: str | Path, rows: list[ResultRow], sort_rows: bool = False) -> None:
    if sort_rows:
        rows = sorted(rows, key=lambda r: (r.beamformer, r.snr_db, r.snapshots, r.run_index))
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(RESULT_FIELDS)
        for row in rows:
            writer.writerow([
                row.example_id, row.beamformer, repr(float(row.snr_db)), row.snapshots,
                row.run_index, repr(float(row.output_sinr_db)), repr(float(row.output_power_db)),
                row.certificate, row.branch, repr(float(row.sdp_value)), repr(float(row.solve_ms)),
            ])


def read_results(path: str | Path) -> list[ResultRow]:
    """Parse a results CSV, reporting malformed rows with their line numbers."""
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != RESULT_FIELDS:
            raise ValueError(f"{path}: header does not match {RESULT_FIELDS}")
        for lineno, record in enumerate(reader, start=2):
            if len(record) != len(RESULT_FIELDS):
                raise ValueError(f"{path}:{lineno}: expected {len(RESULT_FIELDS)} columns")
            try:
                rows.append(ResultRow(
                    int(record[0]), record[1], float(record[2]), int(record[3]),
                    int(record[4]), float(record[5]), float(record[6]),
                    record[7], record[8], float(record[9]), float(record[10]),
                ))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return rows


@dataclass(frozen=True)
class SummaryRow:
    beamformer: str
    snr_db: float
    snapshots: int
    count: int
    failures: int
    mean_sinr_db: float
    std_sinr_db: float
    mean_power_db: float
    std_power_db: float


SUMMARY_FIELDS = tuple(f.name for f in fields(SummaryRow))


def summarize(rows: list[ResultRow]) -> list[SummaryRow]:
    """Per-(beamformer, grid point) mean and population std, in the dB domain.

    Failed rows count toward ``failures`` and are excluded from the averages.
    """
    groups: dict[tuple[str, float, int], list[ResultRow]] = {}
    order: list[tuple[str, float, int]] = []
    for row in rows:
        key = (row.beamformer, row.snr_db, row.snapshots)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    out = []
    for key in order:
        members = groups[key]
        good = [r for r in members if r.certificate != Certificate.FAILED.value
                and np.isfinite(r.output_sinr_db)]
        sinr = np.array([r.output_sinr_db for r in good])
        power = np.array([r.output_power_db for r in good])
        out.append(SummaryRow(
            beamformer=key[0], snr_db=key[1], snapshots=key[2],
            count=len(good), failures=len(members) - len(good),
            mean_sinr_db=float(sinr.mean()) if sinr.size else float("nan"),
            std_sinr_db=float(sinr.std()) if sinr.size else float("nan"),
            mean_power_db=float(power.mean()) if power.size else float("nan"),
            std_power_db=float(power.std()) if power.size else float("nan"),
        ))
    return out


def format_summary(summary: list[SummaryRow]) -> str:
    header = f"{'beamformer':<12}{'snr_db':>8}{'T':>6}{'runs':>6}{'fail':>6}" \
             f"{'mean_sinr':>12}{'std_sinr':>10}{'mean_pow':>12}{'std_pow':>10}"
    lines = [header]
    for s in summary:
        lines.append(
            f"{s.beamformer:<12}{s.snr_db:>8.1f}{s.snapshots:>6d}{s.count:>6d}{s.failures:>6d}"
            f"{s.mean_sinr_db:>12.4f}{s.std_sinr_db:>10.4f}"
            f"{s.mean_power_db:>12.4f}{s.std_power_db:>10.4f}"
        )
    return "\n".join(lines)


def write_summary(path: str | Path, summary: list[SummaryRow]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(SUMMARY_FIELDS)
        for s in summary:
            writer.writerow([
                s.beamformer, repr(float(s.snr_db)), s.snapshots, s.count, s.failures,
                repr(float(s.mean_sinr_db)), repr(float(s.std_sinr_db)),
                repr(float(s.mean_power_db)), repr(float(s.std_power_db)),
            ])

"""Monte Carlo experiment engine.

Four experiment kinds share one record schema: phase-transition sweeps
(noiseless success fraction vs sparsity), noisy recovery error curves,
constant-compute comparisons (the plain algorithm gets twice the iterations
so both arms spend the same number of gradient evaluations), and one-shot
threshold comparisons measuring how much closer to the signal a single
pruning step lands.

Every trial is a pure function of (spec, trial ordinal): the per-trial seed
is base_seed + ordinal, so results are identical no matter how many workers
run the sweep. Divergent trials are recorded as failures with an infinite
error; they never abort a sweep.
"""

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import linalg, recovery, sensing, thresholding

RESULTS_HEADER = (
    "trial", "seed", "s", "eta", "algorithm", "iterations", "grad_evals",
    "success", "rel_error", "threshold_ratio", "runtime_ms",
)

DEFAULT_GROUP_KEYS = ("s", "algorithm", "eta")

_STAT_COLUMNS = (
    "count",
    "success_mean", "success_std",
    "rel_error_mean", "rel_error_std",
    "threshold_ratio_mean", "threshold_ratio_std",
)


class ExperimentKind(str, Enum):
    PHASE_TRANSITION = "phase_transition"
    NOISY_ERROR = "noisy_error"
    CONSTANT_COMPUTE = "constant_compute"
    THRESHOLD_COMPARE = "threshold_compare"


@dataclass(frozen=True)
class ExperimentSpec:
    kind: ExperimentKind
    m: int = 128
    d: int = 256
    sparsity_grid: tuple[int, ...] = (10, 20, 30, 40, 50, 60)
    eta_grid: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0)
    trials_per_point: int = 100
    iters_iht: int = 1000
    iters_ilat: int = 1000
    snr_db: float | None = None
    base_seed: int = 0
    success_rel_tol: float = 1e-4

    def __post_init__(self):
        kind = ExperimentKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.m < 1 or self.d < 1:
            raise ValueError(f"dimensions must be positive, got m={self.m}, d={self.d}")
        sgrid = tuple(int(s) for s in self.sparsity_grid)
        egrid = tuple(float(e) for e in self.eta_grid)
        if not sgrid or not egrid:
            raise ValueError("sparsity_grid and eta_grid must be nonempty")
        for s in sgrid:
            if not (1 <= s <= self.d):
                raise ValueError(f"sparsity grid values must lie in [1, {self.d}], got {s}")
        for e in egrid:
            if not math.isfinite(e) or e < 0.0:
                raise ValueError(f"eta grid values must be finite and nonnegative, got {e}")
        object.__setattr__(self, "sparsity_grid", sgrid)
        object.__setattr__(self, "eta_grid", egrid)
        if self.trials_per_point < 1:
            raise ValueError(f"trials_per_point must be at least 1, got {self.trials_per_point}")
        if self.iters_iht < 1 or self.iters_ilat < 1:
            raise ValueError("iteration budgets must be at least 1")
        if kind is ExperimentKind.CONSTANT_COMPUTE and self.iters_iht != 2 * self.iters_ilat:
            raise ValueError(
                f"constant-compute runs need iters_iht = 2*iters_ilat, "
                f"got {self.iters_iht} and {self.iters_ilat}"
            )
        if kind is ExperimentKind.NOISY_ERROR:
            if self.snr_db is None:
                raise ValueError("noisy_error experiments require snr_db")
        elif self.snr_db is not None:
            raise ValueError(f"{kind.value} experiments are noiseless; leave snr_db unset")
        if self.snr_db is not None:
            snr = float(self.snr_db)
            if math.isnan(snr) or snr == -math.inf:
                raise ValueError(f"snr_db must be a real value or +inf, got {self.snr_db}")
            object.__setattr__(self, "snr_db", snr)
        tol = float(self.success_rel_tol)
        if not math.isfinite(tol) or tol <= 0.0:
            raise ValueError(f"success_rel_tol must be finite and positive, got {self.success_rel_tol}")
        object.__setattr__(self, "success_rel_tol", tol)
        object.__setattr__(self, "base_seed", int(self.base_seed))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "m": self.m,
            "d": self.d,
            "sparsity_grid": list(self.sparsity_grid),
            "eta_grid": list(self.eta_grid),
            "trials_per_point": self.trials_per_point,
            "iters_iht": self.iters_iht,
            "iters_ilat": self.iters_ilat,
            "snr_db": self.snr_db,
            "base_seed": self.base_seed,
            "success_rel_tol": self.success_rel_tol,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        fields = {k: data[k] for k in (
            "kind", "m", "d", "sparsity_grid", "eta_grid", "trials_per_point",
            "iters_iht", "iters_ilat", "snr_db", "base_seed", "success_rel_tol",
        ) if k in data}
        fields["sparsity_grid"] = tuple(fields.get("sparsity_grid", ()))
        fields["eta_grid"] = tuple(fields.get("eta_grid", ()))
        return cls(**fields)


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    seed: int
    s: int
    eta: float | None          # None for the plain/hard-threshold arm
    algorithm: str             # iht | ilat | hard | lat
    iterations: int
    gradient_evaluations: int
    success: bool
    rel_error: float
    threshold_ratio: float | None
    runtime_ms: float


@dataclass(frozen=True)
class _Task:
    kind: ExperimentKind
    m: int
    d: int
    s: int
    trial_index: int
    seed: int
    arms: tuple[tuple[str, float | None, int], ...]   # (algorithm, eta, max_iters)
    snr_db: float | None
    rel_tol: float


def _iterative_arms(spec: ExperimentSpec) -> tuple[tuple[str, float | None, int], ...]:
    arms = [("iht", None, spec.iters_iht)]
    arms.extend(("ilat", eta, spec.iters_ilat) for eta in spec.eta_grid)
    return tuple(arms)


def _tasks_for(spec: ExperimentSpec) -> list[_Task]:
    tasks = []
    ordinal = 0
    if spec.kind is ExperimentKind.THRESHOLD_COMPARE:
        arms = tuple([("hard", None, 0)] + [("lat", eta, 0) for eta in spec.eta_grid])
        for s in spec.sparsity_grid:
            for trial in range(spec.trials_per_point):
                tasks.append(_Task(spec.kind, spec.m, spec.d, s, trial,
                                   spec.base_seed + ordinal, arms, None, spec.success_rel_tol))
                ordinal += 1
        return tasks
    for s in spec.sparsity_grid:
        for arm in _iterative_arms(spec):
            for trial in range(spec.trials_per_point):
                tasks.append(_Task(spec.kind, spec.m, spec.d, s, trial,
                                   spec.base_seed + ordinal, (arm,), spec.snr_db,
                                   spec.success_rel_tol))
                ordinal += 1
    return tasks


def _run_iterative_task(task: _Task) -> list[TrialRecord]:
    algorithm, eta, max_iters = task.arms[0]
    problem = sensing.build_problem(task.m, task.d, task.s, task.seed, snr_db=task.snr_db)
    config = recovery.RecoveryConfig(
        algorithm=recovery.Algorithm(algorithm),
        sparsity=task.s,
        eta=0.0 if eta is None else eta,
        max_iters=max_iters,
    )
    start = time.perf_counter()
    result = recovery.recover(problem, config)
    elapsed_ms = (time.perf_counter() - start) * 1e3
    if result.diverged:
        rel = math.inf
    else:
        rel = recovery.relative_error(result.estimate, problem.ground_truth)
    return [TrialRecord(
        trial_index=task.trial_index,
        seed=task.seed,
        s=task.s,
        eta=eta,
        algorithm=algorithm,
        iterations=result.iterations_run,
        gradient_evaluations=result.gradient_evaluations,
        success=rel <= task.rel_tol,
        rel_error=rel,
        threshold_ratio=None,
        runtime_ms=elapsed_ms,
    )]


def _run_threshold_task(task: _Task) -> list[TrialRecord]:
    A = sensing.normalize_operator_norm(
        sensing.gaussian_matrix(task.m, task.d, sensing.VarianceMode.ONE_OVER_M, task.seed)
    )
    xstar = sensing.random_sparse_signal(task.d, task.s, task.seed)
    z = sensing.rng_for(task.seed, sensing._LANE_NOISE).standard_normal(task.d)
    y = linalg.matvec(A, xstar)
    base_dist = float(np.linalg.norm(z - xstar))
    truth_norm = float(np.linalg.norm(xstar))
    grad = None
    records = []
    for algorithm, eta, _ in task.arms:
        start = time.perf_counter()
        if algorithm == "hard":
            pruned, _support = thresholding.hard_threshold(z, task.s)
            grad_evals = 0
        else:
            if grad is None:
                grad = thresholding.cost_gradient(A, y, z)
            pruned, _support = thresholding.lat_threshold(z, A, y, task.s, eta, grad=grad)
            grad_evals = 1
        elapsed_ms = (time.perf_counter() - start) * 1e3
        dist = float(np.linalg.norm(pruned - xstar))
        if base_dist > 0.0:
            ratio = dist / base_dist
        else:
            ratio = 0.0 if dist == 0.0 else math.inf
        rel = dist / truth_norm
        records.append(TrialRecord(
            trial_index=task.trial_index,
            seed=task.seed,
            s=task.s,
            eta=eta,
            algorithm=algorithm,
            iterations=0,
            gradient_evaluations=grad_evals,
            success=rel <= task.rel_tol,
            rel_error=rel,
            threshold_ratio=ratio,
            runtime_ms=elapsed_ms,
        ))
    return records


def _execute_task(task: _Task) -> list[TrialRecord]:
    if task.kind is ExperimentKind.THRESHOLD_COMPARE:
        return _run_threshold_task(task)
    return _run_iterative_task(task)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list[TrialRecord]:
    """Run every trial of the sweep; record order is the task enumeration
    order regardless of worker count."""
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    tasks = _tasks_for(spec)
    if workers == 1:
        batches = map(_execute_task, tasks)
    else:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_execute_task, tasks, chunksize=chunk))
    return [record for batch in batches for record in batch]


def _require_kind(spec: ExperimentSpec, kind: ExperimentKind):
    if spec.kind is not kind:
        raise ValueError(f"spec kind is {spec.kind.value!r}, expected {kind.value!r}")


def run_phase_transition(spec: ExperimentSpec, workers: int = 1) -> list[TrialRecord]:
    _require_kind(spec, ExperimentKind.PHASE_TRANSITION)
    return run_experiment(spec, workers)


def run_noisy_error(spec: ExperimentSpec, workers: int = 1) -> list[TrialRecord]:
    _require_kind(spec, ExperimentKind.NOISY_ERROR)
    return run_experiment(spec, workers)


def run_constant_compute(spec: ExperimentSpec, workers: int = 1) -> list[TrialRecord]:
    _require_kind(spec, ExperimentKind.CONSTANT_COMPUTE)
    return run_experiment(spec, workers)


def run_threshold_compare(spec: ExperimentSpec, workers: int = 1) -> list[TrialRecord]:
    _require_kind(spec, ExperimentKind.THRESHOLD_COMPARE)
    return run_experiment(spec, workers)


# ---------------------------------------------------------------------------
# aggregation

def _mean_std(values: list[float]) -> tuple[float, float]:
    n = len(values)
    if any(math.isinf(v) for v in values):
        # divergence sentinel dominates; spread is undefined
        return math.inf, 0.0 if n == 1 else math.nan
    mean = math.fsum(values) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var) if var >= 0.0 else math.nan


def _group_sort_key(value):
    # None sorts before any concrete value within a field
    return (0, "") if value is None else (1, value)


def aggregate(records, group_keys=DEFAULT_GROUP_KEYS) -> list[dict]:
    """Per-group count, mean, and sample stddev of success, rel_error, and
    threshold_ratio. Rows come out sorted by the group key tuple. Exactly
    rounded accumulation makes the result independent of record order.
    """
    records = list(records)
    if not records:
        raise ValueError("cannot aggregate zero records")
    group_keys = tuple(group_keys)
    groups: dict[tuple, list[TrialRecord]] = {}
    for rec in records:
        key = tuple(getattr(rec, k) for k in group_keys)
        groups.setdefault(key, []).append(rec)
    rows = []
    for key in sorted(groups, key=lambda k: tuple(_group_sort_key(v) for v in k)):
        members = groups[key]
        row = dict(zip(group_keys, key))
        row["count"] = len(members)
        s_mean, s_std = _mean_std([1.0 if r.success else 0.0 for r in members])
        row["success_mean"], row["success_std"] = s_mean, s_std
        e_mean, e_std = _mean_std([r.rel_error for r in members])
        row["rel_error_mean"], row["rel_error_std"] = e_mean, e_std
        ratios = [r.threshold_ratio for r in members if r.threshold_ratio is not None]
        if ratios:
            r_mean, r_std = _mean_std(ratios)
        else:
            r_mean = r_std = None
        row["threshold_ratio_mean"], row["threshold_ratio_std"] = r_mean, r_std
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# persistence

def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _parse_optional_float(token: str) -> float | None:
    return None if token == "none" else float(token)


def write_results_csv(path, records) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        for r in records:
            writer.writerow([
                _fmt(r.trial_index), _fmt(r.seed), _fmt(r.s), _fmt(r.eta),
                r.algorithm, _fmt(r.iterations), _fmt(r.gradient_evaluations),
                _fmt(r.success), _fmt(r.rel_error), _fmt(r.threshold_ratio),
                _fmt(r.runtime_ms),
            ])
    return path


def read_results_csv(path) -> list[TrialRecord]:
    path = Path(path)
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != RESULTS_HEADER:
            raise ValueError(f"unexpected results header in {path}: {header}")
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(RESULTS_HEADER):
                raise ValueError(f"{path}: line {line_no} has {len(row)} fields, expected {len(RESULTS_HEADER)}")
            records.append(TrialRecord(
                trial_index=int(row[0]),
                seed=int(row[1]),
                s=int(row[2]),
                eta=_parse_optional_float(row[3]),
                algorithm=row[4],
                iterations=int(row[5]),
                gradient_evaluations=int(row[6]),
                success=row[7] == "1",
                rel_error=float(row[8]),
                threshold_ratio=_parse_optional_float(row[9]),
                runtime_ms=float(row[10]),
            ))
    return records


def write_summary_csv(path, rows, group_keys=DEFAULT_GROUP_KEYS) -> Path:
    path = Path(path)
    header = tuple(group_keys) + _STAT_COLUMNS
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[col]) for col in header])
    return path


def write_spec_json(path, spec: ExperimentSpec) -> Path:
    path = Path(path)
    path.write_text(json.dumps(spec.to_dict(), indent=2, sort_keys=True) + "\n")
    return path


def read_spec_json(path) -> ExperimentSpec:
    return ExperimentSpec.from_dict(json.loads(Path(path).read_text()))


def persist_experiment(directory, spec: ExperimentSpec, records,
                       group_keys=DEFAULT_GROUP_KEYS) -> dict[str, Path]:
    """Write results.csv, summary.csv, and spec.json into the directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return {
        "results": write_results_csv(directory / "results.csv", records),
        "summary": write_summary_csv(directory / "summary.csv",
                                     aggregate(records, group_keys), group_keys),
        "spec": write_spec_json(directory / "spec.json", spec),
    }

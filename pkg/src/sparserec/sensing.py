"""Random sensing instances: matrices, sparse signals, noise, problem bundles.

Everything is reproducible from explicit 64-bit seeds via a counter-based
generator (Philox). Each public sampler uses its own key lane, so one trial
seed can be handed to the matrix, signal, and noise samplers and still yield
independent streams.
"""

import enum
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import linalg, thresholding

_MASK64 = (1 << 64) - 1

# key lanes, one per sampler
_LANE_MATRIX = 0
_LANE_SIGNAL = 1
_LANE_NOISE = 2
_LANE_COISOMETRY = 3


def rng_for(seed: int, lane: int) -> np.random.Generator:
    """Counter-based generator for (seed, lane); distinct lanes never collide."""
    return np.random.Generator(np.random.Philox(key=[int(seed) & _MASK64, int(lane)]))


class VarianceMode(enum.Enum):
    ONE_OVER_M = "1/m"
    UNIT = "unit"


class Normalization(enum.Enum):
    OPNORM_ONE = "opnorm1"
    COLVAR_ONE = "colvar1"


def gaussian_matrix(m: int, d: int, variance_mode: VarianceMode, seed: int) -> np.ndarray:
    """m x d matrix of iid centered Gaussians, entry variance 1/m or 1."""
    if m < 1 or d < 1:
        raise ValueError(f"matrix dimensions must be positive, got {m}x{d}")
    A = rng_for(seed, _LANE_MATRIX).standard_normal((m, d))
    if variance_mode is VarianceMode.ONE_OVER_M:
        A = A / math.sqrt(m)
    elif variance_mode is not VarianceMode.UNIT:
        raise ValueError(f"unknown variance mode {variance_mode!r}")
    return np.ascontiguousarray(A)


def normalize_operator_norm(M) -> np.ndarray:
    """Rescale M so its largest singular value is 1.

    The scale factor comes from LAPACK singular values rather than the
    package's power iteration: the normalizer has to succeed on every random
    draw, including the rare near-degenerate spectra where Rayleigh-quotient
    stopping cannot certify its tolerance within budget.
    """
    M = linalg.as_matrix(M)
    sigma = float(np.linalg.svd(M, compute_uv=False)[0])
    if sigma == 0.0:
        raise ValueError("cannot normalize a zero matrix")
    return np.ascontiguousarray(M / sigma)


def random_coisometry(m: int, d: int, seed: int) -> np.ndarray:
    """m x d matrix with exactly orthonormal rows (m <= d), Haar-distributed.

    QR of a Gaussian with the sign of R's diagonal fixed, so the draw is
    deterministic per seed. Operator norm is 1 by construction.
    """
    if not (1 <= m <= d):
        raise ValueError(f"need 1 <= m <= d, got m={m}, d={d}")
    G = rng_for(seed, _LANE_COISOMETRY).standard_normal((d, m))
    Q, R = np.linalg.qr(G)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return np.ascontiguousarray((Q * signs).T)


def random_sparse_signal(d: int, s: int, seed: int) -> np.ndarray:
    """Exactly s-sparse length-d vector: uniform support, N(0,1) values.

    Exact zeros are redrawn so the sparsity is exactly s.
    """
    if not (1 <= s <= d):
        raise ValueError(f"need 1 <= s <= d, got s={s}, d={d}")
    rng = rng_for(seed, _LANE_SIGNAL)
    support = np.sort(rng.choice(d, size=s, replace=False))
    values = rng.standard_normal(s)
    while np.any(values == 0.0):
        mask = values == 0.0
        values[mask] = rng.standard_normal(int(np.sum(mask)))
    x = np.zeros(d)
    x[support] = values
    return x


def add_noise(clean, snr_db: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Add Gaussian noise scaled to hit the requested SNR exactly.

    Returns (noisy, noise). snr_db = +inf returns the input with zero noise;
    a zero clean vector has no defined SNR and is rejected.
    """
    clean = linalg.as_vector(clean)
    snr_db = float(snr_db)
    if math.isnan(snr_db):
        raise ValueError("snr_db must not be NaN")
    clean_norm = float(np.linalg.norm(clean))
    if clean_norm == 0.0:
        raise ValueError("cannot set an SNR against a zero signal")
    if math.isinf(snr_db):
        if snr_db > 0:
            return clean.copy(), np.zeros(clean.shape[0])
        raise ValueError("snr_db must not be -inf")
    rng = rng_for(seed, _LANE_NOISE)
    raw = rng.standard_normal(clean.shape[0])
    raw_norm = float(np.linalg.norm(raw))
    while raw_norm == 0.0:
        raw = rng.standard_normal(clean.shape[0])
        raw_norm = float(np.linalg.norm(raw))
    noise = raw * (clean_norm / (raw_norm * 10.0 ** (snr_db / 20.0)))
    return clean + noise, noise


@dataclass(frozen=True)
class SensingProblem:
    """A sensing instance: matrix, measurements, and optional ground truth."""

    matrix: np.ndarray
    measurements: np.ndarray
    sparsity: int
    ground_truth: np.ndarray | None = None
    noise: np.ndarray | None = None
    normalization: Normalization = Normalization.OPNORM_ONE
    exactly_sparse: bool = True
    seed: int | None = None
    snr_db: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", linalg.as_matrix(self.matrix))
        object.__setattr__(self, "measurements", linalg.as_vector(self.measurements))
        m, d = self.matrix.shape
        if self.measurements.shape[0] != m:
            raise ValueError(
                f"measurements length {self.measurements.shape[0]} does not match matrix rows {m}"
            )
        if not (1 <= self.sparsity <= d):
            raise ValueError(f"sparsity must be in [1, {d}], got {self.sparsity}")
        if self.ground_truth is not None:
            gt = linalg.as_vector(self.ground_truth)
            object.__setattr__(self, "ground_truth", gt)
            if gt.shape[0] != d:
                raise ValueError(f"ground truth length {gt.shape[0]} does not match columns {d}")
            if self.exactly_sparse and int(np.count_nonzero(gt)) > self.sparsity:
                raise ValueError(
                    f"ground truth has {int(np.count_nonzero(gt))} nonzeros, more than sparsity {self.sparsity}"
                )
        if self.noise is not None:
            nz = linalg.as_vector(self.noise)
            object.__setattr__(self, "noise", nz)
            if nz.shape[0] != m:
                raise ValueError(f"noise length {nz.shape[0]} does not match matrix rows {m}")
        for name in ("matrix", "measurements", "ground_truth", "noise"):
            arr = getattr(self, name)
            if arr is not None and not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def build_problem(
    m: int,
    d: int,
    s: int,
    seed: int,
    snr_db: float | None = None,
    normalization: Normalization = Normalization.OPNORM_ONE,
) -> SensingProblem:
    """Draw a full instance: A (normalized as asked), s-sparse truth, y = A x + e."""
    A = gaussian_matrix(m, d, VarianceMode.ONE_OVER_M, seed)
    if normalization is Normalization.OPNORM_ONE:
        A = normalize_operator_norm(A)
    x = random_sparse_signal(d, s, seed)
    clean = linalg.matvec(A, x)
    if snr_db is None:
        y, noise = clean, None
    else:
        y, noise = add_noise(clean, snr_db, seed)
    return SensingProblem(
        matrix=A,
        measurements=y,
        sparsity=s,
        ground_truth=x,
        noise=noise,
        normalization=normalization,
        seed=seed,
        snr_db=snr_db,
    )


def effective_error(problem: SensingProblem) -> np.ndarray:
    """The residual y - A H_s(x*) that noisy recovery bounds are stated against.

    Equals the additive noise when the ground truth is exactly s-sparse, and
    additionally absorbs the tail A (x* - H_s(x*)) when it is not.
    """
    if problem.ground_truth is None:
        raise ValueError("effective error needs a ground truth")
    head, _ = thresholding.hard_threshold(problem.ground_truth, problem.sparsity)
    return problem.measurements - linalg.matvec(problem.matrix, head)


def save_problem(directory, problem: SensingProblem) -> Path:
    """Write the bundle {A.csv, y.csv, xstar.csv, meta.json} into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    linalg.save_matrix(directory / "A.csv", problem.matrix)
    linalg.save_vector(directory / "y.csv", problem.measurements)
    if problem.ground_truth is not None:
        linalg.save_vector(directory / "xstar.csv", problem.ground_truth)
    m, d = problem.shape
    meta = {
        "m": m,
        "d": d,
        "s": problem.sparsity,
        "snr_db": problem.snr_db,
        "seed": problem.seed,
        "normalization": problem.normalization.value,
    }
    with open(directory / "meta.json", "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    return directory


def load_problem(directory) -> SensingProblem:
    """Read a bundle written by save_problem.

    The noise vector is not stored; when the bundle has a ground truth and a
    finite snr_db it is reconstructed as y - A x* (exact up to rounding).
    """
    directory = Path(directory)
    with open(directory / "meta.json") as fh:
        meta = json.load(fh)
    A = linalg.load_matrix(directory / "A.csv")
    y = linalg.load_vector(directory / "y.csv")
    xstar_path = directory / "xstar.csv"
    x = linalg.load_vector(xstar_path) if xstar_path.exists() else None
    if A.shape != (meta["m"], meta["d"]):
        raise ValueError(
            f"{directory}: A.csv is {A.shape[0]}x{A.shape[1]} but meta says {meta['m']}x{meta['d']}"
        )
    noise = None
    if x is not None and meta.get("snr_db") is not None:
        noise = y - linalg.matvec(A, x)
    return SensingProblem(
        matrix=A,
        measurements=y,
        sparsity=int(meta["s"]),
        ground_truth=x,
        noise=noise,
        normalization=Normalization(meta["normalization"]),
        seed=meta.get("seed"),
        snr_db=meta.get("snr_db"),
    )

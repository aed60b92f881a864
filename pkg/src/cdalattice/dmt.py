"""Monte Carlo Rayleigh-fading MIMO simulation of spherically shaped lattice codes.

Channel: Y = sqrt(rho / n_t) H X + N with H (n_r x n_t) and N (n_r x T) having
i.i.d. unit-variance circular complex Gaussian entries. Decoding is
exhaustive maximum likelihood over the codebook.

Trials are generated in fixed blocks, each from its own counter-based Philox
stream keyed by (seed, block index), so error counts do not depend on how
blocks are scheduled across workers.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError, DegenerateInputError, InternalConsistencyError
from .lattice import MatrixLattice, collect_ball

DEFAULT_CODEBOOK_CAP = 4096
BLOCK_TRIALS = 4096
_DECODE_ELEMS = 1 << 22


class UnreliableEstimateWarning(UserWarning):
    """Too few SNR points had enough errors for a trustworthy slope."""


@dataclass
class SimConfig:
    n_t: int
    n_r: int
    snr_grid_db: list
    trials: int
    seed: int = 0
    rate_param: float = 0.0
    T: int | None = None
    codebook_cap: int = DEFAULT_CODEBOOK_CAP

    def __post_init__(self):
        if self.T is None:
            self.T = self.n_t
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(b < a for a, b in zip(self.snr_grid_db, self.snr_grid_db[1:])):
            raise ValueError("snr_grid_db must be ascending")
        if self.rate_param < 0:
            raise ValueError("rate_param must be >= 0")


@dataclass(frozen=True)
class SnrRecord:
    snr_db: float
    codebook_size: int
    errors: int
    trials: int

    @property
    def error_rate(self) -> float:
        return self.errors / self.trials


@dataclass
class SimResult:
    records: list
    slope: float | None = None
    energy_stat: float | None = None
    flags: dict = field(default_factory=dict)


def db_to_linear(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def codebook_radius(rho: float, r: float, k: int, T: int) -> float:
    return rho ** (r * T / k)


def build_codebook(
    lat: MatrixLattice,
    rho: float,
    r: float,
    k: int | None = None,
    T: int | None = None,
    *,
    cap: int = DEFAULT_CODEBOOK_CAP,
) -> np.ndarray:
    """rho^(-rT/k) L(rho^(rT/k)) with the zero codeword first; shape (size, n, n)."""
    if rho <= 1:
        raise ValueError("rho must exceed 1")
    k = lat.dim if k is None else k
    T = lat.spec.degree if T is None else T
    radius = codebook_radius(rho, r, k, T)
    predicted = lat.predicted_count(radius)
    if predicted + 1 > 4 * cap:
        raise BudgetExceededError(f"codebook radius {radius:.4g} predicts ~{predicted:.3g} codewords > cap {cap}")
    ball = collect_ball(lat, radius, point_cap=4 * cap)
    if len(ball) + 1 > cap:
        raise BudgetExceededError(f"codebook has {len(ball) + 1} codewords > cap {cap}")
    if r > 0 and len(ball) == 0:
        raise DegenerateInputError(
            f"rho={rho:.4g} is too small for rate {r}: the codebook contains only the zero codeword"
        )
    n = lat.spec.degree
    words = np.zeros((len(ball) + 1, n, n), dtype=np.complex128)
    if len(ball):
        words[1:] = lat.psi_numeric(ball.coords) / radius
    energy = average_energy(words)
    if energy > T * n * 1.01:
        raise InternalConsistencyError(f"codebook violates the average energy constraint ({energy:.4g} > {T * n})")
    return words


def average_energy(codebook: np.ndarray) -> float:
    return float(np.mean(np.sum(np.abs(codebook) ** 2, axis=(1, 2))))


def _block_errors(codebook, n_r, rho, seed, block, ntrials, n_t):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))
    m, _, T = codebook.shape
    h = (rng.standard_normal((ntrials, n_r, n_t)) + 1j * rng.standard_normal((ntrials, n_r, n_t))) / math.sqrt(2)
    sent = rng.integers(0, m, size=ntrials)
    noise = (rng.standard_normal((ntrials, n_r, T)) + 1j * rng.standard_normal((ntrials, n_r, T))) / math.sqrt(2)
    amp = math.sqrt(rho / n_t)
    y = amp * h @ codebook[sent] + noise
    if m == 1:
        return 0
    chunk = max(1, _DECODE_ELEMS // (m * n_r * T))
    errors = 0
    for lo in range(0, ntrials, chunk):
        hi = min(lo + chunk, ntrials)
        hx = amp * np.einsum("bij,mjk->bmik", h[lo:hi], codebook)
        dist = np.sum(np.abs(y[lo:hi, None] - hx) ** 2, axis=(2, 3))
        errors += int(np.count_nonzero(np.argmin(dist, axis=1) != sent[lo:hi]))
    return errors


def simulate_error_rate(
    codebook,
    n_r: int,
    snr_db: float,
    trials: int,
    seed: int,
    *,
    workers: int = 1,
) -> tuple:
    """Codeword errors of ML decoding over ``trials`` independent fading blocks."""
    codebook = np.asarray(codebook, dtype=np.complex128)
    if codebook.ndim != 3 or codebook.shape[0] < 1:
        raise ValueError("codebook must be a nonempty (size, n_t, T) array")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n_t = codebook.shape[1]
    rho = db_to_linear(snr_db)
    blocks = [(b, min(BLOCK_TRIALS, trials - b * BLOCK_TRIALS)) for b in range(math.ceil(trials / BLOCK_TRIALS))]

    def run(bt):
        return _block_errors(codebook, n_r, rho, seed, bt[0], bt[1], n_t)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = sum(pool.map(run, blocks))
    else:
        errors = sum(run(bt) for bt in blocks)
    return errors, trials


def snr_seed(seed: int, index: int) -> int:
    """Independent per-SNR seed derived from the campaign seed."""
    state = np.random.SeedSequence(seed, spawn_key=(0xD17, index)).generate_state(2, np.uint64)
    return int(state[0]) << 64 | int(state[1])


def estimate_diversity(records, min_errors: int = 10) -> float:
    """Least-squares slope of -log P_e against log rho over reliable points.

    Points with fewer than ``min_errors`` errors are dropped; when fewer than
    three remain an UnreliableEstimateWarning is issued and the slope is
    fitted from whatever points have at least one error.
    """
    if isinstance(records, SimResult):
        records = records.records
    usable = [r for r in records if r.errors >= min_errors and r.error_rate > 0]
    if len(usable) < 3:
        warnings.warn(
            f"only {len(usable)} SNR points have >= {min_errors} errors; diversity estimate is unreliable",
            UnreliableEstimateWarning,
            stacklevel=2,
        )
        usable = [r for r in records if r.errors > 0]
        if len(usable) < 2:
            return float("nan")
    x = np.array([math.log(db_to_linear(r.snr_db)) for r in usable])
    y = np.array([-math.log(r.error_rate) for r in usable])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def dmt_reference(m: int, n: int, r: float) -> float:
    """Optimal tradeoff d*(r): (m - r)(n - r) at integers, linear in between."""
    top = min(m, n)
    if not 0 <= r <= top:
        raise ValueError(f"multiplexing gain r={r} outside [0, {top}]")
    lo = math.floor(r)
    if lo == r:
        return float((m - lo) * (n - lo))
    d_lo = (m - lo) * (n - lo)
    d_hi = (m - lo - 1) * (n - lo - 1)
    return float(d_lo + (r - lo) * (d_hi - d_lo))


def bpsk_rayleigh_error_rate(snr: float) -> float:
    """Average BPSK error probability on a SISO Rayleigh channel with mean SNR ``snr``."""
    return 0.5 * (1.0 - math.sqrt(snr / (1.0 + snr)))


def union_bound(lat: MatrixLattice, rho: float, r: float, n_r: int, n_t: int | None = None, *, point_cap: int = 10 ** 7) -> float:
    """Union bound on P_e for the spherical code of ``lat`` at (rho, r).

    Sums the Chernoff pairwise bound (rho/(4 n_t))^(-n n_r) |det D|^(-2 n_r)
    rescaled to the codebook over all lattice differences D in the doubled
    ball, which gives (4 n_t)^(n n_r) rho^(-n n_r (1 - r/n)) S_L(2 rho^(r/2n))
    with the determinant-sum exponent 2 n_r. Capped at 1.
    """
    from .analysis import det_sum
    from .lattice import enumerate_ball

    n = lat.spec.degree
    n_t = n if n_t is None else n_t
    k = lat.dim
    radius = codebook_radius(rho, r, k, n)
    s = det_sum(enumerate_ball(lat, 2 * radius, point_cap=point_cap), 2 * n_r)
    bound = (4 * n_t) ** (n * n_r) * rho ** (-n * n_r * (1 - r / n)) * s
    return min(1.0, bound)


def run_simulation(lat: MatrixLattice | None, config: SimConfig, codebook=None, *, workers: int = 1) -> SimResult:
    """Simulate every SNR of ``config``; the codebook is rebuilt per SNR unless given."""
    records = []
    energies = []
    for idx, snr_db in enumerate(config.snr_grid_db):
        rho = db_to_linear(snr_db)
        cb = codebook
        if cb is None:
            cb = build_codebook(lat, rho, config.rate_param, T=config.T, cap=config.codebook_cap)
        energies.append(average_energy(cb))
        errors, trials = simulate_error_rate(cb, config.n_r, snr_db, config.trials, snr_seed(config.seed, idx), workers=workers)
        records.append(SnrRecord(float(snr_db), int(cb.shape[0]), int(errors), int(trials)))
    flags = {}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        slope = estimate_diversity(records)
    flags["slope_reliable"] = not any(issubclass(w.category, UnreliableEstimateWarning) for w in caught)
    flags["block_length_condition"] = config.T >= config.n_t + config.n_r - 1
    return SimResult(records, slope, max(energies) if energies else None, flags)

"""Statistics over enumerated balls: determinant sums, unit and coset censuses,
principal-ideal zeta partial sums, the ideal-index identity and growth fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

import mpmath
import numpy as np
import sympy

from .algebra import AlgebraElement, AlgebraSpec, same_left_ideal, unit_coset_key
from .errors import BudgetExceededError, DegenerateInputError, SingularMatrixError, ZeroElementError
from .hnf import hnf_mod_batch
from .lattice import (
    BOUNDARY_TOL,
    DEFAULT_POINT_CAP,
    LatticePoint,
    MatrixLattice,
    iter_batches,
    radius_buckets,
)

STANDARD_GRID = (2.0, 3.0, 4.0, 6.0, 8.0, 11.0, 16.0)
DEFAULT_SUM_EXPONENT = 2
DEFAULT_ZETA_S = 2.0


@dataclass(frozen=True)
class BallCensus:
    R: float
    point_count: int
    det_sum: float
    epstein_sum: float
    unit_count: int
    oe_unit_count: int | None
    coset_count: int
    partial_zeta: float

    def as_row(self) -> tuple:
        return (
            self.R,
            self.point_count,
            self.det_sum,
            self.epstein_sum,
            self.unit_count,
            self.oe_unit_count,
            self.coset_count,
            self.partial_zeta,
        )


@dataclass(frozen=True)
class GrowthFit:
    exponent: float
    log_constant: float
    residual: float
    radii_used: list


@dataclass
class CensusRun:
    """Censuses over a radius grid plus the per-point checks done along the way."""

    rows: list
    sum_exponent: int
    s: float
    nvd_violations: int = 0
    minkowski_violations: int = 0
    min_nrd_sq: int | None = None
    oe_unit_brute: list = field(default_factory=list)
    ideal_count: list = field(default_factory=list)
    coset_representatives: list = field(default_factory=list)


# -- point-stream statistics ------------------------------------------------


def det_sum(points: Iterable[LatticePoint], sum_exponent: int) -> float:
    """sum |Nrd(x)|^-m over the stream; |Nrd| is exact, the power is floating."""
    return math.fsum(p.nrd.norm() ** (-sum_exponent / 2) for p in points)


def epstein_sum(points: Iterable[LatticePoint], n: int, sum_exponent: int) -> float:
    """sum sqrt(n)^(m n) / ||X||_F^(m n), the Minkowski lower bound for det_sum."""
    e = sum_exponent * n / 2
    return math.fsum((n / p.norm_sq) ** e for p in points)


@dataclass(frozen=True)
class UnitCensus:
    unit_count: int
    coset_count: int
    representatives: list


def unit_census(points: Iterable[LatticePoint]) -> UnitCensus:
    units = [p for p in points if p.nrd.norm() == 1]
    units.sort(key=lambda p: (p.norm_sq, p.coords))
    reps = {}
    for p in units:
        reps.setdefault(unit_coset_key(p.element), p.element)
    return UnitCensus(len(units), len(reps), list(reps.values()))


def partial_zeta(points: Iterable[LatticePoint], s: float = DEFAULT_ZETA_S) -> float:
    """sum over distinct principal ideals L x of [L : L x]^-s.

    Points are grouped by |Nrd|^2 first (ideals of different index differ)
    and then by the canonical Hermite form of the ideal.
    """
    pts = list(points)
    if not pts:
        return 0.0
    spec = pts[0].element.spec
    n = spec.degree
    by_norm = {}
    for p in pts:
        by_norm.setdefault(p.nrd.norm(), []).append(p.coords)
    terms = []
    tensor = _product_tensor(spec)
    for nsq, coords in sorted(by_norm.items()):
        keys = ideal_keys(tensor, np.array(coords, dtype=np.int64), np.full(len(coords), nsq, dtype=np.int64))
        terms.extend([float(nsq) ** (-n * s)] * len(set(keys)))
    return math.fsum(terms)


def group_ideals_pairwise(elements: list) -> list:
    """Ideal classes by pairwise same_left_ideal tests (quadratic; for cross-checks)."""
    classes = []
    for x in elements:
        for cls in classes:
            if same_left_ideal(x, cls[0]):
                cls.append(x)
                break
        else:
            classes.append([x])
    return classes


# -- ideals --------------------------------------------------------------------

_TENSORS = {}


def _product_tensor(spec: AlgebraSpec) -> np.ndarray:
    key = id(spec)
    if key not in _TENSORS:
        from .batch import BatchArithmetic

        _TENSORS[key] = (spec, BatchArithmetic(spec).generator_product_tensor())
    return _TENSORS[key][1]


def ideal_matrices(tensor: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Rows k of result b are the coordinates of g_k * x_b (x_b given by coords[b])."""
    return np.einsum("bm,kml->bkl", coords.astype(np.int64), tensor)


def ideal_keys(tensor: np.ndarray, coords: np.ndarray, nrd_sq: np.ndarray) -> list:
    """Canonical HNF bytes of the left ideal generated by each point."""
    if len(coords) == 0:
        return []
    mats = ideal_matrices(tensor, coords)
    hnfs = hnf_mod_batch(mats, nrd_sq.astype(np.int64))
    d = tensor.shape[0]
    iu = np.triu_indices(d)
    flat = hnfs[:, iu[0], iu[1]]
    small = flat.astype(np.int32) if flat.max(initial=0) < 2 ** 31 else flat
    return [row.tobytes() for row in np.ascontiguousarray(small)]


def ideal_index(x: AlgebraElement, spec: AlgebraSpec | None = None) -> int:
    """[L : L x] as |det| of the integer matrix of g_k -> g_k x."""
    if x.is_zero():
        raise ZeroElementError("the zero element generates no ideal of finite index")
    spec = x.spec
    tensor = _product_tensor(spec)
    mat = ideal_matrices(tensor, np.array([x.to_coords()], dtype=object).astype(np.int64))[0]
    return abs(int(sympy.Matrix(mat.tolist()).det(method="bareiss")))


# -- O_E units ------------------------------------------------------------------


def _unit_logs(spec: AlgebraSpec, prec: int = 128) -> np.ndarray:
    from .lattice import refined_embeddings

    emb = refined_embeddings(spec, prec)
    rows = []
    with mpmath.workprec(prec):
        for eps in spec.unit_data.fundamental:
            rows.append(
                [
                    float(2 * mpmath.log(abs(sum(mpmath.mpc(a.re, a.im) * e ** k for k, a in enumerate(eps.coords)))))
                    for e in emb
                ]
            )
    return np.array(rows)


def oe_unit_exponents(spec: AlgebraSpec, R: float) -> list:
    """Exponent vectors b with sum_j prod_l |sigma^j(eps_l)|^(2 b_l) <= R^2 (1 + tol)."""
    if spec.unit_data is None:
        raise DegenerateInputError(f"units: algebra {spec.name!r} has no unit_data (fundamental units)")
    n = spec.degree
    limit = R * R * (1 + BOUNDARY_TOL)
    if limit < n:
        return []
    if n == 1 or not spec.unit_data.fundamental:
        return [()]
    logs = _unit_logs(spec)  # (rank, n), each row sums to 0
    smin = np.linalg.svd(logs, compute_uv=False).min()
    # norm^2 >= exp(max_j L_j) and max_j L_j >= ||L||_2 / (sqrt(n) (n - 1))
    bound = int(math.ceil(math.log(limit) * math.sqrt(n) * (n - 1) / smin)) + 1
    out = []
    for b in product(range(-bound, bound + 1), repeat=logs.shape[0]):
        lv = np.array(b, dtype=np.float64) @ logs
        if math.fsum(np.exp(lv)) <= limit:
            out.append(b)
    return out


def oe_unit_count(spec: AlgebraSpec, R: float) -> int:
    """|psi(O_E^*) n B(R)| by scanning fundamental-unit exponents."""
    exps = oe_unit_exponents(spec, R) if R > 0 else []
    return spec.unit_data.roots_of_unity * len(exps)


# -- fits and numeric lemmas ----------------------------------------------------


def fit_growth(samples) -> GrowthFit:
    """Least-squares line through (log R, log value)."""
    samples = [(float(r), float(v)) for r, v in samples]
    if len(samples) < 3:
        raise DegenerateInputError("growth fit needs at least 3 samples")
    use = [(r, v) for r, v in samples if v > 0 and r > 0]
    if len({r for r, _ in use}) < 2:
        raise DegenerateInputError("growth fit needs positive values at two or more distinct radii")
    x = np.log([r for r, _ in use])
    y = np.log([v for _, v in use])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return GrowthFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2))), [r for r, _ in use])


def mismatch_check(A, B, tol: float = 1e-9) -> bool:
    """||AB||_F^2 >= sum a_i b_i, eigenvalues of AA^H descending, of BB^H ascending."""
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    for name, m in (("A", A), ("B", B)):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise SingularMatrixError(f"{name} must be square")
        if np.linalg.cond(m) > 1e12:
            raise SingularMatrixError(f"{name} is singular or numerically singular")
    a = np.sort(np.linalg.eigvalsh(A @ A.conj().T))[::-1]
    b = np.sort(np.linalg.eigvalsh(B @ B.conj().T))
    lhs = np.linalg.norm(A @ B, "fro") ** 2
    rhs = float(np.dot(a, b))
    return lhs + tol * max(abs(lhs), abs(rhs), 1.0) >= rhs


def minkowski_holds(nrd_sq, norm_sq, n: int, rel_tol: float = 1e-9):
    """|det X| <= (||X||_F / sqrt n)^n, with the exact |det|^2 and numeric norm."""
    rhs = (np.asarray(norm_sq, dtype=np.float64) / n) ** n
    return np.asarray(nrd_sq, dtype=np.float64) <= rhs * (1 + rel_tol)


# -- census over a grid --------------------------------------------------------


def _as_int64(values: np.ndarray) -> np.ndarray:
    if values.dtype != object:
        return values.astype(np.int64)
    if len(values) and max(values) >= 2 ** 31:
        raise BudgetExceededError("reduced norms too large for the int64 ideal kernels; lower the radius")
    return values.astype(np.int64)


def census_grid(
    lat: MatrixLattice,
    radii,
    *,
    sum_exponent: int = DEFAULT_SUM_EXPONENT,
    s: float = DEFAULT_ZETA_S,
    point_cap: int = DEFAULT_POINT_CAP,
    workers: int = 1,
) -> CensusRun:
    """Every BallCensus on an ascending grid from one enumeration at the largest radius."""
    radii = [float(r) for r in radii]
    if not radii or any(b < a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be a nonempty ascending list")
    spec = lat.spec
    n = spec.degree
    nb = len(radii)
    tensor = _product_tensor(spec)
    counts = np.zeros(nb, dtype=np.int64)
    det_terms = {}  # (bucket, |Nrd|^2) -> count
    eps_terms = [[] for _ in range(nb)]
    ideals = {}  # key -> (first bucket, |Nrd|^2)
    unit_rows, unit_norms, unit_buckets = [], [], []
    nvd_bad = mink_bad = 0
    min_nrd = None
    e = sum_exponent * n / 2

    for batch in iter_batches(lat, radii[-1], point_cap=point_cap, workers=workers):
        re, im = lat.arithmetic.reduced_norm(batch.coords)
        nsq = re * re + im * im
        bucket = radius_buckets(batch.norm_sq, radii)
        nsq_i = _as_int64(nsq)
        nvd_bad += int(np.count_nonzero(nsq_i < 1))
        bmin = int(nsq_i.min())
        min_nrd = bmin if min_nrd is None else min(min_nrd, bmin)
        mink_bad += int(np.count_nonzero(~minkowski_holds(nsq_i, batch.norm_sq, n)))
        counts += np.bincount(bucket, minlength=nb)[:nb]
        pairs, cnt = np.unique(np.stack([bucket, nsq_i], axis=1), axis=0, return_counts=True)
        for (b, v), c in zip(pairs.tolist(), cnt.tolist()):
            det_terms[(b, v)] = det_terms.get((b, v), 0) + c
        terms = (n / batch.norm_sq) ** e
        for b in range(nb):
            sel = bucket == b
            if sel.any():
                eps_terms[b].append(terms[sel])
        is_unit = nsq_i == 1
        if is_unit.any():
            unit_rows.append(batch.coords[is_unit])
            unit_norms.append(batch.norm_sq[is_unit])
            unit_buckets.append(bucket[is_unit])
        nonunit = ~is_unit
        if nonunit.any():
            keys = ideal_keys(tensor, batch.coords[nonunit], nsq_i[nonunit])
            for key, b, v in zip(keys, bucket[nonunit].tolist(), nsq_i[nonunit].tolist()):
                old = ideals.get(key)
                if old is None or b < old[0]:
                    ideals[key] = (b, v)

    point_count = np.cumsum(counts)
    bucket_det = [
        math.fsum(c * v ** (-sum_exponent / 2) for (b, v), c in det_terms.items() if b == k) for k in range(nb)
    ]
    bucket_eps = [math.fsum(np.concatenate(t)) if t else 0.0 for t in eps_terms]

    if unit_rows:
        urows = np.concatenate(unit_rows)
        unorms = np.concatenate(unit_norms)
        ubuck = np.concatenate(unit_buckets)
        order = np.lexsort(tuple(urows.T[::-1]) + (unorms,))
        urows, unorms, ubuck = urows[order], unorms[order], ubuck[order]
    else:
        urows = np.empty((0, lat.dim), np.int64)
        ubuck = np.empty(0, np.int64)
    unit_counts = np.cumsum(np.bincount(ubuck, minlength=nb)[:nb])
    diag = np.all(urows[:, 2 * n:] == 0, axis=1) if len(urows) else np.empty(0, bool)
    oe_brute = np.cumsum(np.bincount(ubuck[diag], minlength=nb)[:nb]) if len(urows) else np.zeros(nb, int)
    coset_first = {}
    for row, b in zip(urows, ubuck.tolist()):
        key = unit_coset_key(spec.from_coords(row))
        if key not in coset_first:
            coset_first[key] = (b, tuple(int(v) for v in row))
    coset_counts = np.cumsum(np.bincount([b for b, _ in coset_first.values()], minlength=nb)[:nb]) if coset_first else np.zeros(nb, int)

    # units all generate the whole order, index 1
    zeta_terms = [[] for _ in range(nb)]
    if len(urows):
        zeta_terms[int(ubuck.min())].append(1.0)
    for b, v in ideals.values():
        zeta_terms[b].append(float(v) ** (-n * s))
    bucket_zeta = [math.fsum(t) for t in zeta_terms]
    ideal_counts = np.cumsum([len(t) for t in zeta_terms])

    rows = []
    for k, R in enumerate(radii):
        oe = oe_unit_count(spec, R) if spec.unit_data is not None else None
        rows.append(
            BallCensus(
                R=R,
                point_count=int(point_count[k]),
                det_sum=math.fsum(bucket_det[: k + 1]),
                epstein_sum=math.fsum(bucket_eps[: k + 1]),
                unit_count=int(unit_counts[k]),
                oe_unit_count=oe,
                coset_count=int(coset_counts[k]),
                partial_zeta=math.fsum(bucket_zeta[: k + 1]),
            )
        )
    reps = [spec.from_coords(c) for _, c in sorted(coset_first.values(), key=lambda t: t[0])]
    return CensusRun(
        rows=rows,
        sum_exponent=sum_exponent,
        s=s,
        nvd_violations=nvd_bad,
        minkowski_violations=mink_bad,
        min_nrd_sq=min_nrd,
        oe_unit_brute=[int(v) for v in oe_brute],
        ideal_count=[int(v) for v in ideal_counts],
        coset_representatives=reps,
    )


@dataclass(frozen=True)
class NvdScan:
    radius: float
    points: int
    nvd_violations: int
    minkowski_violations: int
    min_nrd_sq: int | None


def nvd_scan(lat: MatrixLattice, radius: float | None = None, *, point_cap: int = DEFAULT_POINT_CAP, workers: int = 1) -> NvdScan:
    """Exact |Nrd|^2 >= 1 check over a whole ball.

    Without ``radius`` the ball is the largest one the volume heuristic
    admits under ``point_cap``, shrunk by 1% steps if the true count overshoots.
    """
    r = lat.max_radius_for_cap(point_cap) if radius is None else float(radius)
    n = lat.spec.degree
    while True:
        points = bad = mink = 0
        lo = None
        try:
            for batch in iter_batches(lat, r, point_cap=point_cap, workers=workers):
                re, im = lat.arithmetic.reduced_norm(batch.coords)
                nsq = re * re + im * im
                points += len(batch)
                bad += int(np.count_nonzero(nsq < 1))
                mink += int(np.count_nonzero(~minkowski_holds(nsq, batch.norm_sq, n)))
                m = int(nsq.min())
                lo = m if lo is None else min(lo, m)
        except BudgetExceededError:
            if radius is not None:
                raise
            r *= 0.99
            continue
        return NvdScan(r, points, bad, mink, lo)

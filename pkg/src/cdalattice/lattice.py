"""The natural order as a 2n^2-dimensional real lattice of complex matrices.

Generator ``2*(i*n + j) + t`` is ``u^i * i^t * theta^j``. The inner product
is the real Frobenius product Re tr(A B^H), so a point with integer
coordinates c has squared norm c^T G c for the Gram matrix G.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import mpmath
import numpy as np

from ._enum import enumerate_subtree
from .algebra import AlgebraElement, AlgebraSpec
from .batch import BatchArithmetic
from .errors import BudgetExceededError, InternalConsistencyError
from .gaussian import GaussianInt

BOUNDARY_TOL = 2.0 ** -30
DEFAULT_POINT_CAP = 10 ** 7
DEFAULT_PRECISION = 128


@dataclass(frozen=True, eq=False)
class MatrixLattice:
    spec: AlgebraSpec
    precision: int
    gram_mp: mpmath.matrix
    gram: np.ndarray
    cholesky: np.ndarray  # upper triangular, gram == cholesky.T @ cholesky
    basis_matrices: np.ndarray  # (d, n, n) complex128 images of the generators
    reduction: np.ndarray | None = None  # integer change of basis used for enumeration

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @cached_property
    def generators(self) -> tuple:
        d = self.dim
        return tuple(
            self.spec.from_coords([1 if i == k else 0 for i in range(d)]) for k in range(d)
        )

    @cached_property
    def arithmetic(self) -> BatchArithmetic:
        return BatchArithmetic(self.spec)

    @cached_property
    def covolume(self) -> float:
        return float(np.prod(np.diag(self.cholesky)))

    @cached_property
    def _enum_data(self):
        g = self.gram if self.reduction is None else self.reduction.T @ self.gram @ self.reduction
        r = np.linalg.cholesky(g).T
        diag = np.diag(r).copy()
        mu = r / diag[:, None]
        return diag ** 2, np.ascontiguousarray(mu)

    def psi_numeric(self, coords) -> np.ndarray:
        """Complex matrices psi(x) for rows of integer coordinates."""
        c = np.atleast_2d(np.asarray(coords, dtype=np.float64))
        return np.tensordot(c, self.basis_matrices, axes=(1, 0))

    def norm_sq(self, coords) -> np.ndarray:
        c = np.atleast_2d(np.asarray(coords, dtype=np.float64))
        return np.einsum("ij,jk,ik->i", c, self.gram, c)

    def predicted_count(self, radius: float) -> float:
        """Volume heuristic for the number of lattice points in the ball."""
        d = self.dim
        log_vol = (d / 2) * math.log(math.pi) - math.lgamma(d / 2 + 1) + d * math.log(max(radius, 1e-300))
        return math.exp(log_vol) / self.covolume

    def max_radius_for_cap(self, cap: int = DEFAULT_POINT_CAP) -> float:
        d = self.dim
        log_vol_unit = (d / 2) * math.log(math.pi) - math.lgamma(d / 2 + 1)
        return math.exp((math.log(cap * self.covolume) - log_vol_unit) / d)


def refined_embeddings(spec: AlgebraSpec, precision: int):
    """Images of sigma^j(theta), polished by Newton iteration at ``precision`` bits."""
    coeffs = [mpmath.mpc(c.re, c.im) for c in spec.field.min_poly]

    def poly(z):
        return mpmath.polyval(coeffs[::-1], z)

    out = []
    with mpmath.workprec(precision + 16):
        for re, im in spec.embeddings:
            z0 = mpmath.mpc(mpmath.mpf(re), mpmath.mpf(im))
            z = mpmath.findroot(poly, z0, tol=mpmath.mpf(2) ** (-2 * precision))
            out.append(mpmath.mpc(z))
    return out


def _psi_mp(x: AlgebraElement, emb):
    n = x.spec.degree
    gamma = mpmath.mpc(x.spec.gamma.re, x.spec.gamma.im)
    mat = mpmath.matrix(n, n)
    for r in range(n):
        for c in range(n):
            part = x.parts[(r - c) % n]
            # sigma^c is Q(i)-linear, so its image is the coordinate polynomial at emb[c]
            val = sum(mpmath.mpc(a.re, a.im) * emb[c] ** k for k, a in enumerate(part.coords))
            mat[r, c] = val * gamma if r < c else val
    return mat


def build_lattice(spec: AlgebraSpec, precision: int = DEFAULT_PRECISION, reduce: bool | None = None) -> MatrixLattice:
    """Gram matrix and Cholesky factor of psi(natural order).

    ``reduce`` toggles LLL preprocessing before enumeration; by default it is
    on for n >= 4. It never changes which points are found.
    """
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    n = spec.degree
    d = spec.lattice_dim
    gens = [spec.from_coords([1 if i == k else 0 for i in range(d)]) for k in range(d)]
    with mpmath.workprec(precision):
        emb = refined_embeddings(spec, precision)
        mats = [_psi_mp(g, emb) for g in gens]
        vecs = []
        for m in mats:
            v = []
            for r in range(n):
                for c in range(n):
                    v.extend((m[r, c].real, m[r, c].imag))
            vecs.append(v)
        gram_mp = mpmath.matrix(d, d)
        for a in range(d):
            for b in range(a, d):
                s = mpmath.fsum(p * q for p, q in zip(vecs[a], vecs[b]))
                gram_mp[a, b] = s
                gram_mp[b, a] = s
        basis = np.array(
            [[[complex(m[r, c]) for c in range(n)] for r in range(n)] for m in mats],
            dtype=np.complex128,
        )
        gram = np.array([[float(gram_mp[a, b]) for b in range(d)] for a in range(d)])
    if np.any(np.diag(gram) <= 0):
        raise InternalConsistencyError("Gram matrix has a non-positive diagonal entry; check field.embeddings")
    try:
        chol = np.linalg.cholesky(gram).T
    except np.linalg.LinAlgError as exc:
        raise InternalConsistencyError(
            "Gram matrix is not positive definite; check field.embeddings"
        ) from exc
    if reduce is None:
        reduce = n >= 4
    reduction = lll_reduce_gram(gram) if reduce else None
    return MatrixLattice(spec, precision, gram_mp, gram, chol, basis, reduction)


def lll_reduce_gram(gram: np.ndarray, delta: float = 0.99) -> np.ndarray:
    """LLL on a basis known only through its Gram matrix.

    Returns the unimodular integer matrix U whose columns are the reduced
    basis vectors in the original coordinates.
    """
    d = gram.shape[0]
    u = np.eye(d, dtype=np.int64)
    g = gram.astype(np.float64).copy()

    def gso(g):
        lo = np.linalg.cholesky(g)
        diag = np.diag(lo)
        return lo / diag[None, :], diag ** 2

    k = 1
    mu, bstar = gso(g)
    while k < d:
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                u[:, k] -= q * u[:, j]
                g[:, k] -= q * g[:, j]
                g[k, :] -= q * g[j, :]
                mu[k, : j + 1] -= q * mu[j, : j + 1]
        if bstar[k] >= (delta - mu[k, k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            u[:, [k - 1, k]] = u[:, [k, k - 1]]
            g[[k - 1, k], :] = g[[k, k - 1], :]
            g[:, [k - 1, k]] = g[:, [k, k - 1]]
            mu, bstar = gso(g)
            k = max(k - 1, 1)
    return u


@dataclass(frozen=True)
class PointBatch:
    """Nonzero lattice points sharing one value of the top enumeration coordinate."""

    coords: np.ndarray  # (m, d) int64
    norm_sq: np.ndarray  # (m,) float64
    boundary: np.ndarray  # (m,) bool, within the tolerance band of the radius

    def __len__(self):
        return self.coords.shape[0]


@dataclass(frozen=True)
class LatticePoint:
    coords: tuple
    element: AlgebraElement
    norm_sq: float
    nrd: GaussianInt
    boundary: bool = False


def _enumerate_top(lat: MatrixLattice, bound2: float, top: int) -> tuple:
    qdiag, mu = lat._enum_data
    d = lat.dim
    size = 4096
    while True:
        coords = np.empty((size, d), dtype=np.int64)
        norms = np.empty(size)
        found = enumerate_subtree(qdiag, mu, bound2, top, coords, norms)
        if found >= 0:
            return coords[:found], norms[:found]
        size *= 4


def iter_batches(
    lat: MatrixLattice,
    radius: float,
    *,
    point_cap: int = DEFAULT_POINT_CAP,
    workers: int = 1,
) -> Iterator[PointBatch]:
    """Stream every nonzero point with ||psi(x)||_F^2 <= radius^2 (1 + BOUNDARY_TOL).

    Work is partitioned by the value of the top coordinate; batches are
    yielded in increasing top value regardless of ``workers``.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if radius == 0:
        return
    predicted = lat.predicted_count(radius)
    if predicted > point_cap:
        raise BudgetExceededError(
            f"radius {radius:g} predicts about {predicted:.3g} points, above point_cap={point_cap}"
        )
    r2 = radius * radius
    limit = r2 * (1 + BOUNDARY_TOL)
    search = limit * (1 + 1e-9) + 1e-12
    qdiag, _ = lat._enum_data
    top_max = int(math.floor(math.sqrt(search / qdiag[-1])))
    tops = range(-top_max, top_max + 1)
    emitted = 0

    def finish(raw):
        y, _ = raw
        c = y if lat.reduction is None else y @ lat.reduction.T
        norms = lat.norm_sq(c) if len(c) else np.empty(0)
        keep = norms <= limit
        c, norms = c[keep], norms[keep]
        return PointBatch(c, norms, np.abs(norms - r2) <= BOUNDARY_TOL * r2)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(lambda t: _enumerate_top(lat, search, t), tops)
            for raw in results:
                batch = finish(raw)
                emitted += len(batch)
                if emitted > point_cap:
                    raise BudgetExceededError(f"enumeration exceeded point_cap={point_cap}")
                if len(batch):
                    yield batch
    else:
        for t in tops:
            batch = finish(_enumerate_top(lat, search, t))
            emitted += len(batch)
            if emitted > point_cap:
                raise BudgetExceededError(f"enumeration exceeded point_cap={point_cap}")
            if len(batch):
                yield batch


def enumerate_ball(lat: MatrixLattice, radius: float, **kwargs) -> Iterator[LatticePoint]:
    """Every nonzero lattice point in B(radius), each exactly once, with exact Nrd."""
    spec = lat.spec
    for batch in iter_batches(lat, radius, **kwargs):
        re, im = lat.arithmetic.reduced_norm(batch.coords)
        for row, nsq, flag, a, b in zip(batch.coords, batch.norm_sq, batch.boundary, re, im):
            coords = tuple(int(v) for v in row)
            yield LatticePoint(coords, spec.from_coords(coords), float(nsq), GaussianInt(int(a), int(b)), bool(flag))


def collect_ball(lat: MatrixLattice, radius: float, **kwargs) -> PointBatch:
    """The whole ball as one batch (coordinates sorted lexicographically)."""
    parts = list(iter_batches(lat, radius, **kwargs))
    if not parts:
        return PointBatch(np.empty((0, lat.dim), np.int64), np.empty(0), np.empty(0, bool))
    c = np.concatenate([p.coords for p in parts])
    order = np.lexsort(c.T[::-1])
    return PointBatch(
        c[order],
        np.concatenate([p.norm_sq for p in parts])[order],
        np.concatenate([p.boundary for p in parts])[order],
    )


def radius_buckets(norm_sq: np.ndarray, radii) -> np.ndarray:
    """Index of the smallest radius whose (tolerant) ball contains each point."""
    lim = np.asarray(radii, dtype=np.float64) ** 2 * (1 + BOUNDARY_TOL)
    return np.searchsorted(lim, norm_sq, side="left")


def count_points(lat: MatrixLattice, radii, **kwargs) -> list:
    """[(R, |L(R)|)] from a single enumeration at the largest radius."""
    radii = [float(r) for r in radii]
    if any(b < a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be ascending")
    if not radii:
        return []
    hist = np.zeros(len(radii) + 1, dtype=np.int64)
    for batch in iter_batches(lat, radii[-1], **kwargs):
        hist += np.bincount(radius_buckets(batch.norm_sq, radii), minlength=len(radii) + 1)
    counts = np.cumsum(hist[:-1])
    return [(r, int(c)) for r, c in zip(radii, counts)]

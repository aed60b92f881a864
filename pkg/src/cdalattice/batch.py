"""Vectorized exact arithmetic over many lattice points at once.

Gaussian integers are carried as pairs of integer arrays. Arrays are int64
when a conservative magnitude bound shows no intermediate can overflow, and
object arrays of Python ints otherwise; the same code path serves both.
"""

from __future__ import annotations

from itertools import permutations
from math import factorial

import numpy as np

from .algebra import AlgebraSpec, permutation_sign
from .errors import InternalConsistencyError

_INT64_SAFE = 2 ** 62


def _gmul(ar, ai, br, bi):
    return ar * br - ai * bi, ar * bi + ai * br


class BatchArithmetic:
    """Exact reduced norms and ideal matrices for arrays of lattice coordinates."""

    def __init__(self, spec: AlgebraSpec):
        self.spec = spec
        n = self.n = spec.degree
        fld = spec.field
        self.mult_re = np.array(
            [[[c.re for c in fld.mult_table[j][k]] for k in range(n)] for j in range(n)],
            dtype=np.int64,
        )
        self.mult_im = np.array(
            [[[c.im for c in fld.mult_table[j][k]] for k in range(n)] for j in range(n)],
            dtype=np.int64,
        )
        self.sigma_re = [
            np.array([[c.re for c in row] for row in fld.sigma_power_matrix(k)], dtype=np.int64)
            for k in range(n)
        ]
        self.sigma_im = [
            np.array([[c.im for c in row] for row in fld.sigma_power_matrix(k)], dtype=np.int64)
            for k in range(n)
        ]
        self.gamma = (spec.gamma.re, spec.gamma.im)
        self._perms = [(p, permutation_sign(p)) for p in permutations(range(n))]
        self._mult_l1 = int(np.abs(self.mult_re).sum() + np.abs(self.mult_im).sum())
        self._sigma_l1 = max(
            int((np.abs(sr) + np.abs(si)).sum(axis=1).max())
            for sr, si in zip(self.sigma_re, self.sigma_im)
        )

    # -- bookkeeping -------------------------------------------------------

    def split(self, coords: np.ndarray):
        """(N, 2n^2) integer coordinates -> list of n parts, each (re, im) of shape (N, n)."""
        n = self.n
        c = coords.reshape(coords.shape[0], n, n, 2)
        return [(c[:, i, :, 0], c[:, i, :, 1]) for i in range(n)]

    def nrd_magnitude_bound(self, max_coord: int) -> int:
        n = self.n
        g = max(1, abs(self.gamma[0]) + abs(self.gamma[1]))
        entry = max_coord * self._sigma_l1 * g
        prod = entry
        worst = prod
        for _ in range(n - 1):
            prod = 2 * prod * entry * self._mult_l1
            worst = max(worst, prod)
        return factorial(n) * worst + 1

    def _dtype_for(self, coords: np.ndarray):
        if coords.size == 0:
            return np.int64
        m = int(np.abs(coords).max())
        return np.int64 if self.nrd_magnitude_bound(m) < _INT64_SAFE else object

    # -- field arithmetic --------------------------------------------------

    def field_mul(self, a, b):
        ar, ai = a
        br, bi = b
        n = self.n
        out_r = np.zeros(ar.shape, dtype=ar.dtype)
        out_i = np.zeros(ar.shape, dtype=ar.dtype)
        for j in range(n):
            for k in range(n):
                pr, pi = _gmul(ar[:, j], ai[:, j], br[:, k], bi[:, k])
                for l in range(n):
                    cr = int(self.mult_re[j, k, l])
                    ci = int(self.mult_im[j, k, l])
                    if cr == 0 and ci == 0:
                        continue
                    tr, ti = _gmul(pr, pi, cr, ci)
                    out_r[:, l] += tr
                    out_i[:, l] += ti
        return out_r, out_i

    def sigma(self, a, k: int):
        ar, ai = a
        if k % self.n == 0:
            return ar, ai
        sr = self.sigma_re[k % self.n].astype(ar.dtype)
        si = self.sigma_im[k % self.n].astype(ar.dtype)
        # (S x)_r = sum_j S_rj x_j
        out_r = ar @ sr.T - ai @ si.T
        out_i = ar @ si.T + ai @ sr.T
        return out_r, out_i

    def psi_entries(self, parts):
        n = self.n
        gr, gi = self.gamma
        rows = []
        for r in range(n):
            row = []
            for c in range(n):
                er, ei = self.sigma(parts[(r - c) % n], c)
                if r < c:
                    er, ei = _gmul(er, ei, gr, gi)
                row.append((er, ei))
            rows.append(row)
        return rows

    def reduced_norm(self, coords: np.ndarray):
        """Exact det psi(x) for each row of ``coords``; returns (re, im) integer arrays."""
        coords = np.asarray(coords)
        dtype = self._dtype_for(coords)
        coords = coords.astype(dtype)
        npts = coords.shape[0]
        parts = self.split(coords)
        mat = self.psi_entries(parts)
        n = self.n
        tot_r = np.zeros((npts, n), dtype=dtype)
        tot_i = np.zeros((npts, n), dtype=dtype)
        for perm, sign in self._perms:
            term = mat[0][perm[0]]
            for r in range(1, n):
                term = self.field_mul(term, mat[r][perm[r]])
            if sign > 0:
                tot_r = tot_r + term[0]
                tot_i = tot_i + term[1]
            else:
                tot_r = tot_r - term[0]
                tot_i = tot_i - term[1]
        if n > 1 and (np.any(tot_r[:, 1:] != 0) or np.any(tot_i[:, 1:] != 0)):
            bad = int(np.nonzero(np.any(tot_r[:, 1:] != 0, axis=1) | np.any(tot_i[:, 1:] != 0, axis=1))[0][0])
            raise InternalConsistencyError(
                f"reduced norm of coordinates {coords[bad].tolist()} is not in Q(i); "
                "check sigma_matrix and gamma in the algebra config"
            )
        return tot_r[:, 0], tot_i[:, 0]

    # -- ideal matrices -----------------------------------------------------

    def generator_product_tensor(self) -> np.ndarray:
        """T[k, m, :] = coordinates of g_k * g_m in the generator basis."""
        spec = self.spec
        d = spec.lattice_dim
        gens = [spec.from_coords([1 if i == k else 0 for i in range(d)]) for k in range(d)]
        tensor = np.zeros((d, d, d), dtype=np.int64)
        for k, gk in enumerate(gens):
            for m, gm in enumerate(gens):
                tensor[k, m] = (gk * gm).to_coords()
        return tensor

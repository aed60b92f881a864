"""Canonical Hermite normal forms of full-rank integer lattices containing N*Z^d.

Every principal left ideal L x of the natural order contains N*L with
N = |Nrd(x)|^2, so its Hermite normal form can be computed with all
off-pivot arithmetic reduced modulo N. That keeps every intermediate below
N^2 and lets the kernel run in int64.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _xgcd(a, b):
    # returns g > 0, s, t with s*a + t*b = g; requires a > 0
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@njit(cache=True)
def hnf_mod(rows, modulus):
    """Upper-triangular HNF of the lattice spanned by ``rows`` and ``modulus * Z^d``."""
    r, d = rows.shape
    pool = np.empty((r, d), dtype=np.int64)
    for i in range(r):
        for c in range(d):
            pool[i, c] = rows[i, c] % modulus
    out = np.zeros((d, d), dtype=np.int64)
    h = np.zeros(d, dtype=np.int64)
    for k in range(d):
        for c in range(d):
            h[c] = 0
        h[k] = modulus
        for p in range(r):
            b = pool[p, k]
            if b == 0:
                continue
            a = h[k]
            g, s, t = _xgcd(a, b)
            ag = a // g
            bg = b // g
            h[k] = g
            pool[p, k] = 0
            for c in range(k + 1, d):
                hv = h[c]
                rv = pool[p, c]
                h[c] = (s * hv + t * rv) % modulus
                pool[p, c] = (ag * rv - bg * hv) % modulus
        for c in range(d):
            out[k, c] = h[c]
    # reduce entries above each pivot into [0, pivot)
    for k in range(d):
        piv = out[k, k]
        for j in range(k):
            q = out[j, k] // piv
            if q != 0:
                for c in range(k, d):
                    out[j, c] -= q * out[k, c]
    return out


@njit(cache=True)
def hnf_mod_batch(mats, moduli):
    b, r, d = mats.shape
    out = np.empty((b, d, d), dtype=np.int64)
    for i in range(b):
        out[i] = hnf_mod(mats[i], moduli[i])
    return out


def canonical_key(hnf: np.ndarray) -> bytes:
    """Compact hashable form of an upper-triangular HNF."""
    iu = np.triu_indices(hnf.shape[-1])
    return np.ascontiguousarray(hnf[iu]).tobytes()


def field_ideal_key(x) -> tuple:
    """Canonical basis of the principal O_E-ideal generated by the FieldElement ``x``."""
    from .gaussian import GaussianInt

    fld = x.field
    n = fld.degree
    rows = []
    for j in range(n):
        for t in (GaussianInt(1), GaussianInt(0, 1)):
            basis = fld.element([t if k == j else 0 for k in range(n)])
            prod = basis * x
            row = []
            for c in prod.coords:
                row.extend((c.re, c.im))
            rows.append(row)
    modulus = x.norm().norm()
    h = hnf_mod(np.array(rows, dtype=np.int64), np.int64(modulus))
    return tuple(int(v) for v in h[np.triu_indices(2 * n)])

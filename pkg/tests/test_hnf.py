import numpy as np
import pytest
import sympy

from cdalattice.analysis import _product_tensor, group_ideals_pairwise, ideal_keys, ideal_matrices
from cdalattice.batch import BatchArithmetic
from cdalattice.hnf import canonical_key, hnf_mod
from conftest import random_nonzero


def _exact_hnf(basis):
    b = [list(map(int, r)) for r in basis]
    d = len(b[0])
    out = []
    for k in range(d):
        pivots = [r for r in b if r[k] != 0]
        rest = [r for r in b if r[k] == 0]
        while len(pivots) > 1:
            pivots.sort(key=lambda r: abs(r[k]))
            p = pivots[0]
            new = [p]
            for r in pivots[1:]:
                q = r[k] // p[k]
                r = [a - q * c for a, c in zip(r, p)]
                (new if r[k] != 0 else rest).append(r)
            pivots = new
        p = pivots[0]
        if p[k] < 0:
            p = [-v for v in p]
        out.append(p)
        b = rest
    for k in range(d):
        for j in range(k):
            q = out[j][k] // out[k][k]
            out[j] = [a - q * c for a, c in zip(out[j], out[k])]
    return np.array(out, dtype=np.int64)


@pytest.mark.parametrize("seed", range(12))
def test_hnf_matches_exact_oracle(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 7))
    modulus = int(rng.integers(2, 40))
    rows = rng.integers(-50, 50, size=(d + 2, d))
    ours = hnf_mod(rows.astype(np.int64), modulus)
    gens = np.vstack([rows, modulus * np.eye(d, dtype=np.int64)])
    assert np.array_equal(ours, _exact_hnf(gens))


def test_hnf_modulus_one_is_identity():
    rows = np.array([[3, 5], [7, 11]], dtype=np.int64)
    assert np.array_equal(hnf_mod(rows, 1), np.eye(2, dtype=np.int64))


def test_hnf_determinant_is_index(golden, rng):
    tensor = _product_tensor(golden)
    ar = BatchArithmetic(golden)
    for _ in range(30):
        x = random_nonzero(golden, rng, 2)
        c = np.array([x.to_coords()], dtype=np.int64)
        re, im = ar.reduced_norm(c)
        nsq = int(re[0] ** 2 + im[0] ** 2)
        mats = ideal_matrices(tensor, c)
        h = hnf_mod(mats[0], nsq)
        det = int(np.prod(np.diag(h)))
        assert det == abs(int(sympy.Matrix(mats[0].tolist()).det()))
        assert det == nsq ** golden.degree


def test_ideal_keys_match_pairwise(golden, rng):
    ar = BatchArithmetic(golden)
    tensor = _product_tensor(golden)
    elems = [random_nonzero(golden, rng, 1) for _ in range(40)]
    units = [golden.u(), golden.embed_field(golden.field.generator), golden.one() + golden.u() * golden.embed_field(golden.field.generator)]
    # include unit multiples so classes with several members occur
    elems += [units[k % 2] * elems[k] for k in range(20)]
    coords = np.array([e.to_coords() for e in elems], dtype=np.int64)
    re, im = ar.reduced_norm(coords)
    nsq = (re * re + im * im).astype(np.int64)
    keys = ideal_keys(tensor, coords, nsq)
    classes = group_ideals_pairwise(elems)
    index = {e.to_coords(): k for k, cls in enumerate(classes) for e in cls}
    for a in range(len(elems)):
        for b in range(len(elems)):
            same_key = keys[a] == keys[b]
            same_cls = index[elems[a].to_coords()] == index[elems[b].to_coords()]
            assert same_key == same_cls
    assert len(set(keys)) == len(classes) < len(elems)


def test_canonical_key_distinguishes():
    a = np.array([[2, 1], [0, 3]], dtype=np.int64)
    b = np.array([[2, 0], [0, 3]], dtype=np.int64)
    assert canonical_key(a) != canonical_key(b)
    assert canonical_key(a) == canonical_key(a.copy())

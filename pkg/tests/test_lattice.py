import itertools
import math

import mpmath
import numpy as np
import pytest

from cdalattice.algebra import reduced_norm
from cdalattice.errors import BudgetExceededError
from cdalattice.lattice import (
    BOUNDARY_TOL,
    build_lattice,
    collect_ball,
    count_points,
    enumerate_ball,
    iter_batches,
)


def _independent_gram(spec, prec):
    with mpmath.workprec(prec + 20):
        base = [mpmath.mpc(mpmath.mpf(a), mpmath.mpf(b)) for a, b in spec.embeddings]
        n = spec.degree
        # polish with Newton so the oracle does not inherit the string precision
        coeffs = [mpmath.mpc(c.re, c.im) for c in spec.field.min_poly]
        emb = [mpmath.findroot(lambda z: sum(c * z ** k for k, c in enumerate(coeffs)), e) for e in base]
        g = mpmath.mpc(spec.gamma.re, spec.gamma.im)
        mats = []
        for i in range(n):
            for j in range(n):
                for t in (1, mpmath.mpc(0, 1)):
                    # u^i * t * theta^j: part i holds t*theta^j
                    m = mpmath.matrix(n, n)
                    for r in range(n):
                        c = (r - i) % n
                        v = t * emb[c] ** j
                        m[r, c] = v * g if r < c else v
                    mats.append(m)
        d = len(mats)
        gram = mpmath.matrix(d, d)
        for a in range(d):
            for b in range(d):
                gram[a, b] = mpmath.re(sum(mats[a][r, c] * mpmath.conj(mats[b][r, c]) for r in range(n) for c in range(n)))
        return gram


@pytest.mark.parametrize("name", ["golden", "perfect4"])
def test_gram_matches_independent_recompute(name, golden, perfect4):
    spec = golden if name == "golden" else perfect4
    lat = build_lattice(spec, 128)
    oracle = _independent_gram(spec, 128)
    d = lat.dim
    assert d == 2 * spec.degree ** 2
    worst = max(abs(lat.gram_mp[a, b] - oracle[a, b]) for a in range(d) for b in range(d))
    assert worst < mpmath.mpf(2) ** -64
    assert np.allclose(lat.gram, lat.gram.T)
    assert np.all(np.diag(lat.gram) > 0)
    assert np.allclose(lat.cholesky.T @ lat.cholesky, lat.gram, atol=1e-12)


def test_golden_generator_norms(golden_lattice):
    assert golden_lattice.gram[0, 0] == pytest.approx(2.0, abs=1e-15)
    # generator psi(u) is at index 2*(1*2+0) = 4
    assert golden_lattice.gram[4, 4] == pytest.approx(2.0, abs=1e-15)


def test_build_is_deterministic(golden):
    a = build_lattice(golden)
    b = build_lattice(golden)
    assert np.array_equal(a.gram, b.gram)
    assert np.array_equal(a.cholesky, b.cholesky)


def _brute_force(lat, radius):
    lam = np.linalg.eigvalsh(lat.gram).min()
    bound = int(math.floor(radius * math.sqrt(1 + BOUNDARY_TOL) / math.sqrt(lam)))
    rng = range(-bound, bound + 1)
    pts = np.array(list(itertools.product(rng, repeat=lat.dim)), dtype=np.int64)
    ns = lat.norm_sq(pts)
    keep = (ns <= radius * radius * (1 + BOUNDARY_TOL)) & np.any(pts != 0, axis=1)
    return {tuple(int(v) for v in p) for p in pts[keep]}


@pytest.mark.parametrize("radius", [1.0, math.sqrt(2), 2.0, 2.5, 3.0])
def test_enumeration_matches_brute_force(golden_lattice, radius):
    got = [p.coords for p in enumerate_ball(golden_lattice, radius)]
    assert len(got) == len(set(got))
    assert set(got) == _brute_force(golden_lattice, radius)


def test_small_balls(golden_lattice, golden):
    assert list(enumerate_ball(golden_lattice, 0.0)) == []
    assert list(enumerate_ball(golden_lattice, 1.0)) == []
    pts = list(enumerate_ball(golden_lattice, math.sqrt(2)))
    assert len(pts) == 8
    expect = set()
    for part in (0, 1):
        for unit in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            parts = [[0, 0], [0, 0]]
            parts[part] = [unit, 0]
            expect.add(golden.element(parts))
    assert {p.element for p in pts} == expect
    assert all(p.boundary for p in pts)


def test_count_points(golden_lattice):
    assert count_points(golden_lattice, [1, math.sqrt(2)]) == [(1.0, 0), (math.sqrt(2), 8)]
    counts = count_points(golden_lattice, [1, math.sqrt(2), 2, 3, 4])
    assert [c for _, c in counts] == [0, 8, 48, 1368, 12312]
    assert all(a[1] <= b[1] for a, b in zip(counts, counts[1:]))


def test_points_are_exact(golden_lattice):
    for p in enumerate_ball(golden_lattice, 2.5):
        assert golden_lattice.spec.from_coords(p.coords) == p.element
        assert p.element.to_coords() == p.coords
        assert reduced_norm(p.element) == p.nrd
        m = golden_lattice.psi_numeric(p.coords)[0]
        assert float(np.sum(np.abs(m) ** 2)) == pytest.approx(p.norm_sq, rel=1e-12)


def test_lll_gives_same_points(golden_lattice, golden_lattice_lll):
    assert golden_lattice_lll.reduction is not None
    a = collect_ball(golden_lattice, 4.0)
    b = collect_ball(golden_lattice_lll, 4.0)
    assert np.array_equal(a.coords, b.coords)
    assert np.allclose(a.norm_sq, b.norm_sq, rtol=1e-12)


@pytest.mark.parametrize("workers", [2, 3])
def test_worker_count_independent(golden_lattice, workers):
    a = list(iter_batches(golden_lattice, 3.5))
    b = list(iter_batches(golden_lattice, 3.5, workers=workers))
    assert len(a) == len(b)
    for x, y in zip(a, b):
        assert np.array_equal(x.coords, y.coords)
        assert np.array_equal(x.norm_sq, y.norm_sq)


def test_perfect4_reduction_invariance(perfect4):
    reduced = build_lattice(perfect4)
    plain = build_lattice(perfect4, reduce=False)
    a = collect_ball(reduced, 3.0)
    b = collect_ball(plain, 3.0)
    assert len(a) == 224
    assert np.array_equal(a.coords, b.coords)
    # the 16 points of norm^2 = 4 are the monomials u^k * {1, -1, i, -i}
    small = collect_ball(reduced, 2.0)
    assert len(small) == 16
    assert small.boundary.all()


def test_budget_exceeded(golden_lattice):
    with pytest.raises(BudgetExceededError):
        list(enumerate_ball(golden_lattice, 30.0))
    with pytest.raises(BudgetExceededError):
        list(enumerate_ball(golden_lattice, 4.0, point_cap=1000))


def test_negative_radius(golden_lattice):
    with pytest.raises(ValueError):
        list(enumerate_ball(golden_lattice, -1.0))


def test_predicted_count_tracks_actual(golden_lattice):
    actual = count_points(golden_lattice, [8.0])[0][1]
    assert 0.5 < golden_lattice.predicted_count(8.0) / actual < 2.0

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st

from planarends import concat as C
from planarends import surfacegen as sg
from planarends.configspace import (configuration_from_json, configuration_to_json, forces,
                                    point_jacobian, realize, reduce)
from planarends.verify import random_configuration

from conftest import naive_forces

sizes_st = st.lists(st.integers(1, 3), min_size=2, max_size=4).map(tuple)
seed_st = st.integers(0, 2 ** 32 - 1)
cplx_st = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


def _cfg(sizes, seed):
    return random_configuration(sizes, np.random.default_rng(seed), min_gap=0.2)


def _scale(cfg):
    pts, _ = cfg.flat()
    return 1 + np.max(np.abs(forces(cfg).forces)) * (1 + np.max(np.abs(pts)))


@given(sizes_st, seed_st)
def test_forces_match_pairwise_sums(sizes, seed):
    cfg = _cfg(sizes, seed)
    np.testing.assert_allclose(forces(cfg).forces, naive_forces(cfg.levels),
                               rtol=1e-12, atol=1e-12 * _scale(cfg))


@given(sizes_st, seed_st, cplx_st, st.floats(0.2, 5.0), st.floats(0, 2 * np.pi))
def test_force_equivariance(sizes, seed, w, r, phi):
    cfg = _cfg(sizes, seed)
    F = forces(cfg).forces
    tol = 1e-9 * _scale(cfg)
    np.testing.assert_allclose(forces(cfg.translate(w)).forces, F, atol=tol)
    lam = r * np.exp(1j * phi)
    np.testing.assert_allclose(forces(cfg.scale(lam)).forces, F / lam, atol=tol / r)
    np.testing.assert_allclose(forces(cfg.conj()).forces, np.conj(F), atol=tol)


@given(sizes_st, seed_st)
def test_sum_identities(sizes, seed):
    cfg = _cfg(sizes, seed)
    F = forces(cfg).forces
    pts, _ = cfg.flat()
    tol = 1e-10 * _scale(cfg)
    assert abs(F.sum()) < tol
    assert abs((pts * F).sum() - (1 - sum(1 / n for n in sizes))) < tol


@given(sizes_st, seed_st)
def test_reduce_realize_round_trip(sizes, seed):
    cfg = _cfg(sizes, seed)
    back = realize(reduce(cfg))
    for a, b in zip(cfg.levels, back.levels):
        np.testing.assert_allclose(a, b, atol=1e-12)
    again = configuration_from_json(configuration_to_json(cfg))
    for a, b in zip(cfg.levels, again.levels):
        np.testing.assert_array_equal(a, b)


@given(sizes_st, seed_st, st.integers(0, 1000))
def test_point_jacobian_matches_difference_quotient(sizes, seed, col_seed):
    cfg = _cfg(sizes, seed)
    pts, ptr = cfg.flat()
    J = point_jacobian(cfg).toarray()
    j = col_seed % len(pts)
    h = 1e-6 * (1 + 1j) / np.sqrt(2)
    k = int(np.searchsorted(ptr, j, side="right") - 1)
    i = j - ptr[k]

    def F_with(delta):
        lv = np.array(cfg.levels[k])
        lv[i] += delta
        return forces(cfg.with_level(cfg.k_min + k, lv)).forces

    fd = (F_with(h) - F_with(-h)) / (2 * h)
    np.testing.assert_allclose(J[:, j], fd, atol=1e-6 * _scale(cfg))


@given(st.integers(-50, 50), st.integers(1, 60))
def test_fibonacci_word_properties(m0, length):
    rule = C.Substitution({0: (0, 1), 1: (0,)}, (0, 0))
    w = rule.indices(m0, m0 + length - 1)
    assert set(w.tolist()) <= {0, 1}
    assert not np.any((w[:-1] == 1) & (w[1:] == 1))
    # balanced: ones in any two windows of equal length differ by at most one
    ref = rule.indices(0, length - 1)
    assert abs(int(w.sum()) - int(ref.sum())) <= 1


@given(st.lists(st.integers(0, 3), min_size=1, max_size=6), st.integers(-40, 40),
       st.integers(0, 30))
def test_periodic_word_properties(word, m0, length):
    rule = C.Periodic(tuple(word))
    T = rule.minimal_period()
    assert len(word) % T == 0
    a = rule.indices(m0, m0 + length)
    b = rule.indices(m0 + T, m0 + T + length)
    np.testing.assert_array_equal(a, b)


@given(st.floats(0.3, 2.0), st.floats(0.5, 3.0), st.integers(3, 12), st.integers(2, 9))
def test_obj_round_trip(c, height, ring, rows):
    import tempfile
    from pathlib import Path

    mesh = sg.catenoid_mesh(c, height, ring, rows)
    assume(mesh.min_area() > 0)
    with tempfile.TemporaryDirectory() as d:
        p = sg.export_mesh(mesh, Path(d) / "m.obj")
        V, F = sg.read_obj(p)
    np.testing.assert_allclose(V, mesh.vertices, rtol=1e-11, atol=1e-11)
    np.testing.assert_array_equal(F, mesh.triangles)
    assert mesh.is_consistently_oriented()
    assert mesh.genus() == 0 and mesh.boundary_loops() == 2

import json

import numpy as np
import pytest

from conftest import naive_forces
from planarends import balance
from planarends.configspace import (Configuration, DegenerateConfigurationError, LevelType,
                                    balance_defect, check_hypotheses, configuration_from_json,
                                    configuration_to_json, forces, forces_reduced,
                                    forces_to_json, is_balanced, jacobian, point_jacobian,
                                    realize, reduce)

S2 = np.sqrt(2) / 2


def _random_cfg(rng, sizes, k_min=0):
    return Configuration.from_points(
        [rng.normal(size=n) + 1j * rng.normal(size=n) for n in sizes], k_min=k_min)


def test_two_point_forces_by_hand():
    cfg = Configuration.from_points([[0j], [1 + 0j]])
    fs = forces(cfg)
    assert fs.force(0, 1) == pytest.approx(1.0)
    assert fs.force(1, 1) == pytest.approx(-1.0)
    assert fs.G(1) == pytest.approx(1.0)


def test_forces_match_pairwise_sums(rng):
    for sizes in [(1, 2, 1), (2, 3, 1, 2), (3, 3, 3)]:
        cfg = _random_cfg(rng, sizes)
        np.testing.assert_allclose(forces(cfg).forces, naive_forces(cfg.levels), rtol=1e-12)


def test_riemann_interior_forces_vanish(riemann):
    fs = forces(riemann)
    assert fs.interior_max() == 0.0
    assert fs.is_partial(-2) and fs.is_partial(2) and not fs.is_partial(0)
    assert all(fs.G(k) == pytest.approx(1.0) for k in range(-1, 3))
    assert is_balanced(riemann)


def test_level_weights_and_labels():
    cfg = Configuration.from_points({3: [0j], 4: [1j, 2j, 3j]})
    assert cfg.k_min == 3 and cfg.k_max == 4 and cfg.sizes == (1, 3)
    assert cfg.weight(4) == pytest.approx(1 / 3)
    assert cfg.label(cfg.flat_index(4, 2)) == (4, 2)
    assert LevelType((1, 3), 3).level_ptr().tolist() == [0, 1, 4]


def test_coincident_points_rejected():
    with pytest.raises(DegenerateConfigurationError) as e:
        Configuration.from_points([[0j], [1j, 1j]])
    assert e.value.pair is not None


def test_coincidence_across_levels_rejected():
    with pytest.raises(DegenerateConfigurationError):
        Configuration.from_points([[0j], [0j]])


def test_translation_scaling_conjugation(rng):
    cfg = _random_cfg(rng, (1, 2, 3, 1))
    F = forces(cfg).forces
    np.testing.assert_allclose(forces(cfg.translate(0.3 - 2j)).forces, F, rtol=1e-12)
    lam = 1.7 * np.exp(0.4j)
    np.testing.assert_allclose(forces(cfg.scale(lam)).forces, F / lam, rtol=1e-12)
    np.testing.assert_allclose(forces(cfg.conj()).forces, np.conj(F), rtol=1e-12)


def test_level_shift_keeps_forces(rng):
    cfg = _random_cfg(rng, (2, 1, 2))
    np.testing.assert_allclose(forces(cfg.shift_levels(5)).forces, forces(cfg).forces)


def test_telescoping(rng):
    cfg = _random_cfg(rng, (1, 2, 2, 3, 1))
    assert forces(cfg).telescoping_defect() < 1e-13


def test_ladder_reduced_coordinates(ladder):
    rp = reduce(ladder.inner, k0=0)
    np.testing.assert_allclose(rp.ells, [-S2 + 1j, 1j, S2 + 1j], atol=1e-15)
    np.testing.assert_allclose(rp.us[1], [2 * S2])
    np.testing.assert_allclose(rp.us[2], [2 * S2])
    assert len(rp.us[0]) == 0 and len(rp.us[3]) == 0
    assert rp.sizes == (1, 2, 2, 1)


def test_reduce_realize_round_trip(rng):
    cfg = _random_cfg(rng, (2, 1, 3, 2), k_min=-1)
    for k0 in (-1, 0, 2):
        back = realize(reduce(cfg, k0))
        for a, b in zip(back.levels, cfg.levels):
            np.testing.assert_allclose(a, b, atol=1e-14)


def test_reduced_forces_equal_point_forces(rng):
    cfg = _random_cfg(rng, (1, 3, 2, 1))
    fr = forces_reduced(reduce(cfg))
    np.testing.assert_allclose(fr.forces, forces(cfg).forces, rtol=1e-12)
    np.testing.assert_allclose(fr.stacked, forces(cfg).stacked, rtol=1e-12)


def test_reduced_forces_are_translation_free(rng):
    cfg = _random_cfg(rng, (2, 2))
    rp = reduce(cfg)
    a = forces_reduced(rp).stacked
    b = forces_reduced(rp.translate(5 + 5j)).stacked
    np.testing.assert_array_equal(a, b)


def _fd_jacobian(rp, h=1e-6):
    x0 = rp.stacked
    f0 = forces_reduced(rp).stacked
    J = np.zeros((len(f0), len(x0)), dtype=complex)
    for c in range(len(x0)):
        e = np.zeros(len(x0), dtype=complex)
        e[c] = h
        fp = forces_reduced(rp.replace_stacked(x0 + e)).stacked
        fm = forces_reduced(rp.replace_stacked(x0 - e)).stacked
        J[:, c] = (fp - fm) / (2 * h)
    return J


def test_jacobian_matches_finite_differences(rng):
    for sizes in [(1, 2, 1), (2, 3, 1, 2), (1, 1, 1)]:
        rp = reduce(_random_cfg(rng, sizes))
        J = jacobian(rp).to_dense()
        np.testing.assert_allclose(J, _fd_jacobian(rp), rtol=1e-6, atol=1e-6)


def test_jacobian_is_holomorphic(rng):
    rp = reduce(_random_cfg(rng, (1, 2, 2, 1)))
    x0 = rp.stacked
    h = 1e-6
    J = jacobian(rp).to_dense()
    e = np.zeros(len(x0), dtype=complex)
    e[1] = 1j * h
    d = (forces_reduced(rp.replace_stacked(x0 + e)).stacked
         - forces_reduced(rp.replace_stacked(x0 - e)).stacked) / (2 * h)
    np.testing.assert_allclose(d, 1j * J[:, 1], rtol=1e-6, atol=1e-6)


def test_jacobian_is_block_tridiagonal(rng):
    cfg = _random_cfg(rng, (1, 2, 3, 2, 2, 1))
    band = jacobian(cfg)
    assert all(abs(k - m) <= 1 for k, m in band.blocks)
    dense = band.to_dense()
    off = band.offsets
    for j in range(len(band.dims)):
        for i in range(len(band.dims)):
            if abs(i - j) > 1:
                assert not dense[off[j]:off[j + 1], off[i]:off[i + 1]].any()
    np.testing.assert_array_equal(band.to_sparse().toarray(), dense)


def test_jacobian_ignores_ell_two_levels_down(rng):
    cfg = _random_cfg(rng, (1, 2, 2, 2, 1))
    band = jacobian(cfg)
    # rows of level 3 against the ell_2 column of level 2
    blk = band.block(3, 2)
    fd = _fd_jacobian(reduce(cfg))
    off = band.offsets
    np.testing.assert_allclose(blk[:, 0], fd[off[3]:off[4], off[2]], atol=1e-6)


def test_point_jacobian_matches_fd(rng):
    cfg = _random_cfg(rng, (2, 2, 1))
    pts, ptr = cfg.flat()
    J = point_jacobian(cfg).toarray()
    h = 1e-6
    for c in range(len(pts)):
        p = pts.copy()
        p[c] += h
        m = pts.copy()
        m[c] -= h
        fp = forces(Configuration.from_points([p[ptr[j]:ptr[j + 1]] for j in range(3)])).forces
        fm = forces(Configuration.from_points([m[ptr[j]:ptr[j + 1]] for j in range(3)])).forces
        np.testing.assert_allclose(J[:, c], (fp - fm) / (2 * h), rtol=1e-6, atol=1e-7)


def test_balance_defect_allows_constant_g(riemann):
    assert balance_defect(forces(riemann)) == 0.0


def test_balance_defect_flags_unbalanced(rng):
    assert not is_balanced(_random_cfg(rng, (1, 2, 1, 1)))


def test_hypotheses_report(ladder):
    rep = check_hypotheses(ladder.inner, max_distinct=10)
    assert rep.width == 2 and rep.finitely_valued
    assert rep.min_margin == pytest.approx(1.0)
    assert check_hypotheses(ladder.inner, max_distinct=2).finitely_valued is False


def test_json_round_trip(rng):
    cfg = _random_cfg(rng, (1, 2), k_min=-3)
    text = json.dumps(configuration_to_json(cfg))
    back = configuration_from_json(text)
    assert back.k_min == -3
    for a, b in zip(back.levels, cfg.levels):
        np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("bad", [
    {"levels": [{"k": 0, "points": [[0, 0]]}], "extra": 1},
    {"levels": [{"k": 0.5, "points": [[0, 0]]}]},
    {"levels": [{"k": 0, "points": [[0, 0, 0]]}]},
    {"levels": [{"k": 0, "points": [[0, 0]]}, {"k": 0, "points": [[1, 0]]}]},
    {"levels": []},
])
def test_json_rejects_malformed(bad):
    with pytest.raises(ValueError):
        configuration_from_json(bad)


def test_forces_json_marks_partial_levels(riemann):
    out = forces_to_json(forces(riemann))
    assert [e["partial"] for e in out["levels"]] == [True, False, False, False, True]
    assert "G" not in out["levels"][0]


def test_fan_block_is_balanced(fan2):
    assert balance_defect(forces(fan2.inner)) < 1e-14
    assert balance.residual_force(fan2) == pytest.approx(3 / 4j)

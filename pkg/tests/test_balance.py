import json

import numpy as np
import pytest

from planarends import balance as B
from planarends.configspace import Configuration, forces


def test_chain_residual_is_inverse_step():
    for a in (1.0, 2.5, 1 - 1j):
        for h in (1, 3):
            assert B.residual_force(B.chain(a, h)) == pytest.approx(1 / a, rel=1e-14)


@pytest.mark.parametrize("n", range(1, 7))
def test_fan_residual(n):
    fc = B.fan(n)
    assert B.residual_force(fc) == pytest.approx((n + 1) / (2j * n), rel=1e-12)
    assert B.residual(fc).balanced


def test_ladder_residual_and_determinant(ladder):
    assert B.residual_force(ladder) == pytest.approx(2 / 3j, rel=1e-12)
    cert = B.certify(ladder)
    assert abs(cert.determinant) == pytest.approx(4 / 243, rel=1e-10)
    assert cert.dimension == 5 and cert.passed


def test_residual_identities(ladder):
    rep = B.residual(ladder)
    assert rep.sum_deviation < 1e-14
    assert rep.moment_deviation < 1e-14
    assert rep.endpoint_deviation < 1e-14
    # last force is minus the first
    assert rep.F_last == pytest.approx(-rep.F_C)


def test_finite_configuration_shape():
    with pytest.raises(ValueError):
        B.FiniteConfiguration.from_points([[0j, 1j], [2j]])
    with pytest.raises(ValueError):
        B.FiniteConfiguration.from_points([[0j]])
    fc = B.FiniteConfiguration(Configuration.from_points({5: [0j], 6: [1j]}))
    assert fc.inner.k_min == 0 and fc.height == 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_newton_recovers_fan(n):
    ref = B.fan(n)
    pts = [lv.copy() for lv in ref.levels]
    pts[1] = pts[1] + 0.1 * (1 + 1j)
    res = B.newton_balance((1, n, 1), init=B.FiniteConfiguration.from_points(pts))
    np.testing.assert_allclose(np.sort_complex(res.block.levels[1]),
                               np.sort_complex(ref.levels[1]), atol=1e-10)
    assert res.iterations <= 8
    assert res.history[-1] <= 1e-12 * (1 + abs(res.residual))


def test_newton_from_type_and_endpoints():
    res = B.newton_balance((1, 2, 2, 1), endpoints=(0, 3j))
    assert B.residual(res.block).balanced
    cert = B.certify(res.block)
    assert cert.passed


def test_initial_guess_layout():
    g = B.initial_guess((1, 3, 1), (0, 2j))
    assert g.levels[0][0] == 0 and g.levels[2][0] == 2j
    np.testing.assert_allclose(g.levels[1].imag, 1.0)


def test_newton_singular_jacobian():
    init = B.FiniteConfiguration.from_points([[0j], [1 + 0j], [1 + 1j]])
    with pytest.raises(B.SingularJacobianError):
        B.newton_balance((1, 1, 1), init=init)


def test_newton_iteration_cap():
    ref = B.fan(3)
    pts = [lv.copy() for lv in ref.levels]
    pts[1] = pts[1] + 0.1
    with pytest.raises(B.NonConvergenceError):
        B.newton_balance((1, 3, 1), init=B.FiniteConfiguration.from_points(pts), max_iter=1)


def test_newton_type_mismatch():
    with pytest.raises(ValueError):
        B.newton_balance((1, 2, 1), init=B.fan(3))
    with pytest.raises(ValueError):
        B.newton_balance()


def test_certify_rejects_unbalanced():
    fc = B.FiniteConfiguration.from_points([[0j], [0.3 + 1j, -0.9 + 1j], [2j]])
    with pytest.raises(B.BalanceError):
        B.certify(fc)


def test_scaling_divides_residual():
    fc = B.fan(3)
    lam = 2 - 1j
    assert B.residual_force(B.scale(fc, lam)) == pytest.approx(B.residual_force(fc) / lam)
    with pytest.raises(ValueError):
        B.scale(fc, 0)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_compatible_fan_scale(n):
    # residual 1/(2i) needs the factor (n+1)/n
    fc = B.scale_to(B.fan(n), 1 / 2j)
    assert B.residual_force(fc) == pytest.approx(1 / 2j, rel=1e-13)
    np.testing.assert_allclose(fc.last - fc.first, 2j * (n + 1) / n, rtol=1e-13)


def test_make_compatible():
    blocks = B.make_compatible([B.chain(), B.fan(2), B.ladder22()])
    for b in blocks:
        assert B.residual_force(b) == pytest.approx(0.5 / 1j, rel=1e-13)


def test_builtin_lookup():
    assert B.builtin("fan", n=4).sizes == (1, 4, 1)
    with pytest.raises(KeyError):
        B.builtin("nope")


def test_block_json_round_trip(ladder):
    obj = json.loads(json.dumps(B.block_to_json(ladder, name="ladder")))
    back = B.block_from_json(obj)
    for a, b in zip(back.levels, ladder.levels):
        np.testing.assert_array_equal(a, b)
    obj["residual"] = [1.0, 0.0]
    with pytest.raises(ValueError):
        B.block_from_json(obj)


def test_certificate_json(ladder):
    d = B.certify(ladder).to_json()
    assert d["pass"] and d["dimension"] == 5
    assert d["abs_determinant"] == pytest.approx(4 / 243)


def test_balanced_after_translation(ladder):
    moved = ladder.translate(3 - 1j)
    assert forces(moved.inner).interior_max() < 1e-14

import json

import numpy as np
import pytest

from vincl.instances import example_3_2, example_3_3, example_4_7
from vincl.operators import (
    AffineMap,
    ConstantSetMap,
    Constants,
    EmptySetError,
    NearestNodeSetMap,
    eval_H_on_point,
    eval_M_on_point,
    hausdorff_distance,
    inclusion_residual,
    instance_from_dict,
    instance_to_dict,
    ordering_flags,
)
from vincl.resolvent import forward
from vincl.space import DimensionMismatchError


def test_affine_map_exact_evaluation():
    m = AffineMap(np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([0.5, -0.5]))
    np.testing.assert_array_equal(m([1.0, 1.0]), [3.5, 6.5])


def test_affine_map_linearity_identity():
    rng = np.random.default_rng(0)
    m = AffineMap(rng.standard_normal((3, 3)), rng.standard_normal(3))
    for _ in range(50):
        x, y = rng.standard_normal((2, 3))
        lhs = m(x + y) - m(x) - m(y) + m(np.zeros(3))
        np.testing.assert_allclose(lhs, np.zeros(3), atol=1e-12)


def test_affine_map_shape_validation():
    with pytest.raises(ValueError):
        AffineMap(np.zeros((2, 3)), np.zeros(2))
    with pytest.raises(DimensionMismatchError):
        AffineMap(np.zeros((2, 2)), np.zeros(3))


def test_hausdorff_singletons_and_identical_sets():
    assert hausdorff_distance([[0.0, 0.0]], [[3.0, 4.0]]) == 5.0
    assert hausdorff_distance([[0.0, 0.0], [1.0, 0.0]],
                              [[0.0, 0.0], [1.0, 0.0]]) == 0.0


def test_hausdorff_asymmetric_covering():
    # brute force over the 2x1 pairings gives 2
    assert hausdorff_distance([[0.0, 0.0], [2.0, 0.0]], [[0.0, 0.0]]) == 2.0


def test_hausdorff_empty_and_mismatch_errors():
    with pytest.raises(EmptySetError):
        hausdorff_distance([], [[1.0, 2.0]])
    with pytest.raises(DimensionMismatchError):
        hausdorff_distance([[1.0, 2.0]], [[1.0, 2.0, 3.0]])


def test_hausdorff_symmetry_and_triangle_inequality():
    rng = np.random.default_rng(1)
    for _ in range(500):
        a = rng.standard_normal((rng.integers(1, 5), 3))
        b = rng.standard_normal((rng.integers(1, 5), 3))
        c = rng.standard_normal((rng.integers(1, 5), 3))
        dab = hausdorff_distance(a, b)
        assert dab == pytest.approx(hausdorff_distance(b, a), rel=1e-12)
        assert dab <= (hausdorff_distance(a, c) + hausdorff_distance(c, b)
                       + 1e-12)


def test_eval_H_isotropic_instance():
    inst = example_3_2().instance
    # coefficient sum 4 - 3 + 2 + 1 = 4
    np.testing.assert_allclose(eval_H_on_point(inst, [1.0, 1.0]), [4.0, 4.0])
    np.testing.assert_allclose(eval_H_on_point(inst, [0.0, 0.0]), [0.0, 0.0])


def test_eval_H_slope_29_over_10():
    inst = example_4_7().instance
    np.testing.assert_allclose(eval_H_on_point(inst, [1.0, 0.0]), [2.9, 0.0],
                               rtol=1e-12)


def test_eval_H_dimension_mismatch():
    inst = example_3_2().instance
    with pytest.raises(DimensionMismatchError):
        eval_H_on_point(inst, [1.0, 2.0, 3.0])


def test_inclusion_residual_constructed_solution():
    inst = example_4_7().instance
    u_star = np.array([0.7, -1.3])
    omega = (np.asarray(inst.F(u_star, u_star))
             + eval_M_on_point(inst, u_star)[0])
    inst2 = inst.with_(omega=omega)
    rep = inclusion_residual(inst2, u_star, u_star, u_star)
    assert rep.value == pytest.approx(0.0, abs=1e-12)
    assert rep.memberships_ok

    # perturbing u gives a strictly positive affine residual
    u_off = u_star + np.array([1.0, 0.0])
    rep_off = inclusion_residual(inst2, u_off, u_off, u_off)
    assert rep_off.value > 0.1


def test_inclusion_residual_zero_fixed_point():
    inst = example_3_2().instance  # omega = 0, all maps linear
    rep = inclusion_residual(inst, [0.0, 0.0], [0.0, 0.0], [0.0, 0.0])
    assert rep.value == pytest.approx(0.0, abs=1e-15)


def test_inclusion_residual_membership_flagging():
    inst = example_4_7().instance
    rep = inclusion_residual(inst, [1.0, 0.0], [2.0, 0.0], [1.0, 0.0])
    assert rep.v_defect == pytest.approx(1.0)
    assert rep.w_defect == pytest.approx(0.0)
    assert not rep.memberships_ok


def test_inclusion_residual_lipschitz_along_segments():
    inst = example_4_7().instance
    fp = inst.F
    lm = (np.asarray(inst.f.matrix) - np.asarray(inst.g.matrix))
    lip = (np.linalg.norm(fp.first + fp.second, 2)
           + np.linalg.norm(lm, 2))
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b = rng.standard_normal((2, 2))
        ts = np.linspace(0.0, 1.0, 11)
        vals = []
        for t in ts:
            u = (1 - t) * a + t * b
            vals.append(inclusion_residual(inst, u, u, u).value)
        seg = np.linalg.norm(b - a) / 10.0
        diffs = np.abs(np.diff(vals))
        assert np.all(diffs <= lip * seg + 1e-9)


def test_nearest_node_set_map():
    s = NearestNodeSetMap(nodes=[[0.0, 0.0], [10.0, 0.0]],
                          point_sets=[[[1.0, 1.0]],
                                      [[9.0, 9.0], [8.0, 8.0]]])
    np.testing.assert_array_equal(s([0.2, 0.1])[0], [1.0, 1.0])
    assert len(s([9.5, 0.0])) == 2


def test_constant_set_map_nonempty():
    with pytest.raises(EmptySetError):
        ConstantSetMap(points=())


def test_forward_matches_hand_computation():
    inst = example_4_7().instance
    x = np.array([1.0, 2.0])
    lm = np.asarray(inst.f.matrix) - np.asarray(inst.g.matrix)
    expected = 2.9 * x + 0.35 * (lm @ x)
    np.testing.assert_allclose(forward(inst, x), expected, rtol=1e-12)


def test_ordering_flags():
    c = Constants(alpha=1.0, beta=2.0, mu1=1.0, mu2=0.5, gamma1=1.0,
                  gamma2=-1.0)
    flags = ordering_flags(c)
    assert any("alpha" in f for f in flags)
    assert any("gamma2" in f for f in flags)
    assert not any("mu1" in f for f in flags)
    # the main worked instance itself breaks alpha1 > beta1
    flags47 = ordering_flags(example_4_7().instance.constants)
    assert any("alpha1" in f for f in flags47)


def test_instance_json_round_trip():
    for named in (example_3_2(), example_3_3(), example_4_7()):
        d = instance_to_dict(named.instance)
        text = json.dumps(d)
        back = instance_from_dict(json.loads(text))
        assert back.dim == named.instance.dim
        assert back.rho == named.instance.rho
        np.testing.assert_allclose(back.omega, named.instance.omega)
        rng = np.random.default_rng(5)
        for _ in range(10):
            x = rng.standard_normal(back.dim)
            np.testing.assert_allclose(eval_H_on_point(back, x),
                                       eval_H_on_point(named.instance, x),
                                       rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(eval_M_on_point(back, x)[0],
                                       eval_M_on_point(named.instance, x)[0],
                                       rtol=1e-12, atol=1e-12)
        assert back.constants.asdict() == named.instance.constants.asdict()


def test_instance_from_dict_rejects_unknown_modes():
    d = instance_to_dict(example_4_7().instance)
    d["H"] = "multiplicative"
    with pytest.raises(ValueError, match="H mode"):
        instance_from_dict(d)

import math

import numpy as np
import pytest
from scipy.integrate import quad

from gnsharp.specfun import (
    E_op,
    MomentSpec,
    beta,
    moment_closed,
    moment_quad,
    script_beta,
    sphere_avg2,
    sphere_avg4,
    unit_ball_volume,
    unit_sphere_area,
)


def test_unit_sphere_area_known_values():
    assert unit_sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-15)
    assert unit_sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-15)
    assert unit_sphere_area(4) == pytest.approx(2.0 * math.pi**2, rel=1e-15)
    assert unit_sphere_area(5) == pytest.approx(8.0 * math.pi**2 / 3.0, rel=1e-15)


def test_unit_ball_volume_is_area_over_n():
    for n in range(2, 12):
        assert unit_ball_volume(n) == pytest.approx(unit_sphere_area(n) / n, rel=1e-14)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-15)


def test_beta_gamma_identity():
    assert beta(2.5, 1.5) == pytest.approx(
        math.gamma(2.5) * math.gamma(1.5) / math.gamma(4.0), rel=1e-14
    )
    with pytest.raises(ValueError):
        beta(-1.0, 2.0)
    with pytest.raises(ValueError):
        beta(1.0, 0.0)


def test_script_beta_positive_branch_is_plain_beta():
    for p, q in [(1.5, 2.0), (2.5, 0.5), (4.0, 3.0)]:
        assert script_beta(p, q) == beta(p, q)


def test_script_beta_negative_branch_encodes_heavy_tail_integral():
    # script_beta(p, q) with q < 0 must equal int_0^inf s^{p-1} (1+s)^{q-1} ds.
    for p, q in [(1.5, -2.5), (2.0, -3.0), (2.5, -4.5)]:
        oracle = quad(lambda s: s ** (p - 1.0) * (1.0 + s) ** (q - 1.0), 0.0, np.inf)[0]
        assert script_beta(p, q) == pytest.approx(oracle, rel=1e-10)


def test_script_beta_domain():
    with pytest.raises(ValueError):
        script_beta(2.0, 0.0)
    with pytest.raises(ValueError):
        script_beta(-1.0, 2.0)
    # reflected argument -q - p + 1 <= 0: divergent tail
    with pytest.raises(ValueError):
        script_beta(2.0, -0.5)


def test_moment_closed_exact_minus_cell():
    # n=3, alpha=1/2: int (1 - r^2/16)_+ over R^3 = 4 pi (64/3 - 64/5) = 512 pi / 15
    val = moment_closed(3, 0.5, MomentSpec(q1=0.0, q2=1.0))
    assert val == pytest.approx(512.0 * math.pi / 15.0, rel=1e-13)


def test_moment_closed_exact_plus_cell():
    # n=3, alpha=3/2: int (1 + r^2/16)^{-2} over R^3 = 256 pi * (pi/4) = 64 pi^2
    val = moment_closed(3, 1.5, MomentSpec(q1=0.0, q2=-2.0))
    assert val == pytest.approx(64.0 * math.pi**2, rel=1e-13)


@pytest.mark.parametrize(
    "n,alpha,q1,q2",
    [
        (3, 0.5, 0.0, 2.0),
        (3, 0.5, 2.0, -0.5),
        (4, 0.7, 4.0, 10.0 / 3.0),
        (5, 0.3, 2.0, 2.0 / 0.7),
        (3, 1.2, 0.0, -10.0),
        (4, 1.1, 2.0, -25.0),
        (5, 1.2, 0.0, -6.0),
    ],
)
def test_moment_quad_agrees_with_closed_form(n, alpha, q1, q2):
    spec = MomentSpec(q1=q1, q2=q2)
    assert moment_quad(n, alpha, spec) == pytest.approx(
        moment_closed(n, alpha, spec), rel=1e-9
    )


def test_moment_quad_barely_convergent_tail():
    # decay exponent n + q1 + 2 q2 = -1: the tail carries weight out to huge
    # radii and a truncation-based rule returns garbage here.
    for n, alpha, q1, q2 in [(3, 1.5, 2.0, -3.0), (5, 1.2, 4.0, -5.0), (4, 1.3, 2.0, -10.0 / 3.0)]:
        spec = MomentSpec(q1=q1, q2=q2)
        assert moment_quad(n, alpha, spec) == pytest.approx(
            moment_closed(n, alpha, spec), rel=1e-9
        )


def test_moment_domain_errors():
    with pytest.raises(ValueError):
        moment_closed(3, 0.5, MomentSpec(q1=0.0, q2=-1.0))  # support-edge divergence
    with pytest.raises(ValueError):
        moment_closed(3, 1.5, MomentSpec(q1=0.0, q2=-1.5))  # tail too fat: p+q2 >= 0
    with pytest.raises(ValueError):
        moment_closed(3, 1.5, MomentSpec(q1=-4.0, q2=-3.0))  # q1 <= -n
    with pytest.raises(ValueError):
        moment_closed(3, 1.0, MomentSpec(q1=0.0, q2=1.0))  # alpha = 1
    with pytest.raises(ValueError):
        moment_quad(3, -0.5, MomentSpec(q1=0.0, q2=1.0))


def test_sphere_avg2_is_trace_rule():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((4, 4))
    assert sphere_avg2(4, A) == pytest.approx(
        unit_sphere_area(4) / 4.0 * np.trace(A), rel=1e-14
    )
    with pytest.raises(ValueError):
        sphere_avg2(3, A)


def test_sphere_avg4_quartic_monomials():
    # int_{S^2} z1^2 z2^2 = 4 pi / 15 and int_{S^2} z1^4 = 4 pi / 5.
    lam = np.zeros((3, 3, 3, 3))
    lam[0, 0, 1, 1] = 1.0
    assert sphere_avg4(3, lam) == pytest.approx(4.0 * math.pi / 15.0, rel=1e-14)
    lam = np.zeros((3, 3, 3, 3))
    lam[0, 0, 0, 0] = 1.0
    assert sphere_avg4(3, lam) == pytest.approx(4.0 * math.pi / 5.0, rel=1e-14)


def test_sphere_avg4_monte_carlo():
    rng = np.random.default_rng(17)
    lam = rng.standard_normal((3, 3, 3, 3))
    z = rng.standard_normal((400_000, 3))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    mc = float(np.mean(np.einsum("ijkl,si,sj,sk,sl->s", lam, z, z, z, z)))
    mc *= unit_sphere_area(3)
    assert sphere_avg4(3, lam) == pytest.approx(mc, abs=0.05 * abs(mc) + 0.05)


def test_E_op_shape_check():
    with pytest.raises(ValueError):
        E_op(np.zeros((3, 3)))

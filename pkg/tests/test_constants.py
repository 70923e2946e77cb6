import math

import numpy as np
import pytest

from gnsharp.constants import (
    CutoffJet,
    GNParams,
    MINUS,
    PLUS,
    beta1_constraint,
    beta2_constraint,
    bp_jet,
    c_coefficients,
    exponents,
    flat_energy_constant,
    flat_mass_constant,
    j_coefficient,
    moment_ratio_assembly,
    sharp_constant,
    sigma,
    tau_star,
    zeta_chi,
)
from gnsharp.geometry import curvature_at_pole, space_form
from gnsharp.specfun import MomentSpec, moment_closed

# Sharp quotient values frozen from an independent high-precision evaluation
# of the closed beta-function forms.
SHARP_ORACLES = [
    (3, 0.5, MINUS, 20.0159692929),
    (4, 0.5, MINUS, 26.8711016924),
    (5, 0.8, MINUS, 25.1164125923),
    (3, 1.2, PLUS, 11.1254930056),
    (4, 1.2, PLUS, 14.8539418432),
    (3, 3.0, PLUS, 5.47790408953),  # Sobolev endpoint in dimension 3
]

J_ORACLES = [
    (3, 0.5, MINUS, 0.02151285780477097),
    (4, 1.2, PLUS, 0.000722142015078836),
]


def test_params_validation():
    with pytest.raises(ValueError):
        GNParams(2, 0.5, MINUS)
    with pytest.raises(ValueError):
        GNParams(3, 1.2, MINUS)
    with pytest.raises(ValueError):
        GNParams(3, 3.1, PLUS)  # beyond the critical exponent
    with pytest.raises(ValueError):
        GNParams(3, 0.5, "middle")
    with pytest.raises(ValueError):
        GNParams(3, 0.5, MINUS, m_frak=0.0)
    p = GNParams(4, 2.0, PLUS)  # the endpoint itself is admissible
    assert p.two_star == pytest.approx(4.0)
    assert p.mass_exponent == pytest.approx(4.0)


def test_interpolation_exponent_known_value():
    # n=4, alpha=1/2: gamma = 4/9.
    assert exponents(GNParams(4, 0.5, MINUS)).interp == pytest.approx(4.0 / 9.0, rel=1e-15)
    assert exponents(GNParams(4, 0.5, MINUS)).scale == pytest.approx(2.0 / 3.0, rel=1e-15)


def test_exponent_duality_across_regimes():
    # The reciprocals of the two interpolation weights (the minus-regime
    # formula continued to alpha > 1, and the plus-regime theta) sum to 1.
    for n, a in [(3, 1.2), (4, 1.4), (5, 1.15), (6, 1.3)]:
        ts = 2.0 * n / (n - 2.0)
        gamma_cont = ts * (1.0 - a) / ((ts - 2.0 * a) * (a + 1.0))
        theta = exponents(GNParams(n, a, PLUS)).interp
        assert 1.0 / theta + 1.0 / gamma_cont == pytest.approx(1.0, abs=1e-12)


def test_exponents_in_range():
    for n in (3, 5, 9):
        for a in (0.2, 0.5, 0.9):
            e = exponents(GNParams(n, a, MINUS))
            assert 0.0 < e.interp <= 1.0
            assert e.scale > 0.0
        for a in (1.05, 1.2):
            e = exponents(GNParams(n, a, PLUS))
            assert 0.0 < e.interp <= 1.0
            assert 0.0 < e.scale < 0.5


@pytest.mark.parametrize("n,alpha,regime,expected", SHARP_ORACLES)
def test_sharp_constant_frozen_oracles(n, alpha, regime, expected):
    assert sharp_constant(n, alpha, regime) == pytest.approx(expected, rel=1e-9)


def test_flat_constants_are_moments():
    # The mass and energy constants are specific radial moments of the
    # normalized extremal profile.
    for n, a in [(3, 0.5), (4, 0.7), (3, 1.2), (5, 1.15)]:
        for m in (a + 1.0, 2.0 * a, 2.0):
            want = moment_closed(n, a, MomentSpec(q1=0.0, q2=m / (1.0 - a)))
            assert flat_mass_constant(n, a, m) == pytest.approx(want, rel=1e-13)
        want = moment_closed(n, a, MomentSpec(q1=2.0, q2=2.0 * a / (1.0 - a))) / 16.0
        assert flat_energy_constant(n, a) == pytest.approx(want, rel=1e-13)


def test_sigma_matches_documented_combination():
    p = GNParams(3, 0.5, MINUS)
    x = sharp_constant(3, 0.5, MINUS)
    g = exponents(p).scale
    w = g / (2.0 * g + 1.0)
    assert sigma(p) == pytest.approx((g / (g + 1.0)) ** (1.0 - w) * x**w, rel=1e-14)
    q = GNParams(4, 1.2, PLUS)
    x = sharp_constant(4, 1.2, PLUS)
    t = exponents(q).scale
    w = t / (1.0 - t)
    assert sigma(q) == pytest.approx((t / (1.0 - 2.0 * t)) ** (1.0 - w) * x**w, rel=1e-14)


def test_zeta_chi_values_and_pole():
    z1, z2, chi = zeta_chi(3, 0.5)
    assert z1 == pytest.approx(8.0 / (3.0 * (3.0 * (-0.5) - 4.0)), rel=1e-14)
    assert z2 == pytest.approx(z1 / (8.0 * (3.0 * (-0.5) + 2.0 * 0.5 - 6.0)), rel=1e-14)
    assert chi == pytest.approx(9.0 * 0.25 - 2.0 * 6.0 * 0.5 + 7.0, rel=1e-14)
    with pytest.raises(ValueError):
        zeta_chi(4, 2.0)  # zeta_1 pole at alpha = 1 + 4/n


def test_chi_never_vanishes():
    # (n+6) a^2 - 2(n+3) a + (n+4) has negative discriminant for all n >= 3.
    for n in range(3, 40):
        disc = 4.0 * (n + 3.0) ** 2 - 4.0 * (n + 6.0) * (n + 4.0)
        assert disc < 0.0
        for a in np.linspace(0.05, n / (n - 2.0), 40):
            if abs(a - 1.0) < 1e-9:
                continue
            try:
                chi = zeta_chi(n, float(a))[2]
            except ValueError:
                continue  # zeta poles; chi itself is fine there
            assert chi > 0.0


@pytest.mark.parametrize(
    "n,alpha",
    [(3, 0.25), (3, 0.7), (4, 0.55), (6, 0.85), (3, 1.04), (4, 1.2), (5, 1.16), (8, 1.08)],
)
def test_moment_ratio_assembly_matches_closed_coefficients(n, alpha):
    got = moment_ratio_assembly(n, alpha)
    want = c_coefficients(n, alpha)
    # 1e-10: cells near alpha = 1 lose a couple of digits to cancellation in
    # the raw beta-ratio route.
    for key, ref in zip(["c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8"], want.as_tuple()):
        assert got[key] == pytest.approx(ref, rel=1e-10), key


@pytest.mark.parametrize("n,alpha", [(3, 0.25), (4, 0.55), (3, 1.04), (5, 1.16)])
def test_moment_ratio_null_combinations_vanish(n, alpha):
    got = moment_ratio_assembly(n, alpha)
    # First- and second-order unit-mass normalizations: these beta-ratio
    # combinations cancel identically whatever the cell.
    for key in ("l1", "l2", "k1", "k2", "k3"):
        assert abs(got[key]) < 1e-10, key


def test_moment_ratio_assembly_divergent_cell():
    with pytest.raises(ValueError):
        moment_ratio_assembly(3, 2.6)


@pytest.mark.parametrize("n,alpha,regime,expected", J_ORACLES)
def test_j_coefficient_frozen_oracles(n, alpha, regime, expected):
    assert j_coefficient(GNParams(n, alpha, regime)) == pytest.approx(expected, rel=1e-12)


def test_tau_star_stationarity():
    rng = np.random.default_rng(2)
    for _ in range(20):
        A, B = rng.uniform(0.2, 5.0, size=2)
        p, q = rng.uniform(0.3, 4.0, size=2)
        mf = rng.uniform(0.5, 3.0)
        tau, inf_val = tau_star(A, B, p, q, m_frak=mf)

        def objective(t):
            return A * t**p + mf * B * t**-q

        assert inf_val == pytest.approx(objective(tau), rel=1e-12)
        # strict local minimum
        assert objective(tau * 1.01) > inf_val
        assert objective(tau * 0.99) > inf_val
    with pytest.raises(ValueError):
        tau_star(-1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        tau_star(1.0, 1.0, 0.0, 1.0)


def test_bp_jet_solves_its_constraints():
    for n, a, regime, K in [(3, 0.5, MINUS, 1.0), (4, 1.2, PLUS, -1.0)]:
        params = GNParams(n, a, regime)
        curv = curvature_at_pole(space_form(n, K))
        jet = bp_jet(params, curv)
        assert jet.beta1 == pytest.approx(
            beta1_constraint(params, n * jet.a_scalar, curv.Sc), rel=1e-12
        )
        partial = CutoffJet(a_scalar=jet.a_scalar, beta1=jet.beta1)
        assert jet.beta2 == pytest.approx(beta2_constraint(params, partial, curv), rel=1e-12)
        assert jet.b_E == 0.0 and jet.d_trace == 0.0

"""Tests for the discrete quotient minimizer."""

import math

import numpy as np
import pytest

from gnsharp.constants import GNParams, MINUS, PLUS, sharp_constant
from gnsharp.functionals import RadialProfile, h_extremal
from gnsharp.geometry import euclidean, space_form
from gnsharp.varmin import (
    INIT_BUMP,
    INIT_EXTREMAL,
    INIT_RANDOM,
    MinimizeConfig,
    discrete_quotient,
    minimize_quotient,
    quotient_gradient,
)

P35 = GNParams(3, 0.5, MINUS)


def _bumpy_profile(seed: int, nodes: int = 256, top: float = 4.0) -> RadialProfile:
    rng = np.random.default_rng(seed)
    radii = np.linspace(0.0, top, nodes)
    x = radii / top
    values = np.maximum(1.0 - x**2, 0.0) * rng.uniform(0.2, 1.0, size=nodes)
    values[-1] = 0.0
    return RadialProfile(radii=radii, values=values)


def test_quotient_gradient_matches_finite_differences():
    metric = euclidean(3)
    prof = _bumpy_profile(seed=5)
    grad = quotient_gradient(prof, metric, P35)
    eps = 1e-6
    checked = 0
    for i in range(1, prof.radii.size - 1, 25):
        if prof.values[i] <= 1e-3:
            continue
        up, dn = prof.values.copy(), prof.values.copy()
        up[i] += eps
        dn[i] -= eps
        fd = (
            discrete_quotient(RadialProfile(radii=prof.radii, values=up), metric, P35)
            - discrete_quotient(RadialProfile(radii=prof.radii, values=dn), metric, P35)
        ) / (2.0 * eps)
        assert abs(fd - grad[i]) <= 2e-4 * max(abs(fd), 1e-12)
        checked += 1
    assert checked >= 8


@pytest.mark.parametrize(
    "n,alpha,regime,radius",
    [(3, 0.5, MINUS, 6.0), (5, 1.2, PLUS, 10.0)],
)
def test_extremal_init_converges_fast_to_sharp_value(n, alpha, regime, radius):
    params = GNParams(n, alpha, regime)
    config = MinimizeConfig(
        ball_radius=radius, grid_nodes=512, init=INIT_EXTREMAL, value_tol=1e-7
    )
    result = minimize_quotient(euclidean(n), params, config)
    assert result.converged
    assert result.iterations <= 8
    sharp = sharp_constant(n, alpha, regime)
    assert abs(result.value - sharp) <= 1e-4 * sharp
    assert float(result.profile.values.max()) == 1.0


def test_descent_from_random_init_is_monotone_in_iteration_budget():
    values = []
    for iters in (1, 3, 8, 200):
        config = MinimizeConfig(
            ball_radius=4.0, grid_nodes=256, max_iters=iters, init=INIT_RANDOM, seed=11
        )
        values.append(minimize_quotient(euclidean(3), P35, config))
    assert all(a.value > b.value for a, b in zip(values, values[1:]))
    final = values[-1]
    assert final.converged
    sharp = sharp_constant(3, 0.5, MINUS)
    assert abs(final.value - sharp) <= 1e-3 * sharp


def test_grid_refinement_tightens_the_gap():
    sharp = sharp_constant(3, 0.5, MINUS)
    gaps = {}
    for nodes in (256, 512):
        config = MinimizeConfig(
            ball_radius=4.0, grid_nodes=nodes, init=INIT_EXTREMAL, value_tol=1e-9
        )
        result = minimize_quotient(euclidean(3), P35, config)
        gaps[nodes] = abs(result.value - sharp) / sharp
    assert gaps[512] < gaps[256]
    assert gaps[512] < 1e-3


def test_curved_metric_minimization_runs_to_convergence():
    result = minimize_quotient(
        space_form(3, -1.0), P35, MinimizeConfig(ball_radius=4.0, grid_nodes=384)
    )
    assert result.converged
    assert math.isfinite(result.value) and result.value > 0.0


def test_random_init_is_deterministic():
    config = MinimizeConfig(
        ball_radius=4.0, grid_nodes=256, max_iters=40, init=INIT_RANDOM, seed=7
    )
    a = minimize_quotient(euclidean(3), P35, config)
    b = minimize_quotient(euclidean(3), P35, config)
    assert a.value == b.value
    assert np.array_equal(a.profile.values, b.profile.values)


def test_zero_profile_is_rejected():
    radii = np.linspace(0.0, 1.0, 128)
    zero = RadialProfile(radii=radii, values=np.zeros_like(radii))
    with pytest.raises(ValueError, match="zero profile"):
        discrete_quotient(zero, euclidean(3), P35)
    with pytest.raises(ValueError, match="zero profile"):
        quotient_gradient(zero, euclidean(3), P35)


def test_plus_minimizer_matches_extremal_shape():
    params = GNParams(3, 1.2, PLUS)
    config = MinimizeConfig(
        ball_radius=6.0, grid_nodes=1024, init=INIT_EXTREMAL, value_tol=1e-7
    )
    result = minimize_quotient(euclidean(3), params, config)
    radii = result.profile.radii
    reference = h_extremal(1.2, 1.0, radii)
    reference = reference / reference[0]
    inner = radii <= 3.0
    assert float(np.max(np.abs(result.profile.values[inner] - reference[inner]))) < 1e-2


def test_config_and_chart_validation():
    with pytest.raises(ValueError):
        MinimizeConfig(ball_radius=4.0, grid_nodes=100)
    with pytest.raises(ValueError):
        MinimizeConfig(ball_radius=-1.0)
    with pytest.raises(ValueError):
        MinimizeConfig(ball_radius=4.0, init="gaussian")
    with pytest.raises(ValueError, match="chart"):
        minimize_quotient(space_form(3, 1.0), P35, MinimizeConfig(ball_radius=4.0))

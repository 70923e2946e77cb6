"""Direct minimization of the quotients over discretized radial profiles.

The discrete model is deliberately simple: nodal values on a uniform radial
grid, lumped-mass quadrature for every norm, and a piecewise-linear gradient
for the energy.  The quotient and its gradient are computed from the same
weights, so the gradient is exact for the discrete functional and descent is
monotone up to line-search failure.  Minimized values are upper bounds for
the discrete infimum, which itself converges to the continuum one as the
grid refines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .constants import GNParams, MINUS, exponents
from .functionals import RadialProfile
from .geometry import RadialMetric, dirichlet_weight, volume_density
from .specfun import unit_sphere_area

__all__ = [
    "MinimizeConfig",
    "MinimizeResult",
    "INIT_BUMP",
    "INIT_EXTREMAL",
    "INIT_RANDOM",
    "discrete_quotient",
    "quotient_gradient",
    "minimize_quotient",
]

INIT_BUMP = "bump"
INIT_EXTREMAL = "extremal"
INIT_RANDOM = "random"

_ARMIJO_C = 1e-4
_MAX_BACKTRACKS = 60


@dataclass(frozen=True)
class MinimizeConfig:
    ball_radius: float
    grid_nodes: int = 512
    max_iters: int = 3000
    step_tol: float = 1e-9
    value_tol: float = 1e-9
    init: str = INIT_BUMP
    seed: int = 0

    def __post_init__(self) -> None:
        if self.grid_nodes < 128:
            raise ValueError("grid_nodes must be >= 128")
        if self.ball_radius <= 0.0:
            raise ValueError("ball_radius must be positive")
        if self.step_tol <= 0.0 or self.value_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.init not in (INIT_BUMP, INIT_EXTREMAL, INIT_RANDOM):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass(frozen=True)
class MinimizeResult:
    value: float
    profile: RadialProfile
    iterations: int
    converged: bool


def _weights(metric: RadialMetric, radii: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(lumped mass weights at nodes, energy coefficients per cell)."""
    n = metric.n
    om = unit_sphere_area(n)
    h = np.diff(radii)
    dens = np.array([volume_density(metric, float(r)) for r in radii])
    f = dens * radii ** (n - 1)
    w = np.zeros_like(radii)
    w[:-1] += 0.5 * h * f[:-1]
    w[1:] += 0.5 * h * f[1:]
    mid = 0.5 * (radii[:-1] + radii[1:])
    dw = np.array([dirichlet_weight(metric, float(r)) for r in mid])
    s = dw * mid ** (n - 1) * h
    return om * w, om * s


def _quotient_pieces(params: GNParams) -> tuple[float, float, float, float]:
    """(p_num, e_num, p_den, e_den): the quotient is E * M_{p_num}^{e_num} / M_{p_den}^{e_den}."""
    a = params.alpha
    exp_set = exponents(params)
    if params.regime == MINUS:
        g = exp_set.interp
        return 2.0 * a, (1.0 - g) / (g * a), a + 1.0, 2.0 / (g * (a + 1.0))
    th = exp_set.interp
    return a + 1.0, 2.0 * (1.0 - th) / (th * (a + 1.0)), 2.0 * a, 1.0 / (th * a)


def _raw_quotient(
    u: np.ndarray, w: np.ndarray, s: np.ndarray, h: np.ndarray, pieces
) -> float:
    p_num, e_num, p_den, e_den = pieces
    energy = float(np.sum(s * (np.diff(u) / h) ** 2))
    m_num = float(np.sum(w * np.abs(u) ** p_num))
    m_den = float(np.sum(w * np.abs(u) ** p_den))
    if m_den == 0.0 or m_num == 0.0:
        raise ValueError("quotient undefined for the zero profile")
    return energy * m_num**e_num / m_den**e_den


def _mass_derivative(u: np.ndarray, w: np.ndarray, p: float) -> np.ndarray:
    """d(sum w |u|^p)/du_i; zero nodes stay stationary (one-sided limit)."""
    out = np.zeros_like(u)
    pos = np.abs(u) > 0.0
    out[pos] = p * w[pos] * np.abs(u[pos]) ** (p - 1.0) * np.sign(u[pos])
    return out


def _log_eval(
    u: np.ndarray, w: np.ndarray, s: np.ndarray, h: np.ndarray, pieces
) -> tuple[float, np.ndarray]:
    """(quotient, gradient of log quotient); the log form keeps the descent
    well-conditioned when the mass exponents are large."""
    p_num, e_num, p_den, e_den = pieces
    slope = np.diff(u) / h
    energy = float(np.sum(s * slope**2))
    m_num = float(np.sum(w * np.abs(u) ** p_num))
    m_den = float(np.sum(w * np.abs(u) ** p_den))
    if m_den == 0.0 or m_num == 0.0 or energy == 0.0:
        raise ValueError("gradient undefined for the zero profile")
    q = energy * m_num**e_num / m_den**e_den
    de = np.zeros_like(u)
    flux = 2.0 * s * slope / h
    de[:-1] -= flux
    de[1:] += flux
    glog = (
        de / energy
        + e_num * _mass_derivative(u, w, p_num) / m_num
        - e_den * _mass_derivative(u, w, p_den) / m_den
    )
    return q, glog


def _raw_gradient(
    u: np.ndarray, w: np.ndarray, s: np.ndarray, h: np.ndarray, pieces
) -> np.ndarray:
    q, glog = _log_eval(u, w, s, h, pieces)
    return q * glog


def _node_grid(profile: RadialProfile) -> tuple[np.ndarray, np.ndarray]:
    r = profile.radii
    if r.size < 2:
        raise ValueError("need at least two nodes")
    return r, np.diff(r)


def discrete_quotient(profile: RadialProfile, metric: RadialMetric, params: GNParams) -> float:
    """The quotient under the minimizer's own lumped quadrature rule.

    This is the exact objective of minimize_quotient (gn_quotient uses a
    higher-order rule and differs by discretization error).
    """
    r, h = _node_grid(profile)
    w, s = _weights(metric, r)
    return _raw_quotient(profile.values, w, s, h, _quotient_pieces(params))


def quotient_gradient(
    profile: RadialProfile, metric: RadialMetric, params: GNParams
) -> np.ndarray:
    """Nodal gradient of discrete_quotient with respect to profile.values."""
    r, h = _node_grid(profile)
    w, s = _weights(metric, r)
    return _raw_gradient(profile.values, w, s, h, _quotient_pieces(params))


def _sobolev_direction(
    cell: np.ndarray, base_diag: np.ndarray, u: np.ndarray, grad: np.ndarray
) -> np.ndarray:
    """Inverse-stiffness image of the gradient on the active support.

    The quotient is scale-free, so its landscape over nodal values is nearly
    flat along smooth shape changes and raw gradient descent crawls.  Solving
    K d = g with the same stiffness matrix used for the energy turns those
    flat modes into unit-speed ones.  Nodes currently at zero get identity rows
    (two-metric projection): preconditioning across the support edge would
    re-activate dead nodes, which the sublinear mass terms punish.
    """
    nodes = u.size
    ab = np.zeros((3, nodes))
    ab[0, 1:] = -cell
    ab[2, :-1] = -cell
    ab[1, :] = base_diag
    dead = np.where(~((u > 0.0) & (np.arange(nodes) < nodes - 1)))[0]
    ab[1, dead] = 1.0
    ab[0, dead] = 0.0
    ab[0, dead[dead + 1 < nodes] + 1] = 0.0
    ab[2, dead[dead + 1 < nodes]] = 0.0
    ab[2, dead[dead > 0] - 1] = 0.0
    d = solve_banded((1, 1), ab, grad)
    d[-1] = 0.0
    return d


def _line_search(
    u: np.ndarray,
    d: np.ndarray,
    step: float,
    log_value: float,
    w: np.ndarray,
    s: np.ndarray,
    h: np.ndarray,
    pieces,
) -> tuple[np.ndarray, float, float, float, bool] | None:
    """Backtracking with a proximal sufficient-decrease test on log(quotient).

    The first trial is capped so the move cannot exceed the profile scale,
    which keeps the step memory from collapsing on an oversized direction.
    Returns (u_new, value_new, accepted step, squared displacement, whether
    the first trial was accepted), or None when no step along -d decreases
    the value enough.
    """
    d_scale = float(np.max(np.abs(d)))
    if d_scale > 0.0:
        step = min(step, float(np.max(u)) / d_scale)
    for k in range(_MAX_BACKTRACKS):
        ts = step * 0.5**k
        u_new = np.maximum(u - ts * d, 0.0)
        u_new[-1] = 0.0
        move2 = float(np.sum((u_new - u) ** 2))
        if move2 == 0.0:
            return None
        if not np.any(u_new > 0.0):
            continue
        value_new = _raw_quotient(u_new, w, s, h, pieces)
        if math.log(value_new) <= log_value - _ARMIJO_C / ts * move2:
            # k <= 1 is the steady state: the memory doubles after each
            # accept, so one backtrack just returns to the accepted length.
            return u_new, value_new, ts, move2, k <= 1
    return None


def _initial_values(params: GNParams, radii: np.ndarray, config: MinimizeConfig) -> np.ndarray:
    big_r = config.ball_radius
    x = radii / big_r
    if config.init == INIT_BUMP:
        u = np.maximum(1.0 - x**2, 0.0) ** 2
    elif config.init == INIT_EXTREMAL:
        a = params.alpha
        if a < 1.0:
            lam = (1.0 - a) * (0.7 * big_r) ** 2
            u = np.maximum(lam + (a - 1.0) * radii**2, 0.0) ** (1.0 / (1.0 - a))
        else:
            # Ground the full-support profile so it meets the Dirichlet
            # condition at the ball edge instead of jumping there.
            u = (1.0 + (a - 1.0) * radii**2) ** (1.0 / (1.0 - a))
            u = np.maximum(u - u[-1], 0.0)
    else:
        rng = np.random.default_rng(config.seed)
        envelope = np.maximum(1.0 - x**2, 0.0)
        u = envelope * rng.uniform(0.2, 1.0, size=radii.size)
    u[-1] = 0.0
    return u / u.max()


def minimize_quotient(
    metric: RadialMetric, params: GNParams, config: MinimizeConfig
) -> MinimizeResult:
    """Projected descent on the discrete quotient from the configured init.

    Each iteration takes the Sobolev (inverse-stiffness) image of the
    log-quotient gradient as search direction, falling back to the raw
    gradient when that direction stalls; the step comes from an Armijo
    backtracking line search, negative nodal values are clipped to zero and
    the outermost node is pinned.  Descent is monotone across accepted
    steps.  Converged means three consecutive iterations moved less than
    step_tol (relative) or dropped the value by less than value_tol
    (relative), or that no admissible step could decrease the value at all.
    """
    if config.ball_radius > metric.r_max:
        raise ValueError("ball_radius exceeds the metric chart")
    radii = np.linspace(0.0, config.ball_radius, config.grid_nodes)
    h = np.diff(radii)
    w, s = _weights(metric, radii)
    pieces = _quotient_pieces(params)
    cell = s / h**2
    base_diag = np.zeros_like(radii)
    base_diag[:-1] += cell
    base_diag[1:] += cell
    u = _initial_values(params, radii, config)
    value, grad = _log_eval(u, w, s, h, pieces)
    grad[-1] = 0.0
    sob_step = 1.0
    raw_step = 1.0
    converged = False
    iterations = 0
    quiet = 0
    for iterations in range(1, config.max_iters + 1):
        d = _sobolev_direction(cell, base_diag, u, grad)
        hit = _line_search(u, d, sob_step, math.log(value), w, s, h, pieces)
        if hit is not None:
            u_new, value_new, ts, move2, full = hit
            sob_step = ts * 2.0
        else:
            hit = _line_search(u, grad, raw_step, math.log(value), w, s, h, pieces)
            if hit is None:
                converged = True
                break
            u_new, value_new, ts, move2, full = hit
            raw_step = ts * 2.0
        drop = (value - value_new) / abs(value)
        move = math.sqrt(move2) / max(float(np.linalg.norm(u)), 1e-300)
        u = u_new
        value, grad = _log_eval(u, w, s, h, pieces)
        grad[-1] = 0.0
        # Only un-backtracked steps count toward convergence: a tiny drop on
        # a truncated step means the memory is rebuilding, not stationarity.
        small = drop <= config.value_tol or move <= config.step_tol
        quiet = quiet + 1 if (small and full) else 0
        if quiet >= 3:
            converged = True
            break
    peak = float(np.max(u))
    return MinimizeResult(
        value=value,
        profile=RadialProfile(radii=radii, values=u / peak if peak > 0 else u),
        iterations=iterations,
        converged=converged,
    )

"""Special functions and the radial / spherical moment integrals.

Everything downstream (sharp constants, expansion coefficients, series
predictions) reduces to three ingredients implemented here:

* the Euler beta function and its one-sided extension ``script_beta``,
  which encodes both the compact-support moments (alpha < 1) and the
  heavy-tail moments (alpha > 1) of the truncated-quadratic profile,
* closed-form radial moments ``moment_closed`` with an independent
  adaptive-quadrature oracle ``moment_quad``,
* exact averages of quadratic/quartic monomials over the unit sphere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


def unit_sphere_area(n: int) -> float:
    """Surface area of the unit (n-1)-sphere in R^n: 2 pi^{n/2} / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def beta(p: float, q: float) -> float:
    """Euler beta function B(p, q) = Gamma(p) Gamma(q) / Gamma(p+q), p, q > 0."""
    if p <= 0.0 or q <= 0.0:
        raise ValueError(f"beta requires positive arguments, got p={p}, q={q}")
    return math.exp(math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q))


def script_beta(p: float, q: float) -> float:
    """One-sided extension of the beta function used by the moment formulas.

    For q > 0 this is the ordinary B(p, q).  For q < 0 it is defined by
    reflection as B(p, -q - p + 1), which requires -q - p + 1 > 0; this is
    exactly the convergence condition of the heavy-tail radial moments it
    encodes.  q = 0 is outside the domain.
    """
    if p <= 0.0:
        raise ValueError(f"script_beta requires p > 0, got p={p}")
    if q == 0.0:
        raise ValueError("script_beta is undefined at q = 0")
    if q > 0.0:
        return beta(p, q)
    if -q - p + 1.0 <= 0.0:
        raise ValueError(
            f"script_beta({p}, {q}): reflected argument -q-p+1 = {-q - p + 1.0} "
            "is not positive (divergent moment)"
        )
    return math.exp(math.lgamma(p) + math.lgamma(-q - p + 1.0) - math.lgamma(1.0 - q))


@dataclass(frozen=True)
class MomentSpec:
    """Exponents of the radial moment integrand |y|^q1 * (1 + (alpha-1)|y|^2/8)_+^q2."""

    q1: float
    q2: float


def _check_moment_domain(n: int, alpha: float, spec: MomentSpec) -> None:
    p = (n + spec.q1) / 2.0
    if p <= 0.0:
        raise ValueError(f"moment requires q1 > -n, got q1={spec.q1}, n={n}")
    if alpha < 1.0:
        # Compact support; integrability at the support edge needs q2 > -1.
        if spec.q2 <= -1.0:
            raise ValueError(f"moment with alpha<1 requires q2 > -1, got q2={spec.q2}")
    else:
        # Heavy tail: need decay n-1+q1+2*q2 < -1, i.e. p + q2 < 0, and the
        # extended-beta encoding additionally needs q2 + 1 < 0.
        if p + spec.q2 >= 0.0:
            raise ValueError(
                f"moment with alpha>1 requires -(q2) - (n+q1)/2 > 0, got q1={spec.q1}, q2={spec.q2}"
            )
        if spec.q2 + 1.0 >= 0.0:
            raise ValueError(f"moment with alpha>1 requires q2 < -1, got q2={spec.q2}")


def moment_closed(n: int, alpha: float, spec: MomentSpec) -> float:
    """Closed form of the full-space radial moment integral.

    Evaluates int_{R^n} |y|^{q1} (1 + (alpha-1)|y|^2/8)_+^{q2} dy as
    (omega_{n-1}/2) * (|alpha-1|/8)^{-(n+q1)/2} * script_beta((n+q1)/2, q2+1).
    """
    if alpha == 1.0 or alpha <= 0.0:
        raise ValueError(f"alpha must be positive and != 1, got {alpha}")
    _check_moment_domain(n, alpha, spec)
    b = abs(alpha - 1.0) / 8.0
    p = (n + spec.q1) / 2.0
    return unit_sphere_area(n) / 2.0 * b ** (-p) * script_beta(p, spec.q2 + 1.0)


def moment_quad(n: int, alpha: float, spec: MomentSpec, tol: float = 1e-10) -> float:
    """Adaptive-quadrature oracle for :func:`moment_closed`.

    Integrates omega_{n-1} * int_0^inf r^{n-1+q1} (1 + (alpha-1) r^2/8)_+^{q2} dr
    without using the closed form.  For alpha < 1 the domain is the exact
    support ball and the edge singularity (q2 in (-1, 0)) is flattened by the
    substitution s = 1 - (1-alpha) r^2 / 8 followed by w = s^(q2+1).  For
    alpha > 1 the heavy tail is mapped onto a bounded integrand by the
    substitution z = r^(n+q1+2 q2).
    """
    if alpha == 1.0 or alpha <= 0.0:
        raise ValueError(f"alpha must be positive and != 1, got {alpha}")
    _check_moment_domain(n, alpha, spec)
    q1, q2 = spec.q1, spec.q2
    b = abs(alpha - 1.0) / 8.0
    om = unit_sphere_area(n)
    quad_opts = dict(limit=200, epsabs=0.0, epsrel=tol / 4.0)

    if alpha < 1.0:
        rb = math.sqrt(1.0 / b)  # support radius
        # Inner part: plain integrand away from the edge.
        inner = quad(lambda r: r ** (n - 1 + q1) * (1.0 - b * r * r) ** q2, 0.0, 0.5 * rb, **quad_opts)[0]
        # Edge part in s = 1 - b r^2 (s in (0, 3/4]), then flatten s^q2 by
        # w = s^(q2+1) so the integrand is bounded at w -> 0.
        def edge_integrand_s(s: float) -> float:
            r = math.sqrt((1.0 - s) / b)
            return r ** (n - 2 + q1) * s ** q2 / (2.0 * b)

        if q2 < 0.0:
            e = q2 + 1.0

            def edge_integrand_w(w: float) -> float:
                s = w ** (1.0 / e)
                r = math.sqrt((1.0 - s) / b)
                return r ** (n - 2 + q1) / (2.0 * b * e)

            edge = quad(edge_integrand_w, 0.0, 0.75 ** e, **quad_opts)[0]
        else:
            edge = quad(edge_integrand_s, 0.0, 0.75, **quad_opts)[0]
        return om * (inner + edge)

    # alpha > 1: direct integral out to R0, then the substitution z = r^decay
    # (decay = n + q1 + 2 q2 < 0 by the domain check), under which the heavy
    # tail becomes the bounded integrand (z^(-2/decay) + b)^q2 on (0, R0^decay].
    # This handles barely-convergent tails (decay near 0) that no radial
    # truncation could reach.
    decay = n + q1 + 2.0 * q2
    R0 = math.sqrt(8.0 / b)
    head = quad(
        lambda r: r ** (n - 1 + q1) * (1.0 + b * r * r) ** q2,
        0.0,
        R0,
        points=[math.sqrt(1.0 / b)],
        **quad_opts,
    )[0]
    flat_exp = -2.0 / decay
    tail = quad(lambda z: (z**flat_exp + b) ** q2, 0.0, R0**decay, **quad_opts)[0] / (-decay)
    return om * (head + tail)


def sphere_avg2(n: int, A: np.ndarray) -> float:
    """Integral of A_ij z^i z^j over the unit (n-1)-sphere: (omega_{n-1}/n) tr A."""
    A = np.asarray(A, dtype=float)
    if A.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} matrix, got shape {A.shape}")
    return unit_sphere_area(n) / n * float(np.trace(A))


def E_op(lam: np.ndarray) -> float:
    """The contraction E(lam) = sum_ij (lam_iijj + lam_ijij + lam_ijji)."""
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 4:
        raise ValueError("E_op expects a 4-index tensor")
    return float(
        np.einsum("iijj->", lam) + np.einsum("ijij->", lam) + np.einsum("ijji->", lam)
    )


def sphere_avg4(n: int, lam: np.ndarray) -> float:
    """Integral of lam_ijkl z^i z^j z^k z^l over the unit sphere.

    Equals omega_{n-1} / (n (n+2)) * E(lam); the quartic monomial identity
    behind every second-order moment in the expansions.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (n, n, n, n):
        raise ValueError(f"expected shape {(n, n, n, n)}, got {lam.shape}")
    return unit_sphere_area(n) / (n * (n + 2)) * E_op(lam)

"""Closed-form scalar constants and coefficient formulas.

Every named constant of the interpolation-inequality machinery lives here as
a plain function of (n, alpha, regime): the interpolation exponents, the
sharp quotient constants, the entropy normalizer sigma, the master
coefficients zeta_1 / zeta_2 / chi, the eight assembled second-order
coefficients, the jet-normalization solvers for beta_1 / beta_2, and the net
Sc^2 coefficient j.  No quadrature happens in this module; the independent
oracles live in the test tree and in the expansion module.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geometry import CurvatureAtPole, E_v
from .specfun import script_beta, unit_sphere_area

MINUS = "minus"
PLUS = "plus"


@dataclass(frozen=True)
class GNParams:
    """Problem parameters: dimension, interpolation exponent, regime, m_frak.

    regime "minus" requires 0 < alpha < 1; "plus" requires
    1 < alpha <= n/(n-2).  ``m_frak`` is the fixed positive constant kept
    arbitrary throughout (default 1).
    """

    n: int
    alpha: float
    regime: str
    m_frak: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"n must be >= 3, got {self.n}")
        if self.regime not in (MINUS, PLUS):
            raise ValueError(f"regime must be '{MINUS}' or '{PLUS}', got {self.regime!r}")
        if self.regime == MINUS and not 0.0 < self.alpha < 1.0:
            raise ValueError(f"regime 'minus' needs 0 < alpha < 1, got alpha={self.alpha}")
        if self.regime == PLUS and not 1.0 < self.alpha <= self.n / (self.n - 2):
            raise ValueError(
                f"regime 'plus' needs 1 < alpha <= n/(n-2) = {self.n / (self.n - 2)}, "
                f"got alpha={self.alpha}"
            )
        if self.m_frak <= 0.0:
            raise ValueError(f"m_frak must be positive, got {self.m_frak}")

    @property
    def mass_exponent(self) -> float:
        """The exponent carrying the unit-mass normalization: alpha+1 or 2 alpha."""
        return self.alpha + 1.0 if self.regime == MINUS else 2.0 * self.alpha

    @property
    def two_star(self) -> float:
        return 2.0 * self.n / (self.n - 2.0)


@dataclass(frozen=True)
class ExponentSet:
    """Derived exponents: the interpolation weight and the scaling exponent.

    For the minus regime ``interp`` is gamma in (0, 1] and ``scale`` is
    Gamma > 0; for plus they are theta in (0, 1] and Theta in (0, 1/2).
    """

    interp: float
    scale: float


def exponents(params: GNParams) -> ExponentSet:
    n, a = params.n, params.alpha
    ts = params.two_star
    if params.regime == MINUS:
        gamma = ts * (1.0 - a) / ((ts - 2.0 * a) * (a + 1.0))
        big_gamma = (n / 2.0) * (1.0 - a) / (1.0 + a)
        return ExponentSet(interp=gamma, scale=big_gamma)
    theta = ts * (a - 1.0) / (2.0 * a * (ts - a - 1.0))
    big_theta = (n / 4.0) * (a - 1.0) / a
    return ExponentSet(interp=theta, scale=big_theta)


def flat_mass_constant(n: int, alpha: float, m: float) -> float:
    """Flat-space mass integral of the normalized-scale extremal profile at power m."""
    b = abs(alpha - 1.0) / 8.0
    return unit_sphere_area(n) / 2.0 * b ** (-n / 2.0) * script_beta(n / 2.0, m / (1.0 - alpha) + 1.0)


def flat_energy_constant(n: int, alpha: float) -> float:
    """Flat-space Dirichlet energy of the normalized-scale extremal profile."""
    b = abs(alpha - 1.0) / 8.0
    return (
        unit_sphere_area(n)
        / 32.0
        * b ** (-(n + 2.0) / 2.0)
        * script_beta(n / 2.0 + 1.0, 2.0 * alpha / (1.0 - alpha) + 1.0)
    )


def sharp_constant(n: int, alpha: float, regime: str) -> float:
    """The sharp Euclidean value of the interpolation quotient.

    Normalized as the quotient itself: the value returned equals the
    infimum of ||grad u||^2 ||u||_{2a}^{2(1-gamma)/gamma} / ||u||_{a+1}^{2/gamma}
    (minus regime; plus analogously), attained by the truncated-power family.
    """
    if alpha == 1.0:
        raise ValueError("sharp_constant is undefined at alpha = 1")
    if regime == PLUS and (alpha + 1.0) / (alpha - 1.0) - n / 2.0 <= 0.0:
        raise ValueError(
            f"sharp_constant: (alpha+1)/(alpha-1) - n/2 must be positive, got alpha={alpha}, n={n}"
        )
    params = GNParams(n=n, alpha=alpha, regime=regime)
    exp_set = exponents(params)
    a = alpha
    a0 = flat_energy_constant(n, a)
    d_a1 = flat_mass_constant(n, a, a + 1.0)
    d_2a = flat_mass_constant(n, a, 2.0 * a)
    if regime == MINUS:
        g = exp_set.interp
        return a0 * d_2a ** ((1.0 - g) / (g * a)) / d_a1 ** (2.0 / (g * (a + 1.0)))
    th = exp_set.interp
    return a0 * d_a1 ** (2.0 * (1.0 - th) / (th * (a + 1.0))) / d_2a ** (1.0 / (th * a))


def sigma(params: GNParams) -> float:
    """The entropy normalizer Sigma: pins the constant term of the assembled series.

    Minus: (Gamma/(Gamma+1))^(1 - Gamma/(2 Gamma + 1)) * X^(Gamma/(2 Gamma + 1));
    plus:  (Theta/(1 - 2 Theta))^(1 - Theta/(1 - Theta)) * X^(Theta/(1 - Theta)),
    where X is :func:`sharp_constant`.
    """
    exp_set = exponents(params)
    x = sharp_constant(params.n, params.alpha, params.regime)
    if params.regime == MINUS:
        big_g = exp_set.scale
        w = big_g / (2.0 * big_g + 1.0)
        return (big_g / (big_g + 1.0)) ** (1.0 - w) * x ** w
    big_t = exp_set.scale
    w = big_t / (1.0 - big_t)
    return (big_t / (1.0 - 2.0 * big_t)) ** (1.0 - w) * x ** w


def zeta_chi(n: int, alpha: float) -> tuple[float, float, float]:
    """The master coefficients (zeta_1, zeta_2, chi) of the assembled series."""
    if alpha == 1.0:
        raise ValueError("zeta_chi is undefined at alpha = 1")
    d1 = n * (alpha - 1.0) - 4.0
    d2 = n * (alpha - 1.0) + 2.0 * alpha - 6.0
    if d1 == 0.0:
        raise ValueError(f"zeta_1 pole at alpha = 1 + 4/n (n={n})")
    if d2 == 0.0:
        raise ValueError(f"zeta_2 pole at alpha = (n+6)/(n+2) (n={n})")
    z1 = 8.0 / (n * d1)
    z2 = z1 / (8.0 * d2)
    chi = (n + 6.0) * alpha**2 - 2.0 * (n + 3.0) * alpha + n + 4.0
    return z1, z2, chi


def assert_poles_outside_ranges(n_max: int = 64) -> None:
    """Check the zeta_1 / zeta_2 poles avoid both regimes' admissible ranges.

    The zeta_1 pole sits at alpha = 1 + 4/n and the zeta_2 pole at
    alpha = (n+6)/(n+2); both must lie outside (0, 1) and outside the open
    part of the plus-regime ranges for every n up to n_max.
    """
    tol = 1e-12
    for n in range(3, n_max + 1):
        pole1 = 1.0 + 4.0 / n
        pole2 = (n + 6.0) / (n + 2.0)
        # Minus regime: (0, 1).
        if 0.0 < pole1 < 1.0 or 0.0 < pole2 < 1.0:
            raise AssertionError(f"coefficient pole inside (0,1) at n={n}")
        # Plus regime first-order range: (1, (n+4)/n) open for n <= 4 — the
        # endpoint IS the zeta_1 pole, which is why it is open — else
        # (1, n/(n-2)] closed at the top.
        if n <= 4:
            hi1, closed1 = (n + 4.0) / n, False
        else:
            hi1, closed1 = n / (n - 2.0), True
        if pole1 < hi1 - tol or (closed1 and abs(pole1 - hi1) <= tol):
            raise AssertionError(f"zeta_1 pole inside first-order plus range at n={n}")
        # Plus regime second-order range: open at (n+6)/(n+2) (again: the
        # endpoint is the zeta_2 pole) for n <= 6, else closed at n/(n-2).
        if n <= 6:
            hi2, closed2 = (n + 6.0) / (n + 2.0), False
        else:
            hi2, closed2 = n / (n - 2.0), True
        if pole2 < hi2 - tol or (closed2 and abs(pole2 - hi2) <= tol):
            raise AssertionError(f"zeta_2 pole inside second-order plus range at n={n}")


@dataclass(frozen=True)
class CCoefficients:
    """The eight assembled second-order coefficients (identical in both regimes)."""

    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    c7: float
    c8: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.c1, self.c2, self.c3, self.c4, self.c5, self.c6, self.c7, self.c8)


def c_coefficients(n: int, alpha: float) -> CCoefficients:
    """Closed forms of c_1 .. c_8 in terms of zeta_1, zeta_2 and chi-free data."""
    z1, z2, _ = zeta_chi(n, alpha)
    a = alpha
    return CCoefficients(
        c1=z1,
        c2=128.0 * (a + 1.0) * z2,
        c3=640.0 * z2,
        c4=(96.0 * a**2 - 160.0 * a + 16.0 * n * (a - 1.0) ** 2) * z2,
        c5=-(64.0 * (a + 1.0) / 3.0) * z2,
        c6=((-((a - 1.0) ** 2) * n - 2.0 * a**2 + 6.0 * a) / 2.0) * z1,
        c7=((n - 2.0) * a**2 - 2.0 * (n + 1.0) * a + n) / (4.0 * n),
        c8=((a + 1.0) / 3.0) * z1,
    )


def moment_ratio_assembly(n: int, alpha: float) -> dict[str, float]:
    """Re-assemble the series coefficients directly from radial-moment ratios.

    This is the un-simplified route: every coefficient is written as the
    combination of extended-beta ratios produced by the second-order
    expansion of the localized quotient, before any algebraic reduction.
    Keys c1..c8 must match :func:`c_coefficients`; the null keys l1, l2
    (first order) and k1, k2, k3 (second order) are the combinations killed
    by the normalization constraints and must vanish identically.  Serves
    both regimes through the exponent duality 1/theta + 1/gamma = 1; raises
    ValueError where a required moment diverges (far-from-1 alpha in plus).
    """
    gam = (
        2.0 * n / (n - 2.0) * (1.0 - alpha)
        / ((2.0 * n / (n - 2.0) - 2.0 * alpha) * (alpha + 1.0))
    )
    b = abs(alpha - 1.0) / 8.0
    q_a = 2.0 * alpha / (1.0 - alpha) + 1.0

    def q_d(m: float) -> float:
        return m / (1.0 - alpha) + 1.0

    ra1 = script_beta(n / 2.0 + 2.0, q_a) / script_beta(n / 2.0 + 1.0, q_a)
    ra3 = script_beta(n / 2.0 + 3.0, q_a) / script_beta(n / 2.0 + 1.0, q_a)
    ra4 = script_beta(n / 2.0 + 2.0, q_a + 1.0) / script_beta(n / 2.0 + 1.0, q_a)
    ra2p = script_beta(n / 2.0 + 1.0, q_a + 1.0) / script_beta(n / 2.0 + 1.0, q_a)
    rae = script_beta(n / 2.0 + 1.0, 2.0 / (1.0 - alpha) + 1.0) / script_beta(n / 2.0 + 1.0, q_a)

    def rd1(m: float) -> float:
        return script_beta(n / 2.0 + 1.0, q_d(m)) / script_beta(n / 2.0, q_d(m))

    def rd2(m: float) -> float:
        return script_beta(n / 2.0 + 2.0, q_d(m)) / script_beta(n / 2.0, q_d(m))

    w2a = (1.0 - gam) / (gam * alpha)
    wa1 = 2.0 / (gam * (alpha + 1.0))
    m2, m1 = 2.0 * alpha, alpha + 1.0
    pref2 = 1.0 / (n * (n + 2.0)) / b**2
    pref1 = (1.0 / n) / b
    return {
        "l1": 1.0 + w2a * alpha - wa1 * (alpha + 1.0) / 2.0,
        "l2": (
            (1.0 / n) / b * ra1
            - (8.0 / n) * ra2p
            + w2a * (2.0 * alpha / (2.0 * n)) / b * rd1(m2)
            - wa1 * ((alpha + 1.0) / (2.0 * n)) / b * rd1(m1)
        ),
        "c1": (1.0 / (6.0 * n)) / b * (-ra1 - w2a * rd1(m2) + wa1 * rd1(m1)),
        "k1": 1.0 + w2a * (m2 / 2.0) - wa1 * (m1 / 2.0),
        "k2": (
            pref2 * ra3
            - 16.0 / (n * (n + 2.0)) / b * ra4
            + w2a * pref2 * rd2(m2) * (m2 / 2.0)
            - wa1 * pref2 * rd2(m1) * (m1 / 2.0)
        ),
        "k3": (
            pref1 * ra1
            - (8.0 / n) * ra2p
            + w2a * pref1 * rd1(m2) * (m2 / 2.0)
            - wa1 * pref1 * rd1(m1) * (m1 / 2.0)
        ),
        "c2": (16.0 / n) * rae,
        "c3": pref2 * (ra3 + w2a * rd2(m2) - wa1 * rd2(m1)),
        "c4": pref2
        * (
            w2a * rd2(m2) * (m2 * (m2 - 2.0) / 8.0)
            - wa1 * rd2(m1) * (m1 * (m1 - 2.0) / 8.0)
        ),
        "c5": pref2 * (-ra3 / 6.0 - w2a * rd2(m2) * (m2 / 12.0) + wa1 * rd2(m1) * (m1 / 12.0))
        + (4.0 / 3.0) / (n * (n + 2.0)) / b * ra4,
        "c6": pref1
        * (
            w2a * rd1(m2) * (m2 * (m2 - 2.0) / 4.0)
            - wa1 * rd1(m1) * (m1 * (m1 - 2.0) / 4.0)
        ),
        "c7": w2a * (m2 * (m2 - 2.0) / 8.0) - wa1 * (m1 * (m1 - 2.0) / 8.0),
        "c8": -(1.0 / (6.0 * n)) / b * ra1
        - w2a * (m2 / 12.0) * pref1 * rd1(m2)
        + wa1 * (m1 / 12.0) * pref1 * rd1(m1),
    }


def tau_star(A: float, B: float, p: float, q: float, m_frak: float = 1.0) -> tuple[float, float]:
    """Minimize A tau^p + m_frak B tau^{-q} over tau > 0.

    Returns (tau, inf_value) with tau = (m_frak q B / (p A))^{1/(p+q)} and
    inf_value = (m_frak (p+q)/p) (p A B^{p/q} / (m_frak q))^{q/(p+q)}.
    """
    if A <= 0.0 or B <= 0.0:
        raise ValueError("tau_star needs A > 0 and B > 0 (degenerate infimum otherwise)")
    if p <= 0.0 or q <= 0.0:
        raise ValueError("tau_star needs positive exponents")
    tau = (m_frak * q * B / (p * A)) ** (1.0 / (p + q))
    inf_value = (m_frak * (p + q) / p) * (p * A * B ** (p / q) / (m_frak * q)) ** (q / (p + q))
    return tau, inf_value


def _d1_ratio_pieces(params: GNParams) -> tuple[float, float]:
    """Helper: (m, Q1) with Q1 = (1/n) b^{-1} B-ratio for the first-order mass series."""
    n, a = params.n, params.alpha
    m = params.mass_exponent
    b = abs(a - 1.0) / 8.0
    q_d = m / (1.0 - a) + 1.0
    ratio = script_beta(n / 2.0 + 1.0, q_d) / script_beta(n / 2.0, q_d)
    return m, ratio / (n * b)


def beta1_constraint(params: GNParams, tr_a: float, Sc: float) -> float:
    """beta_1 making the first-order mass coefficient vanish at the unit-mass power.

    Solves (m/2) beta_1 + (m/2) Q1 tr_a - (1/6) Q1 Sc = 0 with m = alpha+1
    (minus) or 2 alpha (plus).
    """
    m, q1 = _d1_ratio_pieces(params)
    return (2.0 / m) * (q1 * Sc / 6.0 - (m / 2.0) * q1 * tr_a)


@dataclass(frozen=True)
class CutoffJet:
    """Scalar jet data of a radial cutoff: isotropic quadratic/quartic terms.

    ``a_scalar`` is the coefficient of r^2 in xi^2 (the isotropic tensor
    a = a_scalar * I, so tr a = n a_scalar); ``b_E`` is the contraction E(b)
    of the quartic term; ``d_trace`` the trace of the r^2 t term; beta1 /
    beta2 the pure t and t^2 terms.
    """

    a_scalar: float = 0.0
    beta1: float = 0.0
    beta2: float = 0.0
    b_E: float = 0.0
    d_trace: float = 0.0


def _jet_contractions(n: int, jet: CutoffJet, curv: CurvatureAtPole) -> tuple[float, float, float]:
    """(tr_a, E(a (x) a), E(a (x) Rc)) for an isotropic jet against isotropic curvature."""
    tr_a = n * jet.a_scalar
    e_aa = tr_a**2 + 2.0 * n * jet.a_scalar**2
    e_arc = tr_a * curv.Sc + 2.0 * jet.a_scalar * curv.Sc
    return tr_a, e_aa, e_arc


def beta2_constraint(params: GNParams, jet: CutoffJet, curv: CurvatureAtPole) -> float:
    """beta_2 making the second-order mass coefficient vanish at the unit-mass power.

    The quartic / quadratic moment ratios multiply the jet and curvature
    contractions exactly as in the second-order mass expansion; the solve is
    linear with pivot m/2.
    """
    n, a = params.n, params.alpha
    m = params.mass_exponent
    b = abs(a - 1.0) / 8.0
    q_d = m / (1.0 - a) + 1.0
    sb0 = script_beta(n / 2.0, q_d)
    r1 = script_beta(n / 2.0 + 1.0, q_d) / sb0
    r2 = script_beta(n / 2.0 + 2.0, q_d) / sb0
    tr_a, e_aa, e_arc = _jet_contractions(n, jet, curv)
    quartic = (r2 / (n * (n + 2.0) * b * b)) * (
        (m / 2.0) * jet.b_E
        + (m * (m - 2.0) / 8.0) * e_aa
        + E_v(curv)
        - (m / 12.0) * e_arc
    )
    quadratic = (r1 / (n * b)) * (
        (m / 2.0) * jet.d_trace
        + (m * (m - 2.0) / 4.0) * jet.beta1 * tr_a
        - (m / 12.0) * jet.beta1 * curv.Sc
    )
    constant = (m * (m - 2.0) / 8.0) * jet.beta1**2
    return -(quartic + quadratic + constant) / (m / 2.0)


def bp_jet(params: GNParams, curv: CurvatureAtPole) -> CutoffJet:
    """The canonical normalized jet: a = 2(alpha+1) Rc / (3 chi), beta_1/beta_2 solved.

    This is the choice that kills the mixed Ricci term in the second-order
    series and enforces the unit-mass normalization through order t^2.
    """
    curv.require("Rc_isotropic")
    _, _, chi = zeta_chi(params.n, params.alpha)
    a_scalar = 2.0 * (params.alpha + 1.0) * curv.Rc_isotropic / (3.0 * chi)
    b1 = beta1_constraint(params, params.n * a_scalar, curv.Sc)
    partial = CutoffJet(a_scalar=a_scalar, beta1=b1)
    b2 = beta2_constraint(params, partial, curv)
    return CutoffJet(a_scalar=a_scalar, beta1=b1, beta2=b2)


def j_coefficient(params: GNParams) -> float:
    """The net Sc^2 coefficient j(alpha, n) of the curvature-weighted series.

    Assembled from the closed c_i with the canonical jet (a proportional to
    Ricci, beta_1 from the normalization constraint), after the |Rc|^2 and
    |Rm|^2 norms have been split off; vanishes as alpha -> 1.
    """
    n, a = params.n, params.alpha
    z1, z2, chi = zeta_chi(n, a)
    c = c_coefficients(n, a)
    # All terms are quadratic in Sc, so evaluate at unit scalar curvature.
    sc = 1.0
    tr_a = 2.0 * (a + 1.0) * sc / (3.0 * chi)
    b1 = beta1_constraint(params, tr_a, sc)
    return (
        c.c3 / 72.0 * sc**2
        + c.c4 * tr_a**2
        + c.c5 * tr_a * sc
        + c.c6 * b1 * tr_a
        + c.c7 * b1**2
        + c.c8 * b1 * sc
        - (32.0 * z2 / 3.0) * sc**2
        + 64.0 * z2 * tr_a * sc
        - z1 * b1 * sc
    ) / sc**2


# Import-time sanity: the coefficient poles must sit outside the admissible
# alpha-ranges for every dimension we could plausibly be asked about.
assert_poles_outside_ranges()

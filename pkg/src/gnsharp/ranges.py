"""Admissible-alpha intervals and the size of the near-1 rigidity window.

The six interval cases cover the two regimes at three strengths of
hypothesis; the stronger conclusions restrict alpha through an explicit
quadratic, whose roots furnish the interval endpoints for larger n.  The
window half-width kappa is the largest s such that every rigidity condition
holds for all alpha with 0 < |alpha - 1| < s on the regime's side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import MINUS, PLUS, GNParams, j_coefficient, zeta_chi

__all__ = [
    "AlphaRange",
    "KappaResult",
    "CLOSED_FORM",
    "ROOT_FOUND",
    "CASES",
    "admissible_range",
    "quadratic_condition",
    "F_eval",
    "kappa",
]

CLOSED_FORM = "closed-form"
ROOT_FOUND = "root-found"
CASES = ("A1", "A2", "A3", "B1", "B2", "B3")

_BISECT_TOL = 1e-12


@dataclass(frozen=True)
class AlphaRange:
    """An interval of admissible alpha with endpoint provenance."""

    lo: float
    hi: float
    lo_open: bool
    hi_open: bool
    provenance: str
    residual: float = 0.0

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"empty alpha range [{self.lo}, {self.hi}]")

    def __contains__(self, alpha: float) -> bool:
        above = alpha > self.lo if self.lo_open else alpha >= self.lo
        below = alpha < self.hi if self.hi_open else alpha <= self.hi
        return above and below


@dataclass(frozen=True)
class KappaResult:
    kappa: float
    binding: str  # "co2" | "co3" | "regime_edge"
    residual: float


def quadratic_condition(n: int, alpha: float) -> float:
    """(2n^2+3n-38) a^2 - (4n^2+2n-50) a + (2n^2-n-24); negative iff the
    strongest interval case applies at this alpha."""
    return (
        (2.0 * n * n + 3.0 * n - 38.0) * alpha * alpha
        - (4.0 * n * n + 2.0 * n - 50.0) * alpha
        + (2.0 * n * n - n - 24.0)
    )


def _quadratic_roots(n: int) -> tuple[float, float]:
    disc = 28.0 * n * n - 16.0 * n - 287.0
    if disc < 0.0:
        raise ValueError(f"quadratic has no real roots for n={n}")
    lead = 2.0 * n * n + 3.0 * n - 38.0
    lo = (2.0 * n * n + n - 25.0 - math.sqrt(disc)) / lead
    hi = (2.0 * n * n + n - 25.0 + math.sqrt(disc)) / lead
    return lo, hi


def admissible_range(n: int, case: str) -> AlphaRange:
    """The alpha interval for one of the six rigidity cases.

    A-cases live left of 1, B-cases right of 1; the *1 cases need only the
    first-order mechanism, *2 the second-order one, *3 additionally the
    quadratic sign condition (which is where found roots enter for large n).
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    if case not in CASES:
        raise ValueError(f"case must be one of {CASES}")
    sobolev = n / (n - 2.0)
    if case in ("A1", "A2"):
        return AlphaRange(0.0, 1.0, True, True, CLOSED_FORM)
    if case == "A3":
        if n == 3:
            return AlphaRange(0.0, 1.0, True, True, CLOSED_FORM)
        root, _ = _quadratic_roots(n)
        return AlphaRange(
            root, 1.0, True, True, ROOT_FOUND, residual=abs(quadratic_condition(n, root))
        )
    if case == "B1":
        hi = (n + 4.0) / n
        if hi <= sobolev:
            return AlphaRange(1.0, hi, True, True, CLOSED_FORM)
        return AlphaRange(1.0, sobolev, True, False, CLOSED_FORM)
    if case == "B2":
        hi = (n + 6.0) / (n + 2.0)
        if hi <= sobolev:
            return AlphaRange(1.0, hi, True, True, CLOSED_FORM)
        return AlphaRange(1.0, sobolev, True, False, CLOSED_FORM)
    # B3
    hi = (n + 6.0) / (n + 2.0)
    if hi <= sobolev:
        return AlphaRange(1.0, hi, True, True, CLOSED_FORM)
    _, root = _quadratic_roots(n)
    return AlphaRange(
        1.0, root, True, True, ROOT_FOUND, residual=abs(quadratic_condition(n, root))
    )


def _co2(n: int, alpha: float) -> float:
    """Second rigidity condition; required negative."""
    _, _, chi = zeta_chi(n, alpha)
    return 4.0 * ((n + 5.0) * alpha - n - 3.0) * (alpha - 1.0) / (9.0 * chi) - 2.0 / (
        3.0 * (n - 2.0)
    )


def F_eval(n: int, alpha: float, regime: str) -> float:
    """Third rigidity condition (required negative); tends to -1/(3(n-1)) as
    alpha -> 1, which is what makes the window nonempty."""
    if alpha == 1.0:
        raise ValueError("alpha = 1 is excluded")
    _, z2, _ = zeta_chi(n, alpha)
    j = j_coefficient(GNParams(n, alpha, regime))
    return _co2(n, alpha) + n * (1.0 / (3.0 * (n - 1.0) * (n - 2.0)) + j / (32.0 * z2))


def _first_failure(cond, edge: float, samples: int = 4096) -> tuple[float, float] | None:
    """Smallest s in (0, edge) with cond(s) >= 0, bisected to _BISECT_TOL.

    Returns (s, |cond(s)|), or None when the condition holds up to the edge.
    """
    lo = edge * 1e-9
    if cond(lo) >= 0.0:
        return lo, abs(cond(lo))
    hi_bracket = None
    prev = lo
    for k in range(1, samples + 1):
        s = edge * (1.0 - 1e-12) * k / samples
        if s <= prev:
            continue
        if cond(s) >= 0.0:
            hi_bracket = (prev, s)
            break
        prev = s
    if hi_bracket is None:
        return None
    a, b = hi_bracket
    while b - a > _BISECT_TOL:
        mid = 0.5 * (a + b)
        if cond(mid) >= 0.0:
            b = mid
        else:
            a = mid
    return a, abs(cond(a))


def kappa(n: int, regime: str) -> KappaResult:
    """Largest s such that all rigidity conditions hold for 0 < |alpha-1| < s.

    The domain itself caps s (at 1 on the left; at the smaller of the
    critical-exponent distance and the second-order range on the right);
    within it, the first condition to fail binds.
    """
    if regime == MINUS:
        edge = 1.0
        at = lambda s: 1.0 - s
    elif regime == PLUS:
        edge = min(n / (n - 2.0) - 1.0, 4.0 / (n + 2.0))
        at = lambda s: 1.0 + s
    else:
        raise ValueError(f"unknown regime {regime!r}")
    hits = []
    failure = _first_failure(lambda s: _co2(n, at(s)), edge)
    if failure is not None:
        hits.append((failure[0], "co2", failure[1]))
    failure = _first_failure(lambda s: F_eval(n, at(s), regime), edge)
    if failure is not None:
        hits.append((failure[0], "co3", failure[1]))
    hits.append((edge, "regime_edge", 0.0))
    k, binding, residual = min(hits, key=lambda h: h[0])
    return KappaResult(kappa=k, binding=binding, residual=residual)

"""Periods of ``alpha = (i/c1 - c3/(c1 (c2 + i c3))) dc1`` and
``omega2 = c1/(c2 + i c3) dc1`` on the fiber curves, and the period lattice.

Cycles:

* ``Gamma1``: the circle ``|u - 1/2| = R`` in the u-chart, counterclockwise,
  on the branch ``v ~ +sqrt(2) u``.  The default ``R = 2 (1 + |u_p|)``
  encloses both branch points and both points over ``c1 = 0``.
* ``Gamma2`` / ``Gamma3``: small counterclockwise circles around ``c1 = 0``
  on the sheet through ``c2 = 0`` / ``c2 = -2i c3``.

The second lattice generator ``(2 pi, 0)`` is the exact residue period of
``-i d xi1 / xi1`` and is never integrated.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .cplx_path import Branched, Circle, integrate_contour, integrate_contour_detailed
from .curves import CLASSIFY_TOL, CurveClass, CurveParams, UChart, classify, u_chart
from .errors import CycleCollision, DegenerateFiber, RankDeficient

TWO_PI = 2 * math.pi
DEFAULT_TOL = 1e-10
# Orientation of Gamma1 relative to the closed form -pi i / (c4 sqrt(2 c4)).
# Pinned by comparing quadrature with the closed form (tests/test_periods.py).
NU_SIGN = 1


class Form(enum.Enum):
    Alpha = "alpha"
    Omega2 = "omega2"


class Cycle(enum.Enum):
    Gamma1 = "gamma1"
    Gamma2 = "gamma2"
    Gamma3 = "gamma3"


def _cpair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class PeriodPair:
    mu: complex
    nu: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.mu, self.nu], dtype=complex)


@dataclass(frozen=True)
class Lattice:
    g1: tuple[complex, complex]
    g2: tuple[complex, complex] = (TWO_PI, 0.0)

    def vector(self, n1, n2) -> np.ndarray:
        return n1 * np.asarray(self.g1, dtype=complex) + n2 * np.asarray(self.g2, dtype=complex)

    def coordinates(self, v) -> np.ndarray:
        """Real coordinates of ``v`` in the basis ``(g1, g2)`` (least squares)."""
        basis = np.column_stack([_realify(self.g1), _realify(self.g2)])
        x, *_ = np.linalg.lstsq(basis, _realify(v), rcond=None)
        return x


def _realify(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.concatenate([[z.real, z.imag] for z in v])


def _require_smooth(c: CurveParams):
    kind = classify(c)
    if kind is not CurveClass.SmoothCylinder:
        raise DegenerateFiber(f"periods need a smooth cylinder fiber, got {kind.value} at {c}")


def gamma1_radius(chart: UChart) -> float:
    return 2.0 * (1.0 + abs(chart.pole))


def _gamma1_integrand(chart: UChart, radius: float) -> tuple[Branched, Circle]:
    up = chart.pole
    k_alpha = chart.c3 / (chart.scale * chart.sqrt_c4)
    k_omega = chart.scale / chart.sqrt_c4

    def func(u, v):
        d = u - up
        return 1j / d - k_alpha / (v * d), k_omega * d / v

    u0 = 0.5 + radius
    v0 = math.sqrt(2 * u0 * (u0 - 1))
    return Branched(lambda u: 2 * u * (u - 1), func, v0), Circle(0.5, radius)


def mu_nu(c: CurveParams, chart: UChart | None = None, tol: float = DEFAULT_TOL,
          radius: float | None = None) -> PeriodPair:
    """Periods of ``alpha`` and ``omega2`` over Gamma1.

    ``chart`` is a prior for the branch data (the chart is recomputed at ``c``
    and continued from it); ``radius`` overrides the Gamma1 radius.
    """
    _require_smooth(c)
    ch = u_chart(c, chart)
    R = gamma1_radius(ch) if radius is None else float(radius)
    if R <= max(abs(ch.pole - 0.5), 0.5):
        raise ValueError(f"Gamma1 radius {R} does not enclose the pole and branch points")
    integrand, contour = _gamma1_integrand(ch, R)
    mu, nu = integrate_contour(integrand, contour, rel_tol=tol)
    return PeriodPair(complex(mu), complex(nu))


def mu_nu_c1_chart(c: CurveParams, chart: UChart | None = None, tol: float = DEFAULT_TOL,
                   radius: float | None = None) -> PeriodPair:
    """Same cycle as :func:`mu_nu`, integrated directly in the ``(c1, c2)`` chart.

    The image of ``|u - 1/2| = R`` is the circle of radius ``|s - r| R`` about
    ``(r + s)/2``; ``c2 + i c3`` is followed as a square root along it.
    """
    _require_smooth(c)
    ch = u_chart(c, chart)
    R = gamma1_radius(ch) if radius is None else float(radius)
    u0 = 0.5 + R
    v0 = math.sqrt(2 * u0 * (u0 - 1))
    w0 = ch.scale * ch.sqrt_c4 * v0
    contour = Circle(0.5 * (ch.r + ch.s), abs(ch.scale) * R, theta0=float(np.angle(ch.scale)))
    c3, c4 = ch.c3, ch.c4

    def func(c1, w):
        return 1j / c1 - c3 / (c1 * w), c1 / w

    integrand = Branched(lambda c1: 2 * c4 * c1 * c1 + 2 * c1 - c3 * c3, func, w0)
    mu, nu = integrate_contour(integrand, contour, rel_tol=tol)
    return PeriodPair(complex(mu), complex(nu))


def residue_radius(c: CurveParams) -> float:
    r, s = u_chart(c).r, u_chart(c).s
    if abs(c.c3) <= CLASSIFY_TOL:
        return max(abs(r), abs(s)) / 4
    return min(abs(r), abs(s)) / 4


def _residue_period(c: CurveParams, form: Form, cycle: Cycle, tol: float) -> complex:
    c3, c4 = c.c3, c.c4
    rho = residue_radius(c)
    if abs(c3) <= CLASSIFY_TOL:
        if cycle is Cycle.Gamma3:
            raise CycleCollision("Gamma3 coincides with Gamma2 when c3 = 0")
        if form is Form.Alpha:
            # alpha = i dc1/c1 exactly when c3 = 0; one turn around c1 = 0
            return complex(integrate_contour(lambda z: 1j / z, Circle(0, rho), rel_tol=tol))
        # c1 = 0 is a branch point here; the closed lift runs twice around it
        contour = Circle(0, rho, sweep=4 * math.pi)
        target = 0j
    else:
        contour = Circle(0, rho)
        target = 1j * c3 if cycle is Cycle.Gamma2 else -1j * c3

    def radicand(c1):
        return 2 * c4 * c1 * c1 + 2 * c1 - c3 * c3

    w0 = np.sqrt(complex(radicand(np.array([rho]))[0]))
    if abs(-w0 - target) < abs(w0 - target):
        w0 = -w0
    if form is Form.Alpha:
        def func(c1, w):
            return 1j / c1 - c3 / (c1 * w)
    else:
        def func(c1, w):
            return c1 / w
    res = integrate_contour_detailed(Branched(radicand, func, w0), contour, rel_tol=tol,
                                     abs_tol=tol)
    return complex(res.value)


def period(c: CurveParams, form: Form | str, cycle: Cycle | str, tol: float = DEFAULT_TOL) -> complex:
    """Period of ``form`` over ``cycle`` on the fiber over ``c``.

    >>> round(period(CurveParams(1, 1), "alpha", "gamma2").real, 9)
    -12.566370614
    """
    form, cycle = Form(form), Cycle(cycle)
    _require_smooth(c)
    if cycle is Cycle.Gamma1:
        pair = mu_nu(c, tol=tol)
        return pair.mu if form is Form.Alpha else pair.nu
    return _residue_period(c, form, cycle, tol)


def nu_closed_form(c: CurveParams, sqrt_c4: complex | None = None) -> complex:
    """``-pi i / (c4 sqrt(2 c4))`` with ``sqrt(2 c4) = sqrt(2) * sqrt_c4``
    (principal root unless given), times the pinned orientation sign."""
    sq = np.sqrt(complex(c.c4)) if sqrt_c4 is None else complex(sqrt_c4)
    return NU_SIGN * (-1j * math.pi / (c.c4 * math.sqrt(2) * sq))


def lattice(c: CurveParams, tol: float = DEFAULT_TOL, chart: UChart | None = None) -> Lattice:
    pair = mu_nu(c, chart, tol=tol)
    if abs(pair.nu) <= 1e-12 * max(1.0, abs(pair.mu)):
        raise RankDeficient(f"nu = {pair.nu} vanishes; the lattice would have rank one")
    basis = np.column_stack([_realify((pair.mu, pair.nu)), _realify((TWO_PI, 0.0))])
    sv = np.linalg.svd(basis, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise RankDeficient("lattice generators are real-linearly dependent")
    return Lattice(g1=(pair.mu, pair.nu))


def period_record(c: CurveParams, pair: PeriodPair) -> dict:
    """JSON object ``{c3, c4, mu, nu, g2}`` with complex numbers as [re, im]."""
    return {"c3": _cpair(c.c3), "c4": _cpair(c.c4), "mu": _cpair(pair.mu),
            "nu": _cpair(pair.nu), "g2": [TWO_PI, 0]}

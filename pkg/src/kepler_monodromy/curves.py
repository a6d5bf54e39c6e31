"""Fiber curves ``2 c4 c1^2 + 2 c1 = c2^2 + 2i c3 c2`` over ``c = (c3, c4)``.

Written as ``2 c4 (c1 - r)(c1 - s) = (c2 + i c3)^2``, the substitution
``c1 = (s - r) u + r``, ``c2 = (s - r) sqrt(c4) v - i c3`` normalizes every
smooth fiber with ``c4 != 0`` to ``2 u (u - 1) = v^2``.  The points over
``c1 = 0`` land at ``u = -r / (s - r)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFiber

CLASSIFY_TOL = 1e-12


class CurveClass(enum.Enum):
    ParabolicPlane = "ParabolicPlane"
    SmoothCylinder = "SmoothCylinder"
    SingularCone = "SingularCone"


@dataclass(frozen=True)
class CurveParams:
    c3: complex
    c4: complex

    def __post_init__(self):
        object.__setattr__(self, "c3", complex(self.c3))
        object.__setattr__(self, "c4", complex(self.c4))

    @property
    def discriminant(self) -> complex:
        """``1 + 2 c4 c3^2``; the fiber is singular where this vanishes."""
        return 1 + 2 * self.c4 * self.c3 ** 2


def classify(c: CurveParams) -> CurveClass:
    if abs(c.c4) <= CLASSIFY_TOL:
        return CurveClass.ParabolicPlane
    if abs(c.discriminant) <= CLASSIFY_TOL:
        return CurveClass.SingularCone
    return CurveClass.SmoothCylinder


@dataclass(frozen=True)
class UChart:
    """Branch data of the u-chart: branch points ``r, s`` and a root of ``c4``.

    Without a prior, ``r`` carries the minus sign of the square root; once the
    chart is continued along a path the labels follow continuity instead.
    """

    c3: complex
    c4: complex
    r: complex
    s: complex
    sqrt_c4: complex

    @property
    def scale(self) -> complex:
        return self.s - self.r

    @property
    def pole(self) -> complex:
        return -self.r / (self.s - self.r)

    def to_json(self) -> dict:
        return {k: [complex(getattr(self, k)).real, complex(getattr(self, k)).imag]
                for k in ("c3", "c4", "r", "s", "sqrt_c4")}


def branch_points(c: CurveParams) -> tuple[complex, complex]:
    """``(r, s)`` on principal branches, ``r`` with the minus sign."""
    root = np.sqrt(c.discriminant)
    return (-1 - root) / (2 * c.c4), (-1 + root) / (2 * c.c4)


def u_chart(c: CurveParams, prior: UChart | None = None) -> UChart:
    """Chart at ``c``; with ``prior``, the continuation nearest to it.

    Roots may swap labels relative to the principal formulas: that swap is
    how monodromy shows up.
    """
    if classify(c) is not CurveClass.SmoothCylinder:
        raise DegenerateFiber(f"no u-chart on the {classify(c).value} fiber at {c}")
    r, s = branch_points(c)
    sq = np.sqrt(c.c4)
    if prior is not None:
        if max(abs(s - prior.r), abs(r - prior.s)) < max(abs(r - prior.r), abs(s - prior.s)):
            r, s = s, r
        if abs(-sq - prior.sqrt_c4) < abs(sq - prior.sqrt_c4):
            sq = -sq
    return UChart(c.c3, c.c4, complex(r), complex(s), complex(sq))


def chart_step_ratio(prev: UChart, new: UChart) -> float:
    """Largest step ratio of the chart's branch data (accepted when < 1/2)."""
    sep_rs = abs(new.s - new.r)
    ratio_rs = max(abs(new.r - prev.r), abs(new.s - prev.s)) / sep_rs
    ratio_sq = abs(new.sqrt_c4 - prev.sqrt_c4) / (2 * abs(new.sqrt_c4))
    return max(ratio_rs, ratio_sq)


def from_u(chart: UChart, u, v):
    """Map ``(u, v)`` on ``2u(u-1) = v^2`` to ``(c1, c2)`` on the fiber."""
    c1 = chart.scale * u + chart.r
    c2 = chart.scale * chart.sqrt_c4 * v - 1j * chart.c3
    return c1, c2


def to_u(chart: UChart, c1, c2):
    u = (c1 - chart.r) / chart.scale
    v = (c2 + 1j * chart.c3) / (chart.scale * chart.sqrt_c4)
    return u, v


def pole_in_u(chart: UChart) -> complex:
    return chart.pole


def curve_residual(c: CurveParams, c1, c2):
    """``2 c4 c1^2 + 2 c1 - c2^2 - 2i c3 c2``."""
    return 2 * c.c4 * c1 * c1 + 2 * c1 - c2 * c2 - 2j * c.c3 * c2

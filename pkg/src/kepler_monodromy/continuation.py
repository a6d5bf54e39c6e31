"""Analytic continuation of the period lattice along loops in c-space.

Periods are continued by recomputation at samples of the loop: the Gamma1
contour in the u-chart stays fixed and the chart's branch data
``(r, s, sqrt_c4)`` is chained from sample to sample.  A sample is accepted
only if the chart moves less than half the root separation and the periods
move less than a quarter of the shortest lattice vector; otherwise a midpoint
is inserted.

Monodromy matrices use the row convention: row ``k`` holds the coordinates of
the transported generator ``g_k`` in the initial basis ``(g1, g2)``.  The
column form (the transpose) is reported alongside.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .curves import CurveClass, CurveParams, UChart, chart_step_ratio, classify, u_chart
from .errors import (
    BadRadius,
    ContinuityLost,
    IllConditionedBasis,
    NonIntegerCoefficients,
    SampleOnSingularLocus,
)
from .periods import DEFAULT_TOL, TWO_PI, PeriodPair, _realify, mu_nu

DEFAULT_SAMPLES = 256
MAX_SAMPLES = 4096
PRESAMPLES = 64
INTEGER_TOL = 1e-6


class LoopKind(enum.Enum):
    Discriminant = "discriminant"
    C4Axis = "c4axis"
    Composite = "composite"
    Custom = "custom"


@dataclass(frozen=True)
class LoopSpec:
    """Closed loop ``t -> (c3, c4)``, ``t`` in [0, 1].

    Circular kinds run ``c4 = center + radius exp(i (start_angle + 2 pi t))``
    in the plane ``c3 = const``.  ``turns`` repeats the loop (negative values
    reverse it).  ``Custom`` loops supply ``custom(t) -> (c3, c4)``.
    """

    kind: LoopKind
    c3: complex = 1.0
    center: complex = 0.0
    radius: float = 0.25
    samples: int = DEFAULT_SAMPLES
    start_angle: float = 0.0
    turns: int = 1
    custom: Callable[[float], tuple[complex, complex]] | None = field(default=None, compare=False)

    def _once(self, t: float) -> tuple[complex, complex]:
        if self.kind is LoopKind.Custom:
            c3, c4 = self.custom(t)
            return complex(c3), complex(c4)
        if self.kind is LoopKind.Composite:
            return complex(self.c3), _composite_c4(self.radius, t)
        return (complex(self.c3),
                self.center + self.radius * np.exp(1j * (self.start_angle + 2 * math.pi * t)))

    def point(self, t: float) -> CurveParams:
        n = abs(self.turns)
        if n == 0:
            tau = 0.0
        else:
            tau = t * n - math.floor(t * n) if t < 1.0 else 1.0
            if self.turns < 0:
                tau = 1.0 - tau
        return CurveParams(*self._once(tau))

    def with_(self, **changes) -> "LoopSpec":
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update(changes)
        return LoopSpec(**d)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "c3": [complex(self.c3).real, complex(self.c3).imag],
                "center": [complex(self.center).real, complex(self.center).imag],
                "radius": self.radius, "samples": self.samples,
                "start_angle": self.start_angle, "turns": self.turns}


# fractions of [0, 1] spent on: discriminant circle, bridge, c4-axis circle, bridge
_COMPOSITE_SPLIT = (0.4, 0.1, 0.4, 0.1)


def _composite_c4(r1: float, t: float) -> complex:
    """Discriminant circle based at ``-1/2 + r1``, a real bridge to ``-r1``, the
    c4-axis circle based there, and the bridge back: encircles both
    ``c4 = -1/2`` and ``c4 = 0`` once, counterclockwise."""
    a = -0.5 + r1
    b = -r1
    edges = np.cumsum((0.0,) + _COMPOSITE_SPLIT)
    if t <= edges[1]:
        x = t / _COMPOSITE_SPLIT[0]
        return -0.5 + r1 * np.exp(2j * math.pi * x)
    if t <= edges[2]:
        x = (t - edges[1]) / _COMPOSITE_SPLIT[1]
        return complex(a + (b - a) * x)
    if t <= edges[3]:
        x = (t - edges[2]) / _COMPOSITE_SPLIT[2]
        return r1 * np.exp(1j * (math.pi + 2 * math.pi * x))
    x = (t - edges[3]) / _COMPOSITE_SPLIT[3]
    return complex(b + (a - b) * x)


def standard_loop(kind: LoopKind | str, r1: float = 0.25, samples: int = DEFAULT_SAMPLES,
                  start_angle: float = 0.0, turns: int = 1, c3: complex = 1.0) -> LoopSpec:
    """Loop around the discriminant (center ``c4 = -1/2``), around ``c4 = 0``,
    or the composite of both, in the plane ``c3 = 1``."""
    kind = LoopKind(kind)
    if not 0 < r1 < 0.5:
        raise BadRadius(f"r1 must lie in (0, 1/2), got {r1}")
    if samples < 64:
        raise ValueError("samples must be at least 64")
    if kind is LoopKind.Discriminant:
        center = -0.5
    elif kind in (LoopKind.C4Axis, LoopKind.Composite):
        center = 0.0
    else:
        raise ValueError("custom loops are built with LoopSpec(kind=LoopKind.Custom, custom=...)")
    return LoopSpec(kind, c3=c3, center=center, radius=r1, samples=samples,
                    start_angle=start_angle, turns=turns)


def _check_admissible(c: CurveParams, t: float):
    kind = classify(c)
    if kind is not CurveClass.SmoothCylinder:
        raise SampleOnSingularLocus(f"loop meets the {kind.value} locus at t={t:.15g}")


def _march(loop: LoopSpec, evaluate, accept, samples: int, max_samples: int):
    """Walk the loop, inserting midpoints where ``accept(prev, new)`` fails."""
    grid = np.linspace(0.0, 1.0, samples + 1)
    c0 = loop.point(0.0)
    _check_admissible(c0, 0.0)
    states = [evaluate(c0, None)]
    ts = [0.0]
    pending = list(reversed(grid[1:].tolist()))
    while pending:
        t = pending[-1]
        c = loop.point(t)
        _check_admissible(c, t)
        new = evaluate(c, states[-1])
        if accept(states[-1], new):
            pending.pop()
            ts.append(t)
            states.append(new)
            if len(ts) > max_samples + 1:
                raise ContinuityLost(f"more than {max_samples} samples needed")
        else:
            if t - ts[-1] < 1e-12 or len(ts) + len(pending) > 4 * max_samples:
                raise ContinuityLost(f"continuity cannot be restored near t={ts[-1]:.15g}")
            pending.append(0.5 * (ts[-1] + t))
    return np.array(ts), states


def _chart_state(c, prev):
    return u_chart(c, None if prev is None else prev)


def _chart_ok(prev: UChart, new: UChart) -> bool:
    return chart_step_ratio(prev, new) < 0.5


def chart_chain(loop: LoopSpec, samples: int | None = None,
                max_samples: int = MAX_SAMPLES) -> tuple[np.ndarray, list[UChart]]:
    """Prior-chained u-charts along ``loop``."""
    return _march(loop, _chart_state, _chart_ok, samples or loop.samples, max_samples)


@dataclass
class ContinuationTrace:
    loop: LoopSpec
    t: np.ndarray
    charts: list[UChart]
    periods: list[PeriodPair]
    radius: float
    closed_in_c: bool

    @property
    def pole_path(self) -> np.ndarray:
        return np.array([ch.pole for ch in self.charts])

    @property
    def initial(self) -> PeriodPair:
        return self.periods[0]

    @property
    def final(self) -> PeriodPair:
        return self.periods[-1]

    def records(self) -> Iterable[dict]:
        def pair(z):
            z = complex(z)
            return [z.real, z.imag]
        for t, ch, p in zip(self.t, self.charts, self.periods):
            yield {"t": float(t), "c3": pair(ch.c3), "c4": pair(ch.c4), "r": pair(ch.r),
                   "s": pair(ch.s), "sqrt_c4": pair(ch.sqrt_c4), "u_p": pair(ch.pole),
                   "mu": pair(p.mu), "nu": pair(p.nu)}

    def write_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for rec in self.records():
                fh.write(json.dumps(rec) + "\n")


def _min_gap(*pairs: PeriodPair) -> float:
    # shortest nonzero vector of Z(mu, nu) + Z(2 pi, 0) is at least min(2 pi, |nu|)
    return min([TWO_PI] + [abs(p.nu) for p in pairs])


def continue_periods(loop: LoopSpec, tol: float = DEFAULT_TOL,
                     max_samples: int = MAX_SAMPLES) -> ContinuationTrace:
    """Continue ``(mu, nu)`` once around ``loop``."""
    _, coarse = chart_chain(loop, samples=PRESAMPLES, max_samples=max_samples)
    radius = 2.0 * (1.0 + max(abs(ch.pole) for ch in coarse))

    def evaluate(c, prev):
        chart = u_chart(c, None if prev is None else prev[0])
        return chart, mu_nu(c, chart, tol=tol, radius=radius)

    def accept(prev, new):
        if not _chart_ok(prev[0], new[0]):
            return False
        bound = 0.25 * _min_gap(prev[1], new[1])
        return (abs(new[1].mu - prev[1].mu) < bound) and (abs(new[1].nu - prev[1].nu) < bound)

    ts, states = _march(loop, evaluate, accept, loop.samples, max_samples)
    c_start, c_end = loop.point(0.0), loop.point(1.0)
    closed = abs(c_start.c3 - c_end.c3) + abs(c_start.c4 - c_end.c4) <= 1e-12
    return ContinuationTrace(loop=loop, t=ts, charts=[s[0] for s in states],
                             periods=[s[1] for s in states], radius=radius, closed_in_c=closed)


@dataclass(frozen=True)
class MonodromyMatrix:
    entries: np.ndarray          # 2x2 integers, row convention
    real_solution: np.ndarray    # unrounded least-squares coefficients
    residual: float

    @property
    def column_form(self) -> np.ndarray:
        return self.entries.T

    @property
    def det(self) -> int:
        return int(round(np.linalg.det(self.entries)))

    def to_json(self) -> dict:
        return {"rows": self.entries.tolist(), "column_form": self.column_form.tolist(),
                "residual": self.residual, "det": self.det}


def monodromy(trace: ContinuationTrace) -> MonodromyMatrix:
    """Integer matrix taking ``(g1, g2)`` at the start to their continuations."""
    if not trace.closed_in_c:
        raise ValueError("the loop is not closed in c-space")
    g1_0 = (trace.initial.mu, trace.initial.nu)
    g1_f = (trace.final.mu, trace.final.nu)
    g2 = (TWO_PI, 0.0)
    basis = np.column_stack([_realify(g1_0), _realify(g2)])
    if np.linalg.cond(basis) > 1e10:
        raise IllConditionedBasis("initial lattice basis is numerically degenerate")
    rows = []
    for image in (g1_f, g2):
        x, *_ = np.linalg.lstsq(basis, _realify(image), rcond=None)
        rows.append(x)
    real = np.array(rows)
    entries = np.rint(real).astype(int)
    # distance from integers plus the fit residual of the rounded matrix
    fit = max(np.max(np.abs(basis @ entries[k] - _realify(img)))
              for k, img in enumerate((g1_f, g2))) / max(1.0, np.max(np.abs(basis)))
    residual = float(max(np.max(np.abs(real - entries)), fit))
    if residual >= INTEGER_TOL:
        raise NonIntegerCoefficients(f"monodromy coefficients {real.tolist()} are not integers")
    return MonodromyMatrix(entries=entries, real_solution=real, residual=residual)


@dataclass
class PoleLocus:
    loop: LoopSpec
    t: np.ndarray
    poles: np.ndarray

    @property
    def swept_angle(self) -> float:
        """Signed total angle swept by ``u_p`` around ``1/2``."""
        return _swept(self.poles - 0.5)

    @property
    def angular_span(self) -> float:
        return abs(self.swept_angle)

    @property
    def winding_about_one(self) -> float:
        return _swept(self.poles - 1.0) / (2 * math.pi)

    @property
    def radius_about_half(self) -> tuple[float, float]:
        d = np.abs(self.poles - 0.5)
        return float(d.min()), float(d.max())

    def csv_rows(self) -> list[str]:
        rows = ["t,u_re,u_im"]
        rows += [f"{t!r},{z.real!r},{z.imag!r}" for t, z in zip(self.t.tolist(), self.poles.tolist())]
        return rows


def _swept(z: np.ndarray) -> float:
    return float(np.sum(np.angle(z[1:] / z[:-1])))


def pole_locus(loop: LoopSpec, max_samples: int = MAX_SAMPLES) -> PoleLocus:
    ts, charts = chart_chain(loop, max_samples=max_samples)
    return PoleLocus(loop=loop, t=ts, poles=np.array([ch.pole for ch in charts]))


def loop_monodromy(loop: LoopSpec, tol: float = DEFAULT_TOL) -> tuple[MonodromyMatrix, ContinuationTrace]:
    trace = continue_periods(loop, tol=tol)
    return monodromy(trace), trace

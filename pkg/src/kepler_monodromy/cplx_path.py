"""Parametrized complex paths, branch tracking of two-valued algebraic
functions, and adaptive contour quadrature with branch state.

Every path is a map ``t -> z(t)`` on ``[0, 1]``.  Circles are exact; polylines
are piecewise linear in ``t``.  Branch tracking follows one root of a
two-valued function (a square root, or one root of a quadratic) and only
accepts a step when the new value is closer to the previous one than half the
distance to the competing root; otherwise the step is bisected.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BadInitialRoot,
    DegenerateLeadingCoefficient,
    IntegrandSingular,
    PathThroughZero,
    RootCollision,
    ToleranceNotMet,
)

DEFAULT_REL_TOL = 1e-10
DEFAULT_MAX_EVALS = 2**20
CLOSED_TOL = 1e-12
# smallest parameter step the trackers will bisect down to
MIN_STEP = 1e-13


# --------------------------------------------------------------------------
# paths
# --------------------------------------------------------------------------

class ComplexPath:
    """Base class: subclasses implement ``_z`` and ``_dz`` on arrays of t."""

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = self._z(np.atleast_1d(t_arr))
        return out[0] if t_arr.ndim == 0 else out

    def derivative(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = self._dz(np.atleast_1d(t_arr))
        return out[0] if t_arr.ndim == 0 else out

    def _z(self, t):
        raise NotImplementedError

    def _dz(self, t):
        raise NotImplementedError

    @property
    def closed(self) -> bool:
        z0, z1 = self(0.0), self(1.0)
        return abs(z1 - z0) <= CLOSED_TOL * max(1.0, abs(z0))

    def samples(self, n: int = 64):
        """Return ``(t, z)`` on ``n + 1`` equally spaced parameters."""
        t = np.linspace(0.0, 1.0, n + 1)
        return t, self._z(t)

    def reversed(self) -> "ComplexPath":
        return Reversed(self)

    def __add__(self, other: "ComplexPath") -> "ComplexPath":
        return Concatenation([self, other])


class Circle(ComplexPath):
    """``center + radius * exp(i (theta0 + sweep t))``; counterclockwise for
    positive sweep.  A sweep of ``4 pi`` runs the circle twice."""

    def __init__(self, center: complex, radius: float, theta0: float = 0.0,
                 sweep: float = 2 * np.pi):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.center = complex(center)
        self.radius = float(radius)
        self.theta0 = float(theta0)
        self.sweep = float(sweep)

    def _z(self, t):
        return self.center + self.radius * np.exp(1j * (self.theta0 + self.sweep * t))

    def _dz(self, t):
        return 1j * self.sweep * self.radius * np.exp(1j * (self.theta0 + self.sweep * t))

    def __repr__(self):
        return (f"Circle(center={self.center!r}, radius={self.radius!r}, "
                f"theta0={self.theta0!r}, sweep={self.sweep!r})")


class Polyline(ComplexPath):
    """Piecewise-linear path through ``points`` at parameters ``knots``
    (uniform when omitted)."""

    def __init__(self, points: Sequence[complex], knots: Sequence[float] | None = None):
        self.points = np.asarray(points, dtype=complex)
        if self.points.size < 2:
            raise ValueError("a polyline needs at least two points")
        if knots is None:
            knots = np.linspace(0.0, 1.0, self.points.size)
        self.knots = np.asarray(knots, dtype=float)
        if self.knots.shape != self.points.shape:
            raise ValueError("knots and points must have the same length")
        if self.knots[0] != 0.0 or self.knots[-1] != 1.0 or np.any(np.diff(self.knots) <= 0):
            raise ValueError("knots must increase strictly from 0 to 1")

    def _segment(self, t):
        return np.clip(np.searchsorted(self.knots, t, side="right") - 1, 0, self.knots.size - 2)

    def _z(self, t):
        k = self._segment(t)
        t0, t1 = self.knots[k], self.knots[k + 1]
        lam = (t - t0) / (t1 - t0)
        return self.points[k] * (1 - lam) + self.points[k + 1] * lam

    def _dz(self, t):
        k = self._segment(t)
        return (self.points[k + 1] - self.points[k]) / (self.knots[k + 1] - self.knots[k])


class FunctionPath(ComplexPath):
    """Path given by a vectorized function of t, with optional derivative.

    The derivative is only needed for quadrature.
    """

    def __init__(self, func: Callable, deriv: Callable | None = None):
        self.func = func
        self.deriv = deriv

    def _z(self, t):
        return np.asarray(self.func(t), dtype=complex) * np.ones_like(t, dtype=complex)

    def _dz(self, t):
        if self.deriv is None:
            raise ValueError("FunctionPath has no derivative; pass deriv= to integrate over it")
        return np.asarray(self.deriv(t), dtype=complex) * np.ones_like(t, dtype=complex)


class Reversed(ComplexPath):
    def __init__(self, path: ComplexPath):
        self.path = path

    def _z(self, t):
        return self.path._z(1.0 - t)

    def _dz(self, t):
        return -self.path._dz(1.0 - t)


class Concatenation(ComplexPath):
    """Pieces run one after another, each on an equal share of [0, 1]."""

    def __init__(self, pieces: Sequence[ComplexPath]):
        flat: list[ComplexPath] = []
        for p in pieces:
            flat.extend(p.pieces if isinstance(p, Concatenation) else [p])
        self.pieces = flat

    def _locate(self, t):
        n = len(self.pieces)
        k = np.clip(np.floor(t * n).astype(int), 0, n - 1)
        return k, t * n - k

    def _z(self, t):
        k, local = self._locate(t)
        out = np.empty(t.shape, dtype=complex)
        for i, piece in enumerate(self.pieces):
            m = k == i
            if np.any(m):
                out[m] = piece._z(local[m])
        return out

    def _dz(self, t):
        k, local = self._locate(t)
        out = np.empty(t.shape, dtype=complex)
        for i, piece in enumerate(self.pieces):
            m = k == i
            if np.any(m):
                out[m] = len(self.pieces) * piece._dz(local[m])
        return out


# --------------------------------------------------------------------------
# branch tracking
# --------------------------------------------------------------------------

@dataclass
class BranchTrace:
    """One continuously followed root, sampled at (possibly refined) t."""

    t: np.ndarray
    values: np.ndarray
    max_step_ratio: float
    points: np.ndarray | None = None       # driving values at t (e.g. the radicand)
    path: ComplexPath | None = field(default=None, repr=False)

    @property
    def initial(self) -> complex:
        return complex(self.values[0])

    @property
    def final(self) -> complex:
        return complex(self.values[-1])


def _follow_pair(roots_at, t_grid, start, separation_floor, collision_exc, max_points):
    """Follow an ordered root pair along ``t_grid`` with bisection.

    ``roots_at(t)`` returns the two roots (unordered).  Returns the accepted
    parameters, the tracked pairs and the largest step ratio seen.
    """
    cur = np.array(start, dtype=complex)
    ts = [float(t_grid[0])]
    vals = [cur.copy()]
    worst = 0.0
    pending = list(reversed([float(t) for t in t_grid[1:]]))
    t_prev = ts[0]
    while pending:
        t_next = pending[-1]
        q = np.asarray(roots_at(t_next), dtype=complex)
        sep = abs(q[0] - q[1])
        if sep <= separation_floor(q):
            raise collision_exc(f"roots collide at t={t_next:.15g} (separation {sep:.3e})")
        keep = max(abs(q[0] - cur[0]), abs(q[1] - cur[1]))
        swap = max(abs(q[1] - cur[0]), abs(q[0] - cur[1]))
        if swap < keep:
            q = q[::-1]
            keep = swap
        ratio = keep / sep
        if ratio < 0.5:
            pending.pop()
            cur = q
            ts.append(t_next)
            vals.append(cur.copy())
            worst = max(worst, ratio)
            t_prev = t_next
            if len(ts) > max_points:
                raise collision_exc("refinement budget exhausted while tracking roots")
        else:
            if t_next - t_prev < MIN_STEP:
                raise collision_exc(f"cannot separate roots near t={t_prev:.15g}")
            pending.append(0.5 * (t_prev + t_next))
    return np.array(ts), np.array(vals), worst


def continue_sqrt(w_path: ComplexPath, initial_root: complex, samples: int = 64,
                  zero_tol: float = 1e-14, max_points: int = 2**16) -> BranchTrace:
    """Continue ``sqrt(w(t))`` along ``w_path`` starting from ``initial_root``.

    >>> tr = continue_sqrt(FunctionPath(lambda t: np.exp(2j * np.pi * t)), 1.0)
    >>> round(tr.final.real, 12)
    -1.0
    """
    w0 = complex(w_path(0.0))
    scale = max(1.0, abs(w0))
    if abs(complex(initial_root) ** 2 - w0) > 1e-10 * scale:
        raise BadInitialRoot(f"initial root squared {complex(initial_root)**2} != {w0}")
    if abs(w0) <= zero_tol * scale:
        raise PathThroughZero("path starts at 0")

    def roots_at(t):
        r = np.sqrt(complex(w_path(t)))
        return r, -r

    def floor(q):
        return 2 * np.sqrt(zero_tol * scale)

    t_grid = np.linspace(0.0, 1.0, samples + 1)
    r0 = complex(initial_root)
    ts, pairs, worst = _follow_pair(roots_at, t_grid, (r0, -r0), floor, PathThroughZero, max_points)
    return BranchTrace(t=ts, values=pairs[:, 0], max_step_ratio=worst,
                       points=w_path(ts), path=w_path)


def quadratic_roots(a: complex, b: complex, c: complex) -> tuple[complex, complex]:
    """Roots of ``a x^2 + b x + c`` without cancellation in the smaller one."""
    a, b, c = complex(a), complex(b), complex(c)
    sd = np.sqrt(b * b - 4 * a * c)
    # pick the sign that makes |b + sd| large
    if abs(b + sd) < abs(b - sd):
        sd = -sd
    q = -0.5 * (b + sd)
    if q == 0:
        return 0j, 0j
    return q / a, c / q


def track_quadratic_roots(coeffs: Callable[[float], tuple], initial_roots: Sequence[complex],
                          samples: int = 256, rel_tol: float = 1e-12,
                          max_points: int = 2**16) -> tuple[BranchTrace, BranchTrace]:
    """Follow both roots of ``a(t) x^2 + b(t) x + c(t)`` for t in [0, 1].

    ``coeffs(t)`` returns ``(a, b, c)``; ``initial_roots`` is the ordered pair
    to follow.  Raises ``RootCollision`` instead of guessing when the roots meet.
    """
    def abc(t):
        a, b, c = (complex(x) for x in coeffs(t))
        if abs(a) <= rel_tol * max(abs(b), abs(c), 1e-300):
            raise DegenerateLeadingCoefficient(f"leading coefficient vanishes at t={t}")
        return a, b, c

    start = abc(0.0)
    q0 = np.array(quadratic_roots(*start))
    p = np.asarray(initial_roots, dtype=complex)
    err = min(max(abs(q0[0] - p[0]), abs(q0[1] - p[1])),
              max(abs(q0[1] - p[0]), abs(q0[0] - p[1])))
    if err > 1e-8 * max(1.0, np.max(np.abs(q0))):
        raise BadInitialRoot(f"initial roots {tuple(p)} are not the roots {tuple(q0)}")

    def floor(q):
        return rel_tol * max(1.0, abs(q[0]), abs(q[1]))

    t_grid = np.linspace(0.0, 1.0, samples + 1)
    ts, pairs, worst = _follow_pair(lambda t: quadratic_roots(*abc(t)), t_grid, p, floor,
                                    RootCollision, max_points)
    pts = np.array([abc(t) for t in ts])
    return (BranchTrace(t=ts, values=pairs[:, 0], max_step_ratio=worst, points=pts),
            BranchTrace(t=ts, values=pairs[:, 1], max_step_ratio=worst, points=pts))


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------

# Gauss-Kronrod 7/15 on [-1, 1]
_XK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                0.207784955007898467600689403773245, 0.0])
_WK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

# ascending nodes and matching weights; Gauss nodes are the odd-indexed Kronrod ones
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KW = np.concatenate([_WK[:-1], _WK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Branched:
    """Integrand ``func(z, y)`` where ``y`` is a continuously followed branch of
    ``sqrt(radicand(z))`` starting at ``initial_root`` at the contour start.

    ``func`` may return a tuple of arrays to integrate several forms against
    the same branch state.
    """

    radicand: Callable
    func: Callable
    initial_root: complex


@dataclass
class ContourIntegral:
    value: complex | np.ndarray
    error: float | np.ndarray
    evaluations: int
    panels: int
    final_root: complex | None


def _branch_values(radicand, z, y_start):
    """Signs of sqrt along ``z`` (ordered) continued from ``y_start``.

    Returns the branch values, or None when a step is ambiguous.
    """
    w = radicand(z)
    p = np.sqrt(w)
    if np.any(np.abs(p) == 0) or not np.all(np.isfinite(p)):
        return None
    prev = np.concatenate([[y_start], p[:-1]])
    flips = np.where(np.abs(p - prev) <= np.abs(p + prev), 1.0, -1.0)
    # the first comparison is against the actual branch value, later ones
    # against principal roots, so a cumulative product of sign changes works
    signs = np.cumprod(flips)
    y = signs * p
    y_prev = np.concatenate([[y_start], y[:-1]])
    if np.any(np.abs(y - y_prev) >= np.abs(y)):
        return None
    return y


def integrate_contour_detailed(integrand, contour: ComplexPath, rel_tol: float = DEFAULT_REL_TOL,
                               max_evals: int = DEFAULT_MAX_EVALS, initial_panels: int = 8,
                               abs_tol: float = 0.0) -> ContourIntegral:
    """Adaptive G7/K15 quadrature of ``integrand`` along ``contour``.

    Panels are processed strictly left to right so that a branch state can be
    carried through the refinement points.  A panel is accepted when the
    Kronrod/Gauss difference is below ``rel_tol`` times the panel's
    ``integral |f| |dz|`` (or ``abs_tol``), which bounds the total error by
    ``rel_tol * integral |f| |dz|``.
    """
    branched = isinstance(integrand, Branched)
    y = complex(integrand.initial_root) if branched else None
    if branched:
        w0 = complex(integrand.radicand(np.array([contour(0.0)]))[0])
        if abs(y * y - w0) > 1e-8 * max(1.0, abs(w0)):
            raise BadInitialRoot(f"initial root squared {y*y} != radicand {w0}")

    edges = np.linspace(0.0, 1.0, initial_panels + 1)
    stack = [(edges[k], edges[k + 1]) for k in range(initial_panels - 1, -1, -1)]
    total = None
    err_total = None
    evals = 0
    panels = 0
    while stack:
        a, b = stack.pop()
        half = 0.5 * (b - a)
        t = a + half * (1.0 + _NODES)
        z = contour._z(t)
        dz = contour._dz(t)
        if branched:
            zb = np.concatenate([z, contour._z(np.array([b]))])
            yv = _branch_values(integrand.radicand, zb, y)
            if yv is None:
                if b - a < MIN_STEP:
                    raise IntegrandSingular(f"branch point on the contour near t={a:.15g}")
                mid = 0.5 * (a + b)
                stack.append((mid, b))
                stack.append((a, mid))
                continue
            with np.errstate(all="ignore"):
                f = integrand.func(z, yv[:-1])
        else:
            with np.errstate(all="ignore"):
                f = integrand(z)
        evals += 15
        f = np.atleast_2d(np.asarray(f, dtype=complex))
        if f.shape[-1] != 15:
            f = np.broadcast_to(f, (f.shape[0], 15))
        if not np.all(np.isfinite(f)):
            raise IntegrandSingular(f"integrand not finite on the contour near t={a:.15g}")
        g = f * dz
        kron = half * (g @ _KW)
        gauss = half * (g @ _GW)
        l1 = half * (np.abs(g) @ _KW)
        err = np.abs(kron - gauss)
        limit = np.maximum(np.maximum(rel_tol * l1, abs_tol * (b - a)), 50 * _EPS * l1)
        if np.all(err <= limit):
            total = kron if total is None else total + kron
            err_total = err if err_total is None else err_total + err
            panels += 1
            if branched:
                y = complex(yv[-1])
            continue
        if evals >= max_evals or b - a < MIN_STEP:
            raise ToleranceNotMet(f"refinement budget exhausted near t={a:.15g}")
        mid = 0.5 * (a + b)
        stack.append((mid, b))
        stack.append((a, mid))

    if total.shape == (1,):
        value, error = complex(total[0]), float(err_total[0])
    else:
        value, error = total, err_total
    return ContourIntegral(value=value, error=error, evaluations=evals, panels=panels,
                           final_root=y)


def integrate_contour(integrand, contour: ComplexPath, rel_tol: float = DEFAULT_REL_TOL,
                      max_evals: int = DEFAULT_MAX_EVALS):
    """Line integral of ``integrand`` over ``contour``.

    ``integrand`` is either a vectorized function of z or a :class:`Branched`
    integrand.  Returns a complex number, or an array for tuple-valued forms.
    """
    return integrate_contour_detailed(integrand, contour, rel_tol=rel_tol,
                                      max_evals=max_evals).value

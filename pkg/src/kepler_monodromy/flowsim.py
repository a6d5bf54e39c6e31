"""Complex-time integration of the H- and J-flows.

A trajectory from ``p`` to time ``T`` runs along the straight ray
``t = sigma T``, ``sigma`` in [0, 1], with an adaptive DOP853 pair.  The state
carries ``c1`` as a fifth component, ``dc1/dt = (xi1' xi2 + xi1 xi2') / (2 c1)``,
so the sheet is followed by continuity.  Conserved quantities are only
monitored, never projected back.

Convention block (pinned by the lattice-return experiment):

* lattice vectors ``(a, b)`` are joint return times: J-flow time ``a``
  composed after H-flow time ``b``;
* ``J_FLOW_SIGN`` and ``NU_SIGN`` are both +1 (see :mod:`phase`, :mod:`periods`).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import phase
from .errors import CollisionApproach, StepUnderflow
from .phase import PhasePoint

COLLISION_THRESHOLD = 1e-8
DEFAULT_TOL = 1e-12


@dataclass
class FlowResult:
    endpoint: PhasePoint
    drift_H: float
    drift_J: float
    steps: int
    sheet_residual: float     # max |c1^2 - xi1 xi2| / |xi1 xi2| along the trajectory
    times: np.ndarray         # complex times of the accepted steps
    states: np.ndarray        # shape (5, n): xi1, xi2, eta1, eta2, c1

    def csv_rows(self) -> list[str]:
        names = ["t", "xi1", "xi2", "eta1", "eta2", "c1", "H", "J"]
        header = ",".join(f"{n}_re,{n}_im" for n in names)
        xi1, xi2, eta1, eta2, c1 = self.states
        H = 0.5 * eta1 * eta2 - 1.0 / c1
        J = 0.5j * (xi1 * eta2 - xi2 * eta1)
        cols = np.vstack([self.times, self.states, H, J]).T
        rows = [header]
        for rec in cols:
            rows.append(",".join(f"{z.real!r},{z.imag!r}" for z in rec.tolist()))
        return rows


def _rhs(which: str):
    sign = phase.HAMILTONIAN_SIGN
    if which == "H":
        def f(y):
            xi1, xi2, eta1, eta2, c1 = y
            c1cube = c1 ** 3
            d = sign * np.array([eta1, eta2, -xi1 / c1cube, -xi2 / c1cube])
            dc1 = (d[0] * xi2 + xi1 * d[1]) / (2 * c1)
            return np.append(d, dc1)
    elif which == "J":
        def f(y):
            xi1, xi2, eta1, eta2, c1 = y
            return sign * 1j * np.array([xi1, -xi2, eta1, -eta2, 0.0])
    else:
        raise ValueError(f"unknown field {which!r}; expected 'H' or 'J'")
    return f


def integrate(p: PhasePoint, which: str, T: complex, tol: float = DEFAULT_TOL) -> FlowResult:
    """Flow ``p`` for complex time ``T`` along the ray from 0."""
    T = complex(T)
    y0 = p.as_array()
    H0, J0 = phase.energy(p), phase.angular_momentum(p)
    if T == 0:
        return FlowResult(p, 0.0, 0.0, 0, 0.0, np.zeros(1, complex), y0[:, None])
    field = _rhs(which)

    def rhs(s, y):
        return T * field(y)

    def collision(s, y):
        return abs(y[0] * y[1]) - COLLISION_THRESHOLD
    collision.terminal = True

    scale = max(1.0, float(np.max(np.abs(y0))))
    sol = solve_ivp(rhs, (0.0, 1.0), y0.astype(complex), method="DOP853", rtol=tol,
                    atol=tol * scale, events=collision)
    if sol.status == 1:
        raise CollisionApproach(f"|xi1 xi2| fell below {COLLISION_THRESHOLD} at t = {sol.t[-1] * T}")
    if sol.status != 0:
        raise StepUnderflow(sol.message)

    xi1, xi2, eta1, eta2, c1 = sol.y
    H = 0.5 * eta1 * eta2 - 1.0 / c1
    J = 0.5j * (xi1 * eta2 - xi2 * eta1)
    prod = xi1 * xi2
    sheet_res = float(np.max(np.abs(c1 * c1 - prod) / np.abs(prod)))
    # re-resolve c1 exactly, keeping the integrated root's sheet
    end = sol.y[:, -1]
    root = np.sqrt(end[0] * end[1])
    if abs(root + end[4]) < abs(root - end[4]):
        root = -root
    endpoint = PhasePoint(end[0], end[1], end[2], end[3], root)
    return FlowResult(endpoint=endpoint,
                      drift_H=float(np.max(np.abs(H - H0))),
                      drift_J=float(np.max(np.abs(J - J0))),
                      steps=int(sol.t.size - 1),
                      sheet_residual=sheet_res,
                      times=sol.t * T,
                      states=sol.y)


def distance(p: PhasePoint, q: PhasePoint) -> float:
    """Max modulus difference over the four coordinates and ``c1``."""
    return float(np.max(np.abs(p.as_array() - q.as_array())))


def lattice_return(p: PhasePoint, v, tol: float = DEFAULT_TOL) -> float:
    """Distance from ``p`` after H-time ``v[1]`` followed by J-time ``v[0]``."""
    a, b = complex(v[0]), complex(v[1])
    q = integrate(p, "H", b, tol).endpoint
    q = integrate(q, "J", a, tol).endpoint
    return distance(p, q)


def reference_point(c4: float = -0.25) -> PhasePoint:
    """Perihelion of the real Kepler orbit with ``J = 1`` and ``H = c4 < 0``.

    With ``x = (q, 0)``, ``y = (0, 1/q)``: ``1/(2 q^2) - 1/q = c4``, so
    ``q = (1 - sqrt(1 + 2 c4)) / (-2 c4)``.
    """
    if not -0.5 < c4 < 0:
        raise ValueError("the reference orbit needs -1/2 < c4 < 0")
    q = (1 - np.sqrt(1 + 2 * c4)) / (-2 * c4)
    return PhasePoint.from_real((q, 0.0), (0.0, 1.0 / q))

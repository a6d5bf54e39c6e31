"""Complexified planar Kepler phase space in the coordinates
``xi1 = x1 + i x2, xi2 = x1 - i x2, eta1 = y1 + i y2, eta2 = y1 - i y2``.

A point stores the resolved square root ``c1`` of ``xi1 * xi2``; that root is
the sheet label (the doubled configuration space is recovered as
``sign(c1 / principal_sqrt(xi1 xi2))``).  Crossing the cut is therefore just
continuity of ``c1`` along a path.

Conventions (pinned by the flow experiments in :mod:`flowsim`):

* Hamiltonian vector fields satisfy ``i_X omega = dF`` with
  ``omega = (d xi2 ^ d eta1 + d xi1 ^ d eta2) / 2``.
* The J-flow for real time ``theta`` equals ``act(exp(i * J_FLOW_SIGN * theta))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cplx_path import ComplexPath, FunctionPath, continue_sqrt
from .errors import InvalidPhasePoint, RelationViolated, ZeroGroupElement

# +1 means i_X omega = dF; flip to -1 to reverse every Hamiltonian field
HAMILTONIAN_SIGN = 1
# J-flow time theta corresponds to the group element exp(i * J_FLOW_SIGN * theta)
J_FLOW_SIGN = HAMILTONIAN_SIGN

ROOT_TOL = 1e-12
RELATION_TOL = 1e-10


def _cpair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _from_pair(p) -> complex:
    return complex(p[0], p[1])


@dataclass(frozen=True)
class PhasePoint:
    xi1: complex
    xi2: complex
    eta1: complex
    eta2: complex
    c1: complex

    def __post_init__(self):
        for name in ("xi1", "xi2", "eta1", "eta2", "c1"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.xi1 == 0 or self.xi2 == 0:
            raise InvalidPhasePoint("xi1 and xi2 must be nonzero")
        prod = self.xi1 * self.xi2
        if abs(self.c1 * self.c1 - prod) > ROOT_TOL * abs(prod):
            raise InvalidPhasePoint(f"c1**2 = {self.c1**2} does not match xi1*xi2 = {prod}")

    @classmethod
    def from_coords(cls, xi1, xi2, eta1, eta2, sheet: int = 1) -> "PhasePoint":
        """Build a point on sheet I (``sheet=1``: principal root) or II (``-1``)."""
        c1 = sheet * np.sqrt(complex(xi1) * complex(xi2))
        return cls(xi1, xi2, eta1, eta2, c1)

    @classmethod
    def from_real(cls, x, y) -> "PhasePoint":
        """Point of the real phase space with position ``x`` and momentum ``y``."""
        x1, x2 = x
        y1, y2 = y
        return cls.from_coords(x1 + 1j * x2, x1 - 1j * x2, y1 + 1j * y2, y1 - 1j * y2)

    @property
    def sheet(self) -> int:
        return 1 if abs(self.c1 - np.sqrt(self.xi1 * self.xi2)) <= abs(self.c1) else -1

    def as_array(self) -> np.ndarray:
        return np.array([self.xi1, self.xi2, self.eta1, self.eta2, self.c1])

    def to_json(self) -> dict:
        return {k: _cpair(getattr(self, k)) for k in ("xi1", "xi2", "eta1", "eta2", "c1")}

    @classmethod
    def from_json(cls, d: dict) -> "PhasePoint":
        return cls(*(_from_pair(d[k]) for k in ("xi1", "xi2", "eta1", "eta2", "c1")))


@dataclass(frozen=True)
class Invariants:
    c1: complex
    c2: complex
    c3: complex
    c4: complex

    @property
    def residual(self) -> complex:
        """``2 c4 c1^2 + 2 c1 - c2^2 - 2i c3 c2``; zero on the image of the quotient map."""
        c1, c2, c3, c4 = self.c1, self.c2, self.c3, self.c4
        return 2 * c4 * c1 * c1 + 2 * c1 - c2 * c2 - 2j * c3 * c2

    @property
    def residual_scale(self) -> float:
        return 1.0 + abs(self.c2) ** 2 + abs(self.c4) * abs(self.c1) ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3, self.c4], dtype=complex)

    def to_json(self) -> dict:
        return {k: _cpair(getattr(self, k)) for k in ("c1", "c2", "c3", "c4")}

    @classmethod
    def from_json(cls, d: dict) -> "Invariants":
        return cls(*(_from_pair(d[k]) for k in ("c1", "c2", "c3", "c4")))


def invariants(p: PhasePoint) -> Invariants:
    c2 = p.xi1 * p.eta2
    c3 = 0.5j * (p.xi1 * p.eta2 - p.xi2 * p.eta1)
    c4 = 0.5 * p.eta1 * p.eta2 - 1.0 / p.c1
    return Invariants(p.c1, c2, c3, c4)


def energy(p: PhasePoint) -> complex:
    return 0.5 * p.eta1 * p.eta2 - 1.0 / p.c1


def angular_momentum(p: PhasePoint) -> complex:
    return 0.5j * (p.xi1 * p.eta2 - p.xi2 * p.eta1)


def act(lam: complex, p: PhasePoint) -> PhasePoint:
    """The C*-action ``(lam xi1, xi2 / lam, lam eta1, eta2 / lam)``; sheet kept."""
    lam = complex(lam)
    if lam == 0:
        raise ZeroGroupElement("the group element must be nonzero")
    return PhasePoint(lam * p.xi1, p.xi2 / lam, lam * p.eta1, p.eta2 / lam, p.c1)


def section(inv: Invariants, tol: float = RELATION_TOL) -> PhasePoint:
    """The representative with ``xi1 = 1`` of the orbit over ``inv``."""
    c1, c2, c3 = complex(inv.c1), complex(inv.c2), complex(inv.c3)
    if c1 == 0:
        raise RelationViolated("c1 must be nonzero")
    if abs(inv.residual) > tol * inv.residual_scale:
        raise RelationViolated(f"relation residual {abs(inv.residual):.3e} exceeds tolerance")
    c1sq = c1 * c1
    return PhasePoint(1.0, c1sq, (c2 + 2j * c3) / c1sq, c2, c1)


def vector_field(which: str, p: PhasePoint) -> np.ndarray:
    """Tangent ``(d xi1, d xi2, d eta1, d eta2)`` of the H- or J-field at ``p``."""
    if which == "H":
        c1cube = p.c1 ** 3
        v = np.array([p.eta1, p.eta2, -p.xi1 / c1cube, -p.xi2 / c1cube])
    elif which == "J":
        v = 1j * np.array([p.xi1, -p.xi2, p.eta1, -p.eta2])
    else:
        raise ValueError(f"unknown field {which!r}; expected 'H' or 'J'")
    return HAMILTONIAN_SIGN * v


def lift_config_path(xi1: ComplexPath, xi2: ComplexPath, initial_c1: complex,
                     samples: int = 64) -> complex:
    """Continue ``c1 = sqrt(xi1 xi2)`` along a configuration path; returns the final root."""
    prod = FunctionPath(lambda t: xi1(t) * xi2(t))
    return continue_sqrt(prod, initial_c1, samples=samples).final

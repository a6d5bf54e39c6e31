"""Acceptance checks shared by ``kepler-monodromy verify`` and the test suite.

Each check returns a :class:`CheckResult`; tolerances and runtime limits are
fixed constants here.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import flowsim
from .continuation import loop_monodromy, pole_locus, standard_loop
from .curves import CurveClass, CurveParams, classify
from .periods import TWO_PI, Form, Cycle, lattice, mu_nu, nu_closed_form, period
from .phase import Invariants, PhasePoint, act, invariants, section

EXPECTED_LOOP_MATRIX = np.array([[-1, -2], [0, 1]])
IDENTITY = np.eye(2, dtype=int)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _rng(seed: int, number: int) -> np.random.Generator:
    return np.random.default_rng([seed, number])


def _cnormal(rng, scale=1.0) -> complex:
    return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def random_smooth_params(rng, n: int, c3_zero: bool = False) -> list[CurveParams]:
    """Parameters away from ``c4 = 0``, the discriminant and (unless
    ``c3_zero``) the ``c3 = 0`` plane."""
    out = []
    while len(out) < n:
        c3 = 0.0 if c3_zero else _cnormal(rng, 1.5)
        c4 = _cnormal(rng, 1.0)
        c = CurveParams(c3, c4)
        if abs(c4) < 0.1 or abs(c.discriminant) < 0.1 or (not c3_zero and abs(c3) < 0.2):
            continue
        out.append(c)
    return out


def random_relation_tuple(rng) -> Invariants:
    """Random ``(c1, c2, c3, c4)`` with ``c4`` solved from the relation."""
    c1 = 0j
    while abs(c1) < 0.2:
        c1 = _cnormal(rng, 2.0)
    c2, c3 = _cnormal(rng, 2.0), _cnormal(rng, 2.0)
    c4 = (c2 * c2 + 2j * c3 * c2 - 2 * c1) / (2 * c1 * c1)
    return Invariants(c1, c2, c3, c4)


def random_phase_point(rng) -> PhasePoint:
    while True:
        xi1, xi2 = _cnormal(rng), _cnormal(rng)
        if abs(xi1 * xi2) > 0.1:
            break
    return PhasePoint.from_coords(xi1, xi2, _cnormal(rng), _cnormal(rng), sheet=rng.choice([1, -1]))


# ---------------------------------------------------------------------------

def check_residue_periods(seed: int) -> tuple[bool, str]:
    rng = _rng(seed, 1)
    worst2 = worst3 = worst0 = 0.0
    for c in random_smooth_params(rng, 20):
        worst2 = max(worst2, abs(period(c, Form.Alpha, Cycle.Gamma2) + 4 * math.pi))
        worst3 = max(worst3, abs(period(c, Form.Alpha, Cycle.Gamma3)))
    for c in random_smooth_params(rng, 20, c3_zero=True):
        worst0 = max(worst0, abs(period(c, Form.Alpha, Cycle.Gamma2) + 2 * math.pi))
    ok = max(worst2, worst3, worst0) <= 1e-9
    return ok, (f"max|gamma2+4pi|={worst2:.1e}, max|gamma3|={worst3:.1e}, "
                f"max|gamma2+2pi| (c3=0)={worst0:.1e}")


def check_nu_closed_form(seed: int) -> tuple[bool, str]:
    rng = _rng(seed, 2)
    worst = 0.0
    for c in random_smooth_params(rng, 50):
        nu = mu_nu(c).nu
        worst = max(worst, abs(nu - nu_closed_form(c)) / abs(nu_closed_form(c)))
    return worst < 1e-8, f"max relative error {worst:.1e} over 50 parameters"


def _loop_transform_check(kind: str, r1: float = 0.25) -> tuple[bool, str]:
    m, tr = loop_monodromy(standard_loop(kind, r1, 256))
    mu0, nu0 = tr.initial.mu, tr.initial.nu
    mu1, nu1 = tr.final.mu, tr.final.nu
    e_nu = abs(nu1 + nu0) / abs(nu0)
    e_mu = abs(mu1 - (-4 * math.pi - mu0))
    matrix_ok = np.array_equal(m.entries, EXPECTED_LOOP_MATRIX)
    ok = e_nu <= 1e-8 and e_mu <= 1e-8 and matrix_ok and m.residual < 1e-6
    return ok, (f"matrix {m.entries.tolist()} (expected {EXPECTED_LOOP_MATRIX.tolist()}), "
                f"|nu_f + nu_0|/|nu_0|={e_nu:.1e}, |mu_f + 4pi + mu_0|={e_mu:.1e}, "
                f"residual {m.residual:.1e}")


def check_discriminant_loop(seed: int) -> tuple[bool, str]:
    return _loop_transform_check("discriminant")


def check_c4axis_loop(seed: int) -> tuple[bool, str]:
    return _loop_transform_check("c4axis")


def check_composite_loop(seed: int) -> tuple[bool, str]:
    m, tr = loop_monodromy(standard_loop("composite", 0.2, 256))
    e_mu = abs(tr.final.mu - tr.initial.mu)
    e_nu = abs(tr.final.nu - tr.initial.nu) / abs(tr.initial.nu)
    ok = np.array_equal(m.entries, IDENTITY) and e_mu <= 1e-8 and e_nu <= 1e-8
    return ok, (f"matrix {m.entries.tolist()} (expected identity), |mu_f - mu_0|={e_mu:.1e}, "
                f"|nu_f - nu_0|/|nu_0|={e_nu:.1e}")


def check_homotopy_robustness(seed: int) -> tuple[bool, str]:
    parts = []
    ok = True
    for kind in ("discriminant", "c4axis"):
        base = loop_monodromy(standard_loop(kind, 0.25, 256))[0].entries
        variants = [standard_loop(kind, 0.25, 128), standard_loop(kind, 0.25, 512),
                    standard_loop(kind, 0.15, 256), standard_loop(kind, 0.35, 256),
                    standard_loop(kind, 0.25, 256, start_angle=math.pi / 3)]
        same = all(np.array_equal(loop_monodromy(v)[0].entries, base) for v in variants)
        ok &= same
        parts.append(f"{kind}: {base.tolist()} {'unchanged' if same else 'CHANGED'}")
    return ok, "; ".join(parts)


def check_pole_locus(seed: int) -> tuple[bool, str]:
    r1 = 0.25
    disc = pole_locus(standard_loop("discriminant", r1, 256))
    lo, hi = disc.radius_about_half
    expected_radius = 1 / (2 * math.sqrt(2 * r1))
    radius_err = max(abs(lo - expected_radius), abs(hi - expected_radius))
    span_err = abs(disc.angular_span - math.pi)
    axis = pole_locus(standard_loop("c4axis", r1, 256))
    winding = axis.winding_about_one
    ok = span_err <= 1e-3 and radius_err <= 1e-6 and round(winding) == 1 and abs(winding - 1) < 1e-9
    return ok, (f"span {disc.angular_span:.6f} (pi), radius {hi:.9f} "
                f"(1/(2 sqrt(2 r1)) = {expected_radius:.9f}), winding about 1 = {winding:.6f}")


def check_dynamics(seed: int) -> tuple[bool, str]:
    rng = _rng(seed, 8)
    tol = 1e-12
    drift_ratio = 0.0
    p = flowsim.reference_point()
    inv = invariants(p)
    lat = lattice(CurveParams(inv.c3, inv.c4))
    runs = [(p, "H", lat.g1[1]), (p, "J", TWO_PI)]
    for _ in range(4):
        q = random_phase_point(rng)
        runs.append((q, "H", _cnormal(rng, 0.3)))
        runs.append((q, "J", _cnormal(rng, 3.0)))
    for q, which, T in runs:
        r = flowsim.integrate(q, which, T, tol)
        drift_ratio = max(drift_ratio, max(r.drift_H, r.drift_J) / (1 + abs(T)))
    j_return = max(flowsim.lattice_return(random_phase_point(rng), (TWO_PI, 0.0), tol)
                   for _ in range(10))
    d_g1 = flowsim.lattice_return(p, lat.g1, tol)
    d_g2 = flowsim.lattice_return(p, lat.g2, tol)
    d_g13 = flowsim.lattice_return(p, lat.vector(1, 3), tol)
    d_half = flowsim.lattice_return(p, lat.vector(0.5, 0), tol)
    ok = (drift_ratio < 1e-9 and j_return < 1e-7 and max(d_g1, d_g2, d_g13) < 1e-6
          and d_half > 1e-2)
    return ok, (f"drift/(1+|T|) {drift_ratio:.1e}, J 2pi-return {j_return:.1e}, "
                f"return g1 {d_g1:.1e}, g2 {d_g2:.1e}, g1+3g2 {d_g13:.1e}, g1/2 {d_half:.2f}")


def check_structure_maps(seed: int) -> tuple[bool, str]:
    rng = _rng(seed, 9)
    worst_sec = 0.0
    for _ in range(100):
        inv = random_relation_tuple(rng)
        back = invariants(section(inv))
        worst_sec = max(worst_sec, float(np.max(np.abs(back.as_array() - inv.as_array())
                                               / (1 + np.abs(inv.as_array())))))
    worst_act = 0.0
    p = random_phase_point(rng)
    base = invariants(p).as_array()
    for _ in range(100):
        lam = 0j
        while abs(lam) < 0.1:
            lam = _cnormal(rng, 3.0)
        moved = invariants(act(lam, p)).as_array()
        worst_act = max(worst_act, float(np.max(np.abs(moved - base) / (1 + np.abs(base)))))
    eps = np.finfo(float).eps
    ok = worst_sec <= 1e-10 and worst_act <= 64 * eps
    return ok, f"invariants(section) error {worst_sec:.1e}, action invariance error {worst_act:.1e}"


CHECKS: list[tuple[int, str, Callable[[int], tuple[bool, str]], float]] = [
    (1, "residue periods", check_residue_periods, 10.0),
    (2, "nu closed form", check_nu_closed_form, 10.0),
    (3, "discriminant loop monodromy", check_discriminant_loop, 30.0),
    (4, "c4-axis loop monodromy", check_c4axis_loop, 30.0),
    (5, "composite loop cancellation", check_composite_loop, 60.0),
    (6, "homotopy robustness", check_homotopy_robustness, math.inf),
    (7, "pole-locus geometry", check_pole_locus, math.inf),
    (8, "dynamics", check_dynamics, math.inf),
    (9, "structure maps", check_structure_maps, math.inf),
]


def run_check(number: int, seed: int = 0) -> CheckResult:
    for num, name, func, limit in CHECKS:
        if num == number:
            start = time.perf_counter()
            ok, detail = func(seed)
            elapsed = time.perf_counter() - start
            if elapsed >= limit:
                ok = False
                detail += f"; runtime {elapsed:.1f} s exceeds {limit:.0f} s"
            return CheckResult(num, name, ok, detail, elapsed)
    raise KeyError(f"no acceptance check numbered {number}")


def run_all(seed: int = 0, only: list[int] | None = None) -> list[CheckResult]:
    numbers = [num for num, *_ in CHECKS if only is None or num in only]
    return [run_check(n, seed) for n in numbers]

import json
import math

import numpy as np
import pytest

from kepler_monodromy.continuation import (
    LoopKind,
    LoopSpec,
    chart_chain,
    continue_periods,
    loop_monodromy,
    monodromy,
    pole_locus,
    standard_loop,
)
from kepler_monodromy.cplx_path import FunctionPath, continue_sqrt
from kepler_monodromy.errors import BadRadius, SampleOnSingularLocus
from kepler_monodromy.periods import TWO_PI, nu_closed_form

C4AXIS_MATRIX = [[-1, -2], [0, 1]]


def continued_closed_form(trace):
    """nu along the trace from the closed form, with sqrt(c4) continued along
    the loop independently of the chart machinery."""
    c4 = FunctionPath(np.vectorize(lambda t: trace.loop.point(float(t)).c4, otypes=[complex]))
    root = continue_sqrt(c4, trace.charts[0].sqrt_c4, samples=1024)
    roots = np.interp(trace.t, root.t, root.values.real) + 1j * np.interp(trace.t, root.t, root.values.imag)
    # snap the interpolated roots onto exact square roots of the same sign
    out = []
    for t, approx in zip(trace.t, roots):
        c = trace.loop.point(float(t))
        sq = np.sqrt(c.c4)
        if abs(-sq - approx) < abs(sq - approx):
            sq = -sq
        out.append(nu_closed_form(c, sq))
    return np.array(out)


@pytest.fixture(scope="module")
def disc_run():
    return loop_monodromy(standard_loop("discriminant", 0.25, 256))


@pytest.fixture(scope="module")
def axis_run():
    return loop_monodromy(standard_loop("c4axis", 0.25, 256))


# --- loop construction -----------------------------------------------------

def test_standard_loop_points():
    disc = standard_loop("discriminant", 0.25)
    assert disc.point(0.0).c4 == pytest.approx(-0.25)
    assert disc.point(0.5).c4 == pytest.approx(-0.75)
    axis = standard_loop(LoopKind.C4Axis, 0.25)
    assert axis.point(0.0).c4 == pytest.approx(0.25)
    assert axis.point(0.25).c4 == pytest.approx(0.25j)
    assert axis.point(0.0).c3 == 1


def test_composite_loop_is_closed_and_continuous():
    comp = standard_loop("composite", 0.2)
    ts = np.linspace(0, 1, 2001)
    z = np.array([comp.point(t).c4 for t in ts])
    assert z[0] == pytest.approx(z[-1])
    assert np.max(np.abs(np.diff(z))) < 0.01
    # encircles both -1/2 and 0 once
    for p in (-0.5, 0.0):
        assert np.sum(np.angle((z[1:] - p) / (z[:-1] - p))) == pytest.approx(TWO_PI)


@pytest.mark.parametrize("r1", [0.0, 0.5, 0.7, -0.1])
def test_bad_radius(r1):
    with pytest.raises(BadRadius):
        standard_loop("discriminant", r1)


def test_too_few_samples():
    with pytest.raises(ValueError):
        standard_loop("c4axis", 0.25, samples=32)


def test_turns_repeat_and_reverse():
    once = standard_loop("c4axis", 0.25)
    twice = standard_loop("c4axis", 0.25, turns=2)
    back = standard_loop("c4axis", 0.25, turns=-1)
    assert twice.point(0.25).c4 == pytest.approx(once.point(0.5).c4)
    assert back.point(0.25).c4 == pytest.approx(once.point(0.75).c4)
    assert twice.point(1.0).c4 == pytest.approx(once.point(0.0).c4)


def test_loop_through_singular_locus_is_rejected():
    loop = LoopSpec(LoopKind.Custom, custom=lambda t: (1.0, -0.25 + 0.25 * np.exp(1j * (math.pi / 2 + 2 * math.pi * t))))
    with pytest.raises(SampleOnSingularLocus):
        chart_chain(loop)


# --- period continuation ---------------------------------------------------

def test_c4axis_loop_transforms_periods(axis_run):
    m, tr = axis_run
    assert tr.final.nu == pytest.approx(-tr.initial.nu, rel=1e-8)
    assert tr.final.mu == pytest.approx(-4 * math.pi - tr.initial.mu, abs=1e-8)
    assert m.entries.tolist() == C4AXIS_MATRIX
    assert m.det == -1
    assert (m.entries @ m.entries).tolist() == [[1, 0], [0, 1]]
    assert m.column_form.tolist() == [[-1, 0], [-2, 1]]


@pytest.mark.parametrize("run", ["disc_run", "axis_run"])
def test_continued_periods_follow_closed_form(run, request):
    _, tr = request.getfixturevalue(run)
    nu = np.array([p.nu for p in tr.periods])
    oracle = continued_closed_form(tr)
    assert np.max(np.abs(nu - oracle) / np.abs(oracle)) < 1e-8
    mu = np.array([p.mu for p in tr.periods])
    assert np.max(np.abs(mu + TWO_PI)) < 1e-8


def test_discriminant_loop_swaps_branch_points_but_returns_periods(disc_run):
    m, tr = disc_run
    first, last = tr.charts[0], tr.charts[-1]
    assert last.r == pytest.approx(first.s) and last.s == pytest.approx(first.r)
    assert last.sqrt_c4 == pytest.approx(first.sqrt_c4)
    # the continued closed form returns to itself, so the lattice is fixed
    assert tr.final.nu == pytest.approx(tr.initial.nu, rel=1e-8)
    assert m.entries.tolist() == [[1, 0], [0, 1]]


def test_composite_is_product_of_pieces(disc_run, axis_run):
    m, _ = loop_monodromy(standard_loop("composite", 0.2))
    assert m.entries.tolist() == (disc_run[0].entries @ axis_run[0].entries).tolist()


def test_repeated_and_reversed_loops():
    m2, _ = loop_monodromy(standard_loop("c4axis", 0.25, samples=512, turns=2))
    assert m2.entries.tolist() == [[1, 0], [0, 1]]
    mr, _ = loop_monodromy(standard_loop("c4axis", 0.25, turns=-1))
    m1, _ = loop_monodromy(standard_loop("c4axis", 0.25))
    assert (mr.entries @ m1.entries).tolist() == [[1, 0], [0, 1]]


def test_contractible_loops_give_identity():
    const = LoopSpec(LoopKind.Custom, samples=64, custom=lambda t: (1.0, -0.25))
    assert loop_monodromy(const)[0].entries.tolist() == [[1, 0], [0, 1]]
    small = LoopSpec(LoopKind.Custom, samples=64,
                     custom=lambda t: (1.0, -0.25 + 0.05 * np.exp(2j * math.pi * t)))
    assert loop_monodromy(small)[0].entries.tolist() == [[1, 0], [0, 1]]


def test_open_path_has_no_monodromy():
    half = LoopSpec(LoopKind.Custom, samples=64,
                    custom=lambda t: (1.0, 0.25 * np.exp(1j * math.pi * t)))
    with pytest.raises(ValueError):
        monodromy(continue_periods(half))


def test_trace_jsonl(tmp_path, axis_run):
    _, tr = axis_run
    path = tmp_path / "trace.jsonl"
    tr.write_jsonl(path)
    lines = path.read_text().splitlines()
    assert len(lines) == len(tr.t)
    rec = json.loads(lines[0])
    assert list(rec) == ["t", "c3", "c4", "r", "s", "sqrt_c4", "u_p", "mu", "nu"]
    assert rec["t"] == 0.0 and json.loads(lines[-1])["t"] == 1.0
    assert tr.charts[0].to_json()["c4"] == rec["c4"]


def test_monodromy_json(axis_run):
    d = axis_run[0].to_json()
    assert d["rows"] == C4AXIS_MATRIX and d["det"] == -1


# --- pole locus ------------------------------------------------------------

@pytest.mark.parametrize("r1", [0.15, 0.25, 0.35])
def test_discriminant_pole_locus_is_half_circle(r1):
    locus = pole_locus(standard_loop("discriminant", r1))
    lo, hi = locus.radius_about_half
    expected = 1 / (2 * math.sqrt(2 * r1))
    assert lo == pytest.approx(expected, abs=1e-9) and hi == pytest.approx(expected, abs=1e-9)
    assert locus.angular_span == pytest.approx(math.pi, abs=1e-3)
    # the end point is the reflection of the start through u = 1/2
    assert locus.poles[-1] - 0.5 == pytest.approx(-(locus.poles[0] - 0.5), abs=1e-9)


def test_c4axis_pole_locus_winds_once_about_one():
    locus = pole_locus(standard_loop("c4axis", 0.25))
    assert locus.winding_about_one == pytest.approx(1.0, abs=1e-9)
    assert locus.poles[-1] == pytest.approx(locus.poles[0], abs=1e-9)


def test_pole_locus_csv():
    locus = pole_locus(standard_loop("discriminant", 0.25, samples=64))
    rows = locus.csv_rows()
    assert rows[0] == "t,u_re,u_im"
    assert len(rows) == len(locus.t) + 1
    t, re, im = map(float, rows[1].split(","))
    assert t == 0.0 and complex(re, im) == pytest.approx(locus.poles[0])


# --- brute-force oracle ----------------------------------------------------

def brute_force_periods_around(c4_of_theta, c3=1.0, steps=256, n=2048, radius=16.0):
    """(mu, nu) on a c1-circle of the given radius, recomputed at each step of
    a c4 loop with plain numpy: w^2 = 2 c4 c1^2 + 2 c1 - c3^2 is followed by
    nearest-root matching along the circle and, at its base point, from one
    c4 to the next.  Periodic trapezoid sums converge geometrically here."""
    th = 2 * math.pi * np.arange(n + 1) / n
    c1 = radius * np.exp(1j * th)
    out, w_base = [], None
    for theta in np.linspace(0, 2 * math.pi, steps + 1):
        c4 = c4_of_theta(theta)
        w = np.sqrt(2 * c4 * c1 * c1 + 2 * c1 - c3 * c3)
        if w_base is not None and abs(w[0] + w_base) < abs(w[0] - w_base):
            w = -w
        for k in range(1, n + 1):
            if abs(w[k] + w[k - 1]) < abs(w[k] - w[k - 1]):
                w[k] = -w[k]
        assert abs(w[-1] - w[0]) < 1e-9 * abs(w[0])   # closed lift
        w_base = w[0]
        dc1 = 1j * c1[:-1] * 2 * math.pi / n
        mu = np.sum((1j / c1[:-1] - c3 / (c1[:-1] * w[:-1])) * dc1)
        nu = np.sum(c1[:-1] / w[:-1] * dc1)
        out.append((mu, nu))
    return np.array(out)


@pytest.mark.parametrize("center, ratio", [(-0.5, 1.0), (0.0, -1.0)])
def test_brute_force_nu_transformation(center, ratio, disc_run, axis_run):
    run = disc_run if center == -0.5 else axis_run
    per = brute_force_periods_around(lambda th: center + 0.25 * np.exp(1j * th))
    (mu0, nu0), (mu1, nu1) = per[0], per[-1]
    assert abs(nu0) == pytest.approx(abs(run[1].initial.nu), rel=1e-10)
    assert nu1 / nu0 == pytest.approx(ratio, abs=1e-10)
    assert mu0 == pytest.approx(-TWO_PI, abs=1e-10) and mu1 == pytest.approx(-TWO_PI, abs=1e-10)

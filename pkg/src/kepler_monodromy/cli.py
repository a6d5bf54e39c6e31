"""Command-line interface.

Complex numbers are given as two reals (``--c3 1 0``) and written to files as
``[re, im]`` arrays.  Exit status: 0 success, 1 failed check or computation
error, 2 invalid configuration.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import acceptance, flowsim
from .continuation import loop_monodromy, pole_locus, standard_loop
from .curves import CurveClass, CurveParams, classify
from .errors import KeplerMonodromyError
from .periods import Cycle, Form, lattice, mu_nu, period, period_record
from .phase import PhasePoint, invariants


def _cpair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass
class RunConfig:
    command: str
    c3: complex = 1.0
    c4: complex = 1.0
    loop: str = "discriminant"
    r1: float = 0.25
    samples: int = 256
    tol: float = 1e-10
    output_format: str = "json"
    outputs: dict = field(default_factory=dict)
    seed: int = 0

    def validate(self) -> None:
        if not self.tol > 0:
            raise ValueError("--tol must be positive")
        if self.samples < 64:
            raise ValueError("--samples must be at least 64")
        if self.command in ("monodromy", "polelocus") and not 0 < self.r1 < 0.5:
            raise ValueError("--r1 must lie in (0, 1/2)")


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_classify(cfg: RunConfig, args) -> int:
    c = CurveParams(cfg.c3, cfg.c4)
    kind = classify(c)
    disc = c.discriminant
    if kind is CurveClass.SingularCone:
        print(f"{kind.value}, 1+2c4c3² = 0")
    else:
        print(f"{kind.value}, 1+2c4c3² = {disc.real!r}{disc.imag:+}i")
    if args.json:
        _emit({"c3": _cpair(c.c3), "c4": _cpair(c.c4), "class": kind.value,
               "discriminant": _cpair(disc)})
    return 0


def cmd_periods(cfg: RunConfig, args) -> int:
    c = CurveParams(cfg.c3, cfg.c4)
    pair = mu_nu(c, tol=cfg.tol)
    lat = lattice(c, tol=cfg.tol)
    record = period_record(c, pair)
    residues = {}
    for form in Form:
        for cycle in (Cycle.Gamma2, Cycle.Gamma3):
            key = f"{form.value}_{cycle.value}"
            try:
                residues[key] = _cpair(period(c, form, cycle, tol=cfg.tol))
            except KeplerMonodromyError as exc:
                residues[key] = None
                print(f"{key}: {exc}", file=sys.stderr)
    record["residue_periods"] = residues
    record["lattice"] = {"g1": [_cpair(z) for z in lat.g1], "g2": [_cpair(z) for z in lat.g2]}
    _emit(record)
    if cfg.outputs.get("out"):
        with open(cfg.outputs["out"], "w", encoding="utf-8") as fh:
            json.dump(record, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_monodromy(cfg: RunConfig, args) -> int:
    loop = standard_loop(cfg.loop, cfg.r1, cfg.samples, start_angle=args.start_angle,
                         turns=args.turns)
    m, trace = loop_monodromy(loop, tol=cfg.tol)
    out = {"loop": loop.to_json(), **m.to_json(),
           "initial": {"mu": _cpair(trace.initial.mu), "nu": _cpair(trace.initial.nu)},
           "final": {"mu": _cpair(trace.final.mu), "nu": _cpair(trace.final.nu)},
           "gamma1_radius": trace.radius, "samples_used": len(trace.t) - 1}
    path = cfg.outputs.get("trace") or f"monodromy_trace_{cfg.loop}.jsonl"
    trace.write_jsonl(path)
    out["trace"] = path
    _emit(out)
    return 0


def pole_locus_svg(locus, radius: float, size: int = 480) -> str:
    """Static SVG: pole path, the Gamma1 contour and the branch points."""
    extent = radius * 1.15
    scale = size / (2 * extent)

    def x(u):
        return (u.real - 0.5 + extent) * scale

    def y(u):
        return (extent - u.imag) * scale

    pts = " ".join(f"{x(u):.3f},{y(u):.3f}" for u in locus.poles.tolist())
    start, end = complex(locus.poles[0]), complex(locus.poles[-1])
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<line x1="0" y1="{y(0j):.3f}" x2="{size}" y2="{y(0j):.3f}" stroke="#bbbbbb"/>',
        f'<circle cx="{x(0.5):.3f}" cy="{y(0.5):.3f}" r="{radius * scale:.3f}" fill="none" '
        'stroke="black" stroke-width="1.5"/>',
        f'<polyline points="{pts}" fill="none" stroke="red" stroke-width="2"/>',
        f'<circle cx="{x(start):.3f}" cy="{y(start):.3f}" r="4" fill="red"/>',
        f'<circle cx="{x(end):.3f}" cy="{y(end):.3f}" r="4" fill="none" stroke="red"/>',
    ]
    for b in (0.0, 1.0):
        lines.append(f'<circle cx="{x(complex(b)):.3f}" cy="{y(complex(b)):.3f}" r="4" fill="blue"/>')
        lines.append(f'<text x="{x(complex(b)) + 6:.3f}" y="{y(complex(b)) - 6:.3f}" '
                     f'font-family="sans-serif" font-size="12">u={b:g}</text>')
    lines.append(f'<text x="8" y="18" font-family="sans-serif" font-size="13">'
                 f'pole locus, {locus.loop.kind.value} loop, r1={locus.loop.radius:g}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def cmd_polelocus(cfg: RunConfig, args) -> int:
    if cfg.loop not in ("discriminant", "c4axis"):
        raise ValueError("polelocus supports --loop discriminant or c4axis")
    loop = standard_loop(cfg.loop, cfg.r1, cfg.samples)
    locus = pole_locus(loop)
    radius = 2.0 * (1.0 + float(np.max(np.abs(locus.poles))))
    csv_path = cfg.outputs.get("csv") or f"polelocus_{cfg.loop}.csv"
    svg_path = cfg.outputs.get("svg") or f"polelocus_{cfg.loop}.svg"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(locus.csv_rows()) + "\n")
    with open(svg_path, "w", encoding="utf-8") as fh:
        fh.write(pole_locus_svg(locus, radius))
    lo, hi = locus.radius_about_half
    _emit({"loop": loop.to_json(), "samples_used": len(locus.t) - 1,
           "swept_angle_about_half": locus.swept_angle, "angular_span": locus.angular_span,
           "radius_about_half": [lo, hi], "winding_about_one": locus.winding_about_one,
           "gamma1_radius": radius, "csv": csv_path, "svg": svg_path})
    return 0


def cmd_flow(cfg: RunConfig, args) -> int:
    if args.point is None:
        p = flowsim.reference_point(args.ref_c4)
    else:
        v = args.point
        p = PhasePoint.from_coords(complex(v[0], v[1]), complex(v[2], v[3]),
                                   complex(v[4], v[5]), complex(v[6], v[7]), sheet=args.sheet)
    inv = invariants(p)
    out = {"point": p.to_json(), "invariants": inv.to_json()}
    if args.time is not None:
        T = complex(*args.time)
        res = flowsim.integrate(p, args.which, T, args.flow_tol)
        out["flow"] = {"which": args.which, "T": _cpair(T), "drift_H": res.drift_H,
                       "drift_J": res.drift_J, "steps": res.steps,
                       "sheet_residual": res.sheet_residual, "endpoint": res.endpoint.to_json()}
        if cfg.outputs.get("csv"):
            with open(cfg.outputs["csv"], "w", encoding="utf-8") as fh:
                fh.write("\n".join(res.csv_rows()) + "\n")
    if args.lattice:
        lat = lattice(CurveParams(inv.c3, inv.c4), tol=cfg.tol)
        vectors = {"g1": lat.vector(1, 0), "g2": lat.vector(0, 1), "g1+3g2": lat.vector(1, 3),
                   "g1/2": lat.vector(0.5, 0)}
        out["lattice_return"] = {name: {"v": [_cpair(z) for z in vec],
                                        "distance": flowsim.lattice_return(p, vec, args.flow_tol)}
                                 for name, vec in vectors.items()}
    _emit(out)
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    results = acceptance.run_all(seed=cfg.seed, only=args.only)
    for r in results:
        print(r.line())
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed"
          + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kepler-monodromy",
                                     description="Period lattices and monodromy of the complexified planar Kepler problem.")
    sub = parser.add_subparsers(dest="command", required=True)

    def fiber_args(p, c3=(1.0, 0.0), c4=(1.0, 0.0)):
        p.add_argument("--c3", nargs=2, type=float, default=list(c3), metavar=("RE", "IM"))
        p.add_argument("--c4", nargs=2, type=float, default=list(c4), metavar=("RE", "IM"))

    def tol_arg(p):
        p.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance")

    def loop_args(p, choices):
        p.add_argument("--loop", choices=choices, default="discriminant")
        p.add_argument("--r1", type=float, default=0.25)
        p.add_argument("--samples", type=int, default=256)

    p = sub.add_parser("classify", help="classify the fiber curve over (c3, c4)")
    fiber_args(p)
    p.add_argument("--json", action="store_true", help="also print a JSON record")

    p = sub.add_parser("periods", help="mu, nu, residue periods and the lattice")
    fiber_args(p)
    tol_arg(p)
    p.add_argument("--out", help="write the JSON record to this file")

    p = sub.add_parser("monodromy", help="continue the lattice around a loop")
    loop_args(p, ["discriminant", "c4axis", "composite"])
    tol_arg(p)
    p.add_argument("--start-angle", type=float, default=0.0)
    p.add_argument("--turns", type=int, default=1)
    p.add_argument("--trace", help="JSON-lines trace output path")

    p = sub.add_parser("polelocus", help="pole path u_p along a loop (CSV and SVG)")
    loop_args(p, ["discriminant", "c4axis"])
    p.add_argument("--csv")
    p.add_argument("--svg")

    p = sub.add_parser("flow", help="integrate the H/J flows and test lattice returns")
    p.add_argument("--point", nargs=8, type=float, default=None,
                   metavar="X", help="xi1 xi2 eta1 eta2 as re/im pairs (default: real reference orbit)")
    p.add_argument("--sheet", type=int, choices=[1, -1], default=1)
    p.add_argument("--ref-c4", type=float, default=-0.25, help="energy of the reference orbit")
    p.add_argument("--which", choices=["H", "J"], default="H")
    p.add_argument("--time", nargs=2, type=float, default=None, metavar=("RE", "IM"))
    p.add_argument("--flow-tol", type=float, default=1e-12)
    p.add_argument("--lattice", action="store_true", help="report lattice-return distances")
    p.add_argument("--csv", help="trajectory CSV output path")
    tol_arg(p)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", type=int, nargs="+", default=None)
    return parser


COMMANDS = {"classify": cmd_classify, "periods": cmd_periods, "monodromy": cmd_monodromy,
            "polelocus": cmd_polelocus, "flow": cmd_flow, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    outputs = {k: getattr(args, k) for k in ("out", "trace", "csv", "svg") if getattr(args, k, None)}
    cfg = RunConfig(command=args.command,
                    c3=complex(*args.c3) if hasattr(args, "c3") else 1.0,
                    c4=complex(*args.c4) if hasattr(args, "c4") else 1.0,
                    loop=getattr(args, "loop", "discriminant"),
                    r1=getattr(args, "r1", 0.25),
                    samples=getattr(args, "samples", 256),
                    tol=getattr(args, "tol", 1e-10),
                    outputs=outputs,
                    seed=getattr(args, "seed", 0))
    try:
        cfg.validate()
        if args.command == "flow" and not args.flow_tol > 0:
            raise ValueError("--flow-tol must be positive")
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return COMMANDS[args.command](cfg, args)
    except (KeplerMonodromyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

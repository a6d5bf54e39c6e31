"""Period lattices and monodromy of the complexified planar Kepler problem."""
from .continuation import (
    ContinuationTrace,
    LoopKind,
    LoopSpec,
    MonodromyMatrix,
    continue_periods,
    loop_monodromy,
    monodromy,
    pole_locus,
    standard_loop,
)
from .curves import CurveClass, CurveParams, UChart, classify, from_u, pole_in_u, u_chart
from .periods import Cycle, Form, Lattice, PeriodPair, lattice, mu_nu, period
from .phase import Invariants, PhasePoint, act, invariants, section, vector_field

__version__ = "0.1.0"

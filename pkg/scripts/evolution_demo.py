"""Relax a uniform cell density toward the stationary state on [0, 1].

Prints the sup-distance to the stationary pair every ``--every`` time units.
"""

import argparse
import sys

import numpy as np

from chemosteady.config import Problem
from chemosteady.domain import GeometrySpec, build_grid
from chemosteady.evolution import EvolutionParams, EvolutionState, evolve_to_steady
from chemosteady.semilinear import harmonic_extension
from chemosteady.steady import compute_steady_state


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=201)
    ap.add_argument("--chi", type=float, default=1.0)
    ap.add_argument("--mass", type=float, default=0.7)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--T", type=float, default=10.0)
    ap.add_argument("--every", type=float, default=0.25)
    args = ap.parse_args(argv)

    g = build_grid(GeometrySpec.interval(), args.n)
    st = compute_steady_state(Problem(g, args.chi, 1.0, mass=args.mass))
    init = EvolutionState(0.0, np.full(g.size, args.mass / g.volume), harmonic_extension(g, g.trace(1.0)))
    tr = evolve_to_steady(init, g, args.chi, 1.0, args.T, EvolutionParams(args.dt), (st.u, st.v))
    stride = max(1, int(round(args.every / args.dt)))
    print(f"stationary alpha = {st.alpha:.12g}")
    print(f"{'t':>8} {'dist_u':>11} {'dist_v':>11} {'mass_u':>18}")
    idx = list(range(0, len(tr.t), stride))
    if idx[-1] != len(tr.t) - 1:
        idx.append(len(tr.t) - 1)
    for k in idx:
        print(f"{tr.t[k]:8.3f} {tr.dist_u[k]:11.3e} {tr.dist_v[k]:11.3e} {tr.mass_u[k]:18.15f}")
    if tr.stalled:
        print(f"stalled at t = {tr.t[-1]:.4g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Grid refinement of the stationary state: alpha, mass and flux residual orders.

    python scripts/refinement_study.py --domain rectangle --mass 5 --n 33 --levels 4
"""

import argparse
import math
import sys

from chemosteady.config import Problem
from chemosteady.domain import GeometrySpec, build_grid
from chemosteady.steady import compute_steady_state


def geometry(args):
    if args.domain == "interval":
        return GeometrySpec.interval()
    if args.domain == "rectangle":
        return GeometrySpec.rectangle()
    return GeometrySpec.radial(args.d, 1.0, args.r0)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--domain", choices=["interval", "rectangle", "radial"], default="interval")
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--r0", type=float, default=0.0)
    ap.add_argument("--chi", type=float, default=1.0)
    ap.add_argument("--mass", type=float, default=0.7)
    ap.add_argument("--n", type=int, default=21)
    ap.add_argument("--levels", type=int, default=5)
    args = ap.parse_args(argv)

    spec = geometry(args)
    n, prev = args.n, None
    print(f"{'n':>6} {'alpha':>20} {'flux_int':>11} {'ord':>5} {'flux_bdy':>11} {'ord':>5}")
    for _ in range(args.levels):
        st = compute_steady_state(Problem(build_grid(spec, n), args.chi, 1.0, mass=args.mass))
        cur = (st.flux_interior, st.flux_boundary)
        orders = ("", "") if prev is None else tuple(f"{math.log2(p / c):.2f}" for p, c in zip(prev, cur))
        print(f"{n:6d} {st.alpha:20.14g} {cur[0]:11.3e} {orders[0]:>5} {cur[1]:11.3e} {orders[1]:>5}")
        prev, n = cur, 2 * n - 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

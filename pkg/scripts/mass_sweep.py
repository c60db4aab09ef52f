"""Tabulate m(alpha), its lower bound and the sector bound on a ball.

Writes CSV to stdout:  python scripts/mass_sweep.py --d 3 --n 201 > sweep.csv
"""

import argparse
import sys
import warnings

import numpy as np

from chemosteady.cli import fmt
from chemosteady.config import Problem
from chemosteady.domain import GeometrySpec, build_grid
from chemosteady.massmap import SectorOverflowWarning, SectorSpec, sample


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--R", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=201)
    ap.add_argument("--chi", type=float, default=1.0)
    ap.add_argument("--vstar", type=float, default=1.0)
    ap.add_argument("--delta", type=float, default=None, help="sector width (default R)")
    ap.add_argument("--alpha-max", type=float, default=1e4)
    ap.add_argument("--count", type=int, default=17)
    args = ap.parse_args(argv)

    grid = build_grid(GeometrySpec.radial(args.d, args.R), args.n)
    problem = Problem(grid, args.chi, args.vstar)
    sector = SectorSpec(args.R, args.delta or args.R, args.d) if args.d >= 2 else None
    warm = None
    print("alpha,m,m_prime,m_lower,sector_bound,m_over_sector")
    for alpha in np.geomspace(1e-2, args.alpha_max, args.count):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SectorOverflowWarning)
            s = sample(problem, alpha, initial=warm, with_lower=True, sector=sector)
        warm = s.v
        ratio = None if s.sector_bound is None else s.m / s.sector_bound
        print(",".join(fmt(x) for x in (alpha, s.m, s.m_prime, s.m_lower, s.sector_bound, ratio)))
    return 0


if __name__ == "__main__":
    sys.exit(main())

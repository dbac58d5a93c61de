"""Gauge potential W(n) against its leading term along ray families.

Columns: n, W(n), the reference value, and their ratio. The reference is
``-ln n`` for the log family and ``-alpha(alpha-beta-1) n**(2alpha-beta-2)``
for power families.

    python3 scripts/potential_asymptotics.py --family log
    python3 scripts/potential_asymptotics.py --family power --alpha 3 --beta 1
"""

import argparse
import math
import sys

import numpy as np

from infgraph.graph import FamilySpec, build_family
from infgraph.io import write_csv
from infgraph.operator import gauge_to_schrodinger
from infgraph.remarks import power_asymptote


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--family", default="log")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--n-max", type=int, default=100_000)
    p.add_argument("--points", type=int, default=25)
    args = p.parse_args(argv)
    if args.family == "log":
        spec = FamilySpec("log")
        ref = lambda n: -math.log(n)  # noqa: E731
    else:
        spec = FamilySpec(args.family, alpha=args.alpha, beta=args.beta, start=2)
        ref = lambda n: power_asymptote(args.alpha, args.beta, n)  # noqa: E731
    s = gauge_to_schrodinger(build_family(spec))
    ns = np.unique(np.geomspace(spec.effective_start + 1, args.n_max, args.points).astype(int))
    rows = [(int(n), s.W(int(n)), ref(int(n)), s.W(int(n)) / ref(int(n))) for n in ns]
    write_csv(sys.stdout, ("n", "W", "reference", "ratio"), rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())

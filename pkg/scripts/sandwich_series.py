"""Cutoff sandwich quantities against the radius on complete ray families.

For each radius R the deficiency solution at ``lam = -2`` (form bound
``k = 0`` from the gauge) gives three numbers: the mass on ``B_R``, the
energy of the cut-off solution, and the two candidate upper bounds (the
shell ``B_{R+1}`` minus ``B_R``, and every endpoint of an edge on which the
cutoff changes).

    python3 scripts/sandwich_series.py --family power --alpha 1 --beta 0
"""

import argparse
import sys

from infgraph.esa import deficiency_recurrence, sandwich_check
from infgraph.graph import FamilySpec, build_family
from infgraph.io import write_csv
from infgraph.metric import MetricContext, ball_distances
from infgraph.operator import gauge_to_schrodinger


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--family", default="power")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--radii", default="3,4,5,6,7,8,9,10")
    args = p.parse_args(argv)
    spec = FamilySpec(args.family, alpha=args.alpha, beta=args.beta)
    s = gauge_to_schrodinger(build_family(spec))
    ctx = MetricContext.from_schrodinger(s)
    radii = [float(r) for r in args.radii.split(",")]
    start = s.graph.start
    top = max(ball_distances(ctx, start, max(radii) + 1))
    lam = -2.0
    sol = deficiency_recurrence(s, 1.0, top + 2, lam)
    rows = []
    for R in radii:
        c = sandwich_check(s, lam, sol, ctx, start, R, 0.0, 2)
        rows.append((R, c.lower, c.middle, c.upper_shell, c.upper_transition, c.log_scale,
                     int(c.lower_holds), int(c.shell_holds), int(c.transition_holds)))
    write_csv(sys.stdout, ("R", "ball_mass", "energy", "shell_bound", "transition_bound", "log_scale",
                           "lower_holds", "shell_holds", "transition_holds"), rows)
    return 0 if all(r[6] and r[8] for r in rows) else 2


if __name__ == "__main__":
    sys.exit(main())

"""Sphere-averaged coherence on a coarse grid, plus the boundary curves.

The average costs a 2-D adaptive quadrature per cell, hence the 41-point default.
"""

from _common import parse, run

if __name__ == "__main__":
    args = parse(__doc__, 41)
    run(args, "sweep", "fig4_average_coherence.csv", "--quantity", "coherence_avg")
    run(args, "boundary", "fig4_boundary.csv")

"""Bell-state populations over the reduced (a, r) plane."""

from _common import parse, run

if __name__ == "__main__":
    args = parse(__doc__, 201)
    run(args, "sweep", "fig1_populations.csv", "--quantity", "populations")
    run(args, "sweep", "fig1_ground_state.csv", "--quantity", "ground_state")

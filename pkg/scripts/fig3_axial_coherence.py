"""l1 coherence in the z, x and y product eigenbases."""

from _common import parse, run

if __name__ == "__main__":
    args = parse(__doc__, 201)
    for axis in "zxy":
        run(args, "sweep", f"fig3_coherence_{axis}.csv", "--quantity", f"coherence_{axis}")

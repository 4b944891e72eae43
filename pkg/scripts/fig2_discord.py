"""Geometric discord with the concurrence boundary and level-crossing lines."""

from _common import parse, run

if __name__ == "__main__":
    args = parse(__doc__, 201)
    run(args, "sweep", "fig2_discord.csv", "--quantity", "discord")
    run(args, "sweep", "fig2_concurrence.csv", "--quantity", "concurrence")
    run(args, "boundary", "fig2_boundary.csv")

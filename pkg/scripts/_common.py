"""Shared helpers for the figure scripts."""

import argparse
import sys
from pathlib import Path

from dipolarq.cli import main


def parse(description: str, steps: int):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    ap.add_argument("--steps", type=int, default=steps, help="grid points per axis")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    return args


def run(args, command: str, name: str, *extra: str) -> None:
    path = args.out / name
    code = main([command, *extra, "--steps-a", str(args.steps), "--steps-r", str(args.steps),
                 "--threads", str(args.threads), "-o", str(path)])
    if code:
        sys.exit(code)
    print(path)

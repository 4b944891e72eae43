"""``dipolarq`` command line: single points, grid sweeps and boundary curves.

Exit codes: 0 success, 2 argument error, 3 I/O error, 4 non-converged
quadrature (output is still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .coherence import (
    BasisAngles,
    average_coherence_quad,
    coherence_arbitrary,
    coherence_axial_xy,
    coherence_axial_z,
    correlated_coherence,
)
from .correlations import concurrence, concurrence_terms, geometric_discord, phi_coefficients
from .model import (
    BELL_LABELS,
    ModelParams,
    RangeError,
    ReducedParams,
    energy_levels,
    ground_state_label,
    log_partition_function,
    partition_function,
    populations,
)
from .sweep import (
    QUANTITIES,
    SweepConfig,
    compute_boundary,
    evaluate_grid,
    fmt,
    render_boundary,
    render_sweep,
)

EXIT_OK, EXIT_ARGS, EXIT_IO, EXIT_QUAD = 0, 2, 3, 4

_SUFFIX = {"Psi-": "psi_minus", "Psi+": "psi_plus", "Phi+": "phi_plus", "Phi-": "phi_minus"}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------- point


def point_report(p: ReducedParams, angles: BasisAngles, quad_tol: float = 1e-6) -> tuple[dict, bool]:
    """Flat record of every quantity at one parameter point.

    A quantity that fails with a range error is reported as ``None`` next to a
    ``<name>_error`` message. The flag is False when the average coherence
    did not converge.
    """
    rec: dict = {"a": float(p.a), "r": float(p.r), "theta": float(angles.theta), "phi": float(angles.phi)}
    converged = True

    def put(name, thunk):
        try:
            value = thunk()
        except RangeError as exc:
            rec[name] = None
            rec[f"{name}_error"] = str(exc)
            return
        if isinstance(value, dict):
            rec.update(value)
        else:
            rec[name] = value if isinstance(value, str) else float(value)

    def energies():
        e = energy_levels(p)
        return {f"energy_{_SUFFIX[k]}": float(v) for k, v in zip(BELL_LABELS, e)}

    def pops():
        arr = populations(p).as_array()
        return {f"p_{_SUFFIX[k]}": float(v) for k, v in zip(BELL_LABELS, arr)}

    def phis():
        c = phi_coefficients(p)
        return {"phi1": float(c.phi1), "phi2": float(c.phi2), "phi3": float(c.phi3)}

    def conc():
        t = concurrence_terms(p)
        return {"concurrence": float(concurrence(p)), "concurrence_term_a": float(t.term_a),
                "concurrence_term_b": float(t.term_b)}

    def avg():
        nonlocal converged
        res = average_coherence_quad(p, quad_tol)
        converged = res.converged
        return {"coherence_avg": res.value, "coherence_avg_error": res.error_estimate,
                "coherence_avg_converged": res.converged}

    put("energies", energies)
    put("partition_function", lambda: partition_function(p))
    put("log_partition_function", lambda: log_partition_function(p))
    put("populations", pops)
    put("ground_state", lambda: ground_state_label(p))
    put("phi", phis)
    put("discord", lambda: geometric_discord(p))
    put("concurrence", conc)
    put("coherence_z", lambda: coherence_axial_z(p))
    put("coherence_x", lambda: coherence_axial_xy(p, "X"))
    put("coherence_y", lambda: coherence_axial_xy(p, "Y"))
    put("coherence_at", lambda: coherence_arbitrary(p, angles))
    put("correlated_coherence", lambda: correlated_coherence(p, angles))
    put("coherence_avg", avg)
    return rec, converged


def _render_point(rec: dict, form: str) -> str:
    if form == "json":
        return json.dumps(rec, indent=2) + "\n"
    lines = ["key,value"]
    for k, v in rec.items():
        if v is None:
            v = "nan"
        elif isinstance(v, bool):
            v = str(v).lower()
        elif isinstance(v, float):
            v = fmt(v)
        lines.append(f"{k},{v}")
    return "\n".join(lines) + "\n"


def cmd_point(args) -> int:
    physical = (args.delta_kelvin, args.eps_kelvin)
    if any(x is not None for x in physical):
        if args.a is not None or args.r is not None:
            raise CliError("give either --a/--r or --delta-kelvin/--eps-kelvin, not both", EXIT_ARGS)
        if None in physical:
            raise CliError("--delta-kelvin and --eps-kelvin go together", EXIT_ARGS)
        try:
            p = ModelParams(args.delta_kelvin, args.eps_kelvin, args.temp_kelvin).reduced()
        except ValueError as exc:
            raise CliError(str(exc), EXIT_ARGS) from exc
    else:
        if args.a is None or args.r is None:
            raise CliError("point needs --a and --r", EXIT_ARGS)
        try:
            p = ReducedParams(args.a, args.r)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_ARGS) from exc
    if not (args.quad_tol > 0 and math.isfinite(args.theta) and math.isfinite(args.phi)):
        raise CliError("angles must be finite and --quad-tol positive", EXIT_ARGS)
    rec, converged = point_report(p, BasisAngles(args.theta, args.phi), args.quad_tol)
    _emit(_render_point(rec, args.format), args.output)
    return EXIT_OK if converged else EXIT_QUAD


# ---------------------------------------------------------------- sweep / boundary


def build_config(args, quantity: str | None = None) -> SweepConfig:
    """Defaults, then the ``--config`` JSON document, then explicit flags."""
    values: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise CliError(f"cannot read config: {exc}", EXIT_IO) from exc
        except json.JSONDecodeError as exc:
            raise CliError(f"config is not valid JSON: {exc}", EXIT_ARGS) from exc
        if not isinstance(doc, dict):
            raise CliError("config must be a JSON object", EXIT_ARGS)
        unknown = set(doc) - set(SweepConfig.field_names())
        if unknown:
            raise CliError(f"unknown config fields: {', '.join(sorted(unknown))}", EXIT_ARGS)
        values.update(doc)
    for name in SweepConfig.field_names():
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if quantity is not None:
        values["quantity"] = quantity
    for name in ("a_min", "a_max", "r_min", "r_max", "temperature", "quad_tol", "theta", "phi"):
        if isinstance(values.get(name), int) and not isinstance(values[name], bool):
            values[name] = float(values[name])
    try:
        return SweepConfig(**values)
    except (TypeError, ValueError) as exc:
        raise CliError(str(exc), EXIT_ARGS) from exc


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def cmd_sweep(config: SweepConfig) -> int:
    a_axis, r_axis, rows = evaluate_grid(config)
    _emit(render_sweep(config, a_axis, r_axis, rows), config.output)
    failed = sum(r.range_failures for r in rows)
    unconverged = sum(r.unconverged for r in rows)
    if failed:
        print(f"dipolarq: {failed} of {a_axis.size * r_axis.size} cells out of range (written as nan)",
              file=sys.stderr)
    if unconverged:
        print(f"dipolarq: {unconverged} cells did not reach quad_tol", file=sys.stderr)
        return EXIT_QUAD
    return EXIT_OK


def cmd_boundary(config: SweepConfig) -> int:
    b = compute_boundary(config)
    _emit(render_boundary(config, b), config.output)
    if b.range_failures:
        print(f"dipolarq: {b.range_failures} cells out of range (skipped by the contour)", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _grid_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON file with SweepConfig fields; flags override it")
    for name in ("a-min", "a-max", "r-min", "r-max"):
        sp.add_argument(f"--{name}", type=float, default=None)
    sp.add_argument("--steps-a", type=int, default=None)
    sp.add_argument("--steps-r", type=int, default=None)
    sp.add_argument("--temperature", type=float, default=None,
                    help="kelvin; grid bounds are divided by it (default 1)")
    sp.add_argument("--quad-tol", type=float, default=None)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--output", "-o", default=None)
    sp.add_argument("--format", choices=("csv", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dipolarq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    pt = sub.add_parser("point", help="all quantities at one (a, r)")
    pt.add_argument("--a", type=float, default=None, help="Delta / k_B T")
    pt.add_argument("--r", type=float, default=None, help="epsilon / k_B T")
    pt.add_argument("--delta-kelvin", type=float, default=None)
    pt.add_argument("--eps-kelvin", type=float, default=None)
    pt.add_argument("--temp-kelvin", type=float, default=1.0)
    pt.add_argument("--theta", type=float, default=0.0)
    pt.add_argument("--phi", type=float, default=0.0)
    pt.add_argument("--quad-tol", type=float, default=1e-6)
    pt.add_argument("--output", "-o", default=None)
    pt.add_argument("--format", choices=("json", "csv"), default="json")

    sw = sub.add_parser("sweep", help="one quantity on an (a, r) grid")
    sw.add_argument("--quantity", choices=QUANTITIES, default=None)
    sw.add_argument("--theta", type=float, default=None, help="for coherence_at")
    sw.add_argument("--phi", type=float, default=None, help="for coherence_at")
    _grid_flags(sw)

    bd = sub.add_parser("boundary", help="concurrence zero contour and level-crossing lines")
    bd.add_argument("--quantity", choices=("concurrence",), default=None)
    _grid_flags(bd)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on malformed flags
    try:
        if args.command == "point":
            return cmd_point(args)
        if args.command == "sweep":
            return cmd_sweep(build_config(args))
        return cmd_boundary(build_config(args, quantity="concurrence"))
    except CliError as exc:
        print(f"dipolarq: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

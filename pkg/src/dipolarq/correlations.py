"""Trace-norm geometric discord and concurrence of the thermal X state."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .model import ReducedParams, populations

DISCORD_ZERO_TOL = 1e-12
DISCORD_DEN_TOL = 1e-12
DISCORD_EQUAL_TOL = 1e-9


@dataclass(frozen=True)
class PhiCoefficients:
    """Correlation coefficients entering the discord formula.

    With ``c_ii = Tr[rho (sigma_i x sigma_i)]``: ``phi1 = max(|c_xx|, |c_yy|)``,
    ``|phi2| = min(|c_xx|, |c_yy|)`` (negative when the Psi coherence is the
    smaller of the two), ``phi3 = c_zz``.
    """

    phi1: np.ndarray
    phi2: np.ndarray
    phi3: np.ndarray


@dataclass(frozen=True)
class ConcurrenceTerms:
    term_a: np.ndarray  # |rho_23| - sqrt(rho_11 rho_44)
    term_b: np.ndarray  # |rho_14| - sqrt(rho_22 rho_33)


def phi_coefficients(p: ReducedParams) -> PhiCoefficients:
    # e^{a/6}|e^{a/3}-1| / D  and  2|sinh(r/2)| / D  with D = e^{a/6} Z
    pop = populations(p)
    psi = np.abs(pop.p_psi_plus - pop.p_psi_minus)
    phi = np.abs(pop.p_phi_minus - pop.p_phi_plus)
    phi3 = (pop.p_phi_plus + pop.p_phi_minus) - (pop.p_psi_plus + pop.p_psi_minus)
    return PhiCoefficients(psi + phi, psi - phi, phi3)


def discord_from_phi(phi: PhiCoefficients) -> np.ndarray:
    """Closed-form trace-norm discord of an X state with maximally mixed marginals."""
    p1, p2, p3 = (np.asarray(x, dtype=float) for x in (phi.phi1, phi.phi2, phi.phi3))
    s1, s2, s3 = p1 * p1, p2 * p2, p3 * p3
    hi = np.maximum(s2, s3)
    lo = np.minimum(s1, s3)
    num = s1 * hi - s2 * lo
    den = hi - lo + s1 - s2
    safe = np.where(den < DISCORD_DEN_TOL, 1.0, den)
    q = 0.5 * np.sqrt(np.clip(num / safe, 0.0, None))
    q = np.where((den < DISCORD_DEN_TOL) & (np.abs(p1 - p2) < DISCORD_EQUAL_TOL), 0.5 * np.abs(p1), q)
    q = np.where((np.abs(p1) < DISCORD_ZERO_TOL) & (np.abs(p2) < DISCORD_ZERO_TOL) & (np.abs(p3) < DISCORD_ZERO_TOL), 0.0, q)
    return np.clip(q, 0.0, 0.5)


def geometric_discord(p: ReducedParams) -> np.ndarray:
    return discord_from_phi(phi_coefficients(p))


def concurrence_terms(p: ReducedParams) -> ConcurrenceTerms:
    pop = populations(p)
    rho23 = 0.5 * np.abs(pop.p_psi_plus - pop.p_psi_minus)
    rho14 = 0.5 * np.abs(pop.p_phi_minus - pop.p_phi_plus)
    rho11 = 0.5 * (pop.p_phi_plus + pop.p_phi_minus)
    rho22 = 0.5 * (pop.p_psi_plus + pop.p_psi_minus)
    return ConcurrenceTerms(rho23 - rho11, rho14 - rho22)


def concurrence_margin(p: ReducedParams) -> np.ndarray:
    """``2 max(A, B)``: equals the concurrence where positive, negative where separable."""
    t = concurrence_terms(p)
    return 2.0 * np.maximum(t.term_a, t.term_b)


def concurrence(p: ReducedParams) -> np.ndarray:
    """Wootters-normalised concurrence ``2 max(0, A, B)``."""
    return np.maximum(concurrence_margin(p), 0.0)


def _interp(p0, p1, v0, v1, level):
    t = (level - v0) / (v1 - v0)
    return (p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1]))


def marching_squares(x, y, values, level: float = 0.0) -> list[np.ndarray]:
    """Level-set polylines of ``values[i, j]`` sampled at ``(x[i], y[j])``.

    A node counts as inside when its value is strictly above ``level``, so
    plateaus sitting exactly at the level produce no segments. Cells touching
    a non-finite node are skipped. Crossing points
    are linearly interpolated along cell edges; saddle cells are resolved by
    the cell-centre average. Returns a list of ``(n, 2)`` point arrays.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    v = np.asarray(values, dtype=float)
    if v.shape != (x.size, y.size):
        raise ValueError("values must have shape (len(x), len(y))")
    inside = v > level
    links: dict[tuple, list[tuple]] = defaultdict(list)
    points: dict[tuple, tuple[float, float]] = {}

    def edge_point(key):
        if key not in points:
            kind, i, j = key
            if kind == "x":  # edge (i, j) - (i + 1, j)
                points[key] = _interp((x[i], y[j]), (x[i + 1], y[j]), v[i, j], v[i + 1, j], level)
            else:  # edge (i, j) - (i, j + 1)
                points[key] = _interp((x[i], y[j]), (x[i], y[j + 1]), v[i, j], v[i, j + 1], level)
        return key

    for i in range(x.size - 1):
        for j in range(y.size - 1):
            if not np.all(np.isfinite(v[i:i + 2, j:j + 2])):
                continue  # failed cells carry no contour
            c = (inside[i, j], inside[i + 1, j], inside[i + 1, j + 1], inside[i, j + 1])
            if all(c) or not any(c):
                continue
            # edges in corner-cycle order: bottom, right, top, left
            edges = [("x", i, j), ("y", i + 1, j), ("x", i, j + 1), ("y", i, j)]
            crossing = [k for k in range(4) if c[k] != c[(k + 1) % 4]]
            if len(crossing) == 2:
                pairs = [(crossing[0], crossing[1])]
            else:
                centre = 0.25 * (v[i, j] + v[i + 1, j] + v[i + 1, j + 1] + v[i, j + 1]) > level
                # join the edges around the corners that differ from the centre
                if c[0] == centre:
                    pairs = [(0, 1), (2, 3)]
                else:
                    pairs = [(3, 0), (1, 2)]
            for e0, e1 in pairs:
                k0, k1 = edge_point(edges[e0]), edge_point(edges[e1])
                links[k0].append(k1)
                links[k1].append(k0)

    polylines = []
    seen: set[tuple] = set()
    # open chains first (start at degree-1 ends), then closed loops
    starts = sorted(k for k, n in links.items() if len(n) == 1) + sorted(links)
    for start in starts:
        if start in seen:
            continue
        chain = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            nxt = [k for k in links[cur] if k != prev and k not in seen]
            if not nxt:
                if len(chain) > 2 and start in links[cur]:
                    chain.append(start)
                break
            prev, cur = cur, nxt[0]
            chain.append(cur)
            seen.add(cur)
        polylines.append(np.array([points[k] for k in chain]))
    return polylines


def entanglement_boundary(a_axis, r_axis, values) -> list[np.ndarray]:
    """Zero contour of a concurrence grid (``values[i, j]`` at ``(a_i, r_j)``).

    Passing ``concurrence_margin`` instead of the clamped concurrence gives the
    same contour with sub-cell interpolation accuracy.
    """
    return marching_squares(a_axis, r_axis, values, 0.0)

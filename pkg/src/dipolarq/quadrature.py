"""Adaptive Clenshaw-Curtis quadrature and a Monte Carlo sphere average.

Each panel is integrated with the nested CC-9 / CC-17 pair: the 17-point
value is kept, ``|CC17 - CC9|`` is the panel error estimate. Panels are
bisected until the estimate drops below the panel's share of the tolerance
(``tol * length / total_length``). Accepted panels are summed strictly left to
right, so results are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_DEPTH = 20
PANEL_POINTS = 17
# share of the sphere tolerance given to each nesting level; the inner share is
# weighted by the integral of sin(theta) over [0, pi] (= 2)
OUTER_SHARE = 0.8
INNER_SHARE = 0.1


class QuadratureError(ArithmeticError):
    """Quadrature did not reach its tolerance; ``result`` holds the best estimate."""

    def __init__(self, message: str, result: "QuadratureResult"):
        super().__init__(message)
        self.result = result


@dataclass
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool


@dataclass
class Panel:
    lo: float
    hi: float
    values: np.ndarray = field(repr=False)
    depth: int = 0


@lru_cache(maxsize=None)
def _cc_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n < 2 or (n - 1) & (n - 2):
        raise ValueError(f"Clenshaw-Curtis rule needs n = 2**k + 1 points, got {n}")
    m = n - 1
    j = np.arange(n)
    nodes = -np.cos(np.pi * j / m)
    weights = np.ones(n)
    for k in range(1, m // 2 + 1):
        b = 1.0 if 2 * k == m else 2.0
        weights -= b / (4 * k * k - 1) * np.cos(2 * k * np.pi * j / m)
    c = np.full(n, 2.0)
    c[0] = c[-1] = 1.0
    weights *= c / m
    if m % 2 == 0:
        nodes[m // 2] = 0.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def cc_nodes_weights(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Ascending Chebyshev-extrema nodes on [-1, 1] and their Clenshaw-Curtis weights."""
    nodes, weights = _cc_rule(int(n))
    return nodes.copy(), weights.copy()


def _evaluator(f, vectorized: bool):
    if vectorized:
        return lambda xs: np.asarray(f(xs), dtype=float)
    return lambda xs: np.array([f(float(x)) for x in xs], dtype=float)


def integrate_adaptive(f, lo: float, hi: float, tol: float, *, vectorized: bool = False,
                       max_depth: int = MAX_DEPTH, breakpoints=()) -> QuadratureResult:
    """Integrate ``f`` over ``[lo, hi]`` to absolute accuracy ``tol``.

    ``f`` takes a float (or, with ``vectorized=True``, an array of abscissae).
    Exceeding ``max_depth`` bisections does not raise: the panel is accepted as
    is and the result comes back with ``converged=False``.

    ``breakpoints`` inside ``(lo, hi)`` become fixed panel edges (use them for
    known kinks). Each piece gets ``tol * length / (hi - lo)``, so every panel
    budget is the same as without the split.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if hi == lo:
        return QuadratureResult(0.0, 0.0, 0, True)
    if hi < lo:
        res = integrate_adaptive(f, hi, lo, tol, vectorized=vectorized, max_depth=max_depth,
                                 breakpoints=breakpoints)
        return QuadratureResult(-res.value, res.error_estimate, res.evaluations, res.converged)
    inner = sorted(float(b) for b in breakpoints if lo < b < hi)
    if inner:
        edges = [lo, *inner, hi]
        total = QuadratureResult(0.0, 0.0, 0, True)
        for a, b in zip(edges[:-1], edges[1:]):
            if b == a:
                continue
            part = _integrate_interval(f, a, b, tol * (b - a) / (hi - lo), vectorized, max_depth)
            total = QuadratureResult(total.value + part.value, total.error_estimate + part.error_estimate,
                                     total.evaluations + part.evaluations, total.converged and part.converged)
        return total
    return _integrate_interval(f, lo, hi, tol, vectorized, max_depth)


def _integrate_interval(f, lo, hi, tol, vectorized, max_depth) -> QuadratureResult:
    x17, w17 = _cc_rule(PANEL_POINTS)
    _, w9 = _cc_rule(PANEL_POINTS // 2 + 1)
    fx = _evaluator(f, vectorized)
    total = hi - lo
    interior = slice(1, PANEL_POINTS - 1)
    mid = PANEL_POINTS // 2

    def abscissae(a, b):
        return 0.5 * (a + b) + 0.5 * (b - a) * x17

    first = fx(abscissae(lo, hi))
    evaluations = PANEL_POINTS
    value = 0.0
    error = 0.0
    converged = True
    stack = [Panel(lo, hi, first, 0)]
    while stack:
        panel = stack.pop()
        half = 0.5 * (panel.hi - panel.lo)
        fine = half * float(np.dot(w17, panel.values))
        coarse = half * float(np.dot(w9, panel.values[::2]))
        err = abs(fine - coarse)
        if not np.isfinite(fine):
            raise ValueError("integrand is not finite on the integration interval")
        budget = tol * (panel.hi - panel.lo) / total
        if err <= budget or panel.depth >= max_depth:
            if err > budget:
                converged = False
            value += fine
            error += err
            continue
        centre = 0.5 * (panel.lo + panel.hi)
        children = []
        for a, b, ends in ((panel.lo, centre, (panel.values[0], panel.values[mid])),
                           (centre, panel.hi, (panel.values[mid], panel.values[-1]))):
            vals = np.empty(PANEL_POINTS)
            vals[0], vals[-1] = ends
            vals[interior] = fx(abscissae(a, b)[interior])
            evaluations += PANEL_POINTS - 2
            children.append(Panel(a, b, vals, panel.depth + 1))
        # right child below left child on the stack: panels finish left to right
        stack.append(children[1])
        stack.append(children[0])
    return QuadratureResult(value, error, evaluations, converged)


def integrate_sphere(g, tol: float, *, vectorized: bool = False,
                     max_depth: int = MAX_DEPTH, phi_breakpoints=None) -> QuadratureResult:
    """Uniform spherical average ``(1/4pi) int_0^pi int_0^2pi sin(t) g(t, p) dp dt``.

    Iterated adaptive quadrature: the outer theta integral gets
    ``OUTER_SHARE`` of the budget and every inner phi integral
    ``INNER_SHARE``, so a converged result has ``error_estimate <= tol``.
    ``g(theta, phi)`` must be 2pi-periodic in phi; with ``vectorized=True`` it
    receives a scalar theta and an array of phi values. ``phi_breakpoints``,
    if given, maps theta to known kink positions of ``g`` in phi.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    norm = 4.0 * math.pi
    inner_tol = INNER_SHARE * tol * norm
    stats = {"evaluations": 0, "inner_error": 0.0, "converged": True}

    def h(theta: float) -> float:
        s = math.sin(theta)
        if vectorized:
            inner = lambda phis: g(theta, phis)  # noqa: E731
        else:
            inner = lambda phi: g(theta, phi)  # noqa: E731
        kinks = phi_breakpoints(theta) if phi_breakpoints is not None else ()
        res = integrate_adaptive(inner, 0.0, 2.0 * math.pi, inner_tol,
                                 vectorized=vectorized, max_depth=max_depth, breakpoints=kinks)
        stats["evaluations"] += res.evaluations
        stats["inner_error"] = max(stats["inner_error"], res.error_estimate)
        stats["converged"] = stats["converged"] and res.converged
        return s * res.value

    outer = integrate_adaptive(h, 0.0, math.pi, OUTER_SHARE * tol * norm, max_depth=max_depth)
    error = (outer.error_estimate + 2.0 * stats["inner_error"]) / norm
    return QuadratureResult(
        outer.value / norm,
        error,
        stats["evaluations"],
        outer.converged and stats["converged"],
    )


def monte_carlo_sphere(g, samples: int, seed: int = 0) -> tuple[float, float]:
    """Sample mean and standard error of ``g(theta, phi)`` over the uniform sphere.

    Draws come from numpy's counter-based Philox4x32-10 generator:
    ``theta = arccos(1 - 2u)``, ``phi = 2 pi v`` with ``u`` then ``v`` each a
    block of ``samples`` doubles. ``g`` must accept arrays.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.random(samples)
    v = rng.random(samples)
    theta = np.arccos(1.0 - 2.0 * u)
    phi = 2.0 * np.pi * v
    vals = np.broadcast_to(np.asarray(g(theta, phi), dtype=float), theta.shape)
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(samples))
    return mean, stderr

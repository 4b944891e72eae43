"""End-to-end checks, one per acceptance criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible even under output
capture) and then asserts, so the run doubles as a report.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from dipolarq import smallmat as sm
from dipolarq.cli import main
from dipolarq.coherence import (
    BasisAngles,
    _coherence,
    average_coherence_quad,
    coherence_arbitrary,
    coherence_axial_xy,
    coherence_axial_z,
    correlated_coherence,
)
from dipolarq.correlations import concurrence, concurrence_margin, geometric_discord
from dipolarq.model import (
    DEGENERATE,
    ReducedParams,
    bell_states,
    gibbs_state,
    ground_state_label,
    hamiltonian,
    populations,
)
from dipolarq.oracles import conjugation_coherence, discord_minimization, gibbs_oracle, wootters_concurrence
from dipolarq.quadrature import cc_nodes_weights, integrate_adaptive, integrate_sphere, monte_carlo_sphere

FIXTURE = Path(__file__).parent / "fixtures" / "discord_201.csv"

# frozen from the first oracle run
DISCORD_8_8 = 0.0167038739795492
DISCORD_8_6 = 0.24358771375855323
DISCORD_6_8 = 0.24032835565342534


@pytest.fixture
def verdict(capsys):
    def report(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail
    return report


@pytest.fixture(scope="module")
def wide_sample():
    ar = np.random.default_rng(1).uniform(-40, 40, size=(10_000, 2))
    return ReducedParams(ar[:, 0], ar[:, 1])


def test_1_gibbs_validity(verdict, wide_sample):
    t0 = time.perf_counter()
    p = wide_sample
    rho = gibbs_state(p)
    h = hamiltonian(p)
    trace_err = float(np.max(np.abs(sm.trace(rho) - 1)))
    min_eig = float(np.min(sm.eigvalsh(rho)))
    comm = float(np.max(sm.trace_norm(h @ rho - rho @ h)))
    oracle = float(np.max(np.abs(rho - gibbs_oracle(p))))
    elapsed = time.perf_counter() - t0
    ok = trace_err <= 1e-12 and min_eig >= -1e-12 and comm < 1e-12 and oracle < 1e-12 and elapsed < 10
    verdict(1, ok, f"trace {trace_err:.1e}, min eig {min_eig:.1e}, [H,rho] {comm:.1e}, "
                   f"oracle {oracle:.1e}, {elapsed:.2f} s")


def test_2_spectrum_and_bell_vectors(verdict, wide_sample):
    w, v = sm.eig_hermitian(gibbs_state(wide_sample), method="jacobi")
    pop = populations(wide_sample).as_array()
    eig_err = float(np.max(np.abs(np.sort(w, axis=-1) - np.sort(pop, axis=-1))))
    overlap = np.abs(np.einsum("kb,nbj->nkj", bell_states().conj(), v))
    worst = float(np.min(np.max(overlap, axis=-1)))
    ok = eig_err <= 1e-12 and worst > 1 - 1e-10
    verdict(2, ok, f"eigenvalues {eig_err:.1e}, worst Bell overlap 1-{1 - worst:.1e}")


@pytest.mark.slow
def test_3_discord_vs_oracle(verdict):
    t0 = time.perf_counter()
    pts = np.random.default_rng(3).uniform(-12, 12, size=(200, 2))
    worst = 0.0
    for a, r in pts:
        p = ReducedParams(a, r)
        found = discord_minimization(gibbs_state(p), restarts=32)
        worst = max(worst, abs(found - float(geometric_discord(p))))
    elapsed = time.perf_counter() - t0
    verdict(3, worst <= 1e-3 and elapsed < 600, f"200 points, worst {worst:.1e}, {elapsed:.0f} s")


def test_4_ridge(verdict):
    rs = np.array([0.5, -0.5, 2, -2, 10, -10])
    q = geometric_discord(ReducedParams(np.zeros_like(rs), rs))
    err = float(np.max(np.abs(q - 0.5 * np.abs(np.tanh(rs / 4)))))
    at10 = float(q[4])
    ok = err <= 1e-12 and abs(at10 - 0.49330) < 1e-5 and at10 < 0.5
    verdict(4, ok, f"tanh ridge {err:.1e}, Q(0,10) = {at10:.6f}")


def test_5_symmetry_and_range(verdict):
    ar = np.random.default_rng(5).uniform(-40, 40, size=(1000, 2))
    sym = float(np.max(np.abs(geometric_discord(ReducedParams(ar[:, 0], ar[:, 1]))
                              - geometric_discord(ReducedParams(ar[:, 0], -ar[:, 1])))))
    a, r = np.meshgrid(np.linspace(-10, 10, 201), np.linspace(-10, 10, 201), indexing="ij")
    q = geometric_discord(ReducedParams(a, r))
    lo, hi = float(q.min()), float(q.max())
    verdict(5, sym <= 1e-12 and lo >= 0 and hi <= 0.5, f"symmetry {sym:.1e}, range [{lo:.3g}, {hi:.6g}]")


def test_6_level_crossing(verdict):
    q = {k: float(geometric_discord(ReducedParams(*k))) for k in [(8, 8), (8, 6), (6, 8)]}
    frozen = max(abs(q[(8, 8)] - DISCORD_8_8), abs(q[(8, 6)] - DISCORD_8_6), abs(q[(6, 8)] - DISCORD_6_8))
    dip = q[(8, 8)] < q[(8, 6)] and q[(8, 8)] < q[(6, 8)]
    axis = np.linspace(-10, 10, 201)
    labels = [ground_state_label(ReducedParams(a, s * a)) for a in axis[axis > 0] for s in (1, -1)]
    labels += [ground_state_label(ReducedParams(a, 0.0)) for a in axis[axis < 0]]
    on_line = all(lab == DEGENERATE for lab in labels)
    verdict(6, dip and frozen < 1e-12 and on_line,
            f"Q(8,8) {q[(8, 8)]:.4f} < Q(8,6) {q[(8, 6)]:.4f}, Q(6,8) {q[(6, 8)]:.4f}; crossing labels {on_line}")


def test_7_concurrence(verdict):
    ar = np.random.default_rng(7).uniform(-10, 10, size=(1000, 2))
    worst = max(abs(wootters_concurrence(gibbs_state(ReducedParams(a, r))) - float(concurrence(ReducedParams(a, r))))
                for a, r in ar)
    rs = np.linspace(-10, 10, 401)
    m = concurrence_margin(ReducedParams(np.zeros_like(rs), rs))
    idx = np.nonzero(np.diff(np.sign(m)) != 0)[0]
    roots = rs[idx] - m[idx] * (rs[idx + 1] - rs[idx]) / (m[idx + 1] - m[idx])
    target = 2 * math.asinh(1)
    cell = rs[1] - rs[0]
    boundary = len(roots) == 2 and all(abs(abs(x) - target) <= cell for x in roots)
    a, r = np.meshgrid(np.linspace(-10, 10, 201), np.linspace(-10, 10, 201), indexing="ij")
    p = ReducedParams(a, r)
    region = int(np.count_nonzero((concurrence(p) == 0) & (geometric_discord(p) > 0.05)))
    verdict(7, worst <= 1e-10 and boundary and region > 0,
            f"Wootters {worst:.1e}, zeros at {np.round(roots, 4).tolist()}, separable cells with Q>0.05: {region}")


def test_8_coherence(verdict):
    rng = np.random.default_rng(8)
    ar = rng.uniform(-40, 40, size=(1000, 2))
    p = ReducedParams(ar[:, 0], ar[:, 1])
    b = BasisAngles(rng.uniform(0, math.pi, 1000), rng.uniform(0, 2 * math.pi, 1000))
    direct = float(np.max(np.abs(coherence_arbitrary(p, b) - conjugation_coherence(p, b))))
    z = float(np.max(np.abs(coherence_arbitrary(p, BasisAngles(0.0, 0.0)) - coherence_axial_z(p))))
    x = float(np.max(np.abs(coherence_arbitrary(p, BasisAngles(math.pi / 2, 0.0)) - coherence_axial_xy(p, "X"))))
    y = float(np.max(np.abs(coherence_arbitrary(p, BasisAngles(math.pi / 2, math.pi / 2))
                            - coherence_axial_xy(p, "Y"))))
    corr = float(np.max(np.abs(correlated_coherence(p, b) - coherence_arbitrary(p, b))))
    ok = max(direct, corr) <= 1e-12 and max(z, x, y) <= 1e-12
    verdict(8, ok, f"oracle {direct:.1e}, z {z:.1e}, x {x:.1e}, y {y:.1e}, correlated {corr:.1e}")


@pytest.mark.slow
def test_9_average_coherence(verdict):
    t0 = time.perf_counter()
    pts = np.random.default_rng(9).uniform(-10, 10, size=(50, 2))
    worst_sigma = 0.0
    for i, (a, r) in enumerate(pts):
        p = ReducedParams(a, r)
        quad = average_coherence_quad(p, 1e-6)
        pop = populations(p)
        mean, se = monte_carlo_sphere(lambda t, f: _coherence(pop, t, f), 10**6, seed=i)
        assert quad.converged
        worst_sigma = max(worst_sigma, abs(quad.value - mean) / se)
    origin = average_coherence_quad(ReducedParams(0.0, 0.0), 1e-6).value
    monotone = True
    for d in [(1, 0), (0, 1), (1, 1), (1, -1), (-1, 0.5)]:
        vals = [average_coherence_quad(ReducedParams(s * d[0], s * d[1]), 1e-6).value
                for s in np.geomspace(1, 0.1, 11)]
        monotone &= bool(np.all(np.diff(vals) < 0))
    elapsed = time.perf_counter() - t0
    ok = worst_sigma <= 3 and abs(origin) <= 1e-6 and monotone and elapsed < 900
    verdict(9, ok, f"worst {worst_sigma:.2f} SE over 50 points, <C>(0,0) = {origin:.1e}, "
                   f"rays monotone {monotone}, {elapsed:.0f} s")


def test_10_quadrature(verdict):
    worst = 0.0
    for n in (3, 5, 9, 17):
        x, w = cc_nodes_weights(n)
        for k in range(n):
            exact = 2 / (k + 1) if k % 2 == 0 else 0.0
            worst = max(worst, abs(w @ x**k - exact) / max(1.0, abs(exact)))
    s = integrate_adaptive(math.sin, 0.0, math.pi, 1e-12).value
    c = integrate_sphere(lambda t, f: math.cos(t) ** 2, 1e-12).value
    ok = worst <= 1e-12 and abs(s - 2) <= 1e-10 and abs(c - 1 / 3) <= 1e-10
    verdict(10, ok, f"polynomial {worst:.1e}, sin {abs(s - 2):.1e}, cos^2 {abs(c - 1 / 3):.1e}")


def test_11_cli_determinism(verdict, tmp_path):
    outs = []
    for threads in (1, 8):
        path = tmp_path / f"t{threads}.csv"
        assert main(["sweep", "--quantity", "discord", "--steps-a", "201", "--steps-r", "201",
                     "--threads", str(threads), "-o", str(path)]) == 0
        outs.append(path.read_bytes())
    same = outs[0] == outs[1]
    fixture = outs[0] == FIXTURE.read_bytes()
    verdict(11, same and fixture, f"threads 1 vs 8 identical {same}, fixture identical {fixture}")

"""Brute-force reference computations used to validate the closed forms.

Nothing here reads the closed-form entries of the thermal state: every oracle
starts from the Hamiltonian matrix (or from an arbitrary density matrix) and
uses generic linear algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack
from scipy.optimize import minimize

from . import smallmat
from .model import ReducedParams, check_range, hamiltonian

NM_OPTIONS = {"maxiter": 500, "xatol": 1e-10, "fatol": 1e-12, "adaptive": False}
NM_INITIAL_STEP = 0.2
DEFAULT_RESTARTS = 32

_PAULI = (smallmat.SIGMA_X, smallmat.SIGMA_Y, smallmat.SIGMA_Z)
_YY = smallmat.kron(smallmat.SIGMA_Y, smallmat.SIGMA_Y)


def gibbs_oracle(p: ReducedParams) -> np.ndarray:
    """``e^{-H} / Tr e^{-H}`` through a Jacobi eigendecomposition of the Hamiltonian."""
    check_range(p)
    w, v = smallmat.eig_hermitian(hamiltonian(p), method="jacobi")
    boltz = np.exp(-(w - w[..., :1]))
    rho = np.einsum("...ik,...k,...jk->...ij", v, boltz, np.conj(v))
    return rho / np.sum(boltz, axis=-1)[..., None, None]


def pauli_correlations(rho) -> np.ndarray:
    """``Tr[rho (sigma_i x sigma_i)]`` for i = x, y, z, stacked on the last axis."""
    rho = smallmat.as_complex(rho)
    return np.stack(
        [smallmat.trace(rho @ smallmat.kron(s, s)).real for s in _PAULI], axis=-1
    )


def wootters_concurrence(rho) -> np.ndarray:
    """Wootters concurrence from the spectrum of ``sqrt(rho) rho~ sqrt(rho)``.

    Its eigenvalues equal those of ``rho rho~`` with
    ``rho~ = (Y x Y) rho* (Y x Y)``. Eigenvalues down to ``-1e-12`` are treated
    as zero.
    """
    rho = smallmat.as_complex(rho)
    if np.any(smallmat.eigvalsh(rho, method="jacobi") < -1e-12):
        raise ValueError("input is not a valid density matrix")
    flipped = _YY @ np.conj(rho) @ _YY
    root = smallmat.hermitian_function(rho, lambda w: np.sqrt(np.clip(w, 0.0, None)))
    lam = smallmat.eigvalsh(root @ flipped @ root, method="jacobi")
    if np.any(lam < -1e-12):
        raise ValueError("input is not a valid density matrix")
    s = np.sqrt(np.clip(lam, 0.0, None))[..., ::-1]
    return np.maximum(0.0, s[..., 0] - s[..., 1] - s[..., 2] - s[..., 3])


@dataclass(frozen=True)
class CQParameters:
    """Classical-quantum state ``p Pi+ x rho1 + (1 - p) Pi- x rho2``."""

    theta_m: float
    phi_m: float
    p: float
    b1: tuple[float, float, float]
    b2: tuple[float, float, float]

    def direction(self) -> np.ndarray:
        st = math.sin(self.theta_m)
        return np.array([st * math.cos(self.phi_m), st * math.sin(self.phi_m), math.cos(self.theta_m)])

    def state(self) -> np.ndarray:
        n = self.direction()
        n_sigma = sum(c * s for c, s in zip(n, _PAULI))
        plus = 0.5 * (smallmat.I2 + n_sigma)
        minus = 0.5 * (smallmat.I2 - n_sigma)
        return self.p * smallmat.kron(plus, _bloch_state(self.b1)) + (1 - self.p) * smallmat.kron(
            minus, _bloch_state(self.b2)
        )

    def to_vector(self) -> np.ndarray:
        return np.array(
            [self.theta_m, self.phi_m, math.asin(math.sqrt(min(max(self.p, 0.0), 1.0))), *self.b1, *self.b2]
        )

    @classmethod
    def from_vector(cls, x) -> "CQParameters":
        b1 = np.asarray(x[3:6], dtype=float)
        b2 = np.asarray(x[6:9], dtype=float)
        b1 = b1 / max(1.0, float(np.linalg.norm(b1)))
        b2 = b2 / max(1.0, float(np.linalg.norm(b2)))
        return cls(float(x[0]), float(x[1]), math.sin(x[2]) ** 2, tuple(b1), tuple(b2))


def _half_bloch(x, y, z) -> tuple:
    # (I + x sx + y sy + z sz) / 2 as a row-major 4-tuple of complex scalars
    return (0.5 * (1 + z), complex(0.5 * x, -0.5 * y), complex(0.5 * x, 0.5 * y), 0.5 * (1 - z))


def _cq_state(x) -> np.ndarray:
    """Fast equivalent of ``CQParameters.from_vector(x).state()`` for the search loop."""
    st = math.sin(x[0])
    n1, n2, n3 = st * math.cos(x[1]), st * math.sin(x[1]), math.cos(x[0])
    p = math.sin(x[2]) ** 2
    s1 = max(1.0, math.sqrt(x[3] * x[3] + x[4] * x[4] + x[5] * x[5]))
    s2 = max(1.0, math.sqrt(x[6] * x[6] + x[7] * x[7] + x[8] * x[8]))
    plus = [p * c for c in _half_bloch(n1, n2, n3)]
    minus = [(1 - p) * c for c in _half_bloch(-n1, -n2, -n3)]
    r1 = _half_bloch(x[3] / s1, x[4] / s1, x[5] / s1)
    r2 = _half_bloch(x[6] / s2, x[7] / s2, x[8] / s2)
    # kron(P, R)[2i + k, 2j + l] = P[i, j] R[k, l]
    out = [
        plus[2 * i + j] * r1[2 * k + l] + minus[2 * i + j] * r2[2 * k + l]
        for i in (0, 1) for k in (0, 1) for j in (0, 1) for l in (0, 1)
    ]
    return np.array(out, dtype=complex).reshape(4, 4)


def _bloch_state(b) -> np.ndarray:
    return 0.5 * (smallmat.I2 + sum(c * s for c, s in zip(b, _PAULI)))


def _bloch_vector(m2) -> np.ndarray:
    return np.array([smallmat.trace(m2 @ s).real for s in _PAULI])


def _measured_start(rho: np.ndarray, n: np.ndarray) -> CQParameters:
    """Measure qubit A along ``n`` and keep the conditional states of B."""
    n = n / np.linalg.norm(n)
    n_sigma = sum(c * s for c, s in zip(n, _PAULI))
    blocks = []
    for sign in (1.0, -1.0):
        proj = smallmat.kron(0.5 * (smallmat.I2 + sign * n_sigma), smallmat.I2)
        part = proj @ rho @ proj
        prob = smallmat.trace(part).real
        if prob <= 1e-14:
            blocks.append((0.0, np.zeros(3)))
            continue
        reduced = np.einsum("kikj->ij", (part / prob).reshape(2, 2, 2, 2))
        blocks.append((prob, _bloch_vector(reduced)))
    theta = math.acos(max(-1.0, min(1.0, n[2])))
    phi = math.atan2(n[1], n[0])
    return CQParameters(theta, phi, blocks[0][0], tuple(blocks[0][1]), tuple(blocks[1][1]))


def _structured_starts(rho: np.ndarray) -> list[CQParameters]:
    dirs = [np.eye(3)[k] for k in range(3)]
    corr = np.array([[smallmat.trace(rho @ smallmat.kron(si, sj)).real for sj in _PAULI] for si in _PAULI])
    w, v = np.linalg.eigh(corr @ corr.T)
    dirs.append(v[:, -1])
    local = _bloch_vector(np.einsum("ikjk->ij", rho.reshape(2, 2, 2, 2)))
    if np.linalg.norm(local) > 1e-9:
        dirs.append(local)
    return [_measured_start(rho, d) for d in dirs]


def _random_start(rng: np.random.Generator) -> CQParameters:
    def ball():
        v = rng.normal(size=3)
        return tuple(v / np.linalg.norm(v) * rng.random() ** (1 / 3))

    return CQParameters(
        float(np.arccos(1 - 2 * rng.random())), float(2 * np.pi * rng.random()),
        float(rng.random()), ball(), ball(),
    )


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of the difference of two Hermitian matrices (LAPACK spectrum)."""
    w, _, info = lapack.zheev(np.asarray(rho - sigma, dtype=complex), compute_v=0)
    if info != 0:
        raise np.linalg.LinAlgError("zheev did not converge")
    return 0.5 * float(np.abs(w).sum())


def discord_minimization(rho, restarts: int = DEFAULT_RESTARTS, tol: float = 1e-10, seed: int = 0) -> float:
    """Smallest trace distance from ``rho`` to a classical-quantum state found by search.

    Nelder-Mead runs from structured starts (measurement of qubit A along x, y,
    z, the principal correlation axis and the local Bloch vector) plus
    ``restarts`` seeded random starts. Being a restricted search, the result is
    an upper bound on the true minimum.
    """
    rho = smallmat.as_complex(rho)
    if rho.shape != (4, 4) or not smallmat.is_hermitian(rho):
        raise ValueError("expected a single Hermitian 4x4 density matrix")

    def objective(x):
        return trace_distance(rho, _cq_state(x))

    rng = np.random.default_rng(seed)
    starts = _structured_starts(rho) + [_random_start(rng) for _ in range(restarts)]
    options = dict(NM_OPTIONS, xatol=min(NM_OPTIONS["xatol"], tol))
    best = math.inf
    for start in starts:
        x0 = start.to_vector()
        simplex = np.vstack([x0, x0 + NM_INITIAL_STEP * np.eye(x0.size)])
        res = minimize(objective, x0, method="Nelder-Mead", options=dict(options, initial_simplex=simplex))
        best = min(best, float(res.fun), objective(x0))
        if best <= tol:
            break
    return best


def conjugation_coherence(p: ReducedParams, b) -> np.ndarray:
    """Normalised l1 coherence of ``(U x U) rho (U x U)^dagger`` built from scratch.

    ``b`` is anything with ``theta`` and ``phi`` attributes (scalar or array).
    """
    theta = np.asarray(b.theta, dtype=float)
    phi = np.asarray(b.phi, dtype=float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    u = np.empty(np.broadcast(theta, phi).shape + (2, 2), dtype=complex)
    u[..., 0, 0] = c
    u[..., 0, 1] = -np.exp(1j * phi) * s
    u[..., 1, 0] = np.exp(-1j * phi) * s
    u[..., 1, 1] = c
    big = smallmat.kron(u, u)
    rotated = big @ gibbs_oracle(p) @ smallmat.adjoint(big)
    off = np.abs(rotated)
    return (np.sum(off, axis=(-2, -1)) - np.sum(np.abs(np.diagonal(rotated, axis1=-2, axis2=-1)), axis=-1)) / 3

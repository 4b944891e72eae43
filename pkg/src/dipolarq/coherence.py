"""l1 coherence of the thermal state in product reference bases.

A reference basis is fixed by Bloch-sphere angles ``(theta, phi)`` through
the single-qubit unitary ``U(theta, phi)`` applied to both spins. All public
coherences are normalised by ``d - 1 = 3`` so they lie in ``[0, 1]``.

Closed-form entries are written with the common factor ``e^{-a/6} / Z``
absorbed into the Boltzmann weights, which keeps them finite over the whole
parameter range. The printed closed-form display corresponds to
``conj(U ρ U^dagger)`` (equivalently ``phi -> -phi``); :func:`rotated_state`
returns ``U ρ U^dagger`` itself. Absolute values, and hence every coherence,
are the same in both conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import smallmat
from .model import Populations, ReducedParams, gibbs_state, populations
from .quadrature import QuadratureError, QuadratureResult, integrate_sphere

L1_NORMALIZATION = 3.0


@dataclass(frozen=True)
class BasisAngles:
    theta: float
    phi: float

    def normalized(self) -> "BasisAngles":
        """Equivalent angles with ``theta`` in ``[0, pi]`` and ``phi`` in ``[0, 2pi)``."""
        theta = np.mod(np.asarray(self.theta, dtype=float), 2 * np.pi)
        phi = np.asarray(self.phi, dtype=float)
        # U(2pi - t, p) = -U(t, p + pi) and the two-qubit product is sign blind
        flip = theta > np.pi
        theta = np.where(flip, 2 * np.pi - theta, theta)
        phi = np.mod(np.where(flip, phi + np.pi, phi), 2 * np.pi)
        if theta.ndim == 0:
            return BasisAngles(float(theta), float(phi))
        return BasisAngles(theta, phi)


X_AXIS = BasisAngles(math.pi / 2, 0.0)
Y_AXIS = BasisAngles(math.pi / 2, math.pi / 2)
Z_AXIS = BasisAngles(0.0, 0.0)


@dataclass(frozen=True)
class RotatedEntries:
    """Independent entries of the rotated state with ``e^{-a/6}/Z`` absorbed.

    The rotated density matrix is ``(1/4) [[r11, r12, r12, r14],
    [r12*, r22, r23, -r12], [r12*, r23, r22, -r12], [r14*, -r12*, -r12*, r11]]``
    (complex-conjugated, see module notes).
    """

    rho11: np.ndarray
    rho22: np.ndarray
    rho23: np.ndarray
    rho12: np.ndarray
    rho14: np.ndarray


def single_qubit_unitary(b: BasisAngles) -> np.ndarray:
    theta = np.asarray(b.theta, dtype=float)
    phi = np.asarray(b.phi, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    u = np.empty(np.broadcast(theta, phi).shape + (2, 2), dtype=complex)
    u[..., 0, 0] = c
    u[..., 0, 1] = -np.exp(1j * phi) * s
    u[..., 1, 0] = np.exp(-1j * phi) * s
    u[..., 1, 1] = c
    return u


def two_qubit_unitary(b: BasisAngles) -> np.ndarray:
    u = single_qubit_unitary(b)
    return smallmat.kron(u, u)


def _weights(pop: Populations):
    # e^{-a/6}/Z times cosh(r/2), sinh(r/2), e^{a/2}, e^{a/6}
    ch = 0.5 * (pop.p_phi_minus + pop.p_phi_plus)
    sh = 0.5 * (pop.p_phi_minus - pop.p_phi_plus)
    return ch, sh, pop.p_psi_plus, pop.p_psi_minus


def _entries(pop: Populations, theta, phi) -> RotatedEntries:
    ch, sh, e2, e6 = _weights(pop)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st, ct = np.sin(theta), np.cos(theta)
    st2 = st * st
    ct2 = ct * ct
    c2p = np.cos(2 * phi)
    r11 = 2 * st2 * (e2 - sh * c2p) + ch * (np.cos(2 * theta) + 3)
    r12 = np.exp(-3j * phi) * st * (
        2 * np.exp(2j * phi) * ct * (ch - e2)
        + np.exp(4j * phi) * sh * (ct + 1)
        + sh * (ct - 1)
    )
    r14 = (
        2 * np.exp(-2j * phi) * st2 * (ch - e2)
        - 4 * np.exp(-4j * phi) * sh * np.sin(theta / 2) ** 4
        - 4 * sh * np.cos(theta / 2) ** 4
    )
    transverse = st2 * (sh * c2p + ch)
    r22 = 2 * (e2 * ct2 + e6 + transverse)
    r23 = 2 * e2 * ct2 - 2 * e6 + 2 * transverse
    return RotatedEntries(r11, r22, r23, r12, r14)


def rotated_entries(p: ReducedParams, b: BasisAngles) -> RotatedEntries:
    return _entries(populations(p), b.theta, b.phi)


def rotated_state(p: ReducedParams, b: BasisAngles) -> np.ndarray:
    """``U x U`` applied to the Gibbs state, ``U ρ U^dagger``, from the closed-form entries."""
    e = rotated_entries(p, b)
    r11, r22, r23, r12, r14 = np.broadcast_arrays(e.rho11, e.rho22, e.rho23, e.rho12, e.rho14)
    m = np.empty(r11.shape + (4, 4), dtype=complex)
    m[..., 0, :] = np.stack([r11, r12, r12, r14], axis=-1)
    m[..., 1, :] = np.stack([np.conj(r12), r22, r23, -r12], axis=-1)
    m[..., 2, :] = np.stack([np.conj(r12), r23, r22, -r12], axis=-1)
    m[..., 3, :] = np.stack([np.conj(r14), -np.conj(r12), -np.conj(r12), r11], axis=-1)
    return np.conj(m) / 4


def l1_coherence_raw(m) -> np.ndarray:
    """Sum of the moduli of all off-diagonal entries."""
    m = smallmat.as_complex(m)
    return np.sum(np.abs(m), axis=(-2, -1)) - np.sum(np.abs(np.diagonal(m, axis1=-2, axis2=-1)), axis=-1)


def l1_coherence_direct(m) -> np.ndarray:
    """Normalised l1 coherence ``(1/3) sum_{i != j} |m_ij|`` of a two-qubit state."""
    return l1_coherence_raw(m) / L1_NORMALIZATION


def _coherence(pop: Populations, theta, phi) -> np.ndarray:
    e = _entries(pop, theta, phi)
    return (4 * np.abs(e.rho12) + np.abs(e.rho14) + np.abs(e.rho23)) / 6


def coherence_arbitrary(p: ReducedParams, b: BasisAngles) -> np.ndarray:
    """Normalised l1 coherence in the product basis ``(theta, phi)``."""
    return _coherence(populations(p), b.theta, b.phi)


def coherence_arbitrary_matrix(p: ReducedParams, b: BasisAngles) -> np.ndarray:
    """Same quantity through the assembled 4x4 matrix (slow path for cross-checks)."""
    return l1_coherence_direct(rotated_state(p, b))


def coherence_axial_z(p: ReducedParams) -> np.ndarray:
    pop = populations(p)
    return (np.abs(pop.p_psi_plus - pop.p_psi_minus) + np.abs(pop.p_phi_minus - pop.p_phi_plus)) / 3


def coherence_axial_xy(p: ReducedParams, axis: str) -> np.ndarray:
    """Coherence in the S^x ("X") or S^y ("Y") eigenbasis.

    The X basis takes the upper signs of the paired +/- expressions, Y the lower.
    """
    pop = populations(p)
    if axis == "X":
        t1 = pop.p_psi_plus - pop.p_phi_plus  # e^{a/2} - e^{-r/2}
        t2 = pop.p_psi_minus - pop.p_phi_minus  # e^{a/6} - e^{+r/2}
    elif axis == "Y":
        t1 = pop.p_psi_plus - pop.p_phi_minus
        t2 = pop.p_psi_minus - pop.p_phi_plus
    else:
        raise ValueError(f"axis must be 'X' or 'Y', got {axis!r}")
    return (np.abs(t1) + np.abs(t2)) / 3


def correlated_coherence_of(m) -> np.ndarray:
    """Total minus local l1 coherence of a two-qubit state, normalised by 3."""
    local = l1_coherence_raw(smallmat.partial_trace(m, "A")) + l1_coherence_raw(smallmat.partial_trace(m, "B"))
    return (l1_coherence_raw(m) - local) / L1_NORMALIZATION


def correlated_coherence(p: ReducedParams, b: BasisAngles) -> np.ndarray:
    rho = rotated_state(p, b)
    local = l1_coherence_raw(smallmat.partial_trace(rho, "A")) + l1_coherence_raw(smallmat.partial_trace(rho, "B"))
    return coherence_arbitrary(p, b) - local / L1_NORMALIZATION


def phi_kinks(pop: Populations, theta: float) -> list[float]:
    """Zeros of ``rho23`` in ``[0, 2pi)`` at fixed theta, where ``|rho23|`` has a kink.

    ``rho23`` is affine in ``cos 2phi``, so the zeros are ``+-phi0 (mod pi)``.
    """
    ch, sh, e2, e6 = (float(x) for x in _weights(pop))
    st2 = math.sin(theta) ** 2
    den = st2 * sh
    if den == 0.0:
        return []
    c0 = (e6 - e2 * math.cos(theta) ** 2 - st2 * ch) / den
    if not -1.0 <= c0 <= 1.0:
        return []
    f0 = 0.5 * math.acos(c0)
    return sorted({f0, math.pi - f0, math.pi + f0, 2 * math.pi - f0} - {0.0, 2 * math.pi})


def average_coherence_quad(p: ReducedParams, tol: float = 1e-6) -> QuadratureResult:
    """Sphere average of :func:`coherence_arbitrary`, returned with its error bookkeeping."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    pop = populations(ReducedParams(float(p.a), float(p.r)))
    return integrate_sphere(
        lambda theta, phi: _coherence(pop, theta, phi), tol, vectorized=True,
        phi_breakpoints=lambda theta: phi_kinks(pop, theta),
    )


def average_coherence(p: ReducedParams, tol: float = 1e-6) -> float:
    res = average_coherence_quad(p, tol)
    if not res.converged:
        raise QuadratureError(
            f"average coherence did not converge (estimate {res.value:.10g}, error {res.error_estimate:.3g})",
            res,
        )
    return res.value


def gibbs_coherence_check(p: ReducedParams) -> np.ndarray:
    """Normalised l1 coherence of the unrotated Gibbs state, from the matrix."""
    return l1_coherence_direct(gibbs_state(p))

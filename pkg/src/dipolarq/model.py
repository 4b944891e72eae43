"""Thermal state of two dipolar-coupled spin-1/2 particles.

Everything is expressed in the reduced variables ``a = Delta / k_B T`` and
``r = epsilon / k_B T``. Arrays are accepted for ``a`` and ``r`` and broadcast
together, so a whole sweep grid can be evaluated in one call.

The four Bell states are the eigenbasis of both the Hamiltonian and the Gibbs
state. Internally the Gibbs state is assembled from the four Boltzmann
weights normalised with a log-sum-exp shift; this is the closed-form X state
rearranged so that nothing overflows for ``|a|, |r| <= MAX_REDUCED``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_REDUCED = 1400.0
DEGENERACY_TOL = 1e-12

BELL_LABELS = ("Psi-", "Psi+", "Phi+", "Phi-")
DEGENERATE = "degenerate"

_SQ2 = 1.0 / math.sqrt(2.0)


class RangeError(OverflowError):
    """Raised when a reduced parameter is outside the representable range."""


@dataclass(frozen=True)
class ReducedParams:
    a: float
    r: float

    def __post_init__(self):
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.r))):
            raise ValueError("reduced parameters must be finite")


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters: ``delta`` and ``epsilon`` as Delta/k_B and epsilon/k_B in kelvin."""

    delta: float
    epsilon: float
    temperature: float = 1.0

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.delta, self.epsilon, self.temperature)):
            raise ValueError("model parameters must be finite")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")

    def reduced(self) -> ReducedParams:
        return ReducedParams(self.delta / self.temperature, self.epsilon / self.temperature)


@dataclass(frozen=True)
class Populations:
    p_psi_minus: np.ndarray
    p_psi_plus: np.ndarray
    p_phi_plus: np.ndarray
    p_phi_minus: np.ndarray

    def as_array(self) -> np.ndarray:
        """Populations stacked on the last axis in ``BELL_LABELS`` order."""
        return np.stack(
            [self.p_psi_minus, self.p_psi_plus, self.p_phi_plus, self.p_phi_minus], axis=-1
        )


def check_range(p: ReducedParams) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(p.a, dtype=float)
    r = np.asarray(p.r, dtype=float)
    if np.any(np.abs(a) > MAX_REDUCED) or np.any(np.abs(r) > MAX_REDUCED):
        raise RangeError(f"|a| and |r| must not exceed {MAX_REDUCED:g}")
    return np.broadcast_arrays(a, r)


def hamiltonian(p: ReducedParams) -> np.ndarray:
    """Dipolar Hamiltonian in units of k_B T, basis ``|00>, |01>, |10>, |11>``."""
    a, r = np.broadcast_arrays(np.asarray(p.a, dtype=float), np.asarray(p.r, dtype=float))
    h = np.zeros(a.shape + (4, 4), dtype=complex)
    h[..., 0, 0] = h[..., 3, 3] = a / 6
    h[..., 0, 3] = h[..., 3, 0] = r / 2
    h[..., 1, 1] = h[..., 2, 2] = h[..., 1, 2] = h[..., 2, 1] = -a / 6
    return h


def energy_levels(p: ReducedParams) -> np.ndarray:
    """Eigenvalues of the Hamiltonian in ``BELL_LABELS`` order: 0, -a/3, (a+3r)/6, (a-3r)/6."""
    a, r = np.broadcast_arrays(np.asarray(p.a, dtype=float), np.asarray(p.r, dtype=float))
    return np.stack([np.zeros_like(a), -a / 3, (a + 3 * r) / 6, (a - 3 * r) / 6], axis=-1)


def _log_weights(p: ReducedParams) -> tuple[np.ndarray, np.ndarray]:
    """Shifted Boltzmann weights (max weight 1) and the shift, in Bell order."""
    a, r = check_range(p)
    x = -energy_levels(ReducedParams(a, r))
    shift = np.max(x, axis=-1)
    return np.exp(x - shift[..., None]), shift


def log_partition_function(p: ReducedParams) -> np.ndarray:
    w, shift = _log_weights(p)
    return shift + np.log(np.sum(w, axis=-1))


def partition_function(p: ReducedParams) -> np.ndarray:
    """``Z = 2 e^{a/6} cosh(a/6) + 2 e^{-a/6} cosh(r/2)``.

    Raises ``RangeError`` outside ``|a|, |r| <= MAX_REDUCED`` and also when ``Z``
    itself exceeds the double range (possible inside the cut-off, since the
    largest Boltzmann exponent reaches ``(|a| + 3|r|)/6``).
    """
    logz = log_partition_function(p)
    if np.any(logz > np.log(np.finfo(float).max)):
        raise RangeError("partition function overflows double precision")
    return np.exp(logz)


def populations(p: ReducedParams) -> Populations:
    w, _ = _log_weights(p)
    w = w / np.sum(w, axis=-1, keepdims=True)
    return Populations(w[..., 0], w[..., 1], w[..., 2], w[..., 3])


def gibbs_state(p: ReducedParams) -> np.ndarray:
    """Thermal X state ``e^{-H}/Z`` from the closed-form entries.

    With ``w`` the normalised Boltzmann weights of Psi-, Psi+, Phi+, Phi-::

        rho_11 = rho_44 = (w_Phi- + w_Phi+) / 2     # e^{-a/6} cosh(r/2) / Z
        rho_14 = rho_41 = -(w_Phi- - w_Phi+) / 2    # -e^{-a/6} sinh(r/2) / Z
        rho_22 = rho_33 = (w_Psi+ + w_Psi-) / 2     # e^{a/6} cosh(a/6) / Z
        rho_23 = rho_32 = (w_Psi+ - w_Psi-) / 2     # e^{a/6} sinh(a/6) / Z
    """
    pop = populations(p)
    rho = np.zeros(np.shape(pop.p_psi_minus) + (4, 4), dtype=complex)
    rho[..., 0, 0] = rho[..., 3, 3] = 0.5 * (pop.p_phi_minus + pop.p_phi_plus)
    rho[..., 0, 3] = rho[..., 3, 0] = -0.5 * (pop.p_phi_minus - pop.p_phi_plus)
    rho[..., 1, 1] = rho[..., 2, 2] = 0.5 * (pop.p_psi_plus + pop.p_psi_minus)
    rho[..., 1, 2] = rho[..., 2, 1] = 0.5 * (pop.p_psi_plus - pop.p_psi_minus)
    return rho


def bell_states() -> np.ndarray:
    """Rows are ``|Psi->, |Psi+>, |Phi+>, |Phi->`` in the computational basis."""
    return np.array(
        [
            [0, _SQ2, -_SQ2, 0],
            [0, _SQ2, _SQ2, 0],
            [_SQ2, 0, 0, _SQ2],
            [_SQ2, 0, 0, -_SQ2],
        ],
        dtype=complex,
    )


def ground_state_label(p: ReducedParams) -> str:
    """Most populated Bell state, or ``"degenerate"`` at a level crossing."""
    pop = populations(p).as_array()
    if pop.ndim != 1:
        raise ValueError("ground_state_label takes scalar parameters")
    order = np.argsort(pop)[::-1]
    if pop[order[0]] - pop[order[1]] < DEGENERACY_TOL:
        return DEGENERATE
    return BELL_LABELS[order[0]]


def _clip_segment(p0, p1, box):
    """Liang-Barsky clip of the segment p0-p1 to box = (a_min, a_max, r_min, r_max)."""
    (x0, y0), (x1, y1) = p0, p1
    dx, dy = x1 - x0, y1 - y0
    lo, hi = 0.0, 1.0
    for q, d in ((x0 - box[0], -dx), (box[1] - x0, dx), (y0 - box[2], -dy), (box[3] - y0, dy)):
        if d == 0:
            if q < 0:
                return None
            continue
        t = q / d
        if d < 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
    if lo > hi:
        return None
    return (x0 + lo * dx, y0 + lo * dy), (x0 + hi * dx, y0 + hi * dy)


def level_crossing_segments(a_min: float, a_max: float, r_min: float, r_max: float) -> list[tuple]:
    """Ground-state crossing lines clipped to the plotting box.

    Crossings lie on ``a = |r|`` for ``a >= 0`` (Psi+ against Phi-/Phi+) and on
    ``r = 0`` for ``a <= 0`` (Phi+ against Phi-). Returns ``((a0, r0), (a1, r1))``
    pairs, each starting at the origin side.
    """
    box = (a_min, a_max, r_min, r_max)
    reach = 2.0 * max(abs(a_min), abs(a_max), abs(r_min), abs(r_max), 1.0)
    rays = [((0.0, 0.0), (reach, reach)), ((0.0, 0.0), (reach, -reach)), ((0.0, 0.0), (-reach, 0.0))]
    out = []
    for p0, p1 in rays:
        seg = _clip_segment(p0, p1, box)
        if seg is not None and seg[0] != seg[1]:
            out.append(seg)
    return out

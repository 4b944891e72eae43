"""Small dense complex matrix kernel for two-qubit work.

Matrices are plain ``numpy`` complex arrays of shape ``(..., 2, 2)`` or
``(..., 4, 4)``; every routine broadcasts over leading batch axes so sweeps can
push thousands of states through one call. The Hermitian eigensolver is a
cyclic complex Jacobi iteration, with a closed-form path for X-shaped inputs.
"""

from __future__ import annotations

import numpy as np

HERM_TOL = 1e-12
EIG_TOL = 1e-10

_JACOBI_MAX_SWEEPS = 30
_JACOBI_STOP = 1e-20
_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
# positions that are structurally zero in an X state
_X_ZEROS = ((0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2))

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class NotHermitianError(ValueError):
    pass


def as_complex(m) -> np.ndarray:
    return np.asarray(m, dtype=complex)


def adjoint(m) -> np.ndarray:
    return np.conj(np.swapaxes(as_complex(m), -1, -2))


def kron(a, b) -> np.ndarray:
    """Kronecker product of two (batches of) 2x2 matrices.

    ``kron(a, b)[..., 2*i + k, 2*j + l] == a[..., i, j] * b[..., k, l]``.
    """
    a = as_complex(a)
    b = as_complex(b)
    out = np.einsum("...ij,...kl->...ikjl", a, b)
    return out.reshape(out.shape[:-4] + (4, 4))


def outer(v) -> np.ndarray:
    """Projector ``|v><v|`` for a (batch of) state vector(s)."""
    v = as_complex(v)
    return v[..., :, None] * np.conj(v[..., None, :])


def trace(m) -> np.ndarray:
    return np.trace(as_complex(m), axis1=-2, axis2=-1)


def hermiticity_defect(m) -> np.ndarray:
    m = as_complex(m)
    return np.max(np.abs(m - adjoint(m)), axis=(-2, -1))


def is_hermitian(m, tol: float = HERM_TOL) -> bool:
    m = as_complex(m)
    scale = np.maximum(1.0, np.max(np.abs(m), axis=(-2, -1)))
    return bool(np.all(hermiticity_defect(m) <= tol * scale))


def is_x_shaped(m) -> bool:
    m = as_complex(m)
    if m.shape[-2:] != (4, 4):
        return False
    return all(np.all(m[..., i, j] == 0) for i, j in _X_ZEROS)


def _check_hermitian(m: np.ndarray) -> None:
    if not is_hermitian(m):
        raise NotHermitianError(
            f"matrix is not Hermitian (defect {np.max(hermiticity_defect(m)):.3e})"
        )


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi sweeps on a flat batch ``(n, d, d)`` of Hermitian matrices."""
    a = a.copy()
    n, d, _ = a.shape
    v = np.broadcast_to(np.eye(d, dtype=complex), a.shape).copy()
    pairs = [(p, q) for p in range(d - 1) for q in range(p + 1, d)] if d != 4 else _PAIRS
    rows = np.arange(n)
    offmask = ~np.eye(d, dtype=bool)
    scale = np.maximum(np.max(np.abs(a), axis=(1, 2)), 1e-300)
    floor = _JACOBI_STOP * scale
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.max(np.abs(a[:, offmask]), axis=1)
        if np.all(off <= floor):
            break
        for p, q in pairs:
            apq = a[:, p, q]
            g = np.abs(apq)
            active = g > floor
            if not np.any(active):
                continue
            app = a[:, p, p].real
            aqq = a[:, q, q].real
            gs = np.where(active, g, 1.0)
            tau = (aqq - app) / (2.0 * gs)
            t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            ph = np.where(active, np.conj(apq) / gs, 1.0)  # e^{-i arg a_pq}
            g_pp, g_qp, g_pq, g_qq = c, -s * ph, s, c * ph

            colp = a[:, :, p].copy()
            colq = a[:, :, q]
            a[:, :, p] = colp * g_pp[:, None] + colq * g_qp[:, None]
            a[:, :, q] = colp * g_pq[:, None] + colq * g_qq[:, None]
            rowp = a[:, p, :].copy()
            rowq = a[:, q, :]
            a[:, p, :] = np.conj(g_pp)[:, None] * rowp + np.conj(g_qp)[:, None] * rowq
            a[:, q, :] = np.conj(g_pq)[:, None] * rowp + np.conj(g_qq)[:, None] * rowq
            a[rows, p, q] = np.where(active, 0.0, a[:, p, q])
            a[rows, q, p] = np.where(active, 0.0, a[:, q, p])
            a[:, p, p] = a[:, p, p].real
            a[:, q, q] = a[:, q, q].real

            vp = v[:, :, p].copy()
            vq = v[:, :, q]
            v[:, :, p] = vp * g_pp[:, None] + vq * g_qp[:, None]
            v[:, :, q] = vp * g_pq[:, None] + vq * g_qq[:, None]
    return np.diagonal(a, axis1=1, axis2=2).real.copy(), v


def _eig2(alpha, beta, delta):
    """Closed-form eigensystem of the Hermitian 2x2 block [[alpha, beta], [conj(beta), delta]]."""
    half_sum = 0.5 * (alpha + delta)
    half_diff = 0.5 * (alpha - delta)
    g = np.abs(beta)
    rad = np.hypot(half_diff, g)
    lo, hi = half_sum - rad, half_sum + rad
    # eigenvector for hi: (beta, hi - alpha) or (hi - delta, conj(beta)), whichever is larger
    x1, y1 = beta, (hi - alpha).astype(complex)
    x2, y2 = (hi - delta).astype(complex), np.conj(beta)
    use2 = np.abs(x2) ** 2 + np.abs(y2) ** 2 > np.abs(x1) ** 2 + np.abs(y1) ** 2
    x = np.where(use2, x2, x1)
    y = np.where(use2, y2, y1)
    nrm = np.sqrt(np.abs(x) ** 2 + np.abs(y) ** 2)
    degenerate = nrm == 0.0
    nrm = np.where(degenerate, 1.0, nrm)
    x = np.where(degenerate, 1.0, x / nrm)
    y = np.where(degenerate, 0.0, y / nrm)
    hi_vec = np.stack([x, y], axis=-1)
    lo_vec = np.stack([-np.conj(y), np.conj(x)], axis=-1)
    return lo, hi, lo_vec, hi_vec


def _eig_x(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    w = np.empty((n, 4))
    v = np.zeros((n, 4, 4), dtype=complex)
    col = 0
    for i, j in ((0, 3), (1, 2)):
        lo, hi, lo_vec, hi_vec = _eig2(a[:, i, i].real, a[:, i, j], a[:, j, j].real)
        for val, vec in ((lo, lo_vec), (hi, hi_vec)):
            w[:, col] = val
            v[:, i, col] = vec[:, 0]
            v[:, j, col] = vec[:, 1]
            col += 1
    return w, v


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate each eigenvector so its first non-negligible component is real positive."""
    v = v.copy()
    mag = np.abs(v)
    lead = np.argmax(mag > 1e-12, axis=-2)  # (n, d)
    n, d, _ = v.shape
    comp = v[np.arange(n)[:, None], lead, np.arange(d)[None, :]]
    ph = np.where(np.abs(comp) > 0, np.conj(comp) / np.where(np.abs(comp) > 0, np.abs(comp), 1.0), 1.0)
    return v * ph[:, None, :]


def _order(w: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    idx = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, idx, axis=-1)
    v = np.take_along_axis(v, idx[:, None, :], axis=-1)
    v = _fix_phase(v)
    ties = np.any(np.diff(w, axis=-1) < EIG_TOL, axis=-1)
    for k in np.flatnonzero(ties):
        order = list(range(w.shape[1]))
        start = 0
        while start < len(order):
            stop = start + 1
            while stop < len(order) and w[k, stop] - w[k, stop - 1] < EIG_TOL:
                stop += 1
            # descending lexicographic key keeps the standard basis in natural order
            group = sorted(
                range(start, stop),
                key=lambda c: tuple(x for z in np.round(v[k, :, c], 12) for x in (z.real, z.imag)),
                reverse=True,
            )
            order[start:stop] = group
            start = stop
        w[k] = w[k, order]
        v[k] = v[k][:, order]
    return w, v


def eig_hermitian(m, method: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of Hermitian matrices.

    Returns ascending eigenvalues ``w`` (shape ``(..., d)``) and eigenvectors
    as the columns of ``v`` (shape ``(..., d, d)``). ``method`` is ``"jacobi"``,
    ``"xblock"`` (X-shaped 4x4 only) or ``"auto"``, which takes the block path
    whenever the input is X-shaped. Degenerate levels are ordered by
    descending lexicographic order of the phase-fixed eigenvectors.
    """
    m = as_complex(m)
    _check_hermitian(m)
    batch = m.shape[:-2]
    d = m.shape[-1]
    flat = m.reshape((-1, d, d))
    flat = 0.5 * (flat + adjoint(flat))
    # exact power-of-two scaling to unit max entry keeps the rotations clear of
    # subnormals and overflow
    _, expo = np.frexp(np.max(np.abs(flat), axis=(-2, -1)))
    k = -expo[:, None, None]
    flat = np.ldexp(flat.real, k) + 1j * np.ldexp(flat.imag, k)
    if method == "auto":
        method = "xblock" if is_x_shaped(flat) else "jacobi"
    if method == "xblock":
        if not is_x_shaped(flat):
            raise ValueError("xblock path requires an X-shaped 4x4 matrix")
        w, v = _eig_x(flat)
    elif method == "jacobi":
        w, v = _jacobi(flat)
    else:
        raise ValueError(f"unknown method {method!r}")
    w, v = _order(np.ldexp(w, expo[:, None]), v)
    return w.reshape(batch + (d,)), v.reshape(batch + (d, d))


def eigvalsh(m, method: str = "auto") -> np.ndarray:
    return eig_hermitian(m, method)[0]


def hermitian_function(m, fn) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, v = eig_hermitian(m)
    return np.einsum("...ik,...k,...jk->...ij", v, fn(w), np.conj(v))


def trace_norm(m) -> np.ndarray:
    """Sum of singular values, ``Tr sqrt(M^dagger M)``."""
    m = as_complex(m)
    if is_hermitian(m):
        return np.sum(np.abs(eigvalsh(m)), axis=-1)
    if is_hermitian(1j * m):
        return np.sum(np.abs(eigvalsh(1j * m)), axis=-1)
    w = eigvalsh(adjoint(m) @ m)
    return np.sum(np.sqrt(np.clip(w, 0.0, None)), axis=-1)


def partial_trace(m, keep: str = "A") -> np.ndarray:
    """Reduced 2x2 state of the kept qubit ``keep`` ("A" or "B") of a 4x4 density matrix."""
    m = as_complex(m)
    tr = trace(m)
    if np.any(np.abs(tr - 1.0) > HERM_TOL):
        raise ValueError("partial_trace expects a unit-trace density matrix")
    t = m.reshape(m.shape[:-2] + (2, 2, 2, 2))
    if keep == "A":
        return np.einsum("...ikjk->...ij", t)
    if keep == "B":
        return np.einsum("...kikj->...ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")

"""Brute-force reference values on general 4x4 density matrices.

Nothing in this module knows about blocks, Bloch coefficients or the closed
forms; it only diagonalizes matrices.  All array functions accept stacks of
shape ``(..., 4, 4)`` so parameter grids can be evaluated in one call.

The Hermitian eigensolver is a cyclic complex Jacobi method, and concurrence
uses a one-sided Jacobi SVD, which keeps small singular values accurate to
machine precision in absolute terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Union

import numpy as np

from .errors import InvalidDensityMatrixError, NotPSDError, OutOfDomainError
from .state_core import PAULI, ParametrizedFamily

JACOBI_TOL = 1e-13
MAX_SWEEPS = 60
CLAMP_TOL = 1e-12
DENSITY_TOL = 1e-10
QFI_CUTOFF = 1e-12
FD_STEP = 1e-5

SIGMA_YY = np.kron(PAULI[2], PAULI[2])


def _as_stack(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    return a.reshape((-1,) + a.shape[-2:]), a.shape[:-2]


def _rotation(app, aqq, apq):
    """Unitary 2x2 rotation zeroing the (p, q) entry of a Hermitian pair.

    Returns ``(c, s, ph)`` for ``U = [[c, -s], [conj(ph) s, conj(ph) c]]``.
    """
    r = np.abs(apq)
    nz = r > 0
    # exp(i arg) rather than apq / |apq|: the division overflows for subnormal entries.
    ph = np.where(nz, np.exp(1j * np.angle(apq)), 1.0)
    theta = np.where(nz, 0.5 * np.arctan2(2 * r, (app - aqq).real), 0.0)
    return np.cos(theta), np.sin(theta), ph


def eigh_jacobi(a, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS):
    """Eigen-decomposition of Hermitian matrices, eigenvalues in descending order.

    Returns ``(w, v)`` with ``a = v @ diag(w) @ v^H`` and eigenvectors in the
    columns of ``v``.
    """
    stack, lead = _as_stack(a)
    a = 0.5 * (stack + np.conj(np.swapaxes(stack, -1, -2)))
    m, n = a.shape[0], a.shape[-1]
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    scale = np.maximum(1.0, np.linalg.norm(a, axis=(-2, -1)))
    offdiag = ~np.eye(n, dtype=bool)
    rows = np.arange(m)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a[:, offdiag]) ** 2, axis=-1))
        if np.all(off <= tol * scale):
            break
        for p, q in combinations(range(n), 2):
            c, s, ph = _rotation(a[:, p, p], a[:, q, q], a[:, p, q])
            ph_c = np.conj(ph)
            u_pp, u_pq, u_qp, u_qq = c, -s, ph_c * s, ph_c * c
            col_p = a[:, :, p] * u_pp[:, None] + a[:, :, q] * u_qp[:, None]
            col_q = a[:, :, p] * u_pq[:, None] + a[:, :, q] * u_qq[:, None]
            a[:, :, p], a[:, :, q] = col_p, col_q
            row_p = np.conj(u_pp)[:, None] * a[:, p, :] + np.conj(u_qp)[:, None] * a[:, q, :]
            row_q = np.conj(u_pq)[:, None] * a[:, p, :] + np.conj(u_qq)[:, None] * a[:, q, :]
            a[:, p, :], a[:, q, :] = row_p, row_q
            a[rows, p, q] = a[rows, q, p] = 0.0
            vp = v[:, :, p] * u_pp[:, None] + v[:, :, q] * u_qp[:, None]
            vq = v[:, :, p] * u_pq[:, None] + v[:, :, q] * u_qq[:, None]
            v[:, :, p], v[:, :, q] = vp, vq
    w = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return w.reshape(lead + (n,)), v.reshape(lead + (n, n))


def singular_values_jacobi(b, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS):
    """Singular values (descending) by one-sided Jacobi column orthogonalization."""
    stack, lead = _as_stack(b)
    b = stack.copy()
    n = b.shape[-1]
    for _ in range(max_sweeps):
        worst = 0.0
        for p, q in combinations(range(n), 2):
            bp, bq = b[:, :, p], b[:, :, q]
            alpha = np.sum(np.abs(bp) ** 2, axis=-1)
            beta = np.sum(np.abs(bq) ** 2, axis=-1)
            gamma = np.sum(np.conj(bp) * bq, axis=-1)
            denom = np.sqrt(alpha * beta)
            rel = np.abs(gamma) / np.where(denom > 0, denom, 1.0)
            worst = max(worst, float(np.max(rel, initial=0.0)))
            c, s, ph = _rotation(alpha, beta, gamma)
            ph_c = np.conj(ph)
            new_p = bp * c[:, None] + bq * (ph_c * s)[:, None]
            new_q = -bp * s[:, None] + bq * (ph_c * c)[:, None]
            b[:, :, p], b[:, :, q] = new_p, new_q
        if worst <= tol:
            break
    sv = np.sort(np.linalg.norm(b, axis=-2), axis=-1)[:, ::-1]
    return sv.reshape(lead + (n,))


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eigensystem(a) -> EigenSystem:
    w, v = eigh_jacobi(np.asarray(a, dtype=complex))
    return EigenSystem(w, v)


def check_density_matrix(rho, tol: float = DENSITY_TOL) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return the eigenvalues."""
    stack, lead = _as_stack(rho)
    herm = np.max(np.abs(stack - np.conj(np.swapaxes(stack, -1, -2))), axis=(-2, -1))
    if np.any(herm > tol):
        raise InvalidDensityMatrixError(f"not Hermitian (deviation {herm.max():.3g})")
    tr = np.trace(stack, axis1=-2, axis2=-1)
    if np.any(np.abs(tr - 1) > tol):
        raise InvalidDensityMatrixError("trace differs from 1")
    w, _ = eigh_jacobi(stack)
    if np.any(w < -tol):
        raise InvalidDensityMatrixError(f"negative eigenvalue {w.min():.3g}")
    return w.reshape(lead + (stack.shape[-1],))


def matrix_sqrt(rho, clamp: float = CLAMP_TOL) -> np.ndarray:
    """Principal square root of Hermitian PSD matrices.

    Eigenvalues in ``[-clamp, 0)`` are set to zero; anything more negative
    raises :class:`NotPSDError`.
    """
    w, v = eigh_jacobi(rho)
    if np.any(w < -clamp):
        raise NotPSDError(f"eigenvalue {np.min(w):.3g} below -{clamp}")
    root = np.sqrt(np.maximum(w, 0.0))
    return (v * root[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def qfi_spectral(rho, drho, cutoff: float = QFI_CUTOFF):
    """``sum_{ij} 2 |<i| d rho |j>|^2 / (p_i + p_j)`` over pairs with ``p_i + p_j > cutoff``."""
    w, v = eigh_jacobi(rho)
    vh = np.conj(np.swapaxes(v, -1, -2))
    d = vh @ np.asarray(drho, dtype=complex) @ v
    denom = w[..., :, None] + w[..., None, :]
    keep = denom > cutoff
    terms = np.where(keep, 2 * np.abs(d) ** 2 / np.where(keep, denom, 1.0), 0.0)
    return np.sum(terms, axis=(-2, -1))


def skew_from_sqrt_derivative(dsqrt):
    """``4 Tr[(d sqrt(rho))^2]`` from the derivative of the square root."""
    dsqrt = np.asarray(dsqrt, dtype=complex)
    return 4 * np.real(np.trace(dsqrt @ dsqrt, axis1=-2, axis2=-1))


def skew_stencil(rho_plus, rho_minus, step: float):
    """Skew information from a central stencil ``rho(theta +/- step)``."""
    dsqrt = (matrix_sqrt(rho_plus) - matrix_sqrt(rho_minus)) / (2 * step)
    return skew_from_sqrt_derivative(dsqrt)


def concurrence_wootters(rho):
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the singular values of ``W^(1/2) V^H (Y (x) Y) V^* W^(1/2)``
    for ``rho = V W V^H``, i.e. the square roots of the eigenvalues of
    ``rho (Y (x) Y) rho^* (Y (x) Y)``.
    """
    w, v = eigh_jacobi(rho)
    if np.any(w < -DENSITY_TOL):
        raise InvalidDensityMatrixError(f"negative eigenvalue {np.min(w):.3g}")
    root = np.sqrt(np.maximum(w, 0.0))
    vh = np.conj(np.swapaxes(v, -1, -2))
    tau = root[..., :, None] * (vh @ SIGMA_YY @ np.conj(v)) * root[..., None, :]
    lam = singular_values_jacobi(tau)
    c = lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]
    return np.maximum(c, 0.0)


# --------------------------------------------------------------------------
# Family-level oracles
# --------------------------------------------------------------------------

MatrixFamily = Union[ParametrizedFamily, Callable[[float], np.ndarray]]


def _matrix_fn(family: MatrixFamily):
    if isinstance(family, ParametrizedFamily):
        return family.matrix, family.interval
    return (lambda x: np.asarray(family(x), dtype=complex)), None


def fd_derivative(fn, theta: float, step: float = FD_STEP, interval=None, richardson=False):
    """Second-order finite difference; one-sided stencils next to the interval edges."""
    lo, hi = interval if interval is not None else (-np.inf, np.inf)
    if not lo <= theta <= hi:
        raise OutOfDomainError(f"theta={theta!r} outside [{lo}, {hi}]")
    span = 2 * step

    def stencil(h):
        if theta - h >= lo and theta + h <= hi:
            return (fn(theta + h) - fn(theta - h)) / (2 * h)
        if theta + 2 * h <= hi:
            return (-3 * fn(theta) + 4 * fn(theta + h) - fn(theta + 2 * h)) / (2 * h)
        if theta - 2 * h >= lo:
            return (3 * fn(theta) - 4 * fn(theta - h) + fn(theta - 2 * h)) / (2 * h)
        raise OutOfDomainError(f"interval too short for step {step}")

    if hi - lo < span:
        raise OutOfDomainError(f"interval too short for step {step}")
    d = stencil(step)
    if richardson:
        d = (4 * stencil(step / 2) - d) / 3
    return d


def qfi_oracle(
    family: MatrixFamily,
    theta: float,
    *,
    step: float = FD_STEP,
    richardson: bool = False,
    mode: str = "auto",
) -> float:
    """Spectral QFI of a one-parameter family.

    ``mode`` is ``"auto"`` (analytic derivative when the family provides one),
    ``"fd"`` or ``"analytic"``.
    """
    fn, interval = _matrix_fn(family)
    rho = fn(theta)
    check_density_matrix(rho)
    analytic = isinstance(family, ParametrizedFamily) and family.derivative is not None
    if mode == "analytic" and not analytic:
        raise ValueError("family has no analytic derivative")
    if mode == "analytic" or (mode == "auto" and analytic):
        drho = np.asarray(family.derivative(theta), dtype=complex)
    else:
        drho = fd_derivative(fn, theta, step, interval, richardson)
    return float(qfi_spectral(rho, drho))


def skew_oracle(
    family: MatrixFamily,
    theta: float,
    *,
    step: float = FD_STEP,
    richardson: bool = False,
) -> float:
    """``4 Tr[(d sqrt(rho))^2]`` with the square root by diagonalization."""
    fn, interval = _matrix_fn(family)
    check_density_matrix(fn(theta))
    dsqrt = fd_derivative(lambda x: matrix_sqrt(fn(x)), theta, step, interval, richardson)
    return float(skew_from_sqrt_derivative(dsqrt))


# --------------------------------------------------------------------------
# Batched variants for grids
# --------------------------------------------------------------------------

_CENTRAL = (np.array([-1.0, 1.0, 0.0]), np.array([-1.0, 1.0, 0.0]) / 2)
_FORWARD = (np.array([0.0, 1.0, 2.0]), np.array([-3.0, 4.0, -1.0]) / 2)
_BACKWARD = (np.array([0.0, -1.0, -2.0]), np.array([3.0, -4.0, 1.0]) / 2)


def _fd_stencils(theta, step, interval):
    lo, hi = interval
    central = (theta - step >= lo) & (theta + step <= hi)
    forward = ~central & (theta + 2 * step <= hi)
    backward = ~central & ~forward & (theta - 2 * step >= lo)
    if not np.all(central | forward | backward):
        raise OutOfDomainError(f"interval too short for step {step}")
    offsets = np.where(
        central[:, None], _CENTRAL[0], np.where(forward[:, None], _FORWARD[0], _BACKWARD[0])
    )
    weights = np.where(
        central[:, None], _CENTRAL[1], np.where(forward[:, None], _FORWARD[1], _BACKWARD[1])
    )
    return offsets * step, weights / step


def fd_derivative_batch(fn, thetas, step: float = FD_STEP, interval=(0.0, 1.0), richardson=False):
    """Vectorized :func:`fd_derivative`; ``fn`` maps an array of parameters to a stack."""
    thetas = np.asarray(thetas, dtype=float)
    lo, hi = interval
    if np.any(thetas < lo) or np.any(thetas > hi):
        raise OutOfDomainError(f"parameters outside [{lo}, {hi}]")

    def once(h):
        offsets, weights = _fd_stencils(thetas, h, interval)
        total = 0
        for k in range(3):
            total = total + weights[:, k, None, None] * fn(thetas + offsets[:, k])
        return total

    d = once(step)
    if richardson:
        d = (4 * once(step / 2) - d) / 3
    return d


def qfi_oracle_batch(fn, thetas, dfn=None, step: float = FD_STEP, interval=(0.0, 1.0)):
    """Spectral QFI over an array of parameters, analytic derivative if ``dfn`` is given."""
    thetas = np.asarray(thetas, dtype=float)
    rho = fn(thetas)
    check_density_matrix(rho)
    drho = dfn(thetas) if dfn is not None else fd_derivative_batch(fn, thetas, step, interval)
    return qfi_spectral(rho, drho)


def skew_oracle_batch(fn, thetas, step: float = FD_STEP, interval=(0.0, 1.0), richardson=False):
    thetas = np.asarray(thetas, dtype=float)
    check_density_matrix(fn(thetas))
    dsqrt = fd_derivative_batch(lambda x: matrix_sqrt(fn(x)), thetas, step, interval, richardson)
    return skew_from_sqrt_derivative(dsqrt)

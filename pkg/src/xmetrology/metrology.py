"""Closed-form quantum Fisher information and Wigner-Yanase skew information.

Every formula here works block by block on the four-vectors of
:class:`~xmetrology.state_core.BlockCoeffs`.  Within one block the state is
``rho_b = (chi0 * 1 + chi . sigma) / 2`` and both quantities reduce to
Minkowski-type contractions with ``g = diag(1, -1, -1, -1)``.  The totals are
the sums over the two blocks.

The skew information uses the normalization ``4 Tr[(d sqrt(rho))^2]``.  With
this normalization ``QFI <= skew <= 2 QFI`` for every family; the two agree
only when the eigenbasis of ``rho`` does not move with the parameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    DegenerateBlockError,
    NotPureError,
    SingularBlockError,
    SingularSqrtError,
)
from .state_core import GENERATORS, GENERATORS_TILDE, BlockCoeffs, BlockCoeffsDeriv

EPS_SINGULAR = 1e-10
EPS_SQRT = 1e-12
EPS_DEGENERATE = 1e-12
PURITY_REL = 1e-9
PURITY_CHECK = 1e-9

METRIC = np.array([1.0, -1.0, -1.0, -1.0])


def minkowski(x, y) -> float:
    return float(np.dot(METRIC * np.asarray(x), np.asarray(y)))


def _split(v):
    v = np.asarray(v, dtype=float)
    return v[0], v[1:]


def is_pure_block(chi) -> bool:
    """Rank-one test used for dispatch: ``chi0^2 - |chi|^2 < 1e-9 chi0^2``."""
    chi0, vec = _split(chi)
    return chi0 * chi0 - vec @ vec < PURITY_REL * chi0 * chi0


def is_zero_block(chi) -> bool:
    return abs(float(chi[0])) <= EPS_SINGULAR


# --------------------------------------------------------------------------
# Symmetric logarithmic derivative and QFI
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SldCoeffs:
    """Coefficients of the SLD ``L = p0 G0 + sum_i p_i G_i`` on each block."""

    p: np.ndarray
    p_tilde: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.tensordot(self.p, GENERATORS, axes=1) + np.tensordot(
            self.p_tilde, GENERATORS_TILDE, axes=1
        )


def sld_block(chi, dchi) -> np.ndarray:
    chi = np.asarray(chi, dtype=float)
    dchi = np.asarray(dchi, dtype=float)
    chi0 = chi[0]
    norm = minkowski(chi, chi)
    if chi0 <= EPS_SINGULAR or abs(norm) <= EPS_SINGULAR:
        raise SingularBlockError(f"chi0={chi0!r}, g(chi, chi)={norm!r}")
    p0 = (chi0 * dchi[0] - chi[1:] @ dchi[1:]) / norm
    # p_i = g_ab chi^a (chi^b dchi^i - chi^i dchi^b) / (chi0 g(chi, chi))
    pi = (norm * dchi[1:] - chi[1:] * minkowski(chi, dchi)) / (chi0 * norm)
    return np.concatenate([[p0], pi])


def sld_coeffs(c: BlockCoeffs, d: BlockCoeffsDeriv) -> SldCoeffs:
    return SldCoeffs(sld_block(c.chi, d.dchi), sld_block(c.chi_tilde, d.dchi_tilde))


def qfi_block_mixed(chi, dchi) -> float:
    """Closed-form QFI of one full-rank block.

    ``(dchi0)^2/chi0 + [g(chi, dchi)^2 / g(chi, chi) - g(dchi, dchi)] / chi0``
    """
    chi = np.asarray(chi, dtype=float)
    dchi = np.asarray(dchi, dtype=float)
    chi0 = chi[0]
    norm = minkowski(chi, chi)
    if chi0 <= EPS_SINGULAR or abs(norm) <= EPS_SINGULAR:
        raise SingularBlockError(f"chi0={chi0!r}, g(chi, chi)={norm!r}")
    cross = minkowski(chi, dchi)
    return dchi[0] ** 2 / chi0 + (cross**2 / norm - minkowski(dchi, dchi)) / chi0


def qfi_block_sld_sum_printed(chi, dchi) -> float:
    """``p0 dchi0 + sum_{i=0..3} p_i dchi_i`` with the sum starting at zero as printed.

    The ``p0 dchi0`` term is counted twice, so this exceeds ``Tr(d rho L)``
    whenever ``p0 dchi0`` is nonzero.  Kept for the audit only.
    """
    p = sld_block(chi, dchi)
    dchi = np.asarray(dchi, dtype=float)
    return float(p[0] * dchi[0] + p @ dchi)


def qfi_block_tilde_printed(chi, dchi) -> float:
    """Tilde-block expression with the leading term read as ``d(chi0^2) / chi0``."""
    chi = np.asarray(chi, dtype=float)
    dchi = np.asarray(dchi, dtype=float)
    chi0 = chi[0]
    norm = minkowski(chi, chi)
    if chi0 <= EPS_SINGULAR or abs(norm) <= EPS_SINGULAR:
        raise SingularBlockError(f"chi0={chi0!r}, g(chi, chi)={norm!r}")
    cross = minkowski(chi, dchi)
    return 2 * dchi[0] + (cross**2 / norm - minkowski(dchi, dchi)) / chi0


def _check_pure(chi):
    chi0, vec = _split(chi)
    if abs(chi0 * chi0 - vec @ vec) > PURITY_CHECK:
        raise NotPureError(f"chi0^2 - |chi|^2 = {chi0 * chi0 - vec @ vec!r}")


def qfi_block_pure_literal(chi) -> float:
    """The pure-block expression ``chi0^2 + sum chi_i^2`` evaluated as printed.

    It carries no parameter derivative, so it is reported alongside the
    oracle but never used for dispatch.
    """
    _check_pure(chi)
    chi = np.asarray(chi, dtype=float)
    return float(chi @ chi)


def qfi_block_pure_substituted(chi, dchi) -> float:
    """Pure-block expression with every ``chi`` replaced by ``d chi``.

    Equals the true QFI only for a trace-one pure block (the other block
    empty), where the SLD is ``2 d rho``.
    """
    _check_pure(chi)
    dchi = np.asarray(dchi, dtype=float)
    return float(dchi @ dchi)


def _rank_one_parts(chi, dchi):
    chi0, vec = _split(chi)
    dchi0, dvec = _split(dchi)
    n = vec / np.linalg.norm(vec)
    along = n @ dvec
    perp2 = max(dvec @ dvec - along * along, 0.0)
    radial = 0.25 * (dchi0 + along) ** 2
    return chi0, radial, perp2


def qfi_block_pure(chi, dchi) -> float:
    """QFI of a rank-one block ``chi0 |n><n|``.

    Uses the same continuity convention as the spectral oracle: terms whose
    eigenvalue pair sums to zero are dropped.  For a trace-one block whose
    purity persists this equals :func:`qfi_block_pure_substituted`.
    """
    _check_pure(chi)
    if is_zero_block(chi):
        return 0.0
    chi0, radial, perp2 = _rank_one_parts(chi, dchi)
    return (radial + perp2) / chi0


def qfi_block(chi, dchi) -> float:
    if is_zero_block(chi):
        return 0.0
    if is_pure_block(chi):
        return qfi_block_pure(chi, dchi)
    return qfi_block_mixed(chi, dchi)


@dataclass(frozen=True)
class MetrologyReport:
    qfi_block: Optional[float] = None
    qfi_block_tilde: Optional[float] = None
    skew_block: Optional[float] = None
    skew_block_tilde: Optional[float] = None
    pure: bool = False
    pure_tilde: bool = False

    @property
    def qfi_total(self) -> Optional[float]:
        if self.qfi_block is None:
            return None
        return self.qfi_block + self.qfi_block_tilde

    @property
    def skew_total(self) -> Optional[float]:
        if self.skew_block is None:
            return None
        return self.skew_block + self.skew_block_tilde


def qfi_total(c: BlockCoeffs, d: BlockCoeffsDeriv) -> MetrologyReport:
    return MetrologyReport(
        qfi_block=qfi_block(c.chi, d.dchi),
        qfi_block_tilde=qfi_block(c.chi_tilde, d.dchi_tilde),
        pure=is_pure_block(c.chi),
        pure_tilde=is_pure_block(c.chi_tilde),
    )


# --------------------------------------------------------------------------
# Square-root expansion and skew information
# --------------------------------------------------------------------------


class SqrtCoeffs(NamedTuple):
    """``sqrt(rho_b) = t0 G0 + sum_i t_i G_i`` on both blocks.

    The same container holds the parameter derivatives returned by
    :func:`sqrt_coeff_derivs`.
    """

    t0: float
    t: np.ndarray
    t0_tilde: float
    t_tilde: np.ndarray

    def matrix(self) -> np.ndarray:
        return (
            self.t0 * GENERATORS[0]
            + np.tensordot(self.t, GENERATORS[1:], axes=1)
            + self.t0_tilde * GENERATORS_TILDE[0]
            + np.tensordot(self.t_tilde, GENERATORS_TILDE[1:], axes=1)
        )


def sqrt_block(chi):
    chi0, vec = _split(chi)
    disc = max(chi0 * chi0 - vec @ vec, 0.0)
    s = chi0 + np.sqrt(disc)
    if s <= EPS_DEGENERATE:
        raise DegenerateBlockError("zero block has no square-root expansion")
    root = np.sqrt(s)
    return 0.5 * root, 0.5 * vec / root


def sqrt_coeffs(c: BlockCoeffs) -> SqrtCoeffs:
    t0, t = sqrt_block(c.chi)
    u0, u = sqrt_block(c.chi_tilde)
    return SqrtCoeffs(t0, t, u0, u)


def sqrt_block_derivs(chi, dchi):
    chi0, vec = _split(chi)
    dchi0, dvec = _split(dchi)
    disc = chi0 * chi0 - vec @ vec
    if disc <= EPS_SQRT:
        raise SingularSqrtError(f"chi0^2 - |chi|^2 = {disc!r}")
    root_d = np.sqrt(disc)
    s = chi0 + root_d
    root_s = np.sqrt(s)
    inner = vec @ dvec
    dt0 = (root_s * dchi0 - inner / root_s) / (4 * root_d)
    nu = 1 / (root_d * root_s)
    mu = 1 / root_s
    gamma = 1 / (root_d * s * root_s)
    dt = -nu / 4 * vec * dchi0 + mu / 2 * dvec + gamma / 4 * vec * inner
    return dt0, dt


def sqrt_coeff_derivs(c: BlockCoeffs, d: BlockCoeffsDeriv) -> SqrtCoeffs:
    dt0, dt = sqrt_block_derivs(c.chi, d.dchi)
    du0, du = sqrt_block_derivs(c.chi_tilde, d.dchi_tilde)
    return SqrtCoeffs(dt0, dt, du0, du)


def skew_block_mixed(chi, dchi) -> float:
    """``8 [(d t0)^2 + sum_i (d t_i)^2]`` for a full-rank block."""
    dt0, dt = sqrt_block_derivs(chi, dchi)
    return 8 * (dt0 * dt0 + dt @ dt)


def skew_block_pure_literal(chi) -> float:
    """``2 (chi0^2 + sum chi_i^2)`` evaluated as printed (no derivative)."""
    _check_pure(chi)
    chi = np.asarray(chi, dtype=float)
    return 2 * float(chi @ chi)


def skew_block_pure_substituted(chi, dchi) -> float:
    _check_pure(chi)
    dchi = np.asarray(dchi, dtype=float)
    return 2 * float(dchi @ dchi)


def skew_block_pure(chi, dchi) -> float:
    """Skew information of a rank-one block, same convention as :func:`qfi_block_pure`.

    ``[(dchi0 + n.dchi)^2 / 4 + 2 |dchi_perp|^2] / chi0``
    """
    _check_pure(chi)
    if is_zero_block(chi):
        return 0.0
    chi0, radial, perp2 = _rank_one_parts(chi, dchi)
    return (radial + 2 * perp2) / chi0


def skew_block(chi, dchi) -> float:
    if is_zero_block(chi):
        return 0.0
    if is_pure_block(chi):
        return skew_block_pure(chi, dchi)
    return skew_block_mixed(chi, dchi)


def skew_total(c: BlockCoeffs, d: BlockCoeffsDeriv) -> MetrologyReport:
    return MetrologyReport(
        skew_block=skew_block(c.chi, d.dchi),
        skew_block_tilde=skew_block(c.chi_tilde, d.dchi_tilde),
        pure=is_pure_block(c.chi),
        pure_tilde=is_pure_block(c.chi_tilde),
    )


def metrology_report(c: BlockCoeffs, d: BlockCoeffsDeriv) -> MetrologyReport:
    q = qfi_total(c, d)
    s = skew_total(c, d)
    return MetrologyReport(
        q.qfi_block, q.qfi_block_tilde, s.skew_block, s.skew_block_tilde, q.pure, q.pure_tilde
    )


def concurrence_blocks(c: BlockCoeffs) -> float:
    """Wootters concurrence of an X-state from its block four-vectors.

    Each coherence competes against the geometric mean of the populations in
    the other block: ``|rho14| = |chi_perp| / 2`` and ``rho22 rho33 =
    (chi~0^2 - chi~3^2) / 4``.
    """
    chi = np.asarray(c.chi, dtype=float)
    cht = np.asarray(c.chi_tilde, dtype=float)
    coh = np.hypot(chi[1], chi[2])
    coh_t = np.hypot(cht[1], cht[2])
    pop = np.sqrt(max(chi[0] ** 2 - chi[3] ** 2, 0.0))
    pop_t = np.sqrt(max(cht[0] ** 2 - cht[3] ** 2, 0.0))
    return float(max(0.0, coh - pop_t, coh_t - pop))

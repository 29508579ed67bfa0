"""Phase damping, depolarizing and amplitude damping acting on both qubits.

The same single-qubit channel with probability ``p`` (survival ``s = 1 - p``)
acts independently on each qubit, so the two-qubit Kraus operators are
``K_i (x) K_j``.  In correlation-matrix form the map is ``T -> W T W^t`` with
``W[a, b] = Tr(Phi^dag(sigma_a) sigma_b) / 2``.

Basis convention: ``sigma_z |0> = |0>``.  The amplitude damping operators
``sqrt(s)|0><0| + |1><1|`` and ``sqrt(p)|1><0|`` move population from
``|0>`` to ``|1>``, so its fixed point is ``|1>`` (``|11>`` for two qubits).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDensityMatrixError
from .oracle import check_density_matrix
from .state_core import PAULI, BlockCoeffs, BlockCoeffsDeriv, FanoBloch

_I2 = PAULI[0]


class ChannelKind(enum.Enum):
    PHASE_DAMPING = "pdc"
    DEPOLARIZING = "dpc"
    AMPLITUDE_DAMPING = "adc"


@dataclass(frozen=True)
class Channel:
    kind: ChannelKind
    p: float

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, ChannelKind) else ChannelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        p = float(self.p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"decoherence probability {p!r} outside [0, 1]")
        object.__setattr__(self, "p", p)

    @property
    def s(self) -> float:
        return 1.0 - self.p


def phase_damping(p: float) -> Channel:
    return Channel(ChannelKind.PHASE_DAMPING, p)


def depolarizing(p: float) -> Channel:
    return Channel(ChannelKind.DEPOLARIZING, p)


def amplitude_damping(p: float) -> Channel:
    return Channel(ChannelKind.AMPLITUDE_DAMPING, p)


def kraus_set(ch: Channel) -> tuple:
    p, s = ch.p, ch.s
    if ch.kind is ChannelKind.PHASE_DAMPING:
        return (
            np.sqrt(1 - p) * _I2,
            np.sqrt(p / 4) * (_I2 + PAULI[3]),
            np.sqrt(p / 4) * (_I2 - PAULI[3]),
        )
    if ch.kind is ChannelKind.DEPOLARIZING:
        return (
            np.sqrt(1 - 3 * p / 4) * _I2,
            np.sqrt(p / 4) * PAULI[1],
            np.sqrt(p / 4) * PAULI[2],
            np.sqrt(p / 4) * PAULI[3],
        )
    return (
        np.array([[np.sqrt(s), 0], [0, 1]], dtype=complex),
        np.sqrt(p) * np.array([[0, 0], [1, 0]], dtype=complex),
    )


def completeness(kraus) -> np.ndarray:
    """``sum K^dag K``; the identity for a trace-preserving set."""
    return sum(k.conj().T @ k for k in kraus)


def completeness_reversed(kraus) -> np.ndarray:
    """``sum K K^dag``; the identity only for unital channels."""
    return sum(k @ k.conj().T for k in kraus)


def two_qubit_kraus(ch: Channel) -> np.ndarray:
    ks = kraus_set(ch)
    return np.array([np.kron(a, b) for a in ks for b in ks])


def apply_channel_kraus(ch: Channel, rho, validate: bool = True) -> np.ndarray:
    """``sum_ij (K_i (x) K_j) rho (K_i (x) K_j)^dag``; accepts stacks of 4x4 matrices."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (4, 4):
        raise InvalidDensityMatrixError(f"expected 4x4 matrices, got {rho.shape}")
    if validate:
        check_density_matrix(rho)
    k = two_qubit_kraus(ch)
    return np.einsum("kab,...bc,kdc->...ad", k, rho, k.conj())


def transfer_matrix(ch: Channel) -> np.ndarray:
    ks = kraus_set(ch)
    w = np.empty((4, 4))
    for a in range(4):
        dual = sum(k.conj().T @ PAULI[a] @ k for k in ks)
        for b in range(4):
            w[a, b] = 0.5 * np.trace(dual @ PAULI[b]).real
    return w


def evolve_fano_bloch(ch: Channel, fb: FanoBloch) -> FanoBloch:
    w = transfer_matrix(ch)
    return FanoBloch(w @ fb.t @ w.T)


def printed_evolved_fano_bloch(ch: Channel, fb: FanoBloch) -> FanoBloch:
    """The evolved correlation matrices exactly as published for each channel."""
    t = fb.t
    p, s = ch.p, ch.s
    out = np.zeros((4, 4))
    out[0, 0] = t[0, 0]
    if ch.kind is ChannelKind.AMPLITUDE_DAMPING:
        out[1:3, 1:3] = s * t[1:3, 1:3]
        out[0, 3] = s * t[0, 3] - p * t[0, 0]
        out[3, 0] = s * t[3, 0] - p * t[0, 0]
        out[3, 3] = p * p * t[0, 0] - s * p * (t[3, 0] + t[0, 3]) + s * s * t[3, 3]
        return FanoBloch(out)
    out[1:3, 1:3] = s * s * t[1:3, 1:3]
    if ch.kind is ChannelKind.PHASE_DAMPING:
        out[0, 3], out[3, 0], out[3, 3] = t[0, 3], t[3, 0], t[3, 3]
    else:
        out[0, 3], out[3, 0], out[3, 3] = s * t[0, 3], s * t[3, 0], s * s * t[3, 3]
    return FanoBloch(out)


class EvolvedCoeffs(BlockCoeffs):
    """Block four-vectors of an evolved state (``Lambda``, ``Lambda_tilde``)."""

    @property
    def lam(self):
        return self.chi

    @property
    def lam_tilde(self):
        return self.chi_tilde


def _evolve(ch: Channel, chi, chi_t, printed: bool):
    c0, c1, c2, c3 = chi
    t0, t1, t2, t3 = chi_t
    p, s = ch.p, ch.s
    if ch.kind is ChannelKind.PHASE_DAMPING:
        lam = [c0, s * s * c1, s * s * c2, c3]
        lam_t = [t0, s * s * t1, s * s * t2, t3]
    elif ch.kind is ChannelKind.DEPOLARIZING:
        lam0 = 0.5 * ((c0 + t0) + s * s * (c0 - t0))
        lam0_t = 0.5 * ((c0 + t0) - s * s * (c0 - t0))
        if printed:
            # As printed: s^2 on the third component, untilded chi in the tilde list.
            lam = [lam0, s * s * c1, s * s * c2, s * s * c3]
            lam_t = [lam0_t, s * s * c1, s * s * c2, s * s * c3]
        else:
            lam = [lam0, s * s * c1, s * s * c2, s * c3]
            lam_t = [lam0_t, s * s * t1, s * s * t2, s * t3]
    else:
        lam = [
            0.5 * ((1 + p * p + s * s) * c0 - 2 * s * p * c3 + (1 + p * p - s * s) * t0),
            s * c1,
            s * c2,
            s * c3 - p * (c0 + t0),
        ]
        lam_t = [
            0.5 * ((1 - p * p - s * s) * c0 + 2 * s * p * c3 + (1 - p * p + s * s) * t0),
            s * t1,
            s * t2,
            s * t3,
        ]
    return lam, lam_t


def evolved_block_coeffs(ch: Channel, c: BlockCoeffs, printed: bool = False) -> EvolvedCoeffs:
    """Block four-vectors after the channel.

    ``printed=True`` reproduces the depolarizing lists exactly as published,
    which disagree with ``W T W^t`` in the third component and in the tilde
    block; the default is the form consistent with the transfer matrix.
    """
    lam, lam_t = _evolve(ch, c.chi, c.chi_tilde, printed)
    return EvolvedCoeffs(lam, lam_t)


def evolved_block_derivs(ch: Channel, d: BlockCoeffsDeriv) -> BlockCoeffsDeriv:
    """The evolution is linear in the block coefficients, so derivatives map the same way."""
    lam, lam_t = _evolve(ch, d.dchi, d.dchi_tilde, printed=False)
    return BlockCoeffsDeriv(lam, lam_t)

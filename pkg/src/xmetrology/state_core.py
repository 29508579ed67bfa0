"""Two-qubit X-states and their three equivalent coordinate systems.

An X-state is stored by its matrix elements in the computational basis
``{|00>, |01>, |10>, |11>}``::

    [[d1,   0,    0,    a14],
     [0,    d2,   a23,  0  ],
     [0,    a23*, d3,   0  ],
     [a14*, 0,    0,    d4 ]]

The same state can be written through its Fano-Bloch correlation matrix
``T[a, b] = Tr(rho sigma_a (x) sigma_b)`` or, after splitting the matrix into
the ``{|00>, |11>}`` and ``{|01>, |10>}`` blocks, through two Bloch-like
four-vectors ``chi`` and ``chi_tilde``::

    rho = 1/2 sum_a chi[a] G[a]  (+)  1/2 sum_a chi_tilde[a] G~[a]

with ``G`` the block generators below (identity, sigma_x, sigma_y, sigma_z
embedded in each block).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NonXSupportError, NotPositiveError, OutOfDomainError

TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-12
SUPPORT_TOL = 1e-10

PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

# Correlation-matrix slots that may be nonzero for an X-state.
X_SUPPORT = ((0, 0), (3, 3), (3, 0), (0, 3), (1, 1), (2, 2), (1, 2), (2, 1))


def _embed(block, i, j):
    """Place a 2x2 operator on the two-dimensional subspace spanned by |i>, |j>."""
    out = np.zeros((4, 4), dtype=complex)
    out[np.ix_([i, j], [i, j])] = block
    return out


GENERATORS = np.array([_embed(s, 0, 3) for s in PAULI])
GENERATORS_TILDE = np.array([_embed(s, 1, 2) for s in PAULI])


@dataclass(frozen=True)
class XState:
    """Matrix-element form of a two-qubit X-state.

    Construction validates unit trace and positivity; an invalid set of
    elements raises :class:`NotPositiveError`.
    """

    d1: float
    d2: float
    d3: float
    d4: float
    a14: complex = 0j
    a23: complex = 0j

    def __post_init__(self):
        for name in ("d1", "d2", "d3", "d4"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "a14", complex(self.a14))
        object.__setattr__(self, "a23", complex(self.a23))
        d = (self.d1, self.d2, self.d3, self.d4)
        if not all(np.isfinite(d)) or not np.isfinite(self.a14) or not np.isfinite(self.a23):
            raise NotPositiveError("non-finite matrix element")
        if abs(sum(d) - 1.0) > TRACE_TOL:
            raise NotPositiveError(f"trace {sum(d)!r} differs from 1")
        if min(d) < -POSITIVITY_TOL:
            raise NotPositiveError(f"negative population {min(d)!r}")
        if self.d1 * self.d4 < abs(self.a14) ** 2 - POSITIVITY_TOL:
            raise NotPositiveError("d1*d4 < |a14|^2")
        if self.d2 * self.d3 < abs(self.a23) ** 2 - POSITIVITY_TOL:
            raise NotPositiveError("d2*d3 < |a23|^2")

    def matrix(self) -> np.ndarray:
        m = np.diag(np.array([self.d1, self.d2, self.d3, self.d4], dtype=complex))
        m[0, 3], m[3, 0] = self.a14, np.conj(self.a14)
        m[1, 2], m[2, 1] = self.a23, np.conj(self.a23)
        return m

    @classmethod
    def from_matrix(cls, m, tol: float = SUPPORT_TOL) -> "XState":
        """Read an X-state off a 4x4 matrix, rejecting weight outside the X."""
        m = np.asarray(m, dtype=complex)
        mask = np.ones((4, 4), dtype=bool)
        for i in range(4):
            mask[i, i] = mask[i, 3 - i] = False
        if np.max(np.abs(m[mask]), initial=0.0) > tol:
            raise NonXSupportError("matrix has entries outside the X pattern")
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise NotPositiveError("matrix is not Hermitian")
        return cls(m[0, 0].real, m[1, 1].real, m[2, 2].real, m[3, 3].real, m[0, 3], m[1, 2])

    @classmethod
    def maximally_mixed(cls) -> "XState":
        return cls(0.25, 0.25, 0.25, 0.25)


@dataclass(frozen=True)
class FanoBloch:
    """4x4 real correlation matrix, rows/columns over (sigma_0, sigma_x, sigma_y, sigma_z)."""

    t: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        if t.shape != (4, 4):
            raise ValueError(f"correlation matrix must be 4x4, got {t.shape}")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    def __getitem__(self, idx):
        return self.t[idx]


@dataclass(frozen=True)
class BlockCoeffs:
    """Block four-vectors ``chi`` (|00>,|11> block) and ``chi_tilde`` (|01>,|10> block)."""

    chi: np.ndarray
    chi_tilde: np.ndarray

    def __post_init__(self):
        for name in ("chi", "chi_tilde"):
            v = np.array(getattr(self, name), dtype=float)
            if v.shape != (4,):
                raise ValueError(f"{name} must have four components")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    def matrix(self) -> np.ndarray:
        """Reassemble the 4x4 matrix from the generator expansion of both blocks."""
        return 0.5 * (
            np.tensordot(self.chi, GENERATORS, axes=1)
            + np.tensordot(self.chi_tilde, GENERATORS_TILDE, axes=1)
        )

    def blocks(self):
        return self.chi, self.chi_tilde


@dataclass(frozen=True)
class BlockCoeffsDeriv:
    """Derivatives of :class:`BlockCoeffs` with respect to the estimated parameter."""

    dchi: np.ndarray
    dchi_tilde: np.ndarray

    def __post_init__(self):
        for name in ("dchi", "dchi_tilde"):
            v = np.array(getattr(self, name), dtype=float)
            if v.shape != (4,):
                raise ValueError(f"{name} must have four components")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    def blocks(self):
        return self.dchi, self.dchi_tilde


def to_fano_bloch(s: XState) -> FanoBloch:
    r11, r22, r33, r44 = s.d1, s.d2, s.d3, s.d4
    r14, r41 = s.a14, np.conj(s.a14)
    r23, r32 = s.a23, np.conj(s.a23)
    t = np.zeros((4, 4))
    t[0, 0] = r11 + r44 + r22 + r33
    t[3, 3] = r11 + r44 - r22 - r33
    t[3, 0] = r11 - r44 + r22 - r33
    t[0, 3] = r11 - r44 - r22 + r33
    t[1, 1] = (r14 + r41 + r32 + r23).real
    t[2, 2] = (-r14 - r41 + r23 + r32).real
    t[1, 2] = (1j * (r14 - r41 - r23 + r32)).real
    t[2, 1] = (1j * (r14 - r41 + r23 - r32)).real
    return FanoBloch(t)


def check_x_support(t, tol: float = SUPPORT_TOL) -> None:
    t = np.asarray(t)
    mask = np.ones((4, 4), dtype=bool)
    for ij in X_SUPPORT:
        mask[ij] = False
    if np.max(np.abs(t[mask]), initial=0.0) > tol:
        raise NonXSupportError("correlation matrix has weight outside the X pattern")


def from_fano_bloch(fb: FanoBloch) -> XState:
    t = fb.t if isinstance(fb, FanoBloch) else np.asarray(fb, dtype=float)
    check_x_support(t)
    d1 = (t[0, 0] + t[3, 3] + t[3, 0] + t[0, 3]) / 4
    d2 = (t[0, 0] - t[3, 3] + t[3, 0] - t[0, 3]) / 4
    d3 = (t[0, 0] - t[3, 3] - t[3, 0] + t[0, 3]) / 4
    d4 = (t[0, 0] + t[3, 3] - t[3, 0] - t[0, 3]) / 4
    a14 = complex(t[1, 1] - t[2, 2], -(t[1, 2] + t[2, 1])) / 4
    a23 = complex(t[1, 1] + t[2, 2], t[1, 2] - t[2, 1]) / 4
    return XState(d1, d2, d3, d4, a14, a23)


def block_coeffs_from_fano_bloch(fb: FanoBloch) -> BlockCoeffs:
    t = fb.t
    chi = [
        (t[0, 0] + t[3, 3]) / 2,
        (t[1, 1] - t[2, 2]) / 2,
        (t[1, 2] + t[2, 1]) / 2,
        (t[3, 0] + t[0, 3]) / 2,
    ]
    chi_tilde = [
        (t[0, 0] - t[3, 3]) / 2,
        (t[1, 1] + t[2, 2]) / 2,
        (t[2, 1] - t[1, 2]) / 2,
        (t[3, 0] - t[0, 3]) / 2,
    ]
    return BlockCoeffs(chi, chi_tilde)


def block_coeffs(s: XState) -> BlockCoeffs:
    return block_coeffs_from_fano_bloch(to_fano_bloch(s))


def block_coeffs_of_matrix(m) -> BlockCoeffs:
    """Linear read-out of the block four-vectors from any X-shaped 4x4 matrix.

    Unlike :func:`block_coeffs` this does not validate, so it also applies to
    tangent matrices such as ``d rho / d theta``.
    """
    m = np.asarray(m, dtype=complex)
    chi = [
        (m[0, 0] + m[3, 3]).real,
        2 * m[0, 3].real,
        -2 * m[0, 3].imag,
        (m[0, 0] - m[3, 3]).real,
    ]
    chi_tilde = [
        (m[1, 1] + m[2, 2]).real,
        2 * m[1, 2].real,
        -2 * m[1, 2].imag,
        (m[1, 1] - m[2, 2]).real,
    ]
    return BlockCoeffs(chi, chi_tilde)


def from_block_coeffs(c: BlockCoeffs) -> XState:
    return XState.from_matrix(c.matrix())


@dataclass(frozen=True)
class ParametrizedFamily:
    """A one-parameter family ``theta -> XState`` on a closed interval.

    ``derivative``, when given, returns ``d rho / d theta`` as a 4x4 matrix and
    is used instead of finite differences.
    """

    state: Callable[[float], XState]
    interval: tuple = (0.0, 1.0)
    derivative: Optional[Callable[[float], np.ndarray]] = None
    step: float = 1e-5
    richardson: bool = False

    def __call__(self, theta: float) -> XState:
        lo, hi = self.interval
        if not lo <= theta <= hi:
            raise OutOfDomainError(f"theta={theta!r} outside [{lo}, {hi}]")
        return self.state(theta)

    def matrix(self, theta: float) -> np.ndarray:
        return self(theta).matrix()

    def coeffs(self, theta: float) -> BlockCoeffs:
        return block_coeffs(self(theta))


def _central(fn, theta, h):
    plus, minus = fn(theta + h), fn(theta - h)
    return (plus - minus) / (2 * h)


def family_derivative(f: ParametrizedFamily, theta: float) -> BlockCoeffsDeriv:
    lo, hi = f.interval
    if f.derivative is not None:
        if not lo <= theta <= hi:
            raise OutOfDomainError(f"theta={theta!r} outside [{lo}, {hi}]")
        d = block_coeffs_of_matrix(f.derivative(theta))
        return BlockCoeffsDeriv(d.chi, d.chi_tilde)

    h = f.step
    if not (lo < theta - h and theta + h < hi):
        raise OutOfDomainError(f"stencil theta +/- {h} leaves [{lo}, {hi}]")

    def vec(x):
        c = f.coeffs(x)
        return np.concatenate([c.chi, c.chi_tilde])

    d = _central(vec, theta, h)
    if f.richardson:
        d = (4 * _central(vec, theta, h / 2) - d) / 3
    return BlockCoeffsDeriv(d[:4], d[4:])


def random_xstate(rng: np.random.Generator, floor: float = 0.0) -> XState:
    """Draw a random valid X-state.

    ``floor`` mixes in the maximally mixed state so every eigenvalue is at
    least ``floor / 4``.
    """
    d = rng.dirichlet(np.ones(4))
    r14 = np.sqrt(d[0] * d[3]) * np.sqrt(rng.uniform())
    r23 = np.sqrt(d[1] * d[2]) * np.sqrt(rng.uniform())
    a14 = r14 * np.exp(2j * np.pi * rng.uniform())
    a23 = r23 * np.exp(2j * np.pi * rng.uniform())
    d = (1 - floor) * d + floor / 4
    d[3] = 1.0 - d[0] - d[1] - d[2]
    return XState(*d, (1 - floor) * a14, (1 - floor) * a23)


def linear_family(a: XState, b: XState) -> ParametrizedFamily:
    """Convex path ``(1 - theta) a + theta b`` on [0, 1] with its exact derivative."""
    ma, mb = a.matrix(), b.matrix()
    diff = mb - ma

    def state(theta):
        return XState.from_matrix((1 - theta) * ma + theta * mb)

    return ParametrizedFamily(state, (0.0, 1.0), derivative=lambda theta: diff)

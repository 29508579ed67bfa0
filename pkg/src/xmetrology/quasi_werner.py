"""Quasi-Werner states built on superposed two-mode coherent states.

``rho(psi_pm, q) = (1 - q) 1/4 + q |psi_pm><psi_pm|`` written in the
even/odd coherent-state qubit basis ``{|+a,+b>, |+a,-b>, |-a,+b>, |-a,-b>}``.
The estimated parameter throughout is the mixing weight ``q``.

Besides the states themselves this module carries the published closed
forms for QFI, skew information and concurrence under the three channels.
They are evaluated verbatim, one named function per auxiliary symbol, so a
wrong expression can be pinned to a single function when compared against
the oracle.  :func:`block_closed_forms` gives the values from the general
block-coefficient pipeline instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import metrology, oracle
from .channels import (
    Channel,
    ChannelKind,
    apply_channel_kraus,
    evolved_block_coeffs,
    evolved_block_derivs,
)
from .errors import FormulaDomainError, XMetrologyError
from .state_core import (
    BlockCoeffs,
    BlockCoeffsDeriv,
    FanoBloch,
    ParametrizedFamily,
    XState,
    block_coeffs,
    block_coeffs_of_matrix,
)

_SIGN_NAMES = {"+": 1, "plus": 1, "-": -1, "minus": -1}


def parse_sign(sign) -> int:
    if isinstance(sign, str):
        try:
            return _SIGN_NAMES[sign.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown sign {sign!r}") from None
    if sign in (1, -1):
        return int(sign)
    raise ValueError(f"unknown sign {sign!r}")


def sign_label(sign: int) -> str:
    return "plus" if sign > 0 else "minus"


@dataclass(frozen=True)
class QuasiWernerParams:
    alpha: float
    beta: float
    q: float
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sign", parse_sign(self.sign))
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("coherent amplitudes must be positive")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"mixing parameter q={self.q!r} outside [0, 1]")

    def with_q(self, q: float) -> "QuasiWernerParams":
        return QuasiWernerParams(self.alpha, self.beta, q, self.sign)


@dataclass(frozen=True)
class NormalizationPack:
    chi_a: float
    chi_b: float
    n_plus: float
    n_minus: float
    Np_a: float
    Nm_a: float
    Np_b: float
    Nm_b: float

    @property
    def product(self) -> float:
        """``N+^a N-^a N+^b N-^b``, the common denominator of the coherences."""
        return self.Np_a * self.Nm_a * self.Np_b * self.Nm_b

    def n(self, sign: int) -> float:
        return self.n_plus if sign > 0 else self.n_minus


def normalizations(p: QuasiWernerParams) -> NormalizationPack:
    return normalizations_ab(p.alpha, p.beta)


def normalizations_ab(alpha: float, beta: float) -> NormalizationPack:
    chi_a = math.exp(-abs(alpha) ** 2)
    chi_b = math.exp(-abs(beta) ** 2)
    cc = chi_a**2 * chi_b**2
    return NormalizationPack(
        chi_a=chi_a,
        chi_b=chi_b,
        n_plus=(2 * (1 + cc)) ** -0.5,
        n_minus=(2 * (1 - cc)) ** -0.5,
        Np_a=(2 * (1 + chi_a**2)) ** -0.5,
        Nm_a=(2 * (1 - chi_a**2)) ** -0.5,
        Np_b=(2 * (1 + chi_b**2)) ** -0.5,
        Nm_b=(2 * (1 - chi_b**2)) ** -0.5,
    )


# --------------------------------------------------------------------------
# States
# --------------------------------------------------------------------------


def density_matrix(p: QuasiWernerParams) -> XState:
    """The printed 4x4 matrices for both signs."""
    k = normalizations(p)
    q = p.q
    n2 = k.n(p.sign) ** 2
    coh = q * n2 / k.product / 4
    if p.sign > 0:
        d1 = (1 + q * (n2 / (k.Np_a * k.Np_b) ** 2 - 1)) / 4
        d4 = (1 + q * (n2 / (k.Nm_a * k.Nm_b) ** 2 - 1)) / 4
        return XState(d1, (1 - q) / 4, (1 - q) / 4, d4, coh, 0.0)
    d2 = (1 + q * (n2 / (k.Np_a * k.Nm_b) ** 2 - 1)) / 4
    d3 = (1 + q * (n2 / (k.Nm_a * k.Np_b) ** 2 - 1)) / 4
    return XState((1 - q) / 4, d2, d3, (1 - q) / 4, 0.0, coh)


def pure_projector(alpha: float, beta: float, sign) -> np.ndarray:
    """``|psi_pm><psi_pm|``, i.e. the density matrix at ``q = 1``."""
    return density_matrix(QuasiWernerParams(alpha, beta, 1.0, sign)).matrix()


def printed_fano_bloch(p: QuasiWernerParams) -> FanoBloch:
    """Correlation matrix from the printed T list, signs kept as published."""
    k = normalizations(p)
    q = p.q
    n2 = k.n(p.sign) ** 2
    t = np.zeros((4, 4))
    t[0, 0] = 1.0
    if p.sign > 0:
        off = q * n2 / (2 * k.product)
        diag = q * n2 / 4 * (1 / (k.Np_a * k.Np_b) ** 2 - 1 / (k.Nm_a * k.Nm_b) ** 2)
        t[1, 1], t[2, 2], t[3, 3] = -off, off, q
        t[3, 0] = t[0, 3] = diag
    else:
        off = q * n2 / (2 * k.product)
        diag = q * n2 / 4 * (1 / (k.Np_a * k.Nm_b) ** 2 - 1 / (k.Nm_a * k.Np_b) ** 2)
        t[1, 1], t[2, 2], t[3, 3] = off, off, -q
        t[3, 0], t[0, 3] = diag, -diag
    return FanoBloch(t)


def printed_block_coeffs(p: QuasiWernerParams) -> BlockCoeffs:
    """The printed nonvanishing chi and chi~ lists; unlisted components are zero."""
    k = normalizations(p)
    q = p.q
    n2 = k.n(p.sign) ** 2
    chi = np.zeros(4)
    cht = np.zeros(4)
    chi[0] = (1 + p.sign * q) / 2
    cht[0] = (1 - p.sign * q) / 2
    if p.sign > 0:
        chi[1] = q * n2 / (2 * k.product)
        chi[3] = q * n2 / 4 * (1 / (k.Np_a * k.Np_b) ** 2 - 1 / (k.Nm_a * k.Nm_b) ** 2)
    else:
        cht[1] = q * n2 / (2 * k.product)
        cht[3] = q * n2 / 4 * (1 / (k.Np_a * k.Nm_b) ** 2 - 1 / (k.Nm_a * k.Np_b) ** 2)
    return BlockCoeffs(chi, cht)


def q_family(alpha: float, beta: float, sign, channel: Optional[Channel] = None) -> ParametrizedFamily:
    """The q-family, optionally pushed through a channel, with its exact derivative.

    Both the state and the channel are linear in ``q``, so
    ``d rho / d q = Phi(P) - Phi(1/4)``.
    """
    proj = pure_projector(alpha, beta, sign)
    mixed = np.eye(4, dtype=complex) / 4
    if channel is not None:
        proj = apply_channel_kraus(channel, proj)
        mixed = apply_channel_kraus(channel, mixed)
    diff = proj - mixed

    def state(q):
        return XState.from_matrix(mixed + q * diff)

    return ParametrizedFamily(state, (0.0, 1.0), derivative=lambda q: diff)


def concurrence_closed(p: QuasiWernerParams) -> float:
    k = normalizations(p)
    prod = k.product
    value = (p.q * k.n(p.sign) ** 2 - (1 - p.q) * prod) / (2 * prod)
    return max(0.0, value)


# --------------------------------------------------------------------------
# Published auxiliary symbols.  Arguments: k = normalizations, sign, q, s.
# --------------------------------------------------------------------------


def _root(x: float, name: str) -> float:
    if x < 0:
        raise FormulaDomainError(f"{name}: negative radicand {x!r}")
    return math.sqrt(x)


def _div(a: float, b: float, name: str) -> float:
    if b == 0:
        raise FormulaDomainError(f"{name}: zero denominator")
    return a / b


def _power(x: float, e: float, name: str) -> float:
    if x < 0 or (x == 0 and e < 0):
        raise FormulaDomainError(f"{name}: base {x!r} outside the real domain of x**{e}")
    return x**e


def _p2(k: NormalizationPack) -> float:
    return k.product**2


def _w(k: NormalizationPack, sign: int) -> float:
    """``n^4 / (2 (N+a N+b N-a N-b)^2)``, recurring in the skew expressions."""
    return k.n(sign) ** 4 / (2 * _p2(k))


def _m2_minus_p2(k: NormalizationPack) -> float:
    """``(N-a N-b)^2 - (N+a N+b)^2``."""
    return (k.Nm_a * k.Nm_b) ** 2 - (k.Np_a * k.Np_b) ** 2


def kappa(k: NormalizationPack, sign: int) -> float:
    if sign > 0:
        num = (k.Nm_a * k.Nm_b) ** 2 - (k.Np_a * k.Np_b) ** 2
    else:
        num = (k.Nm_a * k.Np_b) ** 2 - (k.Np_a * k.Nm_b) ** 2
    return k.n(sign) ** 2 * num / (4 * _p2(k))


def gamma_pdc(k: NormalizationPack, sign: int, s: float) -> float:
    return 1 - s**4 * k.n(sign) ** 4 / _p2(k) - 4 * kappa(k, sign) ** 2


def pdc_A(q: float, gamma: float) -> float:
    inner = 1 + 2 * q + q * q * gamma
    root = _root(inner, "A")
    return math.sqrt(2) * _power(1 + q + root, -0.5, "A") * _power(inner, -0.5, "A")


def pdc_B(q: float, gamma: float) -> float:
    root = _root(1 + 2 * q + q * q * gamma, "B")
    return math.sqrt(2) * _power(1 + q + root, -0.5, "B")


def pdc_C(q: float, gamma: float) -> float:
    inner = 1 + 2 * q + q * q * gamma
    root = _root(inner, "C")
    return 2 * math.sqrt(2) * _power(1 + q + root, -1.5, "C") * _power(inner, -0.5, "C")


def epsilon_dpc(k: NormalizationPack, sign: int) -> float:
    return 1 - k.n(sign) ** 4 / _p2(k) - 4 * kappa(k, sign) ** 2


def dpc_D(q: float, s: float, eps: float) -> float:
    # The inner radicand carries 2q rather than 2qs^2, exactly as published.
    root = _root(1 + 2 * q + q * q * s**4 * eps, "D")
    outer = 1 + 2 * q * s * s + q * q * s**4 * eps
    return math.sqrt(2) * _power(1 + q * s * s + root, -0.5, "D") * _power(outer, -0.5, "D")


def dpc_E(q: float, s: float, eps: float) -> float:
    root = _root(1 + 2 * q * s * s + q * q * s**4 * eps, "E")
    return math.sqrt(2) * _power(1 + q * s * s + root, -0.5, "E")


def dpc_F(q: float, s: float, eps: float) -> float:
    inner = 1 + 2 * q * s * s + q * q * s**4 * eps
    root = _root(inner, "F")
    return 2 * math.sqrt(2) * _power(1 + q * s * s + root, -1.5, "F") * _power(inner, -0.5, "F")


def adc_nu(k: NormalizationPack, s: float) -> float:
    p2 = _p2(k)
    n2 = k.n_plus**2
    return (2 * (1 - s) + s * s) * (2 * s * s * p2 - s * (1 - s) * n2 * _m2_minus_p2(k)) / (8 * p2)


def adc_mu(k: NormalizationPack, q: float, s: float) -> float:
    c = s * s + 2 * (1 - s)
    return _div(2 * q * adc_nu(k, s) + c * c, 2 * c, "mu")


def adc_xi(k: NormalizationPack, s: float) -> float:
    p2 = _p2(k)
    first = _div(2 * adc_nu(k, s), 2 * (1 - s) + s * s, "xi")
    return first + s * s * k.n_plus**2 * (-_m2_minus_p2(k) - 4) / p2


def adc_eta(k: NormalizationPack, s: float) -> float:
    p2 = _p2(k)
    split = (k.Nm_a * k.Np_b) ** 2 - (k.Np_a * k.Nm_b) ** 2
    return s * s / 4 * (s * s - k.n_minus**4 * (1 + split**2) / (p2 * (1 + 4 * p2)))


def adc_Sigma(k: NormalizationPack, s: float) -> float:
    kp = kappa(k, 1)
    return (s * s - 2 * s * (1 - s) * kp) ** 2 - s * s * kp * kp - s * s * k.n_plus**4 / _p2(k)


def adc_R(k: NormalizationPack, q: float, s: float) -> float:
    kp = kappa(k, 1)
    return q * s * s * k.n_plus**2 / (4 * _p2(k)) + kp * (q * s * s * kp + s * (s - 1))


def adc_Gamma(k: NormalizationPack, q: float, s: float) -> float:
    kp = kappa(k, 1)
    return 0.25 * (s * s - 2 * s + 2) * (s * s * (2 * q + 1) - 2 * s + 2) + (2 * s - s * s - 1) * (
        q * s * (1 - s) * kp + 1
    )


def _adc_radical(k: NormalizationPack, q: float, s: float) -> float:
    return _root(4 * adc_Gamma(k, q, s) + q * q * adc_Sigma(k, s), "4 Gamma + q^2 Sigma")


def adc_A(k: NormalizationPack, q: float, s: float) -> float:
    kp = kappa(k, 1)
    rad = _adc_radical(k, q, s)
    inner = 2 * (1 - s) + s * s + q * (s * s - 2 * (1 - s) * kp) + rad
    return 2 * _power(rad, -1.0, "A") * _root(inner, "A")


def adc_B(k: NormalizationPack, q: float, s: float) -> float:
    return adc_A(k, q, s) / 2 * _adc_radical(k, q, s)


def adc_X(k: NormalizationPack, q: float, s: float) -> float:
    kp = kappa(k, 1)
    b = adc_B(k, q, s)
    return 2 * kp * ((1 - s) * (1 - _div(1, b * b, "X")) - q * s * k.n_plus**2 * kp)


def adc_Y(k: NormalizationPack, q: float, s: float) -> float:
    kp = kappa(k, 1)
    return (s * (1 + q * kp) - 1) * (s - 2 * (1 - s) * kp)


def adc_zeta(q: float, s: float) -> float:
    inner = _root((1 - q) * (4 * (1 - s) + s * s * (1 - q)), "zeta")
    return math.sqrt(2) * _power(2 * (1 - s) + s * s * (1 - q) + s * inner, -0.5, "zeta")


def adc_varsigma(q: float, s: float) -> float:
    return s * adc_zeta(q, s) / 2 * _root((1 - q) * (1 - s + s * s * (1 - q)), "varsigma")


def adc_D(k: NormalizationPack, s: float) -> float:
    return s * s - k.n_minus**4 / _p2(k) - 4 * kappa(k, -1) ** 2


def _adc_theta_radicand(k: NormalizationPack, q: float, s: float) -> float:
    return s * s * (2 - s) * (2 * q * s + 2 - s) + q * q * s * s * adc_D(k, s)


def adc_Upsilon(k: NormalizationPack, q: float, s: float) -> float:
    root = _root(_adc_theta_radicand(k, q, s), "Upsilon")
    return math.sqrt(2) * _power(s * (2 + s) - q * s * s + root, -0.5, "Upsilon")


def adc_Theta(k: NormalizationPack, q: float, s: float) -> float:
    return adc_Upsilon(k, q, s) * math.sqrt(2) * _root(_adc_theta_radicand(k, q, s), "Theta")


# --------------------------------------------------------------------------
# Published channel closed forms
# --------------------------------------------------------------------------


def qfi_pdc_printed(p: QuasiWernerParams, s: float) -> float:
    q = p.q
    g = gamma_pdc(normalizations(p), p.sign, s)
    return _div(3 + (2 * q - 1) * g, 2 * (1 - q) * (1 + 2 * q + q * q * g), "F_PDC")


def skew_pdc_printed(p: QuasiWernerParams, s: float) -> float:
    k = normalizations(p)
    q = p.q
    kp = kappa(k, p.sign)
    g = gamma_pdc(k, p.sign, s)
    a, b, c = pdc_A(q, g), pdc_B(q, g), pdc_C(q, g)
    w = s**4 * _w(k, p.sign)
    first = _div(1, 2 * (1 - q), "I_PDC")
    second = a * a / 8 * (b**-2 - q * w + 2 * q * kp * kp) ** 2
    third = (2 * kp * kp + w) * (b - q * a / 4 + q * q * c * w / 4 + q * q * c * kp * kp / 2) ** 2
    return first + second + third


def concurrence_pdc_printed(p: QuasiWernerParams, s: float) -> float:
    k = normalizations(p)
    q = p.q
    return max(0.0, s * s * q * k.n(p.sign) ** 2 / (2 * k.product) - (1 - q) / 2)


def qfi_dpc_printed(p: QuasiWernerParams, s: float) -> float:
    q = p.q
    e = epsilon_dpc(normalizations(p), p.sign)
    first = _div(1, 1 - q * s * s, "F_DPC")
    second = _div(2 + (s * s * q - 1) * e, 1 + 2 * q * s * s + q * q * s**4 * e, "F_DPC")
    return s**4 / 2 * (first + second)


def skew_dpc_printed(p: QuasiWernerParams, s: float) -> float:
    k = normalizations(p)
    q = p.q
    kp = kappa(k, p.sign)
    e = epsilon_dpc(k, p.sign)
    d, ee, f = dpc_D(q, s, e), dpc_E(q, s, e), dpc_F(q, s, e)
    w = _w(k, p.sign)
    first = _div(1, 2 * (1 - s * s * q), "I_DPC")
    second = d * d * s**4 / 8 * (ee**-2 - q * s * s * w + 2 * q * s * s * kp * kp) ** 2
    bracket = ee - q * s * s * d / 4 + q * q * s**4 * w * f / 4 + q * q * s**4 * kp * kp * f / 2
    third = s**4 * (2 * kp * kp + w) * bracket**2
    return first + second + third


def concurrence_dpc_printed(p: QuasiWernerParams, s: float) -> float:
    k = normalizations(p)
    q = p.q
    prod = k.product
    return max(0.0, (s * s * q * k.n(p.sign) ** 2 - (1 - s * s * q) * prod) / (2 * prod))


def qfi_adc_plus_printed(p: QuasiWernerParams, s: float) -> float:
    k = normalizations(p)
    q = p.q
    p2 = _p2(k)
    n2 = k.n_plus**2
    split = _m2_minus_p2(k)
    nu, mu, xi = adc_nu(k, s), adc_mu(k, q, s), adc_xi(k, s)
    c2 = (1 - s + s * s / 2) ** 2
    inner = _div(4 * nu * nu - 4 * c2 * xi, c2 + 2 * q * nu + q * q * xi, "F_ADC+")
    inner += (s * s - s * (1 - s) * n2 * split / (2 * p2)) ** 2
    first = _div(inner, 4 * mu, "F_ADC+")
    num = s * ((1 - s) * n2 * split - 2 * s * p2) ** 2
    den = 4 * p2 * (p2 * (2 - s - 2 * q * s) + (1 - s) * n2 * split)
    return first + _div(num, den, "F_ADC+")


def qfi_adc_minus_printed(p: QuasiWernerParams, s: float) -> float:
    k = normalizations(p)
    q = p.q
    eta = adc_eta(k, s)
    first = _div(
        2 * s * s * (1 - s) + s**4 * (1 - q),
        2 * (1 - q) * (s * s * (1 - q) + 4 * (1 - s)),
        "F_ADC-",
    )
    tail = _div(
        2 * (s**3 * (2 - s * s) + 2 * q * eta) ** 2, s * s * (2 - s * s + 2 * q) + 2 * q * q * eta, "F_ADC-"
    )
    second = _div(s**4 - 2 * eta + tail, s * (2 - s * s) + 2 * s * q, "F_ADC-")
    return first + second


def concurrence_adc_plus_printed(p: QuasiWernerParams, s: float) -> float:
    k = normalizations(p)
    q = p.q
    kp = kappa(k, 1)
    value = s * q * k.n_plus**2 / (2 * k.product) - s * (1 + (1 - s) * q * kp) + s * s / 2 * (1 + q)
    return max(0.0, value)


def concurrence_adc_minus_printed(p: QuasiWernerParams, s: float) -> float:
    k = normalizations(p)
    q = p.q
    root = _root(s * s * (1 - q) * (4 * (1 - s) + s * s * (1 - q)), "C_ADC-")
    return max(0.0, s * q * k.n_minus**2 / (2 * k.product) - root / 2)


def skew_adc_plus_printed(p: QuasiWernerParams, s: float) -> float:
    k = normalizations(p)
    q = p.q
    kp = kappa(k, 1)
    a, b = adc_A(k, q, s), adc_B(k, q, s)
    r, x, y = adc_R(k, q, s), adc_X(k, q, s), adc_Y(k, q, s)
    w = _w(k, 1)
    damp = 2 * (1 - s) * kp - s
    first = a * a * s * s / 8 * (s * b**-2 + x - 2 * q * s * kp * kp - q * s * w) ** 2
    second = _div(s * damp**2, 2 * (2 - s) + 2 * q * damp, "I_ADC+")
    third = s * s * w * (b - q * s * a / 4 * (s - 2 * (1 - s) * kp) + q * b * b * a / 2 * r) ** 2
    fourth = (-s * a * y + s * k.n_plus**2 * b * (2 + q * b * a * r) - 2 * (1 - s) * b * b * a * r) ** 2 / 8
    return first + second + third + fourth


def skew_adc_minus_printed(p: QuasiWernerParams, s: float) -> float:
    k = normalizations(p)
    q = p.q
    km = kappa(k, -1)
    ups, theta = adc_Upsilon(k, q, s), adc_Theta(k, q, s)
    zeta, vs = adc_zeta(q, s), adc_varsigma(q, s)
    w = _w(k, -1)
    first = theta**2 * s**4 / 8 * (ups**-2 - q * w - 2 * q * km * km) ** 2
    second = vs**2 * s**4 / 8 * (_power(zeta, -4.0, "zeta") + (s - 1) ** 2)
    bracket = ups - q * s * s * theta / 4 + q * q * s * s * ups**2 * theta / 2 * (km * km + w / 2)
    third = (s * s * w + 2 * s * s * km * km) * bracket**2
    return first + second + third


# Resolved by name at call time so a patched module attribute takes effect.
PRINTED_FORMS = {
    ("pdc", "qfi", 1): "qfi_pdc_printed",
    ("pdc", "skew", 1): "skew_pdc_printed",
    ("pdc", "concurrence", 1): "concurrence_pdc_printed",
    ("dpc", "qfi", 1): "qfi_dpc_printed",
    ("dpc", "skew", 1): "skew_dpc_printed",
    ("dpc", "concurrence", 1): "concurrence_dpc_printed",
    ("adc", "qfi", 1): "qfi_adc_plus_printed",
    ("adc", "qfi", -1): "qfi_adc_minus_printed",
    ("adc", "skew", 1): "skew_adc_plus_printed",
    ("adc", "skew", -1): "skew_adc_minus_printed",
    ("adc", "concurrence", 1): "concurrence_adc_plus_printed",
    ("adc", "concurrence", -1): "concurrence_adc_minus_printed",
}


def printed_form(kind: str, quantity: str, sign):
    """The published closed form for one (channel, quantity, sign)."""
    sign = parse_sign(sign)
    key = (kind, quantity, sign) if kind == "adc" else (kind, quantity, 1)
    return globals()[PRINTED_FORMS[key]]


def printed_value(p: QuasiWernerParams, ch: Optional[Channel], quantity: str) -> float:
    """Published value; ``ch=None`` means no channel.

    Without a channel the concurrence uses the undamped expression and the
    other two quantities use the phase-damping expressions at ``s = 1``.
    """
    if ch is None:
        if quantity == "concurrence":
            return concurrence_closed(p)
        return printed_form("pdc", quantity, p.sign)(p, 1.0)
    return printed_form(ch.kind.value, quantity, p.sign)(p, ch.s)


# --------------------------------------------------------------------------
# General pipeline and oracle comparison
# --------------------------------------------------------------------------


def evolved_coeffs(p: QuasiWernerParams, ch: Optional[Channel] = None):
    """Block coefficients and their q-derivatives after the channel."""
    rho = density_matrix(p)
    c = block_coeffs(rho)
    proj = pure_projector(p.alpha, p.beta, p.sign)
    dd = block_coeffs_of_matrix(proj - np.eye(4) / 4)
    d = BlockCoeffsDeriv(dd.chi, dd.chi_tilde)
    if ch is not None:
        c = evolved_block_coeffs(ch, c)
        d = evolved_block_derivs(ch, d)
    return c, d


def block_closed_forms(p: QuasiWernerParams, ch: Optional[Channel] = None) -> dict:
    """QFI, skew and concurrence from the block-coefficient formulas."""
    c, d = evolved_coeffs(p, ch)
    rep = metrology.metrology_report(c, d)
    return {
        "qfi": rep.qfi_total,
        "skew": rep.skew_total,
        "concurrence": metrology.concurrence_blocks(c),
    }


QUANTITIES = ("qfi", "skew", "concurrence")


@dataclass(frozen=True)
class ChannelClosedFormReport:
    params: QuasiWernerParams
    channel: Optional[Channel]
    qfi_closed: Optional[float]
    skew_closed: Optional[float]
    concurrence_closed: Optional[float]
    oracle_qfi: float
    oracle_skew: float
    oracle_concurrence: float
    errors: dict = field(default_factory=dict)

    def closed(self, quantity: str) -> Optional[float]:
        return getattr(self, f"{quantity}_closed")

    def oracle(self, quantity: str) -> float:
        return getattr(self, f"oracle_{quantity}")

    def abs_deviation(self, quantity: str) -> Optional[float]:
        value = self.closed(quantity)
        return None if value is None else abs(value - self.oracle(quantity))

    def rel_deviation(self, quantity: str) -> Optional[float]:
        dev = self.abs_deviation(quantity)
        if dev is None:
            return None
        return dev / max(abs(self.oracle(quantity)), 1e-300)

    @property
    def oracle_only(self) -> bool:
        return any(self.closed(name) is None for name in QUANTITIES)


def oracle_values(p: QuasiWernerParams, ch: Optional[Channel] = None, step: float = oracle.FD_STEP) -> dict:
    fam = q_family(p.alpha, p.beta, p.sign, ch)
    return {
        "qfi": oracle.qfi_oracle(fam, p.q, step=step),
        "skew": oracle.skew_oracle(fam, p.q, step=step),
        "concurrence": float(oracle.concurrence_wootters(fam.matrix(p.q))),
    }


def _closed_forms(p: QuasiWernerParams, ch: Channel, step: float) -> ChannelClosedFormReport:
    values, errors = {}, {}
    for name in QUANTITIES:
        try:
            values[name] = printed_value(p, ch, name)
        except (XMetrologyError, ZeroDivisionError, OverflowError) as exc:
            values[name] = None
            errors[name] = f"{type(exc).__name__}: {exc}"
    ref = oracle_values(p, ch, step)
    return ChannelClosedFormReport(
        p,
        ch,
        values["qfi"],
        values["skew"],
        values["concurrence"],
        ref["qfi"],
        ref["skew"],
        ref["concurrence"],
        errors,
    )


def _require(ch: Channel, kind: ChannelKind):
    if ch.kind is not kind:
        raise ValueError(f"expected a {kind.value} channel, got {ch.kind.value}")


def pdc_closed_forms(p: QuasiWernerParams, ch: Channel, step: float = oracle.FD_STEP):
    _require(ch, ChannelKind.PHASE_DAMPING)
    return _closed_forms(p, ch, step)


def dpc_closed_forms(p: QuasiWernerParams, ch: Channel, step: float = oracle.FD_STEP):
    _require(ch, ChannelKind.DEPOLARIZING)
    return _closed_forms(p, ch, step)


def adc_closed_forms(p: QuasiWernerParams, ch: Channel, step: float = oracle.FD_STEP):
    _require(ch, ChannelKind.AMPLITUDE_DAMPING)
    return _closed_forms(p, ch, step)


# --------------------------------------------------------------------------
# Batched grid evaluation
# --------------------------------------------------------------------------


def _endpoints(alpha, beta, sign, ch: Optional[Channel]):
    proj = pure_projector(alpha, beta, sign)
    mixed = np.eye(4, dtype=complex) / 4
    if ch is not None:
        proj = apply_channel_kraus(ch, proj)
        mixed = apply_channel_kraus(ch, mixed)
    return mixed, proj


def oracle_grid(
    alpha: float,
    beta: float,
    sign,
    qs,
    ch: Optional[Channel] = None,
    step: float = oracle.FD_STEP,
    quantities=QUANTITIES,
) -> dict:
    """Oracle values at many ``q`` for one channel setting, in a few batched calls."""
    qs = np.atleast_1d(np.asarray(qs, dtype=float))
    mixed, proj = _endpoints(alpha, beta, parse_sign(sign), ch)
    diff = proj - mixed

    def fn(x):
        return mixed + np.asarray(x)[:, None, None] * diff

    out = {}
    if "qfi" in quantities:
        out["qfi"] = oracle.qfi_oracle_batch(fn, qs, dfn=lambda x: np.broadcast_to(diff, (len(x), 4, 4)))
    if "skew" in quantities:
        out["skew"] = oracle.skew_oracle_batch(fn, qs, step=step)
    if "concurrence" in quantities:
        out["concurrence"] = oracle.concurrence_wootters(fn(qs))
    return out


def oracle_points(
    alpha: float,
    beta: float,
    sign,
    points,
    step: float = oracle.FD_STEP,
    quantities=QUANTITIES,
) -> dict:
    """Oracle values at arbitrary ``(channel, q)`` pairs, batched into one stack.

    Each pair gets its own endpoints, so one call can cover a whole p-grid.
    """
    sign = parse_sign(sign)
    cache = {}
    mixed, diff, qs = [], [], []
    for ch, q in points:
        if ch not in cache:
            m, pr = _endpoints(alpha, beta, sign, ch)
            cache[ch] = (m, pr - m)
        mixed.append(cache[ch][0])
        diff.append(cache[ch][1])
        qs.append(q)
    mixed, diff, qs = np.array(mixed), np.array(diff), np.array(qs, dtype=float)

    def fn(x):
        return mixed + np.asarray(x)[:, None, None] * diff

    out = {}
    if "qfi" in quantities:
        out["qfi"] = oracle.qfi_oracle_batch(fn, qs, dfn=lambda x: diff)
    if "skew" in quantities:
        out["skew"] = oracle.skew_oracle_batch(fn, qs, step=step)
    if "concurrence" in quantities:
        out["concurrence"] = oracle.concurrence_wootters(fn(qs))
    return out


def closed_value(
    p: QuasiWernerParams, ch: Optional[Channel], quantity: str, mode: str = "general"
) -> float:
    """A single closed-form value, ``nan`` where the expression cannot be evaluated."""
    try:
        if mode == "printed":
            return float(printed_value(p, ch, quantity))
        return float(block_closed_forms(p, ch)[quantity])
    except (XMetrologyError, ZeroDivisionError, OverflowError):
        return float("nan")


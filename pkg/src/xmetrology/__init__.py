"""Closed-form metrology for two-qubit X-states, checked against brute-force oracles.

The main entry points are re-exported here; submodules hold the details:
``state_core`` (representations), ``metrology`` (block-coefficient QFI, skew
information and concurrence), ``channels``, ``quasi_werner``, ``oracle``,
``audit`` and ``sweep``.
"""

from .channels import Channel, ChannelKind, amplitude_damping, depolarizing, phase_damping
from .errors import XMetrologyError
from .metrology import concurrence_blocks, metrology_report, qfi_total, skew_total
from .quasi_werner import QuasiWernerParams, block_closed_forms, density_matrix
from .state_core import (
    BlockCoeffs,
    BlockCoeffsDeriv,
    FanoBloch,
    ParametrizedFamily,
    XState,
    block_coeffs,
    family_derivative,
    to_fano_bloch,
)

__version__ = "0.1.0"

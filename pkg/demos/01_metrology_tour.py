"""A walk through the block-coefficient machinery on one random X-state path.

Run: python3 demos/01_metrology_tour.py
"""

import numpy as np

from xmetrology import metrology, oracle
from xmetrology.state_core import BlockCoeffsDeriv, XState, block_coeffs, block_coeffs_of_matrix, random_xstate, to_fano_bloch

rng = np.random.default_rng(2024)

# %% Two random X-states and the straight line between them.
a = random_xstate(rng, floor=0.1)
b = random_xstate(rng, floor=0.1)
theta = 0.4
rho = (1 - theta) * a.matrix() + theta * b.matrix()
drho = b.matrix() - a.matrix()

state = XState.from_matrix(rho)
print("populations:", np.round([state.d1, state.d2, state.d3, state.d4], 4))
print("coherences: a14 =", np.round(state.a14, 4), " a23 =", np.round(state.a23, 4))

# %% The same state in correlation-matrix and block coordinates.
print("\nT matrix (rows/cols I, X, Y, Z):")
print(np.round(to_fano_bloch(state).t, 4))
c = block_coeffs(state)
dd = block_coeffs_of_matrix(drho)
d = BlockCoeffsDeriv(dd.chi, dd.chi_tilde)
print("chi       =", np.round(c.chi, 4))
print("chi_tilde =", np.round(c.chi_tilde, 4))

# %% Closed forms next to brute force.
rep = metrology.metrology_report(c, d)
f_oracle = oracle.qfi_spectral(rho, drho)
i_oracle = oracle.skew_oracle(lambda x: (1 - x) * a.matrix() + x * b.matrix(), theta)
print(f"\nQFI   closed {rep.qfi_total:.12f}   oracle {f_oracle:.12f}")
print(f"skew  closed {rep.skew_total:.12f}   oracle {i_oracle:.12f}")

# %% The SLD really solves d rho = (rho L + L rho) / 2.
lmat = metrology.sld_coeffs(c, d).matrix()
resid = np.abs(0.5 * (rho @ lmat + lmat @ rho) - drho).max()
print(f"SLD residual: {resid:.1e}")

# %% Where the skew information sits relative to the QFI.
print(f"\nI / F = {rep.skew_total / rep.qfi_total:.4f}  (always between 1 and 2)")
print(f"concurrence: blocks {metrology.concurrence_blocks(c):.6f}, Wootters {oracle.concurrence_wootters(rho):.6f}")

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import x_states
from xmetrology.errors import NonXSupportError, NotPositiveError, OutOfDomainError
from xmetrology.state_core import (
    BlockCoeffs,
    FanoBloch,
    ParametrizedFamily,
    XState,
    block_coeffs,
    block_coeffs_from_fano_bloch,
    block_coeffs_of_matrix,
    family_derivative,
    from_block_coeffs,
    from_fano_bloch,
    linear_family,
    random_xstate,
    to_fano_bloch,
)
from xmetrology.state_core import PAULI


def bell_phi_plus():
    return XState(0.5, 0, 0, 0.5, 0.5, 0)


@given(x_states())
@settings(max_examples=200, deadline=None)
def test_fano_bloch_roundtrip(s):
    back = from_fano_bloch(to_fano_bloch(s))
    assert np.allclose(back.matrix(), s.matrix(), atol=1e-12)


@given(x_states())
@settings(max_examples=200, deadline=None)
def test_block_roundtrip_and_paths_agree(s):
    c = block_coeffs(s)
    assert np.allclose(from_block_coeffs(c).matrix(), s.matrix(), atol=1e-12)
    c2 = block_coeffs_of_matrix(s.matrix())
    assert np.allclose(c.chi, c2.chi, atol=1e-12)
    assert np.allclose(c.chi_tilde, c2.chi_tilde, atol=1e-12)


@given(x_states())
@settings(max_examples=100, deadline=None)
def test_correlation_matrix_matches_pauli_traces(s):
    m = s.matrix()
    t = np.array([[np.trace(m @ np.kron(PAULI[a], PAULI[b])).real for b in range(4)] for a in range(4)])
    assert np.allclose(to_fano_bloch(s).t, t, atol=1e-12)


def test_maximally_mixed_coordinates():
    c = block_coeffs(XState.maximally_mixed())
    assert np.allclose(c.chi, [0.5, 0, 0, 0])
    assert np.allclose(c.chi_tilde, [0.5, 0, 0, 0])
    assert np.allclose(to_fano_bloch(XState.maximally_mixed()).t, np.diag([1.0, 0, 0, 0]))


def test_bell_state_coordinates():
    s = bell_phi_plus()
    assert np.allclose(to_fano_bloch(s).t, np.diag([1.0, 1.0, -1.0, 1.0]))
    c = block_coeffs(s)
    assert np.allclose(c.chi, [1, 1, 0, 0])
    assert np.allclose(c.chi_tilde, 0)


def test_block_coeffs_of_matrix_is_linear(rng):
    a, b = random_xstate(rng).matrix(), random_xstate(rng).matrix()
    ca, cb, cab = block_coeffs_of_matrix(a), block_coeffs_of_matrix(b), block_coeffs_of_matrix(2 * a - 3 * b)
    assert np.allclose(cab.chi, 2 * ca.chi - 3 * cb.chi)
    assert np.allclose(cab.chi_tilde, 2 * ca.chi_tilde - 3 * cb.chi_tilde)


@pytest.mark.parametrize(
    "args",
    [
        (0.5, 0.5, 0.5, 0.5),
        (1.2, -0.2, 0.0, 0.0),
        (0.5, 0.0, 0.0, 0.5, 0.6),
        (0.0, 0.5, 0.5, 0.0, 0.0, 0.51j),
        (float("nan"), 0.5, 0.5, 0.0),
    ],
)
def test_invalid_states_rejected(args):
    with pytest.raises(NotPositiveError):
        XState(*args)


def test_from_matrix_rejects_non_x_weight():
    m = XState.maximally_mixed().matrix()
    m[0, 1] = m[1, 0] = 0.1
    with pytest.raises(NonXSupportError):
        XState.from_matrix(m)


def test_from_fano_bloch_rejects_non_x_weight():
    t = np.diag([1.0, 0, 0, 0])
    t[1, 0] = 0.3
    with pytest.raises(NonXSupportError):
        from_fano_bloch(FanoBloch(t))


def test_block_coeffs_validation():
    with pytest.raises(ValueError):
        BlockCoeffs([1, 0, 0], [0, 0, 0, 0])


def test_block_coeffs_from_fano_bloch_agrees(rng):
    s = random_xstate(rng)
    c1, c2 = block_coeffs(s), block_coeffs_from_fano_bloch(to_fano_bloch(s))
    assert np.allclose(c1.chi, c2.chi) and np.allclose(c1.chi_tilde, c2.chi_tilde)


def test_family_derivative_analytic_vs_finite_difference(rng):
    a, b = random_xstate(rng, 0.1), random_xstate(rng, 0.1)
    exact = linear_family(a, b)
    numeric = ParametrizedFamily(exact.state, exact.interval)
    for theta in (0.2, 0.5, 0.9):
        d1, d2 = family_derivative(exact, theta), family_derivative(numeric, theta)
        assert np.allclose(d1.dchi, d2.dchi, atol=1e-8)
        assert np.allclose(d1.dchi_tilde, d2.dchi_tilde, atol=1e-8)


def test_family_domain(rng):
    fam = ParametrizedFamily(linear_family(random_xstate(rng), random_xstate(rng)).state, (0.0, 1.0))
    with pytest.raises(OutOfDomainError):
        fam(1.5)
    with pytest.raises(OutOfDomainError):
        family_derivative(fam, 0.0)


def test_random_xstate_floor(rng):
    for _ in range(50):
        w = np.linalg.eigvalsh(random_xstate(rng, 0.2).matrix())
        assert w.min() >= 0.05 - 1e-12

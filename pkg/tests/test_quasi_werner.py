import math

import numpy as np
import pytest

from xmetrology import oracle
from xmetrology import quasi_werner as qw
from xmetrology.channels import Channel
from xmetrology.errors import FormulaDomainError
from xmetrology.state_core import XState, block_coeffs, to_fano_bloch

# Oracle values (spectral QFI, finite-difference sqrt skew, Wootters) frozen
# before any closed form was written: (alpha, beta, q, sign, channel, p) -> (F, I, C).
ORACLE_FIXTURES = [
    ((0.5, 0.5, 0.6, 1, None, 0.0), (2.678571428571428, 2.6785714288649194, 0.07727029435600591)),
    ((0.5, 0.5, 0.6, -1, None, 0.0), (2.6785714285714284, 2.6785714288873788, 0.40000000000000013)),
    ((0.5, 0.5, 0.6, 1, "pdc", 0.3), (2.336059026653656, 2.336059026898468, 0.0)),
    ((0.5, 1.0, 0.8, -1, "dpc", 0.2), (1.1300056652079007, 1.1300056652194383, 0.1953932564589161)),
    ((0.5, 0.5, 0.6, 1, "adc", 0.3), (0.8845107949820331, 0.897396844700942, 0.0)),
    ((0.5, 0.5, 0.6, -1, "adc", 0.3), (1.3548985359343728, 1.3548985360745203, 0.15845841630822854)),
]


def params(a, b, q, sign):
    return qw.QuasiWernerParams(a, b, q, sign)


def test_param_validation():
    assert qw.QuasiWernerParams(0.5, 0.5, 0.3, "minus").sign == -1
    assert qw.parse_sign("+") == 1 and qw.parse_sign(-1) == -1
    with pytest.raises(ValueError):
        qw.QuasiWernerParams(0.5, 0.5, 1.2)
    with pytest.raises(ValueError):
        qw.QuasiWernerParams(0.0, 0.5, 0.2)
    with pytest.raises(ValueError):
        qw.parse_sign("sideways")


def test_normalizations_fixture():
    k = qw.normalizations(params(0.5, 0.5, 0.5, 1))
    assert k.chi_a == pytest.approx(math.exp(-0.25))
    assert k.n_plus == pytest.approx(0.6045901829462685)
    assert k.n_minus == pytest.approx(0.8893752601881071)
    assert k.Np_a == pytest.approx(0.5578796156886603) and k.Nm_a == pytest.approx(1.1272741641980442)
    assert k.Np_a == k.Np_b and k.Nm_a == k.Nm_b
    assert k.n_plus <= k.n_minus


def test_normalizations_large_amplitude_limit():
    k = qw.normalizations_ab(5.0, 5.0)
    for v in (k.n_plus, k.n_minus, k.Np_a, k.Nm_a, k.Np_b, k.Nm_b):
        assert v == pytest.approx(1 / math.sqrt(2), abs=1e-12)


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("a,b", [(0.3, 0.5), (1.0, 1.5), (0.5, 0.5)])
def test_density_matrix_valid(sign, a, b):
    for q in np.linspace(0, 1, 11):
        s = qw.density_matrix(params(a, b, q, sign))
        assert s.d1 + s.d2 + s.d3 + s.d4 == pytest.approx(1.0, abs=1e-12)
        oracle.check_density_matrix(s.matrix())
    assert np.allclose(qw.density_matrix(params(a, b, 0.0, sign)).matrix(), np.eye(4) / 4)


def test_pure_state_is_rank_one():
    proj = qw.pure_projector(0.7, 1.1, 1)
    assert np.allclose(proj @ proj, proj, atol=1e-12)


def test_printed_correlations():
    p_minus, p_plus = params(0.5, 1.0, 0.7, -1), params(0.5, 1.0, 0.7, 1)
    assert np.allclose(qw.printed_fano_bloch(p_minus).t, to_fano_bloch(qw.density_matrix(p_minus)).t)
    # The published plus-sign list carries T11 and T22 with swapped signs.
    printed = qw.printed_fano_bloch(p_plus).t
    true = to_fano_bloch(qw.density_matrix(p_plus)).t
    assert printed[1, 1] == pytest.approx(-true[1, 1]) and printed[2, 2] == pytest.approx(-true[2, 2])
    mask = np.ones((4, 4), bool)
    mask[1, 1] = mask[2, 2] = False
    assert np.allclose(printed[mask], true[mask])


@pytest.mark.parametrize("sign", [1, -1])
def test_printed_block_coeffs_and_kappa(sign):
    p = params(0.4, 1.2, 0.65, sign)
    c, pc = block_coeffs(qw.density_matrix(p)), qw.printed_block_coeffs(p)
    assert np.allclose(c.chi, pc.chi) and np.allclose(c.chi_tilde, pc.chi_tilde)
    k = qw.normalizations(p)
    third = c.chi[3] if sign > 0 else c.chi_tilde[3]
    assert third == pytest.approx(p.q * qw.kappa(k, sign))


def test_concurrence_examples():
    assert qw.concurrence_closed(params(0.5, 0.7, 0.0, 1)) == 0.0
    assert qw.concurrence_closed(params(0.5, 0.5, 1.0, -1)) == pytest.approx(1.0, abs=1e-12)
    for sign in (1, -1):
        for a in (0.3, 0.5, 1.0, 1.5):
            for b in (0.3, 0.5, 1.0, 1.5):
                for q in np.linspace(0, 1, 11):
                    p = params(a, b, q, sign)
                    ref = float(oracle.concurrence_wootters(qw.density_matrix(p).matrix()))
                    assert qw.concurrence_closed(p) == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("key,expected", ORACLE_FIXTURES)
def test_block_pipeline_against_frozen_oracle(key, expected):
    a, b, q, sign, kind, pval = key
    ch = None if kind is None else Channel(kind, pval)
    vals = qw.block_closed_forms(params(a, b, q, sign), ch)
    assert vals["qfi"] == pytest.approx(expected[0], abs=1e-9)
    assert vals["skew"] == pytest.approx(expected[1], abs=1e-6)
    assert vals["concurrence"] == pytest.approx(expected[2], abs=1e-10)


def test_oracle_values_reproduce_fixtures():
    (a, b, q, sign, kind, pval), expected = ORACLE_FIXTURES[3]
    ref = qw.oracle_values(params(a, b, q, sign), Channel(kind, pval))
    assert (ref["qfi"], ref["skew"], ref["concurrence"]) == pytest.approx(expected, abs=1e-9)


def test_noiseless_qfi_is_amplitude_independent():
    for a, b in ((0.3, 1.5), (1.0, 0.5)):
        for q in (0.2, 0.7):
            vals = qw.block_closed_forms(params(a, b, q, -1))
            assert vals["qfi"] == pytest.approx(9 / (4 * (1 + 3 * q)) + 3 / (4 * (1 - q)))


@pytest.mark.parametrize("sign", [1, -1])
def test_printed_pdc_qfi_and_concurrence_agree_with_oracle(sign):
    for pval in (0.0, 0.3, 0.7):
        p = params(0.5, 0.7, 0.6, sign)
        ch = Channel("pdc", pval)
        ref = qw.oracle_values(p, ch)
        assert qw.printed_value(p, ch, "qfi") == pytest.approx(ref["qfi"], abs=1e-6)
        assert qw.printed_value(p, ch, "concurrence") == pytest.approx(ref["concurrence"], abs=1e-10)


def test_printed_dpc_qfi_agrees_only_without_noise():
    p = params(0.5, 1.0, 0.8, -1)
    ref0 = qw.oracle_values(p, Channel("dpc", 0.0))
    assert qw.printed_value(p, Channel("dpc", 0.0), "qfi") == pytest.approx(ref0["qfi"], abs=1e-6)
    ref = qw.oracle_values(p, Channel("dpc", 0.2))
    assert abs(qw.printed_value(p, Channel("dpc", 0.2), "qfi") - ref["qfi"]) > 1e-3


def test_printed_pdc_skew_wrong_even_without_noise():
    p = params(0.5, 0.5, 0.6, 1)
    ref = qw.oracle_values(p, Channel("pdc", 0.0))
    assert abs(qw.printed_value(p, Channel("pdc", 0.0), "skew") - ref["skew"]) > 1e-3


def test_printed_adc_concurrence_both_labels():
    for sign in (1, -1):
        p = params(0.5, 0.5, 0.9, sign)
        ch = Channel("adc", 0.3)
        ref = qw.oracle_values(p, ch)["concurrence"]
        assert qw.printed_value(p, ch, "concurrence") == pytest.approx(ref, abs=1e-10)


def test_printed_value_without_channel():
    p = params(0.5, 0.5, 0.6, -1)
    assert qw.printed_value(p, None, "concurrence") == qw.concurrence_closed(p)
    assert qw.printed_value(p, None, "qfi") == qw.printed_value(p, Channel("pdc", 0.0), "qfi")


def test_domain_failures_become_nan_or_none():
    p = params(0.5, 0.5, 1.0, 1)
    ch = Channel("pdc", 0.0)
    assert math.isnan(qw.closed_value(p, ch, "qfi", "printed"))
    report = qw.pdc_closed_forms(p, ch)
    assert report.qfi_closed is None and report.oracle_only
    assert "qfi" in report.errors and report.abs_deviation("qfi") is None


def test_closed_form_reports():
    p = params(0.5, 0.5, 0.6, 1)
    r = qw.pdc_closed_forms(p, Channel("pdc", 0.3))
    assert r.abs_deviation("qfi") < 1e-6 and r.rel_deviation("qfi") < 1e-6
    assert r.abs_deviation("skew") > 1e-3
    assert not r.oracle_only
    with pytest.raises(ValueError):
        qw.dpc_closed_forms(p, Channel("pdc", 0.3))
    with pytest.raises(ValueError):
        qw.adc_closed_forms(p, Channel("dpc", 0.3))


def test_helper_symbol_domain_errors():
    with pytest.raises(FormulaDomainError):
        qw._root(-1.0, "x")
    with pytest.raises(FormulaDomainError):
        qw._div(1.0, 0.0, "x")


def test_oracle_grid_matches_pointwise():
    qs = [0.0, 0.4, 1.0]
    ch = Channel("adc", 0.25)
    grid = qw.oracle_grid(0.5, 0.7, -1, qs, ch)
    for j, q in enumerate(qs[1:2], start=1):
        ref = qw.oracle_values(params(0.5, 0.7, q, -1), ch)
        for n in qw.QUANTITIES:
            assert grid[n][j] == pytest.approx(ref[n], abs=1e-9)
    pts = qw.oracle_points(0.5, 0.7, -1, [(ch, 0.4), (None, 0.4)])
    assert pts["qfi"][0] == pytest.approx(grid["qfi"][1])


@pytest.mark.parametrize("kind", ["pdc", "dpc", "adc"])
def test_adc_style_monotone_decrease_in_p(kind):
    p = params(0.5, 0.5, 0.6, -1)
    rows = [qw.block_closed_forms(p, Channel(kind, x)) for x in np.linspace(0.1, 0.9, 9)]
    for n in qw.QUANTITIES:
        vals = [r[n] for r in rows]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

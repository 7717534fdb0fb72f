from dataclasses import replace

import pytest

from hsagg.audit import (
    StateSpaceError,
    algebraic_audit,
    exhaustive_mi_audit,
    exhaustive_recovery_audit,
    full_audit,
    golden_example1,
    relay_security_algebraic,
    server_security_algebraic,
)
from hsagg.gf import Matrix
from hsagg.protocol import build_scheme


def test_golden_relay_checks_pass_with_worked_key_rows():
    params = golden_example1()
    for i in (1, 2, 3):
        assert relay_security_algebraic(params, i).passed
    # relay 1 sees -N1 (from user 1) and 2(N1+N2) (from user 3): rows
    # lam * h are (2,0) and (2,2) over GF(3), which indeed have rank 2
    lam11 = params.key_coeffs.rows[0][0]
    lam31 = params.key_coeffs.rows[2][0]
    assert (lam11, lam31) == (2, 2)
    rows = Matrix(params.field, [[2, 0], [2, 2]])
    assert rows.rank() == 2


def test_golden_server_check_passes():
    assert server_security_algebraic(golden_example1()).passed


def test_algebraic_audit_sweep():
    for (K, B) in [(2, 1), (4, 2), (3, 2), (6, 3), (5, 4), (4, 4), (6, 6)]:
        report = algebraic_audit(build_scheme(K, B, seed=0))
        assert report.passed, (K, B, report.failures())


def test_duplicated_key_row_breaks_relay_security():
    params = golden_example1()
    h = [list(r) for r in params.key_matrix.rows]
    h[2] = h[0]  # users 1 and 3 now share a key row; relay 1 sees rank 1
    broken = replace(params, key_matrix=Matrix(params.field, h))
    check = relay_security_algebraic(broken, 1)
    assert not check.passed
    assert "rank 1/2" in check.detail


def test_zeroed_key_column_breaks_server_security():
    # needs K - B >= 2 so losing one key dimension drops the mixed rank
    params = build_scheme(4, 2, seed=0)
    h = [list(row[:-1]) + [0] for row in params.key_matrix.rows]
    broken = replace(params, key_matrix=Matrix(params.field, h))
    assert not server_security_algebraic(broken).passed


def test_exhaustive_audits_pass_golden():
    params = golden_example1()
    mi = exhaustive_mi_audit(params, L=2)
    assert mi.passed and len(mi.checks) == 4
    rec = exhaustive_recovery_audit(params, L=2)
    assert rec.passed


def test_exhaustive_audits_pass_constructed_small_field():
    params = build_scheme(3, 2, q=5)
    assert exhaustive_mi_audit(params, L=2).passed
    assert exhaustive_recovery_audit(params, L=2).passed


def test_exhaustive_audit_single_association():
    params = build_scheme(2, 1)
    assert exhaustive_mi_audit(params, L=2).passed
    assert exhaustive_recovery_audit(params, L=2).passed


def test_zeroed_coefficient_exposes_inputs_to_relay():
    params = build_scheme(3, 2, q=5)
    rows = [list(r) for r in params.key_coeffs.rows]
    rows[0][0] = 0  # user 1's input reaches relay 1 in the clear
    broken = replace(params, key_coeffs=Matrix(params.field, rows))
    report = exhaustive_mi_audit(broken, L=2)
    failed = {c.name for c in report.checks if not c.passed}
    assert "relay-mi[1]" in failed
    # the algebraic check agrees, as it must on any instance both can see
    assert not relay_security_algebraic(broken, 1).passed


def test_corrupted_recovery_matrix_fails_recovery_audit():
    params = build_scheme(3, 2, q=5)
    rows = [list(r) for r in params.recovery.rows]
    rows[0][0] = (rows[0][0] + 1) % 5
    broken = replace(params, recovery=Matrix(params.field, rows))
    assert not exhaustive_recovery_audit(broken, L=2).passed


def test_algebraic_and_exhaustive_verdicts_agree_on_tiny_instances():
    for (K, B, q) in [(3, 2, 3), (3, 2, 5), (2, 1, 5)]:
        params = golden_example1() if q == 3 else build_scheme(K, B, q=q)
        alg = algebraic_audit(params)
        mi = exhaustive_mi_audit(params, L=params.block_size)
        assert alg.passed and mi.passed


def test_state_space_cap_enforced():
    params = build_scheme(3, 2, q=7)
    with pytest.raises(StateSpaceError) as err:
        exhaustive_mi_audit(params, L=2, max_states=1000)
    assert err.value.required == 7**8
    with pytest.raises(StateSpaceError):
        exhaustive_recovery_audit(params, L=2, max_states=1000)


def test_full_audit_levels():
    params = golden_example1()
    assert len(full_audit(params, level="algebraic").checks) == 4
    assert len(full_audit(params, level="exhaustive", L=2).checks) == 9
    with pytest.raises(ValueError):
        full_audit(params, level="sampled")


def test_report_serialization():
    report = full_audit(golden_example1(), level="exhaustive", L=2)
    data = report.to_dict()
    assert data["passed"] is True
    assert len(data["checks"]) == 9
    assert all(set(c) == {"name", "passed", "detail"} for c in data["checks"])

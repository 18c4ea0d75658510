"""Monomial compilation and the quadratic endomorphism table."""

import pytest

from q2perm import (
    INTEGERS, compose, equals, extendible, translation, validate_branching,
    verify_q2,
)
from q2perm.endo import (
    ENDO_TABLE, F_EXPR, IDENTITY_EXPR, MEMBERSHIP_ROWS, SPECTRAL_ROWS,
    check_candidate_U, chi_rep, compile_expr, compile_product,
    endo_table_report, expr, flipflop_intertwiner_check, q2_of_endo,
    rep_of_endo, translation_unitary,
)
from q2perm.branching import core_set
from q2perm.maps import StructuralError
from q2perm.classify import q2_decomposable


def test_compile_rho23_s2():
    f = compile_expr(ENDO_TABLE["23"].s2)
    # odd l -> 2l-1, even l -> 2l
    for k in range(-20, 20):
        assert f.apply(2 * k) == 4 * k
        assert f.apply(2 * k + 1) == 4 * k + 1


def test_compile_rho13_s2_fixed_points():
    f = compile_expr(ENDO_TABLE["13"].s2)
    for k in range(-20, 20):
        assert f.apply(2 * k + 1) == 4 * k + 3      # odd l -> 2l+1
        assert f.apply(2 * k) == 4 * k
    assert f.apply(-1) == -1 and f.apply(0) == 0


def test_compile_identity():
    assert equals(compile_expr(IDENTITY_EXPR), translation(INTEGERS, 0))


def test_compile_f_parity_swap():
    f = compile_expr(F_EXPR)
    for l in range(-10, 10):
        expected = l + 1 if l % 2 == 0 else l - 1
        assert f.apply(l) == expected


def test_compile_word_composition():
    # a term with word alpha equals the composition of single letters
    s1 = compile_expr(expr(("1", 0, "")))
    s2 = compile_expr(expr(("2", 0, "")))
    s12 = compile_expr(expr(("12", 0, "")))
    assert equals(s12, compose(s1, s2))
    s212 = compile_expr(expr(("212", 0, "")))
    assert equals(s212, compose(s2, compose(s1, s2)))


def test_compile_endianness_pin():
    # the first letter of a word is the least-significant direction:
    # s_12 sends e_k to e_{4k+1}
    s12 = compile_expr(expr(("12", 0, "")))
    assert s12.apply(3) == 13


def test_compile_rejects_non_permutative():
    with pytest.raises(StructuralError):
        compile_expr(expr(("1", 0, ""), ("2", 0, "")))      # residue 0 twice
    with pytest.raises(StructuralError):
        compile_expr(expr(("11", 0, "11")))                 # misses 3 residues


def test_all_rows_compile_and_validate():
    assert len(ENDO_TABLE) == 24
    for name in ENDO_TABLE:
        sys = rep_of_endo(name)
        assert validate_branching(sys).ok, name


def test_rep_of_endo_id_is_canonical():
    from q2perm.maps import affine_map
    sys = rep_of_endo("id")
    assert equals(sys.sigma1, affine_map(INTEGERS, 2, 1))
    assert equals(sys.sigma2, affine_map(INTEGERS, 2, 0))


def test_spectral_rows_rep_obstructed():
    for name in SPECTRAL_ROWS:
        assert extendible(rep_of_endo(name)).verdict is False, name


def test_membership_rows_rep_level_passes():
    for name in MEMBERSHIP_ROWS:
        assert extendible(rep_of_endo(name)).verdict is True, name


def test_rho12_cores_single_fixed_points():
    sys = rep_of_endo("12")
    assert sorted(core_set(sys.sigma1).members) == [1]
    assert sorted(core_set(sys.sigma2).members) == [0]


def test_candidates_pass_for_yes_rows():
    for name, spec in ENDO_TABLE.items():
        if spec.u_candidate is None:
            continue
        report = check_candidate_U(spec.u_candidate, name)
        assert report.passed, (name, report)


def test_rho134_candidate_fails_second_relation():
    report = check_candidate_U(ENDO_TABLE["134"].refutation_candidate, "134")
    assert report.relation1 is True
    assert report.relation2 is False
    w = report.witness2
    assert w is not None
    tau = report.tau
    s1 = compile_expr(ENDO_TABLE["134"].s1)
    s2 = compile_expr(ENDO_TABLE["134"].s2)
    assert s2.apply(tau.apply(w)) != tau.apply(s1.apply(w))


def test_rho12_candidate_f_fails():
    report = check_candidate_U(ENDO_TABLE["12"].refutation_candidate, "12")
    assert not report.passed
    assert report.relation1 is False


def test_endo_table_report_agrees_everywhere():
    rows = endo_table_report()
    assert len(rows) == 24
    for row in rows:
        assert row.agrees(), row.name
    levels = {r.name: r.level for r in rows}
    assert levels["13"] == "rep-obstructed"
    assert levels["14"] == "candidate-verified"
    assert "refuted" in levels["134"]
    assert "refuted" in levels["12"]
    assert "asserted" in levels["34"]


def test_rep_verdicts_flip_invariant():
    from q2perm import flipflop_image
    for name in ENDO_TABLE:
        sys = rep_of_endo(name)
        assert extendible(sys).verdict == extendible(flipflop_image(sys)).verdict


def test_q2_of_endo_verified():
    for name in ("23", "14", "123", "243", "1243", "1342", "(12)(34)",
                 "(13)(24)", "(14)(23)"):
        assert verify_q2(q2_of_endo(name)).passed, name


def test_chi_rep():
    q2 = chi_rep(0)
    assert equals(q2.tau, translation(INTEGERS, 1))
    for k in range(0, 11):
        assert verify_q2(chi_rep(k)).passed, k
    with pytest.raises(StructuralError):
        translation_unitary(4)


def test_chi1_second_component_multiplicity():
    report = q2_decomposable(chi_rep(1), window=64)
    pi = [c for c in report.classes if c.kind == "infinite_pi"]
    assert len(pi) == 1 and pi[0].tau_orbits == 2


def test_flipflop_intertwiner():
    assert flipflop_intertwiner_check(10 ** 4).passed
    bad = flipflop_intertwiner_check(100, v=lambda k: -k)
    assert not bad.passed and bad.witness is not None
    # applying the exchange twice is the identity: intertwine a half with itself
    ident = flipflop_intertwiner_check(100, v=None)
    assert ident.passed

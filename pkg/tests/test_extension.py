"""Extendibility, construction of the unitary, counting, equivalence."""

import pytest

from q2perm import (
    INTEGERS, Q2System, affine_map, build_tau, build_tau_pure,
    count_extensions, equals, extendible, extension_family, kawamura_finite,
    translation, unitary_equiv_tau, verify_q2,
)
from q2perm.catalog import canonical_system, onekk, p12_realization1, p12_realization2
from q2perm.extension import OrbitMatching, tau_orbit_structure
from q2perm.maps import AffineRule, RuleInjection, StructuralError


def test_extendible_canonical():
    ext = extendible(canonical_system())
    assert ext.verdict is True
    assert len(ext.matchings) == 1 and ext.matching_count == 1


def test_not_extendible_p1k_alone():
    for k in (2, 3, 4):
        ext = extendible(kawamura_finite("1" * k))
        assert ext.verdict is False
        assert "mismatch" in ext.reason


def test_extendible_onekk():
    ext = extendible(onekk(2))
    assert ext.verdict is True and len(ext.matchings) == 1


def test_flip_symmetry_of_extendibility():
    for sys in (canonical_system(), kawamura_finite("11"), onekk(3),
                kawamura_finite("12")):
        assert extendible(sys).verdict == extendible(sys.flipped()).verdict


def test_build_tau_canonical_exact():
    sys = canonical_system()
    q2 = build_tau(sys, extendible(sys).matchings[0])
    assert q2.tau_is_exact()
    assert equals(q2.tau, translation(INTEGERS, 1))
    assert verify_q2(q2).passed


def test_build_tau_pure_kawamura12():
    sys = kawamura_finite("12")
    q2 = build_tau_pure(sys)
    # tau(sigma2(1)) = sigma1(1): sigma2(1) = 3, sigma1(1) = 2
    assert q2.tau.apply(3) == 2
    assert verify_q2(q2, window=500).passed


def test_build_tau_pure_requires_purity():
    with pytest.raises(StructuralError):
        build_tau_pure(canonical_system())


def test_build_tau_rejects_bad_matching():
    sys = onekk(2)
    with pytest.raises(StructuralError):
        build_tau(sys, OrbitMatching(()))


def test_pure_empty_matching_equals_pure_builder():
    sys = kawamura_finite("112")
    q_a = build_tau_pure(sys, synthesize=False)
    q_b = build_tau(sys, OrbitMatching(()), synthesize=False)
    for n in range(1, 400):
        assert q_a.tau.apply(n) == q_b.tau.apply(n)


def test_count_extensions():
    assert count_extensions(canonical_system()).n == 1
    assert count_extensions(onekk(2)).n == 2
    assert count_extensions(kawamura_finite("12")).n == 1


def test_extension_family_onekk2():
    family = extension_family(onekk(2))
    assert len(family) == 2
    t0, t1 = family[0].tau, family[1].tau
    assert any(t0.apply(n) != t1.apply(n) for n in range(1, 12))
    for q2 in family:
        assert verify_q2(q2, window=400).passed
    verdict, _ = unitary_equiv_tau(t0, t1)
    assert verdict is True


def test_verify_rejects_identity_tau():
    sigma2 = affine_map(INTEGERS, 2, 0)
    q2 = Q2System(sigma2, translation(INTEGERS, 0))
    report = verify_q2(q2)
    assert not report.passed


def test_restriction_consistency():
    sys = canonical_system()
    q2 = build_tau(sys, extendible(sys).matchings[0])
    from q2perm.maps import compose
    assert equals(compose(q2.tau, q2.sigma2), sys.sigma1)


def test_unitary_equiv_translations():
    verdict, _ = unitary_equiv_tau(translation(INTEGERS, 1),
                                   translation(INTEGERS, -1))
    assert verdict is True


def test_unitary_equiv_distinguishes_finite_cycles():
    swap = RuleInjection(INTEGERS, 2,
                         [AffineRule(0, 1, 1), AffineRule(1, 1, -1)])
    verdict, _ = unitary_equiv_tau(swap, translation(INTEGERS, 1))
    assert verdict is False


def test_tau_orbit_structure_of_extension():
    sys = kawamura_finite("12")
    q2 = build_tau_pure(sys, synthesize=False)
    structure = tau_orbit_structure(q2.tau)
    assert structure is not None
    assert structure.finite_cycles == () and structure.infinite_count == 2


def test_no_periodic_points_structural():
    for sys in (canonical_system(), onekk(2), kawamura_finite("121")):
        ext = extendible(sys)
        q2 = build_tau(sys, ext.matchings[0], synthesize=False)
        for n in list(sys.domain.window(60)):
            x = n
            for _ in range(12):
                x = q2.tau.apply(x)
                assert x != n


def test_q2_json_emission():
    sys = p12_realization1()
    q2 = build_tau_pure(sys)
    data = q2.to_json(window=16)
    assert data["tau"]["kind"] == "table"
    assert data["tau"]["entries"]["2"] == 3

    can = canonical_system()
    q2c = build_tau(can, extendible(can).matchings[0])
    assert q2c.to_json()["tau"]["rules"] == [
        {"residue": 0, "slope": 1, "offset": 1}]


def test_realization2_displayed_formulas_window():
    # oracle: the displayed even/odd closed forms
    def tau_oracle(m):
        if m % 2 == 0:
            n = m // 2
            return m + 1 if n % 2 else m - 3
        k = 1
        x = m + 1
        while x % 2 == 0:
            x //= 2
            k += 1
        n = (m + (1 << (k - 1)) + 1) >> k
        if n % 2:
            return (1 << k) * n + (1 << (k - 1))
        return (1 << k) * n - 3 * (1 << (k - 1))

    q2 = build_tau_pure(p12_realization2(), synthesize=False)
    for m in range(1, 2000):
        assert q2.tau.apply(m) == tau_oracle(m), m

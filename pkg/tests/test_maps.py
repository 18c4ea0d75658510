"""Exact-map layer: validation, application, composition, orbits."""

import pytest

from q2perm import (
    AffineRule, INTEGERS, NAT1, MapDomainError, RuleInjection, affine_map,
    compose, equals, orbit_of, translation, validate_injection,
)
from q2perm.maps import bijection_orbit_structure, normal_form, range_covers


def doubling(domain=INTEGERS):
    return affine_map(domain, 2, 0)


def test_doubling_valid_injective():
    report = validate_injection(doubling())
    assert report.ok and report.total and report.injective


def test_exception_collision_detected():
    # image 4 collides with the rule image of 2 (solve 2x = 4)
    f = RuleInjection(INTEGERS, 1, [AffineRule(0, 2, 0)], {3: 4})
    report = validate_injection(f)
    assert not report.injective
    assert any(w[0] == 4 for w in report.collisions)


def test_binary_split_covering_pair():
    # the two full-domain maps 2n and 2n+1 tile the integers (binary split);
    # a single two-branch map restricted classwise does not
    even = doubling()
    odd = affine_map(INTEGERS, 2, 1)
    from q2perm.maps import _image_components, covers_domain
    covered, witness = covers_domain(
        [_image_components(even), _image_components(odd)], INTEGERS)
    assert covered, witness
    restricted = RuleInjection(INTEGERS, 2,
                               [AffineRule(0, 2, 0), AffineRule(1, 2, 1)])
    assert validate_injection(restricted).ok
    covered, witness = range_covers(restricted)
    assert not covered and witness % 4 in (1, 2)


def test_parity_swap_bijective():
    f = RuleInjection(INTEGERS, 2, [AffineRule(0, 1, 1), AffineRule(1, 1, -1)])
    report = validate_injection(f)
    assert report.ok and report.total
    covered, witness = range_covers(f)
    assert covered, witness


def test_overlapping_residues_rejected():
    with pytest.raises(Exception):
        RuleInjection(INTEGERS, 2, [AffineRule(0, 2, 0), AffineRule(0, 3, 1)])


def test_exception_key_also_removed_flagged():
    f = RuleInjection(INTEGERS, 1, [AffineRule(0, 2, 0)], {3: 5}, removed={3})
    report = validate_injection(f)
    assert any("also removed" in e for e in report.errors)


def test_apply_canonical_and_exceptions():
    assert doubling().apply(5) == 10
    sigma1 = RuleInjection(NAT1, 1, [AffineRule(0, 2, -1)], {1: 3, 2: 1})
    assert sigma1.apply(2) == 1
    f = RuleInjection(INTEGERS, 1, [AffineRule(0, 2, 0)], {7: 3})
    assert f.apply(7) == 3


def test_apply_domain_error():
    with pytest.raises(MapDomainError):
        affine_map(NAT1, 2, 0).apply(0)


def test_invert():
    assert doubling().invert(10) == 5
    assert doubling().invert(7) is None
    sigma1 = RuleInjection(NAT1, 1, [AffineRule(0, 2, -1)], {1: 3, 2: 1})
    assert sigma1.invert(1) == 2


def test_invert_skips_shadowed_rule_inputs():
    # 1 is an exception key, so 2*1 - 1 = 1 is not a rule image
    sigma1 = RuleInjection(NAT1, 1, [AffineRule(0, 2, -1)], {1: 3, 2: 1})
    assert sigma1.invert(3) == 1        # via the exception
    assert sigma1.invert(5) == 3        # via the rule


def test_compose_affine():
    f = compose(doubling(), translation(INTEGERS, 1))
    assert equals(f, affine_map(INTEGERS, 2, 2))


def test_compose_canonical_relation():
    # tau_c after sigma2 is the odd map
    tau = translation(INTEGERS, 1)
    assert equals(compose(tau, doubling()), affine_map(INTEGERS, 2, 1))


def test_compose_exception_chase():
    g = RuleInjection(INTEGERS, 1, [AffineRule(0, 1, 1)], {7: 3})
    f = doubling()
    h = compose(f, g)
    assert h.apply(7) == 6              # f(g(7)) = f(3)
    assert h.apply(5) == 12
    report = validate_injection(h)
    assert report.ok


def test_compose_upstream_exception_of_f():
    g = doubling()
    f = RuleInjection(INTEGERS, 1, [AffineRule(0, 1, 1)], {6: 100})
    h = compose(f, g)
    assert h.apply(3) == 100
    assert h.apply(4) == 9


def test_equals_normal_form_absorbs_redundant_exception():
    f = RuleInjection(INTEGERS, 1, [AffineRule(0, 1, 1)], {5: 6})
    assert equals(f, translation(INTEGERS, 1))


def test_equals_distinguishes():
    assert not equals(affine_map(INTEGERS, 2, 1), doubling())


def test_normal_form_folds_modulus():
    f = RuleInjection(INTEGERS, 4, [AffineRule(r, 2, 0) for r in range(4)])
    g = normal_form(f)
    assert g.modulus == 1
    assert equals(f, doubling())


def test_orbit_translation_certified_infinite():
    orbit = orbit_of(translation(INTEGERS, 3), 0)
    assert orbit.kind == "infinite"


def test_orbit_word_map_fixed_point():
    # word map of the cyclic word-12 system fixes its cyclic index
    from q2perm import kawamura_finite
    sys = kawamura_finite("12")
    word_map = sys.word_map("12")
    orbit = orbit_of(word_map, 2)
    assert orbit.kind == "finite" and orbit.length == 1 and orbit.members == (2,)


def no_invariant_subset_bijection():
    # 2 -> 1, odd n -> n+2, even n != 2 -> n-2
    return RuleInjection(NAT1, 2, [AffineRule(1, 1, 2), AffineRule(0, 1, -2)],
                         {2: 1})


def test_no_invariant_subset_bijection_certified_infinite():
    f = no_invariant_subset_bijection()
    report = validate_injection(f)
    assert report.ok and report.total
    covered, _ = range_covers(f)
    assert covered
    orbit = orbit_of(f, 1)
    assert orbit.kind == "infinite"
    # forward from an even index passes through the exception zone first
    assert orbit_of(f, 8).kind == "infinite"


def test_bijection_orbit_structure_translations():
    assert bijection_orbit_structure(translation(INTEGERS, 1)).infinite_count == 1
    assert bijection_orbit_structure(translation(INTEGERS, -1)).infinite_count == 1
    assert bijection_orbit_structure(translation(INTEGERS, 3)).infinite_count == 3
    two = RuleInjection(INTEGERS, 2, [AffineRule(0, 1, 2), AffineRule(1, 1, 2)])
    assert bijection_orbit_structure(two).infinite_count == 2


def test_bijection_orbit_structure_parity_swap():
    # even -> n+1, odd -> n-1: an involution, infinitely many 2-cycles
    f = RuleInjection(INTEGERS, 2, [AffineRule(0, 1, 1), AffineRule(1, 1, -1)])
    structure = bijection_orbit_structure(f)
    assert structure.infinite_count == 0
    assert structure.finite_cycles == ((2, None),)


def test_serialization_round_trip():
    f = RuleInjection(NAT1, 2, [AffineRule(0, 2, 0), AffineRule(1, 2, 1)],
                      {3: 7}, removed=())
    g = RuleInjection.from_json(f.to_json())
    assert equals(f, g)
    assert f.to_json() == g.to_json()

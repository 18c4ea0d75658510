"""Acceptance criteria, one test per criterion.

Every assertion is exact (integer or rational arithmetic); the only stated
tolerances are the explicit windows and depths below.  Run with -s to see
one PASS line per criterion.
"""

import itertools

from fractions import Fraction

from q2perm import (
    BranchingSystem, INTEGERS, Phase, affine_map, build_tau, build_tau_pure,
    classify_component, coding, count_extensions, equals, extendible,
    extension_family, hypothesis_flag, is_pure, kawamura_finite, omega_z,
    omega_z_consistency, point_spectrum, q2_components, q2_decomposable,
    regularity_verdict, translation, unitary_equiv_tau, validate_branching,
    verify_q2,
)
from q2perm.branching import core_set, primitive_root
from q2perm.catalog import canonical_system, onekk, p12_realization1, p12_realization2
from q2perm.endo import (
    ENDO_TABLE, MEMBERSHIP_ROWS, SPECTRAL_ROWS, check_candidate_U, chi_rep,
    endo_table_report, flipflop_intertwiner_check, rep_of_endo,
)
import test_properties as props


def _ok(n, text):
    print(f"criterion {n:2d} PASS: {text}")


def test_criterion_01_canonical_reconstruction():
    sys = canonical_system()
    ext = extendible(sys)
    assert ext.verdict is True
    q2 = build_tau(sys, ext.matchings[0])
    assert q2.tau_is_exact()
    assert equals(q2.tau, translation(INTEGERS, 1))
    parts = q2_components(q2, window=256)
    assert len(parts) == 1
    cls = classify_component(parts, parts.components[0])
    assert cls.kind == "canonical"
    _ok(1, "canonical pair rebuilt exactly with tau = n+1, one component, "
           "canonical class")


def test_criterion_02_p12_realization1_unitary():
    sys = p12_realization1()
    q2 = build_tau_pure(sys)
    tau = q2.tau
    assert (tau.apply(2), tau.apply(4), tau.apply(1), tau.apply(11)) == (3, 1, 6, 10)
    for k in range(3, 5001):
        assert tau.apply(2 * k) == 2 * k - 1, k
    for k0, h0 in ((3, 12), (7, 2)):
        assert tau.apply(k0) == h0
        for n in range(1, 11):
            source = (1 << n) * k0 - ((1 << n) - 1)
            assert tau.apply(source) == (1 << n) * h0, (k0, h0, n)
    # construction oracle: the remaining odd indices follow n -> n-1
    exceptional = {1, 11, 3, 7}
    exceptional |= {(1 << n) * 3 - ((1 << n) - 1) for n in range(1, 14)}
    exceptional |= {(1 << n) * 7 - ((1 << n) - 1) for n in range(1, 14)}
    for m in range(15, 2001, 2):
        if m not in exceptional:
            assert tau.apply(m) == m - 1, m
    _ok(2, "realization-1 unitary matches the worked example, both "
           "exceptional geometric sequences included (n <= 10)")


def test_criterion_03_both_realizations():
    q2s = []
    for sys in (p12_realization1(), p12_realization2()):
        assert is_pure(sys.sigma1)[0] is True
        assert is_pure(sys.sigma2)[0] is True
        ext = extendible(sys)
        assert ext.verdict is True
        assert count_extensions(sys).n == 1
        q2s.append(build_tau_pure(sys, synthesize=False))
    verdict, note = unitary_equiv_tau(q2s[0].tau, q2s[1].tau)
    assert verdict is True, note

    def tau2_oracle(m):
        if m % 2 == 0:
            n = m // 2
            return m + 1 if n % 2 else m - 3
        k = 1
        x = m + 1
        while x % 2 == 0:
            x //= 2
            k += 1
        n = (m + (1 << (k - 1)) + 1) >> k
        return (1 << k) * n + (1 << (k - 1)) if n % 2 \
            else (1 << k) * n - 3 * (1 << (k - 1))

    tau2 = q2s[1].tau
    for m in range(1, 10 ** 4 + 1):
        assert tau2.apply(m) == tau2_oracle(m), m
    _ok(3, "both realizations pure, unique extensions, unitarily "
           "equivalent; realization-2 formulas hold on the 10^4 window")


def _primitive_words(lo, hi):
    for k in range(lo, hi + 1):
        for bits in itertools.product("12", repeat=k):
            word = "".join(bits)
            if len(primitive_root(word)) == k:
                yield word


def test_criterion_04_kawamura_battery():
    count = 0
    for word in _primitive_words(2, 8):
        sys = kawamura_finite(word)
        assert validate_branching(sys).ok, word
        assert sys.apply_word(word, len(word)) == len(word), word
        assert is_pure(sys.sigma1)[0] is True, word
        assert is_pure(sys.sigma2)[0] is True, word
        q2 = build_tau_pure(sys, synthesize=False)
        report = verify_q2(q2, window=10 ** 4, point_bound=2)
        assert report.passed, (word, report.failing())
        assert regularity_verdict(sys, depth=64).kind == "mf", word
        count += 1
    assert count == 470
    _ok(4, f"all {count} primitive words of length 2..8: validated, word "
           f"cycle, pure, verified on the 10^4 window, multiplicity-free")


def test_criterion_05_extension_counting():
    for k in range(2, 7):
        sys = onekk(k)
        ext = extendible(sys)
        assert ext.verdict is True, k
        assert count_extensions(sys).n == k, k
        family = extension_family(sys)
        assert len(family) == k
        taus = [q2.tau for q2 in family]
        for i in range(k):
            assert verify_q2(family[i], window=200).passed
            for j in range(i + 1, k):
                verdict, _ = unitary_equiv_tau(taus[i], taus[j])
                assert verdict is True, (k, i, j)
        assert extendible(kawamura_finite("1" * k)).verdict is False, k
    _ok(5, "constant-word direct sums: Finite(k) extensions, all pairwise "
           "equivalent; single constant words do not extend")


def test_criterion_06_spectral_reproduction():
    sys = rep_of_endo("13")
    core2 = core_set(sys.sigma2)
    assert sorted(core2.members) == [-1, 0]
    spec2 = point_spectrum(sys.sigma2, core2)
    assert spec2.groups == ((1, 2),)
    assert is_pure(sys.sigma1)[0] is True
    spec1 = point_spectrum(sys.sigma1)
    assert spec1.pure and spec1.groups == ()
    assert extendible(sys).verdict is False
    _ok(6, "row 13: eigenvalue 1 with multiplicity 2 at {-1, 0}, other "
           "image pure, not extendible")


def test_criterion_07_endo_table():
    rows = {r.name: r for r in endo_table_report()}
    assert len(rows) == 24
    for name in SPECTRAL_ROWS:
        assert rows[name].rep_extendible is False, name
    yes_rows = [n for n, s in ENDO_TABLE.items() if s.u_candidate is not None]
    assert len(yes_rows) == 10
    for name in yes_rows:
        assert rows[name].candidate.passed, name
    r134 = check_candidate_U(ENDO_TABLE["134"].refutation_candidate, "134")
    assert r134.relation1 is True and r134.relation2 is False
    assert r134.witness2 is not None
    r12 = check_candidate_U(ENDO_TABLE["12"].refutation_candidate, "12")
    assert not r12.passed and r12.witness1 is not None
    for name in MEMBERSHIP_ROWS:
        assert rows[name].rep_extendible is True
        assert "asserted" in rows[name].level
    _ok(7, "24 rows compile; 8 spectral refutations at the orbit level; "
           "10 candidates verified; the two refuted candidates fail with "
           "explicit witnesses")


def test_criterion_08_decompositions():
    from q2perm.endo import q2_of_endo
    p23 = q2_components(q2_of_endo("23"), window=128)
    assert len(p23) == 2
    assert all(classify_component(p23, c).kind == "canonical"
               for c in p23.components)

    q14 = q2_of_endo("14")
    p14 = q2_components(q14, window=128)
    assert len(p14) == 1
    o14 = __import__("q2perm").o2_components(rep_of_endo("14"), window=128)
    words = {classify_component(o14, c).index.word for c in o14.components}
    assert words == {"11", "22"}
    report14 = q2_decomposable(q14, window=128)
    assert report14.decomposable is False
    assert report14.aggregate.kind == "not_perm_decomposable"

    report3 = q2_decomposable(chi_rep(1), window=128)
    assert report3.decomposable is True
    kinds = sorted(c.kind for c in report3.classes)
    assert kinds == ["canonical", "infinite_pi"]
    pi = next(c for c in report3.classes if c.kind == "infinite_pi")
    assert pi.index.per == "12" and pi.tau_orbits == 2
    _ok(8, "row 23 splits into two canonical components; row 14 is one "
           "component typed 11/22 and not decomposable; the odd-translation "
           "rep splits as canonical plus the periodic-tail class with two "
           "unitary orbits")


def test_criterion_09_regularity_witnesses():
    verdict = regularity_verdict(kawamura_finite("1212"), depth=8)
    assert verdict.kind == "notregular"
    n, word, image = verdict.witness
    assert len(word) <= 8 and n != image
    sys = kawamura_finite("1212")
    assert sys.word_pair_apply(word, "", n) == image
    c1, c2 = coding(sys, n, 32), coding(sys, image, 32)
    assert c1.digits == c2.digits and c1.certified_tail is not None
    assert regularity_verdict(canonical_system()).kind == "mf"
    _ok(9, "imprimitive word 1212 yields a verified partial-injectivity "
           "witness at depth <= 8; the canonical restriction is "
           "multiplicity-free")


def test_criterion_10_property_suites():
    assert props.check_no_periodic_points(1000, seed=0)
    assert props.check_coding_symmetry(1000, seed=0)
    assert props.check_round_trip(1000, seed=0)
    assert props.check_compose_equals_coherence(1000, seed=0)
    assert props.check_flipflop_involution(200, seed=0)
    assert flipflop_intertwiner_check(10 ** 4).passed
    _ok(10, "randomized suites (fixed seed): no periodic points, coding "
            "symmetry, round trips, compose/equals coherence, exchange "
            "involution, intertwiner window")


def test_criterion_11_states():
    z = Phase.rational(1, 5)
    for k in range(1, 11):
        report = omega_z_consistency(z, k)
        assert report.level_sums_ok and report.projection_values_ok
        assert report.factor_nonvanishing and not report.hypothesis_flag
    import random
    rng = random.Random(0)
    for _ in range(100):
        alpha = "".join(rng.choice("12") for _ in range(rng.randrange(0, 6)))
        beta = "".join(rng.choice("12") for _ in range(rng.randrange(0, 6)))
        h = rng.randrange(-8, 9)
        value = omega_z(alpha, beta, h, z)
        if len(alpha) != len(beta):
            assert value.magnitude == 0
        else:
            assert value.magnitude == Fraction(1, 1 << len(alpha))
            assert value.phase.rotation == Fraction(h, 5) % 1
    forbidden = set()
    h = 1
    while (1 << h) - 1 <= 1 << 20:
        base = (1 << h) - 1
        while base <= 1 << 20:
            forbidden.add(base)
            base *= 2
        h += 1
    for q in list(range(1, 300)) + [2 ** 6, 3 * 2 ** 10, 7 * 2 ** 5, 31 * 4,
                                    5 * 2 ** 8, 11 * 2 ** 4]:
        assert hypothesis_flag(Phase.rational(1, q)) == (q in forbidden), q
    _ok(11, "level sums exactly 1 and projection values exact for k <= 10; "
            "delta/phase behavior on 100 random monomials; order flag "
            "matches the forbidden set exactly")

"""Branching function systems of order 2 and their coding structure.

A branching system is a pair of injections with disjoint ranges covering the
index set.  Every index then has a unique preimage chain, whose digit string
is the coding sequence.  When both injections have expansive affine tails the
backward walk always lands on one of finitely many parent-cycles inside a
computable zone; the cycle data turns coding sequences into exact rationals
(their 2-adic values), which is what the classification machinery runs on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .maps import (
    AffineRule, IndexDomain, LazyBijection, MapDomainError, NAT1,
    OrbitStructure, RuleInjection, StructuralError, ValidationReport,
    covers_domain, exception_zone_bound, _image_components, iterate_map,
    range_collisions, validate_injection,
)

DIGITS = "12"


def letter_bit(letter: str) -> int:
    """Coding letter to binary digit: the odd branch is the 1-bit."""
    return 1 if letter == "1" else 0


def word_offset(word: str) -> int:
    """Binary value t(w) with the first letter least significant."""
    t = 0
    for letter in reversed(word):
        t = 2 * t + letter_bit(letter)
    return t


def word_from_offset(t: int, length: int) -> str:
    word = []
    for _ in range(length):
        word.append("1" if t & 1 else "2")
        t >>= 1
    return "".join(word)


def primitive_root(word: str) -> str:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word == word[:d] * (n // d):
            return word[:d]
    return word


def min_rotation(word: str) -> str:
    return min(word[i:] + word[:i] for i in range(len(word)))


def frac_mod1(q: Fraction) -> Fraction:
    return q - (q.numerator // q.denominator)


# ---------------------------------------------------------------------------
# Branching systems
# ---------------------------------------------------------------------------

class BranchingSystem:
    """Pair (sigma1, sigma2) with disjoint ranges covering the domain."""

    __slots__ = ("sigma1", "sigma2", "_anchors", "tail_oracle", "label")

    def __init__(self, sigma1, sigma2, label=""):
        if sigma1.domain != sigma2.domain:
            raise StructuralError("branching maps must share a domain")
        self.sigma1 = sigma1
        self.sigma2 = sigma2
        self._anchors = None
        self.tail_oracle = None
        self.label = label

    @property
    def domain(self) -> IndexDomain:
        return self.sigma1.domain

    def sigma(self, letter: str):
        return self.sigma1 if letter == "1" else self.sigma2

    def parent(self, n):
        """Unique (letter, preimage) with sigma_letter(preimage) = n."""
        m = self.sigma1.invert(n)
        if m is not None:
            return "1", m
        m = self.sigma2.invert(n)
        if m is not None:
            return "2", m
        raise MapDomainError(f"{n} is in neither range (system not covering)")

    def apply_word(self, word: str, n):
        """Image of the basis index under the word isometry S_word."""
        for letter in reversed(word):
            n = self.sigma(letter).apply(n)
        return n

    def unapply_word(self, word: str, n):
        """S_word* action: strips the word as a coding prefix, or None."""
        for letter in word:
            n = self.sigma(letter).invert(n)
            if n is None:
                return None
        return n

    def word_map(self, word: str):
        """The composite map implementing S_word on indices."""
        from .maps import compose
        out = None
        for letter in word:
            out = self.sigma(letter) if out is None else compose(out, self.sigma(letter))
        if out is None:
            raise StructuralError("empty word has no map")
        return out

    def word_pair_apply(self, alpha: str, beta: str, n):
        """Index image under S_alpha S_beta*, or None when annihilated."""
        m = self.unapply_word(beta, n)
        if m is None:
            return None
        return self.apply_word(alpha, m)

    def flipped(self) -> "BranchingSystem":
        return BranchingSystem(self.sigma2, self.sigma1,
                               label=f"flip({self.label})" if self.label else "")

    def anchors(self) -> "AnchorAnalysis":
        if self._anchors is None:
            self._anchors = AnchorAnalysis(self)
        return self._anchors

    def to_json(self) -> dict:
        return {"sigma1": self.sigma1.to_json(), "sigma2": self.sigma2.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "BranchingSystem":
        return cls(RuleInjection.from_json(data["sigma1"]),
                   RuleInjection.from_json(data["sigma2"]))

    def __repr__(self):
        tag = self.label or "system"
        return f"BranchingSystem<{tag} on {self.domain.kind}>"


def validate_branching(sys: BranchingSystem) -> ValidationReport:
    """Disjointness and covering of the two ranges, decided exactly."""
    if not isinstance(sys.sigma1, RuleInjection):
        return _validate_branching_generic(sys)
    rep1 = validate_injection(sys.sigma1)
    rep2 = validate_injection(sys.sigma2)
    errors = [f"sigma1: {e}" for e in rep1.errors]
    errors += [f"sigma2: {e}" for e in rep2.errors]
    collisions = list(rep1.collisions) + list(rep2.collisions)
    if not rep1.total:
        errors.append(f"sigma1 not total (e.g. {rep1.uncovered[:3]})")
    if not rep2.total:
        errors.append(f"sigma2 not total (e.g. {rep2.uncovered[:3]})")
    overlap = range_collisions(sys.sigma1, sys.sigma2, cap=4)
    if overlap:
        errors.append(f"ranges intersect, witness {overlap[0][0]}")
        collisions += overlap
    comps = [_image_components(sys.sigma1), _image_components(sys.sigma2)]
    cover_ok, witness = covers_domain(comps, sys.domain)
    uncovered = [] if cover_ok else [witness]
    if not cover_ok:
        errors.append(f"ranges do not cover the domain, witness {witness}")
    ok = not errors and rep1.ok and rep2.ok
    return ValidationReport(ok, rep1.total and rep2.total and cover_ok,
                            rep1.injective and rep2.injective and not overlap,
                            errors, collisions, uncovered)


def _validate_branching_generic(sys: BranchingSystem, window: int = 512):
    """Window-checked branching report for maps without affine closed form."""
    errors = []
    for n in sys.domain.window(window):
        hits = [ltr for ltr in DIGITS if sys.sigma(ltr).invert(n) is not None]
        if len(hits) != 1:
            errors.append(f"index {n} lies in {len(hits)} ranges")
            break
    ok = not errors
    report = ValidationReport(ok, ok, ok, errors)
    return report


def relabel_affine(f: RuleInjection, a: int, b: int,
                   domain: IndexDomain) -> RuleInjection:
    """Conjugate f by the relabeling n -> a*n + b (a > 0)."""
    M = f.modulus * a
    rules = []
    for rule in f.rules.values():
        rules.append(AffineRule((a * rule.residue + b) % M, rule.slope,
                                a * rule.offset + b * (1 - rule.slope)))
    exceptions = {a * k + b: a * v + b for k, v in f.exceptions.items()}
    removed = {a * x + b for x in f.removed}
    return RuleInjection(domain, M, rules, exceptions, removed)


def _merge_rule_maps(f: RuleInjection, g: RuleInjection) -> RuleInjection:
    """Union of two maps with disjoint residue coverage (same modulus lcm)."""
    from math import lcm
    M = lcm(f.modulus, g.modulus)
    rules = {}
    for src in (f, g):
        for r in range(M):
            rule = src.rules.get(r % src.modulus)
            if rule is None:
                continue
            if r in rules:
                raise StructuralError("merged maps overlap on a residue")
            rules[r] = AffineRule(r, rule.slope, rule.offset)
    exceptions = dict(f.exceptions)
    exceptions.update(g.exceptions)
    return RuleInjection(f.domain, M, rules.values(), exceptions,
                         f.removed | g.removed)


def direct_sum(a: BranchingSystem, b: BranchingSystem) -> BranchingSystem:
    """Disjoint union of two systems on {1,2,...}, interleaved odd/even."""
    if a.domain != NAT1 or b.domain != NAT1:
        raise StructuralError("direct_sum implemented on the domain {1,2,...}")
    out = []
    for sa, sb in ((a.sigma1, b.sigma1), (a.sigma2, b.sigma2)):
        fa = relabel_affine(sa, 2, -1, NAT1)
        fb = relabel_affine(sb, 2, 0, NAT1)
        # odd inputs host the first summand, even inputs the second; the
        # relabeled rule of one summand must not claim the other's classes
        fa = _restrict_parity(fa, odd=True)
        fb = _restrict_parity(fb, odd=False)
        out.append(_merge_rule_maps(fa, fb))
    label = f"{a.label or 'A'}(+){b.label or 'B'}"
    return BranchingSystem(out[0], out[1], label=label)


def _restrict_parity(f: RuleInjection, odd: bool) -> RuleInjection:
    want = 1 if odd else 0
    if f.modulus % 2:
        raise StructuralError("parity restriction needs an even modulus")
    rules = [r for r in f.rules.values() if r.residue % 2 == want]
    return RuleInjection(f.domain, f.modulus, rules, f.exceptions, f.removed)


# ---------------------------------------------------------------------------
# Cores and purity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoreSet:
    """The set cap_n sigma^n(domain), as the union of sigma-cycles."""

    members: frozenset
    cycles: tuple          # tuple of cycles, each a tuple in forward order
    complete: bool
    certificate: str = ""


def _sigma_cycles_in_zone(sigma: RuleInjection):
    bound = exception_zone_bound(sigma)
    lower = sigma.domain.lower
    lo = lower if lower is not None else -bound
    cycles = []
    on_cycle = set()
    zone = [x for x in range(lo, bound + 1) if sigma.domain.contains(x)]
    zone_set = set(zone)
    for start in zone:
        if start in on_cycle:
            continue
        x = start
        for _ in range(len(zone) + 1):
            if not sigma.defined_at(x):
                break
            x = sigma.apply(x)
            if x == start:
                cyc = [start]
                y = sigma.apply(start)
                while y != start:
                    cyc.append(y)
                    y = sigma.apply(y)
                cycles.append(tuple(cyc))
                on_cycle.update(cyc)
                break
            if x not in zone_set:
                break
    return cycles, bound


def core_set(sigma, budget: int = 10 ** 6) -> CoreSet:
    """Exact core when sigma has expansive tails; flagged partial otherwise.

    An index lies in the core iff it admits an infinite backward chain; with
    expansive tails every such chain is trapped in the exception zone and
    must cycle, so the core is exactly the union of forward cycles there.
    """
    if hasattr(sigma, "core_info"):
        return sigma.core_info()
    if not isinstance(sigma, RuleInjection):
        return CoreSet(frozenset(), (), False, "no closed form")
    cycles, bound = _sigma_cycles_in_zone(sigma)
    members = frozenset(itertools.chain.from_iterable(cycles))
    expansive = all(abs(r.slope) >= 2 for r in sigma.rules.values())
    if expansive:
        cert = (f"expansive tails: every backward chain enters |n|<={bound} "
                f"and must cycle; cycles enumerated exhaustively")
        return CoreSet(members, tuple(cycles), True, cert)
    return CoreSet(members, tuple(cycles), False,
                   "non-expansive tail present; cycle search not exhaustive")


def is_pure(sigma) -> tuple:
    """(verdict, certificate); verdict None when the core is uncertified."""
    core = core_set(sigma)
    if not core.complete:
        return None, core.certificate
    return not core.members, core.certificate


def orbit_structure(sigma, core: CoreSet = None) -> OrbitStructure:
    """Cycle-length multiset of sigma restricted to its core."""
    if core is None:
        core = core_set(sigma)
    if not core.complete:
        raise StructuralError(
            "core not certified complete; enlarge the budget or the map class")
    counts = {}
    for cyc in core.cycles:
        counts[len(cyc)] = counts.get(len(cyc), 0) + 1
    return OrbitStructure(tuple(sorted(counts.items())), 0, True,
                          "restriction of an expansive map to its core")


# ---------------------------------------------------------------------------
# Coding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CodingPrefix:
    digits: str
    certified_tail: tuple = None     # (preperiod, period) or None

    def digit(self, i: int) -> str:
        if i < len(self.digits):
            return self.digits[i]
        if self.certified_tail is None:
            raise IndexError("prefix exhausted and tail uncertified")
        pre, per = self.certified_tail
        if i < len(pre):
            return pre[i]
        return per[(i - len(pre)) % len(per)]


def coding(sys: BranchingSystem, n, depth: int = 64,
           budget: int = 10 ** 6) -> CodingPrefix:
    """First coding digits of n; tail certified when the walk cycles."""
    seen = {n: 0}
    digits = []
    x = n
    for step in range(budget):
        if sys.tail_oracle is not None:
            tail = sys.tail_oracle(x)
            if tail is not None:
                pre = "".join(digits) + tail[0]
                return CodingPrefix(_expand(pre, tail[1], depth), (pre, tail[1]))
        try:
            letter, parent = sys.parent(x)
        except MapDomainError:
            return CodingPrefix("".join(digits[:depth]))
        digits.append(letter)
        x = parent
        if x in seen:
            i = seen[x]
            pre, per = "".join(digits[:i]), "".join(digits[i:])
            return CodingPrefix(_expand(pre, per, depth), (pre, per))
        seen[x] = step + 1
    return CodingPrefix("".join(digits[:depth]))


def _expand(pre: str, per: str, depth: int) -> str:
    s = pre
    while len(s) < depth:
        s += per
    return s[:depth]


def factorize(sys: BranchingSystem, n, budget: int = 10 ** 6):
    """Unique (k, m) with n = sigma1^k(sigma2(m)); k = 0 when n in ran sigma2."""
    x = n
    seen = set()
    for k in range(budget):
        m = sys.sigma2.invert(x)
        if m is not None:
            return k, m
        if x in seen:
            raise StructuralError(
                f"{n} lies in the core of sigma1; factorization impossible")
        seen.add(x)
        x = sys.sigma1.invert(x)
        if x is None:
            raise MapDomainError(f"{n} escaped both ranges during factorization")
    raise StructuralError("factorization budget exhausted")


def separating_word(sys: BranchingSystem, n0, others, depth: int = 64):
    """Word alpha that is a coding prefix of n0 and of none of the others.

    Returns (word, verdict); verdict is False (Inconclusive) when some other
    index shares n0's coding prefix through the whole depth.
    """
    c0 = coding(sys, n0, depth)
    need = 0
    for other in others:
        if other == n0:
            return "", False
        c1 = coding(sys, other, depth)
        split = None
        for i in range(depth):
            if c0.digit(i) != c1.digit(i):
                split = i + 1
                break
        if split is None:
            return "", False
        need = max(need, split)
    return c0.digits[:need], True


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalue groups (n, m): the n-th roots of unity, multiplicity m."""

    groups: tuple
    pure: bool
    caveat: str = ""

    def eigenvalue_orders(self):
        return [n for n, _ in self.groups]


def point_spectrum(sigma, core: CoreSet = None) -> SpectrumReport:
    """Point spectrum of the isometry induced by sigma.

    Finite orbits of the core contribute their roots of unity; a pure map
    has empty point spectrum.
    """
    if core is None:
        core = core_set(sigma)
    caveat = "" if core.complete else "core not certified complete"
    counts = {}
    for cyc in core.cycles:
        counts[len(cyc)] = counts.get(len(cyc), 0) + 1
    return SpectrumReport(tuple(sorted(counts.items())),
                          core.complete and not core.members, caveat)


def char_poly_factors(perm: dict):
    """Sorted cycle lengths of a finite permutation {x: perm(x)}."""
    if set(perm.values()) != set(perm.keys()):
        raise StructuralError("not a permutation of its finite support")
    lengths = []
    seen = set()
    for start in perm:
        if start in seen:
            continue
        x, size = start, 0
        while True:
            seen.add(x)
            x = perm[x]
            size += 1
            if x == start:
                break
        lengths.append(size)
    return sorted(lengths)


def char_poly_string(lengths) -> str:
    terms = [f"(x^{n} - 1)" if n > 1 else "(x - 1)" for n in lengths]
    return "".join(terms)


# ---------------------------------------------------------------------------
# Anchor analysis: parent-cycles, 2-adic coding values, cosets and fibers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnchorCycle:
    members: tuple      # members[i+1] = parent(members[i]), cyclically
    letters: str        # letters[i] is the coding digit of members[i]
    cvalues: tuple      # exact coding value of each member

    def word_at(self, i: int) -> str:
        return self.letters[i:] + self.letters[:i]


@dataclass(frozen=True)
class Coset:
    """Translation coset of coding values: everything tau-reachable mod Z."""

    key: Fraction          # representative value mod 1
    base_value: Fraction   # purely periodic representative c(z)
    tail: str              # the periodic digit word of that representative
    fiber: tuple           # all indices whose coding equals that expansion


class AnchorAnalysis:
    """Backward-walk structure of a system with expansive affine tails."""

    def __init__(self, sys: BranchingSystem):
        self.sys = sys
        self.ok = (
            isinstance(sys.sigma1, RuleInjection)
            and isinstance(sys.sigma2, RuleInjection)
            and sys.domain.kind != "zxn"
            and all(abs(r.slope) >= 2 for r in sys.sigma1.rules.values())
            and all(abs(r.slope) >= 2 for r in sys.sigma2.rules.values())
        )
        self.cycles = ()
        self._member_pos = {}
        self._anchor_memo = {}
        self._cosets = None
        if self.ok:
            self.bound = max(exception_zone_bound(sys.sigma1),
                             exception_zone_bound(sys.sigma2))
            self._build()

    # -- construction --------------------------------------------------------

    def _build(self):
        sys = self.sys
        lower = sys.domain.lower
        lo = lower if lower is not None else -self.bound
        zone = [x for x in range(lo, self.bound + 1) if sys.domain.contains(x)]
        zone_set = set(zone)
        cycles = []
        for start in zone:
            if start in self._member_pos:
                continue
            x, path, path_pos = start, [], {}
            while True:
                if x in path_pos:
                    entry = path_pos[x]
                    members = tuple(path[entry:])
                    letters = "".join(sys.parent(m)[0] for m in members)
                    cvals = _cycle_cvalues(letters)
                    cid = len(cycles)
                    cycles.append(AnchorCycle(members, letters, cvals))
                    for i, m in enumerate(members):
                        self._member_pos[m] = (cid, i)
                    break
                if x in self._member_pos:
                    break
                path_pos[x] = len(path)
                path.append(x)
                x = sys.parent(x)[1]
                if x not in zone_set:
                    raise StructuralError(
                        "parent walk escaped the zone; bound computation wrong")
        self.cycles = tuple(cycles)

    # -- walks ----------------------------------------------------------------

    def anchor(self, n):
        """(cycle_id, position, prefix_value, prefix_len) of the walk from n."""
        memo = self._anchor_memo
        hit = memo.get(n)
        if hit is not None:
            return hit
        pos = self._member_pos.get(n)
        if pos is not None:
            data = (pos[0], pos[1], 0, 0)
            memo[n] = data
            return data
        path = []
        x = n
        while True:
            hit = memo.get(x)
            if hit is None:
                pos = self._member_pos.get(x)
                if pos is not None:
                    hit = (pos[0], pos[1], 0, 0)
            if hit is not None:
                cid, cpos, a, s = hit
                for y, bit in reversed(path):
                    a = bit + 2 * a
                    s += 1
                    memo[y] = (cid, cpos, a, s)
                return memo[n] if path else hit
            letter, parent = self.sys.parent(x)
            path.append((x, letter_bit(letter)))
            x = parent

    def cvalue(self, n) -> Fraction:
        cid, cpos, a, s = self.anchor(n)
        return a + (1 << s) * self.cycles[cid].cvalues[cpos]

    def coding_word(self, n, depth: int) -> str:
        cid, cpos, a, s = self.anchor(n)
        prefix = word_from_offset(a, s)
        cyc = self.cycles[cid]
        return _expand(prefix, cyc.word_at(cpos), depth)

    # -- cosets and fibers ----------------------------------------------------

    def cosets(self):
        if self._cosets is None:
            table = {}
            for cyc in self.cycles:
                for i, m in enumerate(cyc.members):
                    key = frac_mod1(cyc.cvalues[i])
                    if key in table:
                        continue
                    word = cyc.word_at(i)
                    fiber = self._fiber_of_word(word)
                    table[key] = Coset(key, cyc.cvalues[i], word, fiber)
            self._cosets = dict(sorted(table.items()))
        return self._cosets

    def _fiber_of_word(self, word: str) -> tuple:
        root = primitive_root(word)
        out = []
        for cyc in self.cycles:
            for i, m in enumerate(cyc.members):
                if primitive_root(cyc.word_at(i)) == root:
                    out.append(m)
        return tuple(sorted(out))

    # -- tau-orbit machinery ---------------------------------------------------

    def tau_orbit_reps(self):
        """One index per tau-orbit: the fiber members, coset by coset."""
        reps = []
        for coset in self.cosets().values():
            reps.extend(coset.fiber)
        return reps

    def tau_orbit_count(self) -> int:
        return sum(len(c.fiber) for c in self.cosets().values())

    def orbit_id(self, tau, n, budget: int = 10 ** 5):
        """Representative of the tau-orbit of n (exact identification)."""
        value = self.cvalue(n)
        coset = self.cosets()[frac_mod1(value)]
        k = value - coset.base_value
        if k.denominator != 1:
            raise StructuralError("coset arithmetic produced a non-integer step")
        m = iterate_map(tau, n, -int(k))
        if m not in coset.fiber:
            raise StructuralError(
                f"orbit identification failed at {n}; tau inconsistent "
                f"with the coding structure")
        return m

    def q2_orbit_groups(self, tau):
        """Partition of tau-orbits under sigma-moves (exact component data).

        sigma_i maps each tau-orbit into a single tau-orbit (the defining
        relation), so the component graph on orbit representatives is finite
        and complete.
        """
        reps = self.tau_orbit_reps()
        index = {m: i for i, m in enumerate(reps)}
        parent = list(range(len(reps)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        def union(i, j):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj

        for m in reps:
            for sigma in (self.sys.sigma1, self.sys.sigma2):
                target = self.orbit_id(tau, sigma.apply(m))
                union(index[m], index[target])
        groups = {}
        for i, m in enumerate(reps):
            groups.setdefault(find(i), []).append(m)
        return [sorted(g) for g in groups.values()]

    # -- regularity certificates -----------------------------------------------

    def regularity_certificate(self):
        """('mf' | 'regular' | 'notregular', witness_or_None).

        All cycle words primitive and with pairwise distinct rotation
        classes: the coding map is injective.  All primitive: collisions
        only along word-cycles, i.e. the partial-injectivity condition
        holds.  An imprimitive cycle word yields a concrete witness pair.
        """
        roots = []
        for cyc in self.cycles:
            word = cyc.word_at(0)
            root = primitive_root(word)
            if len(root) < len(word):
                z = cyc.members[0]
                image = self.sys.apply_word(root, z)
                return "notregular", (z, root, image)
            roots.append(min_rotation(root))
        if len(set(roots)) == len(roots):
            return "mf", None
        dup = next(r for r in roots if roots.count(r) > 1)
        return "regular", dup


def _cycle_cvalues(letters: str) -> tuple:
    p = len(letters)
    denom = 1 - (1 << p)
    out = []
    for i in range(p):
        b = sum(letter_bit(letters[(i + j) % p]) << j for j in range(p))
        out.append(Fraction(b, denom))
    return tuple(out)

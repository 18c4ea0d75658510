"""Multi-index taxonomy, cyclic-representation constructors, decomposition.

Cyclic permutative representations are classified by a multi-index: a finite
word with a fixed-vector word-cycle, or an eventually periodic tail class.
Components of a representation are read off the anchor-cycle structure: each
backward-walk cycle generates one cyclic piece, and the unitary glues them
along coding cosets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .maps import (
    LazyBijection, RuleInjection, StructuralError, ZXN, NAT1,
)
from .branching import (
    AnchorAnalysis, BranchingSystem, CoreSet, coding, min_rotation,
    primitive_root,
)
from .extension import Q2System


# ---------------------------------------------------------------------------
# Multi-indices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiIndex:
    kind: str        # "finite" | "evper"
    word: str = ""   # finite case
    pre: str = ""    # eventually periodic case (normal form keeps it empty)
    per: str = ""

    def __repr__(self):
        if self.kind == "finite":
            return f"P-index({self.word})"
        pre = self.pre or ""
        return f"P-index({pre}({self.per})^inf)"

    def display(self) -> str:
        if self.kind == "finite":
            return self.word
        return f"{self.pre}({self.per})*"


@dataclass(frozen=True)
class NormalizedIndex:
    index: MultiIndex
    proper_power: bool = False
    root: str = ""


def _check_word(word: str):
    if not word or any(c not in "12" for c in word):
        raise StructuralError(f"multi-index must be a nonempty word over 12: {word!r}")


def normalize_multiindex(word: str = None, pre: str = None,
                         per: str = None) -> NormalizedIndex:
    """Primitive-period normal form.

    Finite words are kept verbatim with a proper-power report.  Eventually
    periodic indices are reduced to their tail class: primitive period in
    minimal rotation, preperiod absorbed.
    """
    if word is not None:
        _check_word(word)
        root = primitive_root(word)
        return NormalizedIndex(MultiIndex("finite", word=word),
                               len(root) < len(word), root)
    _check_word(per)
    if pre and any(c not in "12" for c in pre):
        raise StructuralError("preperiod must be a word over 12")
    root = min_rotation(primitive_root(per))
    return NormalizedIndex(MultiIndex("evper", per=root), False, root)


def is_irreducible_PI(index: MultiIndex) -> bool:
    """Finite and primitive, or infinite and not eventually periodic.

    Representable infinite indices are all eventually periodic, so the
    infinite branch is always False here.
    """
    if index.kind == "finite":
        return len(primitive_root(index.word)) == len(index.word)
    return False


def flipflop_image(obj):
    """Digit swap 1 <-> 2 on indices; map swap on systems (an involution)."""
    if isinstance(obj, MultiIndex):
        table = str.maketrans("12", "21")
        return MultiIndex(obj.kind, obj.word.translate(table),
                          obj.pre.translate(table), obj.per.translate(table))
    if isinstance(obj, BranchingSystem):
        return obj.flipped()
    if isinstance(obj, str):
        return obj.translate(str.maketrans("12", "21"))
    raise StructuralError(f"cannot flip {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Kawamura realizations
# ---------------------------------------------------------------------------

def kawamura_finite(index) -> BranchingSystem:
    """Concrete branching system of cyclic type for a finite word.

    Initial segment {1..k} carries the word cycle (the k-th basis index is
    fixed by the word isometry); both maps double beyond it.
    """
    word = index.word if isinstance(index, MultiIndex) else index
    _check_word(word)
    k = len(word)
    exc1 = {1: k if word[0] == "1" else k + 1}
    exc2 = {1: k + 1 if word[0] == "1" else k}
    for l in range(2, k + 1):
        if word[l - 1] == "1":
            exc1[l] = l - 1
            exc2[l] = k + l
        else:
            exc1[l] = k + l
            exc2[l] = l - 1
    sigma1 = RuleInjection(NAT1, 1, [(0, 2, -1)], exc1)
    sigma2 = RuleInjection(NAT1, 1, [(0, 2, 0)], exc2)
    return BranchingSystem(sigma1, sigma2, label=f"P({word})")


class ProductZxNInjection:
    """Coordinate-wise injection of Z x N realizing an infinite-index map.

    The first coordinate translates by -1; the second doubles (to odd or
    even) except on the marked track m = 1, where the index letters act.
    """

    __slots__ = ("letter", "pre", "per")
    domain = ZXN

    def __init__(self, letter: str, pre: str, per: str):
        self.letter = letter
        self.pre = pre
        self.per = per

    def _j(self, n: int) -> str:
        if n <= 0:
            return "1"
        if n <= len(self.pre):
            return self.pre[n - 1]
        return self.per[(n - 1 - len(self.pre)) % len(self.per)]

    def _track_image(self, n: int) -> int:
        j = self._j(n)
        if self.letter == "1":
            return 1 if j == "1" else 2
        return 2 if j == "1" else 1

    def apply(self, nm):
        n, m = nm
        if m >= 2:
            return (n - 1, 2 * m - 1) if self.letter == "1" else (n - 1, 2 * m)
        return (n - 1, self._track_image(n))

    __call__ = apply

    def invert(self, nm):
        n, m = nm
        if m in (1, 2):
            return (n + 1, 1) if self._track_image(n + 1) == m else None
        if self.letter == "1":
            return (n + 1, (m + 1) // 2) if m % 2 else None
        return (n + 1, m // 2) if m % 2 == 0 else None

    def defined_at(self, nm) -> bool:
        return self.domain.contains(nm)

    def core_info(self) -> CoreSet:
        letters = set(self.per)
        if len(letters) == 2:
            cert = ("second coordinate halves and the marked track only "
                    "admits finitely many consecutive backward steps "
                    "(the period uses both letters), so no infinite "
                    "backward chain exists")
            return CoreSet(frozenset(), (), True, cert)
        return CoreSet(frozenset(), (), False,
                       "constant period: backward track rays are infinite")

    def to_json(self) -> dict:
        return {"domain": "zxn", "kind": "product", "letter": self.letter,
                "pre": self.pre, "per": self.per}

    def __repr__(self):
        return f"ProductZxNInjection(letter={self.letter}, tail={self.pre}({self.per})*)"


def kawamura_infinite(index: MultiIndex) -> BranchingSystem:
    """Branching system on Z x N for an eventually periodic infinite index."""
    if index.kind != "evper":
        raise StructuralError("kawamura_infinite wants an eventually periodic index")
    f1 = ProductZxNInjection("1", index.pre, index.per)
    f2 = ProductZxNInjection("2", index.pre, index.per)
    sys = BranchingSystem(f1, f2, label=f"P({index.display()})")
    pre_len = len(index.pre)
    per = index.per

    def tail_oracle(nm):
        if not isinstance(nm, tuple) or nm[1] != 1 or nm[0] < pre_len:
            return None
        shift = (nm[0] - pre_len) % len(per)
        return "", per[shift:] + per[:shift]

    sys.tail_oracle = tail_oracle
    return sys


# ---------------------------------------------------------------------------
# Components
# ---------------------------------------------------------------------------

@dataclass
class Component:
    ident: int
    kind: str               # "o2" | "q2"
    anchor_cycles: tuple    # cycle indices into the analysis
    orbit_reps: tuple       # q2 only: one index per tau-orbit
    members_sample: tuple
    certified: bool
    open_boundary: bool = False


@dataclass
class ComponentPartition:
    kind: str
    components: list
    analysis: object = None
    note: str = ""

    def __len__(self):
        return len(self.components)

    def component_of(self, n):
        if self.analysis is not None and self.analysis.ok:
            cid = self.analysis.anchor(n)[0]
            for comp in self.components:
                if cid in comp.anchor_cycles:
                    return comp
            raise StructuralError("anchored index missing from the partition")
        for comp in self.components:
            if n in comp.members_sample:
                return comp
        return None


def o2_components(sys: BranchingSystem, window: int = 1024) -> ComponentPartition:
    """Connected components under both maps and their inverses.

    For anchored systems the components are exactly the anchor-cycle
    classes (every index descends to a unique cycle along unique parents),
    so the partition is certified; otherwise it is window union-find with
    open-boundary flags.
    """
    anchors = sys.anchors()
    if anchors.ok:
        comps = []
        win = list(sys.domain.window(window))
        for cid, cyc in enumerate(anchors.cycles):
            sample = tuple(n for n in win if anchors.anchor(n)[0] == cid)
            comps.append(Component(cid, "o2", (cid,), (), sample, True))
        return ComponentPartition("o2", comps, anchors,
                                  "anchor-cycle classes (exact)")
    return _window_components(sys, None, window, "o2")


def q2_components(q2: Q2System, window: int = 1024) -> ComponentPartition:
    """Components under sigma2, tau and their inverses.

    With anchors available the unitary's orbits are enumerated exactly
    (coding cosets and fibers) and glued by the maps' action on orbits.
    """
    sys = q2.restriction()
    anchors = sys.anchors() if isinstance(sys.sigma1, RuleInjection) else None
    if anchors is not None and anchors.ok:
        groups = anchors.q2_orbit_groups(q2.tau)
        cycle_group = {}
        for gi, group in enumerate(groups):
            for rep in group:
                cycle_group[anchors.anchor(rep)[0]] = gi
        for cid in range(len(anchors.cycles)):
            if cid not in cycle_group:
                gi = next(
                    i for i, g in enumerate(groups)
                    if anchors.orbit_id(q2.tau, anchors.cycles[cid].members[0]) in g)
                cycle_group[cid] = gi
        win = list(sys.domain.window(window))
        comps = []
        for gi, group in enumerate(groups):
            cycles = tuple(sorted(c for c, g in cycle_group.items() if g == gi))
            sample = tuple(n for n in win
                           if anchors.anchor(n)[0] in set(cycles))
            comps.append(Component(gi, "q2", cycles, tuple(group), sample, True))
        return ComponentPartition("q2", comps, anchors,
                                  "tau-orbit classes glued by the maps (exact)")
    return _window_components(sys, q2.tau, window, "q2")


def _window_components(sys, tau, window, kind) -> ComponentPartition:
    win = list(sys.domain.window(window))
    index = {n: i for i, n in enumerate(win)}
    parent = list(range(len(win)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    open_nodes = set()

    def union(a, b):
        if b not in index:
            open_nodes.add(a)
            return
        ra, rb = find(index[a]), find(index[b])
        if ra != rb:
            parent[ra] = rb

    maps = [sys.sigma1, sys.sigma2] + ([tau] if tau is not None else [])
    for n in win:
        for f in maps:
            try:
                union(n, f.apply(n))
            except Exception:
                open_nodes.add(n)
            back = f.invert(n)
            if back is not None:
                union(n, back)
    groups = {}
    for n in win:
        groups.setdefault(find(index[n]), []).append(n)
    comps = []
    for i, members in enumerate(sorted(groups.values(), key=lambda g: repr(g[0]))):
        has_open = any(m in open_nodes for m in members)
        comps.append(Component(i, kind, (), (), tuple(members), False, has_open))
    return ComponentPartition(kind, comps, None, "window union-find (uncertified)")


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RepClass:
    kind: str                # canonical | finite_pi | infinite_pi |
                             # direct_sum | not_perm_decomposable | inconclusive
    index: MultiIndex = None
    irreducible: bool = None
    parts: tuple = ()        # direct_sum: ((RepClass, multiplicity), ...)
    witness: object = None
    depth: int = 0
    tau_orbits: int = None

    def __repr__(self):
        if self.kind == "canonical":
            return "CanonicalQ2"
        if self.kind == "finite_pi":
            return f"FinitePI({self.index.word}, irreducible={self.irreducible})"
        if self.kind == "infinite_pi":
            mult = f", tau_orbits={self.tau_orbits}" if self.tau_orbits else ""
            return f"InfinitePI(({self.index.per})^inf{mult})"
        if self.kind == "direct_sum":
            inner = " + ".join(
                (f"{m}x" if m > 1 else "") + repr(c) for c, m in self.parts)
            return f"DirectSum[{inner}]"
        if self.kind == "not_perm_decomposable":
            return f"NotPermutativelyDecomposable(witness={self.witness})"
        return f"Inconclusive(depth={self.depth})"


CANONICAL_Q2 = RepClass("canonical")


def classify_component(partition: ComponentPartition, component: Component,
                       depth: int = 64) -> RepClass:
    """Type of one component.

    An anchored component carries its cycle words: a single word cycle means
    the component is cyclic of that finite type; at the unitary level a
    single tau-orbit certifies the canonical class, and otherwise the common
    primitive tail labels the component, with an imprimitive word witnessing
    non-decomposability.
    """
    anchors = partition.analysis
    if anchors is None or not anchors.ok or not component.certified:
        return RepClass("inconclusive", depth=depth)
    cycles = [anchors.cycles[c] for c in component.anchor_cycles]
    if component.kind == "o2":
        if len(cycles) != 1:
            return RepClass("inconclusive", depth=depth)
        word = min_rotation(cycles[0].letters)
        idx = MultiIndex("finite", word=word)
        return RepClass("finite_pi", idx, is_irreducible_PI(idx))
    # q2 component
    norbits = len(component.orbit_reps)
    if norbits == 1:
        return RepClass("canonical", tau_orbits=1)
    for cyc in cycles:
        root = primitive_root(cyc.letters)
        if len(root) < len(cyc.letters):
            z = cyc.members[0]
            image = anchors.sys.apply_word(primitive_root(cyc.word_at(0)), z)
            return RepClass("not_perm_decomposable", witness=(z, root, image),
                            tau_orbits=norbits)
    roots = {min_rotation(primitive_root(c.letters)) for c in cycles}
    if len(roots) == 1:
        idx = MultiIndex("evper", per=roots.pop())
        return RepClass("infinite_pi", idx, is_irreducible_PI(idx),
                        tau_orbits=norbits)
    return RepClass("inconclusive", depth=depth, tau_orbits=norbits)


# ---------------------------------------------------------------------------
# Regularity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegularityVerdict:
    kind: str               # "mf" | "regular" | "notregular" | "inconclusive"
    witness: object = None
    depth: int = 0

    def __repr__(self):
        names = {"mf": "MultiplicityFree", "regular": "Regular",
                 "notregular": "NotRegular", "inconclusive": "Inconclusive"}
        extra = f"(witness={self.witness})" if self.kind == "notregular" else ""
        return names[self.kind] + extra


def regularity_verdict(sys: BranchingSystem, window: int = 10 ** 4,
                       depth: int = 64) -> RegularityVerdict:
    """Coding-map injectivity class of the system.

    Anchored systems get the exact certificate: injectivity fails only
    through coinciding cycle words, partial injectivity only through an
    imprimitive cycle word.  NotRegular witnesses are re-checked digit by
    digit.
    """
    anchors = sys.anchors()
    if anchors.ok:
        kind, data = anchors.regularity_certificate()
        if kind == "notregular":
            n, word, image = data
            c1 = coding(sys, n, depth)
            c2 = coding(sys, image, depth)
            if n == image or c1.digits != c2.digits:
                raise StructuralError("regularity witness failed its re-check")
            return RegularityVerdict("notregular", (n, word, image), depth)
        return RegularityVerdict(kind, data, depth)
    # window fallback: group indices by certified coding and look for a
    # word-related pair inside a colliding group
    groups = {}
    for n in sys.domain.window(window):
        c = coding(sys, n, depth)
        if c.certified_tail is None:
            return RegularityVerdict("inconclusive", n, depth)
        groups.setdefault(c.digits, []).append(n)
    collisions = [g for g in groups.values() if len(g) > 1]
    if not collisions:
        return RegularityVerdict("mf", None, depth)
    for group in collisions:
        witness = _word_related_pair(sys, group, depth)
        if witness is not None:
            return RegularityVerdict("notregular", witness, depth)
    return RegularityVerdict("regular", tuple(collisions[0][:2]), depth)


def _word_related_pair(sys, group, depth):
    # partial injectivity fails iff some colliding index is a word image of
    # another; the word must then be a prefix of the common coding
    digits = coding(sys, group[0], depth).digits
    for word_len in range(1, depth):
        word = digits[:word_len]
        for src in group:
            image = sys.word_pair_apply(word, "", src)
            if image != src and image in group:
                return (src, word, image)
    return None


# ---------------------------------------------------------------------------
# Decomposability at the unitary level
# ---------------------------------------------------------------------------

@dataclass
class DecomposabilityReport:
    regularity: RegularityVerdict
    decomposable: object          # True | False | None
    classes: list
    aggregate: RepClass

    def __repr__(self):
        return (f"DecomposabilityReport(decomposable={self.decomposable}, "
                f"regularity={self.regularity}, aggregate={self.aggregate})")


def q2_decomposable(q2: Q2System, window: int = 1024,
                    depth: int = 64) -> DecomposabilityReport:
    """Direct-sum decomposability into irreducible permutative pieces.

    Equivalent to regularity of the restriction; when it holds the
    components are classified and multiplicities counted by class equality.
    """
    reg = regularity_verdict(q2.restriction(), window, depth)
    if reg.kind == "notregular":
        agg = RepClass("not_perm_decomposable", witness=reg.witness)
        return DecomposabilityReport(reg, False, [], agg)
    if reg.kind == "inconclusive":
        return DecomposabilityReport(reg, None, [],
                                     RepClass("inconclusive", depth=depth))
    partition = q2_components(q2, window)
    classes = [classify_component(partition, comp, depth)
               for comp in partition.components]
    counted = []
    for cls in classes:
        for i, (seen, mult) in enumerate(counted):
            if seen == cls:
                counted[i] = (seen, mult + 1)
                break
        else:
            counted.append((cls, 1))
    agg = RepClass("direct_sum", parts=tuple(counted))
    return DecomposabilityReport(reg, True, classes, agg)

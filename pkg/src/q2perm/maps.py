"""Exact arithmetic for piecewise-affine injections of integer index sets.

A map is given by affine rules on residue classes plus a finite exception
table.  This class is closed under composition, and injectivity, range
membership, coverage and equality are all decidable exactly by linear
congruence arithmetic, so no property of a map is ever decided by sampling.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd


class MapDomainError(ValueError):
    """Raised when an index lies outside a map's domain or coverage."""


class StructuralError(ValueError):
    """Raised for malformed rule sets (overlapping residues and the like)."""


# ---------------------------------------------------------------------------
# Index domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexDomain:
    """One of the index sets maps act on.

    kind is one of ``nat1`` ({1,2,3,...}), ``nat0`` ({0,1,2,...}), ``int``
    (all integers) or ``zxn`` (pairs (z, n) with n >= 1).
    """

    kind: str

    def contains(self, n) -> bool:
        if self.kind == "zxn":
            return (
                isinstance(n, tuple)
                and len(n) == 2
                and isinstance(n[0], int)
                and isinstance(n[1], int)
                and n[1] >= 1
            )
        if not isinstance(n, int) or isinstance(n, bool):
            return False
        if self.kind == "nat1":
            return n >= 1
        if self.kind == "nat0":
            return n >= 0
        return True

    @property
    def lower(self):
        """Smallest element, or None when unbounded below."""
        return {"nat1": 1, "nat0": 0}.get(self.kind)

    def window(self, size: int):
        """Deterministic finite sample of the domain, |window| ~ size."""
        if self.kind == "nat1":
            return range(1, size + 1)
        if self.kind == "nat0":
            return range(0, size + 1)
        if self.kind == "int":
            return range(-size, size + 1)
        side = max(2, int(size ** 0.5) // 2)
        return [
            (a, b)
            for a in range(-side, side + 1)
            for b in range(1, side + 1)
        ]


NAT1 = IndexDomain("nat1")
NAT0 = IndexDomain("nat0")
INTEGERS = IndexDomain("int")
ZXN = IndexDomain("zxn")

_DOMAINS = {"nat1": NAT1, "nat0": NAT0, "int": INTEGERS, "zxn": ZXN}


def domain_from_name(name: str) -> IndexDomain:
    if name not in _DOMAINS:
        raise StructuralError(f"unknown domain kind {name!r}")
    return _DOMAINS[name]


# ---------------------------------------------------------------------------
# Rules and rule-based injections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineRule:
    """Sends n with n = residue (mod modulus of the owner) to slope*n + offset."""

    residue: int
    slope: int
    offset: int

    def image(self, n: int) -> int:
        return self.slope * n + self.offset


class RuleInjection:
    """Piecewise-affine map with a finite exception table.

    ``rules`` holds one AffineRule per covered residue modulo ``modulus``;
    ``exceptions`` overrides the rules pointwise; ``removed`` carves inputs
    out of rule coverage without remapping them (used for restrictions).
    Instances are immutable by convention; Python ``==`` is structural,
    semantic equality is decided by :func:`equals`.
    """

    __slots__ = (
        "domain", "modulus", "rules", "exceptions", "removed",
        "_inv_exc", "_branches",
    )

    def __init__(self, domain: IndexDomain, modulus: int, rules,
                 exceptions=None, removed=()):
        if modulus < 1:
            raise StructuralError("modulus must be positive")
        self.domain = domain
        self.modulus = modulus
        table = {}
        for rule in rules:
            if not isinstance(rule, AffineRule):
                rule = AffineRule(*rule)
            if not 0 <= rule.residue < modulus:
                raise StructuralError(
                    f"residue {rule.residue} outside [0, {modulus})")
            if rule.slope == 0:
                raise StructuralError("rule slope must be nonzero")
            if rule.residue in table:
                raise StructuralError(
                    f"overlapping rules for residue {rule.residue}")
            table[rule.residue] = rule
        self.rules = table
        self.exceptions = dict(exceptions or {})
        self.removed = frozenset(removed)
        self._inv_exc = {v: k for k, v in self.exceptions.items()}
        self._branches = tuple(
            (r.residue, r.slope, r.offset) for r in table.values())

    # -- basic queries ------------------------------------------------------

    def apply(self, n: int) -> int:
        if not self.domain.contains(n):
            raise MapDomainError(f"{n} not in domain {self.domain.kind}")
        exc = self.exceptions.get(n)
        if exc is not None:
            return exc
        if n in self.removed:
            raise MapDomainError(f"{n} removed from rule coverage")
        rule = self.rules.get(n % self.modulus)
        if rule is None:
            raise MapDomainError(f"no rule covers {n}")
        return rule.slope * n + rule.offset

    __call__ = apply

    def invert(self, n: int):
        """Unique preimage of n, or None when n is not in the range."""
        if not self.domain.contains(n):
            raise MapDomainError(f"{n} not in domain {self.domain.kind}")
        k = self._inv_exc.get(n)
        if k is not None:
            return k
        M = self.modulus
        excluded = self.exceptions
        removed = self.removed
        for res, slope, offset in self._branches:
            d, rem = divmod(n - offset, slope)
            if rem:
                continue
            if d % M != res:
                continue
            if d in excluded or d in removed:
                continue
            if self.domain.contains(d):
                return d
        return None

    def defined_at(self, n: int) -> bool:
        if not self.domain.contains(n):
            return False
        if n in self.exceptions:
            return True
        if n in self.removed:
            return False
        return (n % self.modulus) in self.rules

    # -- closure-specialized hot paths (no domain checks, no dispatch) -------
    # these assume a validated total map; walk loops call them heavily

    def fast_applier(self):
        exceptions = self.exceptions
        modulus = self.modulus
        table = {r: (rule.slope, rule.offset) for r, rule in self.rules.items()}
        if modulus == 1 and 0 in table:
            slope, offset = table[0]
            if not exceptions:
                return lambda n: slope * n + offset

            def app1(n):
                e = exceptions.get(n)
                return e if e is not None else slope * n + offset
            return app1

        def app(n):
            e = exceptions.get(n)
            if e is not None:
                return e
            slope, offset = table[n % modulus]
            return slope * n + offset
        return app

    def fast_inverter(self):
        inv_exc = self._inv_exc
        branches = self._branches
        modulus = self.modulus
        excluded = frozenset(self.exceptions) | self.removed
        lower = self.domain.lower
        if len(branches) == 1:
            ((res, slope, offset),) = branches

            def inv1(n):
                k = inv_exc.get(n)
                if k is not None:
                    return k
                d, r = divmod(n - offset, slope)
                if r or d % modulus != res or d in excluded:
                    return None
                if lower is not None and d < lower:
                    return None
                return d
            return inv1

        def inv(n):
            k = inv_exc.get(n)
            if k is not None:
                return k
            for res, slope, offset in branches:
                d, r = divmod(n - offset, slope)
                if r or d % modulus != res or d in excluded:
                    continue
                if lower is not None and d < lower:
                    continue
                return d
            return None
        return inv

    # -- presentation and serialization --------------------------------------

    def __repr__(self):
        parts = [
            f"{r.residue}%{self.modulus}: {r.slope}n{r.offset:+d}"
            for r in sorted(self.rules.values(), key=lambda r: r.residue)
        ]
        if self.exceptions:
            parts.append(f"exc={dict(sorted(self.exceptions.items()))}")
        if self.removed:
            parts.append(f"removed={sorted(self.removed)}")
        return f"RuleInjection({self.domain.kind}; " + "; ".join(parts) + ")"

    def to_json(self) -> dict:
        return {
            "domain": self.domain.kind,
            "modulus": self.modulus,
            "rules": [
                {"residue": r.residue, "slope": r.slope, "offset": r.offset}
                for r in sorted(self.rules.values(), key=lambda r: r.residue)
            ],
            "exceptions": {str(k): v for k, v in sorted(self.exceptions.items())},
            "removed": sorted(self.removed),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RuleInjection":
        return cls(
            domain_from_name(data["domain"]),
            data["modulus"],
            [AffineRule(r["residue"], r["slope"], r["offset"])
             for r in data["rules"]],
            {int(k): v for k, v in data.get("exceptions", {}).items()},
            data.get("removed", ()),
        )


def affine_map(domain: IndexDomain, slope: int, offset: int) -> RuleInjection:
    """Single-rule map n -> slope*n + offset on the whole domain."""
    return RuleInjection(domain, 1, [AffineRule(0, slope, offset)])


def translation(domain: IndexDomain, offset: int) -> RuleInjection:
    return affine_map(domain, 1, offset)


# ---------------------------------------------------------------------------
# Image components: arithmetic progressions with bounds and holes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Ray:
    """Value set {v = base (mod step)} cut to [lo, hi] minus finite holes."""

    base: int
    step: int
    lo: object          # int or None for -inf
    hi: object          # int or None for +inf
    holes: frozenset
    src: tuple

    def contains(self, v: int) -> bool:
        if (v - self.base) % self.step:
            return False
        if self.lo is not None and v < self.lo:
            return False
        if self.hi is not None and v > self.hi:
            return False
        return v not in self.holes


def _branch_inputs_min(domain: IndexDomain, residue: int, modulus: int):
    lower = domain.lower
    if lower is None:
        return None
    return lower + (residue - lower) % modulus


def _image_components(f: RuleInjection):
    """Rays and exception points making up the range of f, exactly."""
    rays = []
    excluded = set(f.exceptions) | set(f.removed)
    for res, slope, offset in f._branches:
        step = abs(slope) * f.modulus
        base = (slope * res + offset) % step
        xmin = _branch_inputs_min(f.domain, res, f.modulus)
        lo = hi = None
        if xmin is not None:
            v0 = slope * xmin + offset
            if slope > 0:
                lo = v0
            else:
                hi = v0
        holes = frozenset(
            slope * e + offset
            for e in excluded
            if isinstance(e, int) and e % f.modulus == res
            and f.domain.contains(e)
            and (xmin is None or e >= xmin)
        )
        rays.append(_Ray(base, step, lo, hi, holes, ("rule", res)))
    points = [(v, ("exception", k)) for k, v in f.exceptions.items()]
    return rays, points


def _crt_pair(a1: int, m1: int, a2: int, m2: int):
    """Solve v = a1 (mod m1), v = a2 (mod m2); None if incompatible."""
    g = gcd(m1, m2)
    if (a2 - a1) % g:
        return None
    l = m1 // g * m2
    # lift: v = a1 + m1*t with m1*t = a2-a1 (mod m2)
    m2g = m2 // g
    t = ((a2 - a1) // g * pow(m1 // g, -1, m2g)) % m2g
    return ((a1 + m1 * t) % l, l)


_ENUM_CAP = 1_000_000


def _ray_intersection_witness(r1: _Ray, r2: _Ray):
    """Some common value of two rays, or None when they are disjoint."""
    crt = _crt_pair(r1.base, r1.step, r2.base, r2.step)
    if crt is None:
        return None
    base, step = crt
    lo = max((b for b in (r1.lo, r2.lo) if b is not None), default=None)
    hi = min((b for b in (r1.hi, r2.hi) if b is not None), default=None)
    holes = r1.holes | r2.holes
    if lo is not None and hi is not None:
        if lo > hi:
            return None
        if (hi - lo) // step > _ENUM_CAP:
            raise StructuralError("intersection enumeration cap exceeded")
        v = lo + (base - lo) % step
        while v <= hi:
            if v not in holes:
                return v
            v += step
        return None
    # Unbounded in at least one direction: only finitely many holes, so a
    # witness exists; walk from an anchor in the unbounded direction.
    if hi is None:
        anchor = lo if lo is not None else base
        v = anchor + (base - anchor) % step
        for _ in range(len(holes) + 1):
            if v not in holes:
                return v
            v += step
    else:
        anchor = hi
        v = anchor - (anchor - base) % step
        for _ in range(len(holes) + 1):
            if v not in holes:
                return v
            v -= step
    return v


def _point_in_components(v: int, rays, points) -> bool:
    if any(r.contains(v) for r in rays):
        return True
    return any(v == p for p, _ in points)


def range_collisions(f: RuleInjection, g: RuleInjection = None, cap: int = 64):
    """Common range values of f and g (of f's own components when g is None).

    Returns a list of witnesses (value, source_f, source_g).  Exact: a value
    is reported iff the ranges genuinely intersect.
    """
    rays_f, pts_f = _image_components(f)
    if g is None:
        rays_g, pts_g = rays_f, pts_f
        self_mode = True
    else:
        rays_g, pts_g = _image_components(g)
        self_mode = False
    out = []

    def record(v, s1, s2):
        out.append((v, s1, s2))
        return len(out) >= cap

    pairs = (
        itertools.combinations(range(len(rays_f)), 2)
        if self_mode else
        itertools.product(range(len(rays_f)), range(len(rays_g)))
    )
    for i, j in pairs:
        w = _ray_intersection_witness(rays_f[i], rays_g[j])
        if w is not None and record(w, rays_f[i].src, rays_g[j].src):
            return out
    point_pairs = (
        itertools.combinations(range(len(pts_f)), 2)
        if self_mode else
        itertools.product(range(len(pts_f)), range(len(pts_g)))
    )
    for i, j in point_pairs:
        if pts_f[i][0] == pts_g[j][0]:
            if record(pts_f[i][0], pts_f[i][1], pts_g[j][1]):
                return out
    for v, src in pts_f:
        for ray in rays_g:
            if ray.contains(v) and record(v, src, ray.src):
                return out
    if not self_mode:
        for v, src in pts_g:
            for ray in rays_f:
                if ray.contains(v) and record(v, ray.src, src):
                    return out
    else:
        # exception value hitting own rule image already covered above
        pass
    return out


def covers_domain(components, domain: IndexDomain, extra_points=()):
    """Decide whether the union of components covers the domain.

    ``components`` is a list of (rays, points) pairs.  Returns (True, None)
    or (False, witness).  Uncovered values can only sit near ray cutoffs or
    at ray holes, a finite candidate set that is enumerated exactly.
    """
    rays = [r for rs, _ in components for r in rs]
    points = {p for _, ps in components for p, _ in ps} | set(extra_points)
    if not rays:
        raise StructuralError("coverage requires at least one rule branch")
    big = 1
    for r in rays:
        big = big * r.step // gcd(big, r.step)
    lower = domain.lower

    def covered(v):
        return v in points or any(r.contains(v) for r in rays)

    def fresh_above(start):
        v = start
        for _ in range(len(points) + 2):
            if v not in points:
                return v
            v += big
        raise StructuralError("unreachable")

    def fresh_below(start):
        v = start
        for _ in range(len(points) + 2):
            if v not in points:
                return v
            v -= big
        raise StructuralError("unreachable")

    candidates = set()
    for rho in range(big):
        cls = [r for r in rays if (rho - r.base) % r.step == 0]
        holes = set()
        for r in cls:
            holes |= {h for h in r.holes if (h - rho) % big == 0}
        candidates |= holes
        if any(r.lo is None and r.hi is None for r in cls):
            continue
        ups = [r.lo for r in cls if r.lo is not None and r.hi is None]
        downs = [r.hi for r in cls if r.hi is not None and r.lo is None]
        boxed_hi = [r.hi for r in cls if r.lo is not None and r.hi is not None]
        # upward direction
        if not ups:
            ceil = max(downs + boxed_hi, default=None)
            anchor = (ceil + 1) if ceil is not None else (lower or 0)
            probe = fresh_above(anchor + (rho - anchor) % big)
            while probe in holes:
                probe = fresh_above(probe + big)
            if domain.contains(probe) and not covered(probe):
                return False, probe
        # downward direction (only for domains unbounded below)
        if lower is None and not downs:
            floor = min(ups + [r.lo for r in cls if r.lo is not None and r.hi is not None],
                        default=None)
            anchor = (floor - 1) if floor is not None else 0
            probe = fresh_below(anchor - (anchor - rho) % big)
            while probe in holes:
                probe = fresh_below(probe - big)
            if domain.contains(probe) and not covered(probe):
                return False, probe
        # gap between cutoffs
        cut_up = min(ups) if ups else None
        cut_down = max(downs) if downs else None
        lo_enum = lower if lower is not None else cut_down
        hi_enum = cut_up if cut_up is not None else cut_down
        if lo_enum is not None and hi_enum is not None:
            span = hi_enum + big - lo_enum
            if span // big > _ENUM_CAP:
                raise StructuralError("coverage enumeration cap exceeded")
            v = lo_enum + (rho - lo_enum) % big
            while v <= hi_enum + big:
                candidates.add(v)
                v += big
    for v in sorted(candidates):
        if domain.contains(v) and not covered(v):
            return False, v
    return True, None


def range_covers(f: RuleInjection) -> tuple:
    """Exact test that ran(f) = domain (surjectivity)."""
    rays, pts = _image_components(f)
    return covers_domain([(rays, pts)], f.domain)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    ok: bool
    total: bool
    injective: bool
    errors: list = field(default_factory=list)
    collisions: list = field(default_factory=list)
    uncovered: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def validate_injection(f: RuleInjection) -> ValidationReport:
    """Exact totality and injectivity report for a rule-based map."""
    errors = []
    for k in f.exceptions:
        if k in f.removed:
            errors.append(f"exception key {k} also removed")
        if not f.domain.contains(k):
            errors.append(f"exception key {k} outside domain")
        if not f.domain.contains(f.exceptions[k]):
            errors.append(f"exception value {f.exceptions[k]} outside domain")
    # image-in-domain check per branch
    lower = f.domain.lower
    for res, slope, offset in f._branches:
        if lower is not None:
            if slope < 0:
                errors.append(
                    f"branch r={res} has negative slope on a lower-bounded domain")
                continue
            xmin = _branch_inputs_min(f.domain, res, f.modulus)
            covered = sorted(
                x for x in range(xmin, xmin + f.modulus * (len(f.exceptions) + len(f.removed) + 1))
                if x % f.modulus == res and x not in f.exceptions and x not in f.removed
            )
            if covered and slope * covered[0] + offset < lower:
                errors.append(
                    f"branch r={res} maps {covered[0]} below the domain")
    # totality
    uncovered = []
    total = True
    for rho in range(f.modulus):
        if rho not in f.rules:
            probe = (f.domain.lower or 0) + (rho - (f.domain.lower or 0)) % f.modulus
            tries = 0
            while probe in f.exceptions and tries < len(f.exceptions) + 2:
                probe += f.modulus
                tries += 1
            if probe not in f.exceptions:
                total = False
                uncovered.append(probe)
    for x in f.removed:
        if x not in f.exceptions:
            total = False
            uncovered.append(x)
    # injectivity
    collisions = [] if errors else range_collisions(f)
    injective = not collisions
    ok = not errors and injective
    return ValidationReport(ok, total, injective, errors, collisions, uncovered)


# ---------------------------------------------------------------------------
# Composition, normal form, equality
# ---------------------------------------------------------------------------

def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def compose(f, g):
    """The map f(g(n)), in the same representation class.

    Both arguments must share a domain.  Residues where the composite is not
    rule-covered (because g's image escapes f's coverage) are left uncovered.
    """
    if isinstance(f, RuleInjection) and isinstance(g, RuleInjection):
        if f.domain != g.domain:
            raise MapDomainError("composed maps must share a domain")
        K = _lcm(f.modulus, g.modulus)
        rules = []
        for r in range(K):
            rg = g.rules.get(r % g.modulus)
            if rg is None:
                continue
            rf = f.rules.get((rg.slope * r + rg.offset) % f.modulus)
            if rf is None:
                continue
            rules.append(AffineRule(
                r, rf.slope * rg.slope, rf.slope * rg.offset + rf.offset))
        exceptions = {}
        for k, v in g.exceptions.items():
            exceptions[k] = f.apply(v)
        for e, val in f.exceptions.items():
            x = g.invert(e)
            if x is not None and x not in g.exceptions:
                exceptions[x] = val
        for e in f.removed:
            x = g.invert(e)
            if x is not None and x not in g.exceptions:
                exceptions.pop(x, None)
                # composite undefined there; record as removed
        removed = set(g.removed) - set(exceptions)
        for e in f.removed:
            x = g.invert(e)
            if x is not None and x not in g.exceptions:
                removed.add(x)
        return RuleInjection(g.domain, K, rules, exceptions, removed)
    return _ComposedMap(f, g)


class _ComposedMap:
    """Pointwise composition fallback when a factor has no closed form."""

    __slots__ = ("f", "g", "domain")

    def __init__(self, f, g):
        if f.domain != g.domain:
            raise MapDomainError("composed maps must share a domain")
        self.f, self.g, self.domain = f, g, g.domain

    def apply(self, n):
        return self.f.apply(self.g.apply(n))

    __call__ = apply

    def invert(self, n):
        m = self.f.invert(n)
        if m is None:
            return None
        return self.g.invert(m)


def normal_form(f: RuleInjection) -> RuleInjection:
    """Canonical representative: minimal modulus, absorbed exceptions."""
    rules = {r: (rule.slope, rule.offset) for r, rule in f.rules.items()}
    modulus = f.modulus
    removed = set(f.removed) - set(f.exceptions)
    exceptions = {}
    for k, v in f.exceptions.items():
        rule = rules.get(k % modulus)
        if rule is not None and k not in removed and rule[0] * k + rule[1] == v:
            continue
        exceptions[k] = v
    removed = {x for x in removed if (x % modulus) in rules}
    changed = True
    while changed and modulus > 1:
        changed = False
        for p in _prime_factors(modulus):
            m2 = modulus // p
            folded = {}
            good = True
            for r2 in range(m2):
                variants = {rules.get(r2 + i * m2) for i in range(p)}
                if len(variants) != 1:
                    good = False
                    break
                v = variants.pop()
                if v is not None:
                    folded[r2] = v
            if good:
                rules, modulus, changed = folded, m2, True
                break
    return RuleInjection(
        f.domain, modulus,
        [AffineRule(r, s, o) for r, (s, o) in sorted(rules.items())],
        exceptions, removed)


def _prime_factors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _canonical_key(f: RuleInjection):
    g = normal_form(f)
    return (
        g.domain.kind, g.modulus,
        tuple(sorted((r.residue, r.slope, r.offset) for r in g.rules.values())),
        tuple(sorted(g.exceptions.items())),
        tuple(sorted(g.removed)),
    )


def equals(f: RuleInjection, g: RuleInjection) -> bool:
    """Exact semantic equality via the canonical normal form."""
    if f.domain != g.domain:
        return False
    L = _lcm(f.modulus, g.modulus)
    return _canonical_key(_lift(f, L)) == _canonical_key(_lift(g, L))


def _lift(f: RuleInjection, modulus: int) -> RuleInjection:
    if modulus == f.modulus:
        return f
    rules = []
    for r in range(modulus):
        rule = f.rules.get(r % f.modulus)
        if rule is not None:
            rules.append(AffineRule(r, rule.slope, rule.offset))
    return RuleInjection(f.domain, modulus, rules, f.exceptions, f.removed)


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitDescriptor:
    kind: str                  # "finite" | "infinite" | "inconclusive"
    length: int = 0
    members: tuple = ()
    certificate: str = ""
    steps: int = 0

    @property
    def is_finite(self):
        return self.kind == "finite"


def exception_zone_bound(f: RuleInjection) -> int:
    """Bound outside which only the affine tails of f act."""
    vals = [abs(r.offset) for r in f.rules.values()]
    vals += [abs(k) for k in f.exceptions]
    vals += [abs(v) for v in f.exceptions.values()]
    vals += [abs(x) for x in f.removed]
    vals.append(f.modulus)
    return max(vals) + 1


def _residue_cycle_shift(f: RuleInjection, start_res: int):
    """Follow slope-1 branches through residue classes; return net shift.

    Returns (shift, length) when the residue orbit closes through slope-1
    branches only, otherwise None.
    """
    M = f.modulus
    res = start_res
    total = 0
    for step in range(1, M + 1):
        rule = f.rules.get(res)
        if rule is None or rule.slope != 1:
            return None
        total += rule.offset
        res = (res + rule.offset) % M
        if res == start_res:
            return total, step
    return None


def _escape_certificate(f: RuleInjection, x: int) -> str:
    """Nonempty reason string when the forward orbit of x provably diverges."""
    bound = exception_zone_bound(f)
    if abs(x) <= bound:
        return ""
    slopes = [r.slope for r in f.rules.values()]
    if all(abs(s) >= 2 for s in slopes):
        return f"expansive tails (|slope|>=2) beyond |n|>{bound}"
    cyc = _residue_cycle_shift(f, x % f.modulus)
    if cyc is not None:
        shift, length = cyc
        if shift != 0 and (x > 0) == (shift > 0):
            if abs(x) > bound * (length + 1):
                return (f"translating tail: residue cycle of length {length} "
                        f"with net shift {shift:+d}")
    return ""


def orbit_of(f, n, budget: int = 10 ** 6) -> OrbitDescriptor:
    """Forward orbit classification of n under an injective map.

    Finite cycles are detected exactly (an injective map revisits only its
    starting point); divergence is certified when iterates enter an
    expansive or translating tail regime; otherwise Inconclusive.
    """
    seen = {n: 0}
    order = [n]
    x = n
    for step in range(1, budget + 1):
        try:
            x = f.apply(x)
        except MapDomainError:
            return OrbitDescriptor("inconclusive", steps=step,
                                   certificate="walk left the covered domain")
        if x in seen:
            if x != n:
                return OrbitDescriptor(
                    "inconclusive", steps=step,
                    certificate="revisit off the start (map not injective)")
            members = tuple(order)
            return OrbitDescriptor("finite", len(members), members,
                                   "cycle closed", step)
        if isinstance(f, RuleInjection) and isinstance(x, int):
            reason = _escape_certificate(f, x)
            if reason:
                return OrbitDescriptor("infinite", certificate=reason,
                                       steps=step)
        seen[x] = step
        order.append(x)
    return OrbitDescriptor("inconclusive", steps=budget,
                           certificate="budget exhausted")


# ---------------------------------------------------------------------------
# Orbit structure of bijections (unitary-equivalence invariant)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitStructure:
    """Multiset of finite cycle lengths plus an infinite-orbit count.

    ``finite_cycles`` maps length -> count (count None means infinitely
    many cycles of that length); ``infinite_count`` of None means
    countably many.  ``exact`` marks rule-level certification.
    """

    finite_cycles: tuple       # sorted tuple of (length, count)
    infinite_count: object     # int, or None for omega
    exact: bool = True
    note: str = ""

    def same_as(self, other: "OrbitStructure") -> bool:
        return (self.finite_cycles == other.finite_cycles
                and self.infinite_count == other.infinite_count)


def bijection_orbit_structure(f: RuleInjection) -> OrbitStructure:
    """Exact orbit structure of a piecewise slope +/-1 rule bijection.

    Infinite orbits are counted residue-cycle by residue-cycle: a cycle of
    classes with net shift T contributes |T| / modulus orbits, and finite
    exception tables cannot change that count.  Finite cycles can only pass
    through the exception zone and are enumerated there.
    """
    slopes = [r.slope for r in f.rules.values()]
    if any(abs(s) != 1 for s in slopes) or any(s == -1 for s in slopes):
        raise StructuralError(
            "orbit structure implemented for slope +1 rule bijections only")
    M = f.modulus
    if set(f.rules) != set(range(M)):
        raise StructuralError("bijection must cover every residue")
    infinite = 0
    seen = set()
    zero_shift = False
    for r in range(M):
        if r in seen:
            continue
        res = r
        total = 0
        cycle = []
        while res not in seen:
            seen.add(res)
            cycle.append(res)
            total += f.rules[res].offset
            res = (res + f.rules[res].offset) % M
        if res == r:
            if total == 0:
                zero_shift = True
            else:
                infinite += abs(total) // M
    finite = {}
    if zero_shift:
        # every orbit in those classes is finite; infinitely many cycles
        length = None  # determined below only approximately; mark unbounded
        finite[_zero_shift_cycle_length(f)] = None
    bound = exception_zone_bound(f) + 2 * M
    handled = set()
    lo = -bound if f.domain.lower is None else f.domain.lower
    for start in range(lo, bound + 1):
        if start in handled or not f.domain.contains(start):
            continue
        x = start
        trail = {start}
        for _ in range(8 * bound + 8):
            x = f.apply(x)
            if abs(x) > 4 * bound:
                break
            if x == start:
                if not _clean_translation_cycle(f, trail):
                    finite[len(trail)] = finite.get(len(trail), 0) + 1
                handled |= trail
                break
            if x in trail:
                break
            trail.add(x)
    cycles = tuple(sorted(finite.items()))
    return OrbitStructure(cycles, infinite, True, "residue-cycle analysis")


def _zero_shift_cycle_length(f: RuleInjection) -> int:
    M = f.modulus
    for r in range(M):
        res, steps, total = r, 0, 0
        while True:
            total += f.rules[res].offset
            res = (res + f.rules[res].offset) % M
            steps += 1
            if res == r:
                break
        if total == 0:
            return steps
    return 0


def _clean_translation_cycle(f: RuleInjection, members) -> bool:
    """True when a detected cycle lies in zero-shift classes with no exceptions."""
    if any(m in f.exceptions for m in members):
        return False
    for m in members:
        cyc = _residue_cycle_shift(f, m % f.modulus)
        if cyc is None or cyc[0] != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Lazily evaluated bijections (for permutative unitaries without closed form)
# ---------------------------------------------------------------------------

class LazyBijection:
    """Bijection given by forward/backward procedures with memo tables.

    Stands in for permutative unitaries whose exact closed form needs
    infinitely many affine branches; equality checks against such maps are
    window-checked and tagged as such by callers.
    """

    __slots__ = ("domain", "label", "provenance", "_fwd", "_bwd",
                 "_fmemo", "_bmemo")

    def __init__(self, domain, fwd, bwd, label="", provenance=None,
                 fmemo=None, bmemo=None):
        self.domain = domain
        self._fwd = fwd
        self._bwd = bwd
        self.label = label
        self.provenance = provenance
        self._fmemo = {} if fmemo is None else fmemo
        self._bmemo = {} if bmemo is None else bmemo

    def apply(self, n):
        memo = self._fmemo
        v = memo.get(n)
        if v is None:
            v = self._fwd(n)
            memo[n] = v
            self._bmemo[v] = n
        return v

    __call__ = apply

    def invert(self, n):
        memo = self._bmemo
        v = memo.get(n)
        if v is None:
            v = self._bwd(n)
            memo[n] = v
            self._fmemo[v] = n
        return v

    def iterate(self, n, k: int):
        """tau^k(n) for any integer k."""
        step = self.apply if k >= 0 else self.invert
        for _ in range(abs(k)):
            n = step(n)
        return n

    def __repr__(self):
        return f"LazyBijection({self.label or 'anonymous'})"


def iterate_map(f, n, k: int):
    """f^k(n); negative k uses invert and requires membership in the range."""
    if isinstance(f, LazyBijection):
        return f.iterate(n, k)
    for _ in range(abs(k)):
        n = f.apply(n) if k >= 0 else f.invert(n)
        if n is None:
            raise MapDomainError("backward iterate left the range")
    return n

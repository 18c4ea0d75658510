"""Built-in example systems addressable by name from the CLI and tests."""

from __future__ import annotations

from dataclasses import dataclass

from .maps import (
    INTEGERS, NAT1, AffineRule, RuleInjection, StructuralError, affine_map,
)
from .branching import BranchingSystem, direct_sum
from .classify import kawamura_finite, kawamura_infinite, normalize_multiindex
from .endo import ENDO_TABLE, chi_rep, q2_of_endo, rep_of_endo


@dataclass
class CatalogItem:
    name: str
    kind: str          # "branching" | "q2"
    system: object
    description: str


def canonical_system() -> BranchingSystem:
    return BranchingSystem(affine_map(INTEGERS, 2, 1),
                           affine_map(INTEGERS, 2, 0), label="canonical")


def p12_realization1() -> BranchingSystem:
    sigma1 = RuleInjection(NAT1, 1, [AffineRule(0, 2, -1)], {1: 3, 2: 1})
    sigma2 = affine_map(NAT1, 2, 0)
    return BranchingSystem(sigma1, sigma2, label="p12_realization1")


def p12_realization2() -> BranchingSystem:
    sigma1 = RuleInjection(NAT1, 2, [AffineRule(1, 2, 1), AffineRule(0, 2, -3)])
    sigma2 = affine_map(NAT1, 2, 0)
    return BranchingSystem(sigma1, sigma2, label="p12_realization2")


def onekk(k: int) -> BranchingSystem:
    if k < 1:
        raise StructuralError("onekk needs k >= 1")
    return direct_sum(kawamura_finite("1" * k), kawamura_finite("2" * k))


def catalog(name: str) -> CatalogItem:
    """Resolve a catalog name, e.g. canonical, kawamura:12, onekk:2, chi:1."""
    if name == "canonical":
        return CatalogItem(name, "branching", canonical_system(),
                           "doubling plus odd doubling on the integers")
    if name == "p12_realization1":
        return CatalogItem(name, "branching", p12_realization1(),
                           "cyclic word-12 system, switch on the first two indices")
    if name == "p12_realization2":
        return CatalogItem(name, "branching", p12_realization2(),
                           "cyclic word-12 system, pairwise switch realization")
    if ":" in name:
        head, _, arg = name.partition(":")
        if head == "kawamura":
            if arg.startswith("(") and arg.endswith(")"):
                idx = normalize_multiindex(per=arg[1:-1]).index
                return CatalogItem(name, "branching", kawamura_infinite(idx),
                                   f"infinite-index system with tail ({idx.per})*")
            return CatalogItem(name, "branching", kawamura_finite(arg),
                               f"cyclic system of word type {arg}")
        if head == "onekk":
            k = int(arg)
            return CatalogItem(name, "branching", onekk(k),
                               f"direct sum of the two constant-word systems of length {k}")
        if head == "chi":
            return CatalogItem(name, "q2", chi_rep(int(arg)),
                               f"canonical pair composed with U -> U^{2 * int(arg) + 1}")
        if head == "endo":
            if arg not in ENDO_TABLE:
                raise StructuralError(f"unknown table row {arg!r}")
            spec = ENDO_TABLE[arg]
            if spec.u_candidate is not None:
                return CatalogItem(name, "q2", q2_of_endo(arg),
                                   f"row {arg} with its verified unitary")
            return CatalogItem(name, "branching", rep_of_endo(arg),
                               f"row {arg} composed with the canonical rep")
    raise StructuralError(f"unknown catalog name {name!r}")


CATALOG_NAMES = [
    "canonical", "p12_realization1", "p12_realization2",
    "kawamura:WORD", "kawamura:(PERIOD)", "onekk:K", "chi:K", "endo:ROW",
]

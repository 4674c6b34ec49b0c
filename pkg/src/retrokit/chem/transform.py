"""Retrosynthetic template application.

For every match of a template's product pattern against a target, the
matched core is rewritten into the reactant-side pattern: mapped atoms
keep their unmatched environment (side chains, rings through unmatched
atoms), template-introduced atoms are created from the pattern, and
hydrogens are rebalanced by valence wherever bonding changed.  Rewrites
that break valence or aromaticity rules are dropped and counted rather
than raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .canon import write_canonical_smiles
from .elements import valences_for
from .mol import Atom, Bond, ChemError, MolGraph
from .pattern import BondKind, RetroTemplate
from .match import match_pattern


class RewriteValenceViolation(ChemError):
    """A rewritten atom exceeds its valence or breaks aromaticity."""


@dataclass(frozen=True)
class PrecursorOutcome:
    """One precursor set produced by one product-pattern match."""

    mols: tuple[MolGraph, ...]
    smiles: tuple[str, ...]
    matched_atoms: frozenset[int]


@dataclass(frozen=True)
class TemplateApplication:
    outcomes: tuple[PrecursorOutcome, ...]
    dropped: int

    @property
    def precursor_sets(self) -> list[tuple[str, ...]]:
        return [outcome.smiles for outcome in self.outcomes]


def apply_retro_template(template: RetroTemplate, product: MolGraph) -> TemplateApplication:
    """Apply a retro template to a product molecule.

    Returns the deduplicated precursor sets (canonical SMILES, sorted
    within each set) together with the product-atom footprint of the
    match that produced each one.
    """
    outcomes: list[PrecursorOutcome] = []
    seen: set[tuple[str, ...]] = set()
    dropped = 0
    for match in match_pattern(template.product_pattern, product):
        try:
            fragments = _rewrite(template, product, match)
        except RewriteValenceViolation:
            dropped += 1
            continue
        labelled = sorted(
            ((write_canonical_smiles(frag), frag) for frag in fragments),
            key=lambda pair: pair[0],
        )
        smiles = tuple(s for s, _f in labelled)
        if smiles in seen:
            continue
        seen.add(smiles)
        outcomes.append(
            PrecursorOutcome(
                mols=tuple(f for _s, f in labelled),
                smiles=smiles,
                matched_atoms=frozenset(match),
            )
        )
    return TemplateApplication(tuple(outcomes), dropped)


class _NewAtom:
    __slots__ = (
        "element", "charge", "aromatic", "hydrogens", "isotope",
        "chiral", "chiral_order", "source", "h_fixed",
    )

    def __init__(self):
        self.element = ""
        self.charge = 0
        self.aromatic = False
        self.hydrogens = 0
        self.isotope = None
        self.chiral = None
        self.chiral_order = None
        self.source: int | None = None  # target atom index it derives from
        self.h_fixed = False  # hydrogen count pinned by the pattern


def _rewrite(
    template: RetroTemplate, product: MolGraph, match: tuple[int, ...]
) -> list[MolGraph]:
    prod_pat = template.product_pattern
    react = template.reactant_side
    map_to_ppat = prod_pat.map_numbers()
    matched_targets = set(match)
    target_of_map = {m: match[i] for m, i in map_to_ppat.items()}

    new_atoms: list[_NewAtom] = []
    node_of_rpat: dict[int, int] = {}
    node_of_target: dict[int, int] = {}

    # Reactant-side pattern atoms: mapped ones inherit the matched target
    # atom, introduced ones come entirely from the pattern.
    for j, query in enumerate(react.atoms):
        node = _NewAtom()
        if query.map_num is not None:
            t = target_of_map[query.map_num]
            src = product.atoms[t]
            node.source = t
            node.isotope = src.isotope
            node.chiral = src.chiral
            node.chiral_order = src.chiral_order
            if query.element is not None:
                node.element = query.element
                node.aromatic = bool(query.aromatic)
            else:
                node.element = src.element
                node.aromatic = src.aromatic
            node.charge = query.charge if query.charge is not None else src.charge
            if query.hydrogens is not None:
                node.hydrogens = query.hydrogens
                node.h_fixed = True
            else:
                node.hydrogens = src.hydrogens
        else:
            node.element = query.element  # definite, validated at parse
            node.aromatic = bool(query.aromatic)
            node.charge = query.charge or 0
            if query.hydrogens is not None:
                node.hydrogens = query.hydrogens
                node.h_fixed = True
        node_of_rpat[j] = len(new_atoms)
        new_atoms.append(node)
        if node.source is not None:
            node_of_target[node.source] = node_of_rpat[j]

    surviving_targets = set(node_of_target)

    # Periphery: unmatched target atoms reachable from surviving mapped
    # atoms without crossing the matched core.  Fragments dangling only
    # off dropped atoms disappear with them.
    periphery: set[int] = set()
    frontier = list(surviving_targets)
    while frontier:
        t = frontier.pop()
        for v, _bond in product.neighbors(t):
            if v in matched_targets or v in periphery:
                continue
            periphery.add(v)
            frontier.append(v)
    for t in sorted(periphery):
        src = product.atoms[t]
        node = _NewAtom()
        node.element = src.element
        node.charge = src.charge
        node.aromatic = src.aromatic
        node.hydrogens = src.hydrogens
        node.isotope = src.isotope
        node.chiral = src.chiral
        node.chiral_order = src.chiral_order
        node.source = t
        node_of_target[t] = len(new_atoms)
        new_atoms.append(node)

    bonds: list[Bond] = []
    bond_pairs: set[tuple[int, int]] = set()

    def add_bond(
        a: int, b: int, order: int, aromatic: bool,
        direction: int = 0, skip_existing: bool = False,
    ) -> None:
        pair = (min(a, b), max(a, b))
        if pair in bond_pairs:
            if skip_existing:
                return  # the reactant pattern already dictated this bond
            raise RewriteValenceViolation("conflicting duplicate bond in rewrite")
        bond_pairs.add(pair)
        bonds.append(Bond(a, b, order, aromatic, direction))

    # 1. Bonds dictated by the reactant pattern.
    for qbond in react.bonds:
        a = node_of_rpat[qbond.a]
        b = node_of_rpat[qbond.b]
        kind = qbond.kind
        if kind is BondKind.SINGLE_OR_AROMATIC:
            aromatic = new_atoms[a].aromatic and new_atoms[b].aromatic
            add_bond(a, b, 1, aromatic)
        elif kind is BondKind.AROMATIC:
            add_bond(a, b, 1, True)
        elif kind is BondKind.SINGLE:
            add_bond(a, b, 1, False)
        elif kind is BondKind.DOUBLE:
            add_bond(a, b, 2, False)
        elif kind is BondKind.TRIPLE:
            add_bond(a, b, 3, False)

    # 2. Carried-over target bonds.
    ppat_idx_of_target = {match[i]: i for i in range(len(match))}
    for bond in product.bonds:
        a_t, b_t = bond.a, bond.b
        a_matched = a_t in matched_targets
        b_matched = b_t in matched_targets
        if a_matched and b_matched:
            # Covered by the product pattern?  Then the reactant side has
            # already said what happens to it.  Otherwise it is an
            # environment bond (e.g. a ring closing outside the pattern)
            # and carries over when both ends survive.
            pa = ppat_idx_of_target[a_t]
            pb = ppat_idx_of_target[b_t]
            if prod_pat.bond_between(pa, pb) is not None:
                continue
            if a_t in surviving_targets and b_t in surviving_targets:
                add_bond(
                    node_of_target[a_t], node_of_target[b_t],
                    bond.order, bond.aromatic, bond.direction,
                    skip_existing=True,
                )
        elif a_matched or b_matched:
            matched_end, free_end = (a_t, b_t) if a_matched else (b_t, a_t)
            if matched_end in surviving_targets and free_end in node_of_target:
                add_bond(
                    node_of_target[matched_end], node_of_target[free_end],
                    bond.order, bond.aromatic, bond.direction,
                    skip_existing=True,
                )
        else:
            if a_t in node_of_target and b_t in node_of_target:
                add_bond(
                    node_of_target[a_t], node_of_target[b_t],
                    bond.order, bond.aromatic, bond.direction,
                )

    # 3. Hydrogen rebalancing and valence checks.  Aromatic bonds count
    # 1.5 toward the rebalance sum but only 1.0 toward the sigma-frame
    # valence check, which keeps pyrrole-type nitrogens legal.
    order_sums = [0.0] * len(new_atoms)
    sigma_sums = [0.0] * len(new_atoms)
    signatures: list[list] = [[] for _ in new_atoms]
    for bond in bonds:
        inc = 1.5 if bond.aromatic else float(bond.order)
        sigma = 1.0 if bond.aromatic else float(bond.order)
        for end in (bond.a, bond.b):
            order_sums[end] += inc
            sigma_sums[end] += sigma
            signatures[end].append((bond.order, bond.aromatic))
    old_signatures: dict[int, list] = {}
    for t in node_of_target:
        old_signatures[t] = sorted(
            (b.order, b.aromatic) for _v, b in product.neighbors(t)
        )

    for idx, node in enumerate(new_atoms):
        unchanged = (
            node.source is not None
            and sorted(signatures[idx]) == old_signatures[node.source]
        )
        if not node.h_fixed and not unchanged:
            node.hydrogens = _rebalanced_hydrogens(node, order_sums[idx])
        _check_valence(node, sigma_sums[idx])

    # 4. Chirality bookkeeping: remap neighbor references for atoms whose
    # bonding survived intact, drop tags elsewhere.
    adjacency: dict[int, set[int]] = {i: set() for i in range(len(new_atoms))}
    for bond in bonds:
        adjacency[bond.a].add(bond.b)
        adjacency[bond.b].add(bond.a)
    final_atoms: list[Atom] = []
    for idx, node in enumerate(new_atoms):
        chiral = node.chiral
        chiral_order = None
        if chiral and node.chiral_order is not None and node.source is not None:
            remapped = []
            valid = True
            for ref in node.chiral_order:
                if ref == -1:
                    remapped.append(-1)
                elif ref in node_of_target and node_of_target[ref] in adjacency[idx]:
                    remapped.append(node_of_target[ref])
                else:
                    valid = False
                    break
            expected = len(adjacency[idx]) + (1 if node.hydrogens == 1 else 0)
            if valid and len(remapped) == expected:
                chiral_order = tuple(remapped)
            else:
                chiral = None
        else:
            chiral = None
        final_atoms.append(
            Atom(
                node.element, node.charge, node.aromatic, node.hydrogens,
                node.isotope, chiral, chiral_order,
            )
        )

    try:
        graph = MolGraph(tuple(final_atoms), tuple(bonds))
    except ChemError as exc:
        raise RewriteValenceViolation(str(exc)) from exc
    return [graph.subgraph(group) for group in graph.component_atom_sets()]


def _rebalanced_hydrogens(node: _NewAtom, order_sum: float) -> int:
    valences = valences_for(node.element, node.charge)
    if valences is None:
        return 0
    if node.aromatic:
        return max(0, valences[0] - math.floor(order_sum))
    total = math.ceil(order_sum)
    for valence in valences:
        if total <= valence:
            return valence - total
    return 0  # over-bonded; the valence check below rejects the rewrite


def _check_valence(node: _NewAtom, sigma_sum: float) -> None:
    valences = valences_for(node.element, node.charge)
    if valences is None:
        return
    if sigma_sum + node.hydrogens > max(valences) + 1e-9:
        raise RewriteValenceViolation(
            f"{node.element} (charge {node.charge:+d}) carries sigma bond "
            f"order {sigma_sum:g} plus {node.hydrogens}H"
        )

"""Backtracking subgraph matching of query patterns against molecules.

Every returned map is an injective homomorphism: pattern bonds must exist
in the target with compatible order and aromaticity, but extra target
bonds between matched atoms are allowed (matching is not induced).
"""

from __future__ import annotations

from .mol import Atom, MolGraph
from .pattern import PatternGraph, QueryAtom


def atom_matches(query: QueryAtom, atom: Atom) -> bool:
    if query.element is not None and query.element != atom.element:
        return False
    if query.aromatic is not None and query.aromatic != atom.aromatic:
        return False
    if query.charge is not None and query.charge != atom.charge:
        return False
    if query.hydrogens is not None and query.hydrogens != atom.hydrogens:
        return False
    return True


def match_pattern(pattern: PatternGraph, mol: MolGraph) -> list[tuple[int, ...]]:
    """All injective matches of ``pattern`` in ``mol``.

    Each result maps pattern atom index -> target atom index.  Results
    are sorted lexicographically by the mapped index tuple; no symmetry
    deduplication is applied.
    """
    p_count = len(pattern.atoms)
    if p_count == 0:
        return []
    t_count = len(mol.atoms)
    if p_count > t_count:
        return []

    # Per-pattern-atom candidate lists from local constraints.
    candidates: list[list[int]] = []
    for query in pattern.atoms:
        cands = [t for t in range(t_count) if atom_matches(query, mol.atoms[t])]
        if not cands:
            return []
        candidates.append(cands)

    # Matching order: walk each pattern component, preferring atoms
    # adjacent to already-placed ones so bond checks prune early.
    order: list[int] = []
    placed: set[int] = set()
    for group in pattern.component_atom_sets():
        frontier = [group[0]]
        seen = {group[0]}
        while frontier:
            u = frontier.pop(0)
            order.append(u)
            placed.add(u)
            for v, _bond in pattern.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    frontier.append(v)

    assignment: dict[int, int] = {}
    used: set[int] = set()
    results: list[tuple[int, ...]] = []

    def backtrack(depth: int) -> None:
        if depth == p_count:
            results.append(tuple(assignment[i] for i in range(p_count)))
            return
        p = order[depth]
        for t in candidates[p]:
            if t in used:
                continue
            ok = True
            for q, qbond in pattern.neighbors(p):
                if q in assignment:
                    bond = mol.bond_between(assignment[q], t)
                    if bond is None or not qbond.matches(bond.order, bond.aromatic):
                        ok = False
                        break
            if ok:
                assignment[p] = t
                used.add(t)
                backtrack(depth + 1)
                del assignment[p]
                used.remove(t)

    backtrack(0)
    results.sort()
    return results


def has_substructure(pattern: PatternGraph, mol: MolGraph) -> bool:
    """True if at least one match exists (stops at the first)."""
    p_count = len(pattern.atoms)
    if p_count == 0 or p_count > len(mol.atoms):
        return False
    # Reuse the full matcher for simplicity at desk scale; patterns and
    # catalog molecules are small.
    return bool(match_pattern(pattern, mol))

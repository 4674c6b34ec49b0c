"""Attributed molecular graph: the universal chemical value.

A ``MolGraph`` is immutable after construction.  Bond endpoints always
index valid atoms, self-loops and duplicate atom pairs are rejected, and
every aromatic bond joins two aromatic-flagged atoms.
"""

from __future__ import annotations

from dataclasses import dataclass

from .elements import ATOMIC_WEIGHTS


class ChemError(ValueError):
    """Base class for chemistry-layer errors."""


class UnknownAtomicWeight(ChemError):
    """Raised when a molecular weight is requested for an element outside
    the embedded weight table."""


@dataclass(frozen=True)
class Atom:
    """One heavy atom.

    ``hydrogens`` is the total attached hydrogen count (implicit plus any
    bracket-specified).  ``chiral`` preserves an input tetrahedral tag
    ('@' or '@@'); ``chiral_order`` records the neighbor order the tag was
    written against, with -1 standing in for an implicit hydrogen.
    """

    element: str
    charge: int = 0
    aromatic: bool = False
    hydrogens: int = 0
    isotope: int | None = None
    chiral: str | None = None
    chiral_order: tuple[int, ...] | None = None


@dataclass(frozen=True)
class Bond:
    """Bond between atoms ``a`` and ``b`` (a < b is not required).

    ``direction`` preserves cis/trans markers: +1 for '/' and -1 for '\\'
    as written when traversing a -> b; 0 means undirected.
    """

    a: int
    b: int
    order: int = 1
    aromatic: bool = False
    direction: int = 0

    def other(self, idx: int) -> int:
        return self.b if idx == self.a else self.a


class MolGraph:
    """Immutable molecular graph.

    Construction validates the structural invariants; all derived data
    (adjacency, component count) is computed once up front.
    """

    __slots__ = ("atoms", "bonds", "_adj", "components")

    def __init__(self, atoms: tuple[Atom, ...], bonds: tuple[Bond, ...]):
        n = len(atoms)
        seen_pairs: set[tuple[int, int]] = set()
        adj: list[list[tuple[int, Bond]]] = [[] for _ in range(n)]
        for bond in bonds:
            if not (0 <= bond.a < n and 0 <= bond.b < n):
                raise ChemError(f"bond endpoint out of range: {bond.a}-{bond.b}")
            if bond.a == bond.b:
                raise ChemError(f"self-loop on atom {bond.a}")
            pair = (min(bond.a, bond.b), max(bond.a, bond.b))
            if pair in seen_pairs:
                raise ChemError(f"duplicate bond {pair[0]}-{pair[1]}")
            seen_pairs.add(pair)
            if bond.aromatic and not (atoms[bond.a].aromatic and atoms[bond.b].aromatic):
                raise ChemError(
                    f"aromatic bond {bond.a}-{bond.b} joins a non-aromatic atom"
                )
            adj[bond.a].append((bond.b, bond))
            adj[bond.b].append((bond.a, bond))
        self.atoms = atoms
        self.bonds = bonds
        self._adj = tuple(tuple(entries) for entries in adj)
        self.components = self._count_components()

    def _count_components(self) -> int:
        n = len(self.atoms)
        seen = [False] * n
        count = 0
        for start in range(n):
            if seen[start]:
                continue
            count += 1
            stack = [start]
            seen[start] = True
            while stack:
                i = stack.pop()
                for j, _ in self._adj[i]:
                    if not seen[j]:
                        seen[j] = True
                        stack.append(j)
        return count

    def neighbors(self, idx: int) -> tuple[tuple[int, Bond], ...]:
        return self._adj[idx]

    def degree(self, idx: int) -> int:
        return len(self._adj[idx])

    def bond_between(self, a: int, b: int) -> Bond | None:
        for j, bond in self._adj[a]:
            if j == b:
                return bond
        return None

    @property
    def heavy_atom_count(self) -> int:
        return len(self.atoms)

    @property
    def ring_count(self) -> int:
        """Circuit rank: bonds - atoms + components."""
        return len(self.bonds) - len(self.atoms) + self.components

    def molecular_weight(self) -> float:
        """Weight in g/mol, implicit hydrogens included."""
        total = 0.0
        for atom in self.atoms:
            weight = ATOMIC_WEIGHTS.get(atom.element)
            if weight is None:
                raise UnknownAtomicWeight(
                    f"no atomic weight for element {atom.element!r}"
                )
            total += weight + atom.hydrogens * ATOMIC_WEIGHTS["H"]
        return total

    def component_atom_sets(self) -> list[list[int]]:
        """Atom indices grouped by connected component, in discovery order."""
        n = len(self.atoms)
        seen = [False] * n
        groups: list[list[int]] = []
        for start in range(n):
            if seen[start]:
                continue
            members = []
            stack = [start]
            seen[start] = True
            while stack:
                i = stack.pop()
                members.append(i)
                for j, _ in self._adj[i]:
                    if not seen[j]:
                        seen[j] = True
                        stack.append(j)
            groups.append(sorted(members))
        return groups

    def subgraph(self, atom_indices: list[int]) -> "MolGraph":
        """Extract the induced subgraph, renumbering atoms 0..k-1.

        Chiral neighbor orders are remapped; tags whose reference
        neighbors fall outside the selection are dropped.
        """
        index_map = {old: new for new, old in enumerate(atom_indices)}
        atoms = []
        for old in atom_indices:
            atom = self.atoms[old]
            if atom.chiral_order is not None:
                remapped = _remap_chiral_order(atom.chiral_order, index_map)
                if remapped is None:
                    atom = _without_chirality(atom)
                else:
                    atom = _with_chiral_order(atom, remapped)
            atoms.append(atom)
        bonds = []
        selected = set(atom_indices)
        for bond in self.bonds:
            if bond.a in selected and bond.b in selected:
                bonds.append(
                    Bond(
                        index_map[bond.a],
                        index_map[bond.b],
                        bond.order,
                        bond.aromatic,
                        bond.direction,
                    )
                )
        return MolGraph(tuple(atoms), tuple(bonds))

    def __repr__(self) -> str:
        return f"MolGraph(atoms={len(self.atoms)}, bonds={len(self.bonds)})"


def _remap_chiral_order(
    order: tuple[int, ...], index_map: dict[int, int]
) -> tuple[int, ...] | None:
    out = []
    for ref in order:
        if ref == -1:
            out.append(-1)
        elif ref in index_map:
            out.append(index_map[ref])
        else:
            return None
    return tuple(out)


def _without_chirality(atom: Atom) -> Atom:
    return Atom(
        atom.element, atom.charge, atom.aromatic, atom.hydrogens, atom.isotope
    )


def _with_chiral_order(atom: Atom, order: tuple[int, ...]) -> Atom:
    return Atom(
        atom.element,
        atom.charge,
        atom.aromatic,
        atom.hydrogens,
        atom.isotope,
        atom.chiral,
        order,
    )


def mol_properties(mol: MolGraph) -> dict:
    """Heavy atom count, ring count, and molecular weight of a molecule."""
    return {
        "heavy_atom_count": mol.heavy_atom_count,
        "ring_count": mol.ring_count,
        "molecular_weight": mol.molecular_weight(),
    }

"""Canonical SMILES generation.

Atoms are ranked by iterative neighborhood-invariant refinement with
deterministic tie-breaking, then the writer emits a depth-first string
following those ranks.  The output is an artifact-defined canonical form:
stable across atom reorderings of the same graph, not compatible with any
external canonicalization scheme.

Tetrahedral tags and directional bonds are preserved: the writer tracks
the emitted neighbor order and flips '@'/'@@' (or '/'/'\\') whenever its
traversal visits neighbors in an order of opposite parity to the parsed
one.
"""

from __future__ import annotations

import sys

from .elements import ORGANIC_SUBSET
from .mol import Bond, MolGraph
from .smiles import implied_hydrogens


def canonical_ranks(mol: MolGraph) -> list[int]:
    """Dense canonical ranks, 0..n-1, one per atom."""
    n = len(mol.atoms)
    if n == 0:
        return []
    invariants: list[tuple] = []
    for i, atom in enumerate(mol.atoms):
        invariants.append(
            (
                atom.element,
                atom.aromatic,
                atom.charge,
                atom.hydrogens,
                mol.degree(i),
                atom.isotope or 0,
            )
        )
    ranks = _refine(mol, _dense_ranks(invariants))
    # Break remaining ties: promote the lowest-index member of the lowest
    # tied class, then refine again.  Atoms still tied after refinement
    # are (in ordinary molecules) automorphic, so the promotion choice
    # does not affect the output string.
    while len(set(ranks)) < n:
        by_rank: dict[int, list[int]] = {}
        for i, r in enumerate(ranks):
            by_rank.setdefault(r, []).append(i)
        tied_rank = min(r for r, members in by_rank.items() if len(members) > 1)
        chosen = min(by_rank[tied_rank])
        keys = [(ranks[i], 0 if i == chosen else 1) for i in range(n)]
        ranks = _refine(mol, _dense_ranks(keys))
    return ranks


def _dense_ranks(keys: list) -> list[int]:
    order = {key: idx for idx, key in enumerate(sorted(set(keys)))}
    return [order[key] for key in keys]


def _bond_key(bond: Bond) -> tuple[int, bool]:
    return (bond.order, bond.aromatic)


def _refine(mol: MolGraph, ranks: list[int]) -> list[int]:
    n = len(mol.atoms)
    while True:
        keys = []
        for i in range(n):
            neighbor_keys = sorted(
                (_bond_key(bond), ranks[j]) for j, bond in mol.neighbors(i)
            )
            keys.append((ranks[i], tuple(neighbor_keys)))
        new_ranks = _dense_ranks(keys)
        if new_ranks == ranks:
            return ranks
        ranks = new_ranks


def write_canonical_smiles(mol: MolGraph) -> str:
    """Serialize a molecular graph to its canonical SMILES text."""
    parts = []
    for group in mol.component_atom_sets():
        parts.append(_write_component(mol.subgraph(group)))
    return ".".join(sorted(parts))


def _write_component(mol: MolGraph) -> str:
    n = len(mol.atoms)
    if n == 0:
        return ""
    ranks = canonical_ranks(mol)
    root = ranks.index(0)

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 8 * n + 1000))
    try:
        return _Writer(mol, ranks).render(root)
    finally:
        sys.setrecursionlimit(old_limit)


class _Writer:
    def __init__(self, mol: MolGraph, ranks: list[int]):
        self.mol = mol
        self.ranks = ranks
        self.visit_pos: dict[int, int] = {}
        self.parent: dict[int, int | None] = {}
        self.children: dict[int, list[int]] = {i: [] for i in range(len(mol.atoms))}
        self.ring_partners: dict[int, list[int]] = {
            i: [] for i in range(len(mol.atoms))
        }
        self.ring_pairs: set[tuple[int, int]] = set()

    def render(self, root: int) -> str:
        self.parent[root] = None
        self._spanning_tree(root, None)
        for u in self.ring_partners:
            self.ring_partners[u].sort(key=lambda v: self.visit_pos[v])
        self._assign_digits()
        out: list[str] = []
        self._emit(root, out)
        return "".join(out)

    def _spanning_tree(self, u: int, par: int | None) -> None:
        self.visit_pos[u] = len(self.visit_pos)
        for v, _bond in sorted(self.mol.neighbors(u), key=lambda t: self.ranks[t[0]]):
            if v == par:
                continue
            if v in self.visit_pos:
                pair = (min(u, v), max(u, v))
                if pair not in self.ring_pairs:
                    self.ring_pairs.add(pair)
                    self.ring_partners[u].append(v)
                    self.ring_partners[v].append(u)
            else:
                self.parent[v] = u
                self.children[u].append(v)
                self._spanning_tree(v, u)

    def _assign_digits(self) -> None:
        self.digit_of: dict[tuple[int, int], int] = {}
        self.opens_at: dict[int, list[tuple[int, int]]] = {}
        self.closes_at: dict[int, list[tuple[int, int]]] = {}
        free = list(range(1, 100))
        for u in sorted(self.visit_pos, key=self.visit_pos.get):
            self.opens_at[u] = []
            self.closes_at[u] = []
            for v in self.ring_partners[u]:
                pair = (min(u, v), max(u, v))
                if self.visit_pos[v] > self.visit_pos[u]:
                    digit = free.pop(0)
                    self.digit_of[pair] = digit
                    self.opens_at[u].append((v, digit))
                else:
                    digit = self.digit_of[pair]
                    self.closes_at[u].append((v, digit))
                    free.append(digit)
                    free.sort()

    def _bond_symbol(self, u: int, v: int) -> str:
        bond = self.mol.bond_between(u, v)
        if bond.aromatic:
            return ""
        if bond.order == 2:
            return "="
        if bond.order == 3:
            return "#"
        if bond.direction != 0:
            direction = bond.direction if u == bond.a else -bond.direction
            return "/" if direction == 1 else "\\"
        if self.mol.atoms[u].aromatic and self.mol.atoms[v].aromatic:
            return "-"
        return ""

    def _emit(self, u: int, out: list[str]) -> None:
        atom = self.mol.atoms[u]
        emitted: list[int] = []
        if self.parent[u] is not None:
            emitted.append(self.parent[u])
        if atom.chiral and atom.hydrogens == 1:
            emitted.append(-1)
        ring_tokens: list[str] = []
        for v, digit in self.closes_at[u]:
            emitted.append(v)
            ring_tokens.append(_digit_token(digit))
        for v, digit in self.opens_at[u]:
            emitted.append(v)
            ring_tokens.append(self._bond_symbol(u, v) + _digit_token(digit))
        emitted.extend(self.children[u])
        out.append(_atom_token(self.mol, u, emitted))
        out.extend(ring_tokens)
        kids = self.children[u]
        for v in kids[:-1]:
            out.append("(")
            out.append(self._bond_symbol(u, v))
            self._emit(v, out)
            out.append(")")
        if kids:
            v = kids[-1]
            out.append(self._bond_symbol(u, v))
            self._emit(v, out)


def _digit_token(digit: int) -> str:
    return str(digit) if digit < 10 else f"%{digit:02d}"


def _atom_token(mol: MolGraph, idx: int, emitted: list[int]) -> str:
    atom = mol.atoms[idx]
    order_sum = 0.0
    for _j, bond in mol.neighbors(idx):
        order_sum += 1.5 if bond.aromatic else float(bond.order)
    symbol = atom.element.lower() if atom.aromatic else atom.element
    chiral = atom.chiral
    if chiral and atom.chiral_order is not None:
        chiral = _oriented_tag(atom.chiral, atom.chiral_order, emitted)
    bare_ok = (
        atom.element in ORGANIC_SUBSET
        and atom.charge == 0
        and atom.isotope is None
        and chiral is None
        and atom.hydrogens
        == implied_hydrogens(atom.element, atom.aromatic, order_sum)
    )
    if bare_ok:
        return symbol
    token = "["
    if atom.isotope is not None:
        token += str(atom.isotope)
    token += symbol
    if chiral:
        token += chiral
    if atom.hydrogens == 1:
        token += "H"
    elif atom.hydrogens > 1:
        token += f"H{atom.hydrogens}"
    if atom.charge == 1:
        token += "+"
    elif atom.charge == -1:
        token += "-"
    elif atom.charge > 1:
        token += f"+{atom.charge}"
    elif atom.charge < -1:
        token += f"-{-atom.charge}"
    return token + "]"


def _oriented_tag(
    tag: str, stored: tuple[int, ...], emitted: list[int]
) -> str | None:
    """Flip a tetrahedral tag if the emitted neighbor order has opposite
    permutation parity to the stored one; drop it if the orders disagree
    in content."""
    if len(stored) != 4 or sorted(stored) != sorted(emitted):
        return None
    positions = [stored.index(x) for x in emitted]
    inversions = 0
    for i in range(len(positions)):
        for j in range(i + 1, len(positions)):
            if positions[i] > positions[j]:
                inversions += 1
    if inversions % 2 == 0:
        return tag
    return "@@" if tag == "@" else "@"

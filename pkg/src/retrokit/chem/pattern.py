"""Query graphs for substructure matching and retro templates.

The supported pattern language is a deliberate SMARTS subset: element or
'*' wildcard atoms with aromatic case, optional charge, optional explicit
hydrogen count, and atom maps; bonds are -, =, #, :, '~' (any) or the
default single-or-aromatic.  Anything fancier (logical operators, ring
counts, recursive patterns) is rejected loudly at parse time.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .mol import ChemError
from .smiles import SmilesError, parse_body


class PatternError(ChemError):
    """Bad pattern text; carries the byte offset when known."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)
        self.offset = offset


# Callers matching on parse failures usually want the offset-carrying
# class; BadPattern is the conventional name for it.
BadPattern = PatternError


class MissingArrow(PatternError):
    pass


class DuplicateAtomMap(PatternError):
    pass


class BondKind(enum.Enum):
    SINGLE = "-"
    DOUBLE = "="
    TRIPLE = "#"
    AROMATIC = ":"
    ANY = "~"
    SINGLE_OR_AROMATIC = ""


@dataclass(frozen=True)
class QueryAtom:
    """Constraints on one matched atom.  None means unconstrained."""

    element: str | None
    aromatic: bool | None
    charge: int | None = None
    hydrogens: int | None = None
    map_num: int | None = None


@dataclass(frozen=True)
class QueryBond:
    a: int
    b: int
    kind: BondKind

    def matches(self, order: int, aromatic: bool) -> bool:
        if self.kind is BondKind.ANY:
            return True
        if self.kind is BondKind.AROMATIC:
            return aromatic
        if self.kind is BondKind.SINGLE_OR_AROMATIC:
            return aromatic or order == 1
        if aromatic:
            return False
        return order == {"-": 1, "=": 2, "#": 3}[self.kind.value]


class PatternGraph:
    """Immutable query graph, possibly multi-component."""

    __slots__ = ("atoms", "bonds", "_adj", "text")

    def __init__(self, atoms: tuple[QueryAtom, ...], bonds: tuple[QueryBond, ...], text: str = ""):
        adj: list[list[tuple[int, QueryBond]]] = [[] for _ in atoms]
        for bond in bonds:
            adj[bond.a].append((bond.b, bond))
            adj[bond.b].append((bond.a, bond))
        self.atoms = atoms
        self.bonds = bonds
        self._adj = tuple(tuple(x) for x in adj)
        self.text = text

    def neighbors(self, idx: int) -> tuple[tuple[int, QueryBond], ...]:
        return self._adj[idx]

    def bond_between(self, a: int, b: int) -> QueryBond | None:
        for j, bond in self._adj[a]:
            if j == b:
                return bond
        return None

    def component_atom_sets(self) -> list[list[int]]:
        seen = [False] * len(self.atoms)
        groups = []
        for start in range(len(self.atoms)):
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

    def map_numbers(self) -> dict[int, int]:
        """map number -> atom index for all mapped atoms."""
        out = {}
        for i, atom in enumerate(self.atoms):
            if atom.map_num is not None:
                out[atom.map_num] = i
        return out

    def __repr__(self) -> str:
        return f"PatternGraph({self.text!r})"


_REJECTED_CHARS = set("!&;,$")


def parse_pattern(text: str) -> PatternGraph:
    """Parse pattern text into a query graph.

    Raises ``PatternError`` (with offset) on syntax errors or on SMARTS
    features outside the supported subset.
    """
    for idx, ch in enumerate(text):
        if ch in _REJECTED_CHARS:
            raise PatternError(f"unsupported pattern feature {ch!r}", idx)
    try:
        drafts, bond_drafts = parse_body(text, pattern_mode=True)
    except SmilesError as exc:
        raise PatternError(str(exc).rsplit(" (offset", 1)[0], exc.offset) from exc

    atoms = []
    for draft in drafts:
        atoms.append(
            QueryAtom(
                element=draft.element,
                aromatic=draft.aromatic,
                charge=draft.charge if draft.explicit_charge else None,
                hydrogens=draft.hydrogens if draft.explicit_h else None,
                map_num=draft.map_num,
            )
        )
    bonds = []
    for bd in bond_drafts:
        spec = bd.spec
        if spec is None:
            kind = BondKind.SINGLE_OR_AROMATIC
        elif spec.order is None:
            kind = BondKind.ANY
        elif spec.aromatic:
            kind = BondKind.AROMATIC
        else:
            kind = {1: BondKind.SINGLE, 2: BondKind.DOUBLE, 3: BondKind.TRIPLE}[spec.order]
        bonds.append(QueryBond(bd.a, bd.b, kind))
    return PatternGraph(tuple(atoms), tuple(bonds), text)


@dataclass(frozen=True)
class RetroTemplate:
    """One retrosynthetic rewrite rule.

    ``product_pattern`` matches the target; ``reactant_side`` holds the
    full reactant-side query graph whose components are the individual
    ``reactant_patterns``.  Reactant atoms without a map number are
    template-introduced and must be fully specified.
    """

    id: str
    product_pattern: PatternGraph
    reactant_side: PatternGraph
    reactant_patterns: tuple[PatternGraph, ...]
    precedent_count: int = 1
    reference_ids: tuple[str, ...] = ()
    text: str = ""


def parse_retro_template(
    text: str,
    template_id: str = "",
    precedent_count: int = 1,
    reference_ids: tuple[str, ...] = (),
) -> RetroTemplate:
    """Parse ``product>>reactant(.reactant)*`` retro template text."""
    arrow = text.find(">>")
    if arrow < 0:
        raise MissingArrow("template must contain '>>'")
    product_text = text[:arrow]
    reactant_text = text[arrow + 2 :]
    if not product_text:
        raise PatternError("empty product pattern", 0)
    if not reactant_text:
        raise PatternError("empty reactant side", arrow + 2)

    product = parse_pattern(product_text)
    if len(product.component_atom_sets()) != 1:
        raise PatternError("product pattern must be a single component", 0)
    reactant_side = parse_pattern(reactant_text)

    _check_unique_maps(product, "product")
    _check_unique_maps(reactant_side, "reactant")

    product_maps = set(product.map_numbers())
    for i, atom in enumerate(reactant_side.atoms):
        if atom.map_num is not None and atom.map_num not in product_maps:
            raise PatternError(
                f"reactant map :{atom.map_num} does not appear on the product side"
            )
        if atom.map_num is None and atom.element is None:
            raise PatternError(
                "template-introduced atoms must have a definite element"
            )
    for bond in reactant_side.bonds:
        if bond.kind is BondKind.ANY:
            raise PatternError("any-bond '~' is not allowed on the reactant side")

    components = [
        _component_pattern(reactant_side, group)
        for group in reactant_side.component_atom_sets()
    ]
    return RetroTemplate(
        id=template_id,
        product_pattern=product,
        reactant_side=reactant_side,
        reactant_patterns=tuple(components),
        precedent_count=precedent_count,
        reference_ids=tuple(reference_ids),
        text=text,
    )


def _check_unique_maps(pattern: PatternGraph, side: str) -> None:
    seen: set[int] = set()
    for atom in pattern.atoms:
        if atom.map_num is None:
            continue
        if atom.map_num in seen:
            raise DuplicateAtomMap(f"map :{atom.map_num} repeated on {side} side")
        seen.add(atom.map_num)


def _component_pattern(pattern: PatternGraph, group: list[int]) -> PatternGraph:
    index_map = {old: new for new, old in enumerate(group)}
    atoms = tuple(pattern.atoms[i] for i in group)
    bonds = tuple(
        QueryBond(index_map[b.a], index_map[b.b], b.kind)
        for b in pattern.bonds
        if b.a in index_map and b.b in index_map
    )
    return PatternGraph(atoms, bonds)

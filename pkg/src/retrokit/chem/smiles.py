"""SMILES reader.

Covers the organic subset plus bracket atoms (isotope, charge, explicit
hydrogens, tetrahedral tags), ring closures including %nn, components via
'.', and directional single bonds.  Aromaticity is taken from lowercase
input as written; no ring perception or kekulization is attempted, so a
string is trusted to mean exactly what it spells.

The low-level body parser is shared with the pattern (SMARTS subset)
reader, which supplies its own finishing pass.
"""

from __future__ import annotations

import math

from .elements import (
    ALL_ELEMENTS,
    AROMATIC_ELEMENTS,
    ORGANIC_SUBSET,
    STANDARD_VALENCES,
)
from .mol import Atom, Bond, ChemError, MolGraph


class SmilesError(ChemError):
    """Parse failure; ``offset`` is the byte position in the input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnclosedRing(SmilesError):
    pass


class UnbalancedParenthesis(SmilesError):
    pass


class UnknownElement(SmilesError):
    pass


class ValenceViolation(SmilesError):
    pass


class AromaticBondError(SmilesError):
    pass


_BOND_ORDERS = {"-": 1, "=": 2, "#": 3}


class _AtomDraft:
    """Mutable atom under construction.  ``element`` None means wildcard
    (pattern mode only); ``aromatic`` None means unconstrained."""

    __slots__ = (
        "element", "charge", "aromatic", "hydrogens", "explicit_h",
        "isotope", "chiral", "neighbor_order", "offset", "map_num",
        "explicit_charge",
    )

    def __init__(self, element, aromatic, offset):
        self.element = element
        self.aromatic = aromatic
        self.charge = 0
        self.explicit_charge = False
        self.hydrogens = 0
        self.explicit_h = False
        self.isotope = None
        self.chiral = None
        self.neighbor_order: list[int] = []
        self.offset = offset
        self.map_num = None


class _BondSpec:
    """An explicit bond token.  ``order`` None with ``aromatic`` None is
    the any-bond '~' (pattern mode only)."""

    __slots__ = ("order", "aromatic", "direction", "offset")

    def __init__(self, order, aromatic, direction, offset):
        self.order = order
        self.aromatic = aromatic
        self.direction = direction
        self.offset = offset


class _BondDraft:
    __slots__ = ("a", "b", "spec", "offset")

    def __init__(self, a, b, spec, offset):
        self.a = a
        self.b = b
        self.spec = spec
        self.offset = offset


def parse_bracket_atom(
    text: str, start: int, *, pattern_mode: bool
) -> tuple[_AtomDraft, int]:
    """Parse a bracket atom beginning at ``start`` (the '[').

    Returns the draft atom and the index one past the closing ']'.
    """
    i = start + 1
    n = len(text)
    isotope = None
    if i < n and text[i].isdigit():
        j = i
        while j < n and text[j].isdigit():
            j += 1
        isotope = int(text[i:j])
        i = j
    if i >= n:
        raise SmilesError("unterminated bracket atom", start)
    aromatic: bool | None = False
    if text[i] == "*":
        if not pattern_mode:
            raise UnknownElement("wildcard atom outside a pattern", i)
        symbol = None
        aromatic = None
        i += 1
    elif text[i].isupper():
        symbol = text[i]
        if i + 1 < n and text[i + 1].islower() and symbol + text[i + 1] in ALL_ELEMENTS:
            symbol += text[i + 1]
            i += 2
        else:
            i += 1
        if symbol not in ALL_ELEMENTS:
            raise UnknownElement(f"unknown element {symbol!r}", start + 1)
    elif text[i].islower():
        symbol = text[i].upper()
        i += 1
        if symbol not in AROMATIC_ELEMENTS:
            raise UnknownElement(
                f"element {text[i - 1]!r} cannot be aromatic", i - 1
            )
        aromatic = True
    else:
        raise UnknownElement(f"expected element symbol, got {text[i]!r}", i)
    draft = _AtomDraft(symbol, aromatic, start)
    draft.isotope = isotope
    if i < n and text[i] == "@":
        if i + 1 < n and text[i + 1] == "@":
            draft.chiral = "@@"
            i += 2
        else:
            draft.chiral = "@"
            i += 1
    if i < n and text[i] == "H":
        i += 1
        count = 1
        if i < n and text[i].isdigit():
            count = int(text[i])
            i += 1
        draft.hydrogens = count
        draft.explicit_h = True
    else:
        # Bracket atoms carry zero hydrogens unless written; in pattern
        # mode an absent H token leaves the count unconstrained instead.
        draft.explicit_h = not pattern_mode
    if i < n and text[i] in "+-":
        sign = 1 if text[i] == "+" else -1
        i += 1
        if i < n and text[i].isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            draft.charge = sign * int(text[i:j])
            i = j
        else:
            magnitude = 1
            while i < n and text[i] == ("+" if sign > 0 else "-"):
                magnitude += 1
                i += 1
            draft.charge = sign * magnitude
        draft.explicit_charge = True
    if i < n and text[i] == ":":
        i += 1
        j = i
        while j < n and text[j].isdigit():
            j += 1
        if j == i:
            raise SmilesError("expected digits after ':' in bracket atom", i)
        draft.map_num = int(text[i:j])
        i = j
    if i >= n or text[i] != "]":
        raise SmilesError("expected ']' to close bracket atom", min(i, n - 1))
    return draft, i + 1


def parse_body(
    text: str, *, pattern_mode: bool
) -> tuple[list[_AtomDraft], list[_BondDraft]]:
    """Tokenize and connect a SMILES-shaped string.

    Returns draft atoms (with chiral neighbor order resolved) and draft
    bonds whose specs are still unresolved tokens; the caller decides
    default-bond semantics.
    """
    if not text:
        raise SmilesError("empty input", 0)
    drafts: list[_AtomDraft] = []
    bonds: list[_BondDraft] = []
    bond_pairs: set[tuple[int, int]] = set()
    anchor: int | None = None
    pending: _BondSpec | None = None
    branch_stack: list[int | None] = []
    open_rings: dict[int, tuple[int, _BondSpec | None, int]] = {}
    i = 0
    n = len(text)

    def record_bond(a: int, b: int, spec: _BondSpec | None, offset: int) -> None:
        pair = (min(a, b), max(a, b))
        if pair in bond_pairs:
            raise SmilesError(f"duplicate bond between atoms {a} and {b}", offset)
        bond_pairs.add(pair)
        bonds.append(_BondDraft(a, b, spec, offset))

    def add_atom(draft: _AtomDraft) -> None:
        nonlocal anchor, pending
        drafts.append(draft)
        idx = len(drafts) - 1
        if anchor is not None:
            record_bond(anchor, idx, pending, pending.offset if pending else draft.offset)
            drafts[anchor].neighbor_order.append(idx)
            draft.neighbor_order.append(anchor)
        elif pending is not None:
            raise SmilesError("bond symbol with no preceding atom", pending.offset)
        if draft.chiral and draft.explicit_h and draft.hydrogens == 1:
            # The written hydrogen occupies its position in the chiral
            # neighbor list.
            draft.neighbor_order.append(-1)
        anchor = idx
        pending = None

    def set_pending(spec: _BondSpec) -> None:
        nonlocal pending
        if pending is not None:
            raise SmilesError("two consecutive bond symbols", spec.offset)
        pending = spec

    while i < n:
        ch = text[i]
        if ch == "[":
            draft, i = parse_bracket_atom(text, i, pattern_mode=pattern_mode)
            add_atom(draft)
            continue
        if ch == "*":
            if not pattern_mode:
                raise UnknownElement("wildcard atom outside a pattern", i)
            draft = _AtomDraft(None, None, i)
            draft.explicit_h = False
            add_atom(draft)
            i += 1
            continue
        if ch == "(":
            if anchor is None:
                raise UnbalancedParenthesis("branch with no anchor atom", i)
            branch_stack.append(anchor)
            i += 1
            continue
        if ch == ")":
            if not branch_stack:
                raise UnbalancedParenthesis("unmatched ')'", i)
            if pending is not None:
                raise SmilesError("dangling bond before ')'", pending.offset)
            anchor = branch_stack.pop()
            i += 1
            continue
        if ch in _BOND_ORDERS:
            set_pending(_BondSpec(_BOND_ORDERS[ch], False, 0, i))
            i += 1
            continue
        if ch == ":":
            set_pending(_BondSpec(1, True, 0, i))
            i += 1
            continue
        if ch == "~":
            if not pattern_mode:
                raise SmilesError("any-bond '~' outside a pattern", i)
            set_pending(_BondSpec(None, None, 0, i))
            i += 1
            continue
        if ch in "/\\":
            set_pending(_BondSpec(1, False, 1 if ch == "/" else -1, i))
            i += 1
            continue
        if ch == ".":
            if pending is not None:
                raise SmilesError("bond symbol before '.'", pending.offset)
            anchor = None
            i += 1
            continue
        if ch.isdigit() or ch == "%":
            if anchor is None:
                raise SmilesError("ring closure with no preceding atom", i)
            if ch == "%":
                if i + 2 >= n or not (text[i + 1].isdigit() and text[i + 2].isdigit()):
                    raise SmilesError("'%' must be followed by two digits", i)
                num = int(text[i + 1 : i + 3])
                width = 3
            else:
                num = int(ch)
                width = 1
            if num in open_rings:
                opener, opener_spec, opener_offset = open_rings.pop(num)
                if opener == anchor:
                    raise SmilesError("ring bond to self", i)
                spec = pending
                if spec is not None and opener_spec is not None:
                    if (
                        spec.order != opener_spec.order
                        or spec.aromatic != opener_spec.aromatic
                    ):
                        raise SmilesError(
                            f"conflicting bond orders on ring closure {num}", i
                        )
                record_bond(opener, anchor, spec if spec is not None else opener_spec, i)
                drafts[anchor].neighbor_order.append(opener)
                opener_order = drafts[opener].neighbor_order
                opener_order[opener_order.index(-2 - num)] = anchor
            else:
                open_rings[num] = (anchor, pending, i)
                drafts[anchor].neighbor_order.append(-2 - num)
            pending = None
            i += width
            continue
        org = _read_organic_atom(text, i, pattern_mode)
        if org is not None:
            draft, i = org
            add_atom(draft)
            continue
        raise SmilesError(f"unexpected character {ch!r}", i)

    if pending is not None:
        raise SmilesError("dangling bond at end of input", pending.offset)
    if branch_stack:
        raise UnbalancedParenthesis("unclosed '('", n - 1)
    if open_rings:
        _num, (_, _, offset) = min(open_rings.items(), key=lambda kv: kv[1][2])
        raise UnclosedRing(f"ring bond {_num} never closed", offset)
    return drafts, bonds


def _read_organic_atom(
    text: str, i: int, pattern_mode: bool
) -> tuple[_AtomDraft, int] | None:
    ch = text[i]
    if ch.isupper():
        if text[i : i + 2] in ("Cl", "Br"):
            return _AtomDraft(text[i : i + 2], False, i), i + 2
        if ch in ORGANIC_SUBSET:
            return _AtomDraft(ch, False, i), i + 1
        raise UnknownElement(f"unknown or bracket-only element {ch!r}", i)
    if ch in "bcnops":
        return _AtomDraft(ch.upper(), True, i), i + 1
    return None


def implied_hydrogens(element: str, aromatic: bool, bond_order_sum: float) -> int:
    """Implicit hydrogen count under the standard valence model.

    Aromatic bonds contribute 1.5 to ``bond_order_sum``; aromatic atoms
    use their lowest standard valence and clamp at zero rather than
    raising, matching the usual reading of lowercase SMILES.  Returns -1
    when a non-aromatic sum exceeds every standard valence.
    """
    valences = STANDARD_VALENCES.get(element)
    if valences is None:
        return 0
    if aromatic:
        return max(0, valences[0] - math.floor(bond_order_sum))
    total = math.ceil(bond_order_sum)
    for valence in valences:
        if total <= valence:
            return valence - total
    return -1


def parse_smiles(text: str) -> MolGraph:
    """Parse a SMILES string into a molecular graph.

    Raises ``UnclosedRing``, ``UnbalancedParenthesis``, ``UnknownElement``
    or ``ValenceViolation`` (all carrying a byte offset) on bad input.
    """
    drafts, bond_drafts = parse_body(text, pattern_mode=False)

    bonds = []
    for bd in bond_drafts:
        both_aromatic = drafts[bd.a].aromatic and drafts[bd.b].aromatic
        spec = bd.spec
        if spec is None:
            bonds.append(Bond(bd.a, bd.b, 1, bool(both_aromatic)))
        elif spec.aromatic:
            if not both_aromatic:
                raise AromaticBondError(
                    "aromatic bond between non-aromatic atoms", spec.offset
                )
            bonds.append(Bond(bd.a, bd.b, 1, True))
        else:
            bonds.append(Bond(bd.a, bd.b, spec.order, False, spec.direction))

    order_sum = [0.0] * len(drafts)
    for bond in bonds:
        inc = 1.5 if bond.aromatic else float(bond.order)
        order_sum[bond.a] += inc
        order_sum[bond.b] += inc

    atoms = []
    for idx, draft in enumerate(drafts):
        hydrogens = draft.hydrogens
        if not draft.explicit_h:
            hydrogens = implied_hydrogens(draft.element, draft.aromatic, order_sum[idx])
            if hydrogens < 0:
                raise ValenceViolation(
                    f"{draft.element} with bond order sum {order_sum[idx]:g} "
                    "exceeds its standard valences",
                    draft.offset,
                )
        chiral_order = tuple(draft.neighbor_order) if draft.chiral else None
        atoms.append(
            Atom(
                draft.element,
                draft.charge,
                draft.aromatic,
                hydrogens,
                draft.isotope,
                draft.chiral,
                chiral_order,
            )
        )
    return MolGraph(tuple(atoms), tuple(bonds))

"""Circular (Morgan-style) fingerprints with a stable hash.

Environment identifiers come from iterated neighborhood hashing with a
64-bit FNV-1a core, so equal molecules give byte-equal bitsets across
processes and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

from .mol import ChemError, MolGraph

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


class WidthMismatch(ChemError):
    """Tanimoto between fingerprints of different widths."""


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class Fingerprint:
    """Fixed-width bitset; ``bits`` is a Python int bitmask."""

    bits: int
    width: int
    radius: int

    def bit_count(self) -> int:
        return self.bits.bit_count()

    def __or__(self, other: "Fingerprint") -> "Fingerprint":
        if self.width != other.width:
            raise WidthMismatch(
                f"cannot combine widths {self.width} and {other.width}"
            )
        return Fingerprint(self.bits | other.bits, self.width, max(self.radius, other.radius))


def _initial_ids(mol: MolGraph) -> list[int]:
    ids = []
    for i, atom in enumerate(mol.atoms):
        key = (
            f"{atom.element}|{atom.charge}|{int(atom.aromatic)}|"
            f"{atom.hydrogens}|{mol.degree(i)}|{atom.isotope or 0}"
        )
        ids.append(fnv1a64(key.encode()))
    return ids


def morgan_environments(mol: MolGraph, radius: int) -> list[list[int]]:
    """Environment identifiers per radius shell.

    Returns ``radius + 1`` lists, each holding one identifier per atom:
    index 0 is the bare atom invariant, later shells fold in neighbor
    identifiers of the previous round.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    current = _initial_ids(mol)
    shells = [list(current)]
    for r in range(1, radius + 1):
        following = []
        for i in range(len(mol.atoms)):
            neighbor_parts = sorted(
                f"{bond.order}{'a' if bond.aromatic else ''}:{current[j]}"
                for j, bond in mol.neighbors(i)
            )
            key = f"{r}|{current[i]}|" + "|".join(neighbor_parts)
            following.append(fnv1a64(key.encode()))
        shells.append(following)
        current = following
    return shells


def morgan_fingerprint(mol: MolGraph, radius: int = 2, width: int = 2048) -> Fingerprint:
    """Hashed circular fingerprint over radius 0..``radius`` environments.

    ``width`` must be a power of two, at least 64.
    """
    if width < 64 or width & (width - 1):
        raise ValueError("width must be a power of two >= 64")
    bits = 0
    for shell in morgan_environments(mol, radius):
        for identifier in shell:
            bits |= 1 << (identifier % width)
    return Fingerprint(bits, width, radius)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """Intersection over union of two bitsets; 1.0 when both are empty."""
    if a.width != b.width:
        raise WidthMismatch(f"widths differ: {a.width} vs {b.width}")
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        return 1.0
    return (a.bits & b.bits).bit_count() / union


def union_fingerprint(fps: list[Fingerprint]) -> Fingerprint:
    """Bitwise OR of a non-empty fingerprint list."""
    if not fps:
        raise ValueError("need at least one fingerprint")
    acc = fps[0]
    for fp in fps[1:]:
        acc = acc | fp
    return acc

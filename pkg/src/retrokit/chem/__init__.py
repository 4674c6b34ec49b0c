"""Chemistry core: molecular graphs, SMILES, patterns, fingerprints."""

from .elements import ATOMIC_WEIGHTS, ORGANIC_SUBSET
from .mol import Atom, Bond, ChemError, MolGraph, UnknownAtomicWeight, mol_properties
from .smiles import (
    AromaticBondError,
    SmilesError,
    UnbalancedParenthesis,
    UnclosedRing,
    UnknownElement,
    ValenceViolation,
    parse_smiles,
)
from .canon import canonical_ranks, write_canonical_smiles
from .fingerprint import (
    Fingerprint,
    WidthMismatch,
    morgan_environments,
    morgan_fingerprint,
    tanimoto,
    union_fingerprint,
)
from .pattern import (
    BadPattern,
    BondKind,
    DuplicateAtomMap,
    MissingArrow,
    PatternError,
    PatternGraph,
    QueryAtom,
    QueryBond,
    RetroTemplate,
    parse_pattern,
    parse_retro_template,
)
from .match import atom_matches, has_substructure, match_pattern
from .transform import (
    PrecursorOutcome,
    RewriteValenceViolation,
    TemplateApplication,
    apply_retro_template,
)


def canonicalize(text: str) -> str:
    """Parse and re-serialize a SMILES string to its canonical form."""
    return write_canonical_smiles(parse_smiles(text))


__all__ = [
    "ATOMIC_WEIGHTS",
    "ORGANIC_SUBSET",
    "Atom",
    "AromaticBondError",
    "BadPattern",
    "Bond",
    "BondKind",
    "ChemError",
    "DuplicateAtomMap",
    "Fingerprint",
    "MissingArrow",
    "MolGraph",
    "PatternError",
    "PatternGraph",
    "PrecursorOutcome",
    "QueryAtom",
    "QueryBond",
    "RetroTemplate",
    "RewriteValenceViolation",
    "SmilesError",
    "TemplateApplication",
    "UnbalancedParenthesis",
    "UnclosedRing",
    "UnknownAtomicWeight",
    "UnknownElement",
    "ValenceViolation",
    "WidthMismatch",
    "apply_retro_template",
    "atom_matches",
    "canonical_ranks",
    "canonicalize",
    "has_substructure",
    "match_pattern",
    "mol_properties",
    "morgan_environments",
    "morgan_fingerprint",
    "parse_pattern",
    "parse_retro_template",
    "parse_smiles",
    "tanimoto",
    "union_fingerprint",
    "write_canonical_smiles",
]

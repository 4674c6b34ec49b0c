"""Element tables: symbols, standard valences, and atomic weights.

The weight table is intentionally small (desk-scale organic chemistry);
asking for the weight of anything else raises ``UnknownAtomicWeight``.
"""

from __future__ import annotations

# Elements that may be written without brackets in SMILES.
ORGANIC_SUBSET = frozenset({"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"})

# Elements that may carry the aromatic (lowercase) flag.
AROMATIC_ELEMENTS = frozenset({"B", "C", "N", "O", "P", "S"})

# Standard valence lists used to fill implicit hydrogens on neutral atoms.
# The smallest valence >= the current bond order sum wins.
STANDARD_VALENCES: dict[str, tuple[int, ...]] = {
    "H": (1,),
    "B": (3,),
    "C": (4,),
    "N": (3, 5),
    "O": (2,),
    "F": (1,),
    "Si": (4,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}

# Valence lists for common charge states, used when rebalancing hydrogens
# after a template rewrite.  Keys are (element, formal charge).
CHARGED_VALENCES: dict[tuple[str, int], tuple[int, ...]] = {
    ("B", -1): (4,),
    ("C", 1): (3,),
    ("C", -1): (3,),
    ("N", 1): (4,),
    ("N", -1): (2,),
    ("O", 1): (3,),
    ("O", -1): (1,),
    ("P", 1): (4,),
    ("S", 1): (3, 5),
    ("S", -1): (1,),
    ("F", -1): (0,),
    ("Cl", -1): (0,),
    ("Br", -1): (0,),
    ("I", -1): (0,),
}

# 2021 IUPAC abridged standard atomic weights, g/mol.
ATOMIC_WEIGHTS: dict[str, float] = {
    "H": 1.008,
    "B": 10.81,
    "C": 12.011,
    "N": 14.007,
    "O": 15.999,
    "F": 18.998,
    "Si": 28.085,
    "P": 30.974,
    "S": 32.06,
    "Cl": 35.45,
    "Br": 79.904,
    "I": 126.904,
}

# Full symbol set accepted inside brackets.  Parsing is permissive about
# which elements exist; weights and valences stay restricted.
ALL_ELEMENTS = frozenset(
    """
    H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni
    Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I
    Xe Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt
    Au Hg Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu
    """.split()
)


def valences_for(element: str, charge: int) -> tuple[int, ...] | None:
    """Valence list for an element/charge pair, or None if unknown."""
    if charge == 0:
        return STANDARD_VALENCES.get(element)
    return CHARGED_VALENCES.get((element, charge))

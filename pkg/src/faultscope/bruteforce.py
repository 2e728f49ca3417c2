"""Exhaustive oracles for small instances.

These enumerate the full subset lattice in ascending cardinality and are
deliberately independent of the search machinery: acceptance tests compare
the clever algorithms against these.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable

from .dpi import Dpi
from .errors import TooLargeError
from .msmp import Conflict, Diagnosis
from .reasoner import Reasoner

MAX_BRUTE_COMPS = 20


def _guard(dpi: Dpi):
    if len(dpi.comps) > MAX_BRUTE_COMPS:
        raise TooLargeError(
            f"{len(dpi.comps)} components exceeds the brute-force guard of {MAX_BRUTE_COMPS}"
        )


def brute_force_minimal_diagnoses(dpi: Dpi, *, reasoner: Reasoner | None = None) -> set[Diagnosis]:
    """All subset-minimal D with assume-normal(COMPS\\D) consistent."""
    _guard(dpi)
    r = reasoner if reasoner is not None else Reasoner(dpi)
    comps = dpi.comps
    found: list[frozenset[str]] = []
    for size in range(len(comps) + 1):
        for combo in combinations(comps, size):
            cs = frozenset(combo)
            if any(f <= cs for f in found):
                continue  # superset of a diagnosis: consistent but not minimal
            if r.check_consistent([c for c in comps if c not in cs]):
                found.append(cs)
    return {Diagnosis(tuple(sorted(f))) for f in found}


def brute_force_minimal_conflicts(dpi: Dpi, *, reasoner: Reasoner | None = None) -> set[Conflict]:
    """All subset-minimal S with assume-normal(S) inconsistent."""
    _guard(dpi)
    r = reasoner if reasoner is not None else Reasoner(dpi)
    comps = dpi.comps
    found: list[frozenset[str]] = []
    for size in range(len(comps) + 1):
        for combo in combinations(comps, size):
            cs = frozenset(combo)
            if any(f <= cs for f in found):
                continue  # superset of a conflict: inconsistent but not minimal
            if not r.check_consistent(sorted(cs)):
                found.append(cs)
    return {Conflict(tuple(sorted(f))) for f in found}


def minimal_hitting_sets(collection: Iterable[frozenset[str]]) -> set[frozenset[str]]:
    """All subset-minimal hitting sets of a collection of sets (pure set math).

    With the hitting-set duality this turns all minimal diagnoses into all
    minimal conflicts and vice versa without any consistency checks.
    """
    sets = [frozenset(s) for s in collection]
    universe = sorted(set().union(*sets)) if sets else []
    if not sets:
        return {frozenset()}
    if len(universe) > MAX_BRUTE_COMPS:
        raise TooLargeError(f"hitting-set universe of {len(universe)} elements is too large")
    found: list[frozenset[str]] = []
    for size in range(len(universe) + 1):
        for combo in combinations(universe, size):
            cs = frozenset(combo)
            if any(f <= cs for f in found):
                continue
            if all(cs & s for s in sets):
                found.append(cs)
    return set(found)

"""Divide-and-conquer extraction of one minimal conflict or one minimal diagnosis.

Both operations are instances of the same problem: find a subset-minimal
part of an ordered candidate list satisfying a monotone predicate.  For
conflicts the predicate is "assuming exactly these components normal is
inconsistent"; for diagnoses it is "removing these components from the
normality assumption restores consistency".  The recursion splits a list
of length n into its first ceil(n/2) elements and the remainder, and never
re-checks a background whose status is already known from the parent call;
with that bookkeeping a minimal conflict of size k costs at most
2k*(1+log2(n/k))+2 consistency checks.

The element order of the candidate list is a preference order: earlier
elements are preferred for *exclusion* from the result, which is what makes
repeated calls on shuffled orders a sampler over all minimal solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .dpi import Dpi
from .reasoner import Reasoner

# One trace step per consistency check: (components assumed normal, consistent?)
TraceStep = tuple[frozenset[str], bool]


@dataclass(frozen=True)
class Conflict:
    """Components whose joint normality assumption is inconsistent; minimal."""

    comps: tuple[str, ...]

    def as_set(self) -> frozenset[str]:
        return frozenset(self.comps)

    def __len__(self):
        return len(self.comps)

    def __str__(self):
        return "<" + ",".join(self.comps) + ">"


@dataclass(frozen=True)
class Diagnosis:
    """Components whose abnormality (all others normal) restores consistency; minimal.

    prob carries a normalized posterior when a consumer has scored the
    diagnosis; 0.0 means unscored.
    """

    comps: tuple[str, ...]
    prob: float = 0.0

    def as_set(self) -> frozenset[str]:
        return frozenset(self.comps)

    def __len__(self):
        return len(self.comps)

    def __str__(self):
        return "[" + ",".join(self.comps) + "]"


def _minimize(
    universe: Sequence[str],
    is_target: Callable[[list[str]], bool],
    *,
    empty_can_be_target: bool,
) -> list[str] | None:
    """Minimal subset of `universe` satisfying the monotone `is_target`.

    The base check is_target(universe) is always performed (and counted by
    the caller's predicate); None when it fails.  The classic recursion
    assumes the empty set is not a target; when that is not structurally
    guaranteed, one extra upfront check settles it.
    """
    items = list(universe)
    if not is_target(items):
        return None
    if empty_can_be_target and is_target([]):
        return []

    def qx(background: list[str], delta_nonempty: bool, items: list[str]) -> list[str]:
        if delta_nonempty and is_target(background):
            return []
        if len(items) == 1:
            return list(items)
        half = (len(items) + 1) // 2
        left, right = items[:half], items[half:]
        d2 = qx(background + left, True, right)
        d1 = qx(background + d2, bool(d2), left)
        return d2 + d1  # discovery order

    return qx([], False, items)


def quickxplain_min_conflict(
    dpi: Dpi,
    candidates: Sequence[str],
    *,
    reasoner: Reasoner | None = None,
    trace: list[TraceStep] | None = None,
) -> Conflict | None:
    """One minimal conflict within `candidates`, or None if they are jointly consistent.

    Preference: components early in `candidates` are preferentially excluded.
    """
    cand = list(candidates)
    if len(set(cand)) != len(cand):
        raise ValueError("candidate list contains duplicates")
    r = reasoner if reasoner is not None else Reasoner(dpi)

    def inconsistent(assumed: list[str]) -> bool:
        sat = r.check_consistent(assumed)
        if trace is not None:
            trace.append((frozenset(assumed), sat))
        return not sat

    # The base theory (no normality assumptions) is always satisfiable for a
    # valid Dpi, so the empty set can never be a conflict.
    result = _minimize(cand, inconsistent, empty_can_be_target=False)
    return None if result is None else Conflict(tuple(result))


def invqx_min_diagnosis(
    dpi: Dpi,
    candidates: Sequence[str] | None = None,
    *,
    reasoner: Reasoner | None = None,
    trace: list[TraceStep] | None = None,
) -> Diagnosis | None:
    """One minimal diagnosis within `candidates` (default: all components).

    Returns the empty diagnosis on a consistent instance, and None only if
    even assuming every candidate abnormal cannot restore consistency.
    Preference: components early in `candidates` are preferentially kept
    normal, i.e. excluded from the diagnosis.
    """
    cand = list(candidates) if candidates is not None else list(dpi.comps)
    if len(set(cand)) != len(cand):
        raise ValueError("candidate list contains duplicates")
    r = reasoner if reasoner is not None else Reasoner(dpi)
    candset = set(cand)

    def consistent_without(removed: list[str]) -> bool:
        assumed = [c for c in cand if c not in set(removed)]
        sat = r.check_consistent(assumed)
        if trace is not None:
            trace.append((frozenset(assumed), sat))
        return sat

    del candset
    result = _minimize(cand, consistent_without, empty_can_be_target=True)
    if result is None:
        return None
    return Diagnosis(tuple(sorted(result)))


# -- post-hoc minimality verification (test support) --------------------


def verify_conflict_minimal(dpi: Dpi, conflict: Conflict, *, reasoner: Reasoner | None = None) -> bool:
    """Definitional check, k+1 consistency checks: C inconsistent, each C\\{c} consistent."""
    r = reasoner if reasoner is not None else Reasoner(dpi)
    comps = list(conflict.comps)
    if r.check_consistent(comps):
        return False
    return all(r.check_consistent([x for x in comps if x != c]) for c in comps)


def verify_diagnosis_minimal(dpi: Dpi, diag: Diagnosis, *, reasoner: Reasoner | None = None) -> bool:
    """Definitional check: COMPS\\D consistent and re-adding any c in D breaks it."""
    r = reasoner if reasoner is not None else Reasoner(dpi)
    rest = [c for c in dpi.comps if c not in diag.as_set()]
    if not r.check_consistent(rest):
        return False
    return all(not r.check_consistent(rest + [c]) for c in diag.comps)

"""Propositional consistency checking for normality assumptions.

Every search in the engine funnels its reasoning through this one gateway,
so the consistency-check counters here are the canonical cost measure.
The solver is a small DPLL with unit propagation and chronological
backtracking: instances are tiny, and deterministic, auditable call counts
matter more than raw speed.  Branching picks the lowest-index unassigned
variable (wires sorted by name, then ok-atoms sorted by component) and
tries True first, so counts are reproducible across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .dpi import Clause, Dpi, ok, unit
from .errors import InconsistentBaseError

YES = "yes"
NO = "no"
UNKNOWN = "unknown"


@dataclass
class SolverStats:
    consistency_checks: int = 0
    propagations: int = 0
    decisions: int = 0

    def reset(self):
        self.consistency_checks = 0
        self.propagations = 0
        self.decisions = 0


class Reasoner:
    """Owns the compiled base theory sd + obs + meas for one Dpi.

    Single-threaded: concurrent searches should each build their own
    instance over the shared (immutable) Dpi.
    """

    def __init__(self, dpi: Dpi):
        self.dpi = dpi
        self.stats = SolverStats()
        wires = dpi.wires()
        self._index: dict = {}
        for i, w in enumerate(wires, start=1):
            self._index[("wire", w)] = i
        for j, c in enumerate(dpi.comps, start=len(wires) + 1):
            self._index[("ok", c)] = j
        self._nvars = len(self._index)
        self._base = [self._compile(c) for c in dpi.all_clauses()]
        self._ok_lit = {c: self._index[("ok", c)] for c in dpi.comps}

    def _compile(self, cl: Clause) -> list[int]:
        lits = []
        for atom, pos in cl:
            v = self._index.get((atom.kind, atom.name))
            if v is None:
                # new wire introduced by an extra clause/measurement
                v = self._nvars + 1
                self._nvars = v
                self._index[(atom.kind, atom.name)] = v
            lits.append(v if pos else -v)
        return lits

    # -- public API ------------------------------------------------------

    def check_consistent(self, normal: Iterable[str], extra: Sequence[Clause] = ()) -> bool:
        """Is sd+obs+meas+extra satisfiable with ok(c) asserted for c in normal?

        Exactly one consistency check is counted per call.
        """
        normal = set(normal)
        unknown = normal - set(self.dpi.comps)
        if unknown:
            raise ValueError(f"not components of this instance: {sorted(unknown)}")
        self.stats.consistency_checks += 1
        clauses = list(self._base)
        clauses.extend(self._compile(c) for c in extra)
        clauses.extend([self._ok_lit[c]] for c in sorted(normal))
        return self._satisfiable(clauses)

    def entails(self, normal: Iterable[str], var: str, *, check_base: bool = False) -> str:
        """Does the theory under `normal` force wire var to 1 (yes), 0 (no), or neither?

        Costs two consistency checks, or one when the first (negated-
        proposition) check is already unsatisfiable.  The base theory is
        assumed consistent under `normal`; pass check_base=True to spend the
        second check on detecting an inconsistent base instead of
        short-circuiting.
        """
        normal = list(normal)
        if not self.check_consistent(normal, extra=(unit(var, 0),)):
            if check_base:
                if not self.check_consistent(normal, extra=(unit(var, 1),)):
                    raise InconsistentBaseError(f"theory unsatisfiable under {sorted(normal)}")
            return YES
        if not self.check_consistent(normal, extra=(unit(var, 1),)):
            return NO
        return UNKNOWN

    # -- DPLL core ---------------------------------------------------------

    def _satisfiable(self, clauses: list[list[int]]) -> bool:
        assign: dict[int, bool] = {}
        return self._dpll(clauses, assign)

    def _dpll(self, clauses: list[list[int]], assign: dict[int, bool]) -> bool:
        trail: list[int] = []

        def value(lit: int):
            v = assign.get(abs(lit))
            if v is None:
                return None
            return v if lit > 0 else not v

        def set_lit(lit: int):
            assign[abs(lit)] = lit > 0
            trail.append(abs(lit))

        def propagate() -> bool:
            changed = True
            while changed:
                changed = False
                for cl in clauses:
                    unassigned = None
                    n_un = 0
                    sat = False
                    for lit in cl:
                        v = value(lit)
                        if v is True:
                            sat = True
                            break
                        if v is None:
                            n_un += 1
                            unassigned = lit
                    if sat:
                        continue
                    if n_un == 0:
                        return False  # falsified clause
                    if n_un == 1:
                        set_lit(unassigned)
                        self.stats.propagations += 1
                        changed = True
            return True

        if not propagate():
            for v in trail:
                del assign[v]
            return False

        # pick the lowest-index variable still undecided in an unsatisfied clause
        branch_var = None
        for cl in clauses:
            if any(value(lit) is True for lit in cl):
                continue
            for lit in cl:
                if value(lit) is None:
                    v = abs(lit)
                    if branch_var is None or v < branch_var:
                        branch_var = v
        if branch_var is None:
            return True  # every clause satisfied

        for val in (True, False):
            self.stats.decisions += 1
            assign[branch_var] = val
            if self._dpll(clauses, assign):
                return True
            del assign[branch_var]
        for v in trail:
            del assign[v]
        return False


def check_consistent(dpi: Dpi, normal: Iterable[str], extra: Sequence[Clause] = ()) -> bool:
    """One-shot convenience wrapper; builds a throwaway reasoner."""
    return Reasoner(dpi).check_consistent(normal, extra)


def entails(dpi: Dpi, normal: Iterable[str], var: str, **kw) -> str:
    return Reasoner(dpi).entails(normal, var, **kw)

"""Diagnosis problem instances: clauses over wire/ok atoms, plus JSON I/O.

A problem instance bundles the system description (clauses that constrain
wire values only while a component's ok-atom holds), the component set,
unit-valued observations, unit-valued measurements collected during a
session, and per-component fault priors.  Instances are immutable; adding
a measurement produces a new instance so concurrent searches can share
one value safely.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .errors import (
    DpiError,
    PriorOutOfRangeError,
    SchemaError,
    UnknownComponentError,
)

_ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

DEFAULT_PRIOR = 0.01


def valid_id(token: str) -> bool:
    return bool(_ID_RE.match(token))


@dataclass(frozen=True, order=True)
class Atom:
    """A propositional atom: either a wire value or a component's ok flag."""

    kind: str  # "wire" | "ok"
    name: str

    def __post_init__(self):
        if self.kind not in ("wire", "ok"):
            raise DpiError(f"bad atom kind {self.kind!r}")
        if not valid_id(self.name):
            raise DpiError(f"bad atom name {self.name!r}")

    def __str__(self):
        return self.name if self.kind == "wire" else f"ok:{self.name}"

    @staticmethod
    def parse(text: str) -> "Atom":
        if text.startswith("ok:"):
            return ok(text[3:])
        return wire(text)


def wire(name: str) -> Atom:
    return Atom("wire", name)


def ok(comp: str) -> Atom:
    return Atom("ok", comp)


Literal = tuple[Atom, bool]  # (atom, True) = positive occurrence


@dataclass(frozen=True)
class Clause:
    """Disjunction of literals; duplicate literals are rejected."""

    lits: tuple[Literal, ...]

    def __post_init__(self):
        if len(set(self.lits)) != len(self.lits):
            raise DpiError(f"duplicate literal in clause {self}")

    def __iter__(self):
        return iter(self.lits)

    def __str__(self):
        if not self.lits:
            return "FALSE"
        return " | ".join(("" if pos else "!") + str(a) for a, pos in self.lits)

    def atoms(self) -> set[Atom]:
        return {a for a, _ in self.lits}


def clause(*lits: Literal) -> Clause:
    return Clause(tuple(lits))


def unit(var: str, value: bool | int) -> Clause:
    """Unit clause fixing a wire to 0/1."""
    return Clause(((wire(var), bool(value)),))


def _unit_binding(c: Clause) -> tuple[str, bool]:
    (atom, pos), = c.lits
    return atom.name, pos


@dataclass(frozen=True)
class ModeAssignment:
    """Components assumed normal; the rest are unconstrained (weak fault model)."""

    normal: frozenset[str]

    @staticmethod
    def of(comps: Iterable[str]) -> "ModeAssignment":
        return ModeAssignment(frozenset(comps))


@dataclass(frozen=True)
class Dpi:
    """System description + components + observations + measurements + priors."""

    sd: tuple[Clause, ...]
    comps: tuple[str, ...]
    obs: tuple[Clause, ...] = ()
    meas: tuple[Clause, ...] = ()
    priors: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        comps = tuple(sorted(self.comps))
        object.__setattr__(self, "comps", comps)
        compset = set(comps)
        for c in comps:
            if not valid_id(c):
                raise DpiError(f"bad component id {c!r}")
        for cl in self.sd:
            for atom, _ in cl:
                if atom.kind == "ok" and atom.name not in compset:
                    raise UnknownComponentError(atom.name)
        seen: dict[str, bool] = {}
        for cl in self.obs + self.meas:
            if len(cl.lits) != 1 or cl.lits[0][0].kind != "wire":
                raise DpiError(f"observations/measurements must be wire units, got {cl}")
            var, val = _unit_binding(cl)
            if seen.get(var, val) != val:
                raise DpiError(f"contradictory unit values for wire {var!r}")
            seen[var] = val
        priors = dict(self.priors)
        for c in comps:
            p = priors.setdefault(c, DEFAULT_PRIOR)
            if not (0.0 < p < 1.0):
                raise PriorOutOfRangeError(c, p)
        for c in list(priors):
            if c not in compset:
                raise UnknownComponentError(c)
        object.__setattr__(self, "priors", priors)

    # -- derived views -------------------------------------------------

    def wires(self) -> tuple[str, ...]:
        names = set()
        for cl in self.sd + self.obs + self.meas:
            for atom, _ in cl:
                if atom.kind == "wire":
                    names.add(atom.name)
        return tuple(sorted(names))

    def fixed_wires(self) -> dict[str, bool]:
        """Wires pinned by an observation or measurement."""
        out = {}
        for cl in self.obs + self.meas:
            var, val = _unit_binding(cl)
            out[var] = val
        return out

    def with_measurement(self, var: str, value: bool | int) -> "Dpi":
        return replace(self, meas=self.meas + (unit(var, value),))

    def all_clauses(self) -> tuple[Clause, ...]:
        return self.sd + self.obs + self.meas


def prior_product(dpi: Dpi, abnormal: Iterable[str]) -> float:
    """p(D) = prod_{c in D} p_c * prod_{c not in D} (1 - p_c)."""
    ab = set(abnormal)
    p = 1.0
    for c in dpi.comps:
        pc = dpi.priors[c]
        p *= pc if c in ab else (1.0 - pc)
    return p


# -- JSON format -------------------------------------------------------
#
# { "components": [...],
#   "sd": {"gates": [{"comp","kind","out","in":[...]}]} or {"clauses": [[{"atom","neg"},...]]},
#   "obs": [{"var","val"}], "meas": [{"var","val"}], "priors": {...} }


def _clause_to_json(c: Clause) -> list[dict]:
    return [{"atom": str(a), "neg": not pos} for a, pos in c]


def _clause_from_json(items) -> Clause:
    if not isinstance(items, list):
        raise SchemaError("clause must be a list of literals")
    lits = []
    for it in items:
        try:
            lits.append((Atom.parse(it["atom"]), not bool(it.get("neg", False))))
        except (KeyError, TypeError) as e:
            raise SchemaError(f"bad literal {it!r}") from e
    return Clause(tuple(lits))


def _units_from_json(items, label) -> tuple[Clause, ...]:
    out = []
    for it in items or []:
        try:
            out.append(unit(it["var"], int(it["val"])))
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"bad {label} entry {it!r}") from e
    return tuple(out)


def dpi_to_json(dpi: Dpi) -> dict:
    return {
        "components": list(dpi.comps),
        "sd": {"clauses": [_clause_to_json(c) for c in dpi.sd]},
        "obs": [{"var": v, "val": int(b)} for v, b in (_unit_binding(c) for c in dpi.obs)],
        "meas": [{"var": v, "val": int(b)} for v, b in (_unit_binding(c) for c in dpi.meas)],
        "priors": dict(dpi.priors),
    }


def dpi_from_json(doc: dict) -> Dpi:
    if not isinstance(doc, dict):
        raise SchemaError("DPI document must be an object")
    try:
        comps = tuple(doc["components"])
        sd_doc = doc["sd"]
    except KeyError as e:
        raise SchemaError(f"missing field {e.args[0]!r}") from e
    if "gates" in sd_doc:
        from .circuits import Gate, encode_gates

        gates = []
        for g in sd_doc["gates"]:
            try:
                gates.append(Gate(g["comp"], g["kind"], g["out"], tuple(g["in"])))
            except (KeyError, TypeError) as e:
                raise SchemaError(f"bad gate entry {g!r}") from e
        sd = encode_gates(gates)
    elif "clauses" in sd_doc:
        sd = tuple(_clause_from_json(c) for c in sd_doc["clauses"])
    else:
        raise SchemaError("sd must contain 'gates' or 'clauses'")
    try:
        return Dpi(
            sd=sd,
            comps=comps,
            obs=_units_from_json(doc.get("obs"), "obs"),
            meas=_units_from_json(doc.get("meas"), "meas"),
            priors=dict(doc.get("priors") or {}),
        )
    except DpiError:
        raise
    except (TypeError, ValueError) as e:
        raise SchemaError(str(e)) from e


def save_dpi_json(dpi: Dpi, path) -> None:
    with open(path, "w") as f:
        json.dump(dpi_to_json(dpi), f, indent=2, sort_keys=True)
        f.write("\n")


def load_dpi_json(path) -> Dpi:
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError(f"not valid JSON: {e}") from e
    return dpi_from_json(doc)

"""Problem registry: built-in fixtures, seeded random instances, user files."""

from __future__ import annotations

import os
from dataclasses import dataclass

from .circuits import (
    ActualWorld,
    CircuitSpec,
    encode_circuit_to_dpi,
    parse_circuit_dsl,
    random_faulty_instance,
)
from .dpi import Dpi, load_dpi_json
from .errors import FaultscopeError

# Fig-1.1-equivalent full adder: two xor, two and, one or; inputs 1,0,1;
# observed sum 1 and carry 0 (both contradict the healthy prediction).
FULLADDER_DSL = """\
circuit fulladder
inputs a b cin
outputs sum carry
gate X1 xor a b
gate X2 xor X1 cin
gate A1 and a b
gate A2 and cin X1
gate O1 or A1 A2
wire sum = X2
wire carry = O1
obs a=1 b=0 cin=1 sum=1 carry=0
"""


def fulladder_spec() -> CircuitSpec:
    return parse_circuit_dsl(FULLADDER_DSL)


def fulladder_dpi() -> Dpi:
    return encode_circuit_to_dpi(fulladder_spec())


@dataclass(frozen=True)
class Problem:
    id: str
    dpi: Dpi
    spec: CircuitSpec | None = None
    world: ActualWorld | None = None  # ground truth when generated with a fault


class ProblemRegistry:
    """Built-ins ("fulladder", "random-<seed>") plus user-loaded files."""

    def __init__(self):
        self._loaded: dict[str, Problem] = {}

    def ids(self) -> list[str]:
        return ["fulladder"] + sorted(self._loaded)

    def add_file(self, path: str) -> Problem:
        pid = os.path.basename(path)
        if path.endswith(".json"):
            problem = Problem(id=pid, dpi=load_dpi_json(path))
        else:
            with open(path) as f:
                spec = parse_circuit_dsl(f.read())
            problem = Problem(id=pid, dpi=encode_circuit_to_dpi(spec), spec=spec)
        self._loaded[pid] = problem
        return problem

    def get(self, pid: str) -> Problem:
        if pid in self._loaded:
            return self._loaded[pid]
        if pid == "fulladder":
            return Problem(id=pid, dpi=fulladder_dpi(), spec=fulladder_spec())
        if pid.startswith("random-"):
            try:
                seed = int(pid.split("-", 1)[1])
            except ValueError:
                raise FaultscopeError(f"bad random problem id {pid!r} (use random-<seed>)")
            dpi, world = random_faulty_instance(seed)
            return Problem(id=pid, dpi=dpi, spec=world.spec, world=world)
        if os.path.exists(pid):
            return self.add_file(pid)
        raise FaultscopeError(f"unknown problem {pid!r}")

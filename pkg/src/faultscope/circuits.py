"""Gate-level circuit descriptions: DSL parsing, clause encoding, simulation.

The line-oriented DSL::

    circuit fulladder
    inputs a b cin
    outputs sum carry
    gate X1 xor a b          # gate id doubles as its output wire
    wire sum = X2            # rename a gate's output to a declared output
    obs a=1 b=0 cin=1
    prior X1 0.02
    prior-kind or 0.6

Encoding a circuit produces one clause group per gate of the form
ok(g) -> (out <-> f(inputs)), so retracting ok(g) leaves the gate's
output completely unconstrained (weak fault model).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .dpi import DEFAULT_PRIOR, Clause, Dpi, clause, ok, unit, valid_id, wire
from .errors import (
    CircuitSyntaxError,
    CycleDetectedError,
    DuplicateGateError,
    UndeclaredVariableError,
    UndefinedWireError,
)

GATE_KINDS = ("and", "or", "xor", "not", "buf")

FAULT_KINDS = ("stuck0", "stuck1", "flip")


@dataclass(frozen=True)
class Gate:
    comp: str
    kind: str
    out: str
    inputs: tuple[str, ...]

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise CircuitSyntaxError(f"unknown gate kind {self.kind!r}")
        n = len(self.inputs)
        if self.kind in ("not", "buf") and n != 1:
            raise CircuitSyntaxError(f"{self.kind} gate {self.comp} needs 1 input, got {n}")
        if self.kind == "xor" and n != 2:
            raise CircuitSyntaxError(f"xor gate {self.comp} needs 2 inputs, got {n}")
        if self.kind in ("and", "or") and n < 2:
            raise CircuitSyntaxError(f"{self.kind} gate {self.comp} needs >=2 inputs, got {n}")


def _apply_kind(kind: str, vals: list[int]) -> int:
    if kind == "and":
        return int(all(vals))
    if kind == "or":
        return int(any(vals))
    if kind == "xor":
        return vals[0] ^ vals[1]
    if kind == "not":
        return 1 - vals[0]
    return vals[0]  # buf


@dataclass(frozen=True)
class CircuitSpec:
    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    gates: tuple[Gate, ...]
    obs: tuple[tuple[str, int], ...] = ()
    priors: dict[str, float] = field(default_factory=dict)

    def components(self) -> tuple[str, ...]:
        return tuple(g.comp for g in self.gates)

    def wires(self) -> tuple[str, ...]:
        names = list(self.inputs) + [g.out for g in self.gates]
        return tuple(names)

    def topo_gates(self) -> tuple[Gate, ...]:
        """Gates in evaluation order; raises on combinational cycles."""
        by_out = {g.out: g for g in self.gates}
        order: list[Gate] = []
        state: dict[str, int] = {}  # 0 visiting, 1 done

        def visit(g: Gate, stack: tuple[str, ...]):
            if state.get(g.out) == 1:
                return
            if state.get(g.out) == 0:
                raise CycleDetectedError(stack[stack.index(g.out):] + (g.out,))
            state[g.out] = 0
            for w in g.inputs:
                if w in by_out:
                    visit(by_out[w], stack + (g.out,))
            state[g.out] = 1
            order.append(g)

        for g in self.gates:
            visit(g, ())
        return tuple(order)


def parse_circuit_dsl(text: str) -> CircuitSpec:
    """Parse the line-oriented DSL into a structurally valid CircuitSpec."""
    name = "circuit"
    inputs: list[str] = []
    outputs: list[str] = []
    raw_gates: list[tuple[str, str, list[str], int]] = []  # (id, kind, ins, line)
    aliases: dict[str, str] = {}  # gate id -> renamed output wire
    obs: list[tuple[str, int]] = []
    comp_priors: dict[str, float] = {}
    kind_priors: dict[str, float] = {}

    def fail(msg, ln):
        raise CircuitSyntaxError(msg, line=ln)

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        head = toks[0]
        if head == "circuit":
            if len(toks) != 2:
                fail("expected: circuit <name>", ln)
            name = toks[1]
        elif head in ("inputs", "outputs"):
            target = inputs if head == "inputs" else outputs
            for t in toks[1:]:
                if not valid_id(t):
                    fail(f"bad wire name {t!r}", ln)
                target.append(t)
        elif head == "gate":
            if len(toks) < 3:
                fail("expected: gate <id> <kind> <in...>", ln)
            gid, kind = toks[1], toks[2]
            if not valid_id(gid):
                fail(f"bad gate id {gid!r}", ln)
            if any(g[0] == gid for g in raw_gates):
                raise DuplicateGateError(gid, line=ln)
            raw_gates.append((gid, kind, toks[3:], ln))
        elif head == "wire":
            if len(toks) != 4 or toks[2] != "=":
                fail("expected: wire <name> = <gate id>", ln)
            aliases[toks[3]] = toks[1]
        elif head == "obs":
            for t in toks[1:]:
                if "=" not in t:
                    fail(f"expected var=0|1, got {t!r}", ln)
                var, _, val = t.partition("=")
                if val not in ("0", "1"):
                    fail(f"observation value must be 0 or 1, got {val!r}", ln)
                obs.append((var, int(val)))
        elif head == "prior":
            if len(toks) != 3:
                fail("expected: prior <comp> <p>", ln)
            comp_priors[toks[1]] = float(toks[2])
        elif head == "prior-kind":
            if len(toks) != 3:
                fail("expected: prior-kind <kind> <p>", ln)
            kind_priors[toks[1]] = float(toks[2])
        else:
            fail(f"unknown directive {head!r}", ln)

    for target, alias in list(aliases.items()):
        if not any(g[0] == target for g in raw_gates):
            raise UndeclaredVariableError(target)

    gates = []
    declared = set(inputs)
    for gid, kind, ins, ln in raw_gates:
        declared.add(aliases.get(gid, gid))
    for gid, kind, ins, ln in raw_gates:
        for w in ins:
            # inputs refer to wires: either circuit inputs or other gates' outputs
            if w not in declared and not any(g[0] == w for g in raw_gates):
                raise UndeclaredVariableError(w, line=ln)
        resolved = tuple(aliases.get(w, w) if w not in declared else w for w in ins)
        try:
            gates.append(Gate(gid, kind, aliases.get(gid, gid), resolved))
        except CircuitSyntaxError as e:
            raise CircuitSyntaxError(str(e), line=ln) from None

    wire_names = set(declared)
    for var, _ in obs:
        if var not in wire_names:
            raise UndeclaredVariableError(var)

    priors = {}
    for g in gates:
        if g.comp in comp_priors:
            priors[g.comp] = comp_priors[g.comp]
        elif g.kind in kind_priors:
            priors[g.comp] = kind_priors[g.kind]
        else:
            priors[g.comp] = DEFAULT_PRIOR

    spec = CircuitSpec(
        name=name,
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        gates=tuple(gates),
        obs=tuple(obs),
        priors=priors,
    )
    spec.topo_gates()  # cycle check
    return spec


def _dedup(lits):
    seen = set()
    out = []
    for lit in lits:
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    return out


def encode_gates(gates) -> tuple[Clause, ...]:
    """ok-guarded CNF for each gate: ok(g) -> (out <-> kind(inputs))."""
    out: list[Clause] = []
    for g in gates:
        guard = (ok(g.comp), False)
        o = wire(g.out)
        xs = [wire(w) for w in g.inputs]
        if g.kind == "and":
            for x in _dedup(xs):
                out.append(clause(guard, (o, False), (x, True)))
            out.append(clause(*_dedup([guard, (o, True)] + [(x, False) for x in xs])))
        elif g.kind == "or":
            for x in _dedup(xs):
                out.append(clause(guard, (o, True), (x, False)))
            out.append(clause(*_dedup([guard, (o, False)] + [(x, True) for x in xs])))
        elif g.kind == "xor":
            a, b = xs
            out.append(clause(*_dedup([guard, (o, False), (a, True), (b, True)])))
            out.append(clause(*_dedup([guard, (o, False), (a, False), (b, False)])))
            out.append(clause(*_dedup([guard, (o, True), (a, True), (b, False)])))
            out.append(clause(*_dedup([guard, (o, True), (a, False), (b, True)])))
        elif g.kind == "not":
            out.append(clause(guard, (o, False), (xs[0], False)))
            out.append(clause(guard, (o, True), (xs[0], True)))
        else:  # buf
            out.append(clause(guard, (o, False), (xs[0], True)))
            out.append(clause(guard, (o, True), (xs[0], False)))
    return tuple(out)


def encode_circuit_to_dpi(spec: CircuitSpec) -> Dpi:
    return Dpi(
        sd=encode_gates(spec.gates),
        comps=spec.components(),
        obs=tuple(unit(var, val) for var, val in spec.obs),
        meas=(),
        priors=dict(spec.priors),
    )


# -- concrete faulty worlds (oracle grounding) -------------------------


@dataclass(frozen=True)
class ActualWorld:
    """A circuit with concrete gate faults; the thing a probe really measures."""

    spec: CircuitSpec
    faults: dict[str, str]  # comp -> stuck0|stuck1|flip

    def evaluate(self) -> dict[str, int]:
        values: dict[str, int] = {}
        bound = dict(self.spec.obs)
        for w in self.spec.inputs:
            if w not in bound:
                raise UndefinedWireError(w)
            values[w] = bound[w]
        for g in self.spec.topo_gates():
            v = _apply_kind(g.kind, [values[w] for w in g.inputs])
            f = self.faults.get(g.comp)
            if f == "stuck0":
                v = 0
            elif f == "stuck1":
                v = 1
            elif f == "flip":
                v = 1 - v
            values[g.out] = v
        return values

    def wire_value(self, name: str) -> int:
        values = self.evaluate()
        if name not in values:
            raise UndefinedWireError(name)
        return values[name]

    def consistent_with_obs(self) -> bool:
        values = self.evaluate()
        return all(values.get(var) == val for var, val in self.spec.obs)

    def faulty_components(self) -> frozenset[str]:
        return frozenset(self.faults)


def parse_fault_spec(text: str) -> dict[str, str]:
    """Parse "X2=flip,O1=stuck0" into a fault map."""
    faults = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        comp, _, kind = part.partition("=")
        if kind not in FAULT_KINDS:
            raise CircuitSyntaxError(f"unknown fault kind {kind!r} (use stuck0|stuck1|flip)")
        faults[comp] = kind
    return faults


# -- seeded random instances -------------------------------------------


def random_circuit(seed: int, max_gates: int = 8, n_inputs: int | None = None) -> CircuitSpec:
    """A random acyclic gate netlist with all inputs bound; no observations on outputs yet."""
    rng = random.Random(f"circuit-{seed}")
    n_in = n_inputs if n_inputs is not None else rng.randint(2, 4)
    n_gates = rng.randint(3, max_gates)
    inputs = [f"i{k}" for k in range(n_in)]
    pool = list(inputs)
    gates = []
    for k in range(n_gates):
        kind = rng.choice(GATE_KINDS)
        arity = 1 if kind in ("not", "buf") else 2
        ins = tuple(rng.choice(pool) for _ in range(arity))
        gid = f"G{k}"
        gates.append(Gate(gid, kind, gid, ins))
        pool.append(gid)
    used = {w for g in gates for w in g.inputs}
    sinks = [g.out for g in gates if g.out not in used] or [gates[-1].out]
    obs = [(w, rng.randint(0, 1)) for w in inputs]
    return CircuitSpec(
        name=f"random-{seed}",
        inputs=tuple(inputs),
        outputs=tuple(sinks),
        gates=tuple(gates),
        obs=tuple(obs),
        priors={g.comp: DEFAULT_PRIOR for g in gates},
    )


def _parallel_pairs_circuit(seed: int, rng: random.Random) -> CircuitSpec:
    """Independent two-buffer chains; conflicts multiply, which blows up BFS frontiers."""
    n_pairs = rng.randint(3, 4)
    inputs, gates, outputs = [], [], []
    for k in range(n_pairs):
        x = f"i{k}"
        inputs.append(x)
        a, b = f"P{k}a", f"P{k}b"
        gates.append(Gate(a, "buf", a, (x,)))
        gates.append(Gate(b, "buf", b, (a,)))
        outputs.append(b)
    obs = [(w, 1) for w in inputs]
    return CircuitSpec(
        name=f"random-{seed}",
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        gates=tuple(gates),
        obs=tuple(obs),
        priors={g.comp: DEFAULT_PRIOR for g in gates},
    )


def random_faulty_instance(seed: int, max_gates: int = 8) -> tuple[Dpi, ActualWorld]:
    """A seeded circuit plus an injected fault that is visible at the outputs.

    The returned DPI observes inputs and outputs of the *faulted* evaluation,
    so its minimal diagnoses are nonempty and the world grounds an oracle.
    About one instance in five is a bank of independent faulty buffer pairs,
    whose diagnosis count is exponential in the pair count.
    """
    rng = random.Random(f"instance-{seed}")
    topo = rng.random()
    if topo < 0.2:
        return _faulty_pairs_instance(seed, rng)
    if topo < 0.35:
        return _contested_wire_instance(seed, rng)
    for attempt in range(200):
        spec = random_circuit(seed * 1000 + attempt, max_gates=max_gates)
        healthy = ActualWorld(spec, {}).evaluate()
        comps = list(spec.components())
        n_faults = 1 if rng.random() < 0.7 else 2
        faults = {c: rng.choice(FAULT_KINDS) for c in rng.sample(comps, min(n_faults, len(comps)))}
        world = ActualWorld(spec, faults)
        values = world.evaluate()
        if all(values[o] == healthy[o] for o in spec.outputs):
            continue  # fault is masked at the outputs; not an observable failure
        full_obs = spec.obs + tuple((o, values[o]) for o in spec.outputs)
        spec = CircuitSpec(spec.name, spec.inputs, spec.outputs, spec.gates, full_obs, spec.priors)
        return encode_circuit_to_dpi(spec), ActualWorld(spec, faults)
    raise RuntimeError(f"could not build an observably faulty instance for seed {seed}")


def _contested_wire_instance(seed: int, rng: random.Random) -> tuple[Dpi, ActualWorld]:
    """Many buffers reading one wire, observed with contradictory values.

    Every (1-reader, 0-reader) pair is a minimal conflict, yet only two
    minimal diagnoses exist, so breadth-first frontiers fill with duplicate
    paths while the solution set stays tiny.
    """
    n_ones = rng.randint(2, 4)
    n_zeros = rng.randint(2, 4)
    gates = [Gate("S0", "buf", "S0", ("x",))]
    outputs = []
    for k in range(n_ones):
        gates.append(Gate(f"O{k}", "buf", f"O{k}", ("S0",)))
        outputs.append(f"O{k}")
    for k in range(n_zeros):
        gates.append(Gate(f"Z{k}", "buf", f"Z{k}", ("S0",)))
        outputs.append(f"Z{k}")
    faults = {f"Z{k}": rng.choice(["stuck0", "flip"]) for k in range(n_zeros)}
    spec = CircuitSpec(
        name=f"random-{seed}",
        inputs=("x",),
        outputs=tuple(outputs),
        gates=tuple(gates),
        obs=(("x", 1),),
        priors={g.comp: DEFAULT_PRIOR for g in gates},
    )
    world = ActualWorld(spec, faults)
    values = world.evaluate()
    full_obs = spec.obs + tuple((o, values[o]) for o in spec.outputs)
    spec = CircuitSpec(spec.name, spec.inputs, spec.outputs, spec.gates, full_obs, spec.priors)
    return encode_circuit_to_dpi(spec), ActualWorld(spec, faults)


def _faulty_pairs_instance(seed: int, rng: random.Random) -> tuple[Dpi, ActualWorld]:
    spec = _parallel_pairs_circuit(seed, rng)
    # one visibly faulty gate per pair: every pair contributes a conflict
    faults = {}
    for k in range(len(spec.outputs)):
        gate = rng.choice([f"P{k}a", f"P{k}b"])
        faults[gate] = rng.choice(["stuck0", "flip"])
    world = ActualWorld(spec, faults)
    values = world.evaluate()
    full_obs = spec.obs + tuple((o, values[o]) for o in spec.outputs)
    spec = CircuitSpec(spec.name, spec.inputs, spec.outputs, spec.gates, full_obs, spec.priors)
    return encode_circuit_to_dpi(spec), ActualWorld(spec, faults)

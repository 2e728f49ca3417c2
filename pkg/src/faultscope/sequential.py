"""Sequential diagnosis: query generation, scoring heuristics, session loop.

A session keeps a sample of leading minimal diagnoses with normalized
posteriors, repeatedly picks the measurement point whose answer best
discriminates among them, applies the oracle's answer, and stops when one
candidate remains (or a posterior threshold / query budget is hit).

Two problem interpretations are supported.  In dynamic mode each answer
becomes a measurement of an evolving problem instance and the leading
sample is replenished from it, so new minimal diagnoses (always supersets
of earlier ones) can surface.  In static mode answers only filter the
initially computed diagnosis sample; the instance still records the
measurements, but no new diagnoses are admitted.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .circuits import ActualWorld
from .dpi import Dpi, prior_product
from .errors import NoDiscriminatingQueryError
from .hitting_set import sample_diagnoses
from .msmp import Diagnosis
from .reasoner import NO, UNKNOWN, YES, Reasoner

HEURISTICS = ("ENT", "SPL", "MPS", "BME", "EMCb", "RND")
MINIMIZE = {"ENT", "SPL"}

TRUE, FALSE, SKIP = "true", "false", "skip"


@dataclass(frozen=True)
class Answer:
    value: str  # true | false | skip
    source: str = "human"  # human | simulated

    def __post_init__(self):
        if self.value not in (TRUE, FALSE, SKIP):
            raise ValueError(f"bad answer value {self.value!r}")


@dataclass(frozen=True)
class Query:
    """A measurement proposition "wire = 1" and its induced partition.

    dplus/dminus/dzero hold indices into the session's leading list for the
    diagnoses that predict true / predict false / predict nothing.
    """

    wire: str
    token: str
    dplus: tuple[int, ...]
    dminus: tuple[int, ...]
    dzero: tuple[int, ...]
    p_yes: float
    scores: dict[str, float] = field(default_factory=dict)

    @property
    def prop(self) -> str:
        return f"{self.wire}=1"

    def discriminating(self) -> bool:
        return bool(self.dplus) and bool(self.dminus)

    def partition_sizes(self) -> dict[str, int]:
        return {"dplus": len(self.dplus), "dminus": len(self.dminus), "dzero": len(self.dzero)}


@dataclass(frozen=True)
class SessionConfig:
    mode: str = "dynamic"  # dynamic | static
    heuristic: str = "ENT"
    k: int = 9
    sigma: float = 0.95
    sampler: str = "best_first"
    seed: int = 0
    max_queries: int = 50

    def __post_init__(self):
        if self.mode not in ("dynamic", "static"):
            raise ValueError(f"bad mode {self.mode!r}")
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"bad heuristic {self.heuristic!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not (0.0 < self.sigma <= 1.0):
            raise ValueError("sigma must be in (0, 1]")


@dataclass(frozen=True)
class HistoryStep:
    step: int
    query: Query
    answer: Answer
    ts: float
    eliminated: tuple[tuple[str, ...], ...]
    remaining: tuple[tuple[str, ...], ...]
    posteriors: tuple[float, ...]


@dataclass(frozen=True)
class SessionState:
    dpi: Dpi
    config: SessionConfig
    leading: tuple[Diagnosis, ...]
    initial_leading: tuple[Diagnosis, ...]
    history: tuple[HistoryStep, ...] = ()
    unavailable: frozenset[str] = frozenset()
    stop: str | None = None  # single_remaining | threshold | budget |
    #                          no_discriminating_query | initial_set_exhausted

    @property
    def mode(self) -> str:
        return self.config.mode

    def posteriors(self) -> tuple[float, ...]:
        return tuple(d.prob for d in self.leading)

    def answered_queries(self) -> int:
        return sum(1 for h in self.history if h.answer.value != SKIP)


def _with_posteriors(dpi: Dpi, diags: Sequence[Diagnosis]) -> tuple[Diagnosis, ...]:
    weights = [prior_product(dpi, d.comps) for d in diags]
    total = sum(weights)
    if total <= 0.0 or not diags:
        return tuple(diags)
    scored = tuple(replace(d, prob=w / total) for d, w in zip(diags, weights))
    assert abs(sum(d.prob for d in scored) - 1.0) < 1e-9
    return scored


def _renormalized(diags: Sequence[Diagnosis]) -> tuple[Diagnosis, ...]:
    total = sum(d.prob for d in diags)
    if total <= 0.0:
        return _with_posteriors_fallback(diags)
    return tuple(replace(d, prob=d.prob / total) for d in diags)


def _with_posteriors_fallback(diags: Sequence[Diagnosis]) -> tuple[Diagnosis, ...]:
    n = len(diags)
    return tuple(replace(d, prob=1.0 / n) for d in diags) if n else tuple(diags)


def _evaluate_stop(state: SessionState) -> SessionState:
    if state.stop is not None:
        return state
    if len(state.leading) == 1:
        return replace(state, stop="single_remaining")
    if state.leading and max(d.prob for d in state.leading) >= state.config.sigma:
        return replace(state, stop="threshold")
    if state.answered_queries() >= state.config.max_queries:
        return replace(state, stop="budget")
    return state


def new_session(dpi: Dpi, config: SessionConfig) -> SessionState:
    leading = sample_diagnoses(dpi, config.sampler, config.k, seed=config.seed)
    leading = _with_posteriors(dpi, leading)
    state = SessionState(dpi=dpi, config=config, leading=leading, initial_leading=leading)
    return _evaluate_stop(state)


# -- query generation and scoring ---------------------------------------


def build_query(state: SessionState, wire: str, *, reasoner: Reasoner | None = None) -> Query:
    """Partition the leading diagnoses by their prediction for `wire` = 1."""
    r = reasoner if reasoner is not None else Reasoner(state.dpi)
    comps = state.dpi.comps
    dplus, dminus, dzero = [], [], []
    for i, d in enumerate(state.leading):
        normal = [c for c in comps if c not in d.as_set()]
        verdict = r.entails(normal, wire)
        (dplus if verdict == YES else dminus if verdict == NO else dzero).append(i)
    posts = state.posteriors()
    p_yes = sum(posts[i] for i in dplus) + 0.5 * sum(posts[i] for i in dzero)
    return Query(
        wire=wire,
        token=f"{len(state.history)}:{wire}",
        dplus=tuple(dplus),
        dminus=tuple(dminus),
        dzero=tuple(dzero),
        p_yes=p_yes,
    )


def generate_query_candidates(state: SessionState, *, reasoner: Reasoner | None = None) -> list[Query]:
    """One discriminating candidate per wire not yet fixed by obs/meas."""
    if len(state.leading) < 2:
        raise ValueError("need at least two leading diagnoses to discriminate")
    r = reasoner if reasoner is not None else Reasoner(state.dpi)
    fixed = state.dpi.fixed_wires()
    wires = [w for w in state.dpi.wires() if w not in fixed and w not in state.unavailable]
    candidates = []
    posts = state.posteriors()
    rng = random.Random(f"{state.config.seed}:rnd:{len(state.history)}")
    for w in sorted(wires):
        q = build_query(state, w, reasoner=r)
        if not q.discriminating():
            continue
        scores = {h: score_query(q, h, posts) for h in HEURISTICS if h != "RND"}
        scores["RND"] = rng.random()
        candidates.append(replace(q, scores=scores))
    if not candidates:
        raise NoDiscriminatingQueryError(
            "no unfixed wire discriminates the current leading diagnoses"
        )
    return candidates


def _xlog2(p: float) -> float:
    return p * math.log2(p) if p > 0.0 else 0.0


def score_query(
    q: Query,
    heuristic: str,
    posteriors: Sequence[float],
    *,
    rng: random.Random | None = None,
) -> float:
    """Scalar quality of a discriminating query under one selection heuristic.

    ENT and SPL are minimized, the rest maximized.  ENT is
    sum_a p(a) log2 p(a) + p(dzero) + 1, which reduces to 1 - H(p_yes) when
    every leading diagnosis predicts an answer.
    """
    p_yes = q.p_yes
    p_no = 1.0 - p_yes
    if heuristic == "ENT":
        p_dzero = sum(posteriors[i] for i in q.dzero)
        return _xlog2(p_yes) + _xlog2(p_no) + p_dzero + 1.0
    if heuristic == "SPL":
        return abs(len(q.dplus) - len(q.dminus)) + len(q.dzero)
    if heuristic == "MPS":
        # answer yes eliminates dminus, answer no eliminates dplus
        best = max((len(q.dminus), p_yes, "yes"), (len(q.dplus), p_no, "no"))
        return best[1]
    if heuristic == "BME":
        if p_yes > 0.5:
            return float(len(q.dminus))
        if p_no > 0.5:
            return float(len(q.dplus))
        return 0.0
    if heuristic == "EMCb":
        return p_yes * len(q.dminus) + p_no * len(q.dplus)
    if heuristic == "RND":
        if rng is None:
            raise ValueError("RND scoring needs a seeded generator")
        return rng.random()
    raise ValueError(f"unknown heuristic {heuristic!r}")


def select_query(state: SessionState, candidates: Sequence[Query] | None = None) -> Query:
    """Best candidate per the session heuristic; ties go to the smallest prop."""
    if candidates is None:
        candidates = generate_query_candidates(state)
    h = state.config.heuristic
    sign = 1.0 if h in MINIMIZE else -1.0
    return min(candidates, key=lambda q: (sign * q.scores[h], q.prop))


# -- state transitions ---------------------------------------------------


def apply_answer(state: SessionState, q: Query, answer: Answer) -> SessionState:
    """Fold one oracle answer into the session.

    skip only marks the wire unavailable.  Otherwise the contradicted side
    of the partition is eliminated; dynamic mode records the measurement and
    replenishes the leading sample from the new instance (a full re-search,
    which also covers the case where the answer contradicted every leading
    diagnosis), static mode filters the initial sample only.  Posteriors are
    renormalized over the survivors.
    """
    ts = time.time()
    if answer.value == SKIP:
        step = HistoryStep(
            step=len(state.history),
            query=q,
            answer=answer,
            ts=ts,
            eliminated=(),
            remaining=tuple(d.comps for d in state.leading),
            posteriors=state.posteriors(),
        )
        return replace(
            state,
            history=state.history + (step,),
            unavailable=state.unavailable | {q.wire},
        )

    truth = answer.value == TRUE
    contradicted = q.dminus if truth else q.dplus
    eliminated = tuple(state.leading[i].comps for i in contradicted)
    new_dpi = state.dpi.with_measurement(q.wire, truth)

    stop = state.stop
    if state.mode == "dynamic":
        cfg = state.config
        survivors = sample_diagnoses(new_dpi, cfg.sampler, cfg.k, seed=cfg.seed)
        leading = _with_posteriors(new_dpi, survivors)
        initial = state.initial_leading
    else:
        keep = [i for i in range(len(state.leading)) if i not in set(contradicted)]
        leading = _renormalized([state.leading[i] for i in keep])
        initial = state.initial_leading
        if not leading:
            stop = "initial_set_exhausted"  # initial sample did not contain the actual fault

    step = HistoryStep(
        step=len(state.history),
        query=q,
        answer=answer,
        ts=ts,
        eliminated=eliminated,
        remaining=tuple(d.comps for d in leading),
        posteriors=tuple(d.prob for d in leading),
    )
    new_state = replace(
        state,
        dpi=new_dpi,
        leading=leading,
        initial_leading=initial,
        history=state.history + (step,),
        stop=stop,
    )
    return _evaluate_stop(new_state)


# -- oracles --------------------------------------------------------------


def simulate_oracle(world: ActualWorld, q: Query) -> Answer:
    """Measure the concrete faulted netlist at the query's wire."""
    return Answer(TRUE if world.wire_value(q.wire) == 1 else FALSE, source="simulated")


class SimulatedOracle:
    def __init__(self, world: ActualWorld):
        self.world = world

    def __call__(self, q: Query) -> Answer:
        return simulate_oracle(self.world, q)


class ScriptedOracle:
    """Answers from a fixed list; for fixtures and tests."""

    def __init__(self, answers: Sequence[str]):
        self._answers = list(answers)
        self._i = 0

    def __call__(self, q: Query) -> Answer:
        if self._i >= len(self._answers):
            raise IndexError("scripted oracle ran out of answers")
        v = self._answers[self._i]
        self._i += 1
        return Answer(v, source="simulated")


# -- the session loop ------------------------------------------------------


@dataclass
class Transcript:
    records: list[dict]
    state: SessionState

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)


def step_record(h: HistoryStep) -> dict:
    return {
        "step": h.step,
        "query": h.query.prop,
        "token": h.query.token,
        "partition_sizes": h.query.partition_sizes(),
        "scores": {k: h.query.scores.get(k) for k in sorted(h.query.scores)},
        "answer": h.answer.value,
        "eliminated": [list(c) for c in h.eliminated],
        "remaining": [list(c) for c in h.remaining],
        "posteriors": list(h.posteriors),
        "ts": h.ts,
    }


def run_session(
    dpi: Dpi,
    config: SessionConfig,
    oracle: Callable[[Query], Answer],
    *,
    forced_props: Sequence[str] | None = None,
) -> Transcript:
    """Drive the full query/answer loop against an oracle until a stop fires.

    forced_props overrides heuristic selection with a fixed wire sequence
    (used by fixtures and for static-vs-dynamic comparisons); forced wires
    are asked even when they do not discriminate.
    """
    state = new_session(dpi, config)
    forced = list(forced_props) if forced_props is not None else None
    while state.stop is None:
        reasoner = Reasoner(state.dpi)
        if forced is not None:
            if not forced:
                break  # forced sequence exhausted without reaching a stop
            wire_name = forced.pop(0)
            q = build_query(state, wire_name, reasoner=reasoner)
            posts = state.posteriors()
            scores = {h: score_query(q, h, posts) for h in HEURISTICS if h != "RND"}
            q = replace(q, scores=scores)
        else:
            try:
                q = select_query(state, generate_query_candidates(state, reasoner=reasoner))
            except NoDiscriminatingQueryError:
                widened = _widen_leading(state)
                if widened is None:
                    state = replace(state, stop="no_discriminating_query")
                    break
                state = widened
                continue
        state = apply_answer(state, q, oracle(q))
    records = [step_record(h) for h in state.history]
    return Transcript(records=records, state=state)


def _widen_leading(state: SessionState) -> SessionState | None:
    """Fallback when nothing discriminates: enlarge the leading sample (dynamic only)."""
    if state.mode != "dynamic":
        return None
    cfg = state.config
    bigger = sample_diagnoses(state.dpi, cfg.sampler, cfg.k * 4, seed=cfg.seed)
    if len(bigger) <= len(state.leading):
        return None
    leading = _with_posteriors(state.dpi, bigger)
    return _evaluate_stop(replace(state, leading=leading))

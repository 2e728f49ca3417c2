"""Best-first enumeration of minimal diagnoses via hitting-set search.

Two engines share the node semantics (a node is its path, the set of edge
labels from the root; children of a conflict-labeled node extend the path
by one conflict element):

* hstree  — Reiter's HS-Tree: a queue ordered by path cost, with stored-
  conflict reuse, duplicate closing and superset closing.  Complete and
  sound, but the open list can grow exponentially.
* rbf_hs  — a linear-space reconstruction on top of recursive best-first
  search: only the sibling lists along the current recursion stack are
  held in memory, with backed-up cost bounds and re-expansion on bound
  changes.  Duplicate paths are not globally detected (a closed set would
  break the linear space bound); duplicates cost time and are filtered at
  emission.

Cost orders: cardinality, or descending prior product
p(D) = prod_{c in D} p_c * prod_{c not in D} (1-p_c).  A node's priority is
an optimistic bound on any completion (undecided components contribute
max(p_c, 1-p_c)), and emission of a found diagnosis is delayed until its
true cost is best, so emitted order is non-increasing in p(D) even when
some prior exceeds one half.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .dpi import Dpi, prior_product
from .msmp import Conflict, Diagnosis, invqx_min_diagnosis, quickxplain_min_conflict
from .reasoner import Reasoner

ORDERS = ("cardinality", "probability")
_INF = (math.inf, 0, ())


@dataclass
class SearchStats:
    consistency_checks: int = 0
    conflicts_computed: int = 0
    conflicts_reused: int = 0
    nodes_expanded: int = 0
    nodes_closed_duplicate: int = 0
    nodes_closed_superset: int = 0
    peak_open_nodes: int = 0
    verification_checks: int = 0
    max_path_len: int = 0
    max_conflict_size: int = 0
    budget_exhausted: bool = False

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class HsNode:
    """A hitting-set search node: its path and how it was labeled."""

    path: frozenset[str]
    label: str  # "conflict" | "checkmark" | "closed-duplicate" | "closed-superset"
    conflict: Conflict | None = None


class _CostModel:
    """Path bounds and final diagnosis costs, totally ordered with tie-breaks.

    Keys are (scalar, |path|, sorted path) so equal-cost ties resolve by
    cardinality then lexicographically — subsets always order before their
    supersets.
    """

    def __init__(self, dpi: Dpi, order: str):
        if order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")
        self.order = order
        self.dpi = dpi
        if order == "probability":
            self._p = {c: dpi.priors[c] for c in dpi.comps}
            self._best = {c: max(p, 1.0 - p) for c, p in self._p.items()}
            self._rest = {c: 1.0 - p for c, p in self._p.items()}

    def _product(self, path, undecided_factor):
        # one fixed multiplication order over all components, so that a path
        # and its supersets get bit-identical costs whenever the extra factors
        # are identical (p_c == max(p_c, 1-p_c)); float ties must not reorder
        # subsets after their supersets
        s = set(path)
        prod = 1.0
        for c in self.dpi.comps:
            prod *= self._p[c] if c in s else undecided_factor[c]
        return prod

    def bound(self, path: tuple[str, ...]):
        """Optimistic: any diagnosis extending `path` costs at least this."""
        if self.order == "cardinality":
            return (float(len(path)), len(path), path)
        return (-self._product(path, self._best), len(path), path)

    def final(self, path: tuple[str, ...]):
        """True cost of `path` taken as a complete diagnosis: -p(D) exactly."""
        if self.order == "cardinality":
            return (float(len(path)), len(path), path)
        return (-self._product(path, self._rest), len(path), path)


class _Budget:
    def __init__(self, reasoner: Reasoner, budget: int | None):
        self._r = reasoner
        self._start = reasoner.stats.consistency_checks
        self._budget = budget

    def used(self) -> int:
        return self._r.stats.consistency_checks - self._start

    def exhausted(self) -> bool:
        return self._budget is not None and self.used() >= self._budget


def hstree(
    dpi: Dpi,
    order: str = "cardinality",
    k: int | None = None,
    budget: int | None = None,
    *,
    reasoner: Reasoner | None = None,
) -> tuple[list[Diagnosis], SearchStats]:
    """Up to k minimal diagnoses in best-first order, with full accounting.

    k=None enumerates all.  Stops early with stats.budget_exhausted when the
    consistency-check budget runs out; the partial result is still sound.
    """
    if k is not None and k < 1:
        raise ValueError("k must be >= 1")
    r = reasoner if reasoner is not None else Reasoner(dpi)
    cost = _CostModel(dpi, order)
    stats = SearchStats()
    budget_ = _Budget(r, budget)

    stored: list[Conflict] = []
    processed: set[frozenset[str]] = set()
    found_paths: list[frozenset[str]] = []  # emitted + pending, for superset closing
    emitted: list[Diagnosis] = []

    # heap entries: (cost scalar, |path|, kind, insertion seq, path tuple);
    # kind 0 = pending emission of a found diagnosis.  Equal-cost ties resolve
    # by path length (subsets before supersets), then FIFO, which processes the
    # nodes of one level left-to-right in each conflict's returned order.
    seq = 0
    root_key = cost.bound(())
    heap: list[tuple] = [(root_key[0], 0, 1, seq, ())]
    stats.peak_open_nodes = 1

    while heap:
        if k is not None and len(emitted) >= k:
            break
        if budget_.exhausted():
            stats.budget_exhausted = True
            break
        _, plen, kind, _, path = heapq.heappop(heap)
        if kind == 0:
            emitted.append(Diagnosis(path))
            continue
        pathset = frozenset(path)
        if pathset in processed:
            stats.nodes_closed_duplicate += 1
            continue
        processed.add(pathset)
        stats.max_path_len = max(stats.max_path_len, len(path))
        if any(f <= pathset for f in found_paths):
            stats.nodes_closed_superset += 1
            continue

        conflict = next((c for c in stored if not (c.as_set() & pathset)), None)
        if conflict is not None:
            stats.conflicts_reused += 1
        else:
            before = r.stats.consistency_checks
            conflict = quickxplain_min_conflict(
                dpi, [c for c in dpi.comps if c not in pathset], reasoner=r
            )
            if conflict is None:
                stats.verification_checks += r.stats.consistency_checks - before
                found_paths.append(pathset)
                seq += 1
                heapq.heappush(heap, (cost.final(path)[0], len(path), 0, seq, path))
                stats.peak_open_nodes = max(stats.peak_open_nodes, len(heap))
                continue
            stats.conflicts_computed += 1
            stats.max_conflict_size = max(stats.max_conflict_size, len(conflict))
            stored.append(conflict)

        stats.nodes_expanded += 1
        for c in conflict.comps:
            child = tuple(sorted(pathset | {c}))
            seq += 1
            heapq.heappush(heap, (cost.bound(child)[0], len(child), 1, seq, child))
        stats.peak_open_nodes = max(stats.peak_open_nodes, len(heap))

    stats.consistency_checks = budget_.used()
    return emitted, stats


class _StopSearch(Exception):
    pass


def rbf_hs(
    dpi: Dpi,
    order: str = "cardinality",
    k: int | None = None,
    budget: int | None = None,
    *,
    reasoner: Reasoner | None = None,
) -> tuple[list[Diagnosis], SearchStats]:
    """Same diagnosis set as hstree under the same order, in linear space.

    peak_open_nodes counts sibling nodes held across the recursion stack
    plus the emitted list, and stays within
    (max path depth + 1) * (max conflict size) + k.
    """
    if k is not None and k < 1:
        raise ValueError("k must be >= 1")
    r = reasoner if reasoner is not None else Reasoner(dpi)
    cost = _CostModel(dpi, order)
    stats = SearchStats()
    budget_ = _Budget(r, budget)

    stored: list[Conflict] = []
    emitted: list[Diagnosis] = []
    alive = 0  # sibling nodes currently held on the stack
    # definitional minimality checks are only needed when cost ties between a
    # diagnosis and its strict supersets are possible
    need_min_check = order == "probability" and any(p >= 0.5 for p in dpi.priors.values())

    def bump_peak():
        stats.peak_open_nodes = max(stats.peak_open_nodes, alive + len(emitted))

    def is_minimal(path: frozenset[str]) -> bool:
        if not need_min_check:
            return True
        rest = [c for c in dpi.comps if c not in path]
        for c in sorted(path):
            before = r.stats.consistency_checks
            consistent = r.check_consistent(rest + [x for x in sorted(path) if x != c])
            stats.verification_checks += r.stats.consistency_checks - before
            if consistent:
                return False  # a proper subset already explains the misbehavior
        return True

    def rbfs(path: tuple[str, ...], f, bound):
        nonlocal alive
        if budget_.exhausted():
            stats.budget_exhausted = True
            raise _StopSearch
        pathset = frozenset(path)
        stats.max_path_len = max(stats.max_path_len, len(path))
        if any(e.as_set() <= pathset for e in emitted):
            stats.nodes_closed_superset += 1
            return _INF

        conflict = next((c for c in stored if not (c.as_set() & pathset)), None)
        if conflict is not None:
            stats.conflicts_reused += 1
        else:
            before = r.stats.consistency_checks
            conflict = quickxplain_min_conflict(
                dpi, [c for c in dpi.comps if c not in pathset], reasoner=r
            )
            if conflict is None:
                stats.verification_checks += r.stats.consistency_checks - before
                actual = cost.final(path)
                if actual > bound:
                    return actual  # resurfaces when its true cost is best
                if not is_minimal(pathset):
                    stats.nodes_closed_superset += 1
                    return _INF
                emitted.append(Diagnosis(path))
                bump_peak()
                if k is not None and len(emitted) >= k:
                    raise _StopSearch
                return _INF
            stats.conflicts_computed += 1
            stats.max_conflict_size = max(stats.max_conflict_size, len(conflict))
            stored.append(conflict)

        stats.nodes_expanded += 1
        children = []
        for c in conflict.comps:
            cpath = tuple(sorted(pathset | {c}))
            children.append([max(cost.bound(cpath), f), cpath])
        alive += len(children)
        bump_peak()
        try:
            while True:
                children.sort(key=lambda ch: ch[0])
                best = children[0]
                if best[0] > bound or best[0] == _INF:
                    return best[0]
                alt = children[1][0] if len(children) > 1 else _INF
                best[0] = rbfs(best[1], best[0], min(bound, alt))
        finally:
            alive -= len(children)

    try:
        root_f = cost.bound(())
        while root_f != _INF and (k is None or len(emitted) < k):
            root_f = rbfs((), root_f, _INF)
    except _StopSearch:
        pass
    stats.consistency_checks = budget_.used()
    return emitted, stats


# -- diagnosis samplers --------------------------------------------------

STRATEGIES = ("best_first", "random", "worst_first")


def _inverted_priors_dpi(dpi: Dpi) -> Dpi:
    from dataclasses import replace

    return replace(dpi, priors={c: 1.0 - p for c, p in dpi.priors.items()})


def _sub_rng(seed, index: int) -> random.Random:
    # per-run sub-seeds derived by counter: deterministic merge under fan-out
    return random.Random(f"{seed}:{index}")


def sample_diagnoses(
    dpi: Dpi,
    strategy: str,
    k: int,
    seed=None,
    *,
    retry_cap: int | None = None,
    reasoner: Reasoner | None = None,
) -> list[Diagnosis]:
    """A sample of k minimal diagnoses.

    best_first: the k most probable (hstree prefix, probability order).
    worst_first: the k least probable (best-first on rank-inverted priors).
    random: repeated minimal-diagnosis extraction on independently shuffled
    component orders, de-duplicated; stops after `retry_cap` attempts and
    returns the distinct diagnoses found so far (possibly fewer than k).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if strategy == "best_first":
        diags, _ = hstree(dpi, "probability", k=k, reasoner=reasoner)
        return diags
    if strategy == "worst_first":
        inv = _inverted_priors_dpi(dpi)
        diags, _ = hstree(inv, "probability", k=k)
        return diags
    if strategy != "random":
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    if seed is None:
        raise ValueError("random sampling needs a seed")
    cap = retry_cap if retry_cap is not None else max(40, 12 * k)
    r = reasoner if reasoner is not None else Reasoner(dpi)
    found: list[Diagnosis] = []
    seen: set[frozenset[str]] = set()
    for i in range(cap):
        if len(found) >= k:
            break
        perm = list(dpi.comps)
        _sub_rng(seed, i).shuffle(perm)
        d = invqx_min_diagnosis(dpi, perm, reasoner=r)
        if d is not None and d.as_set() not in seen:
            seen.add(d.as_set())
            found.append(d)
    return found


def _neg_log_prob(dpi: Dpi, d: Diagnosis) -> float:
    return -math.log(prior_product(dpi, d.comps))


def best_of_random(
    dpi: Dpi,
    cost: str | dict[str, float] = "cardinality",
    n_samples: int = 20,
    seed=0,
    parallelism: int = 1,
) -> Diagnosis:
    """Cheapest diagnosis among n independent randomized minimal-diagnosis runs.

    Runs exchange no information, so they parallelize freely; sub-seeds are
    derived by counter, making the result independent of worker scheduling.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if isinstance(cost, dict):
        cost_fn: Callable[[Diagnosis], float] = lambda d: sum(cost.get(c, 0.0) for c in d.comps)
    elif cost == "cardinality":
        cost_fn = lambda d: float(len(d))
    elif cost == "neg_log_prob":
        cost_fn = lambda d: _neg_log_prob(dpi, d)
    else:
        raise ValueError(f"unknown cost {cost!r}")

    def one_run(i: int) -> Diagnosis | None:
        perm = list(dpi.comps)
        _sub_rng(seed, i).shuffle(perm)
        return invqx_min_diagnosis(dpi, perm)

    if parallelism > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=parallelism) as ex:
            results = list(ex.map(one_run, range(n_samples)))
    else:
        results = [one_run(i) for i in range(n_samples)]

    candidates = [d for d in results if d is not None]
    if not candidates:
        raise ValueError("instance admits no diagnosis")
    return min(candidates, key=lambda d: (cost_fn(d), d.comps))

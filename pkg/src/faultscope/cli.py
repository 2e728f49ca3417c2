"""Command-line frontend for the diagnosis engine.

Exit codes: 0 success, 2 input error, 3 budget exhausted mid-search.
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time

import click

from . import bruteforce
from .circuits import ActualWorld, parse_fault_spec
from .dpi import prior_product
from .errors import FaultscopeError
from .hitting_set import best_of_random, hstree, rbf_hs, sample_diagnoses
from .msmp import quickxplain_min_conflict
from .reasoner import Reasoner
from .registry import ProblemRegistry
from .sequential import (
    HEURISTICS,
    Answer,
    SessionConfig,
    SimulatedOracle,
    run_session,
    select_query,
    generate_query_candidates,
    new_session,
    apply_answer,
    step_record,
)

EXIT_INPUT_ERROR = 2
EXIT_BUDGET = 3


def _load_problem(problem_id: str):
    try:
        return ProblemRegistry().get(problem_id)
    except (FaultscopeError, OSError) as e:
        raise click.exceptions.Exit(_input_error(str(e)))


def _input_error(msg: str) -> int:
    click.echo(f"error: {msg}", err=True)
    return EXIT_INPUT_ERROR


def _emit(doc, as_json: bool, human):
    if as_json:
        click.echo(json.dumps(doc, indent=2, sort_keys=True))
    else:
        human(doc)


@click.group()
def main():
    """Model-based diagnosis: conflicts, diagnoses, and measurement sessions."""


@main.command()
@click.option("-i", "--problem", "problem_id", required=True)
@click.option("--engine", type=click.Choice(["hstree", "rbfhs"]), default="hstree")
@click.option("--order", type=click.Choice(["cardinality", "probability"]), default="cardinality")
@click.option("-k", type=int, default=None, help="max diagnoses (default: all)")
@click.option("--budget", type=int, default=None, help="max consistency checks")
@click.option("--json", "as_json", is_flag=True)
def diagnose(problem_id, engine, order, k, budget, as_json):
    """Enumerate minimal diagnoses best-first."""
    problem = _load_problem(problem_id)
    search = hstree if engine == "hstree" else rbf_hs
    diags, stats = search(problem.dpi, order, k=k, budget=budget)
    doc = {
        "problem": problem.id,
        "engine": engine,
        "order": order,
        "diagnoses": [list(d.comps) for d in diags],
        "probs": [prior_product(problem.dpi, d.comps) for d in diags],
        "stats": stats.as_dict(),
    }
    _emit(doc, as_json, lambda d: _print_diagnose(d))
    if stats.budget_exhausted:
        raise click.exceptions.Exit(EXIT_BUDGET)


def _print_diagnose(doc):
    click.echo(f"{len(doc['diagnoses'])} minimal diagnosis(es) for {doc['problem']}:")
    for comps, p in zip(doc["diagnoses"], doc["probs"]):
        click.echo(f"  [{','.join(comps)}]  p={p:.6g}")
    s = doc["stats"]
    click.echo(
        f"checks={s['consistency_checks']} conflicts_computed={s['conflicts_computed']} "
        f"reused={s['conflicts_reused']} peak_open={s['peak_open_nodes']}"
    )


@main.command()
@click.option("-i", "--problem", "problem_id", required=True)
@click.option("--oracle", "use_oracle", is_flag=True, help="brute-force enumeration instead")
@click.option("--json", "as_json", is_flag=True)
def conflicts(problem_id, use_oracle, as_json):
    """Minimal conflicts: QuickXplain at the root plus the complete set."""
    problem = _load_problem(problem_id)
    dpi = problem.dpi
    if use_oracle:
        all_conflicts = sorted(
            [sorted(c.comps) for c in bruteforce.brute_force_minimal_conflicts(dpi)]
        )
        doc = {"problem": problem.id, "method": "bruteforce", "conflicts": all_conflicts}
    else:
        r = Reasoner(dpi)
        trace = []
        first = quickxplain_min_conflict(dpi, list(dpi.comps), reasoner=r, trace=trace)
        diags, stats = hstree(dpi, "cardinality", k=None)
        if first is None:  # consistent instance: sole diagnosis is empty, no conflicts
            conflict_sets = []
        else:
            duals = bruteforce.minimal_hitting_sets([d.as_set() for d in diags])
            conflict_sets = sorted(sorted(s) for s in duals)
        doc = {
            "problem": problem.id,
            "method": "quickxplain",
            "first_conflict": list(first.comps) if first else None,
            "checks": len(trace),
            "conflicts": conflict_sets,
            "search_stats": stats.as_dict(),
        }
    _emit(doc, as_json, lambda d: _print_conflicts(d))


def _print_conflicts(doc):
    if doc.get("first_conflict") is not None:
        click.echo(
            f"first conflict <{','.join(doc['first_conflict'])}> in {doc['checks']} checks"
        )
    click.echo(f"{len(doc['conflicts'])} minimal conflict(s):")
    for c in doc["conflicts"]:
        click.echo(f"  <{','.join(c)}>")


@main.command()
@click.option("-i", "--problem", "problem_id", required=True)
@click.option("--strategy", type=click.Choice(["best_first", "random", "worst_first"]), default="best_first")
@click.option("-k", type=int, default=3)
@click.option("--seed", type=int, default=0)
@click.option("--json", "as_json", is_flag=True)
def sample(problem_id, strategy, k, seed, as_json):
    """Sample k minimal diagnoses."""
    problem = _load_problem(problem_id)
    diags = sample_diagnoses(problem.dpi, strategy, k, seed=seed)
    doc = {
        "problem": problem.id,
        "strategy": strategy,
        "diagnoses": [list(d.comps) for d in diags],
        "probs": [prior_product(problem.dpi, d.comps) for d in diags],
    }
    _emit(doc, as_json, lambda d: [click.echo(f"  [{','.join(c)}]") for c in d["diagnoses"]])


@main.command()
@click.option("-i", "--problem", "problem_id", required=True)
@click.option("--cost", type=click.Choice(["cardinality", "neg_log_prob"]), default="cardinality")
@click.option("-n", "--n-samples", type=int, default=20)
@click.option("--seed", type=int, default=0)
@click.option("--parallelism", type=int, default=1)
@click.option("--json", "as_json", is_flag=True)
def bestof(problem_id, cost, n_samples, seed, parallelism, as_json):
    """Best-of-N randomized minimal diagnosis."""
    problem = _load_problem(problem_id)
    d = best_of_random(problem.dpi, cost, n_samples, seed=seed, parallelism=parallelism)
    doc = {"problem": problem.id, "cost": cost, "n_samples": n_samples,
           "diagnosis": list(d.comps)}
    _emit(doc, as_json, lambda x: click.echo(f"  [{','.join(x['diagnosis'])}]"))


@main.command(name="oracle-bf")
@click.option("-i", "--problem", "problem_id", required=True)
@click.option("--json", "as_json", is_flag=True)
def oracle_bf(problem_id, as_json):
    """Brute-force diagnoses + conflicts with a hitting-set duality check."""
    problem = _load_problem(problem_id)
    dpi = problem.dpi
    try:
        diags = bruteforce.brute_force_minimal_diagnoses(dpi)
        confs = bruteforce.brute_force_minimal_conflicts(dpi)
    except FaultscopeError as e:
        raise click.exceptions.Exit(_input_error(str(e)))
    dual = bruteforce.minimal_hitting_sets([c.as_set() for c in confs])
    doc = {
        "problem": problem.id,
        "diagnoses": sorted(sorted(d.comps) for d in diags),
        "conflicts": sorted(sorted(c.comps) for c in confs),
        "duality_holds": dual == {d.as_set() for d in diags},
    }
    _emit(doc, as_json, lambda d: click.echo(json.dumps(d, indent=2)))


@main.command()
@click.option("-i", "--problem", "problem_id", required=True)
@click.option("--mode", type=click.Choice(["dynamic", "static"]), default="dynamic")
@click.option("--heuristic", type=click.Choice(list(HEURISTICS)), default="ENT")
@click.option("-k", type=int, default=9)
@click.option("--sigma", type=float, default=0.95)
@click.option("--seed", type=int, default=0)
@click.option("--oracle", "oracle_spec", default=None,
              help="sim:<comp>=<stuck0|stuck1|flip>,... (interactive when omitted)")
@click.option("--transcript", "transcript_path", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def session(problem_id, mode, heuristic, k, sigma, seed, oracle_spec, transcript_path, as_json):
    """Run a sequential diagnosis session (interactive or simulated oracle)."""
    problem = _load_problem(problem_id)
    config = SessionConfig(mode=mode, heuristic=heuristic, k=k, sigma=sigma, seed=seed)
    if oracle_spec is not None:
        if not oracle_spec.startswith("sim:"):
            raise click.exceptions.Exit(_input_error("oracle must look like sim:X1=flip,..."))
        if problem.spec is None:
            raise click.exceptions.Exit(_input_error("simulated oracle needs a circuit problem"))
        try:
            faults = parse_fault_spec(oracle_spec[4:])
        except FaultscopeError as e:
            raise click.exceptions.Exit(_input_error(str(e)))
        world = ActualWorld(problem.spec, faults)
        if not world.consistent_with_obs():
            raise click.exceptions.Exit(
                _input_error("injected faults are inconsistent with the observations")
            )
        transcript = run_session(problem.dpi, config, SimulatedOracle(world))
    else:
        transcript = _interactive_session(problem.dpi, config)
    if transcript_path:
        with open(transcript_path, "w") as f:
            f.write(transcript.to_jsonl())
    final = [list(d.comps) for d in transcript.state.leading]
    doc = {
        "problem": problem.id,
        "mode": mode,
        "heuristic": heuristic,
        "stop": transcript.state.stop,
        "queries": len(transcript.records),
        "final_diagnoses": final,
        "transcript": transcript.records,
    }
    _emit(doc, as_json, _print_session)


def _print_session(doc):
    for r in doc["transcript"]:
        click.echo(
            f"[{r['step']}] measure {r['query']} -> {r['answer']}; "
            f"eliminated {len(r['eliminated'])}, remaining {len(r['remaining'])}"
        )
    click.echo(f"stop: {doc['stop']}")
    for comps in doc["final_diagnoses"]:
        click.echo(f"  [{','.join(comps)}]")


def _interactive_session(dpi, config):
    """Terminal loop: the human is the oracle."""
    from .sequential import Transcript

    state = new_session(dpi, config)
    while state.stop is None:
        try:
            q = select_query(state, generate_query_candidates(state))
        except FaultscopeError:
            break
        sizes = q.partition_sizes()
        click.echo(
            f"measure wire {q.wire} — is it 1?  "
            f"(D+={sizes['dplus']} D-={sizes['dminus']} D0={sizes['dzero']})"
        )
        raw = click.prompt("answer", type=click.Choice(["y", "n", "s"]))
        value = {"y": "true", "n": "false", "s": "skip"}[raw]
        state = apply_answer(state, q, Answer(value, source="human"))
    return Transcript(records=[step_record(h) for h in state.history], state=state)


@main.command()
@click.option("-i", "--problems", "problem_ids", multiple=True, required=True)
@click.option("--engines", default="hstree,rbfhs")
@click.option("--orders", default="cardinality")
@click.option("-k", type=int, default=None)
@click.option("--reps", type=int, default=1)
@click.option("--seed", type=int, default=0)
@click.option("--json", "as_json", is_flag=True)
@click.option("--csv", "as_csv", is_flag=True)
def bench(problem_ids, engines, orders, k, reps, seed, as_json, as_csv):
    """Benchmark engines over a problem corpus; CSV or JSON rows."""
    registry = ProblemRegistry()
    rows = []
    for pid in problem_ids:
        try:
            problem = registry.get(pid)
        except FaultscopeError as e:
            click.echo(f"error: {e}", err=True)
            continue
        for engine in engines.split(","):
            search = {"hstree": hstree, "rbfhs": rbf_hs}.get(engine)
            if search is None:
                raise click.exceptions.Exit(_input_error(f"unknown engine {engine!r}"))
            for order in orders.split(","):
                for _ in range(reps):
                    t0 = time.perf_counter()
                    diags, stats = search(problem.dpi, order, k=k)
                    wall_ms = (time.perf_counter() - t0) * 1000.0
                    rows.append({
                        "problem": problem.id,
                        "engine": engine,
                        "order": order,
                        "k": k if k is not None else "",
                        "seed": seed,
                        "wall_ms": round(wall_ms, 3),
                        "checks": stats.consistency_checks,
                        "conflicts_computed": stats.conflicts_computed,
                        "peak_open_nodes": stats.peak_open_nodes,
                        "found": len(diags),
                    })
    if as_json:
        click.echo(json.dumps(rows, indent=2, sort_keys=True))
    else:
        out = io.StringIO()
        writer = csv.DictWriter(out, fieldnames=[
            "problem", "engine", "order", "k", "seed", "wall_ms",
            "checks", "conflicts_computed", "peak_open_nodes", "found",
        ])
        writer.writeheader()
        writer.writerows(rows)
        click.echo(out.getvalue(), nl=False)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8712)
@click.option("--persist", "persist_dir", type=click.Path(), default=None,
              help="append-only transcript logs for crash replay")
@click.option("--ui", "ui_dir", type=click.Path(), default=None,
              help="serve a built web UI from this directory (default: ./frontend if present)")
def serve(host, port, persist_dir, ui_dir):
    """Serve the JSON session API (and, when available, the web UI)."""
    import os

    import uvicorn

    from .service import create_app

    if ui_dir is None and os.path.isfile(os.path.join("frontend", "index.html")):
        ui_dir = "frontend"
    app = create_app(persist_dir=persist_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    sys.exit(main())

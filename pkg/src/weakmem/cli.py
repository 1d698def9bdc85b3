"""Command-line front end for the litmus workbench.

Four subcommands cover the workflows:

    weakmem check FILE --model M      one model, verdict per exists clause
    weakmem simulate FILE             certification run on every consistent
                                      execution, with optional step trace
                                      and per-step DOT dumps
    weakmem diff FILE [MODELS...]     verdict matrix across models plus
                                      cross-model implication checks
    weakmem report [FILES...]         corpus sweep written as CSV and
                                      rendered figures

Exit codes are stable: 0 when every annotated expectation (and every
implication or simulation obligation) holds, 1 when a verdict or run
disagrees, 2 for unusable input.  All iteration orders are fixed, so
output is deterministic for a given invocation.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import report as report_mod
from .exec_graph import ExecutionGraph, GraphError, derive
from .event_structure import (
    StructureError,
    associated_graph,
    enumerate_structures,
    extract_candidates,
)
from .event_structure import to_dot as structure_dot
from .litmus_lang import (
    MODELS,
    ArityError,
    Assertion,
    ParseError,
    Program,
    enumerate_executions,
    parse_litmus,
)
from .models import (
    TSO_SCHEMES,
    check_armv8,
    check_imm,
    check_immsc,
    check_rc11,
    check_tso,
    map_to_armv8,
    map_to_tso,
    split_sc,
)
from .simulation import SimulationError, run_simulation, sim_init, sim_step
from .traversal import TheoremViolation, TraversalError, full_traversal

SCHEMA = 1
DEFAULT_MAX_EVENTS = 12
DEFAULT_MAX_FORKS = 2

# canonical column order for tables and figures
MODEL_ORDER = (
    "imm",
    "immsc",
    "rc11",
    "tso:fence-after-w",
    "tso:fence-before-r",
    "armv8",
    "weakestmo",
)

# what diff and report run when no models are named; weakestmo is
# opt-in because bounded enumeration is orders of magnitude slower
DEFAULT_DIFF_MODELS = MODEL_ORDER[:-1]


class UsageError(ValueError):
    """Bad invocation or unusable input; exits with status 2."""


# ---------------------------------------------------------------------------
# Model specs


@dataclass(frozen=True)
class ModelSpec:
    """A checkable model plus the knobs its checker needs."""

    name: str
    scheme: Optional[str] = None
    strict_psc: bool = False
    max_events: int = DEFAULT_MAX_EVENTS
    max_forks: int = DEFAULT_MAX_FORKS

    @property
    def label(self) -> str:
        if self.name == "tso":
            return f"tso:{self.scheme}"
        return self.name


def resolve_model(name: str, scheme: Optional[str], **knobs) -> ModelSpec:
    """Validate the --model / --map combination of the check command."""
    if name not in MODELS:
        raise UsageError(f"unknown model {name!r}")
    if name == "tso":
        if scheme not in TSO_SCHEMES:
            raise UsageError(
                "model tso needs --map fence-after-w or --map fence-before-r"
            )
    elif name == "armv8":
        if scheme != "armv8":
            raise UsageError("model armv8 needs --map armv8")
    elif scheme is not None:
        raise UsageError(f"--map does not apply to model {name!r}")
    return ModelSpec(name, scheme if name == "tso" else None, **knobs)


def spec_from_token(token: str, **knobs) -> ModelSpec:
    """Parse a diff/report model token such as tso:fence-after-w."""
    name, _, scheme = token.partition(":")
    if name == "tso":
        if scheme not in TSO_SCHEMES:
            raise UsageError(
                f"token {token!r}: tso needs a scheme, "
                "tso:fence-after-w or tso:fence-before-r"
            )
        return ModelSpec("tso", scheme, **knobs)
    if scheme:
        raise UsageError(f"token {token!r}: model {name!r} takes no scheme")
    if name not in MODELS:
        raise UsageError(f"unknown model {name!r}")
    return ModelSpec(name, **knobs)


def model_consistent(spec: ModelSpec, g: ExecutionGraph) -> bool:
    if spec.name == "imm":
        return bool(check_imm(g))
    if spec.name == "immsc":
        return bool(check_immsc(g, strict_psc=spec.strict_psc))
    if spec.name == "rc11":
        return bool(check_rc11(g))
    if spec.name == "tso":
        return bool(check_tso(map_to_tso(g, spec.scheme)))
    if spec.name == "armv8":
        return bool(check_armv8(map_to_armv8(g)))
    raise UsageError(f"model {spec.name!r} has no per-graph check")


# ---------------------------------------------------------------------------
# Outcome evaluation


def _graph_key(g: ExecutionGraph):
    """Total order on candidate graphs, for dedup and stable iteration."""
    return (
        tuple((e, str(l)) for e, l in sorted(g.lab.items())),
        tuple(sorted(g.rf.pairs)),
        tuple(sorted(g.co.pairs)),
        tuple(sorted(g.data.pairs)),
    )


def clause_event(p: Program, reg: str) -> tuple:
    """The graph event holding the final value of an outcome register."""
    t = p.register_thread.get(reg)
    if t is None:
        raise UsageError(f"outcome register {reg!r} is never assigned")
    if t == -1:
        raise UsageError(f"outcome register {reg!r} is assigned in several threads")
    serial = max(
        i
        for i, ins in enumerate(p.thread(t), start=1)
        if ins.kind == "load" and ins.register == reg
    )
    return (t, serial)


def clause_holds(p: Program, g: ExecutionGraph, a: Assertion) -> bool:
    return all(g.lab[clause_event(p, reg)].val == v for reg, v in a.conds)


def _is_complete(p: Program, g: ExecutionGraph) -> bool:
    # branch events are numbered densely from 1, so the last serial
    # being present means the whole thread is
    return all((t, len(p.thread(t))) in g.lab for t in p.thread_ids)


def _psc_ok(g: ExecutionGraph) -> bool:
    d = derive(g)
    return (d.psc_base | d.psc_f).acyclic()


def weakestmo_graphs(
    p: Program, spec: ModelSpec
) -> Tuple[List[ExecutionGraph], List[ExecutionGraph]]:
    """Complete execution candidates realized by some bounded structure.

    Extraction of a partial structure can yield graphs missing the tail
    of a thread; those cannot witness an outcome clause (which speaks
    about finished runs) and are dropped.  The second list keeps the
    candidates whose SC order is coherent, which is the only axiom the
    event-structure semantics does not already enforce during
    construction.
    """
    by_key: Dict[tuple, ExecutionGraph] = {}
    for s in enumerate_structures(
        p, spec.max_events, max_forks_per_thread=spec.max_forks
    ):
        for x in extract_candidates(s):
            g = associated_graph(s, x)
            if not _is_complete(p, g):
                continue
            by_key.setdefault(_graph_key(g), g)
    enumerated = [by_key[k] for k in sorted(by_key)]
    realized = [g for g in enumerated if _psc_ok(g)]
    return enumerated, realized


@dataclass(frozen=True)
class ClauseVerdict:
    text: str
    allowed: bool
    expected: Optional[str]  # "allow" | "forbid" | None when unannotated

    @property
    def matches(self) -> bool:
        if self.expected is None:
            return True
        return self.expected == ("allow" if self.allowed else "forbid")


@dataclass(frozen=True)
class TestOutcome:
    """One litmus test against one model.

    A clause is allowed exactly when some consistent execution
    satisfies it.  sim_pass/sim_fail are filled by the simulate
    command only.
    """

    name: str
    model: str
    enumerated: int
    consistent: int
    clauses: Tuple[ClauseVerdict, ...]
    sim_pass: Optional[int] = None
    sim_fail: Optional[int] = None

    @property
    def ok(self) -> bool:
        return all(c.matches for c in self.clauses) and not self.sim_fail


def evaluate_model(name: str, p: Program, spec: ModelSpec) -> TestOutcome:
    if spec.name == "weakestmo":
        enumerated, consistent = weakestmo_graphs(p, spec)
    else:
        enumerated = sorted(enumerate_executions(p), key=_graph_key)
        consistent = [g for g in enumerated if model_consistent(spec, g)]
    clauses = tuple(
        ClauseVerdict(
            str(a),
            any(clause_holds(p, g, a) for g in consistent),
            a.expected().get(spec.name),
        )
        for a in p.assertions
    )
    return TestOutcome(name, spec.label, len(enumerated), len(consistent), clauses)


def implication_violations(p: Program) -> List[str]:
    """Cross-model sanity sweep over every candidate execution.

    A mapped or stronger-model acceptance of a candidate whose source
    fails the model it compiles from is a refutation of the mapping
    correctness results; an immsc-consistent candidate failing imm
    refutes the SC-extension containment.
    """
    out: List[str] = []
    for g in sorted(enumerate_executions(p), key=_graph_key):
        src_ok = bool(check_immsc(g))
        claims = [
            (f"tso:{s}", bool(check_tso(map_to_tso(g, s))), src_ok, "immsc")
            for s in TSO_SCHEMES
        ]
        claims += [
            ("armv8", bool(check_armv8(map_to_armv8(g))), src_ok, "immsc"),
            ("sc-split imm", bool(check_imm(split_sc(g))), src_ok, "immsc"),
            ("rc11", bool(check_rc11(g)), src_ok, "immsc"),
            ("immsc", src_ok, bool(check_imm(g)), "imm"),
        ]
        for label, accepted, implied, target in claims:
            if accepted and not implied:
                out.append(
                    f"{label} accepts a candidate that {target} rejects: "
                    + _describe(g)
                )
    return out


def _describe(g: ExecutionGraph) -> str:
    return "; ".join(
        f"{t}.{s}:{lab}" for (t, s), lab in sorted(g.lab.items()) if t != 0
    )


# ---------------------------------------------------------------------------
# Commands


def _load_program(path, values=None) -> Program:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    p = parse_litmus(text)
    if values is not None:
        p = replace(p, value_domain=frozenset(values))
    return p


def cmd_check(
    file,
    model: str,
    *,
    scheme: Optional[str] = None,
    values: Optional[Sequence[int]] = None,
    strict_psc: bool = False,
    max_events: int = DEFAULT_MAX_EVENTS,
    max_forks: int = DEFAULT_MAX_FORKS,
) -> TestOutcome:
    p = _load_program(file, values)
    spec = resolve_model(
        model,
        scheme,
        strict_psc=strict_psc,
        max_events=max_events,
        max_forks=max_forks,
    )
    return evaluate_model(Path(file).stem, p, spec)


def cmd_simulate(
    file,
    *,
    values: Optional[Sequence[int]] = None,
    strict_psc: bool = False,
    trace: bool = False,
    dot_out=None,
) -> Tuple[TestOutcome, List[dict]]:
    """Certification construction on every consistent execution.

    Each consistent candidate is traversed and the event structure is
    rebuilt alongside; a TheoremViolation is recorded as a failing run
    instead of aborting the sweep.
    """
    p = _load_program(file, values)
    name = Path(file).stem
    graphs = sorted(enumerate_executions(p), key=_graph_key)
    consistent = [g for g in graphs if check_immsc(g, strict_psc=strict_psc)]
    runs: List[dict] = []
    passed = failed = 0
    for gi, g in enumerate(consistent):
        steps: List[dict] = []
        rec: dict = {"graph": gi}
        try:
            s, x = run_simulation(p, g, trace=steps)
        except TheoremViolation as exc:
            failed += 1
            rec.update(status="fail", reason=str(exc))
        else:
            passed += 1
            rec.update(status="pass", events=len(s.non_init))
            if dot_out is not None:
                _write_step_dots(p, g, name, gi, Path(dot_out))
        if trace:
            rec["steps"] = steps
        runs.append(rec)
    clauses = tuple(
        ClauseVerdict(
            str(a),
            any(clause_holds(p, g, a) for g in consistent),
            a.expected().get("immsc"),
        )
        for a in p.assertions
    )
    outcome = TestOutcome(
        name, "immsc", len(graphs), len(consistent), clauses, passed, failed
    )
    return outcome, runs


def _write_step_dots(p, g, name, gi, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    st = sim_init(p, g)
    (out_dir / f"{name}-g{gi:02d}-s00.dot").write_text(structure_dot(st.S))
    for si, tc2 in enumerate(full_traversal(g)[1:], start=1):
        st = sim_step(st, tc2)
        (out_dir / f"{name}-g{gi:02d}-s{si:02d}.dot").write_text(
            structure_dot(st.S)
        )


def cmd_diff(
    file,
    tokens: Sequence[str] = (),
    *,
    values: Optional[Sequence[int]] = None,
    strict_psc: bool = False,
    max_events: int = DEFAULT_MAX_EVENTS,
    max_forks: int = DEFAULT_MAX_FORKS,
) -> Tuple[List[TestOutcome], List[str]]:
    p = _load_program(file, values)
    name = Path(file).stem
    specs = [
        spec_from_token(
            t, strict_psc=strict_psc, max_events=max_events, max_forks=max_forks
        )
        for t in (tokens or DEFAULT_DIFF_MODELS)
    ]
    outcomes = [evaluate_model(name, p, spec) for spec in specs]
    return outcomes, implication_violations(p)


def corpus_dir() -> Path:
    return Path(__file__).parent / "corpus"


def _collect_files(args: Sequence[str]) -> List[Path]:
    if not args:
        args = [str(corpus_dir())]
    paths: List[Path] = []
    for a in args:
        pa = Path(a)
        if pa.is_dir():
            paths.extend(sorted(pa.glob("*.lit")))
        elif pa.is_file():
            paths.append(pa)
        else:
            raise UsageError(f"no such file or directory: {a}")
    if not paths:
        raise UsageError("no litmus files found")
    return paths


def _report_worker(task: tuple) -> List[dict]:
    path, tokens, values, strict_psc, max_events, max_forks = task
    p = _load_program(path, values)
    name = Path(path).stem
    rows: List[dict] = []
    for token in tokens:
        spec = spec_from_token(
            token,
            strict_psc=strict_psc,
            max_events=max_events,
            max_forks=max_forks,
        )
        out = evaluate_model(name, p, spec)
        rows.extend(outcome_rows(out))
    return rows


def outcome_rows(out: TestOutcome) -> List[dict]:
    clauses = out.clauses or (ClauseVerdict("", True, None),)
    return [
        {
            "test": out.name,
            "model": out.model,
            "clause": c.text,
            "allowed": c.allowed,
            "expected": c.expected,
            "enumerated": out.enumerated,
            "consistent": out.consistent,
        }
        for c in clauses
    ]


def cmd_report(
    files: Sequence[str],
    out_dir,
    *,
    tokens: Sequence[str] = (),
    jobs: int = 1,
    values: Optional[Sequence[int]] = None,
    strict_psc: bool = False,
    max_events: int = DEFAULT_MAX_EVENTS,
    max_forks: int = DEFAULT_MAX_FORKS,
) -> Tuple[List[dict], int]:
    """Sweep litmus files and write report.csv plus two figures."""
    paths = _collect_files(files)
    tokens = tuple(tokens or DEFAULT_DIFF_MODELS)
    tasks = [
        (str(p), tokens, values, strict_psc, max_events, max_forks)
        for p in paths
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_report_worker, tasks))
    else:
        results = [_report_worker(t) for t in tasks]
    rows = [row for chunk in results for row in chunk]
    rows.sort(
        key=lambda r: (
            r["test"],
            MODEL_ORDER.index(r["model"]) if r["model"] in MODEL_ORDER else 99,
            r["clause"],
        )
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_mod.write_csv(out / "report.csv", rows)
    report_mod.verdict_matrix(out / "verdict-matrix.png", rows, MODEL_ORDER)
    report_mod.execution_counts(out / "execution-counts.png", rows, MODEL_ORDER)
    mismatches = sum(1 for r in rows if not report_mod.row_matches(r))
    return rows, mismatches


# ---------------------------------------------------------------------------
# Rendering


def outcome_dict(out: TestOutcome) -> dict:
    doc = {
        "test": out.name,
        "model": out.model,
        "enumerated": out.enumerated,
        "consistent": out.consistent,
        "clauses": [
            {
                "clause": c.text,
                "allowed": c.allowed,
                "expected": c.expected,
                "matches": c.matches,
            }
            for c in out.clauses
        ],
    }
    if out.sim_pass is not None:
        doc["simulation"] = {"pass": out.sim_pass, "fail": out.sim_fail}
    return doc


def _print_outcome(out: TestOutcome) -> None:
    print(
        f"{out.name} [{out.model}]: {out.consistent} consistent "
        f"of {out.enumerated} candidate executions"
    )
    for c in out.clauses:
        verdict = "allow" if c.allowed else "forbid"
        if c.expected is None:
            note = ""
        else:
            note = f" (expected {c.expected}, {'ok' if c.matches else 'MISMATCH'})"
        print(f"  exists ({c.text}): {verdict}{note}")


def _print_table(rows: List[List[str]]) -> None:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        print("  " + "  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip())


# ---------------------------------------------------------------------------
# Argument handling


def _parse_values(text: Optional[str]) -> Optional[List[int]]:
    if text is None:
        return None
    try:
        values = [int(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise UsageError(f"bad --values {text!r}, expected e.g. 0,1") from None
    if not values:
        raise UsageError("empty --values")
    return values


def _run_check(args) -> int:
    out = cmd_check(
        args.file,
        args.model,
        scheme=args.map,
        values=_parse_values(args.values),
        strict_psc=args.strict_psc,
        max_events=args.max_events,
        max_forks=args.max_forks,
    )
    if args.json:
        print(json.dumps({"schema": SCHEMA, **outcome_dict(out)}, sort_keys=True))
    else:
        _print_outcome(out)
    return 0 if out.ok else 1


def _run_simulate(args) -> int:
    out, runs = cmd_simulate(
        args.file,
        values=_parse_values(args.values),
        strict_psc=args.strict_psc,
        trace=args.trace,
        dot_out=args.dot_out,
    )
    if args.json:
        doc = {"schema": SCHEMA, **outcome_dict(out), "runs": runs}
        print(json.dumps(doc, sort_keys=True))
    else:
        print(
            f"{out.name}: {out.consistent} consistent "
            f"of {out.enumerated} candidate executions"
        )
        for rec in runs:
            if rec["status"] == "pass":
                print(
                    f"  graph {rec['graph']:02d}: pass, "
                    f"final structure {rec['events']} events"
                )
            else:
                print(f"  graph {rec['graph']:02d}: FAIL, {rec['reason']}")
            for step in rec.get("steps", ()):
                print("    " + json.dumps(step, sort_keys=True))
    return 0 if out.ok else 1


def _run_diff(args) -> int:
    outcomes, violations = cmd_diff(
        args.file,
        args.models,
        values=_parse_values(args.values),
        strict_psc=args.strict_psc,
        max_events=args.max_events,
        max_forks=args.max_forks,
    )
    if args.json:
        doc = {
            "schema": SCHEMA,
            "test": outcomes[0].name if outcomes else Path(args.file).stem,
            "models": [outcome_dict(o) for o in outcomes],
            "violations": violations,
        }
        print(json.dumps(doc, sort_keys=True))
    else:
        name = outcomes[0].name if outcomes else Path(args.file).stem
        print(f"{name}:")
        clause_texts = [c.text for c in outcomes[0].clauses] if outcomes else []
        header = ["model"] + [f"exists ({t})" for t in clause_texts] + [
            "consistent"
        ]
        table = [header]
        for o in outcomes:
            table.append(
                [o.model]
                + ["allow" if c.allowed else "forbid" for c in o.clauses]
                + [f"{o.consistent}/{o.enumerated}"]
            )
        _print_table(table)
        if violations:
            print(f"implication violations: {len(violations)}")
            for v in violations:
                print(f"  {v}")
        else:
            print("implication violations: none")
    return 1 if violations else 0


def _run_report(args) -> int:
    rows, mismatches = cmd_report(
        args.files,
        args.out,
        tokens=args.models or (),
        jobs=args.jobs,
        values=_parse_values(args.values),
        strict_psc=args.strict_psc,
        max_events=args.max_events,
        max_forks=args.max_forks,
    )
    outputs = [
        str(Path(args.out) / n)
        for n in ("report.csv", "verdict-matrix.png", "execution-counts.png")
    ]
    if args.json:
        doc = {
            "schema": SCHEMA,
            "rows": rows,
            "mismatches": mismatches,
            "outputs": outputs,
        }
        print(json.dumps(doc, sort_keys=True))
    else:
        tests = sorted({r["test"] for r in rows})
        annotated = sum(1 for r in rows if r["expected"] is not None)
        print(f"report: {len(tests)} tests, {len(rows)} verdicts")
        for o in outputs:
            print(f"  wrote {o}")
        print(f"  expectations: {annotated} annotated, {mismatches} mismatches")
    return 1 if mismatches else 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="weakmem",
        description="litmus-test workbench for declarative memory models",
    )
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    base = argparse.ArgumentParser(add_help=False)
    base.add_argument(
        "--values",
        metavar="N,N",
        help="override the value domain of the test, e.g. 0,1",
    )
    base.add_argument(
        "--strict-psc",
        action="store_true",
        help="add psc_base to the immsc thin-air acyclicity check",
    )
    base.add_argument(
        "--json", action="store_true", help="emit one JSON document instead of text"
    )

    bounds = argparse.ArgumentParser(add_help=False)
    bounds.add_argument(
        "--max-events",
        type=int,
        default=DEFAULT_MAX_EVENTS,
        metavar="N",
        help="weakestmo bound on non-init events per structure",
    )
    bounds.add_argument(
        "--max-forks",
        type=int,
        default=DEFAULT_MAX_FORKS,
        metavar="N",
        help="weakestmo bound on conflict forks per thread",
    )

    c = sub.add_parser(
        "check",
        parents=[base, bounds],
        help="check a litmus test against one model",
    )
    c.add_argument("file")
    c.add_argument(
        "--model",
        required=True,
        choices=MODELS,
        help="consistency model to check",
    )
    c.add_argument(
        "--map",
        choices=TSO_SCHEMES + ("armv8",),
        help="compilation scheme; required for tso and armv8",
    )
    c.set_defaults(run=_run_check)

    s = sub.add_parser(
        "simulate",
        parents=[base],
        help="run the certification construction on every consistent execution",
    )
    s.add_argument("file")
    s.add_argument(
        "--trace",
        action="store_true",
        help="include one record per construction step",
    )
    s.add_argument(
        "--dot-out",
        metavar="DIR",
        help="write the event structure after every step as DOT files",
    )
    s.set_defaults(run=_run_simulate)

    d = sub.add_parser(
        "diff",
        parents=[base, bounds],
        help="compare verdicts across models and check implications",
    )
    d.add_argument("file")
    d.add_argument(
        "models",
        nargs="*",
        metavar="MODEL",
        help="models to compare, e.g. immsc tso:fence-after-w armv8 "
        "(default: all graph models)",
    )
    d.set_defaults(run=_run_diff)

    r = sub.add_parser(
        "report",
        parents=[base, bounds],
        help="sweep litmus files into a CSV table and rendered figures",
    )
    r.add_argument(
        "files",
        nargs="*",
        metavar="PATH",
        help="litmus files or directories (default: the shipped corpus)",
    )
    r.add_argument("--out", default="report", metavar="DIR", help="output directory")
    r.add_argument(
        "--models",
        nargs="+",
        metavar="MODEL",
        help="model tokens to run (default: all graph models)",
    )
    r.add_argument(
        "--jobs", type=int, default=1, metavar="N", help="parallel worker processes"
    )
    r.set_defaults(run=_run_report)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        ParseError,
        ArityError,
        GraphError,
        StructureError,
        TraversalError,
        SimulationError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TheoremViolation as exc:
        print(f"theorem violation: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

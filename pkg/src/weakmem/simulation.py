"""Replaying a graph traversal as event-structure growth.

The simulation relation ties a traversal configuration of a consistent
execution graph to an event structure under construction and a selected
execution X inside it: covered and issued events have exact
representatives in X, speculative branches never leave what the graph
permits, and coherence placement mirrors the graph's.  sim_step follows
one traversal step by re-running the stepped thread with read values
dictated by the new configuration's stable justification, reusing the
longest matching branch prefix and forking at the first diverging read.
Folding sim_step over a full traversal therefore rebuilds the input
graph as one extractable execution of the final structure, which is the
claim run_simulation checks instance by instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from .event_structure import (
    ConstructionChoice,
    EventStructure,
    StructureError,
    add_event,
    associated_graph,
    check_es_consistent,
    derive_es,
    extract_candidates,
    initial_structure,
)
from .exec_graph import ExecutionGraph, derive
from .litmus_lang import Label, Program, run_thread
from .models import Verdict, _verdict, check_immsc
from .relational_core import EventId
from .traversal import (
    TheoremViolation,
    TraversalConfig,
    full_traversal,
    init_config,
    sjf,
    trace_actions,
    trav_steps,
)


class SimulationError(ValueError):
    """A precondition of the simulation machinery fails."""


@dataclass(frozen=True)
class SimState:
    program: Program
    G: ExecutionGraph
    tc: TraversalConfig
    S: EventStructure
    X: FrozenSet[int]
    s2g: Dict[int, EventId]


def _s2g(s: EventStructure) -> Dict[int, EventId]:
    # Structure events map onto graph events by thread and po-position;
    # initialization events map onto their location's init write.
    out: Dict[int, EventId] = {}
    for e in s.E:
        if s.tids[e] == 0:
            out[e] = (0, s.labels[e].loc)
        else:
            out[e] = (s.tids[e], s.depth[e] + 1)
    return out


def _required(g: ExecutionGraph, tc: TraversalConfig) -> FrozenSet[EventId]:
    """C ∪ dom(po?;[I]): the graph events a simulated structure must hold."""
    return frozenset(tc.C | g.po.opt().restrict(g.E, tc.I).dom())


def _weak_match(a: Label, b: Label) -> bool:
    return (a.kind, a.mode, a.loc) == (b.kind, b.mode, b.loc)


# ---------------------------------------------------------------------------
# The simulation relation


def check_simrel(st: SimState) -> Verdict:
    """Evaluate the twelve clauses tying ⟨G, tc⟩ to ⟨S, X⟩.

    Clause 4 pins the image of the structure to the covered events plus
    everything up to an issued write; 5a/5b grade label agreement
    (values may diverge on speculative events, never on selected covered
    or issued ones); 8a/8b do the same for justification against
    reads-from; 9 and 11 require external justifiers and equal-writes
    classes to be anchored in issued selected events; 10 and 12 keep
    equal-writes classes and coherence aligned with the graph.
    """
    g, s, tc, x, m = st.G, st.S, st.tc, st.X, st.s2g
    d = derive_es(s)
    need = _required(g, tc)
    x_cov = {e for e in x if m[e] in tc.C}
    x_iss = {e for e in x if m[e] in tc.I}
    x_ci = {e for e in x if m[e] in tc.C | tc.I}
    rf_hb = g.rf.opt().seq(derive(g).hb.opt())

    def anchored(e: int) -> bool:
        return any(e2 in x_iss for e2 in s.ew.after(e))

    checks = [
        ("clause-1", check_immsc(g).consistent, None),
        ("clause-2", check_es_consistent(s).consistent, None),
        ("clause-3", x in extract_candidates(s), None),
        ("clause-4",
         {m[e] for e in s.E} == need and {m[e] for e in x} == need, None),
        ("clause-5a",
         all(m[e] in g.lab and _weak_match(s.labels[e], g.lab[m[e]])
             for e in s.E), None),
        ("clause-5b",
         all(m[e] in g.lab and s.labels[e] == g.lab[m[e]] for e in x_ci),
         None),
        ("clause-6", all((m[a], m[b]) in g.po for a, b in s.po.pairs), None),
        ("clause-7",
         all(a == b or (a, b) in d.cf
             for a in s.E for b in s.E if m[a] == m[b]), None),
        ("clause-8a", all((m[w], m[r]) in rf_hb for w, r in s.jf.pairs), None),
        ("clause-8b",
         all((m[w], m[r]) in g.rf for w, r in s.jf.pairs if r in x_cov),
         None),
        ("clause-9", all(anchored(w) for w in d.jfe.dom()), None),
        ("clause-10", all(m[a] == m[b] for a, b in s.ew.pairs), None),
        ("clause-11",
         all(a == b or anchored(a) for a, b in s.ew.pairs), None),
        ("clause-12",
         all(m[a] == m[b] or (m[a], m[b]) in g.co for a, b in s.co.pairs),
         None),
    ]
    return _verdict(checks)


def _assert_simrel(st: SimState) -> None:
    v = check_simrel(st)
    if not v:
        raise TheoremViolation(
            f"simulation relation fails: {', '.join(v.violated)}", state=st
        )


# ---------------------------------------------------------------------------
# Start state


def _check_graph_of_program(p: Program, g: ExecutionGraph) -> None:
    if {loc for _, loc in g.init_events} != set(p.locations):
        raise SimulationError("graph and program disagree on locations")
    tids = {e[0] for e in g.non_init}
    if not tids <= set(p.thread_ids):
        raise SimulationError("graph has events outside the program's threads")
    for t in p.thread_ids:
        labs = [g.lab[e] for e in sorted(e2 for e2 in g.non_init if e2[0] == t)]
        vals = [l.val for l in labs if l.kind == "R"]
        vals.extend([0] * max(0, p.loads_of(t) - len(vals)))
        want = [l for _, l in run_thread(p, t, vals).events[: len(labs)]]
        if labs != want:
            raise SimulationError(f"graph does not replay thread {t} of the program")


def sim_init(p: Program, g: ExecutionGraph) -> SimState:
    """The start state: init-only structure selected in full."""
    tc = init_config(g)
    _check_graph_of_program(p, g)
    s = initial_structure(p)
    st = SimState(program=p, G=g, tc=tc, S=s, X=frozenset(s.E), s2g=_s2g(s))
    _assert_simrel(st)
    return st


# ---------------------------------------------------------------------------
# One step


def _parent(s: EventStructure, e: int) -> Optional[int]:
    best = None
    for a in s.po.inv().after(e):
        if s.tids[a] == s.tids[e] and (best is None or (best, a) in s.po):
            best = a
    return best


def _children(s: EventStructure, t: int, pred: Optional[int]) -> List[int]:
    return [e for e in s.thread_events(t) if _parent(s, e) == pred]


def _jf_source(s: EventStructure, r: int) -> Optional[int]:
    for w in s.jf.inv().after(r):
        return w
    return None


def _dictated_trace(
    st: SimState, tc2: TraversalConfig, t: int, extent: int
) -> Tuple[List[Label], List[Optional[EventId]]]:
    """Labels of thread t re-run with sjf-dictated read values.

    Returns one graph-side justification source per position (None for
    writes and fences).  A read position takes the value of its source:
    the branch's own value when the source sits earlier in the same
    thread, the graph's final value when it is initialization or an
    issued write of another thread.
    """
    p, g = st.program, st.G
    src_of = {r: w for w, r in sjf(g, tc2).pairs}
    vals: List[int] = []
    sources: List[Optional[EventId]] = []
    for i in range(1, extent + 1):
        padded = vals + [0] * max(0, p.loads_of(t) - len(vals))
        trace = run_thread(p, t, padded)
        lab = trace.events[i - 1][1]
        if lab.kind != "R":
            sources.append(None)
            continue
        src = src_of.get((t, i))
        if src is None:
            raise TheoremViolation(
                f"read {(t, i)} has no stable justification", state=st
            )
        if src[0] not in (0, t) and src not in tc2.I:
            # A synchronized but unissued source has no representative
            # yet; certify against the latest local write instead.
            src = (0, lab.loc)
            for k in range(i - 1, 0, -1):
                prior = trace.events[k - 1][1]
                if prior.kind == "W" and prior.loc == lab.loc:
                    src = (t, k)
                    break
        if src[0] == 0:
            vals.append(0)
        elif src[0] == t:
            vals.append(trace.events[src[1] - 1][1].val)
        else:
            vals.append(g.lab[src].val)
        sources.append(src)
    padded = vals + [0] * max(0, p.loads_of(t) - len(vals))
    labels = [l for _, l in run_thread(p, t, padded).events[:extent]]
    return labels, sources


def _step(st: SimState, tc2: TraversalConfig) -> Tuple[SimState, dict]:
    g, p = st.G, st.program
    if tc2 not in trav_steps(g, st.tc):
        raise SimulationError("not a traversal step from the current configuration")
    (moved,) = (tc2.C - st.tc.C) | (tc2.I - st.tc.I)
    t = moved[0]
    need = _required(g, tc2)
    extent = max((e[1] for e in need if e[0] == t), default=0)
    labels, sources = _dictated_trace(st, tc2, t, extent)

    s = st.S
    s2g = dict(st.s2g)
    x_rep = {st.s2g[e]: e for e in st.X}
    by_loc_init = {s.labels[e].loc: e for e in s.init_events}

    branch: List[int] = []
    added: List[dict] = []
    pred: Optional[int] = None
    forked = False
    try:
        for i, lab in enumerate(labels, start=1):
            justifier = None
            if lab.kind == "R":
                src = sources[i - 1]
                if src[0] == 0:
                    justifier = by_loc_init[src[1]]
                elif src[0] == t:
                    justifier = branch[src[1] - 1]
                else:
                    justifier = x_rep[src]
            if not forked:
                reusable = None
                for c in _children(s, t, pred):
                    if s.labels[c] != lab:
                        continue
                    if lab.kind == "R":
                        have = _jf_source(s, c)
                        if have != justifier and (have, justifier) not in s.ew:
                            continue
                    reusable = c
                    break
                if reusable is not None:
                    branch.append(reusable)
                    pred = reusable
                    continue
                forked = True
            choice = _placement(st, s, s2g, tc2, t, i, lab, pred, justifier)
            new_id = len(s.labels)
            s = add_event(s, choice, p)
            s2g[new_id] = (t, i)
            branch.append(new_id)
            pred = new_id
            added.append(
                {
                    "id": new_id,
                    "label": str(lab),
                    "jf": choice.justification,
                    "ew": choice.ew_class,
                    "co_after": choice.co_after,
                }
            )
    except StructureError as exc:
        raise TheoremViolation(
            f"no valid certification branch for thread {t}: {exc}", state=st
        ) from exc

    x2 = (st.X - frozenset(st.S.thread_events(t))) | frozenset(branch)
    new_st = SimState(program=p, G=g, tc=tc2, S=s, X=frozenset(x2), s2g=s2g)
    _assert_simrel(new_st)
    record = dict(trace_actions([st.tc, tc2])[0])
    record.update(
        {
            "thread": t,
            "reused": [e for e in branch if e < len(st.S.labels)],
            "added": added,
            "simrel": "ok",
        }
    )
    return new_st, record


def _placement(
    st: SimState,
    s: EventStructure,
    s2g: Dict[int, EventId],
    tc2: TraversalConfig,
    t: int,
    i: int,
    lab: Label,
    pred: Optional[int],
    justifier: Optional[int],
) -> ConstructionChoice:
    if lab.kind == "R":
        return ConstructionChoice(t, lab, po_predecessor=pred, justification=justifier)
    if lab.kind != "W":
        return ConstructionChoice(t, lab, po_predecessor=pred)
    image = (t, i)
    # join the class of an issued selected write with the same image and
    # the same label, if there is one
    for e in st.X:
        if (
            st.s2g[e] == image
            and image in tc2.I
            and e in s.writes
            and s.labels[e] == lab
        ):
            return ConstructionChoice(t, lab, po_predecessor=pred, ew_class=e)
    # otherwise start a fresh class: right after the last class whose
    # image the graph orders strictly before ours, so new events sit
    # earlier among writes with equal images
    anchor = None
    for rep in s.co_map[lab.loc]:
        if (s2g[rep], image) in st.G.co:
            anchor = rep
    return ConstructionChoice(t, lab, po_predecessor=pred, co_after=anchor)


def sim_step(st: SimState, tc2: TraversalConfig) -> SimState:
    """Advance the structure along one traversal step of the graph."""
    new_st, _ = _step(st, tc2)
    return new_st


# ---------------------------------------------------------------------------
# The whole run


def run_simulation(
    p: Program, g: ExecutionGraph, trace: Optional[list] = None
) -> Tuple[EventStructure, FrozenSet[int]]:
    """Build an event structure certifying g by following its traversal.

    The simulation relation is asserted after the start state and after
    every step; the selected execution of the final structure must
    extract back to g exactly.  Pass a list as trace to collect one
    record per step for audit output.
    """
    st = sim_init(p, g)
    for tc2 in full_traversal(g)[1:]:
        st, record = _step(st, tc2)
        if trace is not None:
            trace.append(record)
    extracted = associated_graph(st.S, st.X)
    if extracted != g:
        raise TheoremViolation(
            "extracted execution differs from the simulated graph", state=st
        )
    return st.S, st.X

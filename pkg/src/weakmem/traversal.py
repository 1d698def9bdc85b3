"""Incremental traversal of consistent execution graphs.

A traversal walks a graph from its initialization events to the whole
execution in two overlapping waves.  Issuing a write commits it for
other threads to read; covering an event finalizes it once its program
order past is covered and its value source is issued.  The pair
⟨covered, issued⟩ is a traversal configuration.

determined, vf and sjf measure how much of the graph a configuration
already forces: determined collects the events whose labels can no
longer change, vf records which writes each event may observe, and sjf
picks the coherence-latest observed write per read.  They drive the
simulation layer, which replays a traversal as event-structure growth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, List

from .exec_graph import ExecutionGraph, derive
from .models import check_immsc
from .relational_core import EventId, Rel


class TraversalError(ValueError):
    """The graph or configuration fails a traversal precondition."""


class TheoremViolation(RuntimeError):
    """An empirical counterexample to a guarantee the search relies on.

    Carries the stuck configuration or simulation state so a report can
    show exactly where progress became impossible.
    """

    def __init__(self, message: str, *, config=None, state=None):
        super().__init__(message)
        self.config = config
        self.state = state


@dataclass(frozen=True)
class TraversalConfig:
    C: FrozenSet[EventId]
    I: FrozenSet[EventId]


def _check_config(g: ExecutionGraph, tc: TraversalConfig) -> None:
    if not tc.C <= g.E:
        raise TraversalError("covered set strays outside the graph")
    if not tc.I <= g.writes:
        raise TraversalError("issued set must hold writes only")
    if not g.init_events <= (tc.C & tc.I):
        raise TraversalError("initialization must be covered and issued")
    for e in tc.C:
        if not g.po.inv().after(e) <= tc.C:
            raise TraversalError(f"covered set is not po-downward closed at {e}")
    if not (tc.C & g.writes) <= tc.I:
        raise TraversalError("covered writes must be issued")


def _require_consistent(g: ExecutionGraph) -> None:
    v = check_immsc(g)
    if not v:
        raise TraversalError(
            f"graph is not consistent: {', '.join(v.violated)}"
        )


def init_config(g: ExecutionGraph) -> TraversalConfig:
    _require_consistent(g)
    return TraversalConfig(g.init_events, g.init_events)


def final_config(g: ExecutionGraph) -> TraversalConfig:
    _require_consistent(g)
    return TraversalConfig(frozenset(g.E), frozenset(g.writes))


# ---------------------------------------------------------------------------
# What a configuration already forces


def determined(g: ExecutionGraph, tc: TraversalConfig) -> FrozenSet[EventId]:
    """Events whose labels are fixed by the configuration.

    Covered and issued events are fixed by definition.  So is anything
    feeding an issued write through preserved program order, including
    the local writes those reads take their values from, and any read
    satisfied locally by an issued write.
    """
    _check_config(g, tc)
    feeding = g.rfi.opt().seq(g.ppo.restrict(g.E, tc.I)).dom()
    local = g.rfi.restrict(tc.I, g.E).ran()
    return frozenset(tc.C | tc.I | feeding | local)


def vf(g: ExecutionGraph, tc: TraversalConfig) -> Rel:
    """Viewfront: which writes each event may already observe.

    A write reaches everything after its covered readers in
    happens-before, and everything po-after a determined read of it.
    """
    _check_config(g, tc)
    d = derive(g)
    hbq = d.hb.opt()
    observed = g.rf.restrict(g.E, tc.C).opt().seq(hbq).restrict(g.writes, g.E)
    forced = g.rf.restrict(g.E, determined(g, tc)).seq(g.po.opt())
    return observed | forced


def sjf(g: ExecutionGraph, tc: TraversalConfig) -> Rel:
    """Stable justification: the co-latest observed write per read."""
    v = vf(g, tc)
    candidates = v.inter(g.same_loc).restrict(g.writes, g.reads)
    return candidates - g.co.seq(v)


# ---------------------------------------------------------------------------
# Steps and search


def _issuable(g: ExecutionGraph, tc: TraversalConfig, w: EventId) -> bool:
    # Every read feeding w through preserved program order must take its
    # value from an already issued write, unless it reads locally.
    feeding = set(g.ppo.inv().after(w)) | {w}
    for r in feeding:
        if g.lab[r].kind != "R":
            continue
        for src in g.rf.inv().after(r):
            if (src, r) not in g.po and src not in tc.I:
                return False
    return True


def _coverable(g: ExecutionGraph, tc: TraversalConfig, e: EventId) -> bool:
    if e in tc.C or not g.po.inv().after(e) <= tc.C:
        return False
    kind = g.lab[e].kind
    if kind == "R":
        return all(src in tc.I for src in g.rf.inv().after(e))
    if kind == "W":
        return e in tc.I
    return True


def trav_steps(g: ExecutionGraph, tc: TraversalConfig) -> set:
    """All configurations reachable in one step.

    Issuing adds a write to I.  Covering adds an event to C.  A write
    whose issue and cover conditions hold simultaneously may take both
    in one fused step, which is how an uncovered unissued write with a
    settled past makes progress.
    """
    _check_config(g, tc)
    out = set()
    for w in g.writes - tc.I:
        if _issuable(g, tc, w):
            out.add(TraversalConfig(tc.C, tc.I | {w}))
            if w not in tc.C and g.po.inv().after(w) <= tc.C:
                out.add(TraversalConfig(tc.C | {w}, tc.I | {w}))
    for e in g.E - tc.C:
        if _coverable(g, tc, e):
            out.add(TraversalConfig(tc.C | {e}, tc.I))
    return out


def _ordered_steps(g: ExecutionGraph, tc: TraversalConfig) -> List[TraversalConfig]:
    # Covers (fused ones included) before plain issues, lowest event
    # first: makes the search deterministic.
    def key(nc: TraversalConfig):
        gained_c = nc.C - tc.C
        if gained_c:
            return (0, min(gained_c))
        return (1, min(nc.I - tc.I))

    return sorted(trav_steps(g, tc), key=key)


def full_traversal(g: ExecutionGraph) -> List[TraversalConfig]:
    """A step-by-step path from init_config to final_config.

    Depth-first with backtracking; consistent graphs always admit one,
    so failure is reported as a theorem violation carrying the deepest
    configuration the search could not leave.
    """
    start = init_config(g)
    final = final_config(g)
    path = [start]
    alternatives = [_ordered_steps(g, start)]
    seen = {start}
    stuck = start
    while path:
        if path[-1] == final:
            return path
        alts = alternatives[-1]
        if not alts:
            if len(path[-1].C | path[-1].I) >= len(stuck.C | stuck.I):
                stuck = path[-1]
            path.pop()
            alternatives.pop()
            continue
        nxt = alts.pop(0)
        if nxt in seen:
            continue
        seen.add(nxt)
        path.append(nxt)
        alternatives.append(_ordered_steps(g, nxt))
    raise TheoremViolation("graph admits no full traversal", config=stuck)


def trace_actions(traversal: Iterable[TraversalConfig]) -> List[dict]:
    """Action records for a traversal, one per step.

    A fused issue-and-cover serializes as a single cover record.
    """
    tcs = list(traversal)
    out = []
    for prev, cur in zip(tcs, tcs[1:]):
        gained_c = cur.C - prev.C
        gained_i = cur.I - prev.I
        if gained_c:
            (e,) = gained_c
            out.append({"action": "cover", "event": [e[0], e[1]]})
        else:
            (e,) = gained_i
            out.append({"action": "issue", "event": [e[0], e[1]]})
    return out

"""Execution graphs and their derived relations.

A graph is a conflict-free execution candidate: events with labels,
program order, reads-from, per-location coherence order, plus the
syntactic dependency relations (data, and ppo computed from it).
Derived relations (fr, eco, sw, hb, scb, psc) feed the consistency
predicates in the models module.

Event identity is (tid, serial) with 1-based serials; initialization
events are (0, loc), one relaxed write of 0 per location, program-order
before everything and mutually ordered by location name.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .litmus_lang import Label
from .relational_core import EventId, Rel, identity

# mode comparisons: rlx below acq and rel, both below acqrel, sc on top
_MODE_GEQ = {
    "rel": {"rel", "acqrel", "sc"},
    "acq": {"acq", "acqrel", "sc"},
}


def mode_geq(mode: str, floor: str) -> bool:
    """mode is at least as strong as floor in the access-mode lattice."""
    if floor in _MODE_GEQ:
        return mode in _MODE_GEQ[floor]
    if floor == "sc":
        return mode == "sc"
    raise ValueError(f"unsupported mode floor {floor!r}")


class GraphError(ValueError):
    """A structurally ill-formed graph where a well-formed one is required."""


@dataclass(frozen=True)
class ExecutionGraph:
    lab_items: Tuple[Tuple[EventId, Label], ...]  # sorted, init included
    po: Rel
    rf: Rel
    co: Rel
    data: Rel
    ppo: Rel

    # -- event views ------------------------------------------------------

    @cached_property
    def lab(self) -> Dict[EventId, Label]:
        return dict(self.lab_items)

    @property
    def E(self) -> FrozenSet[EventId]:
        return self.po.carrier

    @cached_property
    def init_events(self) -> FrozenSet[EventId]:
        return frozenset(e for e in self.E if e[0] == 0)

    @cached_property
    def non_init(self) -> FrozenSet[EventId]:
        return self.E - self.init_events

    def tid_of(self, e: EventId) -> int:
        return e[0]

    @cached_property
    def reads(self) -> FrozenSet[EventId]:
        return frozenset(e for e, l in self.lab_items if l.kind == "R")

    @cached_property
    def writes(self) -> FrozenSet[EventId]:
        return frozenset(e for e, l in self.lab_items if l.kind == "W")

    @cached_property
    def fences(self) -> FrozenSet[EventId]:
        return frozenset(e for e, l in self.lab_items if l.kind == "F")

    def with_mode(self, events: Iterable[EventId], floor: str) -> FrozenSet[EventId]:
        return frozenset(e for e in events if mode_geq(self.lab[e].mode, floor))

    @cached_property
    def sc_events(self) -> FrozenSet[EventId]:
        return frozenset(e for e, l in self.lab_items if l.mode == "sc")

    def thread(self, t: int) -> List[EventId]:
        return sorted(e for e in self.non_init if e[0] == t)

    @cached_property
    def thread_ids(self) -> Tuple[int, ...]:
        return tuple(sorted({e[0] for e in self.non_init}))

    @cached_property
    def same_loc(self) -> Rel:
        by_loc: Dict[str, List[EventId]] = {}
        for e, l in self.lab_items:
            if l.loc is not None:
                by_loc.setdefault(l.loc, []).append(e)
        pairs = set()
        for evs in by_loc.values():
            pairs.update((a, b) for a in evs for b in evs)
        return Rel(pairs, self.E)

    def rel(self, pairs) -> Rel:
        return Rel(pairs, self.E)

    @cached_property
    def rfe(self) -> Rel:
        return self.rf - self.po

    @cached_property
    def rfi(self) -> Rel:
        return self.rf & self.po

    @cached_property
    def fr(self) -> Rel:
        return self.rf.inv().seq(self.co)

    @cached_property
    def po_imm(self) -> Rel:
        return self.po - self.po.seq(self.po)


def build_graph(
    thread_labels: Mapping[int, Sequence[Label]],
    locations: Iterable[str],
    rf_pairs,
    co_pairs,
    data_pairs,
) -> ExecutionGraph:
    """Assemble a graph from per-thread label lists and relation pairs.

    po is rebuilt here: initialization events ordered by location name,
    then before every thread event, and each thread a chain.  ppo is
    recomputed as [R];data+;[W], the syntactic preserved program order.
    """
    init = [(0, loc) for loc in sorted(locations)]
    lab: Dict[EventId, Label] = {e: Label("W", "rlx", e[1], 0) for e in init}
    po_pairs = set()
    for i, a in enumerate(init):
        for b in init[i + 1 :]:
            po_pairs.add((a, b))
    for t in sorted(thread_labels):
        chain = []
        for serial, label in enumerate(thread_labels[t], start=1):
            e = (t, serial)
            lab[e] = label
            for prev in chain:
                po_pairs.add((prev, e))
            for ie in init:
                po_pairs.add((ie, e))
            chain.append(e)
    carrier = frozenset(lab)
    po = Rel(po_pairs, carrier)
    data = Rel(data_pairs, carrier)
    reads = frozenset(e for e, l in lab.items() if l.kind == "R")
    writes = frozenset(e for e, l in lab.items() if l.kind == "W")
    ppo = data.plus().restrict(reads, writes)
    return ExecutionGraph(
        lab_items=tuple(sorted(lab.items())),
        po=po,
        rf=Rel(rf_pairs, carrier),
        co=Rel(co_pairs, carrier),
        data=data,
        ppo=ppo,
    )


# ---------------------------------------------------------------------------
# Well-formedness


def well_formed_diagnostics(g: ExecutionGraph) -> List[str]:
    out = []
    lab = g.lab
    if frozenset(e for e, _ in g.lab_items) != g.E:
        out.append("label map does not cover the carrier")
        return out
    for e, l in g.lab_items:
        if l.kind in ("R", "W"):
            if l.loc is None or l.val is None:
                out.append(f"{e}: access label missing location or value")
        elif l.kind == "F":
            if l.loc is not None or l.val is not None:
                out.append(f"{e}: fence label carries location or value")
        else:
            out.append(f"{e}: unknown label kind {l.kind!r}")
    for e in g.init_events:
        l = lab[e]
        if l.kind != "W" or l.val != 0 or l.loc != e[1]:
            out.append(f"{e}: initialization event must write 0 to its location")

    # po: strict, transitive, total per thread, init first
    if not g.po.irreflexive():
        out.append("po is not irreflexive")
    if g.po.seq(g.po).pairs - g.po.pairs:
        out.append("po is not transitive")
    for a, b in g.po.pairs:
        if a[0] != b[0] and a[0] != 0:
            out.append(f"po crosses threads: {(a, b)}")
            break
    by_tid: Dict[int, List[EventId]] = {}
    for e in g.E:
        by_tid.setdefault(e[0], []).append(e)
    for t, evs in by_tid.items():
        for i, a in enumerate(evs):
            for b in evs[i + 1 :]:
                if (a, b) not in g.po.pairs and (b, a) not in g.po.pairs:
                    out.append(f"po not total within thread {t}: {(a, b)}")
    for ie in g.init_events:
        for e in g.non_init:
            if (ie, e) not in g.po.pairs:
                out.append(f"init event {ie} not po-before {e}")

    # rf typing and functionality
    for w, r in g.rf.pairs:
        if w not in g.writes or r not in g.reads:
            out.append(f"rf pair not write-to-read: {(w, r)}")
        elif lab[w].loc != lab[r].loc or lab[w].val != lab[r].val:
            out.append(f"rf pair disagrees on location or value: {(w, r)}")
    sources: Dict[EventId, EventId] = {}
    for w, r in g.rf.pairs:
        if r in sources and sources[r] != w:
            out.append(f"read {r} has two rf sources")
        sources[r] = w

    # co typing and per-location strict totality
    for a, b in g.co.pairs:
        if a not in g.writes or b not in g.writes:
            out.append(f"co pair not between writes: {(a, b)}")
        elif lab[a].loc != lab[b].loc:
            out.append(f"co pair crosses locations: {(a, b)}")
    if not g.co.irreflexive():
        out.append("co is not irreflexive")
    if g.co.seq(g.co).pairs - g.co.pairs:
        out.append("co is not transitive")
    by_loc: Dict[str, List[EventId]] = {}
    for w in g.writes:
        by_loc.setdefault(lab[w].loc, []).append(w)
    for loc, ws in by_loc.items():
        for i, a in enumerate(ws):
            for b in ws[i + 1 :]:
                if (a, b) not in g.co.pairs and (b, a) not in g.co.pairs:
                    out.append(f"co not total at {loc}: {(a, b)}")

    if g.data.pairs - g.po.pairs:
        out.append("data has pairs outside po")
    if g.data.pairs - g.data.restrict(g.reads, g.E).pairs:
        out.append("data does not start at reads")
    if g.ppo.pairs - g.po.restrict(g.reads, g.writes).pairs:
        out.append("ppo is not within [R];po;[W]")
    return out


def well_formed(g: ExecutionGraph) -> bool:
    return not well_formed_diagnostics(g)


def _require_well_formed(g: ExecutionGraph) -> None:
    problems = well_formed_diagnostics(g)
    if problems:
        raise GraphError("; ".join(problems[:3]))


# ---------------------------------------------------------------------------
# Derived relations


@dataclass(frozen=True)
class DerivedRels:
    fr: Rel
    eco: Rel
    sw: Rel
    hb: Rel
    scb: Rel
    psc_base: Rel
    psc_f: Rel


def derive(g: ExecutionGraph) -> DerivedRels:
    """hb/eco and the SC relations; requires a well-formed graph.

    sw is the minimal release-acquire form [W^>=rel];rf;[R^>=acq]: no
    release sequences, no fence-induced synchronization.  Fences count
    as a different location from everything for the po|!=loc segments
    of scb, so hb paths may pass through them.
    """
    _require_well_formed(g)
    lab = g.lab
    fr = g.fr
    eco = (g.co | g.rf | fr).plus()
    sw = g.rf.restrict(
        g.with_mode(g.writes, "rel"), g.with_mode(g.reads, "acq")
    )
    hb = (g.po | sw).plus()

    def same_loc_pair(a, b):
        la, lb = lab[a], lab[b]
        return la.loc is not None and la.loc == lb.loc

    po_diff = g.po.filter(lambda a, b: not same_loc_pair(a, b))
    hb_same = hb.filter(same_loc_pair)
    scb = g.po | po_diff.seq(hb).seq(po_diff) | hb_same | g.co | fr

    e_sc = g.sc_events
    f_sc = frozenset(e for e in g.fences if lab[e].mode == "sc")
    ident = identity(g.E)
    left = ident.restrict(e_sc, e_sc) | ident.restrict(f_sc, f_sc).seq(hb.opt())
    right = ident.restrict(e_sc, e_sc) | hb.opt().seq(ident.restrict(f_sc, f_sc))
    psc_base = left.seq(scb).seq(right)
    f_id = ident.restrict(f_sc, f_sc)
    psc_f = f_id.seq(hb | hb.seq(eco).seq(hb)).seq(f_id)
    return DerivedRels(
        fr=fr, eco=eco, sw=sw, hb=hb, scb=scb, psc_base=psc_base, psc_f=psc_f
    )


# ---------------------------------------------------------------------------
# Output


def _node_name(e: EventId) -> str:
    return f"e{e[0]}_{e[1]}"


def _fmt_event(e: EventId, l: Label) -> str:
    return f"{e[0]}.{e[1]}: {l}"


def to_dot(g: ExecutionGraph) -> str:
    """DOT rendering with initialization collapsed into one node."""
    _require_well_formed(g)
    lab = g.lab
    lines = ["digraph execution {", "  rankdir=TB;", '  node [shape=box, fontname="monospace"];']
    lines.append('  init [label="Init"];')
    for e in sorted(g.non_init):
        lines.append(f'  {_node_name(e)} [label="{_fmt_event(e, lab[e])}"];')

    def node(e):
        return "init" if e[0] == 0 else _node_name(e)

    def emit(relation: Rel, attrs: str):
        seen = set()
        for a, b in sorted(relation.pairs):
            edge = (node(a), node(b))
            if edge[0] == edge[1] or edge in seen:
                continue  # collapsed init self-edges and duplicates
            seen.add(edge)
            lines.append(f"  {edge[0]} -> {edge[1]} [{attrs}];")

    emit(g.po_imm, "color=black")
    emit(g.rf, 'color=darkgreen, label="rf"')
    emit(g.co, 'color=blue, label="co"')
    emit(g.fr, 'color=red, label="fr"')
    emit(g.ppo, 'color=purple, style=dashed, label="ppo"')
    lines.append("}")
    return "\n".join(lines)


def dot_edge_count(g: ExecutionGraph) -> int:
    """How many edges to_dot draws, for count checks."""

    def collapsed(relation: Rel):
        def node(e):
            return "init" if e[0] == 0 else e

        return {
            (node(a), node(b))
            for a, b in relation.pairs
            if node(a) != node(b)
        }

    return sum(
        len(collapsed(r)) for r in (g.po_imm, g.rf, g.co, g.fr, g.ppo)
    )


def _event_json(e: EventId):
    return [e[0], e[1]]


def to_json(g: ExecutionGraph) -> dict:
    lab = g.lab

    def edges(relation: Rel):
        return [[_event_json(a), _event_json(b)] for a, b in sorted(relation.pairs)]

    events = []
    for e in sorted(g.E):
        l = lab[e]
        entry = {"id": _event_json(e), "kind": l.kind, "mode": l.mode}
        if l.loc is not None:
            entry["loc"] = l.loc
            entry["val"] = l.val
        events.append(entry)
    return {
        "events": events,
        "po": edges(g.po),
        "rf": edges(g.rf),
        "co": edges(g.co),
        "data": edges(g.data),
        "ppo": edges(g.ppo),
    }

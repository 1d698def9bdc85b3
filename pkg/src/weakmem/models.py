"""Consistency predicates and architecture mappings.

Five checkers share one verdict shape: a list of violated axiom names
plus, when a violation is a cycle or an irreflexivity failure, a
witness path that can be replayed against the relation that produced
it.  The mapping functions translate a source graph to x86-TSO or
ARMv8 form (and split_sc rewrites sc accesses into fence-protected
release/acquire ones) so the checkers can exercise the compilation
claims end to end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from .exec_graph import (
    DerivedRels,
    ExecutionGraph,
    GraphError,
    _require_well_formed,
    derive,
    mode_geq,
)
from .litmus_lang import Label
from .relational_core import EventId, Rel, identity, shortest_cycle

MFENCE = Label("F", "mfence", None, None)

TSO_SCHEMES = ("fence-after-w", "fence-before-r")


@dataclass(frozen=True)
class Verdict:
    """Outcome of a consistency check.

    violated lists the failed axioms in check order; witness, when one
    of them has a cycle or a reflexive hb;eco? point, is the event path
    of the first such failure.
    """

    consistent: bool
    violated: Tuple[str, ...]
    witness: Optional[Tuple[EventId, ...]]

    def __bool__(self) -> bool:
        return self.consistent


def _verdict(checks: List[Tuple[str, bool, Optional[Tuple[EventId, ...]]]]) -> Verdict:
    violated = tuple(name for name, ok, _ in checks if not ok)
    witness = next(
        (w for name, ok, w in checks if not ok and w is not None), None
    )
    return Verdict(not violated, violated, witness)


def _acyclicity(name: str, r: Rel):
    cycle = shortest_cycle(r)
    return (name, cycle is None, cycle)


def _completeness(g: ExecutionGraph):
    uncovered = g.reads - frozenset(r for _, r in g.rf.pairs)
    return ("completeness", not uncovered, None)


def _coherence(g: ExecutionGraph, d: DerivedRels):
    # hb;eco? must be irreflexive: no hb self-loop and no e ->hb f ->eco e
    for e, f in sorted(d.hb.pairs):
        if e == f:
            return ("coherence", False, (e,))
    for e, f in sorted(d.hb.pairs):
        if (f, e) in d.eco.pairs:
            return ("coherence", False, (e, f))
    return ("coherence", True, None)


def _sc_per_loc(g: ExecutionGraph):
    po_loc = g.po & g.same_loc
    return _acyclicity("sc-per-loc", po_loc | g.rf | g.fr | g.co)


def _bob(g: ExecutionGraph) -> Rel:
    # program order a release write, an acquire read, or a fence must
    # preserve; empty on relaxed-only graphs
    return (
        g.po.restrict(g.E, g.with_mode(g.writes, "rel"))
        | g.po.restrict(g.with_mode(g.reads, "acq"), g.E)
        | g.po.restrict(g.E, g.fences).seq(g.po.restrict(g.fences, g.E))
    )


def _nta_rel(g: ExecutionGraph, d: DerivedRels) -> Rel:
    # the no-thin-air relation: dependencies, mode-ordering edges, and
    # the sc-fence order, so fence-split graphs keep their sc strength
    return g.rf | g.ppo | _bob(g) | d.psc_f


# ---------------------------------------------------------------------------
# Source-level models


def check_imm(g: ExecutionGraph) -> Verdict:
    """Completeness, coherence, and the no-thin-air acyclicity."""
    d = derive(g)
    return _verdict(
        [
            _completeness(g),
            _coherence(g, d),
            _acyclicity("no-thin-air", _nta_rel(g, d)),
        ]
    )


def check_immsc(g: ExecutionGraph, *, strict_psc: bool = False) -> Verdict:
    """check_imm plus acyclicity of the partial sc order.

    strict_psc is a diagnostic mode that folds psc_base directly into
    the no-thin-air acyclicity; it is deliberately stronger than the
    model and refuses some executions the plain check allows.
    """
    d = derive(g)
    if strict_psc:
        psc = _acyclicity("psc", _nta_rel(g, d) | d.psc_base)
    else:
        psc = _acyclicity("psc", d.psc_base | d.psc_f)
    return _verdict(
        [
            _completeness(g),
            _coherence(g, d),
            _acyclicity("no-thin-air", _nta_rel(g, d)),
            psc,
        ]
    )


def check_rc11(g: ExecutionGraph) -> Verdict:
    """Like the sc model but with po ∪ rf acyclicity instead of ppo."""
    d = derive(g)
    return _verdict(
        [
            _completeness(g),
            _coherence(g, d),
            _acyclicity("psc", d.psc_base | d.psc_f),
            _acyclicity("po-rf-acyclic", g.po | g.rf),
        ]
    )


# ---------------------------------------------------------------------------
# Architecture graphs


@dataclass(frozen=True)
class TsoGraph(ExecutionGraph):
    """Execution graph over the x86 alphabet: plain R/W and MFENCE."""

    def __post_init__(self):
        for e, l in self.lab_items:
            if l.kind in ("R", "W"):
                if l.mode != "plain":
                    raise GraphError(f"{e}: TSO access must be unannotated, got {l}")
            elif l.kind == "F":
                if l.mode != "mfence":
                    raise GraphError(f"{e}: TSO fence must be MFENCE, got {l}")
            else:
                raise GraphError(f"{e}: unknown label kind {l.kind!r}")


_ARM_MODES = {"R": ("rlx", "Q", "A"), "W": ("rlx", "L"), "F": ("ld", "sy")}


@dataclass(frozen=True)
class ArmGraph(ExecutionGraph):
    """Execution graph over the ARMv8 alphabet."""

    def __post_init__(self):
        for e, l in self.lab_items:
            allowed = _ARM_MODES.get(l.kind)
            if allowed is None:
                raise GraphError(f"{e}: unknown label kind {l.kind!r}")
            if l.mode not in allowed:
                raise GraphError(f"{e}: mode {l.mode!r} not in ARMv8 alphabet for {l.kind}")


def check_tso(gt: TsoGraph) -> Verdict:
    if not isinstance(gt, TsoGraph):
        raise TypeError("check_tso expects a TsoGraph")
    _require_well_formed(gt)
    acc = gt.reads | gt.writes
    ppo_tso = gt.po.restrict(acc, acc) - gt.po.restrict(gt.writes, gt.reads)
    fence = gt.po.restrict(acc, gt.fences).seq(gt.po.restrict(gt.fences, acc))
    hb_tso = ppo_tso | fence | gt.rfe | gt.co | gt.fr
    return _verdict(
        [
            _completeness(gt),
            _sc_per_loc(gt),
            _acyclicity("tso-no-thin-air", hb_tso),
        ]
    )


def check_armv8(ga: ArmGraph) -> Verdict:
    if not isinstance(ga, ArmGraph):
        raise TypeError("check_armv8 expects an ArmGraph")
    _require_well_formed(ga)
    lab = ga.lab
    coi = ga.co & ga.po
    coe = ga.co - ga.po
    fre = ga.fr - ga.po
    obs = ga.rfe | fre | coe

    w_ident = identity(ga.E).restrict(ga.writes, ga.writes)
    dob = ga.data.seq(ga.rfi.opt()) | ga.data.seq(w_ident).seq(coi.opt())

    f_sy = frozenset(e for e in ga.fences if lab[e].mode == "sy")
    f_ld = frozenset(e for e in ga.fences if lab[e].mode == "ld")
    r_q = frozenset(e for e in ga.reads if lab[e].mode in ("Q", "A"))
    r_a = frozenset(e for e in ga.reads if lab[e].mode == "A")
    w_l = frozenset(e for e in ga.writes if lab[e].mode == "L")
    bob = (
        ga.po.restrict(ga.E, f_sy).seq(ga.po.restrict(f_sy, ga.E))
        | ga.po.restrict(ga.reads, f_ld).seq(ga.po.restrict(f_ld, ga.E))
        | ga.po.restrict(r_q, ga.E)
        | ga.po.restrict(ga.E, w_l).seq(coi.opt())
        | ga.po.restrict(w_l, r_a)
    )
    return _verdict(
        [
            _completeness(ga),
            _sc_per_loc(ga),
            _acyclicity("external", obs | dob | bob),
        ]
    )


# ---------------------------------------------------------------------------
# Compilation mappings

# Inserted fences need fresh identities between existing ones, so every
# mapping doubles serials: a source event (t, n) becomes (t, 2n), which
# leaves (t, 2n - 1) and (t, 2n + 1) free for a fence immediately before
# or after it.


def _assemble(
    cls,
    lab: Dict[EventId, Label],
    rf: Iterable,
    co: Iterable,
    data: Iterable,
    ppo: Iterable,
):
    carrier = frozenset(lab)
    init = sorted(e for e in lab if e[0] == 0)
    po_pairs = set()
    for i, a in enumerate(init):
        for b in init[i + 1 :]:
            po_pairs.add((a, b))
    by_tid: Dict[int, List[EventId]] = {}
    for e in carrier:
        if e[0] != 0:
            by_tid.setdefault(e[0], []).append(e)
            for ie in init:
                po_pairs.add((ie, e))
    for evs in by_tid.values():
        evs.sort()
        for i, a in enumerate(evs):
            for b in evs[i + 1 :]:
                po_pairs.add((a, b))
    return cls(
        lab_items=tuple(sorted(lab.items())),
        po=Rel(po_pairs, carrier),
        rf=Rel(rf, carrier),
        co=Rel(co, carrier),
        data=Rel(data, carrier),
        ppo=Rel(ppo, carrier),
    )


def _remap(pairs, id_map) -> set:
    return {(id_map[a], id_map[b]) for a, b in pairs}


def map_to_tso(g: ExecutionGraph, scheme: str) -> TsoGraph:
    """Compile to x86: strip annotations, fence the sc accesses.

    scheme picks where the MFENCE goes: after every sc write
    (fence-after-w) or before every sc read (fence-before-r).  sc
    fences become MFENCE either way; weaker fences are dropped, since
    x86 gives their orderings for free.
    """
    scheme = scheme.lower()
    if scheme not in TSO_SCHEMES:
        raise ValueError(f"unknown TSO scheme {scheme!r}")
    _require_well_formed(g)
    lab: Dict[EventId, Label] = {}
    id_map: Dict[EventId, EventId] = {}
    for e in g.init_events:
        lab[e] = Label("W", "plain", e[1], 0)
        id_map[e] = e
    for e in g.non_init:
        l = g.lab[e]
        t, n = e
        if l.kind == "F":
            if l.mode == "sc":
                lab[(t, 2 * n)] = MFENCE
            continue
        new = (t, 2 * n)
        id_map[e] = new
        lab[new] = Label(l.kind, "plain", l.loc, l.val)
        if scheme == "fence-after-w" and l.kind == "W" and l.mode == "sc":
            lab[(t, 2 * n + 1)] = MFENCE
        if scheme == "fence-before-r" and l.kind == "R" and l.mode == "sc":
            lab[(t, 2 * n - 1)] = MFENCE
    return _assemble(
        TsoGraph,
        lab,
        _remap(g.rf.pairs, id_map),
        _remap(g.co.pairs, id_map),
        _remap(g.data.pairs, id_map),
        _remap(g.ppo.pairs, id_map),
    )


def _arm_label(l: Label) -> Label:
    if l.kind == "R":
        if l.mode == "sc":
            return Label("R", "A", l.loc, l.val)
        if mode_geq(l.mode, "acq"):
            return Label("R", "Q", l.loc, l.val)
        return Label("R", "rlx", l.loc, l.val)
    if l.kind == "W":
        if mode_geq(l.mode, "rel"):
            return Label("W", "L", l.loc, l.val)
        return Label("W", "rlx", l.loc, l.val)
    return Label("F", "ld" if l.mode == "acq" else "sy", None, None)


def map_to_armv8(g: ExecutionGraph) -> ArmGraph:
    """Compile to ARMv8: a pure relabeling, events and edges unchanged."""
    _require_well_formed(g)
    lab = {
        e: l if e[0] == 0 else _arm_label(l) for e, l in g.lab_items
    }
    return ArmGraph(
        lab_items=tuple(sorted(lab.items())),
        po=g.po,
        rf=g.rf,
        co=g.co,
        data=g.data,
        ppo=g.ppo,
    )


def split_sc(g: ExecutionGraph) -> ExecutionGraph:
    """Rewrite sc accesses as an sc fence followed by a weaker access.

    Each sc read becomes [F^sc; R^acq] and each sc write [F^sc; W^rel];
    everything else is carried over unchanged (with doubled serials).
    A graph without sc accesses is returned as is.
    """
    _require_well_formed(g)
    if not any(
        l.kind in ("R", "W") and l.mode == "sc" for _, l in g.lab_items
    ):
        return g
    lab: Dict[EventId, Label] = {}
    id_map: Dict[EventId, EventId] = {}
    for e in g.init_events:
        lab[e] = g.lab[e]
        id_map[e] = e
    for e in g.non_init:
        l = g.lab[e]
        t, n = e
        new = (t, 2 * n)
        id_map[e] = new
        if l.kind in ("R", "W") and l.mode == "sc":
            lab[(t, 2 * n - 1)] = Label("F", "sc", None, None)
            lab[new] = Label(l.kind, "acq" if l.kind == "R" else "rel", l.loc, l.val)
        else:
            lab[new] = l
    return _assemble(
        ExecutionGraph,
        lab,
        _remap(g.rf.pairs, id_map),
        _remap(g.co.pairs, id_map),
        _remap(g.data.pairs, id_map),
        _remap(g.ppo.pairs, id_map),
    )

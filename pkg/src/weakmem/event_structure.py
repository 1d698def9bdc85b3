"""Event structures that superpose speculative executions of one program.

Where an execution graph records a single run, an event structure keeps
several alternative runs of each thread side by side: the events of a
thread form a tree of branches, and two events of the same thread that
are not ordered by program order are in conflict.  Reads carry a
justification edge (jf) from a write with the same location and value,
possibly in a branch that conflicts with the read's own justifier
elsewhere.  Writes either join an equal-writes class (ew) of a
conflicting write with identical location and value, in which case they
share that class's place in the coherence order, or they claim a fresh
slot of their own.

Events here are plain integers in construction order, initialization
writes first (one per location, sorted by name, thread 0).  po is stored
transitively closed, ew reflexively and transitively closed, and
coherence is kept as a per-location sequence of class representatives
from which the full co relation is expanded on demand.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .exec_graph import ExecutionGraph, build_graph
from .litmus_lang import Label, Program, run_thread
from .models import Verdict, _verdict
from .relational_core import Rel, identity


class StructureError(ValueError):
    """An event structure (or a hand-built candidate) breaks an invariant."""


class SemanticsError(StructureError):
    """The chosen label is not a valid next step of the thread's semantics."""


class JustificationError(StructureError):
    """A read's justifying write is missing, mismatched, or conflicting."""


class PlacementError(StructureError):
    """A write's equal-writes join or coherence slot is ill-typed."""


class ConsistencyRejected(StructureError):
    """Adding the event would leave the structure inconsistent."""


# ---------------------------------------------------------------------------
# The structure itself


@dataclass(frozen=True)
class EventStructure:
    program: Optional[Program]
    tids: Tuple[int, ...]
    labels: Tuple[Label, ...]
    po: Rel
    jf: Rel
    ew: Rel
    co_order: Tuple[Tuple[str, Tuple[int, ...]], ...]

    @cached_property
    def E(self) -> FrozenSet[int]:
        return frozenset(range(len(self.labels)))

    @cached_property
    def init_events(self) -> FrozenSet[int]:
        return frozenset(e for e in self.E if self.tids[e] == 0)

    @cached_property
    def non_init(self) -> FrozenSet[int]:
        return self.E - self.init_events

    @cached_property
    def reads(self) -> FrozenSet[int]:
        return frozenset(e for e in self.E if self.labels[e].kind == "R")

    @cached_property
    def writes(self) -> FrozenSet[int]:
        return frozenset(e for e in self.E if self.labels[e].kind == "W")

    @cached_property
    def _by_thread(self) -> Dict[int, Tuple[int, ...]]:
        grouped: Dict[int, List[int]] = {}
        for e in sorted(self.non_init):
            grouped.setdefault(self.tids[e], []).append(e)
        return {t: tuple(es) for t, es in grouped.items()}

    def thread_events(self, t: int) -> Tuple[int, ...]:
        return self._by_thread.get(t, ())

    @cached_property
    def co_map(self) -> Dict[str, Tuple[int, ...]]:
        return dict(self.co_order)

    @cached_property
    def rep_of(self) -> Dict[int, int]:
        """Class representative of every write, via the coherence slots."""
        out: Dict[int, int] = {}
        for _, reps in self.co_order:
            for r in reps:
                for member in self.ew.after(r):
                    out[member] = r
        return out

    @cached_property
    def co(self) -> Rel:
        """Full coherence: class i entirely before class j for i < j."""
        pairs = set()
        for _, reps in self.co_order:
            classes = [self.ew.after(r) for r in reps]
            for i in range(len(classes)):
                for j in range(i + 1, len(classes)):
                    pairs.update(
                        (a, b) for a in classes[i] for b in classes[j]
                    )
        return Rel(pairs, self.E)

    @cached_property
    def depth(self) -> Dict[int, int]:
        """Number of same-thread po ancestors of each event."""
        return {
            e: sum(1 for a in self.po.inv().after(e) if self.tids[a] == self.tids[e])
            for e in self.E
        }


def initial_structure(p: Program) -> EventStructure:
    """The structure holding only the initialization writes of p."""
    locs = sorted(p.locations)
    ids = range(len(locs))
    labels = tuple(Label("W", "rlx", loc, 0) for loc in locs)
    po = Rel({(i, j) for i in ids for j in ids if i < j}, ids)
    return EventStructure(
        program=p,
        tids=(0,) * len(locs),
        labels=labels,
        po=po,
        jf=Rel((), ids),
        ew=Rel({(i, i) for i in ids}, ids),
        co_order=tuple((loc, (i,)) for i, loc in enumerate(locs)),
    )


def _branch_of(s: EventStructure, e: int) -> List[int]:
    """The same-thread po chain from the thread root down to e, inclusive."""
    t = s.tids[e]
    chain = [a for a in s.po.inv().after(e) if s.tids[a] == t] + [e]
    chain.sort(key=lambda a: s.depth[a])
    return chain


def _conflicts(s: EventStructure) -> Rel:
    pairs = set()
    for events in s._by_thread.values():
        for a in events:
            for b in events:
                if a != b and (a, b) not in s.po and (b, a) not in s.po:
                    pairs.add((a, b))
    return Rel(pairs, s.E)


# ---------------------------------------------------------------------------
# Invariants and derived relations


def _check_structure(s: EventStructure) -> None:
    def fail(msg: str):
        raise StructureError(msg)

    n = len(s.labels)
    if len(s.tids) != n:
        fail("tids and labels disagree in length")
    for r in (s.po, s.jf, s.ew):
        if r.carrier != s.E:
            fail("relation carrier does not match the event set")

    init = sorted(s.init_events)
    if init != list(range(len(init))):
        fail("initialization events must come first")
    init_locs = []
    for e in init:
        l = s.labels[e]
        if l.kind != "W" or l.val != 0 or l.loc is None:
            fail(f"initialization event {e} must write 0")
        init_locs.append(l.loc)
    if init_locs != sorted(set(init_locs)):
        fail("initialization events must cover distinct locations in name order")
    for e in s.non_init:
        if s.tids[e] == 0:
            fail(f"event {e} uses the initialization thread id")
        if s.program is not None and s.tids[e] not in s.program.thread_map:
            fail(f"event {e} names an unknown thread {s.tids[e]}")
        if s.labels[e].kind not in ("R", "W", "F"):
            fail(f"event {e} has label kind {s.labels[e].kind}")

    if not s.po.irreflexive():
        fail("po must be irreflexive")
    if s.po.seq(s.po) - s.po:
        fail("po must be transitively closed")
    for i in init:
        for j in init:
            if i < j and (i, j) not in s.po:
                fail("initialization events must be mutually ordered")
        for e in s.non_init:
            if (i, e) not in s.po:
                fail("initialization must be po-before every event")
    for a, b in s.po.pairs:
        if a in s.non_init and (b in s.init_events or s.tids[a] != s.tids[b]):
            fail(f"po pair ({a}, {b}) crosses threads")

    cf = _conflicts(s)
    seen_targets: Set[int] = set()
    for w, r in s.jf.pairs:
        lw, lr = s.labels[w], s.labels[r]
        if lw.kind != "W" or lr.kind != "R":
            fail(f"jf pair ({w}, {r}) is not write-to-read")
        if lw.loc != lr.loc or lw.val != lr.val:
            fail(f"jf pair ({w}, {r}) mixes locations or values")
        if r in seen_targets:
            fail(f"read {r} has two justifications")
        seen_targets.add(r)
        if (w, r) in cf:
            fail(f"jf pair ({w}, {r}) crosses a conflict")

    for w in s.writes:
        if (w, w) not in s.ew:
            fail(f"write {w} is missing its reflexive ew pair")
    if s.ew - s.ew.inv():
        fail("ew must be symmetric")
    if s.ew.seq(s.ew) - s.ew:
        fail("ew must be transitively closed")
    for a, b in s.ew.pairs:
        if a == b:
            continue
        la, lb = s.labels[a], s.labels[b]
        if la.kind != "W" or lb.kind != "W":
            fail(f"ew pair ({a}, {b}) is not between writes")
        if la.loc != lb.loc or la.val != lb.val:
            fail(f"ew pair ({a}, {b}) mixes locations or values")
        if (a, b) not in cf:
            fail(f"ew pair ({a}, {b}) joins non-conflicting writes")

    if sorted(s.co_map) != sorted(init_locs):
        fail("coherence slots must cover exactly the declared locations")
    placed: Set[int] = set()
    for loc, reps in s.co_order:
        if not reps or s.labels[reps[0]].loc != loc or reps[0] not in s.init_events:
            fail(f"coherence order at {loc} must start with initialization")
        for r in reps:
            if s.labels[r].kind != "W" or s.labels[r].loc != loc:
                fail(f"coherence slot {r} at {loc} is not a write there")
            members = s.ew.after(r)
            if members & placed:
                fail(f"write class of {r} appears in two coherence slots")
            placed |= members
    if placed != s.writes:
        fail("coherence slots must place every write exactly once")


@dataclass(frozen=True)
class ESDerived:
    cf: Rel
    cf_imm: Rel
    po_imm: Rel
    jfe: Rel
    rf: Rel
    fr: Rel
    eco: Rel
    hb: Rel
    ecf: Rel
    vis: FrozenSet[int]


def derive_es(s: EventStructure) -> ESDerived:
    """Validate the structure and compute its derived relations.

    rf is jf widened over equal-writes classes and cut at conflicts, so a
    read can take its value from any class member visible to it.  hb is
    plain po: no synchronization is modelled at this level.
    """
    _check_structure(s)
    po = s.po
    cf = _conflicts(s)
    po_imm = po - po.seq(po)
    cf_imm = cf & po_imm.inv().seq(po_imm)
    jfe = s.jf - po
    rf = s.ew.seq(s.jf) - cf
    co = s.co
    fr = rf.inv().seq(co)
    eco = (co | rf | fr).plus()
    hb = po
    ecf = hb.inv().opt().seq(cf).seq(hb.opt())
    return ESDerived(
        cf=cf,
        cf_imm=cf_imm,
        po_imm=po_imm,
        jfe=jfe,
        rf=rf,
        fr=fr,
        eco=eco,
        hb=hb,
        ecf=ecf,
        vis=_visible(s, cf, jfe),
    )


def _visible(s: EventStructure, cf: Rel, jfe: Rel) -> FrozenSet[int]:
    """Events whose justification past resolves every conflict it crosses.

    A conflicting write feeding into e through an external justification
    must be ew-equal to some write on e's own po axis; otherwise e relies
    on a branch that can never sit in one execution with it.
    """
    reach = jfe.seq((s.po | s.jf).star())
    offending = reach & cf
    vis = set(s.E)
    for a, e in offending.pairs:
        if e not in vis:
            continue
        covered = any(
            w == e or (w, e) in s.po or (e, w) in s.po for w in s.ew.after(a)
        )
        if not covered:
            vis.discard(e)
    return frozenset(vis)


def check_es_consistent(s: EventStructure) -> Verdict:
    """Consistency of the whole structure, reported axiom by axiom."""
    d = derive_es(s)
    jf = s.jf
    checks = [
        ("cf-imm-read", d.cf_imm.dom() <= s.reads, None),
        (
            "cf-imm-justification",
            jf.seq(d.cf_imm).seq(jf.inv()).seq(s.ew).irreflexive(),
            None,
        ),
        ("ecf-irreflexive", d.ecf.irreflexive(), None),
        ("jf-ecf-empty", not (jf & d.ecf), None),
        ("jfe-visible", d.jfe.dom() <= d.vis, None),
        ("coherence", d.hb.seq(d.eco.opt()).irreflexive(), None),
    ]
    return _verdict(checks)


# ---------------------------------------------------------------------------
# Incremental construction


@dataclass(frozen=True)
class ConstructionChoice:
    """One candidate next event.

    po_predecessor of None starts a fresh branch at the thread root.
    Reads name their justifying write; writes either name a member of the
    equal-writes class they join or the write whose class they follow in
    the coherence order.
    """

    thread: int
    label: Label
    po_predecessor: Optional[int] = None
    justification: Optional[int] = None
    ew_class: Optional[int] = None
    co_after: Optional[int] = None


def _insert_after(reps: Tuple[int, ...], rep: int, new: int) -> Tuple[int, ...]:
    i = reps.index(rep)
    return reps[: i + 1] + (new,) + reps[i + 1 :]


def add_event(s: EventStructure, c: ConstructionChoice, p: Program) -> EventStructure:
    """Extend s by one event as described by c, or raise explaining why not.

    The po path to the predecessor together with the new label must
    replay as a run of the thread's semantics, the justification or
    coherence placement must be well typed, and the grown structure must
    pass check_es_consistent.
    """
    if s.program is not None and s.program != p:
        raise StructureError("structure was built for a different program")
    if c.thread not in p.thread_map:
        raise SemanticsError(f"program has no thread {c.thread}")
    instrs = p.thread(c.thread)
    if c.po_predecessor is None:
        path: List[int] = []
    else:
        pred = c.po_predecessor
        if pred not in s.E or s.tids[pred] != c.thread:
            raise SemanticsError("po predecessor must belong to the same thread")
        path = _branch_of(s, pred)
    k = len(path)
    if k >= len(instrs):
        raise SemanticsError(f"thread {c.thread} has no instruction at position {k}")
    lab = c.label

    vals = [s.labels[e].val for e in path if s.labels[e].kind == "R"]
    if lab.kind == "R":
        vals.append(lab.val)
    vals.extend([0] * max(0, p.loads_of(c.thread) - len(vals)))
    want = [l for _, l in run_thread(p, c.thread, vals).events[: k + 1]]
    for e, l in zip(path, want):
        if s.labels[e] != l:
            raise SemanticsError(
                f"po path does not replay thread {c.thread}: {s.labels[e]} vs {l}"
            )
    if want[k] != lab:
        raise SemanticsError(
            f"{lab} is not the next step of thread {c.thread}; expected {want[k]}"
        )

    new = len(s.labels)
    carrier = range(new + 1)
    onpath = set(path)
    # Everything of this thread off the chosen branch will conflict with
    # the new event.
    rivals = {e for e in s.thread_events(c.thread) if e not in onpath}

    def grown(r: Rel, extra: Iterable[Tuple[int, int]] = ()) -> Rel:
        return Rel(set(r.pairs) | set(extra), carrier)

    po2 = grown(
        s.po,
        [(i, new) for i in s.init_events] + [(a, new) for a in path],
    )
    jf2, ew2, order2 = grown(s.jf), grown(s.ew), s.co_order

    if lab.kind == "R":
        if c.ew_class is not None or c.co_after is not None:
            raise PlacementError("reads take a justification, not a coherence slot")
        j = c.justification
        if j is None:
            raise JustificationError("a read needs a justifying write")
        if j not in s.E or s.labels[j].kind != "W":
            raise JustificationError(f"justification {j} is not a write")
        if s.labels[j].loc != lab.loc or s.labels[j].val != lab.val:
            raise JustificationError(
                "justifying write must match the read's location and value"
            )
        if j in rivals:
            raise JustificationError("justification conflicts with the new event")
        jf2 = grown(s.jf, [(j, new)])
    elif lab.kind == "W":
        if c.justification is not None:
            raise PlacementError("writes take no justification")
        if (c.ew_class is None) == (c.co_after is None):
            raise PlacementError("a write needs exactly one of ew_class or co_after")
        if c.ew_class is not None:
            m = c.ew_class
            if m not in s.E or s.labels[m].kind != "W":
                raise PlacementError(f"ew_class {m} is not a write")
            if s.labels[m].loc != lab.loc or s.labels[m].val != lab.val:
                raise PlacementError(
                    "equal-writes classes need identical location and value"
                )
            members = s.ew.after(m)
            if not members <= rivals:
                raise PlacementError("equal-writes classes join conflicting writes only")
            ew2 = grown(
                s.ew,
                {(new, new)}
                | {(x, new) for x in members}
                | {(new, x) for x in members},
            )
        else:
            a = c.co_after
            if a not in s.E or s.labels[a].kind != "W" or s.labels[a].loc != lab.loc:
                raise PlacementError("co_after must be a write at the same location")
            rep = s.rep_of[a]
            ew2 = grown(s.ew, [(new, new)])
            order2 = tuple(
                (loc, _insert_after(reps, rep, new) if loc == lab.loc else reps)
                for loc, reps in s.co_order
            )
    else:  # fence
        if c.justification is not None or c.ew_class is not None or c.co_after is not None:
            raise PlacementError("fences take no justification or coherence slot")

    s2 = EventStructure(
        program=p,
        tids=s.tids + (c.thread,),
        labels=s.labels + (lab,),
        po=po2,
        jf=jf2,
        ew=ew2,
        co_order=order2,
    )
    assert (s2.po | s2.jf).acyclic()
    v = check_es_consistent(s2)
    if not v:
        raise ConsistencyRejected(f"rejected by {', '.join(v.violated)}")
    return s2


# ---------------------------------------------------------------------------
# Enumeration up to renaming


def _parent_of(s: EventStructure, e: int) -> Optional[int]:
    t = s.tids[e]
    best = None
    for a in s.po.inv().after(e):
        if s.tids[a] != t:
            continue
        if best is None or (best, a) in s.po:
            best = a
    return best


def _forest(s: EventStructure, t: int):
    """Roots and child lists of one thread's immediate-po tree."""
    children: Dict[int, List[int]] = {e: [] for e in s.thread_events(t)}
    roots: List[int] = []
    for e in s.thread_events(t):
        parent = _parent_of(s, e)
        (roots if parent is None else children[parent]).append(e)
    return roots, children


def _extension_choices(s, p, max_forks):
    for t in p.thread_ids:
        instrs = p.thread(t)
        roots, children = _forest(s, t)
        leaves = [e for e in s.thread_events(t) if not children[e]]
        forks_left = max_forks - max(0, len(leaves) - 1)

        points = []  # (po predecessor, instruction position, opens a fork)
        if not roots:
            points.append((None, 0, False))
        else:
            points.extend((leaf, s.depth[leaf] + 1, False) for leaf in leaves)
            if forks_left > 0:
                points.append((None, 0, True))
                points.extend(
                    (e, s.depth[e] + 1, True) for e in children if children[e]
                )

        for pred, k, is_fork in points:
            if k >= len(instrs):
                continue
            ins = instrs[k]
            # A forked sibling is immediately conflicting with its twin,
            # which consistency only tolerates between reads.
            if is_fork and ins.kind != "load":
                continue
            path = _branch_of(s, pred) if pred is not None else []
            onpath = set(path)
            rivals = set(s.thread_events(t)) - onpath
            if ins.kind == "load":
                for w in sorted(s.writes):
                    if s.labels[w].loc != ins.location:
                        continue
                    if s.tids[w] == t and w not in onpath:
                        continue  # would be a conflicting justification
                    lab = Label("R", ins.mode, ins.location, s.labels[w].val)
                    yield ConstructionChoice(t, lab, pred, justification=w)
            elif ins.kind == "store":
                vals = [s.labels[e].val for e in path if s.labels[e].kind == "R"]
                vals.extend([0] * (p.loads_of(t) - len(vals)))
                lab = run_thread(p, t, vals).events[k][1]
                joinable = set()
                for m in s.writes:
                    if (
                        m in rivals
                        and s.labels[m].loc == lab.loc
                        and s.labels[m].val == lab.val
                        and s.ew.after(m) <= rivals
                    ):
                        joinable.add(s.rep_of[m])
                for rep in sorted(joinable):
                    yield ConstructionChoice(t, lab, pred, ew_class=rep)
                for rep in s.co_map[lab.loc]:
                    yield ConstructionChoice(t, lab, pred, co_after=rep)
            else:
                yield ConstructionChoice(t, Label("F", ins.mode), pred)


def _preorders(siblings: Sequence[int], children) -> List[Tuple[int, ...]]:
    """Every pre-order traversal of a sibling forest, one per ordering."""
    if not siblings:
        return [()]
    out = []
    for perm in itertools.permutations(siblings):
        parts = [
            [(e,) + rest for rest in _preorders(children[e], children)] for e in perm
        ]
        for combo in itertools.product(*parts):
            out.append(tuple(itertools.chain.from_iterable(combo)))
    return out


def _label_key(l: Label):
    return (l.kind, l.mode, l.loc or "", -1 if l.val is None else l.val)


def _canonical_key(s: EventStructure):
    """Least serialization over per-thread sibling reorderings.

    Two structures that differ only in the order events were added get
    the same key.  Coherence classes are named by their smallest renamed
    member so the key does not depend on which member was added first.
    """
    init = sorted(s.init_events)
    per_thread = [
        _preorders(_forest(s, t)[0], _forest(s, t)[1])
        for t in sorted(s._by_thread)
    ]
    best = None
    for combo in itertools.product(*per_thread):
        order = init + [e for seq in combo for e in seq]
        r = {old: new for new, old in enumerate(order)}
        sig = (
            tuple(s.tids[e] for e in order),
            tuple(_label_key(s.labels[e]) for e in order),
            tuple(sorted((r[a], r[b]) for a, b in s.po.pairs)),
            tuple(sorted((r[a], r[b]) for a, b in s.jf.pairs)),
            tuple(sorted((r[a], r[b]) for a, b in s.ew.pairs)),
            tuple(
                (loc, tuple(min(r[x] for x in s.ew.after(rep)) for rep in reps))
                for loc, reps in s.co_order
            ),
        )
        if best is None or sig < best:
            best = sig
    return best


def enumerate_structures(
    p: Program, max_events: int, *, max_forks_per_thread: int = 2
) -> Set[EventStructure]:
    """All consistent structures reachable by add_event, up to renaming.

    max_events bounds the non-initialization event count.  Each thread
    may open at most max_forks_per_thread extra branches, which keeps the
    walk finite without cutting off the interesting speculations.
    """
    s0 = initial_structure(p)
    seen = {_canonical_key(s0): s0}
    stack = [s0]
    while stack:
        s = stack.pop()
        if len(s.non_init) >= max_events:
            continue
        for c in _extension_choices(s, p, max_forks_per_thread):
            try:
                s2 = add_event(s, c, p)
            except ConsistencyRejected:
                continue
            key = _canonical_key(s2)
            if key not in seen:
                seen[key] = s2
                stack.append(s2)
    return set(seen.values())


# ---------------------------------------------------------------------------
# Extraction of executions


def _maximal_chains(s: EventStructure, events: Sequence[int]) -> List[FrozenSet[int]]:
    """Maximal pairwise-po-comparable subsets of one thread's events."""
    chains = []
    for mask in range(1, 1 << len(events)):
        sub = [e for i, e in enumerate(events) if mask >> i & 1]
        if all(
            a == b or (a, b) in s.po or (b, a) in s.po for a in sub for b in sub
        ):
            chains.append(frozenset(sub))
    return [c for c in chains if not any(c < other for other in chains)]


def extract_candidates(s: EventStructure) -> Set[FrozenSet[int]]:
    """Maximal conflict-free subsets that form self-contained executions.

    A candidate must justify every read from inside itself, stay within
    the visible events, and be closed under happens-before.
    """
    d = derive_es(s)
    per_thread = [
        _maximal_chains(s, s.thread_events(t)) for t in sorted(s._by_thread)
    ]
    out: Set[FrozenSet[int]] = set()
    for combo in itertools.product(*per_thread):
        x = frozenset(s.init_events) | frozenset(itertools.chain.from_iterable(combo))
        if not all(
            any(w in x for w in d.rf.inv().after(r))
            for r in x
            if s.labels[r].kind == "R"
        ):
            continue
        if not x <= d.vis:
            continue
        if not all(d.hb.inv().after(e) <= x for e in x):
            continue
        out.add(x)
    return out


def associated_graph(s: EventStructure, x: Iterable[int]) -> ExecutionGraph:
    """The execution graph a candidate set denotes.

    Events are renumbered (tid, serial) along each thread's chain;
    dependencies are replayed from the program when the structure knows
    it, so ppo comes out syntactic exactly as in directly built graphs.
    """
    x = frozenset(x)
    if x not in extract_candidates(s):
        raise StructureError("not an extraction candidate of this structure")
    d = derive_es(s)
    id_map = {e: (0, s.labels[e].loc) for e in s.init_events}
    thread_labels: Dict[int, List[Label]] = {}
    for t in sorted({s.tids[e] for e in x if s.tids[e] != 0}):
        chain = sorted((e for e in x if s.tids[e] == t), key=lambda e: s.depth[e])
        thread_labels[t] = [s.labels[e] for e in chain]
        for i, e in enumerate(chain, start=1):
            id_map[e] = (t, i)

    def remap(relation: Rel):
        return [
            (id_map[a], id_map[b])
            for a, b in relation.pairs
            if a in x and b in x
        ]

    data_pairs: List[Tuple[tuple, tuple]] = []
    if s.program is not None:
        for t, labs in thread_labels.items():
            vals = [l.val for l in labs if l.kind == "R"]
            vals.extend([0] * max(0, s.program.loads_of(t) - len(vals)))
            trace = run_thread(s.program, t, vals)
            data_pairs.extend(
                (a, b)
                for a, b in trace.data.pairs
                if a[1] <= len(labs) and b[1] <= len(labs)
            )
    locations = [s.labels[e].loc for e in sorted(s.init_events)]
    return build_graph(thread_labels, locations, remap(d.rf), remap(s.co), data_pairs)


# ---------------------------------------------------------------------------
# Rendering


def to_json(s: EventStructure) -> dict:
    d = derive_es(s)

    def edges(relation: Rel):
        return [[a, b] for a, b in sorted(relation.pairs)]

    events = []
    for e in sorted(s.E):
        l = s.labels[e]
        entry = {"id": e, "tid": s.tids[e], "kind": l.kind, "mode": l.mode}
        if l.loc is not None:
            entry["loc"] = l.loc
            entry["val"] = l.val
        events.append(entry)
    return {
        "events": events,
        "po": edges(s.po),
        "rf": edges(d.rf),
        "co": edges(s.co),
        "jf": edges(s.jf),
        "ew": edges(s.ew - identity(s.E)),
        "cf": edges(d.cf),
    }


def to_dot(s: EventStructure) -> str:
    """DOT rendering: conflicts dashed, equal-writes classes double-lined."""
    d = derive_es(s)
    lines = [
        "digraph structure {",
        "  rankdir=TB;",
        '  node [shape=box, fontname="monospace"];',
        '  init [label="Init"];',
    ]
    for e in sorted(s.non_init):
        lines.append(f'  n{e} [label="{e}@{s.tids[e]}: {s.labels[e]}"];')

    def node(e):
        return "init" if e in s.init_events else f"n{e}"

    def emit(relation: Rel, attrs: str, undirected: bool = False):
        seen = set()
        for a, b in sorted(relation.pairs):
            edge = (node(a), node(b))
            if edge[0] == edge[1] or edge in seen:
                continue
            seen.add(edge)
            if undirected:
                seen.add((edge[1], edge[0]))
            lines.append(f"  {edge[0]} -> {edge[1]} [{attrs}];")

    emit(d.po_imm, "color=black")
    emit(s.jf, 'color=darkgreen, label="jf", fontcolor=darkgreen')
    emit(
        d.cf_imm,
        'style=dashed, dir=none, color=gray40, label="cf", fontcolor=gray40',
        undirected=True,
    )
    emit(
        s.ew - identity(s.E),
        'color="black:invis:black", dir=none, label="ew"',
        undirected=True,
    )
    lines.append("}")
    return "\n".join(lines)

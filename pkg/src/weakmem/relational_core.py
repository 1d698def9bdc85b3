"""Finite binary relations over event identifiers.

Memory-model axioms are phrased in a small relational algebra:
sequential composition, closures, restriction by event classes,
acyclicity.  This module is that vocabulary over explicit finite
carriers.  Carriers are explicit so that an empty relation still knows
which events it ranges over and composition of relations from different
graphs is rejected instead of silently producing nonsense.

Event identifiers are ``(tid, serial)`` pairs: real events carry a
1-based integer serial inside their thread, initialization events use
tid 0 with the location name in the serial slot.  Event structures use
bare construction-order integers instead.  The algebra only needs
identifiers to be hashable, and mutually sortable within one carrier.
"""

from __future__ import annotations

from collections import deque
from typing import FrozenSet, Hashable, Iterable, Iterator, Optional, Tuple

EventId = Hashable
EventSet = FrozenSet[EventId]
Pair = Tuple[EventId, EventId]


class RelError(ValueError):
    """Structural misuse of the algebra: carrier mismatch, stray pairs."""


class Rel:
    """An immutable binary relation over a fixed finite carrier."""

    __slots__ = ("pairs", "carrier", "_succ", "_hash")

    def __init__(self, pairs: Iterable[Pair], carrier: Iterable[EventId]):
        carrier = frozenset(carrier)
        pairs = frozenset(pairs)
        for a, b in pairs:
            if a not in carrier or b not in carrier:
                raise RelError(f"pair {(a, b)!r} outside carrier")
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "_succ", None)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Rel is immutable")

    # -- plumbing ---------------------------------------------------------

    def _successors(self):
        # adjacency map, built lazily and cached
        if self._succ is None:
            succ = {}
            for a, b in self.pairs:
                succ.setdefault(a, set()).add(b)
            object.__setattr__(self, "_succ", succ)
        return self._succ

    def after(self, e: EventId) -> frozenset:
        """Events directly reachable from e."""
        return frozenset(self._successors().get(e, ()))

    def __contains__(self, pair: Pair) -> bool:
        return pair in self.pairs

    def __iter__(self) -> Iterator[Pair]:
        return iter(sorted(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __bool__(self) -> bool:
        return bool(self.pairs)

    def __eq__(self, other) -> bool:
        # extensional: same carrier, same pairs
        if not isinstance(other, Rel):
            return NotImplemented
        return self.carrier == other.carrier and self.pairs == other.pairs

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.pairs, self.carrier)))
        return self._hash

    def __repr__(self) -> str:
        return f"Rel({sorted(self.pairs)!r}, carrier={len(self.carrier)} events)"

    def _same_carrier(self, other: "Rel") -> None:
        if self.carrier != other.carrier:
            raise RelError("carrier mismatch")

    def _with(self, pairs) -> "Rel":
        return Rel(pairs, self.carrier)

    # -- algebra ----------------------------------------------------------

    def seq(self, other: "Rel") -> "Rel":
        """Sequential composition a;b."""
        self._same_carrier(other)
        succ = other._successors()
        out = set()
        for a, b in self.pairs:
            for c in succ.get(b, ()):
                out.add((a, c))
        return self._with(out)

    def inv(self) -> "Rel":
        return self._with((b, a) for a, b in self.pairs)

    def opt(self) -> "Rel":
        """R? = R plus the identity on the carrier."""
        return self._with(self.pairs | {(e, e) for e in self.carrier})

    def plus(self) -> "Rel":
        """Transitive closure, by reachability from each event."""
        succ = self._successors()
        out = set()
        for start in succ:
            seen = set()
            stack = list(succ.get(start, ()))
            while stack:
                node = stack.pop()
                if node in seen:
                    continue
                seen.add(node)
                stack.extend(succ.get(node, ()))
            out.update((start, b) for b in seen)
        return self._with(out)

    def star(self) -> "Rel":
        return self.plus().opt()

    def union(self, other: "Rel") -> "Rel":
        self._same_carrier(other)
        return self._with(self.pairs | other.pairs)

    def inter(self, other: "Rel") -> "Rel":
        self._same_carrier(other)
        return self._with(self.pairs & other.pairs)

    def minus(self, other: "Rel") -> "Rel":
        self._same_carrier(other)
        return self._with(self.pairs - other.pairs)

    __or__ = union
    __and__ = inter
    __sub__ = minus

    def restrict(self, dom_set: Iterable[EventId], cod_set: Iterable[EventId]) -> "Rel":
        """[A];R;[B]: keep pairs starting in A and ending in B."""
        dom_set = frozenset(dom_set)
        cod_set = frozenset(cod_set)
        return self._with(
            (a, b) for a, b in self.pairs if a in dom_set and b in cod_set
        )

    def dom(self) -> frozenset:
        return frozenset(a for a, _ in self.pairs)

    def ran(self) -> frozenset:
        return frozenset(b for _, b in self.pairs)

    def irreflexive(self) -> bool:
        return all(a != b for a, b in self.pairs)

    def acyclic(self) -> bool:
        return self.plus().irreflexive()

    def filter(self, pred) -> "Rel":
        return self._with(p for p in self.pairs if pred(*p))


def rel(pairs: Iterable[Pair], carrier: Iterable[EventId]) -> Rel:
    return Rel(pairs, carrier)


def empty(carrier: Iterable[EventId]) -> Rel:
    return Rel((), carrier)


def identity(carrier: Iterable[EventId]) -> Rel:
    carrier = frozenset(carrier)
    return Rel(((e, e) for e in carrier), carrier)


def full(dom_set: Iterable[EventId], cod_set: Iterable[EventId], carrier) -> Rel:
    """Cartesian product A x B as a relation on the carrier."""
    dom_set = frozenset(dom_set)
    cod_set = frozenset(cod_set)
    return Rel(((a, b) for a in dom_set for b in cod_set), carrier)


def compose(a: Rel, b: Rel) -> Rel:
    return a.seq(b)


_CLOSURE_KINDS = ("reflexive", "transitive", "refl-transitive", "reflexive-of")


def closure(a: Rel, kind: str) -> Rel:
    """Closure of the given kind; ``reflexive-of`` is the R? shorthand."""
    if kind in ("reflexive", "reflexive-of"):
        return a.opt()
    if kind == "transitive":
        return a.plus()
    if kind == "refl-transitive":
        return a.star()
    raise RelError(f"unknown closure kind {kind!r}, expected one of {_CLOSURE_KINDS}")


def is_acyclic(a: Rel) -> bool:
    return a.acyclic()


def restrict(a: Rel, dom_set: Iterable[EventId], cod_set: Iterable[EventId]) -> Rel:
    return a.restrict(dom_set, cod_set)


def shortest_cycle(a: Rel) -> Optional[Tuple[EventId, ...]]:
    """A shortest cycle in a, or None if a is acyclic.

    Returned as a tuple (e1, ..., ek) with each consecutive pair in a
    and (ek, e1) in a as well.  Deterministic: among shortest cycles the
    one with the least starting event is picked, and BFS expands
    neighbors in sorted order, so diagnostics are stable across runs.
    """
    succ = a._successors()
    for start in sorted(succ):
        if start in succ.get(start, ()):
            # a self-loop is a length-1 cycle, nothing can beat it
            return (start,)
    best: Optional[Tuple[EventId, ...]] = None
    for start in sorted(succ):
        # BFS for the shortest path start -> start of length >= 2
        parent = {}
        queue = deque()
        for nxt in sorted(succ.get(start, ())):
            parent.setdefault(nxt, None)
            queue.append(nxt)
        found = None
        while queue and found is None:
            node = queue.popleft()
            for nxt in sorted(succ.get(node, ())):
                if nxt == start:
                    found = node
                    break
                if nxt not in parent:
                    parent[nxt] = node
                    queue.append(nxt)
        if found is not None:
            path = [found]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            path.append(start)
            path.reverse()
            cand = tuple(path)
            if best is None or len(cand) < len(best):
                best = cand
    return best

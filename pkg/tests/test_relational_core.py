"""Relation algebra tests.

Oracles first: independent reimplementations of composition, closure,
cycle search and restriction that the Rel operations are compared
against, then the algebraic laws, exhaustively on a 2-event carrier and
randomized up to 5 events.
"""

from __future__ import annotations

import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

import pytest

from weakmem.relational_core import (
    Rel,
    RelError,
    closure,
    compose,
    empty,
    identity,
    is_acyclic,
    rel,
    restrict,
    shortest_cycle,
)

# ---------------------------------------------------------------------------
# Oracles


def oracle_compose(a_pairs, b_pairs):
    """Composition by brute force over all pairs of pairs."""
    return {(x, z) for (x, y) in a_pairs for (y2, z) in b_pairs if y == y2}


def oracle_transitive(pairs, carrier):
    """Transitive closure by boolean matrix powers."""
    order = sorted(carrier)
    index = {e: i for i, e in enumerate(order)}
    n = len(order)
    mat = [[False] * n for _ in range(n)]
    for a, b in pairs:
        mat[index[a]][index[b]] = True
    result = [row[:] for row in mat]
    power = [row[:] for row in mat]
    for _ in range(n):
        nxt = [[False] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                nxt[i][j] = any(power[i][k] and mat[k][j] for k in range(n))
        power = nxt
        for i in range(n):
            for j in range(n):
                result[i][j] = result[i][j] or power[i][j]
    return {
        (order[i], order[j]) for i in range(n) for j in range(n) if result[i][j]
    }


def oracle_acyclic(pairs):
    """Cycle search by plain DFS with a three-color marking."""
    succ = {}
    for a, b in pairs:
        succ.setdefault(a, []).append(b)
    state = {}  # missing = white, 1 = on stack, 2 = done

    def visit(node):
        state[node] = 1
        for nxt in succ.get(node, ()):
            mark = state.get(nxt)
            if mark == 1:
                return False
            if mark is None and not visit(nxt):
                return False
        state[node] = 2
        return True

    return all(state.get(n) == 2 or visit(n) for n in list(succ))


def oracle_restrict(pairs, dom_set, cod_set):
    return {(a, b) for a, b in pairs if a in dom_set and b in cod_set}


def oracle_shortest_cycle_length(pairs, carrier):
    """Minimal cycle length by trying all simple event sequences."""
    pairs = set(pairs)
    for length in range(1, len(carrier) + 1):
        for seq in itertools.permutations(sorted(carrier), length):
            edges = list(zip(seq, seq[1:])) + [(seq[-1], seq[0])]
            if all(e in pairs for e in edges):
                return length
    return None


# ---------------------------------------------------------------------------
# Strategies

carriers = st.integers(min_value=1, max_value=5).map(
    lambda n: frozenset(range(1, n + 1))
)


def pairs_on(carrier):
    events = st.sampled_from(sorted(carrier))
    return st.frozensets(st.tuples(events, events))


rel_and_carrier = carriers.flatmap(
    lambda c: st.tuples(st.just(c), pairs_on(c))
)
two_rels = carriers.flatmap(
    lambda c: st.tuples(st.just(c), pairs_on(c), pairs_on(c))
)
three_rels = carriers.flatmap(
    lambda c: st.tuples(st.just(c), pairs_on(c), pairs_on(c), pairs_on(c))
)


def all_rels(carrier):
    """Every relation on the carrier (exhaustive, keep carriers tiny)."""
    cells = sorted((a, b) for a in carrier for b in carrier)
    for bits in itertools.product((False, True), repeat=len(cells)):
        yield frozenset(c for c, bit in zip(cells, bits) if bit)


# ---------------------------------------------------------------------------
# compose


def test_compose_definition_instance():
    carrier = {1, 2, 3}
    a = rel({(1, 2)}, carrier)
    b = rel({(2, 3)}, carrier)
    assert compose(a, b).pairs == {(1, 3)}


def test_compose_identity_unit_exhaustive():
    carrier = frozenset({1, 2})
    ident = identity(carrier)
    for pairs in all_rels(carrier):
        r = rel(pairs, carrier)
        assert compose(r, ident) == r
        assert compose(ident, r) == r


def test_compose_carrier_mismatch_rejected():
    a = rel({(1, 2)}, {1, 2})
    b = rel({(2, 3)}, {1, 2, 3})
    with pytest.raises(RelError):
        compose(a, b)


@given(two_rels)
def test_compose_matches_pairwise_oracle(data):
    carrier, ap, bp = data
    got = compose(rel(ap, carrier), rel(bp, carrier))
    assert got.pairs == oracle_compose(ap, bp)


def test_compose_associative_exhaustive_size2():
    carrier = frozenset({1, 2})
    rels = [rel(p, carrier) for p in all_rels(carrier)]
    for a, b, c in itertools.product(rels, repeat=3):
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


@given(three_rels)
def test_compose_associative_random(data):
    carrier, ap, bp, cp = data
    a, b, c = (rel(p, carrier) for p in (ap, bp, cp))
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


# ---------------------------------------------------------------------------
# closure


def test_transitive_closure_instance():
    r = rel({(1, 2), (2, 3)}, {1, 2, 3})
    assert closure(r, "transitive").pairs == {(1, 2), (2, 3), (1, 3)}


def test_refl_transitive_of_empty_is_identity():
    r = empty({1, 2})
    assert closure(r, "refl-transitive") == identity({1, 2})


def test_reflexive_kinds_add_identity():
    r = rel({(1, 2)}, {1, 2})
    expected = {(1, 2), (1, 1), (2, 2)}
    assert closure(r, "reflexive").pairs == expected
    assert closure(r, "reflexive-of").pairs == expected


def test_unknown_closure_kind_rejected():
    with pytest.raises(RelError):
        closure(empty({1}), "symmetric")


@given(rel_and_carrier)
def test_transitive_closure_matches_matrix_oracle(data):
    carrier, pairs = data
    got = closure(rel(pairs, carrier), "transitive")
    assert got.pairs == oracle_transitive(pairs, carrier)


def test_transitive_closure_matches_oracle_six_events():
    # the derived example pins carriers up to 6
    carrier = frozenset(range(1, 7))
    pairs = frozenset({(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (2, 5)})
    got = closure(rel(pairs, carrier), "transitive")
    assert got.pairs == oracle_transitive(pairs, carrier)


def test_transitive_closure_idempotent_exhaustive_size3():
    carrier = frozenset({1, 2, 3})
    for pairs in all_rels(carrier):
        once = closure(rel(pairs, carrier), "transitive")
        assert closure(once, "transitive") == once


@given(rel_and_carrier)
def test_transitive_closure_idempotent_random(data):
    carrier, pairs = data
    once = closure(rel(pairs, carrier), "transitive")
    assert closure(once, "transitive") == once


# ---------------------------------------------------------------------------
# is_acyclic


def test_two_cycle_not_acyclic():
    assert not is_acyclic(rel({(1, 2), (2, 1)}, {1, 2}))


def test_empty_acyclic():
    assert is_acyclic(empty({1, 2, 3}))


@given(rel_and_carrier)
def test_acyclic_matches_dfs_oracle(data):
    carrier, pairs = data
    assert is_acyclic(rel(pairs, carrier)) == oracle_acyclic(pairs)


def test_acyclic_matches_oracle_seven_events():
    carrier = frozenset(range(1, 8))
    pairs = frozenset({(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 3)})
    assert is_acyclic(rel(pairs, carrier)) == oracle_acyclic(pairs) == False  # noqa: E712


def test_acyclic_iff_closure_meets_identity_exhaustive_size3():
    carrier = frozenset({1, 2, 3})
    for pairs in all_rels(carrier):
        r = rel(pairs, carrier)
        tc = closure(r, "transitive")
        assert is_acyclic(r) == (not tc.inter(identity(carrier)).pairs)


# ---------------------------------------------------------------------------
# restrict


def test_restrict_instance():
    r = rel({(1, 2), (2, 3)}, {1, 2, 3})
    assert restrict(r, {1}, {2, 3}).pairs == {(1, 2)}


def test_restrict_empty_domain():
    r = rel({(1, 2), (2, 3)}, {1, 2, 3})
    assert restrict(r, set(), {1, 2, 3}).pairs == frozenset()


@given(rel_and_carrier, st.data())
def test_restrict_matches_filter_oracle(data, picker):
    carrier, pairs = data
    dom_set = picker.draw(st.frozensets(st.sampled_from(sorted(carrier))))
    cod_set = picker.draw(st.frozensets(st.sampled_from(sorted(carrier))))
    got = restrict(rel(pairs, carrier), dom_set, cod_set)
    assert got.pairs == oracle_restrict(pairs, dom_set, cod_set)


def test_restrict_is_subset_exhaustive_size3():
    carrier = frozenset({1, 2, 3})
    subsets = [frozenset(s) for n in range(4) for s in itertools.combinations(carrier, n)]
    for pairs in all_rels(carrier):
        r = rel(pairs, carrier)
        for a in subsets:
            for b in subsets:
                assert restrict(r, a, b).pairs <= r.pairs


# ---------------------------------------------------------------------------
# shortest_cycle


def test_shortest_cycle_none_when_acyclic():
    assert shortest_cycle(rel({(1, 2), (2, 3)}, {1, 2, 3})) is None


def test_shortest_cycle_self_loop_wins():
    r = rel({(1, 2), (2, 1), (3, 3)}, {1, 2, 3})
    assert shortest_cycle(r) == (3,)


def test_shortest_cycle_is_deterministic_and_least_start():
    r = rel({(2, 3), (3, 2), (1, 4), (4, 1)}, {1, 2, 3, 4})
    # two 2-cycles, the one through the least event is reported
    assert shortest_cycle(r) == (1, 4)


@given(rel_and_carrier)
@settings(max_examples=60)
def test_shortest_cycle_verifiable_and_minimal(data):
    carrier, pairs = data
    r = rel(pairs, carrier)
    cyc = shortest_cycle(r)
    expected_len = oracle_shortest_cycle_length(pairs, carrier)
    if expected_len is None:
        assert cyc is None
        assert is_acyclic(r)
    else:
        assert cyc is not None
        assert len(cyc) == expected_len
        edges = list(zip(cyc, cyc[1:])) + [(cyc[-1], cyc[0])]
        for e in edges:
            assert e in r


# ---------------------------------------------------------------------------
# misc structure


def test_pairs_outside_carrier_rejected():
    with pytest.raises(RelError):
        rel({(1, 9)}, {1, 2})


def test_rel_is_immutable():
    r = rel({(1, 2)}, {1, 2})
    with pytest.raises(AttributeError):
        r.pairs = frozenset()


def test_extensional_equality():
    a = rel([(1, 2), (1, 2)], {1, 2})
    b = rel([(1, 2)], {1, 2})
    assert a == b and hash(a) == hash(b)
    assert a != rel([(1, 2)], {1, 2, 3})


def test_inv_opt_dom_ran():
    r = rel({(1, 2), (2, 3)}, {1, 2, 3})
    assert r.inv().pairs == {(2, 1), (3, 2)}
    assert r.opt().pairs == {(1, 2), (2, 3), (1, 1), (2, 2), (3, 3)}
    assert r.dom() == {1, 2}
    assert r.ran() == {2, 3}

"""Execution-graph derivation tests.

The eco oracle recomputes extended coherence by its closed form
rf ∪ co;rf? ∪ fr;rf? and the derive result must agree with the
transitive-closure definition on every enumerated graph.
"""

from __future__ import annotations

import dataclasses

import pytest

import _progs
from weakmem.exec_graph import (
    DerivedRels,
    ExecutionGraph,
    GraphError,
    build_graph,
    derive,
    dot_edge_count,
    mode_geq,
    to_dot,
    to_json,
    well_formed,
    well_formed_diagnostics,
)
from weakmem.litmus_lang import Label, enumerate_executions, parse_litmus
from weakmem.relational_core import Rel


def glb():
    """The load-buffering candidate where both reads return 1."""
    p = parse_litmus(_progs.LB)
    (g,) = [
        g
        for g in enumerate_executions(p)
        if ((2, 2), (1, 1)) in g.rf.pairs and ((1, 2), (2, 1)) in g.rf.pairs
    ]
    return g


def eco_closed_form(g: ExecutionGraph) -> Rel:
    fr = g.fr
    return g.rf | g.co.seq(g.rf.opt()) | fr.seq(g.rf.opt())


# ---------------------------------------------------------------------------
# mode lattice


def test_mode_lattice():
    assert mode_geq("sc", "rel") and mode_geq("sc", "acq")
    assert mode_geq("acqrel", "rel") and mode_geq("acqrel", "acq")
    assert mode_geq("rel", "rel") and not mode_geq("rel", "acq")
    assert mode_geq("acq", "acq") and not mode_geq("acq", "rel")
    assert not mode_geq("rlx", "rel") and not mode_geq("rlx", "acq")
    assert mode_geq("sc", "sc") and not mode_geq("acqrel", "sc")


# ---------------------------------------------------------------------------
# well_formed


def test_glb_well_formed():
    assert well_formed(glb())


def test_removing_rf_keeps_well_formed():
    g = glb()
    trimmed = dataclasses.replace(g, rf=Rel([((1, 2), (2, 1))], g.E))
    # completeness is a model axiom, not a structural one
    assert well_formed(trimmed)


def test_duplicate_rf_source_rejected():
    labels = {1: [Label("W", "rlx", "x", 1)], 2: [Label("W", "rlx", "x", 1)], 3: [Label("R", "rlx", "x", 1)]}
    g = build_graph(
        labels,
        {"x"},
        rf_pairs={((1, 1), (3, 1)), ((2, 1), (3, 1))},
        co_pairs={((0, "x"), (1, 1)), ((0, "x"), (2, 1)), ((1, 1), (2, 1))},
        data_pairs=set(),
    )
    diags = well_formed_diagnostics(g)
    assert any("two rf sources" in d for d in diags)


def test_unordered_co_pair_rejected():
    g = glb()
    missing = dataclasses.replace(g, co=Rel([], g.E))
    diags = well_formed_diagnostics(missing)
    assert any("co not total" in d for d in diags)


def test_rf_value_mismatch_rejected():
    labels = {1: [Label("W", "rlx", "x", 1)], 2: [Label("R", "rlx", "x", 0)]}
    g = build_graph(
        labels, {"x"}, {((1, 1), (2, 1))}, {((0, "x"), (1, 1))}, set()
    )
    assert not well_formed(g)


def test_derive_raises_on_ill_formed():
    g = glb()
    bad = dataclasses.replace(g, co=Rel([], g.E))
    with pytest.raises(GraphError):
        derive(bad)


# ---------------------------------------------------------------------------
# derived relations


def test_glb_eco_examples():
    g = glb()
    d = derive(g)
    assert (((1, 2), (2, 1))) in d.eco  # via rf
    assert (((0, "x"), (2, 2))) in d.eco  # via co


def test_eco_closed_form_on_all_lb_family_graphs():
    for src in (_progs.LB, _progs.LB_DATA, _progs.LB_FAKE, _progs.SB, _progs.MP_RA):
        p = parse_litmus(src)
        for g in enumerate_executions(p):
            d = derive(g)
            assert d.eco == eco_closed_form(g)


def test_no_sc_graph_has_empty_psc():
    g = glb()
    d = derive(g)
    assert not d.psc_base and not d.psc_f


def test_hb_transitive_and_contains_po():
    for g in enumerate_executions(parse_litmus(_progs.MP_RA)):
        d = derive(g)
        assert g.po.pairs <= d.hb.pairs
        assert d.hb.seq(d.hb).pairs <= d.hb.pairs


def test_sw_needs_release_and_acquire():
    p = parse_litmus(_progs.MP_RA)
    seen_sw = False
    for g in enumerate_executions(p):
        d = derive(g)
        for w, r in d.sw.pairs:
            assert g.lab[w].mode in ("rel", "acqrel", "sc")
            assert g.lab[r].mode in ("acq", "acqrel", "sc")
            seen_sw = True
    assert seen_sw


def test_fr_same_location_and_irreflexive():
    for g in enumerate_executions(parse_litmus(_progs.COH)):
        d = derive(g)
        for r, w in d.fr.pairs:
            assert g.lab[r].loc == g.lab[w].loc
            assert r != w


def test_remark_psc_base_edge_between_sc_writes():
    p = parse_litmus(_progs.REMARK)
    graphs = [
        g
        for g in enumerate_executions(p)
        if g.lab[(1, 1)].val == 2
        and g.lab[(3, 1)].val == 2
        and ((1, 2), (2, 1)) in g.co.pairs
    ]
    assert graphs
    for g in graphs:
        d = derive(g)
        assert ((1, 2), (2, 1)) in d.psc_base


def test_derive_is_pure():
    g = glb()
    assert derive(g) == derive(g)


# ---------------------------------------------------------------------------
# output


def test_glb_dot_shape():
    g = glb()
    dot = to_dot(g)
    # 4 real nodes plus the collapsed Init node
    assert dot.count("[label=") == 5
    assert dot.count('label="rf"') == 2


def test_dot_edge_count_matches_rendering():
    for g in enumerate_executions(parse_litmus(_progs.SB)):
        dot = to_dot(g)
        assert dot.count("->") == dot_edge_count(g)


def test_dot_empty_program():
    g = build_graph({}, {"x"}, set(), set(), set())
    dot = to_dot(g)
    assert "Init" in dot and "->" not in dot


def test_json_fields_and_counts():
    g = glb()
    blob = to_json(g)
    assert set(blob) == {"events", "po", "rf", "co", "data", "ppo"}
    assert len(blob["events"]) == len(g.E)
    assert len(blob["rf"]) == len(g.rf)
    assert [0, "x"] in [e["id"] for e in blob["events"]]

"""Depth/rank certificates: verification, completion, Foundation witnesses."""

import random

import pytest

from setforge import (
    Budget,
    Dred,
    DredConditionError,
    ExtensionalDigraph,
    bounded_deficiency,
    complete,
    deficiency,
    dred_complete,
    dred_from_graph,
    foundation_witness,
    require_dred,
    verify_dred,
    von_neumann_seed,
)


def set_rank(g: ExtensionalDigraph) -> dict:
    """Independent recomputation: rank 0 at empty extension, else
    1 + max member rank. Only called on well-founded graphs."""
    rank = {}

    def visit(x):
        if x in rank:
            return rank[x]
        rank[x] = max((visit(m) + 1 for m in g.extensions[x]), default=0)
        return rank[x]

    for x in sorted(g.nodes):
        visit(x)
    return rank


def test_verify_dred_von_neumann_with_set_rank():
    g = von_neumann_seed(3)
    rank = set_rank(g)
    h = Dred(graph=g, depth={x: 0 for x in g.nodes}, ranks={1: rank, 2: dict(rank)})
    assert verify_dred(h).ok


def test_verify_dred_quine_atom_fails_rank_condition():
    g = ExtensionalDigraph.from_extensions({"a": {"a"}})
    h = Dred(graph=g, depth={"a": 0}, ranks={1: {"a": 7}})
    report = verify_dred(h)
    assert not report.ok
    # the self-loop would need r_1(a) < r_1(a)
    assert any("a" in v.detail for v in report.violations)


def test_verify_dred_two_node_chain_edge_depth():
    g = ExtensionalDigraph.from_extensions({"a0": {"a1"}, "a1": set()})
    h = Dred(
        graph=g,
        depth={"a0": 1, "a1": 2},
        ranks={1: {}, 2: {"a0": 0}, 3: {"a0": 1, "a1": 0}},
    )
    assert verify_dred(h).ok


def test_verify_dred_rejects_wrong_rank_domain():
    g = ExtensionalDigraph.from_extensions({"a": set()})
    h = Dred(graph=g, depth={"a": 5}, ranks={1: {"a": 0}})
    report = verify_dred(h)
    assert not report.ok  # depth(a) = 5 is not < 1


def test_verify_dred_depth_must_be_total():
    g = ExtensionalDigraph.from_extensions({"a": set()})
    report = verify_dred(Dred(graph=g, depth={}, ranks={}))
    assert not report.ok


def test_require_dred_raises_with_report():
    g = ExtensionalDigraph.from_extensions({"a": {"a"}})
    h = Dred(graph=g, depth={"a": 0}, ranks={1: {"a": 0}})
    with pytest.raises(DredConditionError) as exc:
        require_dred(h)
    assert exc.value.report is not None


def test_bounded_deficiency_equals_plain_on_finite():
    rng = random.Random(11)
    for _ in range(10):
        n = rng.randint(0, 4)
        names = [f"n{i}" for i in range(n)]
        while True:
            extensions = {
                x: frozenset(y for y in names[:i] if rng.random() < 0.5)
                for i, x in enumerate(names)
            }
            if len(set(extensions.values())) == n:
                break
        g = ExtensionalDigraph.from_extensions(extensions)
        h = dred_from_graph(g)
        assert bounded_deficiency(h) == deficiency(g)


def test_bounded_deficiency_empty():
    h = Dred(graph=ExtensionalDigraph.empty(), depth={}, ranks={})
    assert bounded_deficiency(h) == [()]


def test_dred_complete_empty_matches_plain_completion():
    h = Dred(graph=ExtensionalDigraph.empty(), depth={}, ranks={1: {}})
    du = dred_complete(h, 4)
    assert [len(level) for level in du.levels] == [0, 1, 2, 4, 16]
    assert du.graph == complete(ExtensionalDigraph.empty(), 4).graph
    assert set(du.depth.values()) == {0}
    assert du.ranks[1] == set_rank(du.graph)


def test_dred_complete_rank_of_two_element_set():
    h = Dred(graph=ExtensionalDigraph.empty(), depth={}, ranks={1: {}})
    du = dred_complete(h, 3)
    g = du.graph
    empty_node = next(x for x in g.nodes if g.extensions[x] == frozenset())
    singleton = next(x for x in g.nodes if g.extensions[x] == frozenset({empty_node}))
    pair = next(
        x for x in g.nodes if g.extensions[x] == frozenset({empty_node, singleton})
    )
    assert du.depth[pair] == 0
    assert du.ranks[1][pair] == 2  # max(0 + 1, 1 + 1)


def test_dred_complete_levels_all_verify():
    h = dred_from_graph(von_neumann_seed(2))
    du = dred_complete(h, 2)
    for n in range(len(du.levels)):
        assert verify_dred(du.level_dred(n)).ok


def test_dred_complete_depth_rank_agreement_across_levels():
    h = dred_from_graph(von_neumann_seed(2))
    du = dred_complete(h, 2)
    for n in range(len(du.levels) - 1):
        small = du.level_dred(n)
        big = du.level_dred(n + 1)
        for x in small.graph.nodes:
            assert small.depth[x] == big.depth[x]
        for i, r in small.ranks.items():
            for x, value in r.items():
                assert big.ranks[i][x] == value


def test_dred_complete_budget():
    # max_nodes trips at the projected 65536-node second level, before
    # that level (and its costly verification pass) is ever built
    h = dred_from_graph(von_neumann_seed(3))
    with pytest.raises(Exception):
        dred_complete(h, 3, Budget(max_nodes=10**4, max_subsets_enumerated=10**6))


def test_foundation_witness_prefers_low_rank():
    h = Dred(graph=ExtensionalDigraph.empty(), depth={}, ranks={1: {}})
    du = dred_complete(h, 3)
    g = du.graph
    empty_node = next(x for x in g.nodes if g.extensions[x] == frozenset())
    singleton = next(x for x in g.nodes if g.extensions[x] == frozenset({empty_node}))
    pair = next(
        x for x in g.nodes if g.extensions[x] == frozenset({empty_node, singleton})
    )
    assert foundation_witness(du.dred(), pair) == empty_node
    assert foundation_witness(du.dred(), singleton) == empty_node


def test_foundation_witness_is_minimal_for_every_node():
    h = dred_from_graph(von_neumann_seed(3))
    du = dred_complete(h, 1)
    dd = du.dred()
    g = du.graph
    for x in sorted(g.nodes):
        if not g.extensions[x]:
            continue
        w = foundation_witness(dd, x, skip_verify=True)
        assert w in g.extensions[x]
        assert not (g.extensions[w] & g.extensions[x]), (
            f"witness {w} shares a member with {x}"
        )


def test_foundation_witness_rejects_empty_extension():
    h = dred_from_graph(von_neumann_seed(2))
    empty_node = next(
        x for x in h.graph.nodes if h.graph.extensions[x] == frozenset()
    )
    with pytest.raises(ValueError):
        foundation_witness(h, empty_node)


def test_foundation_witness_gate_rejects_quine_atom():
    g = ExtensionalDigraph.from_extensions({"a": {"a"}})
    h = Dred(graph=g, depth={"a": 0}, ranks={1: {"a": 0}})
    with pytest.raises(DredConditionError):
        foundation_witness(h, "a")


def test_dred_from_graph_rejects_cycles():
    g = ExtensionalDigraph.from_extensions({"a": {"b"}, "b": {"a"}})
    with pytest.raises(DredConditionError):
        dred_from_graph(g)

"""Graph kernel: extensions, end extensions, isomorphism, fingerprints."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from setforge import (
    Deficiency,
    ExtensionalDigraph,
    Seed,
    SizeLimitError,
    UnknownNodeError,
    canonical_fingerprint,
    extension,
    extensionality_violation,
    is_end_extension,
    is_extensional,
    is_isomorphic,
    subset_node_id,
)

from helpers import naive_is_extensional, random_extensional_graph

# sha256("setforge-digraph|empty"), pinned so serialization formats and
# goldens can rely on it
EMPTY_FINGERPRINT = "3b217e18f15da8e62d86752f190e20ea910406b6b4d99ff321a9cac03ba74739"


def quine(label: str) -> ExtensionalDigraph:
    return ExtensionalDigraph.from_extensions({label: {label}})


def test_extension_self_loop():
    g = quine("a")
    assert extension(g, "a") == {"a"}


def test_extension_single_edge_and_empty():
    g = ExtensionalDigraph.from_edges(["e", "s"], [("e", "s")])
    assert extension(g, "s") == {"e"}
    assert extension(g, "e") == frozenset()


def test_extension_unknown_node():
    with pytest.raises(UnknownNodeError):
        extension(ExtensionalDigraph.empty(), "ghost")


def test_is_extensional_two_quine_atoms():
    g = ExtensionalDigraph.from_extensions({"a": {"a"}, "b": {"b"}})
    assert is_extensional(g)


def test_is_extensional_two_empty_extensions():
    g = ExtensionalDigraph.from_extensions({"a": set(), "b": set()})
    assert not is_extensional(g)
    first, second = extensionality_violation(g)
    assert {first, second} == {"a", "b"}


def test_is_extensional_empty_graph():
    assert is_extensional(ExtensionalDigraph.empty())


@settings(max_examples=200)
@given(st.randoms(use_true_random=False))
def test_is_extensional_agrees_with_double_loop(r):
    rng = random.Random(r.getrandbits(64))
    n = rng.randint(0, 6)
    names = [f"n{i}" for i in range(n)]
    extensions = {
        x: frozenset(y for y in names if rng.random() < 0.4) for x in names
    }
    g = ExtensionalDigraph.from_extensions(extensions)
    assert is_extensional(g) == naive_is_extensional(g)


def test_edges_derived_from_extensions():
    g = ExtensionalDigraph.from_extensions({"a": {"b"}, "b": set()})
    assert g.edges == {("b", "a")}
    assert g.containers()["b"] == {"a"}


def test_end_extension_reflexive():
    g = random_extensional_graph(random.Random(7), 5)
    assert is_end_extension(g, g)


def test_end_extension_rejects_new_member_of_old_node():
    small = ExtensionalDigraph.from_extensions({"a": set(), "b": {"a"}})
    big = ExtensionalDigraph.from_extensions({"a": set(), "b": {"a", "c"}, "c": set()})
    # b gained the member c, so this is not an end extension
    assert not is_end_extension(small, big)


def test_end_extension_allows_growth_elsewhere():
    small = ExtensionalDigraph.from_extensions({"a": set()})
    big = ExtensionalDigraph.from_extensions({"a": set(), "b": {"a"}})
    assert is_end_extension(small, big)
    assert not is_end_extension(big, small)


def test_end_extension_preserves_extensions():
    rng = random.Random(21)
    for _ in range(50):
        small = random_extensional_graph(rng, 4)
        # grow by one fresh container of a random subset
        members = frozenset(x for x in small.nodes if rng.random() < 0.5)
        if members in set(small.extensions.values()):
            continue
        big = ExtensionalDigraph.from_extensions(
            {**{x: small.extensions[x] for x in small.nodes}, "fresh": members}
        )
        assert is_end_extension(small, big)
        for x in small.nodes:
            assert extension(small, x) == extension(big, x)


def test_isomorphic_relabelled_quine_atoms():
    assert is_isomorphic(quine("a"), quine("completely-different-id"))


def test_not_isomorphic_self_loop_vs_empty_extension():
    empty_ext = ExtensionalDigraph.from_extensions({"x": set()})
    assert not is_isomorphic(quine("a"), empty_ext)


def test_isomorphic_respects_edge_structure():
    g = ExtensionalDigraph.from_extensions({"a": set(), "b": {"a"}})
    h = ExtensionalDigraph.from_extensions({"x": set(), "y": {"x"}})
    assert is_isomorphic(g, h)
    h_twisted = ExtensionalDigraph.from_extensions({"x": set(), "y": {"x", "y"}})
    assert not is_isomorphic(g, h_twisted)


def test_isomorphism_distinguishes_provenance():
    seeded = ExtensionalDigraph.from_extensions({"a": set()}, {"a": Seed("a")})
    derived = ExtensionalDigraph.from_extensions(
        {"a": set()}, {"a": Deficiency(level=1, members=())}
    )
    assert not is_isomorphic(seeded, derived)


def test_is_isomorphic_size_limit():
    g = quine("a")
    with pytest.raises(SizeLimitError):
        is_isomorphic(g, g, node_limit=0)


@settings(max_examples=60)
@given(st.randoms(use_true_random=False))
def test_isomorphism_invariant_under_relabelling(r):
    rng = random.Random(r.getrandbits(64))
    g = random_extensional_graph(rng, 6)
    mapping = {x: f"renamed-{x}" for x in g.nodes}
    h = ExtensionalDigraph.from_extensions(
        {mapping[x]: {mapping[m] for m in g.extensions[x]} for x in g.nodes}
    )
    assert is_isomorphic(g, h)
    assert canonical_fingerprint(g) == canonical_fingerprint(h)


def test_fingerprint_empty_graph_constant():
    assert canonical_fingerprint(ExtensionalDigraph.empty()) == EMPTY_FINGERPRINT


def test_fingerprints_of_the_two_one_node_graphs_differ():
    with_loop = canonical_fingerprint(quine("a"))
    without = canonical_fingerprint(ExtensionalDigraph.from_extensions({"a": set()}))
    assert with_loop != without


def test_fingerprint_tracks_isomorphism_on_small_graphs():
    """Equal fingerprints exactly when is_isomorphic says so."""
    rng = random.Random(99)
    graphs = [random_extensional_graph(rng, 4) for _ in range(12)]
    for a in graphs:
        for b in graphs:
            same = is_isomorphic(a, b)
            assert (canonical_fingerprint(a) == canonical_fingerprint(b)) == same


def test_subset_node_id_deterministic_and_order_insensitive():
    assert subset_node_id(["b", "a"]) == subset_node_id(["a", "b"])
    assert subset_node_id(["a"]) != subset_node_id(["a", "b"])
    assert subset_node_id([]).startswith("set:")


def test_unknown_edge_rejected():
    with pytest.raises(UnknownNodeError):
        ExtensionalDigraph.from_edges(["a"], [("a", "ghost")])


def test_extension_map_must_cover_nodes():
    with pytest.raises(UnknownNodeError):
        ExtensionalDigraph(frozenset({"a", "b"}), {"a": frozenset()}, {})

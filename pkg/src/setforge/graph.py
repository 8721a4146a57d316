"""Immutable extensional digraphs and structural operations on them.

A digraph here is a finite membership structure: an edge ``(z, y)`` says
"z is a member of y".  The *extension* of a node is the set of its
members.  A digraph is extensional when distinct nodes have distinct
extensions, which is the property that lets nodes be read as sets.

Node ids are plain strings with no semantics beyond identity and total
(string) order.  Derived nodes that stand for a subset of existing nodes
get a content-addressed id from :func:`subset_node_id`, so independently
constructed graphs agree on the identity of shared subset nodes and
re-runs are reproducible byte for byte.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import NonExtensionalError, SizeLimitError, UnknownNodeError

NodeId = str

# Guard for isomorphism search / canonical labelling.  The search itself
# is pruned by colour refinement; these bounds cap the pathological cases.
DEFAULT_ISO_NODE_LIMIT = 200_000
_SEARCH_STATE_LIMIT = 500_000
_BRANCH_LIMIT = 20_000

_ID_SEPARATOR = "\x1f"


@dataclass(frozen=True)
class Seed:
    """Provenance of a node supplied directly by a seed constructor."""

    label: str


@dataclass(frozen=True)
class Deficiency:
    """Provenance of a node created by a completion step.

    ``members`` is the node's extension at creation time, sorted.
    """

    level: int
    members: tuple[NodeId, ...]


@dataclass(frozen=True)
class Code:
    """Provenance of a node created while encoding atoms, tuples or
    membership codes.  ``kind`` is one of ``atom``, ``tuple``, ``loop``,
    ``chain``."""

    kind: str
    detail: str


Provenance = Seed | Deficiency | Code


def subset_node_id(members: Iterable[NodeId]) -> NodeId:
    """Content-addressed id for a node whose extension is ``members``.

    The id depends only on the (sorted) member ids, so any two
    construction paths that materialise the same subset of the same
    nodes produce the same node id.
    """
    joined = _ID_SEPARATOR.join(sorted(members))
    digest = hashlib.blake2b(joined.encode("utf-8"), digest_size=12).hexdigest()
    return f"set:{digest}"


@dataclass(frozen=True)
class ExtensionalDigraph:
    """A finite membership digraph, stored as an extension map.

    ``extensions`` maps every node to the frozenset of its members and
    is the primary representation; the edge set is derived.  Instances
    are immutable: all operations return new graphs.
    """

    nodes: frozenset[NodeId]
    extensions: dict[NodeId, frozenset[NodeId]]
    provenance: dict[NodeId, Provenance]

    def __post_init__(self) -> None:
        if set(self.extensions) != self.nodes:
            missing = set(self.nodes) ^ set(self.extensions)
            raise UnknownNodeError(
                f"extension map does not cover the node set exactly: {sorted(missing)!r}"
            )
        for x, ext in self.extensions.items():
            bad = ext - self.nodes
            if bad:
                raise UnknownNodeError(
                    f"extension of {x!r} mentions unknown nodes {sorted(bad)!r}"
                )
        for x in self.provenance:
            if x not in self.nodes:
                raise UnknownNodeError(f"provenance for unknown node {x!r}")
        for x in self.nodes:
            if x not in self.provenance:
                object.__setattr__(
                    self,
                    "provenance",
                    {**self.provenance, **{y: Seed(y) for y in self.nodes if y not in self.provenance}},
                )
                break

    @classmethod
    def from_edges(
        cls,
        nodes: Iterable[NodeId],
        edges: Iterable[tuple[NodeId, NodeId]],
        provenance: Mapping[NodeId, Provenance] | None = None,
    ) -> "ExtensionalDigraph":
        """Build a graph from an explicit edge list ``(member, container)``."""
        node_set = frozenset(nodes)
        ext: dict[NodeId, set[NodeId]] = {x: set() for x in node_set}
        for member, container in edges:
            if member not in node_set or container not in node_set:
                raise UnknownNodeError(f"edge ({member!r}, {container!r}) leaves the node set")
            ext[container].add(member)
        frozen = {x: frozenset(m) for x, m in ext.items()}
        prov = dict(provenance) if provenance is not None else {}
        return cls(node_set, frozen, prov)

    @classmethod
    def from_extensions(
        cls,
        extensions: Mapping[NodeId, Iterable[NodeId]],
        provenance: Mapping[NodeId, Provenance] | None = None,
    ) -> "ExtensionalDigraph":
        node_set = frozenset(extensions)
        frozen = {x: frozenset(m) for x, m in extensions.items()}
        prov = dict(provenance) if provenance is not None else {}
        return cls(node_set, frozen, prov)

    @classmethod
    def empty(cls) -> "ExtensionalDigraph":
        return cls(frozenset(), {}, {})

    @property
    def edges(self) -> frozenset[tuple[NodeId, NodeId]]:
        """The edge set as (member, container) pairs.  Materialised on
        demand; prefer ``extensions`` in hot paths."""
        cached = self.__dict__.get("_edges")
        if cached is None:
            cached = frozenset(
                (member, container)
                for container, members in self.extensions.items()
                for member in members
            )
            self.__dict__["_edges"] = cached
        return cached

    def containers(self) -> dict[NodeId, frozenset[NodeId]]:
        """Inverse of the extension map: node -> nodes it is a member of."""
        cached = self.__dict__.get("_containers")
        if cached is None:
            inv: dict[NodeId, set[NodeId]] = {x: set() for x in self.nodes}
            for container, members in self.extensions.items():
                for member in members:
                    inv[member].add(container)
            cached = {x: frozenset(s) for x, s in inv.items()}
            self.__dict__["_containers"] = cached
        return cached

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, node: NodeId) -> bool:
        return node in self.nodes

    def sorted_nodes(self) -> list[NodeId]:
        cached = self.__dict__.get("_sorted")
        if cached is None:
            cached = sorted(self.nodes)
            self.__dict__["_sorted"] = cached
        return cached

    def __repr__(self) -> str:  # keep test failures readable
        return f"ExtensionalDigraph({len(self.nodes)} nodes, {sum(map(len, self.extensions.values()))} edges)"


def extension(g: ExtensionalDigraph, x: NodeId) -> frozenset[NodeId]:
    """Members of ``x`` in ``g``.  Raises UnknownNodeError for foreign ids."""
    try:
        return g.extensions[x]
    except KeyError:
        raise UnknownNodeError(f"unknown node {x!r}") from None


def extensionality_violation(g: ExtensionalDigraph) -> tuple[NodeId, NodeId] | None:
    """First pair of distinct nodes sharing an extension, or None.

    "First" is deterministic: the pair with the smallest ids in sorted
    scan order.
    """
    seen: dict[frozenset[NodeId], NodeId] = {}
    for x in g.sorted_nodes():
        ext = g.extensions[x]
        if ext in seen:
            return (seen[ext], x)
        seen[ext] = x
    return None


def is_extensional(g: ExtensionalDigraph) -> bool:
    return extensionality_violation(g) is None


def require_extensional(g: ExtensionalDigraph) -> None:
    pair = extensionality_violation(g)
    if pair is not None:
        raise NonExtensionalError(pair[0], pair[1])


def is_end_extension(small: ExtensionalDigraph, big: ExtensionalDigraph) -> bool:
    """True when ``big`` end-extends ``small``: nodes and edges carry
    over, and no node of ``small`` gains a new member in ``big``.

    Equivalent formulation used here: every old node keeps exactly its
    old extension, which covers both "edges are preserved" and "no new
    members of old nodes" in one pass.
    """
    if not small.nodes <= big.nodes:
        return False
    for x in small.nodes:
        if big.extensions[x] != small.extensions[x]:
            return False
    return True


def _provenance_colour(p: Provenance) -> tuple:
    # Label text is deliberately excluded: isomorphism is invariant
    # under relabelling of seed material.  Kind and completion level are
    # structural and must be preserved.
    if isinstance(p, Seed):
        return ("seed",)
    if isinstance(p, Deficiency):
        return ("deficiency", p.level)
    return ("code", p.kind)


def _initial_colours(g: ExtensionalDigraph) -> dict[NodeId, tuple]:
    containers = g.containers()
    out = {}
    for x in g.nodes:
        ext = g.extensions[x]
        out[x] = (
            _provenance_colour(g.provenance[x]),
            x in ext,
            len(ext),
            len(containers[x]),
        )
    return out


def _refine(
    graphs: list[ExtensionalDigraph],
    colourings: list[dict[NodeId, int]],
) -> list[dict[NodeId, int]]:
    """Jointly refine colourings of one or two graphs to a stable
    partition (1-dimensional Weisfeiler-Leman over both edge directions).

    Joint refinement keeps colour identifiers comparable across graphs.
    """
    containers = [g.containers() for g in graphs]
    while True:
        signatures: list[dict[NodeId, tuple]] = []
        for g, colouring, cont in zip(graphs, colourings, containers):
            signatures.append(
                {
                    x: (
                        colouring[x],
                        tuple(sorted(colouring[m] for m in g.extensions[x])),
                        tuple(sorted(colouring[c] for c in cont[x])),
                    )
                    for x in g.nodes
                }
            )
        # Number classes by signature order, not first-seen order, so the
        # integers themselves are canonical (fingerprints depend on it).
        table = {
            sig: code
            for code, sig in enumerate(sorted({s for sigs in signatures for s in sigs.values()}))
        }
        next_colourings = [
            {x: table[sig] for x, sig in sigs.items()} for sigs in signatures
        ]
        old_classes = len({c for col in colourings for c in col.values()})
        changed = len(table) != old_classes
        colourings = next_colourings
        if not changed:
            return colourings


def _colour_histogram(colouring: dict[NodeId, int]) -> dict[int, int]:
    hist: dict[int, int] = {}
    for c in colouring.values():
        hist[c] = hist.get(c, 0) + 1
    return hist


def is_isomorphic(
    a: ExtensionalDigraph,
    b: ExtensionalDigraph,
    *,
    node_limit: int = DEFAULT_ISO_NODE_LIMIT,
) -> bool:
    """Exact isomorphism test.

    A bijection must preserve edges and structural labels (provenance
    kind, and level for completion-created nodes); seed label text and
    node ids are free to differ.  Colour refinement prunes the search,
    then plain backtracking settles genuinely ambiguous orbits, so no
    behavioural quotient (bisimulation or otherwise) is ever taken.

    Raises SizeLimitError when the input exceeds ``node_limit`` nodes or
    the backtracking search exceeds its internal state cap.
    """
    if len(a.nodes) > node_limit or len(b.nodes) > node_limit:
        raise SizeLimitError(
            f"isomorphism search limited to {node_limit} nodes, "
            f"got {len(a.nodes)} and {len(b.nodes)}"
        )
    if len(a.nodes) != len(b.nodes):
        return False
    if len(a.nodes) == 0:
        return True
    init_table: dict[tuple, int] = {}
    col_a = {x: init_table.setdefault(sig, len(init_table)) for x, sig in _initial_colours(a).items()}
    col_b = {x: init_table.setdefault(sig, len(init_table)) for x, sig in _initial_colours(b).items()}
    col_a, col_b = _refine([a, b], [col_a, col_b])
    if _colour_histogram(col_a) != _colour_histogram(col_b):
        return False

    by_colour_b: dict[int, list[NodeId]] = {}
    for y, c in col_b.items():
        by_colour_b.setdefault(c, []).append(y)
    for ys in by_colour_b.values():
        ys.sort()

    # Assign nodes of `a` in order of ascending candidate-class size so
    # forced matches happen first.
    order = sorted(a.nodes, key=lambda x: (len(by_colour_b[col_a[x]]), x))
    cont_a = a.containers()
    cont_b = b.containers()
    fwd: dict[NodeId, NodeId] = {}
    bwd: dict[NodeId, NodeId] = {}
    states = 0

    def consistent(x: NodeId, y: NodeId) -> bool:
        for m in a.extensions[x]:
            if m in fwd and fwd[m] not in b.extensions[y]:
                return False
        for c in cont_a[x]:
            if c in fwd and fwd[c] not in cont_b[y]:
                return False
        for m in b.extensions[y]:
            if m in bwd and bwd[m] not in a.extensions[x]:
                return False
        for c in cont_b[y]:
            if c in bwd and bwd[c] not in cont_a[x]:
                return False
        return True

    # Depth-first over candidate assignments, with an explicit iterator
    # stack: recursion depth would otherwise scale with the node count.
    stack: list[Iterator[NodeId]] = [iter(by_colour_b[col_a[order[0]]])]
    while stack:
        i = len(stack) - 1
        x = order[i]
        found = False
        for y in stack[-1]:
            if y in bwd or not consistent(x, y):
                continue
            fwd[x] = y
            bwd[y] = x
            found = True
            break
        if found:
            states += 1
            if states > _SEARCH_STATE_LIMIT:
                raise SizeLimitError("isomorphism search exceeded its state cap")
            if i + 1 == len(order):
                return True
            stack.append(iter(by_colour_b[col_a[order[i + 1]]]))
        else:
            stack.pop()
            if stack:
                undo = order[len(stack) - 1]
                del bwd[fwd.pop(undo)]
    return False


def _encode_discrete(
    g: ExtensionalDigraph,
    colouring: dict[NodeId, int],
    initial: dict[NodeId, tuple],
) -> str:
    order = sorted(g.nodes, key=lambda x: colouring[x])
    position = {x: i for i, x in enumerate(order)}
    parts = []
    for x in order:
        members = ",".join(str(position[m]) for m in sorted(g.extensions[x], key=lambda m: position[m]))
        parts.append(f"{initial[x]!r}<{members}>")
    return ";".join(parts)


def canonical_fingerprint(
    g: ExtensionalDigraph,
    *,
    node_limit: int = DEFAULT_ISO_NODE_LIMIT,
) -> str:
    """Hex digest that is equal for two graphs exactly when they are
    isomorphic (in the sense of :func:`is_isomorphic`).

    Computed by colour refinement plus individualisation: when the
    stable partition is not discrete, every choice in the first
    ambiguous class is explored and the lexicographically least encoding
    wins, so the result is independent of node ids.

    The empty graph maps to the fixed constant
    ``sha256("setforge-digraph|empty")``.
    """
    if len(g.nodes) > node_limit:
        raise SizeLimitError(f"canonical labelling limited to {node_limit} nodes")
    if not g.nodes:
        return hashlib.sha256(b"setforge-digraph|empty").hexdigest()

    initial = _initial_colours(g)
    table = {sig: code for code, sig in enumerate(sorted(set(initial.values())))}
    start = {x: table[sig] for x, sig in initial.items()}
    branches = 0

    def canonical(colouring: dict[NodeId, int]) -> str:
        nonlocal branches
        (colouring,) = _refine([g], [colouring])
        classes: dict[int, list[NodeId]] = {}
        for x, c in colouring.items():
            classes.setdefault(c, []).append(x)
        ambiguous = [(c, xs) for c, xs in classes.items() if len(xs) > 1]
        if not ambiguous:
            return _encode_discrete(g, colouring, initial)
        ambiguous.sort(key=lambda item: (len(item[1]), item[0]))
        _, xs = ambiguous[0]
        best: str | None = None
        fresh = max(colouring.values()) + 1
        for x in sorted(xs):
            branches += 1
            if branches > _BRANCH_LIMIT:
                raise SizeLimitError("canonical labelling exceeded its branch cap")
            candidate = canonical({**colouring, x: fresh})
            if best is None or candidate < best:
                best = candidate
        assert best is not None
        return best

    return hashlib.sha256(canonical(start).encode("utf-8")).hexdigest()

"""Seed graph constructors.

Everything the test rigs complete and model-check starts here: von
Neumann stages, self-membered atoms, truncated descending chains that
stand in for atoms without breaking well-foundedness, Kuratowski tuple
encodings, and the membership codes (loop or chain shaped) that make
the tuple family first-order definable.

All derived nodes get content-addressed ids (see
:func:`~setforge.graph.subset_node_id`), so assembling a larger
declaration never relabels the nodes a smaller one produces. That is
what makes end-extension comparisons across declarations meaningful.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .dred import Dred, require_dred
from .errors import SeedClashError, SpecValidationError, UnknownNodeError
from .graph import (
    Code,
    ExtensionalDigraph,
    NodeId,
    Provenance,
    Seed,
    require_extensional,
    subset_node_id,
)

_MAX_VON_NEUMANN_STAGE = 5


@dataclass(frozen=True)
class AtomDecl:
    """One declared atom: either a true self-loop or a descending chain.

    ``kind`` is "quine" (node with only a self-loop) or "chain"
    (``length`` pseudo-atom nodes ending in a unique terminal, keeping
    the graph well-founded).
    """

    label: str
    kind: str
    length: int | None = None


@dataclass(frozen=True)
class TupleDecl:
    """A tagged tuple of the code family.

    ``components`` name declared atoms by label, or embedded numerals in
    decimal ("0", "1", ...). The encoded node is the right-nested pair
    (tag, (c1, (c2, ...))).
    """

    tag: int
    components: tuple[str, ...]


@dataclass(frozen=True)
class CodeSpec:
    """Declarative description of a seed graph.

    Validation happens at construction; an invalid declaration is not
    representable. Chain code style carries ``code_length``; loop style
    must leave it unset.
    """

    atoms: tuple[AtomDecl, ...] = ()
    naturals_up_to: int = 0
    tuples: tuple[TupleDecl, ...] = ()
    code_style: str = "loop"
    code_length: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "tuples", tuple(self.tuples))
        self._validate()

    def _validate(self) -> None:
        seen: set[str] = set()
        chain_count = 0
        for a in self.atoms:
            if not a.label:
                raise SpecValidationError("atom labels must be nonempty")
            if a.label.isdigit():
                raise SpecValidationError(
                    f"atom label {a.label!r} is reserved for numeral references"
                )
            if a.label in seen:
                raise SpecValidationError(f"duplicate atom label {a.label!r}")
            seen.add(a.label)
            if a.kind == "quine":
                if a.length is not None:
                    raise SpecValidationError("quine atoms carry no length")
            elif a.kind == "chain":
                chain_count += 1
                if a.length is None or a.length < 1:
                    raise SpecValidationError(
                        f"chain atom {a.label!r} needs a length of at least 1"
                    )
            else:
                raise SpecValidationError(f"unknown atom kind {a.kind!r}")
        if self.naturals_up_to < 0:
            raise SpecValidationError("naturals_up_to must be non-negative")
        if chain_count and self.naturals_up_to < chain_count + 1:
            raise SpecValidationError(
                f"{chain_count} chain atoms need distinct numeral terminals: "
                f"naturals_up_to must be at least {chain_count + 1}"
            )
        seen_tuples: set[TupleDecl] = set()
        for t in self.tuples:
            if not (0 <= t.tag < self.naturals_up_to):
                raise SpecValidationError(
                    f"tuple tag {t.tag} outside the embedded numerals "
                    f"0..{self.naturals_up_to - 1}"
                )
            if not t.components:
                raise SpecValidationError("tuple components must be nonempty")
            for c in t.components:
                if c.isdigit():
                    if int(c) >= self.naturals_up_to:
                        raise SpecValidationError(
                            f"component numeral {c} not embedded (naturals_up_to="
                            f"{self.naturals_up_to})"
                        )
                elif c not in seen:
                    raise SpecValidationError(f"component {c!r} is not a declared atom")
            if t in seen_tuples:
                raise SpecValidationError(f"duplicate tuple declaration {t}")
            seen_tuples.add(t)
        if self.code_style == "loop":
            if self.code_length is not None:
                raise SpecValidationError("loop code style carries no length")
        elif self.code_style == "chain":
            if self.code_length is None or self.code_length < 1:
                raise SpecValidationError("chain code style needs code_length >= 1")
            if any(a.kind == "quine" for a in self.atoms):
                # A self-loop admits no strictly increasing rank along its
                # edge, so no depth/rank certificate could ever be issued.
                raise SpecValidationError(
                    "quine atoms cannot appear in a chain-style declaration; "
                    "use chain atoms to keep the graph certifiable"
                )
        else:
            raise SpecValidationError(f"unknown code style {self.code_style!r}")

    @property
    def chain_atom_count(self) -> int:
        return sum(1 for a in self.atoms if a.kind == "chain")


def quine_atom_id(label: str) -> NodeId:
    return f"atom:{label}"


def chain_atom_id(label: str, j: int) -> NodeId:
    return f"chain:{label}:{j}"


def loop_code_id(tuple_node: NodeId) -> NodeId:
    return f"code:loop:{tuple_node}"


def chain_code_id(j: int, tuple_node: NodeId) -> NodeId:
    return f"code:chain:{j}:{tuple_node}"


def numeral_ids(count: int) -> tuple[NodeId, ...]:
    """Ids of the first ``count`` von Neumann numerals.

    Numeral k is the set of numerals below k, so its id is derived from
    theirs; the result is a fixed sequence shared by every graph that
    embeds numerals.
    """
    ids: list[NodeId] = []
    for _ in range(count):
        ids.append(subset_node_id(ids))
    return tuple(ids)


def _set_notation(members: list[str]) -> str:
    if not members:
        return "∅"
    return "{" + ",".join(sorted(members, key=lambda s: (len(s), s))) + "}"


def von_neumann_seed(k: int) -> ExtensionalDigraph:
    """The membership digraph of the k-th von Neumann stage.

    Stages up to 5 are allowed; one more would need 2**65536 nodes.
    Nodes are labeled with canonical set notation, members ordered by
    notation length then text.
    """
    if k < 0:
        raise ValueError("stage must be non-negative")
    if k > _MAX_VON_NEUMANN_STAGE:
        raise ValueError(
            f"stage {k} is out of reach: stage 6 already holds 2**65536 sets"
        )
    extensions: dict[NodeId, frozenset[NodeId]] = {}
    notation: dict[NodeId, str] = {}
    current: list[NodeId] = []
    for _ in range(k):
        snapshot = sorted(current)
        for size in range(len(snapshot) + 1):
            for subset in itertools.combinations(snapshot, size):
                node = subset_node_id(subset)
                if node in extensions:
                    continue
                extensions[node] = frozenset(subset)
                notation[node] = _set_notation([notation[m] for m in subset])
                current.append(node)
    provenance: dict[NodeId, Provenance] = {
        x: Seed(label=notation[x]) for x in extensions
    }
    return ExtensionalDigraph(
        nodes=frozenset(extensions), extensions=extensions, provenance=provenance
    )


def quine_atoms(labels: Iterable[str]) -> ExtensionalDigraph:
    """A graph of self-membered atoms, one per label."""
    labels = list(labels)
    if len(set(labels)) != len(labels):
        raise SpecValidationError("quine atom labels must be distinct")
    extensions: dict[NodeId, frozenset[NodeId]] = {}
    provenance: dict[NodeId, Provenance] = {}
    for label in labels:
        node = quine_atom_id(label)
        extensions[node] = frozenset({node})
        provenance[node] = Code(kind="atom", detail=label)
    return ExtensionalDigraph(
        nodes=frozenset(extensions), extensions=extensions, provenance=provenance
    )


def _extension_index(g: ExtensionalDigraph) -> dict[frozenset[NodeId], NodeId]:
    return {ext: x for x, ext in g.extensions.items()}


def chain_atoms(
    g: ExtensionalDigraph, label: str, length: int, terminal: NodeId
) -> ExtensionalDigraph:
    """Add a descending pseudo-atom chain to ``g``.

    Nodes a_0 .. a_{length-1} are added with a_j = {a_{j+1}} and the
    last link a_{length-1} = {terminal}. The terminal must already be
    in the graph and must be unique to this chain, otherwise the two
    chain bottoms would share an extension.
    """
    if length < 1:
        raise ValueError("chain length must be at least 1")
    if terminal not in g.nodes:
        raise UnknownNodeError(f"chain terminal {terminal!r} is not in the graph")
    ids = [chain_atom_id(label, j) for j in range(length)]
    for node in ids:
        if node in g.nodes:
            raise SeedClashError(f"chain label {label!r} already used: {node!r} exists")
    bottom_ext = frozenset({terminal})
    taken = _extension_index(g).get(bottom_ext)
    if taken is not None:
        raise SeedClashError(
            f"cannot end chain {label!r} at {terminal!r}: node {taken!r} "
            f"already has extension {{{terminal}}}"
        )
    extensions = dict(g.extensions)
    provenance = dict(g.provenance)
    for j, node in enumerate(ids):
        below = ids[j + 1] if j + 1 < length else terminal
        extensions[node] = frozenset({below})
        provenance[node] = Code(kind="atom", detail=f"{label}[{j}]")
    return ExtensionalDigraph(
        nodes=frozenset(extensions), extensions=extensions, provenance=provenance
    )


def _add_subset_node(
    extensions: dict[NodeId, frozenset[NodeId]],
    provenance: dict[NodeId, Provenance],
    index: dict[frozenset[NodeId], NodeId],
    members: frozenset[NodeId],
    detail: str,
) -> NodeId:
    existing = index.get(members)
    if existing is not None:
        return existing
    node = subset_node_id(sorted(members))
    extensions[node] = members
    provenance[node] = Code(kind="tuple", detail=detail)
    index[members] = node
    return node


def encode_tuple(
    g: ExtensionalDigraph, components: list[NodeId]
) -> tuple[ExtensionalDigraph, NodeId]:
    """Encode a component list as right-nested Kuratowski pairs.

    pair(x, y) = {{x}, {x, y}}, with pair(x, x) collapsing to {{x}}.
    Any node whose extension already matches one of the required sets is
    reused, so encoding is idempotent and never breaks extensionality.
    Returns the possibly extended graph and the top node.
    """
    if not components:
        raise ValueError("cannot encode an empty component list")
    for c in components:
        if c not in g.nodes:
            raise UnknownNodeError(f"tuple component {c!r} is not in the graph")
    extensions = dict(g.extensions)
    provenance = dict(g.provenance)
    index = {ext: x for x, ext in extensions.items()}

    def pair(x: NodeId, y: NodeId) -> NodeId:
        sing = _add_subset_node(extensions, provenance, index, frozenset({x}), "singleton")
        if x == y:
            top_members = frozenset({sing})
        else:
            doub = _add_subset_node(
                extensions, provenance, index, frozenset({x, y}), "doubleton"
            )
            top_members = frozenset({sing, doub})
        return _add_subset_node(extensions, provenance, index, top_members, "pair")

    top = components[-1]
    for c in reversed(components[:-1]):
        top = pair(c, top)
    out = ExtensionalDigraph(
        nodes=frozenset(extensions), extensions=extensions, provenance=provenance
    )
    return out, top


@dataclass(frozen=True)
class CodeIndex:
    """Where each declared tuple ended up in the graph.

    ``tuple_nodes`` maps a declaration to its encoded top node,
    ``code_nodes`` to the membership-code nodes guarding it (a single
    loop node, or the whole chain top-down).
    """

    tuple_nodes: dict[TupleDecl, NodeId] = field(default_factory=dict)
    code_nodes: dict[TupleDecl, tuple[NodeId, ...]] = field(default_factory=dict)

    def tuple_node_set(self) -> frozenset[NodeId]:
        return frozenset(self.tuple_nodes.values())


def _component_node(spec: CodeSpec, label: str) -> NodeId:
    if label.isdigit():
        return numeral_ids(int(label) + 1)[-1]
    for a in spec.atoms:
        if a.label == label:
            if a.kind == "quine":
                return quine_atom_id(label)
            return chain_atom_id(label, 0)
    raise SpecValidationError(f"component {label!r} is not a declared atom")


def attach_codes(
    g: ExtensionalDigraph, spec: CodeSpec
) -> tuple[ExtensionalDigraph, CodeIndex]:
    """Encode the declared tuples into ``g`` and guard each with a code.

    Loop style adds one self-membered node b = {p, b} per tuple node p.
    Chain style adds b_0 .. b_{L-1} with b_j = {p, b_{j+1}} and the
    bottom b_{L-1} = {p}, which keeps the graph well-founded.
    """
    index = CodeIndex()
    for decl in spec.tuples:
        components = [numeral_ids(decl.tag + 1)[-1]]
        components += [_component_node(spec, c) for c in decl.components]
        g, top = encode_tuple(g, components)
        index.tuple_nodes[decl] = top

    extensions = dict(g.extensions)
    provenance = dict(g.provenance)
    by_extension = {ext: x for x, ext in extensions.items()}

    def add(node: NodeId, members: frozenset[NodeId], detail: str, kind: str) -> None:
        if node in extensions:
            raise SeedClashError(f"code node {node!r} already exists")
        clash = by_extension.get(members)
        if clash is not None:
            raise SeedClashError(
                f"code node {node!r} would duplicate the extension of {clash!r}"
            )
        extensions[node] = members
        provenance[node] = Code(kind=kind, detail=detail)
        by_extension[members] = node

    for decl, p in index.tuple_nodes.items():
        if spec.code_style == "loop":
            node = loop_code_id(p)
            add(node, frozenset({p, node}), f"loop({p})", "loop")
            index.code_nodes[decl] = (node,)
        else:
            length = spec.code_length
            assert length is not None
            ids = [chain_code_id(j, p) for j in range(length)]
            for j in reversed(range(length)):
                members = frozenset({p}) if j == length - 1 else frozenset({p, ids[j + 1]})
                add(ids[j], members, f"chain[{j}]({p})", "chain")
            index.code_nodes[decl] = tuple(ids)

    out = ExtensionalDigraph(
        nodes=frozenset(extensions), extensions=extensions, provenance=provenance
    )
    return out, index


@dataclass(frozen=True)
class AssembledSeed:
    """Everything :func:`assemble` produced.

    ``dred`` is populated exactly for chain-style declarations; loop
    style yields self-loops, which admit no depth/rank certificate.
    """

    spec: CodeSpec
    graph: ExtensionalDigraph
    index: CodeIndex
    numerals: tuple[NodeId, ...]
    atom_nodes: dict[str, NodeId]
    dred: Dred | None = None


def _numeral_graph(count: int) -> ExtensionalDigraph:
    ids = numeral_ids(count)
    extensions = {ids[k]: frozenset(ids[:k]) for k in range(count)}
    provenance: dict[NodeId, Provenance] = {
        ids[k]: Seed(label=str(k)) for k in range(count)
    }
    return ExtensionalDigraph(
        nodes=frozenset(extensions), extensions=extensions, provenance=provenance
    )


def _chain_style_depths(g: ExtensionalDigraph, spec: CodeSpec) -> dict[NodeId, int]:
    """Depths under which chain-style completion provably stays legal.

    Chain atoms count up from their terminal (bottom link depth 1, head
    depth L) and chain codes sit that same ladder on top of their tuple
    node. Everything else takes the max of its members' depths, the
    same recipe completion applies to new nodes. Every node then
    satisfies depth(x) <= 1 + max over members, which is exactly what
    keeps the subset-depth condition stable when completion adds
    representatives of arbitrary member sets.
    """
    chain_lengths = {a.label: a.length for a in spec.atoms if a.kind == "chain"}
    depths: dict[NodeId, int] = {}

    def depth_of(x: NodeId) -> int:
        got = depths.get(x)
        if got is not None:
            return got
        value: int
        if x.startswith("chain:"):
            _, label, j = x.split(":", 2)
            length = chain_lengths[label]
            assert length is not None
            value = length - int(j)
        elif x.startswith("code:chain:"):
            rest = x[len("code:chain:") :]
            j_text, _, tuple_node = rest.partition(":")
            assert spec.code_length is not None
            value = depth_of(tuple_node) + spec.code_length - int(j_text)
        else:
            value = max((depth_of(m) for m in g.extensions[x]), default=0)
        depths[x] = value
        return value

    for x in g.sorted_nodes():
        depth_of(x)
    return depths


def _acyclic_ranks(g: ExtensionalDigraph) -> dict[NodeId, int]:
    ranks: dict[NodeId, int] = {}

    def rank_of(x: NodeId) -> int:
        got = ranks.get(x)
        if got is None:
            got = 1 + max((rank_of(m) for m in g.extensions[x]), default=-1)
            ranks[x] = got
        return got

    for x in g.sorted_nodes():
        rank_of(x)
    return ranks


def assemble(spec: CodeSpec) -> AssembledSeed:
    """Build the full seed graph a declaration describes.

    Numerals first, then atoms in declaration order (chain atom number
    c ends at numeral c+1, which no other node may claim), then tuple
    encodings, then codes. Chain style additionally derives the
    depth/rank certificate and verifies it before returning.
    """
    g = _numeral_graph(spec.naturals_up_to)
    numerals = numeral_ids(spec.naturals_up_to)
    atom_nodes: dict[str, NodeId] = {}
    chain_ordinal = 0
    for a in spec.atoms:
        if a.kind == "quine":
            node = quine_atom_id(a.label)
            extensions = dict(g.extensions)
            provenance = dict(g.provenance)
            extensions[node] = frozenset({node})
            provenance[node] = Code(kind="atom", detail=a.label)
            g = ExtensionalDigraph(
                nodes=frozenset(extensions),
                extensions=extensions,
                provenance=provenance,
            )
            atom_nodes[a.label] = node
        else:
            assert a.length is not None
            terminal = numerals[chain_ordinal + 1]
            chain_ordinal += 1
            g = chain_atoms(g, a.label, a.length, terminal)
            atom_nodes[a.label] = chain_atom_id(a.label, 0)
    g, index = attach_codes(g, spec)
    require_extensional(g)
    dred: Dred | None = None
    if spec.code_style == "chain":
        depth = _chain_style_depths(g, spec)
        rank = _acyclic_ranks(g)
        top = max(depth.values(), default=0) + 1
        ranks = {
            i: {x: rank[x] for x in g.nodes if depth[x] < i}
            for i in range(1, top + 1)
        }
        dred = Dred(graph=g, depth=depth, ranks=ranks)
        require_dred(dred)
    return AssembledSeed(
        spec=spec,
        graph=g,
        index=index,
        numerals=numerals,
        atom_nodes=atom_nodes,
        dred=dred,
    )

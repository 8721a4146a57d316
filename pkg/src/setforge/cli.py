"""Command line interface.

Commands read a graph document from stdin and write results to stdout,
so they compose with pipes::

    setforge seed vN 3 | setforge complete --levels 2 | setforge check --witness-report

Exit codes: 0 success or property holds, 1 property fails (a
counterexample is printed), 2 budget exceeded, 3 parse or schema
error, 4 usage error. ``--porcelain`` switches reports to stable
tab-separated records.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

from .completion import Budget, DEFAULT_BUDGET, complete, witness_report
from .document import GraphDocument, deserialize, serialize
from .dot import to_dot
from .dred import dred_complete, verify_dred
from .errors import (
    BudgetExceededError,
    DredConditionError,
    ParseError,
    SetforgeError,
    SizeLimitError,
    SpecValidationError,
)
from .graph import ExtensionalDigraph
from .logic import AXIOM_NAMES, check_axiom, define_class, eval_formula, parse
from .oracle import compare, oracle_complete
from .seeds import AtomDecl, CodeSpec, TupleDecl, assemble, quine_atoms, von_neumann_seed

_BUDGET_ENV = "SETFORGE_BUDGET"


def _resolve_budget(value: int | None) -> Budget:
    if value is None:
        raw = os.environ.get(_BUDGET_ENV)
        if raw is None:
            return DEFAULT_BUDGET
        try:
            value = int(raw)
        except ValueError:
            raise SpecValidationError(f"{_BUDGET_ENV} must be an integer, got {raw!r}")
    return Budget(max_nodes=value, max_subsets_enumerated=value)


def _read_document() -> GraphDocument:
    return deserialize(sys.stdin.read())


def _emit_document(doc: GraphDocument) -> None:
    print(serialize(doc))


def _spec_from_json(raw: Any) -> tuple[CodeSpec, dict[str, str]]:
    if not isinstance(raw, dict):
        raise SpecValidationError("a code spec file must hold a JSON object")
    atoms = []
    for item in raw.get("atoms", []):
        if not isinstance(item, dict):
            raise SpecValidationError("atoms entries must be objects")
        atoms.append(
            AtomDecl(
                label=item.get("label", ""),
                kind=item.get("kind", "quine"),
                length=item.get("length"),
            )
        )
    tuples = []
    for item in raw.get("tuples", []):
        if not isinstance(item, dict):
            raise SpecValidationError("tuples entries must be objects")
        components = item.get("components", [])
        if not isinstance(components, list) or not all(
            isinstance(c, str) for c in components
        ):
            raise SpecValidationError("tuple components must be a list of labels")
        tag = item.get("tag")
        if not isinstance(tag, int) or isinstance(tag, bool):
            raise SpecValidationError("tuple tag must be an integer")
        tuples.append(TupleDecl(tag=tag, components=tuple(components)))
    naturals = raw.get("naturals_up_to", 0)
    if not isinstance(naturals, int) or isinstance(naturals, bool):
        raise SpecValidationError("naturals_up_to must be an integer")
    spec = CodeSpec(
        atoms=tuple(atoms),
        naturals_up_to=naturals,
        tuples=tuple(tuples),
        code_style=raw.get("code_style", "loop"),
        code_length=raw.get("code_length"),
    )
    formulas_raw = raw.get("formulas", {})
    if not isinstance(formulas_raw, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in formulas_raw.items()
    ):
        raise SpecValidationError("the formulas block must map names to formula text")
    return spec, dict(formulas_raw)


def _cmd_seed(args: argparse.Namespace) -> int:
    if args.kind == "empty":
        if args.arg is not None:
            raise SpecValidationError("seed empty takes no argument")
        _emit_document(GraphDocument.from_graph(ExtensionalDigraph.empty()))
        return 0
    if args.kind == "vN":
        if args.arg is None:
            raise SpecValidationError("seed vN needs a stage number")
        _emit_document(GraphDocument.from_graph(von_neumann_seed(int(args.arg))))
        return 0
    if args.kind == "quine":
        if args.arg is None:
            raise SpecValidationError("seed quine needs an atom count")
        count = int(args.arg)
        if count < 0:
            raise SpecValidationError("atom count must be non-negative")
        _emit_document(
            GraphDocument.from_graph(quine_atoms([f"q{i}" for i in range(count)]))
        )
        return 0
    # spec file
    if args.arg is None:
        raise SpecValidationError("seed spec needs a file path")
    try:
        with open(args.arg, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as e:
        raise SpecValidationError(f"cannot read {args.arg}: {e}") from e
    except json.JSONDecodeError as e:
        raise SpecValidationError(f"invalid JSON in {args.arg}: {e.msg}") from e
    spec, formulas = _spec_from_json(raw)
    seed = assemble(spec)
    if seed.dred is not None:
        doc = GraphDocument.from_dred(seed.dred)
        doc = GraphDocument(
            graph=doc.graph, depth=doc.depth, ranks=doc.ranks, formulas=formulas
        )
    else:
        doc = GraphDocument(graph=seed.graph, formulas=formulas)
    _emit_document(doc)
    return 0


def _cmd_complete(args: argparse.Namespace) -> int:
    doc = _read_document()
    budget = _resolve_budget(args.budget)
    if args.dred:
        if doc.depth is None or doc.ranks is None:
            print("input document has no depth/ranks blocks", file=sys.stderr)
            return 3
        du = dred_complete(doc.to_dred(), args.levels, budget)
        out = GraphDocument.from_dred_universe(du)
    else:
        u = complete(doc.graph, args.levels, budget)
        out = GraphDocument.from_universe(u)
    _emit_document(
        GraphDocument(
            graph=out.graph,
            levels=out.levels,
            depth=out.depth,
            ranks=out.ranks,
            formulas=doc.formulas,
        )
    )
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    doc = _read_document()
    if args.axiom is not None:
        report = check_axiom(doc.graph, args.axiom)
        status = "pass" if report.holds else "fail"
        if args.porcelain:
            print(f"axiom\t{report.axiom}\t{status}\t{','.join(report.witness)}")
        elif report.holds:
            print(f"axiom {report.axiom}: holds ({report.detail})")
        else:
            print(f"axiom {report.axiom}: fails ({report.detail})")
        return 0 if report.holds else 1
    if args.witness_report:
        if doc.levels is None or len(doc.levels) < 3:
            print("witness report needs a document with at least 3 levels", file=sys.stderr)
            return 3
        report = witness_report(doc.to_universe())
        if args.porcelain:
            failed = {(f.level, f.clause): f for f in report.failures}
            for level, clause in report.checked:
                failure = failed.get((level, clause))
                if failure is None:
                    print(f"witness\t{level}\t{clause}\tpass\t")
                else:
                    print(f"witness\t{level}\t{clause}\tfail\t{failure.detail}")
        else:
            for line in report.summary_lines():
                print(line)
        return 0 if report.ok else 1
    # dred conditions
    if doc.depth is None or doc.ranks is None:
        print("input document has no depth/ranks blocks", file=sys.stderr)
        return 3
    report = verify_dred(doc.to_dred())
    if args.porcelain:
        if report.ok:
            print("dred\tok\t")
        for violation in report.violations:
            print(f"dred\t{violation.condition}\t{violation.detail}")
    else:
        for line in report.summary_lines():
            print(line)
    return 0 if report.ok else 1


def _resolve_formula(doc: GraphDocument, text: str):
    if text.startswith("@"):
        name = text[1:]
        if name not in doc.formulas:
            raise ParseError(f"no formula named {name!r} in the document", 0)
        text = doc.formulas[name]
    return parse(text)


def _cmd_eval(args: argparse.Namespace) -> int:
    doc = _read_document()
    formula = _resolve_formula(doc, args.formula)
    env = {}
    for binding in args.bind or []:
        var, sep, node = binding.partition("=")
        if not sep or not var:
            raise SpecValidationError(f"bindings look like var=nodeId, got {binding!r}")
        env[var] = node
    value = eval_formula(doc.graph, formula, env)
    print(f"eval\t{'true' if value else 'false'}" if args.porcelain else str(value).lower())
    return 0 if value else 1


def _cmd_define(args: argparse.Namespace) -> int:
    doc = _read_document()
    formula = _resolve_formula(doc, args.formula)
    members = sorted(define_class(doc.graph, formula))
    for node in members:
        print(f"define\t{node}" if args.porcelain else node)
    if not args.porcelain:
        print(f"{len(members)} nodes", file=sys.stderr)
    return 0


def _cmd_oracle_compare(args: argparse.Namespace) -> int:
    doc = _read_document()
    budget = _resolve_budget(args.budget)
    ours = complete(doc.graph, args.levels, budget).graph
    reference = oracle_complete(doc.graph, args.levels, budget)
    verdict = compare(ours, reference)
    status = "isomorphic" if verdict.isomorphic else "mismatch"
    if args.porcelain:
        print(f"oracle\t{status}\t{verdict.detail}")
    else:
        print(verdict.detail)
    return 0 if verdict.isomorphic else 1


def _cmd_export(args: argparse.Namespace) -> int:
    doc = _read_document()
    source = doc.to_dred() if doc.depth is not None and doc.ranks is not None else doc.graph
    rendered = to_dot(source)
    if args.dot == "-":
        sys.stdout.write(rendered)
    else:
        with open(args.dot, "w", encoding="utf-8") as handle:
            handle.write(rendered)
    return 0


def _cmd_diff(args: argparse.Namespace) -> int:
    docs = []
    for path in (args.a, args.b):
        try:
            with open(path, "r", encoding="utf-8") as handle:
                docs.append(deserialize(handle.read()))
        except OSError as e:
            raise SpecValidationError(f"cannot read {path}: {e}") from e
    a, b = docs
    if serialize(a) == serialize(b):
        print("diff\tidentical\t" if args.porcelain else "identical")
        return 0
    verdict = compare(a.graph, b.graph)
    if verdict.isomorphic:
        print(
            "diff\tisomorphic\tdocuments differ, graphs are isomorphic"
            if args.porcelain
            else "isomorphic (documents differ outside the graph or in ids)"
        )
        return 0
    print(
        f"diff\tdifferent\t{verdict.detail}" if args.porcelain else f"different: {verdict.detail}"
    )
    return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--porcelain",
        action="store_true",
        help="emit stable tab-separated records instead of prose",
    )
    parser = argparse.ArgumentParser(
        prog="setforge",
        parents=[common],
        description="build, complete, and model-check extensional digraphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seed", parents=[common], help="emit a seed graph document")
    p.add_argument("kind", choices=["empty", "vN", "quine", "spec"])
    p.add_argument("arg", nargs="?", help="stage, atom count, or spec file path")
    p.set_defaults(func=_cmd_seed)

    p = sub.add_parser("complete", parents=[common], help="run completion steps")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--dred", action="store_true", help="carry depth/rank annotations")
    p.set_defaults(func=_cmd_complete)

    p = sub.add_parser("check", parents=[common], help="check structural properties")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--axiom", choices=list(AXIOM_NAMES))
    group.add_argument("--witness-report", action="store_true")
    group.add_argument("--dred-conditions", action="store_true")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("eval", parents=[common], help="evaluate a closed or bound formula")
    p.add_argument("--formula", required=True)
    p.add_argument("--bind", action="append", metavar="VAR=NODE")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("define", parents=[common], help="list the class a formula defines")
    p.add_argument("--formula", required=True)
    p.set_defaults(func=_cmd_define)

    p = sub.add_parser(
        "oracle-compare", parents=[common], help="complete two ways and compare"
    )
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=_cmd_oracle_compare)

    p = sub.add_parser("export", parents=[common], help="render the graph as DOT")
    p.add_argument("--dot", required=True, metavar="PATH", help="output path, - for stdout")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("diff", parents=[common], help="compare two graph documents")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=_cmd_diff)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 4
    try:
        return args.func(args)
    except BudgetExceededError as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return 2
    except SizeLimitError as e:
        print(f"size limit: {e}", file=sys.stderr)
        return 2
    except DredConditionError as e:
        print(f"depth/rank conditions fail: {e}")
        return 1
    except ParseError as e:
        print(str(e), file=sys.stderr)
        return 3
    except SetforgeError as e:
        print(str(e), file=sys.stderr)
        return 3
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

"""Structural profiles: AST node-kind and edge histograms, McCabe complexity, method diffs."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator

import tree_sitter

from .entropy import SymbolHistogram, shannon_entropy
from .grammars import Grammar, get_grammar
from .lexical import decode_source

EDGE_ARROW = "→"


class ParseError(ValueError):
    """Source could not be recovered into any syntax tree."""

    def __init__(self, line: int, column: int, message: str = "syntax error"):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class StructuralProfile:
    node_hist: SymbolHistogram
    edge_hist: SymbolHistogram
    method_count: int = 0
    file_cyclomatic: int = 0
    has_errors: bool = False
    # 1-based (line, column) of the first ERROR or MISSING node
    first_error: tuple[int, int] | None = None

    @classmethod
    def empty(cls) -> "StructuralProfile":
        return cls(SymbolHistogram(), SymbolHistogram())


def edge_key(parent_kind: str, child_kind: str) -> str:
    return f"{parent_kind}{EDGE_ARROW}{child_kind}"


def _bytes(source: str | bytes) -> bytes:
    # validates UTF-8 and normalises to bytes for tree-sitter
    return decode_source(source).encode("utf-8")


def _structural_children(g: Grammar, node: tree_sitter.Node) -> Iterator[tree_sitter.Node]:
    for child in node.named_children:
        if child.is_missing or child.type in g.extra_kinds:
            continue
        yield child


def _first_error(node: tree_sitter.Node) -> tree_sitter.Node | None:
    stack = [node]
    while stack:
        n = stack.pop()
        if n.is_error or n.is_missing:
            return n
        if n.has_error:
            stack.extend(reversed(n.children))
    return None


def _histograms(g: Grammar, root: tree_sitter.Node) -> tuple[Counter, Counter]:
    nodes: Counter = Counter()
    edges: Counter = Counter()
    stack = [root]
    while stack:
        node = stack.pop()
        kind = g.kind(node)
        nodes[kind] += 1
        for child in _structural_children(g, node):
            edges[edge_key(kind, g.kind(child))] += 1
            stack.append(child)
    return nodes, edges


def _parse(source: str | bytes, grammar: str | Grammar, strict: bool):
    g = get_grammar(grammar)
    tree = g.parse(_bytes(source))
    root = tree.root_node
    err = _first_error(root) if root.has_error else None
    if err is not None:
        line, col = err.start_point.row + 1, err.start_point.column + 1
        tops = list(_structural_children(g, root))
        if strict or root.is_error or (tops and all(t.is_error for t in tops)):
            raise ParseError(line, col)
    return g, root, err


def _method_nodes(g: Grammar, root: tree_sitter.Node) -> list[tree_sitter.Node]:
    found = []
    stack = [root]
    while stack:
        node = stack.pop()
        if node.type in g.method_kinds:
            found.append(node)
        stack.extend(reversed(node.named_children))
    return found


def _cyclomatic(g: Grammar, root: tree_sitter.Node) -> dict[str, int]:
    """Per-method McCabe numbers, keyed by signature in document order."""
    per_method: dict[str, int] = {}
    # (node, index of enclosing method in `order` or -1)
    order: list[str] = []
    counts: list[int] = []
    stack: list[tuple[tree_sitter.Node, int]] = [(root, -1)]
    while stack:
        node, owner = stack.pop()
        if node.type in g.method_kinds:
            order.append(_unique(g.method_signature(node), order))
            counts.append(1)
            owner = len(counts) - 1
        elif owner >= 0 and g.is_decision_point(node):
            counts[owner] += 1
        for child in reversed(node.named_children):
            stack.append((child, owner))
    for sig, m in zip(order, counts):
        per_method[sig] = m
    return per_method


def _unique(sig: str, seen: list[str]) -> str:
    if sig not in seen:
        return sig
    k = 2
    while f"{sig}#{k}" in seen:
        k += 1
    return f"{sig}#{k}"


def parse_profile(
    source: str | bytes, grammar: str | Grammar = "java", *, strict: bool = False
) -> StructuralProfile:
    """Node-kind and parent->child edge histograms of the parse tree of ``source``.

    Only named nodes take part; punctuation leaves and comments do not. Trees
    with recoverable syntax errors are profiled as recovered and flagged with
    ``has_errors``. A file whose tree is nothing but the root yields an empty
    profile.
    """
    g, root, err = _parse(source, grammar, strict)
    if not any(True for _ in _structural_children(g, root)):
        return StructuralProfile.empty()
    nodes, edges = _histograms(g, root)
    per_method = _cyclomatic(g, root)
    return StructuralProfile(
        node_hist=SymbolHistogram(nodes),
        edge_hist=SymbolHistogram(edges),
        method_count=len(per_method),
        file_cyclomatic=sum(per_method.values()),
        has_errors=err is not None,
        first_error=(err.start_point.row + 1, err.start_point.column + 1) if err else None,
    )


def structural_entropy(profile: StructuralProfile) -> tuple[float, float]:
    """``(node_entropy, edge_entropy)`` in bits."""
    return shannon_entropy(profile.node_hist), shannon_entropy(profile.edge_hist)


def cyclomatic_complexity(
    source: str | bytes, grammar: str | Grammar = "java"
) -> tuple[dict[str, int], int]:
    g, root, _ = _parse(source, grammar, strict=False)
    per_method = _cyclomatic(g, root)
    return per_method, sum(per_method.values())


def method_profiles(source: str | bytes, grammar: str | Grammar = "java") -> dict[str, StructuralProfile]:
    """Structural profile of each method subtree, keyed by signature."""
    g, root, _ = _parse(source, grammar, strict=False)
    out: dict[str, StructuralProfile] = {}
    for node in _method_nodes(g, root):
        sig = _unique(g.method_signature(node), list(out))
        nodes, edges = _histograms(g, node)
        m = _cyclomatic(g, node)
        out[sig] = StructuralProfile(SymbolHistogram(nodes), SymbolHistogram(edges), len(m), sum(m.values()))
    return out


def _body_tokens(g: Grammar, node: tree_sitter.Node) -> tuple[str, ...]:
    body = node.child_by_field_name("body")
    if body is None:
        return ()
    out = []
    stack = [body]
    while stack:
        n = stack.pop()
        if n.type in g.extra_kinds:
            continue
        if n.child_count == 0:
            out.append(n.text.decode("utf-8", "replace"))
        else:
            stack.extend(reversed(n.children))
    return tuple(out)


def method_bodies(source: str | bytes, grammar: str | Grammar = "java") -> dict[str, tuple[str, ...]]:
    if not decode_source(source).strip():
        return {}
    g, root, _ = _parse(source, grammar, strict=False)
    out: dict[str, tuple[str, ...]] = {}
    for node in _method_nodes(g, root):
        out[_unique(g.method_signature(node), list(out))] = _body_tokens(g, node)
    return out


def changed_methods(before: str | bytes, after: str | bytes, grammar: str | Grammar = "java") -> int:
    """Methods added, removed, or with a different body token sequence."""
    old = method_bodies(before, grammar)
    new = method_bodies(after, grammar)
    changed = len(old.keys() ^ new.keys())
    changed += sum(1 for sig in old.keys() & new.keys() if old[sig] != new[sig])
    return changed

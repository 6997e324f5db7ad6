"""Grammar plug-ins: a lexer plus a tree-sitter parser and node-kind conventions.

Only Java ships, but nothing outside this module knows about Java. Register
further grammars with :func:`register_grammar` before analysis starts.
"""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, NamedTuple

import tree_sitter


class TokenClass(enum.Enum):
    IDENTIFIER = "identifier"
    KEYWORD = "keyword"
    NUMBER = "number"
    STRING_LITERAL = "string_literal"
    COMMENT = "comment"
    OPERATOR = "operator"
    DELIMITER = "delimiter"


class Lexeme(NamedTuple):
    kind: TokenClass
    text: str
    offset: int


class UnknownGrammarError(LookupError):
    pass


@dataclass(frozen=True)
class Grammar:
    """Everything the analyzers need to know about one language."""

    name: str
    extensions: tuple[str, ...]
    lex: Callable[[str], Iterator[Lexeme]]
    load_language: Callable[[], tree_sitter.Language]
    # tree-sitter kind -> reported kind
    kind_aliases: Mapping[str, str] = field(default_factory=dict)
    # named nodes that are not part of the syntax tree proper (comments)
    extra_kinds: frozenset[str] = frozenset()
    method_kinds: frozenset[str] = frozenset()
    is_decision_point: Callable[[tree_sitter.Node], bool] = lambda node: False
    method_signature: Callable[[tree_sitter.Node], str] = lambda node: node.type

    def kind(self, node: tree_sitter.Node) -> str:
        return self.kind_aliases.get(node.type, node.type)

    def handles(self, path: str) -> bool:
        return path.endswith(self.extensions)

    @functools.cached_property
    def language(self) -> tree_sitter.Language:
        return self.load_language()

    def parse(self, source: bytes) -> tree_sitter.Tree:
        return tree_sitter.Parser(self.language).parse(source)


_REGISTRY: dict[str, Grammar] = {}


def register_grammar(grammar: Grammar) -> None:
    if grammar.name in _REGISTRY:
        raise ValueError(f"grammar {grammar.name!r} is already registered")
    _REGISTRY[grammar.name] = grammar


def get_grammar(grammar: str | Grammar) -> Grammar:
    if isinstance(grammar, Grammar):
        return grammar
    try:
        return _REGISTRY[grammar]
    except KeyError:
        raise UnknownGrammarError(
            f"unknown grammar {grammar!r}; registered: {sorted(_REGISTRY)}"
        ) from None


def registered_grammars() -> list[str]:
    return sorted(_REGISTRY)


# ---------------------------------------------------------------------------
# Java

JAVA_KEYWORDS = frozenset(
    """
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while true false null
    """.split()
)

_JAVA_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<text_block>\"\"\"(?:\\.|[^\\])*?(?:\"\"\"|\Z))
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?(?:\*/|\Z))
  | (?P<string>"(?:\\.|[^"\\\n])*"?)
  | (?P<char>'(?:\\.|[^'\\\n])*'?)
  | (?P<number>
        0[xX][0-9a-fA-F_]*(?:\.[0-9a-fA-F_]*)?(?:[pP][+-]?[0-9_]+)?[lLfFdD]?
      | 0[bB][01_]+[lL]?
      | (?:[0-9][0-9_]*(?:\.[0-9_]*)?|\.[0-9][0-9_]*)(?:[eE][+-]?[0-9_]+)?[lLfFdD]?
    )
  | (?P<word>(?:[^\W\d]|\$)(?:\w|\$)*)
  | (?P<operator>
        >>>=|<<=|>>=|>>>|->|::|\+\+|--|&&|\|\||==|!=|<=|>=
      | \+=|-=|\*=|/=|&=|\|=|\^=|%=|<<|>>|[=+\-*/%&|^!~?:<>]
    )
  | (?P<delimiter>\.\.\.|[(){}\[\];,.@])
  | (?P<other>.)
    """,
    re.VERBOSE | re.DOTALL,
)

_GROUP_CLASS = {
    "text_block": TokenClass.STRING_LITERAL,
    "string": TokenClass.STRING_LITERAL,
    "char": TokenClass.STRING_LITERAL,
    "line_comment": TokenClass.COMMENT,
    "block_comment": TokenClass.COMMENT,
    "number": TokenClass.NUMBER,
    "operator": TokenClass.OPERATOR,
    "delimiter": TokenClass.DELIMITER,
    # stray characters ('#', '\\', '`') carry no words
    "other": TokenClass.DELIMITER,
}


def lex_java(source: str) -> Iterator[Lexeme]:
    for m in _JAVA_TOKEN.finditer(source):
        group = m.lastgroup
        if group == "ws":
            continue
        text = m.group()
        if group == "word":
            kind = TokenClass.KEYWORD if text in JAVA_KEYWORDS else TokenClass.IDENTIFIER
        else:
            kind = _GROUP_CLASS[group]
        yield Lexeme(kind, text, m.start())


_JAVA_DECISION_KINDS = frozenset(
    {
        "if_statement",
        "while_statement",
        "do_statement",
        "for_statement",
        "enhanced_for_statement",
        "catch_clause",
        "ternary_expression",
    }
)

def _java_is_decision_point(node: tree_sitter.Node) -> bool:
    kind = node.type
    if kind in _JAVA_DECISION_KINDS:
        return True
    if kind == "switch_label":
        # `default:` is not a decision point
        return node.child_count > 0 and node.children[0].type == "case"
    if kind == "binary_expression":
        op = node.child_by_field_name("operator")
        return op is not None and op.type in ("&&", "||")
    return False


def _squash(node: tree_sitter.Node | None) -> str:
    if node is None:
        return ""
    return "".join(node.text.decode("utf-8", "replace").split())


def _java_method_signature(node: tree_sitter.Node) -> str:
    params: list[str] = []
    plist = node.child_by_field_name("parameters")
    if plist is not None:
        for p in plist.named_children:
            if p.type == "formal_parameter":
                params.append(_squash(p.child_by_field_name("type")))
            elif p.type == "spread_parameter":
                typ = next((c for c in p.named_children if c.type not in ("modifiers", "variable_declarator")), None)
                params.append(_squash(typ) + "...")
    name = _squash(node.child_by_field_name("name"))
    return name + "(" + ",".join(params) + ")"


def _load_java() -> tree_sitter.Language:
    import tree_sitter_java

    return tree_sitter.Language(tree_sitter_java.language())


JAVA = Grammar(
    name="java",
    extensions=(".java",),
    lex=lex_java,
    load_language=_load_java,
    kind_aliases={"program": "compilation_unit"},
    extra_kinds=frozenset({"line_comment", "block_comment"}),
    method_kinds=frozenset(
        {"method_declaration", "constructor_declaration", "compact_constructor_declaration"}
    ),
    is_decision_point=_java_is_decision_point,
    method_signature=_java_method_signature,
)

register_grammar(JAVA)

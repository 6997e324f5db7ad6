"""Word streams for textual entropy.

Source text is lexed by the grammar's lexer, operators and delimiters are
dropped, and the remaining lexemes are broken into lowercase words:
identifiers at case, digit and separator boundaries, comments and string
literals at whitespace and punctuation first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .entropy import SymbolHistogram, shannon_entropy
from .grammars import Grammar, Lexeme, TokenClass, get_grammar

__all__ = [
    "TokenClass",
    "TokenizationConfig",
    "SourceDecodeError",
    "ALL_TOKENS",
    "NO_COMMENTS",
    "COMMENTS_ONLY",
    "NO_KEYWORDS_NUMBERS",
    "split_identifier",
    "decode_source",
    "lex",
    "tokenize",
    "token_entropy",
]


class SourceDecodeError(ValueError):
    def __init__(self, offset: int, reason: str = "invalid UTF-8"):
        super().__init__(f"cannot decode source at byte offset {offset}: {reason}")
        self.offset = offset


@dataclass(frozen=True)
class TokenizationConfig:
    include_comments: bool = True
    include_keywords: bool = True
    include_numbers: bool = True
    comments_only: bool = False

    def __post_init__(self):
        if self.comments_only and not self.include_comments:
            raise ValueError("comments_only requires include_comments")


ALL_TOKENS = TokenizationConfig()
NO_COMMENTS = TokenizationConfig(include_comments=False)
COMMENTS_ONLY = TokenizationConfig(comments_only=True)
NO_KEYWORDS_NUMBERS = TokenizationConfig(include_keywords=False, include_numbers=False)


def _char_class(c: str) -> str:
    if c.isalpha():
        return "U" if c.isupper() else "L"
    if c.isalnum():
        return "D"
    return ""


def split_identifier(identifier: str) -> list[str]:
    """Split an identifier (or any run of text) into lowercase words.

    >>> split_identifier("createUser")
    ['create', 'user']
    >>> split_identifier("HTTPResponse_v2")
    ['http', 'response', 'v', '2']
    """
    words: list[str] = []
    current: list[str] = []
    prev = ""
    n = len(identifier)
    for i, c in enumerate(identifier):
        cls = _char_class(c)
        if not cls:
            if current:
                words.append("".join(current))
                current = []
            prev = ""
            continue
        boundary = False
        if current:
            if cls == "D" or prev == "D":
                boundary = cls != prev
            elif prev == "L" and cls == "U":
                boundary = True
            elif prev == "U" and cls == "U":
                # an uppercase run followed by lowercase: the last capital starts the next word
                nxt = _char_class(identifier[i + 1]) if i + 1 < n else ""
                boundary = nxt == "L"
        if boundary:
            words.append("".join(current))
            current = []
        current.append(c)
        prev = cls
    if current:
        words.append("".join(current))
    return [w.lower() for w in words]


_ESCAPE = re.compile(r"\\(?:u+([0-9a-fA-F]{4})|[0-7]{1,3}|.)", re.DOTALL)


def _unescape(text: str) -> str:
    return _ESCAPE.sub(lambda m: chr(int(m.group(1), 16)) if m.group(1) else " ", text)


def _literal_body(text: str) -> str:
    if text.startswith('"""'):
        body = text[3:-3] if text.endswith('"""') and len(text) >= 6 else text[3:]
    else:
        quote = text[0]
        body = text[1:-1] if len(text) >= 2 and text.endswith(quote) else text[1:]
    return _unescape(body)


def decode_source(source: str | bytes) -> str:
    if isinstance(source, str):
        return source
    try:
        return source.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SourceDecodeError(exc.start, exc.reason) from None


def lex(source: str | bytes, grammar: str | Grammar = "java") -> list[Lexeme]:
    g = get_grammar(grammar)
    return list(g.lex(decode_source(source)))


def _words(lexeme: Lexeme, config: TokenizationConfig) -> list[str]:
    kind = lexeme.kind
    if kind is TokenClass.COMMENT:
        return split_identifier(lexeme.text) if config.include_comments else []
    if config.comments_only or kind in (TokenClass.OPERATOR, TokenClass.DELIMITER):
        return []
    if kind is TokenClass.IDENTIFIER:
        return split_identifier(lexeme.text)
    if kind is TokenClass.KEYWORD:
        return [lexeme.text.lower()] if config.include_keywords else []
    if kind is TokenClass.NUMBER:
        return [lexeme.text.lower()] if config.include_numbers else []
    if kind is TokenClass.STRING_LITERAL:
        return split_identifier(_literal_body(lexeme.text))
    raise AssertionError(kind)


def tokenize(
    source: str | bytes,
    grammar: str | Grammar = "java",
    config: TokenizationConfig = ALL_TOKENS,
) -> list[str]:
    """Return the word stream of ``source`` under ``config``."""
    words: list[str] = []
    for lexeme in lex(source, grammar):
        words.extend(_words(lexeme, config))
    return words


def token_entropy(
    source: str | bytes,
    grammar: str | Grammar = "java",
    config: TokenizationConfig = ALL_TOKENS,
) -> float:
    return shannon_entropy(SymbolHistogram.from_symbols(tokenize(source, grammar, config)))

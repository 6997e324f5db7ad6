import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codentropy.grammars import TokenClass
from codentropy.lexical import (
    ALL_TOKENS,
    COMMENTS_ONLY,
    NO_COMMENTS,
    NO_KEYWORDS_NUMBERS,
    SourceDecodeError,
    TokenizationConfig,
    decode_source,
    lex,
    split_identifier,
    token_entropy,
    tokenize,
)
from fixture_repo import DATA_ACCESS
from lexical_corpus import CORPUS, KEEP

CONFIGS = {
    "all": ALL_TOKENS,
    "no_comments": NO_COMMENTS,
    "comments_only": COMMENTS_ONLY,
    "no_kw_num": NO_KEYWORDS_NUMBERS,
}


@pytest.mark.parametrize("variant", sorted(CONFIGS))
@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus(name, variant):
    source, tagged = CORPUS[name]
    expected = [w for tag, w in tagged if tag in KEEP[variant]]
    assert tokenize(source, "java", CONFIGS[variant]) == expected


@pytest.mark.parametrize(
    "identifier, words",
    [
        ("createUser", ["create", "user"]),
        ("snake_case_name", ["snake", "case", "name"]),
        ("HTTPResponse_v2", ["http", "response", "v", "2"]),
        ("getHTTP", ["get", "http"]),
        ("ALL_CAPS", ["all", "caps"]),
        ("x", ["x"]),
        ("_", []),
        ("$jq", ["jq"]),
        ("utf8Decoder", ["utf", "8", "decoder"]),
    ],
)
def test_split_identifier(identifier, words):
    assert split_identifier(identifier) == words


identifiers = st.text(alphabet="abcxyzABCXYZ0189_$", min_size=1, max_size=20)


@settings(max_examples=300, deadline=None)
@given(identifiers)
def test_split_preserves_characters(ident):
    words = split_identifier(ident)
    assert "".join(words) == "".join(c for c in ident if c.isalnum()).lower()
    assert all(w and w == w.lower() for w in words)


@settings(max_examples=300, deadline=None)
@given(identifiers)
def test_split_is_idempotent(ident):
    for w in split_identifier(ident):
        assert split_identifier(w) == [w]


java_ish = st.text(alphabet="abAB01 _;{}()=+-*/\"'\n\\x.<>!&|@", max_size=80)


@settings(max_examples=300, deadline=None)
@given(java_ish)
def test_filters_partition_the_stream(source):
    everything = Counter(tokenize(source))
    assert Counter(tokenize(source, config=NO_COMMENTS)) + Counter(tokenize(source, config=COMMENTS_ONLY)) == everything
    assert not Counter(tokenize(source, config=NO_KEYWORDS_NUMBERS)) - everything


@settings(max_examples=100, deadline=None)
@given(java_ish)
def test_deterministic(source):
    assert tokenize(source) == tokenize(source)
    assert token_entropy(source) == token_entropy(source)


def test_lexeme_classes():
    kinds = [lx.kind for lx in lex("if (a >= 1) { b(\"s\"); } /* c */")]
    assert kinds == [
        TokenClass.KEYWORD, TokenClass.DELIMITER, TokenClass.IDENTIFIER, TokenClass.OPERATOR,
        TokenClass.NUMBER, TokenClass.DELIMITER, TokenClass.DELIMITER, TokenClass.IDENTIFIER,
        TokenClass.DELIMITER, TokenClass.STRING_LITERAL, TokenClass.DELIMITER, TokenClass.DELIMITER,
        TokenClass.DELIMITER, TokenClass.COMMENT,
    ]


def test_unterminated_comment_runs_to_end():
    assert tokenize("int a; /* never closed\nstill comment") == ["int", "a", "never", "closed", "still", "comment"]


def test_decode_error_reports_offset():
    with pytest.raises(SourceDecodeError) as info:
        decode_source(b"class A {}\n\xff")
    assert info.value.offset == 11


def test_bytes_and_str_agree():
    src = "class Café { int über; }"
    assert tokenize(src.encode("utf-8")) == tokenize(src) == ["class", "café", "int", "über"]


def test_comments_only_requires_comments():
    with pytest.raises(ValueError):
        TokenizationConfig(include_comments=False, comments_only=True)


def test_empty_source():
    assert tokenize("") == []
    assert token_entropy("") == 0.0


# DataAccess.java from the fixture repository, tokenized by hand line by line
DATA_ACCESS_WORDS = (
    "package app "
    "import java sql connection "
    "data access for user rows "
    "public class data access "
    "private final connection conn "
    "public data access connection conn "
    "this conn conn "
    "soft delete row "
    "public void soft delete int id "
    "if id 0 "
    "execute update users set deleted 1 where id id "
    "hard delete row "
    "public void hard delete int id "
    "if id 0 "
    "execute delete from users where id id "
    "private void execute string sql "
    "system out println sql"
).split()


def test_fixture_file_by_hand():
    words = tokenize(DATA_ACCESS)
    assert len(words) == len(DATA_ACCESS_WORDS) == 76
    assert words == DATA_ACCESS_WORDS
    counts = Counter(DATA_ACCESS_WORDS)
    n = len(DATA_ACCESS_WORDS)
    expected = -sum(c / n * math.log2(c / n) for c in counts.values())
    assert token_entropy(DATA_ACCESS) == pytest.approx(expected, abs=1e-12)

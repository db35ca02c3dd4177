"""Turn clone-group source text into filtered bag-of-words documents.

Filtering removes four categories of noise: comments, language keywords,
programming boilerplate words, and English stop words. Word lists ship as
plain-text package data and can be overridden per run.
"""

from __future__ import annotations

import os
import re
import warnings
from collections import Counter
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .errors import CloneMapWarning, ConfigError
from .ingest import CloneGroup

WORDLIST_DIR_ENV = "CLONEMAP_WORDLIST_DIR"

_WORD_RE = re.compile(r"[A-Za-z0-9_]+")
_CAMEL_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")


@dataclass(frozen=True)
class FilterConfig:
    """Token filtering rules: three removal word sets plus shape options.

    The word sets are stored lowercased and mutually disjoint; removal is
    case-insensitive regardless of the ``lowercase`` output option.
    """

    language_keywords: frozenset[str]
    programming_words: frozenset[str]
    english_stopwords: frozenset[str]
    split_identifiers: bool = False
    lowercase: bool = True
    min_token_length: int = 2

    def __post_init__(self):
        if self.min_token_length < 0:
            raise ConfigError(f"min_token_length must be >= 0, got {self.min_token_length}")

    @classmethod
    def build(cls, language_keywords, programming_words, english_stopwords,
              split_identifiers: bool = False, lowercase: bool = True,
              min_token_length: int = 2) -> "FilterConfig":
        """Lowercase the three word sets and make them disjoint.

        Overlaps are kept in the earlier set (keywords win over programming
        words, which win over stop words) and dropped from the later one,
        with a warning naming the duplicates.
        """
        keywords = frozenset(w.lower() for w in language_keywords)
        progwords = set(w.lower() for w in programming_words)
        stopwords = set(w.lower() for w in english_stopwords)

        dropped = sorted(progwords & keywords) + sorted(stopwords & (keywords | progwords))
        if dropped:
            warnings.warn(
                "overlapping filter words kept in one set only: " + ", ".join(dropped),
                CloneMapWarning,
            )
        progwords -= keywords
        stopwords -= keywords | progwords
        return cls(
            language_keywords=keywords,
            programming_words=frozenset(progwords),
            english_stopwords=frozenset(stopwords),
            split_identifiers=split_identifiers,
            lowercase=lowercase,
            min_token_length=min_token_length,
        )

    def removes(self, word: str) -> bool:
        lowered = word.lower()
        return (
            lowered in self.language_keywords
            or lowered in self.programming_words
            or lowered in self.english_stopwords
        )


@dataclass(frozen=True)
class TokenDocument:
    """Ordered multiset of filtered words for one clone group."""

    group_ref: tuple[str, int] | None
    tokens: tuple[str, ...]

    @property
    def token_count(self) -> int:
        return len(self.tokens)

    def counts(self) -> Counter:
        return Counter(self.tokens)

    @classmethod
    def from_counts(cls, counts, group_ref=None) -> "TokenDocument":
        """Expand a word -> count mapping into a document (insertion order)."""
        tokens = []
        for word, count in counts.items():
            tokens.extend([word] * count)
        return cls(group_ref=group_ref, tokens=tuple(tokens))


def load_word_list(path: Path | str) -> frozenset[str]:
    """One word per line; blank lines and '#' comments are ignored."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            words.add(entry.lower())
    return frozenset(words)


def _packaged_list(name: str) -> frozenset[str]:
    text = resources.files("clonemap").joinpath("data", name).read_text(encoding="utf-8")
    words = set()
    for line in text.splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            words.add(entry.lower())
    return frozenset(words)


def _resolve_list(name: str, override: Path | str | None) -> frozenset[str]:
    if override is not None:
        return load_word_list(override)
    env_dir = os.environ.get(WORDLIST_DIR_ENV)
    if env_dir:
        candidate = Path(env_dir) / name
        if candidate.exists():
            return load_word_list(candidate)
    return _packaged_list(name)


def default_filter_config(language: str = "union",
                          keywords_path: Path | str | None = None,
                          progwords_path: Path | str | None = None,
                          stopwords_path: Path | str | None = None,
                          split_identifiers: bool = False,
                          lowercase: bool = True,
                          min_token_length: int = 2) -> FilterConfig:
    """Load the shipped word lists for ``language`` ("c", "java", or anything
    else for the union of both), honoring explicit path overrides first and
    the CLONEMAP_WORDLIST_DIR directory second."""
    if keywords_path is not None:
        keywords = load_word_list(keywords_path)
    elif language == "c":
        keywords = _resolve_list("keywords_c.txt", None)
    elif language == "java":
        keywords = _resolve_list("keywords_java.txt", None)
    else:
        keywords = _resolve_list("keywords_c.txt", None) | _resolve_list("keywords_java.txt", None)
    progwords = _resolve_list("progwords.txt", progwords_path)
    stopwords = _resolve_list("stopwords.txt", stopwords_path)
    return FilterConfig.build(
        keywords, progwords, stopwords,
        split_identifiers=split_identifiers,
        lowercase=lowercase,
        min_token_length=min_token_length,
    )


def strip_comments(text: str, comment_style: str = "c-like") -> str:
    """Remove C-style comments and string/char literal contents.

    ``//`` and ``/* */`` regions each become a single space. Comment markers
    inside string or character literals never start a comment; the literals
    themselves (quotes and contents) also collapse to a single space, since
    literal prose is not code structure. An unterminated block comment is
    stripped to end of input with a warning. Line structure outside comments
    is preserved.
    """
    if comment_style != "c-like":
        raise ConfigError(f"unsupported comment style {comment_style!r}")
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        nxt = text[i + 1] if i + 1 < n else ""
        if c == "/" and nxt == "/":
            out.append(" ")
            i += 2
            while i < n and text[i] != "\n":
                i += 1
        elif c == "/" and nxt == "*":
            out.append(" ")
            end = text.find("*/", i + 2)
            if end == -1:
                warnings.warn(
                    "unterminated block comment; stripped to end of input",
                    CloneMapWarning,
                )
                i = n
            else:
                i = end + 2
        elif c in ('"', "'"):
            # Literal runs to the matching quote, honoring backslash escapes;
            # an unterminated literal stops at end of line so the rest of the
            # input is not swallowed.
            out.append(" ")
            i += 1
            while i < n:
                ch = text[i]
                if ch == "\\" and i + 1 < n:
                    i += 2
                    continue
                if ch == c:
                    i += 1
                    break
                if ch == "\n":
                    break
                i += 1
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _identifier_parts(token: str) -> list[str]:
    parts = []
    for piece in token.split("_"):
        if piece:
            parts.extend(_CAMEL_RE.findall(piece))
    return parts


def tokenize(text: str, config: FilterConfig) -> TokenDocument:
    """Split on non-identifier characters and apply the removal rules.

    Tokens shorter than ``min_token_length``, tokens starting with a digit
    (numeric literals), and tokens in any removal set are dropped. With
    ``split_identifiers``, camelCase and snake_case names contribute both
    the compound and its parts. Assumes comments are already stripped.
    """
    tokens = []
    for raw in _WORD_RE.findall(text):
        candidates = [raw]
        if config.split_identifiers:
            parts = _identifier_parts(raw)
            if parts != [raw]:
                candidates.extend(parts)
        for cand in candidates:
            word = cand.lower() if config.lowercase else cand
            if len(word) < config.min_token_length:
                continue
            if word[0].isdigit():
                continue
            if config.removes(word):
                continue
            tokens.append(word)
    return TokenDocument(group_ref=None, tokens=tuple(tokens))


def build_group_document(group: CloneGroup, config: FilterConfig,
                         version_id: str | None = None) -> TokenDocument:
    """Concatenate the group's fragment texts, strip comments, tokenize."""
    text = group.concatenated_text()
    doc = tokenize(strip_comments(text), config)
    return replace(doc, group_ref=(version_id, group.index))

"""Symbol histograms and Shannon entropy in bits."""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Iterator, Mapping


class UnknownSymbolError(KeyError):
    """Raised when a symbol is looked up in a histogram that does not contain it."""

    def __init__(self, symbol: str):
        super().__init__(symbol)
        self.symbol = symbol


class HistogramUnderflowError(ValueError):
    """Raised when a delta removes more occurrences of a symbol than are present."""

    def __init__(self, symbol: str, present: int, removed: int):
        super().__init__(
            f"cannot remove {removed} x {symbol!r}: only {present} present"
        )
        self.symbol = symbol
        self.present = present
        self.removed = removed


class SymbolHistogram(Mapping[str, int]):
    """Immutable multiset of symbols.

    Keys with a zero count are never stored, and ``total`` is cached.
    """

    __slots__ = ("_counts", "_total")

    def __init__(self, counts: Mapping[str, int] | None = None):
        clean: dict[str, int] = {}
        for key, n in (counts or {}).items():
            if n < 0:
                raise ValueError(f"negative count for {key!r}: {n}")
            if n:
                clean[key] = int(n)
        self._counts = clean
        self._total = sum(clean.values())

    @classmethod
    def from_symbols(cls, symbols: Iterable[str]) -> "SymbolHistogram":
        return cls(Counter(symbols))

    @property
    def total(self) -> int:
        return self._total

    def __getitem__(self, symbol: str) -> int:
        return self._counts[symbol]

    def __iter__(self) -> Iterator[str]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SymbolHistogram):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self._counts == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._counts.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k!r}: {v}" for k, v in sorted(self._counts.items()))
        return f"SymbolHistogram({{{inner}}})"

    def to_dict(self) -> dict[str, int]:
        return dict(sorted(self._counts.items()))


def shannon_entropy(hist: Mapping[str, int]) -> float:
    """Entropy of the maximum-likelihood distribution of ``hist``, in bits.

    The empty histogram has entropy 0. Contributions are summed in ascending
    key order so results are reproducible bit for bit.
    """
    total = sum(hist.values())
    if total == 0:
        return 0.0
    h = 0.0
    for key in sorted(hist):
        n = hist[key]
        if n:
            p = n / total
            h -= p * math.log2(p)
    # a single-symbol distribution yields -0.0
    return h if h > 0.0 else 0.0


def symbol_contribution(hist: Mapping[str, int], symbol: str) -> float:
    """The ``-p log2 p`` term that ``symbol`` adds to the entropy of ``hist``."""
    n = hist.get(symbol, 0)
    if not n:
        raise UnknownSymbolError(symbol)
    p = n / sum(hist.values())
    c = -p * math.log2(p)
    return c if c > 0.0 else 0.0


def apply_delta(
    hist: SymbolHistogram,
    added: Mapping[str, int],
    removed: Mapping[str, int],
) -> SymbolHistogram:
    counts = Counter(hist)
    for key in sorted(removed):
        n = removed[key]
        if n > counts.get(key, 0):
            raise HistogramUnderflowError(key, counts.get(key, 0), n)
        counts[key] -= n
    for key, n in added.items():
        counts[key] += n
    return SymbolHistogram(counts)


def merge(h1: Mapping[str, int], h2: Mapping[str, int]) -> SymbolHistogram:
    counts = Counter(h1)
    counts.update(h2)
    return SymbolHistogram(counts)


def diff(old: Mapping[str, int], new: Mapping[str, int]) -> tuple[SymbolHistogram, SymbolHistogram]:
    """Return ``(added, removed)`` such that ``apply_delta(old, added, removed) == new``."""
    added: dict[str, int] = {}
    removed: dict[str, int] = {}
    for key in set(old) | set(new):
        d = new.get(key, 0) - old.get(key, 0)
        if d > 0:
            added[key] = d
        elif d < 0:
            removed[key] = -d
    return SymbolHistogram(added), SymbolHistogram(removed)

"""Reduced words over a signed alphabet.

Words and edge paths are plain Python strings over an internal alphabet:
slot i of a graph (or basis letter i of a free group) owns a forward
character FWD[i] and a backward character BWD[i].  Reversal of a path is
``invert``; free reduction is ``reduce_word``.  Using strings keeps the
hot operations (substring search, concatenation, counting) at C speed.
"""

from __future__ import annotations

import string

from .errors import InvalidInput

# 46 slots are plenty: graphs and roses in this library are desk scale.
FWD = string.ascii_lowercase + "0123456789!#$%&()*+"
BWD = string.ascii_uppercase + "<>?@[]^_{}~;:,=|-./"
MAX_SLOTS = len(FWD)
assert len(FWD) == len(BWD)

_SWAP = str.maketrans(FWD + BWD, BWD + FWD)
_INV = {**{f: b for f, b in zip(FWD, BWD)}, **{b: f for f, b in zip(FWD, BWD)}}
_SLOT = {**{c: i for i, c in enumerate(FWD)}, **{c: i for i, c in enumerate(BWD)}}
# Total order on oriented letters: slot-major, forward before backward.
_SORT = str.maketrans(
    {**{FWD[i]: chr(256 + 2 * i) for i in range(MAX_SLOTS)},
     **{BWD[i]: chr(256 + 2 * i + 1) for i in range(MAX_SLOTS)}}
)


def sort_key(word: str) -> str:
    return word.translate(_SORT)


def fwd(slot: int) -> str:
    return FWD[slot]


def bwd(slot: int) -> str:
    return BWD[slot]


def slot(ch: str) -> int:
    """Slot index of an oriented letter."""
    return _SLOT[ch]


def is_fwd(ch: str) -> bool:
    return ch in _SLOT and FWD[_SLOT[ch]] == ch


def inv_char(ch: str) -> str:
    return _INV[ch]


def invert(word: str) -> str:
    """Inverse word: reverse and flip every letter."""
    return word.translate(_SWAP)[::-1]


def reduce_word(word: str) -> str:
    """Free reduction: cancel adjacent inverse pairs until none remain."""
    out: list[str] = []
    push = out.append
    pop = out.pop
    inv = _INV
    for ch in word:
        if out and out[-1] == inv[ch]:
            pop()
        else:
            push(ch)
    return "".join(out)


def is_reduced(word: str) -> bool:
    return all(word[i + 1] != _INV[word[i]] for i in range(len(word) - 1))


def cyclic_reduce(word: str) -> str:
    """Cyclically reduced form: reduce, then strip cancelling end pairs."""
    w = reduce_word(word)
    i, j = 0, len(w)
    while j - i >= 2 and w[j - 1] == _INV[w[i]]:
        i += 1
        j -= 1
    return w[i:j]


def _least_rotation(s: str) -> int:
    """Booth's algorithm: index of the least rotation, linear time."""
    n = len(s)
    d = s + s
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = d[j]
        i = f[j - k - 1]
        while i != -1 and sj != d[k + i + 1]:
            if sj < d[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != d[k + i + 1]:
            if sj < d[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k % n


def canonical_cyclic(word: str) -> str:
    """Canonical representative of the cyclic class of ``word``.

    Least string (slot-major order, forward before backward) among all
    rotations of the cyclically reduced word and of its inverse.
    Identifies a class with its inverse; callers that care about
    orientation keep it separately.
    """
    w = cyclic_reduce(word)
    if not w:
        return ""
    t = sort_key(w)
    i = _least_rotation(t)
    best = w[i:] + w[:i]
    wi = invert(w)
    ti = sort_key(wi)
    j = _least_rotation(ti)
    best_inv = wi[j:] + wi[:j]
    return best if sort_key(best) <= sort_key(best_inv) else best_inv


def cyclic_contains(cyclic: str, segment: str) -> bool:
    """True if ``segment`` or its inverse occurs in the doubled cyclic word."""
    if not segment:
        return True
    if len(segment) > 2 * len(cyclic):
        return False
    doubled = cyclic + cyclic
    return segment in doubled or invert(segment) in doubled


def path_contains(path: str, segment: str) -> bool:
    """True if ``segment`` or its inverse is a subword of ``path``."""
    return segment in path or invert(segment) in path


def count_crossings(path: str, sl: int) -> int:
    """Number of times ``path`` crosses slot ``sl`` in either direction."""
    return path.count(FWD[sl]) + path.count(BWD[sl])


def letters_used(words) -> set[int]:
    used: set[int] = set()
    for w in words:
        for ch in w:
            used.add(_SLOT[ch])
    return used


def parse_word(tokens, names: dict[str, int]) -> str:
    """Build an internal word from user tokens.

    A token is a slot name, with a trailing apostrophe for the reversed
    letter ("B'" is the inverse of "B").
    """
    out = []
    for tok in tokens:
        rev = tok.endswith("'")
        name = tok[:-1] if rev else tok
        if name not in names:
            raise InvalidInput(f"unknown letter {name!r}")
        s = names[name]
        out.append(BWD[s] if rev else FWD[s])
    return "".join(out)


def print_word(word: str, names: list[str]) -> str:
    """Inverse of :func:`parse_word`: space-separated tokens."""
    toks = []
    for ch in word:
        s = _SLOT[ch]
        toks.append(names[s] if is_fwd(ch) else names[s] + "'")
    return " ".join(toks)

"""Package version model and the total order used for every "newer" judgment.

A version is an ``[epoch:]upstream[-revision]`` triple.  Comparison follows
the classic dpkg rules: epochs compare numerically, then upstream and
revision each compare by alternating non-digit and digit runs, where digit
runs compare numerically, letters sort before non-letters, and ``~`` sorts
before everything including the end of the string.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cmp_to_key

from .errors import BadEpochError, EmptyVersionError, IllegalCharacterError

MAX_EPOCH = 2**31 - 1

_UPSTREAM_CHARS = re.compile(r"[A-Za-z0-9.+~:-]*\Z")
_REVISION_CHARS = re.compile(r"[A-Za-z0-9.+~]*\Z")


@dataclass(frozen=True, order=False)
class Version:
    upstream: str
    revision: str = ""
    epoch: int = 0

    def __post_init__(self):
        if not self.upstream:
            raise EmptyVersionError("empty upstream part")
        if not 0 <= self.epoch <= MAX_EPOCH:
            raise BadEpochError(f"epoch {self.epoch} out of range")
        if not self.upstream[0].isalnum():
            raise IllegalCharacterError("upstream must start alphanumeric", 0)
        if not _UPSTREAM_CHARS.match(self.upstream):
            off = _first_bad(self.upstream, "A-Za-z0-9.+~:-")
            raise IllegalCharacterError(f"illegal character {self.upstream[off]!r} in upstream", off)
        if ":" in self.upstream and self.epoch == 0:
            raise IllegalCharacterError("':' in upstream requires an epoch", self.upstream.index(":"))
        if "-" in self.upstream and not self.revision:
            raise IllegalCharacterError("'-' in upstream requires a revision", self.upstream.index("-"))
        if not _REVISION_CHARS.match(self.revision):
            off = _first_bad(self.revision, "A-Za-z0-9.+~")
            raise IllegalCharacterError(f"illegal character {self.revision[off]!r} in revision", off)

    def __str__(self) -> str:
        text = self.upstream
        if self.epoch:
            text = f"{self.epoch}:{text}"
        if self.revision:
            text = f"{text}-{self.revision}"
        return text

    def __lt__(self, other: "Version") -> bool:
        return compare_versions(self, other) < 0

    def __le__(self, other: "Version") -> bool:
        return compare_versions(self, other) <= 0

    def __gt__(self, other: "Version") -> bool:
        return compare_versions(self, other) > 0

    def __ge__(self, other: "Version") -> bool:
        return compare_versions(self, other) >= 0


def _first_bad(text: str, charset_desc: str) -> int:
    allowed = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789.+~")
    if ":" in charset_desc:
        allowed.add(":")
    if "-" in charset_desc:
        allowed.add("-")
    for i, ch in enumerate(text):
        if ch not in allowed:
            return i
    return 0


def parse_version(text: str) -> Version:
    """Parse ``[epoch:]upstream[-revision]``.

    The epoch is everything before the first ``:`` (must be all digits), the
    revision everything after the last ``-``; the remainder is the upstream
    part.
    """
    if not text:
        raise EmptyVersionError("empty version string")
    epoch = 0
    rest = text
    if ":" in text:
        head, rest = text.split(":", 1)
        if not head.isdigit():
            raise BadEpochError(f"non-numeric epoch {head!r}")
        epoch = int(head)
        if epoch > MAX_EPOCH:
            raise BadEpochError(f"epoch {head} out of range")
    if "-" in rest:
        upstream, revision = rest.rsplit("-", 1)
        if not revision:
            raise EmptyVersionError(f"empty revision part in {text!r}")
    else:
        upstream, revision = rest, ""
    if not upstream:
        raise EmptyVersionError(f"empty upstream part in {text!r}")
    try:
        return Version(upstream=upstream, revision=revision, epoch=epoch)
    except IllegalCharacterError as err:
        # re-anchor the offset to the original string
        base = len(text) - len(rest)
        if "-" in rest and err.offset < len(revision) and rest.endswith(revision) and "revision" in err.message:
            offset = base + len(upstream) + 1 + err.offset
        else:
            offset = base + err.offset
        raise IllegalCharacterError(err.message, offset) from None


def _char_order(ch: str) -> int:
    # tilde sorts before everything, including end of string (order 0)
    if ch == "~":
        return -1
    if ch.isalpha():
        return ord(ch)
    return ord(ch) + 256


def _compare_part(a: str, b: str) -> int:
    """dpkg segment rule: alternate non-digit and digit runs."""
    i = j = 0
    while i < len(a) or j < len(b):
        # non-digit run, character-wise
        while (i < len(a) and not a[i].isdigit()) or (j < len(b) and not b[j].isdigit()):
            ca = _char_order(a[i]) if i < len(a) and not a[i].isdigit() else 0
            cb = _char_order(b[j]) if j < len(b) and not b[j].isdigit() else 0
            if ca != cb:
                return -1 if ca < cb else 1
            if i < len(a) and not a[i].isdigit():
                i += 1
            if j < len(b) and not b[j].isdigit():
                j += 1
        # digit run, numeric
        da = i
        while i < len(a) and a[i].isdigit():
            i += 1
        db = j
        while j < len(b) and b[j].isdigit():
            j += 1
        na = int(a[da:i]) if i > da else 0
        nb = int(b[db:j]) if j > db else 0
        if na != nb:
            return -1 if na < nb else 1
    return 0


def compare_versions(a: Version, b: Version) -> int:
    """Total order over versions; returns -1, 0 or 1."""
    if a.epoch != b.epoch:
        return -1 if a.epoch < b.epoch else 1
    result = _compare_part(a.upstream, b.upstream)
    if result:
        return result
    return _compare_part(a.revision, b.revision)


version_sort_key = cmp_to_key(compare_versions)


def max_version(versions) -> Version | None:
    """Highest version by compare_versions, or None for an empty iterable."""
    best: Version | None = None
    for v in versions:
        if best is None or compare_versions(v, best) > 0:
            best = v
    return best

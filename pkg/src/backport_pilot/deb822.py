"""Stanza-based control-file format.

One grammar serves the package indices, the ledger file, the repository
configuration and the release calendar: stanzas are runs of ``Name: value``
field lines separated by blank lines.  A line starting with space or tab
continues the previous field; a continuation line of ``" ."`` stands for a
blank line inside the value.  Comment lines are rejected rather than
skipped, because the files this tool reads never legitimately contain them
and silently dropping lines hides corruption.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DuplicateFieldError, InvalidFieldNameError, MalformedFieldError

# printable ASCII except colon; '#' additionally banned at the start so that
# serialized output can never look like a comment line
_FIELD_NAME = re.compile(r"[!-9;-~]+\Z")


@dataclass
class Stanza:
    """An ordered list of (name, value) fields.

    Lookup is case-insensitive; the original casing is preserved for
    serialization.  Multi-line values hold embedded newlines.
    """

    fields: list[tuple[str, str]] = field(default_factory=list)

    def get(self, name: str, default: str | None = None) -> str | None:
        low = name.lower()
        for key, value in self.fields:
            if key.lower() == low:
                return value
        return default

    def __contains__(self, name: str) -> bool:
        return self.get(name) is not None

    def __getitem__(self, name: str) -> str:
        value = self.get(name)
        if value is None:
            raise KeyError(name)
        return value

    def add(self, name: str, value: str) -> None:
        if self.get(name) is not None:
            raise DuplicateFieldError(f"duplicate field {name!r}")
        self.fields.append((name, value))


def parse_stanzas(text: str) -> list[Stanza]:
    """Parse text into stanzas; raises a located error on malformed lines."""
    text = text.replace("\r\n", "\n")
    stanzas: list[Stanza] = []
    current: Stanza | None = None
    pending: tuple[str, list[str]] | None = None  # field being accumulated

    def flush_field():
        nonlocal pending
        if pending is not None and current is not None:
            name, lines = pending
            if current.get(name) is not None:
                raise DuplicateFieldError(f"duplicate field {name!r}")
            current.fields.append((name, "\n".join(lines)))
        pending = None

    def flush_stanza():
        nonlocal current
        flush_field()
        if current is not None and current.fields:
            stanzas.append(current)
        current = None

    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip()
        if "\x00" in line:
            raise MalformedFieldError("NUL byte in input", lineno)
        if not line:
            flush_stanza()
            continue
        if line.startswith("#"):
            raise MalformedFieldError("comment lines are not allowed", lineno)
        if line[0] in " \t":
            if pending is None:
                raise MalformedFieldError("continuation without a preceding field", lineno)
            content = line[1:]
            pending[1].append("" if content == "." else content)
            continue
        if ":" not in line:
            raise MalformedFieldError(f"expected 'Name: value', got {line!r}", lineno)
        name, _, rest = line.partition(":")
        if not _FIELD_NAME.match(name):
            raise MalformedFieldError(f"invalid field name {name!r}", lineno)
        flush_field()
        if current is None:
            current = Stanza()
        pending = (name, [rest.lstrip(" \t")])
    flush_stanza()
    return stanzas


def serialize_stanzas(stanzas: list[Stanza]) -> str:
    """Render stanzas so that parse_stanzas(result) round-trips.

    One blank line between stanzas; continuation lines get a single leading
    space; blank value lines are emitted as `` .``.
    """
    blocks = []
    for stanza in stanzas:
        lines = []
        for name, value in stanza.fields:
            if not _FIELD_NAME.match(name) or name.startswith("#"):
                raise InvalidFieldNameError(f"invalid field name {name!r}")
            first, *rest = value.split("\n")
            lines.append(f"{name}: {first}" if first else f"{name}:")
            for cont in rest:
                lines.append(f" {cont}" if cont else " .")
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def serialize_stanza(stanza: Stanza) -> str:
    return serialize_stanzas([stanza])

"""Dependency relation fields and satisfiability against a package universe.

A relation field is a comma-separated list of clauses; each clause is a
``|``-separated list of alternatives ``name (op version)``.  Architecture
qualifiers (``[amd64]``) and build profiles (``<!nocheck>``) are parsed and
preserved on the atom but never influence satisfiability; the feasibility
report surfaces them so the operator can see what was ignored.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable

from .errors import (
    BadNameError,
    BadOperatorError,
    EmptyAlternativeError,
    UnbalancedParenthesisError,
)
from .version import Version, compare_versions, parse_version

log = logging.getLogger(__name__)

OPERATORS = ("<<", "<=", "=", ">=", ">>")

_NAME = re.compile(r"[a-z0-9][a-z0-9.+-]+\Z")
_ATOM = re.compile(
    r"""
    (?P<name>\S+?)
    (?:\s*\(\s*(?P<op><<|<=|=|>=|>>|[<>=!~]+)\s*(?P<ver>[^()\s]+)\s*\))?
    (?P<tail>(?:\s*(?:\[[^\]]*\]|<[^>]*>))*)
    \Z
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class DependencyAtom:
    name: str
    operator: str | None = None
    version: Version | None = None
    qualifiers: tuple[str, ...] = ()

    def __str__(self) -> str:
        text = self.name
        if self.operator:
            text += f" ({self.operator} {self.version})"
        for q in self.qualifiers:
            text += f" {q}"
        return text


@dataclass(frozen=True)
class DependencyClause:
    alternatives: tuple[DependencyAtom, ...]

    def __post_init__(self):
        if not self.alternatives:
            raise EmptyAlternativeError("clause with no alternatives")

    def __str__(self) -> str:
        return " | ".join(str(a) for a in self.alternatives)


def _parse_atom(text: str, context: str) -> DependencyAtom:
    text = text.strip()
    if not text:
        raise EmptyAlternativeError(f"empty alternative in {context!r}")
    if text.count("(") != text.count(")"):
        raise UnbalancedParenthesisError(f"unbalanced parenthesis in {text!r}")
    m = _ATOM.match(text)
    if not m:
        raise BadNameError(f"cannot parse dependency atom {text!r}")
    name = m.group("name")
    if not _NAME.match(name):
        raise BadNameError(f"bad package name {name!r}")
    operator = m.group("op")
    version = None
    if operator is not None:
        if operator not in OPERATORS:
            raise BadOperatorError(f"bad operator {operator!r} in {text!r}")
        version = parse_version(m.group("ver"))
    qualifiers = tuple(re.findall(r"\[[^\]]*\]|<[^>]*>", m.group("tail") or ""))
    if qualifiers:
        log.warning("ignoring qualifiers %s on %r", " ".join(qualifiers), name)
    return DependencyAtom(name=name, operator=operator, version=version, qualifiers=qualifiers)


def parse_relations(field_text: str) -> list[DependencyClause]:
    """Parse a Depends/Build-Depends style field into clauses."""
    field_text = field_text.strip()
    if not field_text:
        return []
    clauses = []
    for chunk in field_text.split(","):
        if not chunk.strip():
            raise EmptyAlternativeError(f"empty clause in {field_text!r}")
        atoms = tuple(_parse_atom(alt, chunk.strip()) for alt in chunk.split("|"))
        clauses.append(DependencyClause(alternatives=atoms))
    return clauses


def render_relations(clauses: Iterable[DependencyClause]) -> str:
    """Canonical renderer; parse_relations(render_relations(c)) == c."""
    return ", ".join(str(c) for c in clauses)


def _constraint_ok(operator: str, candidate: Version, wanted: Version) -> bool:
    result = compare_versions(candidate, wanted)
    if operator == "<<":
        return result < 0
    if operator == "<=":
        return result <= 0
    if operator == "=":
        return result == 0
    if operator == ">=":
        return result >= 0
    return result > 0


Universe = Iterable[tuple[str, Version, frozenset]]


def atom_satisfied(atom: DependencyAtom, universe: Universe) -> str | None:
    """Name of a package satisfying the atom, or None.

    A versioned atom is satisfied only by a real package of that name whose
    version passes the constraint; an unversioned atom is also satisfied by
    any package that Provides the name.
    """
    for name, version, provides in sorted(universe, key=lambda p: (p[0], str(p[1]))):
        if atom.operator is None:
            if name == atom.name or atom.name in provides:
                return name
        elif name == atom.name and _constraint_ok(atom.operator, version, atom.version):
            return name
    return None


def clause_satisfied(clause: DependencyClause, universe: Universe) -> tuple[bool, str | None]:
    """True plus a witness package name if any alternative is satisfied."""
    pool = list(universe)
    for atom in clause.alternatives:
        witness = atom_satisfied(atom, pool)
        if witness is not None:
            return True, witness
    return False, None


def unsatisfied_build_deps(source_pkg, universe: Universe) -> list[DependencyClause]:
    """Clauses of the source package's Build-Depends not satisfiable in universe.

    An empty result means the build is likely feasible; the ledger records
    what actually happened.
    """
    pool = list(universe)
    return [c for c in source_pkg.build_depends if not clause_satisfied(c, pool)[0]]

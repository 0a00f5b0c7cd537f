"""Backport candidate selection.

A package is a candidate when a newer release carries it, the target LTS
does not, and no enabled extra repository does.  Presence in the target at
any version excludes: existing software is never upgraded, for stability.
The chosen source is the lowest-positioned release that carries the
package, which minimizes the number of backport hops.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .catalog import Catalog, availability
from .errors import BadNameError, NoSourceReleaseError
from .version import Version

_NAME = re.compile(r"[a-z0-9][a-z0-9.+-]+\Z")

CANDIDATE = "candidate"
EXCLUDED = "excluded"

REASON_IN_TARGET = "present-in-target"
REASON_IN_EXTRA = "present-in-enabled-extra"
REASON_NOT_FOUND = "not-found"


@dataclass(frozen=True)
class WatchList:
    names: frozenset

    @classmethod
    def parse(cls, text: str) -> "WatchList":
        """One package name per line; ``#`` starts a comment."""
        names = set()
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if not _NAME.match(line):
                raise BadNameError(f"bad package name {line!r} in watch list")
            names.add(line)
        return cls(names=frozenset(names))


@dataclass(frozen=True)
class CandidateDecision:
    name: str
    decision: str  # candidate | excluded
    source_repo_id: str | None = None
    version: Version | None = None
    reason: str | None = None
    reason_repo_id: str | None = None
    availability: dict[str, Version | None] = field(default_factory=dict)

    @property
    def is_candidate(self) -> bool:
        return self.decision == CANDIDATE


def select_candidates(catalog: Catalog, watch: WatchList | None = None) -> list[CandidateDecision]:
    """Decide candidate or excluded for every package in the pool.

    The pool is the watch list when given, otherwise every name present in
    any source release.  Output is sorted by name and deterministic.
    """
    releases = catalog.source_releases
    if not releases:
        raise NoSourceReleaseError("no source-release repository configured")

    if watch is not None:
        pool = set(watch.names)
    else:
        pool = set()
        for repo in releases:
            pool.update(catalog.binary_names(repo.id))

    target = catalog.target
    extras = catalog.extras_enabled
    decisions = []
    for name in sorted(pool):
        avail = availability(catalog, name)
        if avail[target.id] is not None:
            decisions.append(
                CandidateDecision(
                    name=name,
                    decision=EXCLUDED,
                    reason=REASON_IN_TARGET,
                    reason_repo_id=target.id,
                    availability=avail,
                )
            )
            continue
        extra_hit = next((r for r in extras if avail[r.id] is not None), None)
        if extra_hit is not None:
            decisions.append(
                CandidateDecision(
                    name=name,
                    decision=EXCLUDED,
                    reason=f"{REASON_IN_EXTRA}:{extra_hit.id}",
                    reason_repo_id=extra_hit.id,
                    availability=avail,
                )
            )
            continue
        source = next((r for r in releases if avail[r.id] is not None), None)
        if source is None:
            decisions.append(
                CandidateDecision(name=name, decision=EXCLUDED, reason=REASON_NOT_FOUND, availability=avail)
            )
            continue
        decisions.append(
            CandidateDecision(
                name=name,
                decision=CANDIDATE,
                source_repo_id=source.id,
                version=avail[source.id],
                availability=avail,
            )
        )
    return decisions


def explain(decision: CandidateDecision, target_id: str = "") -> str:
    """One line naming the rule that fired and its witness."""
    if decision.is_candidate:
        absent = f"absent from {target_id} and all enabled repos" if target_id else "absent from target and all enabled repos"
        return (
            f"{decision.name}: candidate — newest in {decision.source_repo_id} "
            f"({decision.version}), {absent}"
        )
    if decision.reason == REASON_NOT_FOUND:
        return f"{decision.name}: excluded — not found in any source release"
    if decision.reason == REASON_IN_TARGET:
        version = decision.availability.get(decision.reason_repo_id)
        return f"{decision.name}: excluded — already in {decision.reason_repo_id} ({version})"
    version = decision.availability.get(decision.reason_repo_id)
    return f"{decision.name}: excluded — available from {decision.reason_repo_id} ({version})"

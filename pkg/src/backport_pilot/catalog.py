"""The configured repository landscape and per-package availability.

A catalog maps repository id to the packages it carries, at one configured
architecture (``all`` packages are always kept).  Catalog values are
immutable: ingesting an index returns a new catalog and leaves the old one
usable.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field, replace

from . import deb822
from .depends import DependencyClause, parse_relations
from .errors import (
    BadNameError,
    BadStanzaError,
    BrokenChainError,
    DuplicateRepoIdError,
    MissingFieldError,
    NoTargetError,
    UnknownRepoError,
)
from .version import Version, max_version, parse_version

ROLE_TARGET = "target"
ROLE_SOURCE_RELEASE = "source-release"
ROLE_EXTRA_ENABLED = "extra-enabled"
ROLE_EXTRA_DISABLED = "extra-disabled"
ROLES = (ROLE_TARGET, ROLE_SOURCE_RELEASE, ROLE_EXTRA_ENABLED, ROLE_EXTRA_DISABLED)

_PKG_NAME = re.compile(r"[a-z0-9][a-z0-9.+-]+\Z")


@dataclass(frozen=True)
class Repository:
    id: str
    url: str
    role: str
    dist: str = ""
    components: tuple[str, ...] = ()
    position: int | None = None
    label: str = ""
    flat: bool = False
    strict_checksums: bool = False

    @property
    def display_label(self) -> str:
        return self.label or self.id

    @property
    def is_release(self) -> bool:
        return self.role in (ROLE_TARGET, ROLE_SOURCE_RELEASE)

    @property
    def is_local(self) -> bool:
        return "://" not in self.url or self.url.startswith("file://")

    @property
    def local_path(self) -> str:
        return self.url[7:] if self.url.startswith("file://") else self.url


@dataclass(frozen=True)
class PackageRecord:
    name: str
    version: Version
    architecture: str = "all"
    depends: tuple[DependencyClause, ...] = ()
    provides: frozenset = frozenset()
    source_name: str | None = None


@dataclass(frozen=True)
class SourcePackage:
    name: str
    version: Version
    build_depends: tuple[DependencyClause, ...] = ()
    binaries: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.binaries:
            object.__setattr__(self, "binaries", (self.name,))


def _parse_bool(value: str | None, default: bool = False) -> bool:
    if value is None:
        return default
    return value.strip().lower() in ("yes", "true", "1")


def load_config(text: str) -> list[Repository]:
    """Parse and validate the repository configuration."""
    repos: list[Repository] = []
    for stanza in deb822.parse_stanzas(text):
        repo_id = stanza.get("Repo")
        role = stanza.get("Role")
        url = stanza.get("URL")
        if not repo_id:
            raise MissingFieldError("stanza without a Repo field")
        if not role:
            raise MissingFieldError(f"{repo_id}: missing Role")
        if role not in ROLES:
            raise MissingFieldError(f"{repo_id}: invalid Role {role!r} (expected one of {', '.join(ROLES)})")
        if not url:
            raise MissingFieldError(f"{repo_id}: missing URL")
        flat = _parse_bool(stanza.get("Flat"))
        dist = stanza.get("Dist", "") or ""
        components = tuple((stanza.get("Components") or "").split())
        if not flat:
            if not dist:
                raise MissingFieldError(f"{repo_id}: missing Dist (required unless Flat: yes)")
            if not components:
                raise MissingFieldError(f"{repo_id}: missing Components (required unless Flat: yes)")
        position = None
        if stanza.get("Position") is not None:
            try:
                position = int(stanza["Position"])
            except ValueError:
                raise BrokenChainError(f"{repo_id}: Position must be an integer") from None
        repos.append(
            Repository(
                id=repo_id,
                url=url,
                role=role,
                dist=dist,
                components=components,
                position=position,
                label=stanza.get("Label", "") or "",
                flat=flat,
                strict_checksums=_parse_bool(stanza.get("Strict-Checksums")),
            )
        )

    seen = set()
    for repo in repos:
        if repo.id in seen:
            raise DuplicateRepoIdError(f"repository id {repo.id!r} appears twice")
        seen.add(repo.id)

    targets = [r for r in repos if r.role == ROLE_TARGET]
    if len(targets) != 1:
        raise NoTargetError(f"exactly one target repository required, found {len(targets)}")
    target = targets[0]
    if target.position not in (None, 0):
        raise BrokenChainError(f"target {target.id} must have position 0, not {target.position}")
    if target.position is None:
        repos[repos.index(target)] = replace(target, position=0)

    sources = [r for r in repos if r.role == ROLE_SOURCE_RELEASE]
    positions = sorted(r.position for r in sources if r.position is not None)
    if len(positions) != len(sources):
        raise BrokenChainError("every source-release repository needs a Position")
    if positions != list(range(1, len(sources) + 1)):
        raise BrokenChainError(f"source-release positions {positions} are not contiguous from 1")
    for repo in repos:
        if not repo.is_release and repo.position is not None:
            raise BrokenChainError(f"{repo.id}: Position is only valid on releases")
    return repos


def resolve_repo_paths(repos: list[Repository], base_dir: str) -> list[Repository]:
    """Resolve relative local-path URLs against base_dir (the config's home)."""
    out = []
    for repo in repos:
        if repo.is_local and not os.path.isabs(repo.local_path):
            out.append(replace(repo, url=os.path.join(base_dir, repo.local_path)))
        else:
            out.append(repo)
    return out


@dataclass(frozen=True)
class Catalog:
    repositories: tuple[Repository, ...]
    architecture: str = "amd64"
    binaries: dict = field(default_factory=dict)  # repo_id -> {name: tuple[PackageRecord]}
    sources: dict = field(default_factory=dict)  # repo_id -> {name: SourcePackage}

    @classmethod
    def empty(cls, repositories, architecture: str = "amd64") -> "Catalog":
        return cls(repositories=tuple(repositories), architecture=architecture)

    def repo(self, repo_id: str) -> Repository:
        for repo in self.repositories:
            if repo.id == repo_id:
                return repo
        raise UnknownRepoError(f"repository {repo_id!r} is not configured")

    @property
    def target(self) -> Repository:
        return next(r for r in self.repositories if r.role == ROLE_TARGET)

    @property
    def source_releases(self) -> list[Repository]:
        return sorted(
            (r for r in self.repositories if r.role == ROLE_SOURCE_RELEASE),
            key=lambda r: r.position,
        )

    @property
    def extras_enabled(self) -> list[Repository]:
        return [r for r in self.repositories if r.role == ROLE_EXTRA_ENABLED]

    @property
    def release_chain(self) -> list[Repository]:
        """Target plus source releases, ordered by position."""
        return sorted((r for r in self.repositories if r.is_release), key=lambda r: r.position)

    def records(self, repo_id: str, name: str) -> tuple[PackageRecord, ...]:
        return self.binaries.get(repo_id, {}).get(name, ())

    def binary_names(self, repo_id: str):
        return self.binaries.get(repo_id, {}).keys()

    def binary_universe(self, repo_id: str) -> list[tuple[str, Version, frozenset]]:
        """(name, version, provides) triples for satisfiability checks."""
        out = []
        for records in self.binaries.get(repo_id, {}).values():
            for rec in records:
                out.append((rec.name, rec.version, rec.provides))
        return out

    def source_record(self, repo_id: str, name: str) -> SourcePackage | None:
        """Source package named name, or the one building binary name."""
        per_repo = self.sources.get(repo_id, {})
        if name in per_repo:
            return per_repo[name]
        for src in per_repo.values():
            if name in src.binaries:
                return src
        return None


def _record_from_stanza(stanza: deb822.Stanza, index: int) -> PackageRecord:
    name = stanza.get("Package")
    raw_version = stanza.get("Version")
    if not name or not raw_version:
        raise BadStanzaError("missing Package or Version field", index)
    if not _PKG_NAME.match(name):
        raise BadStanzaError(f"bad package name {name!r}", index)
    try:
        version = parse_version(raw_version)
        depends = tuple(parse_relations(stanza.get("Depends", "") or ""))
        provides = _parse_provides(stanza.get("Provides", "") or "")
    except BadStanzaError:
        raise
    except Exception as err:
        raise BadStanzaError(f"package {name}: {err}", index) from err
    source_name = None
    if stanza.get("Source"):
        source_name = stanza["Source"].split("(")[0].strip()
    return PackageRecord(
        name=name,
        version=version,
        architecture=stanza.get("Architecture", "all") or "all",
        depends=depends,
        provides=provides,
        source_name=source_name,
    )


def _parse_provides(text: str) -> frozenset:
    names = set()
    for chunk in text.split(","):
        chunk = chunk.split("(")[0].strip()
        if not chunk:
            continue
        if not _PKG_NAME.match(chunk):
            raise BadNameError(f"bad provides name {chunk!r}")
        names.add(chunk)
    return frozenset(names)


def ingest_index(catalog: Catalog, repo_id: str, stanzas: list[deb822.Stanza]) -> Catalog:
    """Add a binary Packages index to the catalog; returns a new catalog.

    Records of a different architecture than the configured one are skipped;
    ``all`` packages are always kept.
    """
    catalog.repo(repo_id)
    per_repo = dict(catalog.binaries.get(repo_id, {}))
    for index, stanza in enumerate(stanzas):
        record = _record_from_stanza(stanza, index)
        if record.architecture not in (catalog.architecture, "all"):
            continue
        existing = per_repo.get(record.name, ())
        for other in existing:
            if (other.version, other.architecture) == (record.version, record.architecture):
                raise BadStanzaError(
                    f"duplicate {record.name} {record.version} [{record.architecture}] in {repo_id}", index
                )
        per_repo[record.name] = existing + (record,)
    binaries = dict(catalog.binaries)
    binaries[repo_id] = per_repo
    return replace(catalog, binaries=binaries)


def ingest_sources(catalog: Catalog, repo_id: str, stanzas: list[deb822.Stanza]) -> Catalog:
    """Add a Sources index to the catalog; returns a new catalog."""
    catalog.repo(repo_id)
    per_repo = dict(catalog.sources.get(repo_id, {}))
    for index, stanza in enumerate(stanzas):
        name = stanza.get("Package")
        raw_version = stanza.get("Version")
        if not name or not raw_version:
            raise BadStanzaError("missing Package or Version field", index)
        try:
            version = parse_version(raw_version)
            build_depends = tuple(parse_relations(stanza.get("Build-Depends", "") or ""))
        except Exception as err:
            raise BadStanzaError(f"source {name}: {err}", index) from err
        binaries = tuple(b.strip() for b in (stanza.get("Binary") or name).split(",") if b.strip())
        per_repo[name] = SourcePackage(name=name, version=version, build_depends=build_depends, binaries=binaries)
    sources = dict(catalog.sources)
    sources[repo_id] = per_repo
    return replace(catalog, sources=sources)


def availability(catalog: Catalog, name: str) -> dict[str, Version | None]:
    """Highest available version per configured repository (None if absent)."""
    out: dict[str, Version | None] = {}
    for repo in catalog.repositories:
        records = catalog.records(repo.id, name)
        out[repo.id] = max_version(r.version for r in records) if records else None
    return out

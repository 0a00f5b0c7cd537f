"""Fetch repository index files into a verified local cache.

Remote repositories are fetched over HTTP with If-Modified-Since
revalidation and SHA-256 verification against the repository's Release
file when one exists.  Local-path repositories are read directly, which
keeps the whole pipeline runnable without any network access.  Cache
updates are atomic (write to temp file, then rename), so a checksum
mismatch or a crash never leaves a partial entry behind.
"""

from __future__ import annotations

import concurrent.futures
import gzip
import hashlib
import logging
import os
import tempfile
import time
from dataclasses import dataclass

import requests

from . import catalog as catalog_mod
from . import deb822
from .catalog import Catalog, Repository
from .errors import (
    BadDigestFormatError,
    ChecksumMismatchError,
    DecompressError,
    NetworkError,
    NotInCacheError,
    UnknownRepoError,
)

log = logging.getLogger(__name__)

KIND_BINARY = "binary-packages"
KIND_SOURCES = "sources"

_HEX = set("0123456789abcdef")


@dataclass(frozen=True)
class IndexDescriptor:
    repo_id: str
    component: str
    kind: str  # binary-packages | sources
    architecture: str = ""

    def __post_init__(self):
        if self.kind not in (KIND_BINARY, KIND_SOURCES):
            raise ValueError(f"unknown index kind {self.kind!r}")
        if self.kind == KIND_SOURCES and self.architecture:
            raise ValueError("sources indices carry no architecture")
        if self.kind == KIND_BINARY and not self.architecture:
            raise ValueError("binary index needs an architecture")


@dataclass(frozen=True)
class CacheEntry:
    repo_id: str
    path: str
    sha256: str
    fetched_at: str
    size: int


def verify_checksum(data: bytes, expected_hex: str) -> tuple[bool, str]:
    """SHA-256 equality check; returns (ok, actual_hex)."""
    expected_hex = expected_hex.lower()
    if len(expected_hex) != 64 or not set(expected_hex) <= _HEX:
        raise BadDigestFormatError(f"expected 64 hex characters, got {expected_hex!r}")
    actual = hashlib.sha256(data).hexdigest()
    return actual == expected_hex, actual


def _index_relpath(repo: Repository, desc: IndexDescriptor) -> str:
    """Path of the index below the repository base, without compression suffix."""
    name = "Packages" if desc.kind == KIND_BINARY else "Sources"
    if repo.flat:
        return name
    sub = f"binary-{desc.architecture}" if desc.kind == KIND_BINARY else "source"
    return f"dists/{repo.dist}/{desc.component}/{sub}/{name}"


def _release_relpath(repo: Repository) -> str:
    return "Release" if repo.flat else f"dists/{repo.dist}/Release"


def _release_key(repo: Repository, index_relpath: str) -> str:
    """The path the Release file uses for this index (relative to itself)."""
    if repo.flat:
        return index_relpath
    return index_relpath[len(f"dists/{repo.dist}/"):]


def _cache_dir_for(cache_dir: str, repo: Repository, desc: IndexDescriptor) -> str:
    dist = repo.dist if not repo.flat else "flat"
    component = desc.component or "flat"
    return os.path.join(cache_dir, repo.id, dist, component)


def _decompress(raw: bytes, compressed: bool) -> bytes:
    if not compressed:
        return raw
    try:
        return gzip.decompress(raw)
    except (OSError, EOFError) as err:
        raise DecompressError(f"bad gzip data: {err}") from err


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as err:
        raise DecompressError(f"index is not valid UTF-8: {err}") from err


def _atomic_write(path: str, data: bytes) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _HttpFetcher:
    """Thin wrapper so tests can substitute a fake transport."""

    def get(self, url: str, headers: dict | None = None):
        try:
            response = requests.get(url, headers=headers or {}, timeout=60)
        except requests.RequestException as err:
            raise NetworkError(f"GET {url}: {err}") from err
        return response.status_code, dict(response.headers), response.content


def _find_repo(repos, repo_id: str) -> Repository:
    for repo in repos:
        if repo.id == repo_id:
            return repo
    raise UnknownRepoError(f"repository {repo_id!r} is not configured")


def _read_local(repo: Repository, relpath: str) -> tuple[bytes, str] | None:
    """Returns (raw bytes, actual relpath) for plain or .gz variant, or None."""
    for candidate, compressed in ((relpath, False), (relpath + ".gz", True)):
        full = os.path.join(repo.local_path, candidate)
        if os.path.exists(full):
            with open(full, "rb") as handle:
                return handle.read(), candidate
    return None


def _load_release(repo: Repository, fetcher, offline: bool) -> dict[str, str] | None:
    """Map of path -> sha256 from the repo's Release file, or None."""
    relpath = _release_relpath(repo)
    raw = None
    if repo.is_local:
        found = _read_local(repo, relpath)
        if found:
            raw = found[0]
    elif not offline:
        url = repo.url.rstrip("/") + "/" + relpath
        try:
            status, _, body = fetcher.get(url)
        except NetworkError:
            return None
        if status == 200:
            raw = body
    if raw is None:
        return None
    digests: dict[str, str] = {}
    for stanza in deb822.parse_stanzas(_decode(raw)):
        sha_field = stanza.get("SHA256")
        if not sha_field:
            continue
        for line in sha_field.split("\n"):
            parts = line.split()
            if len(parts) == 3:
                digests[parts[2]] = parts[0].lower()
    return digests


def _verify_against_release(repo: Repository, relpath_fetched: str, raw: bytes, digests: dict | None) -> None:
    if digests is None:
        if repo.strict_checksums:
            raise ChecksumMismatchError("(Release digest)", "(no Release file)", relpath_fetched)
        log.warning("%s: no Release file, skipping checksum verification", repo.id)
        return
    key = _release_key(repo, relpath_fetched)
    expected = digests.get(key)
    if expected is None:
        if repo.strict_checksums:
            raise ChecksumMismatchError("(Release digest)", "(not listed)", relpath_fetched)
        log.warning("%s: %s not listed in Release, skipping verification", repo.id, key)
        return
    ok, actual = verify_checksum(raw, expected)
    if not ok:
        raise ChecksumMismatchError(expected, actual, relpath_fetched)


def fetch_index(
    desc: IndexDescriptor,
    repos,
    cache_dir: str,
    offline: bool = False,
    fetcher=None,
) -> str:
    """Return the decompressed text of one index file.

    Local-path repositories are read directly.  Remote repositories go
    through the cache: online fetches revalidate with If-Modified-Since and
    update the cache atomically; offline only the cache is consulted.
    """
    repo = _find_repo(repos, desc.repo_id)
    fetcher = fetcher or _HttpFetcher()
    relpath = _index_relpath(repo, desc)

    if repo.is_local:
        found = _read_local(repo, relpath)
        if found is None:
            raise NetworkError(f"{repo.id}: no {relpath} or {relpath}.gz under {repo.local_path}")
        raw, actual_relpath = found
        digests = _load_release(repo, fetcher, offline)
        _verify_against_release(repo, actual_relpath, raw, digests)
        return _decode(_decompress(raw, actual_relpath.endswith(".gz")))

    entry_dir = _cache_dir_for(cache_dir, repo, desc)
    filename = "Packages" if desc.kind == KIND_BINARY else "Sources"
    content_path = os.path.join(entry_dir, filename)
    meta_path = content_path + ".meta"

    if offline:
        if not os.path.exists(content_path):
            raise NotInCacheError(f"{repo.id}: {relpath} not cached and offline mode is on")
        with open(content_path, "rb") as handle:
            return _decode(handle.read())

    last_modified = None
    if os.path.exists(meta_path):
        try:
            meta = deb822.parse_stanzas(open(meta_path, encoding="utf-8").read())
            if meta:
                last_modified = meta[0].get("Last-Modified")
        except Exception:
            last_modified = None

    raw = None
    actual_relpath = relpath
    base = repo.url.rstrip("/")
    headers = {"If-Modified-Since": last_modified} if last_modified and os.path.exists(content_path) else {}
    status, resp_headers, body = fetcher.get(f"{base}/{relpath}", headers=headers)
    if status == 304 and os.path.exists(content_path):
        with open(content_path, "rb") as handle:
            return _decode(handle.read())
    if status == 200:
        raw = body
    elif status == 404:
        status2, resp_headers, body2 = fetcher.get(f"{base}/{relpath}.gz", headers=headers)
        if status2 == 304 and os.path.exists(content_path):
            with open(content_path, "rb") as handle:
                return _decode(handle.read())
        if status2 == 200:
            raw = body2
            actual_relpath = relpath + ".gz"
        else:
            raise NetworkError(f"{repo.id}: GET {relpath}[.gz] failed with {status}/{status2}")
    else:
        raise NetworkError(f"{repo.id}: GET {relpath} failed with status {status}")

    digests = _load_release(repo, fetcher, offline)
    _verify_against_release(repo, actual_relpath, raw, digests)

    text_bytes = _decompress(raw, actual_relpath.endswith(".gz"))
    text = _decode(text_bytes)
    digest = hashlib.sha256(text_bytes).hexdigest()

    if os.path.exists(content_path):
        with open(content_path, "rb") as handle:
            if hashlib.sha256(handle.read()).hexdigest() == digest:
                return text  # unchanged; leave cache untouched

    _atomic_write(content_path, text_bytes)
    meta = deb822.Stanza()
    meta.add("Repo", repo.id)
    meta.add("Path", actual_relpath)
    meta.add("SHA256", digest)
    meta.add("Size", str(len(text_bytes)))
    meta.add("Fetched-At", time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()))
    if resp_headers.get("Last-Modified"):
        meta.add("Last-Modified", resp_headers["Last-Modified"])
    _atomic_write(meta_path, deb822.serialize_stanza(meta).encode("utf-8"))
    return text


def _descriptors_for(repo: Repository, architecture: str) -> list[IndexDescriptor]:
    components = repo.components if not repo.flat else ("",)
    out = []
    for component in components:
        out.append(IndexDescriptor(repo.id, component, KIND_BINARY, architecture))
        out.append(IndexDescriptor(repo.id, component, KIND_SOURCES))
    return out


def sync_indices(
    repos,
    cache_dir: str,
    architecture: str = "amd64",
    offline: bool = False,
    parallelism: int = 4,
    fetcher=None,
) -> list[CacheEntry]:
    """Fetch every configured index; Sources indices are best-effort.

    Returns one CacheEntry per index fetched (local repos included, with
    the digest of what was read).
    """
    jobs = []
    for repo in repos:
        jobs.extend(_descriptors_for(repo, architecture))

    def fetch_one(desc: IndexDescriptor):
        try:
            text = fetch_index(desc, repos, cache_dir, offline=offline, fetcher=fetcher)
        except (NetworkError, NotInCacheError) as err:
            if desc.kind == KIND_SOURCES:
                log.info("%s: no Sources index (%s)", desc.repo_id, err)
                return None
            raise
        data = text.encode("utf-8")
        repo = _find_repo(repos, desc.repo_id)
        return CacheEntry(
            repo_id=desc.repo_id,
            path=_index_relpath(repo, desc),
            sha256=hashlib.sha256(data).hexdigest(),
            fetched_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            size=len(data),
        )

    entries: list[CacheEntry] = []
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        for entry in pool.map(fetch_one, jobs):
            if entry is not None:
                entries.append(entry)
    return entries


def build_catalog(
    repos,
    cache_dir: str,
    architecture: str = "amd64",
    offline: bool = False,
    fetcher=None,
) -> Catalog:
    """Assemble a catalog from every configured repository's indices."""
    cat = Catalog.empty(repos, architecture=architecture)
    for repo in repos:
        for desc in _descriptors_for(repo, architecture):
            try:
                text = fetch_index(desc, repos, cache_dir, offline=offline, fetcher=fetcher)
            except (NetworkError, NotInCacheError) as err:
                if desc.kind == KIND_SOURCES:
                    log.debug("%s: no Sources index (%s)", repo.id, err)
                    continue
                raise
            stanzas = deb822.parse_stanzas(text)
            if desc.kind == KIND_BINARY:
                cat = catalog_mod.ingest_index(cat, repo.id, stanzas)
            else:
                cat = catalog_mod.ingest_sources(cat, repo.id, stanzas)
    return cat

#!/usr/bin/env python3
"""Regenerate tests/data/round2013 from the June 2013 status sheet.

The fixture encodes the round's availability matrix as local-path
repositories, the curated watch list, and the workflow event log.  Cells
that were garbled in the source sheet are normalized here; every repair
is documented in the fixture's notes file.
"""

import hashlib
import os
import shutil

ROOT = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "tests", "data", "round2013")

# name -> (debian-med-ppa, biolinux-ppa, tbooth-ppa, raring, quantal, precise)
MATRIX = {
    "arb": (None, "5.5-1ubuntu1", "5.3-3ubuntu3", "5.3-4ubuntu2", "5.3-4ubuntu2", None),
    "paml": (None, None, None, "4.5-1", "4.5-1", None),
    "agherman": (None, None, None, "0.7.5.1-1", "0.6.0.1-1build1", None),
    "bowtie2": ("2.0.2-1-precise1", "2.1.0-1-0ubuntu1", None, "2.0.5-1", "2.0.0-beta6-3", None),
    "concavity": (None, None, None, "0.1-2", None, None),
    "conservation-code": (None, None, None, "20110309.0-1", None, None),
    "dspp": (None, None, None, "2.0.4-2", "2.0.4-2", None),
    "fastqc": ("0.10.1+dfsg-1-precise1", None, None, "0.10.1+dfsg-1", None, None),
    "fasttree": (None, None, None, "2.1.5-1", "2.1.4-1", None),
    "ffindex": (None, None, None, "0.9.9-2", "0.9.6.1-1", None),
    "freemedforms-projec": ("0.8.0-precise1", None, None, "0.7.6-1", "0.7.6-1", None),
    "genometools": (None, None, None, "1.4.2-4", None, None),
    "grinder": (None, None, None, "0.4.5-1", "0.4.5-1", None),
    "hhsuite": (None, None, None, "2.0.15-1", "2.0.15-1", None),
    "hmmer2": (None, "2.3.2-6", None, "2.3.2-6", None, None),
    "king": (None, "2.2.1.120420+r", "2.2.1.120420+r", "2.3.2-6", None, None),
    "logol": (None, None, None, "1.5.0-6", "1.5.0-6", None),
    "lrsift": (None, None, None, "1.0.1-1", None, None),
    "ncbi-seq": (None, "0.0.20000620-1", None, "0.0.20000620-1", None, None),
    "neobio": (None, None, None, "0.0.20030929-1", "0.0.20030929-1", None),
    "norsnet": (None, "1.0.16-1", None, "1.0.16-1", None, None),
    "norsp": (None, "1.0.5-1", None, "1.0.5-1", None, None),
    "orthanc": (None, None, None, "0.4.0-1", None, None),
    "predictnls": (None, "1.0.20-1", None, "1.0.20-1", None, None),
    "predictprotein": (None, "1.0.86-1", None, "1.0.90-1", None, None),
    "profbval": (None, "1.0.22-1", None, "1.0.22-1", None, None),
    "profisis": (None, "1.0.11-1", None, "1.0.11-1", None, None),
    "proftmb": (None, "1.1.10-1", None, "1.1.12-1", "1.1.10-1", None),
    "ray": (None, "2.2.0-0ubuntu1", None, "2.1.0-1", None, None),
    "reprof": (None, None, None, "1.0.1-1", "1.0.1-1", None),
    "saint": (None, None, None, "2.3.3-1ubuntu1", "2.3.3-1ubuntu1", None),
    "snappy-java": ("1.0.3-rc3-0ubuntu1", "1.0.4.1-1-precise1", "1.0.4.1-1-precise1", "1.0.3-rc3-0ubuntu1", None, None),
    "soapdenovo": (None, None, None, "1.05-1", None, None),
    "tophat": ("2.0.6-1-precise1", "2.0.8-0ubuntu1", "1.4.0-0ubuntu1", "2.0.6-1", "2.0.3-1", None),
    "trimmomatic": (None, None, None, "0.22-1ubuntu1", None, None),
    "volview": (None, None, None, "3.4-3ubuntu1", "3.4-3build1", None),
    "beast-mcmc": (None, None, None, "1.6.2-3ubuntu1", "1.6.2-2ubuntu1", None),
    "spread-phy": (None, None, None, "1.0.5+dfsg-1", None, None),
    "blimps": (None, "3.9-1ubuntu1", None, "3.9-1", "3.9-1", None),
    "cluster3": (None, None, None, "1.50-1", None, None),
    "phy-spread": (None, None, None, "1.0.3-1ubuntu1", "1.0.3-1ubuntu1", None),
}

REPO_COLUMNS = ["debian-med-ppa", "biolinux-ppa", "tbooth-ppa", "raring", "quantal", "precise"]

ARCH_ALL = {"fastqc", "trimmomatic", "neobio", "snappy-java", "beast-mcmc", "logol"}

# base package universes for build-dependency checks
BASE_PACKAGES = {
    "precise": [
        ("libc6", "2.15-0ubuntu10", "amd64", "", ""),
        ("debhelper", "9.20120115ubuntu3", "all", "", ""),
        ("gcc", "4:4.6.3-1ubuntu5", "amd64", "", ""),
        ("zlib1g-dev", "1:1.2.3.4.dfsg-3ubuntu4", "amd64", "", ""),
        ("default-jdk", "1:1.6-43", "amd64", "", ""),
        ("python", "2.7.3-0ubuntu2", "amd64", "", ""),
        ("perl", "5.14.2-6ubuntu2", "amd64", "", ""),
        ("cmake", "2.8.7-0ubuntu4", "amd64", "", ""),
        ("libcairo2-dev", "1.10.2-6.1ubuntu3", "amd64", "", ""),
        ("mawk", "1.3.3-17", "amd64", "", "awk"),
    ],
    "quantal": [
        ("libc6", "2.15-0ubuntu20", "amd64", "", ""),
        ("debhelper", "9.20120608ubuntu1", "all", "", ""),
        ("gcc", "4:4.7.2-1ubuntu2", "amd64", "", ""),
        ("zlib1g-dev", "1:1.2.7.dfsg-13", "amd64", "", ""),
        ("default-jdk", "1:1.7-43", "amd64", "", ""),
        ("python", "2.7.3-0ubuntu7", "amd64", "", ""),
        ("perl", "5.14.2-13ubuntu0.1", "amd64", "", ""),
        ("cmake", "2.8.9-0ubuntu1", "amd64", "", ""),
        ("libcairo2-dev", "1.12.2-1ubuntu1", "amd64", "", ""),
        ("mawk", "1.3.3-17", "amd64", "", "awk"),
        ("python-biopython", "1.60-1", "amd64", "", ""),
    ],
}

# source stanzas: repo -> [(name, version, build-depends)]
SOURCES = {
    "quantal": [
        ("paml", "4.5-1", "debhelper (>= 8), gcc"),
        ("dspp", "2.0.4-2", "debhelper (>= 9), python-biopython (>= 1.60)"),
        ("fasttree", "2.1.4-1", "debhelper (>= 8), gcc"),
        ("neobio", "0.0.20030929-1", "debhelper (>= 8), default-jdk"),
        ("volview", "3.4-3build1", "debhelper (>= 9), cmake (>= 2.8)"),
        ("hhsuite", "2.0.15-1", "debhelper (>= 9), ffindex-dev (>= 0.9.9)"),
        ("grinder", "0.4.5-1", "debhelper (>= 8), perl"),
        ("beast-mcmc", "1.6.2-2ubuntu1", "debhelper (>= 7), default-jdk"),
        ("logol", "1.5.0-6", "debhelper (>= 8), awk"),
    ],
    "raring": [
        ("concavity", "0.1-2", "debhelper (>= 8), gcc"),
        ("genometools", "1.4.2-4", "debhelper (>= 9), libcairo2-dev | libcairo-dev"),
        ("soapdenovo", "1.05-1", "debhelper (>= 8)"),
        ("cluster3", "1.50-1", "debhelper (>= 8), python"),
        ("conservation-code", "20110309.0-1", "debhelper (>= 8), python"),
        ("trimmomatic", "0.22-1ubuntu1", "debhelper (>= 9), maven"),
        ("fastqc", "0.10.1+dfsg-1", "debhelper (>= 8), maven"),
        ("lrsift", "1.0.1-1", "debhelper (>= 9), sift (>= 4.0.3b-4)"),
    ],
}

CONFIG = """\
Repo: debian-med-ppa
Label: Debian Med ppa
URL: repos/debian-med-ppa
Role: extra-disabled
Flat: yes

Repo: biolinux-ppa
Label: Biolinux ppa
URL: repos/biolinux-ppa
Role: extra-enabled
Flat: yes

Repo: tbooth-ppa
Label: Tim Boot ppa
URL: repos/tbooth-ppa
Role: extra-enabled
Flat: yes

Repo: raring
Label: Ubuntu Raring
URL: repos/raring
Dist: raring
Components: universe
Role: source-release
Position: 2

Repo: quantal
Label: Ubuntu Quantal
URL: repos/quantal
Dist: quantal
Components: universe
Role: source-release
Position: 1

Repo: precise
Label: Ubuntu Precise
URL: repos/precise
Dist: precise
Components: universe
Role: target
Position: 0
"""

DONE = {
    # package -> (hop, version)
    "paml": ("quantal2precise", "4.5-1"),
    "agherman": ("quantal2precise", "0.6.0.1-1build1"),
    "concavity": ("raring2quantal", "0.1-2"),
    "conservation-code": ("raring2quantal", "20110309.0-1"),
    "fasttree": ("quantal2precise", "2.1.4-1"),
    "ffindex": ("quantal2precise", "0.9.6.1-1"),
    "freemedforms-projec": ("quantal2precise", "0.7.6-1"),
    "genometools": ("raring2quantal", "1.4.2-4"),
    "logol": ("quantal2precise", "1.5.0-6"),
    "reprof": ("quantal2precise", "1.0.1-1"),
    "saint": ("quantal2precise", "2.3.3-1ubuntu1"),
    "soapdenovo": ("raring2quantal", "1.05-1"),
    "volview": ("quantal2precise", "3.4-3build1"),
    "cluster3": ("raring2quantal", "1.50-1"),
}

FAILED = {
    "dspp": ("quantal2precise", "2.0.4-2", ""),
    "fastqc": ("raring2quantal", "0.10.1+dfsg-1", ""),
    "grinder": ("quantal2precise", "0.4.5-1", "Bugreport"),
    "hhsuite": ("quantal2precise", "2.0.15-1", ""),
    "trimmomatic": ("raring2quantal", "0.22-1ubuntu1", ""),
    "lrsift": ("raring2quantal", "1.0.1-1", ""),
    "orthanc": ("raring2quantal", "0.4.0-1", ""),
    "beast-mcmc": ("quantal2precise", "1.6.2-2ubuntu1", ""),
    "spread-phy": ("raring2quantal", "1.0.5+dfsg-1", ""),
    "phy-spread": ("quantal2precise", "1.0.3-1ubuntu1", ""),
}

NOTES = """\
Anomalies in the June 2013 status sheet and how this fixture encodes them.

- agherman, quantal cell printed "0.6.0.1-1buildn/a": the neighbouring n/a
  cell bled into the version; encoded as 0.6.0.1-1build1.
- bowtie2, quantal cell printed "2.0.0-beta6-3un/a": same bleed with a
  dangling "u"; encoded as 2.0.0-beta6-3.
- ncbi-seq, biolinux and raring cells printed "0.0.20000620-n/a": revision
  digit lost; encoded as 0.0.20000620-1.
- neobio, one cell printed "0.0.20030929-0.0.20030929-n/a": the raring and
  quantal cells merged; encoded as 0.0.20030929-1 in both.
- "Freemedforms-projec": name printed truncated and capitalized; package
  names are lowercase, so the fixture uses freemedforms-projec.
- "snappy1.0.3-java ?": mangled name; the fixture uses snappy-java.
- king, raring cell prints 2.3.2-6, identical to hmmer2's version; kept as
  printed (suspected transcription slip in the sheet).
- arb and bowtie2 print Uploaded "success" next to Building "no task".
  No legal workflow run can produce that combination (an upload needs a
  successful build and test first); both were never tasks for this round
  (available via enabled ppas), so the fixture rolls them up as "no task".
  The sheet's "success" most likely refers to the ppa uploads themselves.
- lrsift, orthanc, beast-mcmc, spread-phy, phy-spread and the ppa-excluded
  rows leave Uploaded/Backported blank after a failure or "no task"; blank
  is encoded as "no task".
- The sheet says the curated selection held 43 programs but carries 42
  rows; the fixture carries the 42 rows as printed.
"""


def binary_stanza(name, version, arch, depends="", provides="", source=""):
    lines = [f"Package: {name}", f"Version: {version}", f"Architecture: {arch}"]
    if depends:
        lines.append(f"Depends: {depends}")
    if provides:
        lines.append(f"Provides: {provides}")
    if source:
        lines.append(f"Source: {source}")
    return "\n".join(lines) + "\n"


def source_stanza(name, version, build_depends):
    lines = [f"Package: {name}", f"Version: {version}"]
    if build_depends:
        lines.append(f"Build-Depends: {build_depends}")
    lines.append(f"Binary: {name}")
    return "\n".join(lines) + "\n"


def write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def sha256_file(path):
    with open(path, "rb") as handle:
        return hashlib.sha256(handle.read()).hexdigest()


def main():
    if os.path.exists(ROOT):
        shutil.rmtree(ROOT)
    os.makedirs(ROOT)

    per_repo = {repo: [] for repo in REPO_COLUMNS}
    for name in sorted(MATRIX):
        cells = MATRIX[name]
        arch = "all" if name in ARCH_ALL else "amd64"
        for repo, version in zip(REPO_COLUMNS, cells):
            if version is not None:
                depends = "libc6 (>= 2.4)" if arch == "amd64" and repo in ("raring", "quantal", "precise") else ""
                per_repo[repo].append(binary_stanza(name, version, arch, depends=depends))
    for repo, extra in BASE_PACKAGES.items():
        for name, version, arch, depends, provides in extra:
            per_repo[repo].append(binary_stanza(name, version, arch, depends=depends, provides=provides))

    for repo in ("debian-med-ppa", "biolinux-ppa", "tbooth-ppa"):
        write(os.path.join(ROOT, "repos", repo, "Packages"), "\n".join(per_repo[repo]))

    for repo in ("precise", "quantal", "raring"):
        packages_rel = f"universe/binary-amd64/Packages"
        packages_path = os.path.join(ROOT, "repos", repo, "dists", repo, packages_rel)
        write(packages_path, "\n".join(per_repo[repo]))
        release_lines = [f"Suite: {repo}", f"Codename: {repo}", "SHA256:"]
        release_lines.append(f" {sha256_file(packages_path)} {os.path.getsize(packages_path)} {packages_rel}")
        if repo in SOURCES:
            sources_rel = "universe/source/Sources"
            sources_path = os.path.join(ROOT, "repos", repo, "dists", repo, sources_rel)
            write(sources_path, "\n".join(source_stanza(*s) for s in SOURCES[repo]))
            release_lines.append(f" {sha256_file(sources_path)} {os.path.getsize(sources_path)} {sources_rel}")
        write(os.path.join(ROOT, "repos", repo, "dists", repo, "Release"), "\n".join(release_lines) + "\n")

    write(os.path.join(ROOT, "backport-pilot.conf"), CONFIG)

    watch = "# curated bioinformatics selection, June 2013 round\n"
    watch += "".join(name + "\n" for name in sorted(MATRIX))
    write(os.path.join(ROOT, "watchlist"), watch)

    # the workflow event log, replayable through `record`
    events = []
    stamp = [0]

    def ts():
        stamp[0] += 1
        day = 3 + stamp[0] // 20
        minute = (stamp[0] * 7) % 60
        return f"2013-06-{day:02d}T10:{minute:02d}:00Z"

    def event(package, hop, from_state, to_state, note="", version=""):
        lines = [f"Package: {package}", f"Hop: {hop}", f"From-State: {from_state}", f"To-State: {to_state}"]
        if note:
            lines.append(f"Note: {note}")
        if version:
            lines.append(f"Version: {version}")
        lines.append("Actor: operator")
        lines.append(f"Timestamp: {ts()}")
        events.append("\n".join(lines) + "\n")

    event("arb", "quantal2precise", "none", "selected", note="Bugreport")
    event("arb", "quantal2precise", "selected", "no-task")
    for package in sorted(set(DONE) | set(FAILED) | {"neobio"}):
        if package in DONE:
            hop, version = DONE[package]
            event(package, hop, "none", "selected", version=version)
            event(package, hop, "selected", "build-succeeded")
            event(package, hop, "build-succeeded", "test-passed")
            event(package, hop, "test-passed", "uploaded")
            event(package, hop, "uploaded", "filed")
            event(package, hop, "filed", "done")
        elif package in FAILED:
            hop, version, note = FAILED[package]
            event(package, hop, "none", "selected", version=version, note=note)
            event(package, hop, "selected", "build-failed")
        else:  # neobio: uploaded but the backport request was never filed
            event(package, "quantal2precise", "none", "selected", version="0.0.20030929-1", note="lib")
            event(package, "quantal2precise", "selected", "build-succeeded")
            event(package, "quantal2precise", "build-succeeded", "test-passed")
            event(package, "quantal2precise", "test-passed", "uploaded")
            event(package, "quantal2precise", "uploaded", "not-filed")
    write(os.path.join(ROOT, "events"), "\n".join(events))

    write(os.path.join(ROOT, "notes"), NOTES)
    print(f"fixture written to {ROOT}")


if __name__ == "__main__":
    main()

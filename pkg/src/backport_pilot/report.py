"""Status table and announcement rendering.

The table mirrors the operator's status spreadsheet: one row per pool
package, per-repository availability cells, then the workflow columns
(Notes/Building/Uploaded/Backported/From).  Output is TSV because it is
diff-able and byte-exactly specifiable; both outputs are deterministic
functions of their inputs.
"""

from __future__ import annotations

from .catalog import Catalog
from .errors import InconsistentInputsError
from .ledger import NO_TASK, Ledger, PackageRollup, TaskState, summarize
from .selector import CandidateDecision

ABSENT_CELL = "n/a"


def _availability_cell(decision: CandidateDecision, repo_id: str) -> str:
    version = decision.availability.get(repo_id)
    return str(version) if version is not None else ABSENT_CELL


def emit_status_table(catalog: Catalog, ledger: Ledger, decisions: list[CandidateDecision]) -> str:
    """Render the status spreadsheet as TSV.

    Row order follows the decision list.  Workflow cells come from the
    ledger rollup; packages without any ledger task show "no task".
    """
    known = {d.name for d in decisions}
    for package, hop in ledger.tasks:
        if package not in known:
            raise InconsistentInputsError(f"ledger task {package} {hop} has no matching decision")

    rollups = summarize(ledger).rollups
    header = (
        ["Software-Package"]
        + [repo.display_label for repo in catalog.repositories]
        + ["Notes:", "Building:", "Uploaded:", "Backported:", "From:"]
    )
    lines = ["\t".join(header)]
    empty = PackageRollup(
        package="", building=NO_TASK, uploaded=NO_TASK, backported=NO_TASK, from_label="", notes="", version=""
    )
    for decision in decisions:
        rollup = rollups.get(decision.name, empty)
        cells = [decision.name]
        cells += [_availability_cell(decision, repo.id) for repo in catalog.repositories]
        cells += [rollup.notes, rollup.building, rollup.uploaded, rollup.backported, rollup.from_label]
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def emit_announcement(ledger: Ledger, round_label: str, target_release: str) -> str:
    """Plain-text announcement listing every completed backport.

    One list item per Done task, a count line, and the target release;
    items sort by package name.
    """
    done = sorted(
        (task for task in ledger.tasks.values() if task.state is TaskState.DONE),
        key=lambda t: (t.package, t.hop),
    )
    lines = [
        f"Backport round: {round_label}",
        f"Target release: {target_release}",
        "",
        f"{len(done)} packages backported",
        "",
    ]
    for task in done:
        version = f" {task.version}" if task.version else ""
        lines.append(f"- {task.package}{version} ({task.hop})")
    lines.append("")
    lines.append("These packages are now available from the backports repository.")
    return "\n".join(lines) + "\n"

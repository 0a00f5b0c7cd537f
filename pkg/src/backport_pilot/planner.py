"""Multi-hop backport plans over the release chain.

A candidate sourced from a release N positions above the target needs N
hops, one per adjacent release pair, labeled ``<from>2<to>``.  Feasibility
is a prediction only: it checks the direct build dependencies of the
source package against what the hop's destination already carries.  The
planner advises; the operator decides, and the ledger records what really
happened.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .catalog import Catalog
from .depends import DependencyClause, unsatisfied_build_deps
from .errors import SourceBelowTargetError, UnknownSuiteError
from .selector import CandidateDecision
from .version import Version


@dataclass(frozen=True)
class Hop:
    from_repo_id: str
    to_repo_id: str

    @property
    def label(self) -> str:
        return f"{self.from_repo_id}2{self.to_repo_id}"


@dataclass(frozen=True)
class BackportPlan:
    package: str
    source_repo_id: str
    source_version: Version
    hops: tuple[Hop, ...]
    # aligned with hops; a list of unsatisfied clauses per hop, or None
    # when the hop's from-repo has no source record (feasibility unknown)
    feasibility: tuple[tuple[DependencyClause, ...] | None, ...] = ()

    @property
    def assessed(self) -> bool:
        return len(self.feasibility) == len(self.hops)


def plan_cascade(source_repo_id: str, target_repo_id: str, chain) -> list[Hop]:
    """Hops stepping one release down at a time, source to target.

    ``chain`` is the ordered release list (target plus source releases with
    contiguous positions).  Equal source and target mean no hops.
    """
    by_id = {repo.id: repo for repo in chain}
    by_position = {repo.position: repo for repo in chain}
    if source_repo_id not in by_id:
        raise UnknownSuiteError(f"{source_repo_id!r} is not in the release chain")
    if target_repo_id not in by_id:
        raise UnknownSuiteError(f"{target_repo_id!r} is not in the release chain")
    source = by_id[source_repo_id]
    target = by_id[target_repo_id]
    if source.position < target.position:
        raise SourceBelowTargetError(f"{source_repo_id} sits below {target_repo_id} in the chain")
    hops = []
    for position in range(source.position, target.position, -1):
        hops.append(Hop(from_repo_id=by_position[position].id, to_repo_id=by_position[position - 1].id))
    return hops


def assess_feasibility(plan: BackportPlan, catalog: Catalog) -> BackportPlan:
    """Annotate each hop with the build-dep clauses its destination cannot satisfy.

    Only direct build dependencies are checked, against the destination's
    existing binary universe.  Hops whose from-repo has no source record
    get None (unknown), not a failure.
    """
    feasibility = []
    for hop in plan.hops:
        source = catalog.source_record(hop.from_repo_id, plan.package)
        if source is None:
            feasibility.append(None)
            continue
        universe = catalog.binary_universe(hop.to_repo_id)
        feasibility.append(tuple(unsatisfied_build_deps(source, universe)))
    return replace(plan, feasibility=tuple(feasibility))


def plan_backport(catalog: Catalog, decision: CandidateDecision) -> BackportPlan:
    """Full plan for a candidate decision: cascade plus feasibility."""
    if not decision.is_candidate:
        raise ValueError(f"{decision.name} is not a candidate")
    hops = plan_cascade(decision.source_repo_id, catalog.target.id, catalog.release_chain)
    plan = BackportPlan(
        package=decision.name,
        source_repo_id=decision.source_repo_id,
        source_version=decision.version,
        hops=tuple(hops),
    )
    return assess_feasibility(plan, catalog)

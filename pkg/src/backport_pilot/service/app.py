"""The service: every workflow operation behind an HTTP endpoint.

The app is stateless between requests; configuration, catalog and ledger
are loaded from their files on each call, so concurrent clients always
see the last durably persisted state.  The CLI is a thin client of these
endpoints, either in-process or against a running server.
"""

from __future__ import annotations

import datetime
import os
from dataclasses import dataclass

from fastapi import FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import catalog as catalog_mod
from .. import ledger as ledger_mod
from .. import planner, report, schedule, selector, transport
from ..errors import (
    ConfigNotFoundError,
    IllegalTransitionError,
    NotInCacheError,
    PilotError,
    UnknownRepoError,
    UnknownSuiteError,
    UnknownTargetError,
    UnknownTaskError,
)
from . import schemas

DEFAULT_CONFIG = "backport-pilot.conf"
CONFIG_ENV_VAR = "BACKPORT_PILOT_CONFIG"


@dataclass
class Settings:
    config_path: str = ""
    cache_dir: str = "backport-cache"
    ledger_path: str = "backport-ledger"
    offline: bool = False
    architecture: str = "amd64"
    calendar_path: str = ""  # empty means the built-in calendar

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            config_path=os.environ.get(CONFIG_ENV_VAR, ""),
            cache_dir=os.environ.get("BACKPORT_PILOT_CACHE", "backport-cache"),
            ledger_path=os.environ.get("BACKPORT_PILOT_LEDGER", "backport-ledger"),
            offline=os.environ.get("BACKPORT_PILOT_OFFLINE", "") in ("1", "yes", "true"),
            architecture=os.environ.get("BACKPORT_PILOT_ARCH", "amd64"),
            calendar_path=os.environ.get("BACKPORT_PILOT_CALENDAR", ""),
        )

    def resolve_config(self) -> str:
        path = self.config_path or os.environ.get(CONFIG_ENV_VAR, "") or DEFAULT_CONFIG
        if not os.path.exists(path):
            raise ConfigNotFoundError(f"config file not found: {path}")
        return path


_STATUS_BY_ERROR = {
    IllegalTransitionError: 409,
    UnknownTaskError: 404,
    UnknownRepoError: 404,
    UnknownSuiteError: 404,
    UnknownTargetError: 404,
    NotInCacheError: 404,
    ConfigNotFoundError: 404,
}


def _decision_model(decision: selector.CandidateDecision, target_id: str) -> schemas.DecisionModel:
    return schemas.DecisionModel(
        name=decision.name,
        decision=decision.decision,
        source_repo=decision.source_repo_id,
        version=str(decision.version) if decision.version else None,
        reason=decision.reason,
        availability={repo: str(v) if v else None for repo, v in decision.availability.items()},
        explanation=selector.explain(decision, target_id),
    )


def _round_model(plan_round: schedule.RoundPlan) -> schemas.RoundModel:
    m = plan_round.trigger
    return schemas.RoundModel(
        ordinal=plan_round.ordinal,
        trigger_version=m.version,
        trigger_codename=m.codename,
        import_freeze=m.import_freeze.isoformat() if m.import_freeze else None,
        release_date=m.release_date.isoformat(),
    )


def create_app(settings: Settings | None = None) -> FastAPI:
    settings = settings or Settings.from_env()
    app = FastAPI(title="backport-pilot", version="0.1.0")

    def load_repos() -> list[catalog_mod.Repository]:
        config_path = settings.resolve_config()
        with open(config_path, encoding="utf-8") as handle:
            repos = catalog_mod.load_config(handle.read())
        return catalog_mod.resolve_repo_paths(repos, os.path.dirname(os.path.abspath(config_path)))

    def load_catalog(repos=None) -> catalog_mod.Catalog:
        repos = repos or load_repos()
        return transport.build_catalog(
            repos,
            cache_dir=settings.cache_dir,
            architecture=settings.architecture,
            offline=settings.offline,
        )

    def load_ledger() -> ledger_mod.Ledger:
        return ledger_mod.load_ledger(settings.ledger_path)

    @app.exception_handler(PilotError)
    async def pilot_error_handler(_request, err: PilotError):
        status = 400
        for kind, code in _STATUS_BY_ERROR.items():
            if isinstance(err, kind):
                status = code
                break
        return JSONResponse(status_code=status, content={"error": err.code, "detail": str(err)})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/sync", response_model=schemas.SyncResponse)
    def sync(request: schemas.SyncRequest | None = None):
        request = request or schemas.SyncRequest()
        repos = load_repos()
        entries = transport.sync_indices(
            repos,
            cache_dir=settings.cache_dir,
            architecture=settings.architecture,
            offline=settings.offline,
            parallelism=request.parallelism,
        )
        return schemas.SyncResponse(
            entries=[
                schemas.CacheEntryModel(
                    repo_id=e.repo_id, path=e.path, sha256=e.sha256, size=e.size, fetched_at=e.fetched_at
                )
                for e in entries
            ]
        )

    @app.post("/select", response_model=schemas.SelectResponse)
    def select(request: schemas.SelectRequest):
        cat = load_catalog()
        watch = selector.WatchList(names=frozenset(request.watch)) if request.watch is not None else None
        decisions = selector.select_candidates(cat, watch)
        target_id = cat.target.id
        return schemas.SelectResponse(
            target=target_id,
            decisions=[_decision_model(d, target_id) for d in decisions],
        )

    @app.post("/plan", response_model=schemas.PlanResponse)
    def plan(request: schemas.PlanRequest):
        cat = load_catalog()
        watch = selector.WatchList(names=frozenset({request.package}))
        decision = selector.select_candidates(cat, watch)[0]
        target_id = cat.target.id
        response = schemas.PlanResponse(
            package=request.package,
            decision=_decision_model(decision, target_id),
        )
        if decision.is_candidate:
            backport_plan = planner.plan_backport(cat, decision)
            response.source_repo = backport_plan.source_repo_id
            response.version = str(backport_plan.source_version)
            response.hops = [
                schemas.HopModel(
                    from_repo=hop.from_repo_id,
                    to_repo=hop.to_repo_id,
                    label=hop.label,
                    feasibility_known=feas is not None,
                    unsatisfied=[str(clause) for clause in feas] if feas else [],
                )
                for hop, feas in zip(backport_plan.hops, backport_plan.feasibility)
            ]
        return response

    @app.post("/record", response_model=schemas.RecordResponse)
    def record(request: schemas.RecordRequest):
        state = ledger_mod.state_from_token(request.state)
        timestamp = request.timestamp or datetime.datetime.now(datetime.timezone.utc).strftime(
            "%Y-%m-%dT%H:%M:%SZ"
        )
        updated = ledger_mod.record_event(
            load_ledger(),
            package=request.package,
            hop=request.hop,
            to_state=state,
            note=request.note,
            timestamp=timestamp,
            actor=request.actor,
            version=request.version,
        )
        task = updated.tasks[(request.package, request.hop)]
        return schemas.RecordResponse(package=request.package, hop=request.hop, state=task.state.value)

    @app.get("/status", response_model=schemas.StatusResponse)
    def status():
        summary = ledger_mod.summarize(load_ledger())
        return schemas.StatusResponse(
            counts={state.value: count for state, count in summary.state_counts.items()},
            packages=[
                schemas.RollupModel(
                    package=r.package,
                    building=r.building,
                    uploaded=r.uploaded,
                    backported=r.backported,
                    from_label=r.from_label,
                    notes=r.notes,
                    version=r.version,
                )
                for _, r in sorted(summary.rollups.items())
            ],
        )

    @app.post("/report/table", response_class=PlainTextResponse)
    def report_table(request: schemas.TableRequest):
        cat = load_catalog()
        watch = selector.WatchList(names=frozenset(request.watch)) if request.watch is not None else None
        decisions = selector.select_candidates(cat, watch)
        text = report.emit_status_table(cat, load_ledger(), decisions)
        return PlainTextResponse(text, media_type="text/tab-separated-values; charset=utf-8")

    @app.post("/report/announcement", response_class=PlainTextResponse)
    def report_announcement(request: schemas.AnnouncementRequest):
        repos = load_repos()
        target = next(r for r in repos if r.role == catalog_mod.ROLE_TARGET)
        text = report.emit_announcement(load_ledger(), request.round_label, target.id)
        return PlainTextResponse(text, media_type="text/plain; charset=utf-8")

    def load_calendar() -> list[schedule.ReleaseMilestone]:
        if settings.calendar_path:
            with open(settings.calendar_path, encoding="utf-8") as handle:
                return schedule.load_calendar(handle.read())
        return schedule.default_calendar()

    @app.get("/schedule/rounds", response_model=schemas.RoundsResponse)
    def schedule_rounds(target: str):
        rounds = schedule.plan_rounds(load_calendar(), target)
        return schemas.RoundsResponse(target=target, rounds=[_round_model(r) for r in rounds])

    @app.get("/schedule/next", response_model=schemas.NextTriggerResponse)
    def schedule_next(today: str = ""):
        date = datetime.date.fromisoformat(today) if today else datetime.date.today()
        milestone = schedule.next_trigger(load_calendar(), date)
        if milestone is None:
            return schemas.NextTriggerResponse(trigger=None)
        return schemas.NextTriggerResponse(
            trigger=schemas.RoundModel(
                ordinal=0,
                trigger_version=milestone.version,
                trigger_codename=milestone.codename,
                import_freeze=milestone.import_freeze.isoformat() if milestone.import_freeze else None,
                release_date=milestone.release_date.isoformat(),
            )
        )

    return app


app = create_app()

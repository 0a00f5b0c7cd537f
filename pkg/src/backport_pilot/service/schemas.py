"""Request and response models for the service endpoints."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel


class ErrorBody(BaseModel):
    error: str
    detail: str


class SyncRequest(BaseModel):
    parallelism: int = 4


class CacheEntryModel(BaseModel):
    repo_id: str
    path: str
    sha256: str
    size: int
    fetched_at: str


class SyncResponse(BaseModel):
    entries: list[CacheEntryModel]


class SelectRequest(BaseModel):
    watch: Optional[list[str]] = None


class DecisionModel(BaseModel):
    name: str
    decision: str  # candidate | excluded
    source_repo: Optional[str] = None
    version: Optional[str] = None
    reason: Optional[str] = None
    availability: dict[str, Optional[str]]
    explanation: str


class SelectResponse(BaseModel):
    target: str
    decisions: list[DecisionModel]


class PlanRequest(BaseModel):
    package: str


class HopModel(BaseModel):
    from_repo: str
    to_repo: str
    label: str
    feasibility_known: bool = False
    unsatisfied: list[str] = []


class PlanResponse(BaseModel):
    package: str
    decision: DecisionModel
    source_repo: Optional[str] = None
    version: Optional[str] = None
    hops: list[HopModel] = []


class RecordRequest(BaseModel):
    package: str
    hop: str
    state: str  # kebab-case task state token
    note: str = ""
    actor: str = "operator"
    timestamp: str = ""
    version: str = ""


class RecordResponse(BaseModel):
    package: str
    hop: str
    state: str


class RollupModel(BaseModel):
    package: str
    building: str
    uploaded: str
    backported: str
    from_label: str
    notes: str
    version: str


class StatusResponse(BaseModel):
    counts: dict[str, int]
    packages: list[RollupModel]


class TableRequest(BaseModel):
    watch: Optional[list[str]] = None


class AnnouncementRequest(BaseModel):
    round_label: str


class RoundModel(BaseModel):
    ordinal: int
    trigger_version: str
    trigger_codename: str
    import_freeze: Optional[str] = None
    release_date: str


class RoundsResponse(BaseModel):
    target: str
    rounds: list[RoundModel]


class NextTriggerResponse(BaseModel):
    trigger: Optional[RoundModel] = None

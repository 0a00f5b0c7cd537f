"""Per-(package, hop) workflow state machine, persisted as an append-only log.

Each backport task walks build -> test -> upload -> file -> done, with
failure and no-task exits.  The ledger file holds one stanza per event and
is never rewritten; state is always recomputed by replaying the log, so a
task's stored history is the single source of truth.  Tasks are keyed by
(package, hop label) so each hop of a cascade progresses independently.
"""

from __future__ import annotations

import enum
import fcntl
import logging
import os
from dataclasses import dataclass, field

from . import deb822
from .errors import (
    IllegalTransitionError,
    LedgerCorruptError,
    PilotError,
    UnknownStateError,
    UnknownTaskError,
)

log = logging.getLogger(__name__)


class TaskState(enum.Enum):
    SELECTED = "selected"
    BUILD_SUCCEEDED = "build-succeeded"
    BUILD_FAILED = "build-failed"
    TEST_PASSED = "test-passed"
    TEST_FAILED = "test-failed"
    UPLOADED = "uploaded"
    FILED = "filed"
    DONE = "done"
    NOT_FILED = "not-filed"
    NO_TASK = "no-task"

    def __str__(self) -> str:
        return self.value


LEGAL_TRANSITIONS: dict[TaskState, frozenset] = {
    TaskState.SELECTED: frozenset({TaskState.BUILD_SUCCEEDED, TaskState.BUILD_FAILED, TaskState.NO_TASK}),
    TaskState.BUILD_SUCCEEDED: frozenset({TaskState.TEST_PASSED, TaskState.TEST_FAILED}),
    TaskState.BUILD_FAILED: frozenset(),
    TaskState.TEST_PASSED: frozenset({TaskState.UPLOADED}),
    TaskState.TEST_FAILED: frozenset(),
    TaskState.UPLOADED: frozenset({TaskState.FILED, TaskState.NOT_FILED}),
    TaskState.FILED: frozenset({TaskState.DONE}),
    TaskState.DONE: frozenset(),
    TaskState.NOT_FILED: frozenset({TaskState.FILED}),
    TaskState.NO_TASK: frozenset(),
}

TERMINAL_STATES = frozenset(state for state, nxt in LEGAL_TRANSITIONS.items() if not nxt)


def state_from_token(token: str) -> TaskState:
    """Map a kebab-case token to a TaskState, strictly."""
    for state in TaskState:
        if state.value == token:
            return state
    valid = ", ".join(s.value for s in TaskState)
    raise UnknownStateError(f"unknown state {token!r} (valid: {valid})")


def replay(transitions) -> TaskState:
    """Fold a sequence of to-states over the legal-transition relation.

    The fold starts at SELECTED (task creation is not part of the
    sequence); the first illegal step raises with its index.
    """
    state = TaskState.SELECTED
    for index, to_state in enumerate(transitions):
        if to_state not in LEGAL_TRANSITIONS[state]:
            raise IllegalTransitionError(state.value, to_state.value, index)
        state = to_state
    return state


@dataclass(frozen=True)
class LedgerEvent:
    package: str
    hop: str
    from_state: TaskState | None  # None marks task creation
    to_state: TaskState
    timestamp: str
    actor: str = "operator"
    note: str = ""
    version: str = ""

    def to_stanza(self) -> deb822.Stanza:
        stanza = deb822.Stanza()
        stanza.add("Package", self.package)
        stanza.add("Hop", self.hop)
        stanza.add("From-State", self.from_state.value if self.from_state else "none")
        stanza.add("To-State", self.to_state.value)
        if self.note:
            stanza.add("Note", self.note)
        if self.version:
            stanza.add("Version", self.version)
        stanza.add("Actor", self.actor)
        stanza.add("Timestamp", self.timestamp)
        return stanza

    @classmethod
    def from_stanza(cls, stanza: deb822.Stanza) -> "LedgerEvent":
        package = stanza.get("Package")
        hop = stanza.get("Hop")
        raw_from = stanza.get("From-State")
        raw_to = stanza.get("To-State")
        timestamp = stanza.get("Timestamp")
        if not package or hop is None or not raw_from or not raw_to or not timestamp:
            raise LedgerCorruptError("event stanza missing a required field")
        return cls(
            package=package,
            hop=hop,
            from_state=None if raw_from == "none" else state_from_token(raw_from),
            to_state=state_from_token(raw_to),
            timestamp=timestamp,
            actor=stanza.get("Actor", "operator") or "operator",
            note=stanza.get("Note", "") or "",
            version=stanza.get("Version", "") or "",
        )


@dataclass(frozen=True)
class BackportTask:
    package: str
    hop: str
    state: TaskState
    events: tuple[LedgerEvent, ...]

    @property
    def notes(self) -> list[str]:
        out = []
        for event in self.events:
            if event.note and event.note not in out:
                out.append(event.note)
        return out

    @property
    def version(self) -> str:
        for event in self.events:
            if event.version:
                return event.version
        return ""


@dataclass(frozen=True)
class Ledger:
    path: str
    events: tuple[LedgerEvent, ...] = ()
    tasks: dict = field(default_factory=dict)  # (package, hop) -> BackportTask


def get_task(ledger: Ledger, package: str, hop: str) -> BackportTask:
    task = ledger.tasks.get((package, hop))
    if task is None:
        raise UnknownTaskError(f"no task for {package} {hop}")
    return task


def _tasks_from_events(events) -> dict:
    grouped: dict[tuple, list[LedgerEvent]] = {}
    for event in events:
        key = (event.package, event.hop)
        if event.from_state is None:
            if key in grouped:
                raise LedgerCorruptError(f"task {key} created twice")
            grouped[key] = [event]
        else:
            if key not in grouped:
                raise LedgerCorruptError(f"event for unknown task {key}")
            grouped[key].append(event)
    tasks = {}
    for key, evs in grouped.items():
        try:
            state = replay([e.to_state for e in evs[1:]])
        except IllegalTransitionError as err:
            raise LedgerCorruptError(f"task {key}: {err}") from err
        # the creation event's own consistency
        if evs[0].to_state is not TaskState.SELECTED:
            raise LedgerCorruptError(f"task {key}: creation event must enter {TaskState.SELECTED.value}")
        for prev, ev in zip(evs, evs[1:]):
            if ev.from_state is not prev.to_state:
                raise LedgerCorruptError(f"task {key}: recorded from-state {ev.from_state} does not chain")
        tasks[key] = BackportTask(package=key[0], hop=key[1], state=state, events=tuple(evs))
    return tasks


def load_ledger(path: str, for_write: bool = False) -> Ledger:
    """Load the event log; a corrupt trailing partial stanza is dropped.

    With for_write the file is truncated back to the last good stanza so
    later appends cannot bury the damage mid-file.
    """
    if not os.path.exists(path):
        return Ledger(path=path)
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()

    def parse_events(raw: str):
        return [LedgerEvent.from_stanza(s) for s in deb822.parse_stanzas(raw)]

    try:
        events = parse_events(text)
        good_text = text
    except PilotError:
        trimmed = text.rstrip("\n")
        boundary = trimmed.rfind("\n\n")
        good_text = text[: boundary + 1] if boundary != -1 else ""
        try:
            events = parse_events(good_text)
        except PilotError as err:
            raise LedgerCorruptError(f"{path}: {err}") from err
        log.warning("%s: dropped corrupt trailing stanza", path)
        if for_write:
            with open(path, "r+", encoding="utf-8") as handle:
                handle.truncate(len(good_text.encode("utf-8")))

    return Ledger(path=path, events=tuple(events), tasks=_tasks_from_events(events))


def _append_events(path: str, events: list[LedgerEvent]) -> None:
    payload = deb822.serialize_stanzas([e.to_stanza() for e in events])
    exists = os.path.exists(path) and os.path.getsize(path) > 0
    with open(path, "a", encoding="utf-8") as handle:
        if exists:
            handle.write("\n")
        handle.write(payload)
        handle.flush()
        os.fsync(handle.fileno())


def record_event(
    ledger: Ledger,
    package: str,
    hop: str,
    to_state: TaskState,
    note: str = "",
    timestamp: str = "",
    actor: str = "operator",
    version: str = "",
) -> Ledger:
    """Append one workflow event; returns the updated ledger value.

    A first event for an unknown (package, hop) creates the task in
    SELECTED; a non-SELECTED to_state is then applied on top, and the
    whole sequence is validated before anything is persisted.  The input
    ledger value is never mutated.
    """
    if not timestamp:
        raise ValueError("timestamp is required; the ledger never reads a clock")
    lock_path = ledger.path + ".lock"
    os.makedirs(os.path.dirname(os.path.abspath(ledger.path)), exist_ok=True)
    with open(lock_path, "w") as lock:
        fcntl.flock(lock, fcntl.LOCK_EX)
        try:
            current = load_ledger(ledger.path, for_write=True)
            key = (package, hop)
            task = current.tasks.get(key)
            new_events: list[LedgerEvent] = []
            if task is None:
                new_events.append(
                    LedgerEvent(
                        package=package,
                        hop=hop,
                        from_state=None,
                        to_state=TaskState.SELECTED,
                        timestamp=timestamp,
                        actor=actor,
                        note=note,
                        version=version,
                    )
                )
                if to_state is not TaskState.SELECTED:
                    if to_state not in LEGAL_TRANSITIONS[TaskState.SELECTED]:
                        raise IllegalTransitionError(TaskState.SELECTED.value, to_state.value)
                    new_events.append(
                        LedgerEvent(
                            package=package,
                            hop=hop,
                            from_state=TaskState.SELECTED,
                            to_state=to_state,
                            timestamp=timestamp,
                            actor=actor,
                            note=note,
                            version=version,
                        )
                    )
            else:
                if to_state is TaskState.SELECTED:
                    raise IllegalTransitionError(task.state.value, to_state.value)
                if to_state not in LEGAL_TRANSITIONS[task.state]:
                    raise IllegalTransitionError(task.state.value, to_state.value)
                new_events.append(
                    LedgerEvent(
                        package=package,
                        hop=hop,
                        from_state=task.state,
                        to_state=to_state,
                        timestamp=timestamp,
                        actor=actor,
                        note=note,
                        version=version,
                    )
                )
            _append_events(ledger.path, new_events)
            all_events = current.events + tuple(new_events)
            return Ledger(path=ledger.path, events=all_events, tasks=_tasks_from_events(all_events))
        finally:
            fcntl.flock(lock, fcntl.LOCK_UN)


BUILDING_SUCCESS = "success"
BUILDING_FAILED = "failed"
NO_TASK = "no task"
UPLOADED_SUCCESS = "success"
BACKPORTED_DONE = "done"
BACKPORTED_NOT_FILED = "not filed"


@dataclass(frozen=True)
class PackageRollup:
    package: str
    building: str
    uploaded: str
    backported: str
    from_label: str
    notes: str
    version: str


@dataclass(frozen=True)
class LedgerSummary:
    state_counts: dict
    rollups: dict  # package -> PackageRollup


def summarize(ledger: Ledger) -> LedgerSummary:
    """Counts per current state plus the per-package status-column rollup."""
    counts = {state: 0 for state in TaskState}
    for task in ledger.tasks.values():
        counts[task.state] += 1

    by_package: dict[str, list[BackportTask]] = {}
    for task in ledger.tasks.values():
        by_package.setdefault(task.package, []).append(task)

    rollups = {}
    for package, tasks in by_package.items():
        events = [e for t in tasks for e in t.events]
        # file order is authoritative for "most recent"
        ordered = [e for e in ledger.events if e.package == package]
        build_succeeded = any(e.to_state is TaskState.BUILD_SUCCEEDED for e in events)
        build_failed = any(t.state is TaskState.BUILD_FAILED for t in tasks)
        uploaded = any(e.to_state is TaskState.UPLOADED for e in events)
        done_hops = [e.hop for e in ordered if e.to_state is TaskState.DONE]
        has_done = any(t.state is TaskState.DONE for t in tasks)
        has_not_filed = any(t.state is TaskState.NOT_FILED for t in tasks)

        if build_succeeded:
            building = BUILDING_SUCCESS
        elif build_failed:
            building = BUILDING_FAILED
        else:
            building = NO_TASK
        if has_done:
            backported = BACKPORTED_DONE
        elif has_not_filed:
            backported = BACKPORTED_NOT_FILED
        else:
            backported = NO_TASK

        notes = []
        version = ""
        for event in ordered:
            if event.note and event.note not in notes:
                notes.append(event.note)
            if event.version and not version:
                version = event.version
        rollups[package] = PackageRollup(
            package=package,
            building=building,
            uploaded=UPLOADED_SUCCESS if uploaded else NO_TASK,
            backported=backported,
            from_label=done_hops[-1] if done_hops else "",
            notes="; ".join(notes),
            version=version,
        )
    return LedgerSummary(state_counts=counts, rollups=rollups)

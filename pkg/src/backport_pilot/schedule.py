"""Release calendar model and backport-round planning.

LTS versions appear in April of even years (with the historical 6.06
two-month slip).  A backport round is triggered at a later release's
import freeze, the point after which no new packages enter that release,
so everything importable is known.  Rounds for one LTS run until the next
LTS closes the era.  Freeze dates are data, not a formula: they come from
the calendar file.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass
from importlib import resources

from . import deb822
from .errors import BadVersionStringError, MissingFieldError, NotAnLtsError, UnknownTargetError

_VERSION = re.compile(r"(\d{1,2})\.(\d{2})\Z")


def is_lts(version: str) -> bool:
    """True for April releases of even years; 6.06 is the historical exception."""
    m = _VERSION.match(version)
    if not m:
        raise BadVersionStringError(f"expected YY.MM, got {version!r}")
    if version == "6.06":
        return True
    year, month = int(m.group(1)), m.group(2)
    return month == "04" and year % 2 == 0


@dataclass(frozen=True)
class ReleaseMilestone:
    version: str
    release_date: datetime.date
    codename: str = ""
    import_freeze: datetime.date | None = None

    def __post_init__(self):
        m = _VERSION.match(self.version)
        if not m:
            raise BadVersionStringError(f"expected YY.MM, got {self.version!r}")
        if m.group(2) not in ("04", "10") and self.version != "6.06":
            raise BadVersionStringError(f"release month must be 04 or 10, got {self.version!r}")

    @property
    def is_lts(self) -> bool:
        return is_lts(self.version)


@dataclass(frozen=True)
class RoundPlan:
    trigger: ReleaseMilestone
    target_lts: str
    ordinal: int


def _parse_date(text: str, context: str) -> datetime.date:
    try:
        return datetime.date.fromisoformat(text)
    except ValueError:
        raise BadVersionStringError(f"{context}: bad date {text!r}") from None


def load_calendar(text: str) -> list[ReleaseMilestone]:
    """Parse the calendar file; result is sorted by release date."""
    milestones = []
    for stanza in deb822.parse_stanzas(text):
        version = stanza.get("Version")
        release = stanza.get("Release-Date")
        if not version or not release:
            raise MissingFieldError("calendar stanza needs Version and Release-Date")
        freeze = stanza.get("Import-Freeze")
        milestones.append(
            ReleaseMilestone(
                version=version,
                codename=stanza.get("Codename", "") or "",
                release_date=_parse_date(release, version),
                import_freeze=_parse_date(freeze, version) if freeze else None,
            )
        )
    return sorted(milestones, key=lambda m: m.release_date)


def default_calendar() -> list[ReleaseMilestone]:
    text = resources.files("backport_pilot").joinpath("data/release-calendar").read_text("utf-8")
    return load_calendar(text)


def plan_rounds(calendar: list[ReleaseMilestone], target_lts: str) -> list[RoundPlan]:
    """One round per milestone after the target, through the next LTS.

    The round triggered at the next LTS's own freeze still targets the old
    LTS; after that the era is over.  An open horizon (no later LTS in the
    calendar) yields no rounds.
    """
    if not is_lts(target_lts):
        raise NotAnLtsError(f"{target_lts} is not an LTS version")
    target = next((m for m in calendar if m.version == target_lts), None)
    if target is None:
        raise UnknownTargetError(f"{target_lts} is not in the calendar")
    rounds: list[RoundPlan] = []
    for milestone in calendar:
        if milestone.release_date <= target.release_date:
            continue
        rounds.append(RoundPlan(trigger=milestone, target_lts=target_lts, ordinal=len(rounds) + 1))
        if milestone.is_lts:
            return rounds
    return []


def next_trigger(calendar: list[ReleaseMilestone], today: datetime.date) -> ReleaseMilestone | None:
    """Earliest milestone whose import freeze is today or later."""
    upcoming = [m for m in calendar if m.import_freeze is not None and m.import_freeze >= today]
    return min(upcoming, key=lambda m: m.import_freeze, default=None)

"""Shared immutable vocabulary: labels, topics, arguments, judgments, users, scores.

All values here are plain frozen dataclasses plus one enum; they are safe to
share between threads and serialize losslessly to/from dicts for the journal.
Timestamps are timezone-aware UTC datetimes, stored as ISO-8601 strings.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Optional, Sequence

from .errors import err

DIST_TOL = 1e-9


class FallacyLabel(enum.Enum):
    """The six-way label space. `no_fallacy` is a first-class label.

    Enumeration order is the tie-break order everywhere (argmax, majority
    vote, bot guesses): ad_hominem first.
    """

    AD_HOMINEM = "ad_hominem"
    APPEAL_TO_EMOTION = "appeal_to_emotion"
    RED_HERRING = "red_herring"
    HASTY_GENERALIZATION = "hasty_generalization"
    IRRELEVANT_AUTHORITY = "irrelevant_authority"
    NO_FALLACY = "no_fallacy"

    @property
    def index(self) -> int:
        return LABELS.index(self)


LABELS: tuple[FallacyLabel, ...] = tuple(FallacyLabel)
N_LABELS = len(LABELS)
LABEL_CODES: tuple[str, ...] = tuple(l.value for l in LABELS)

# Fallacy types a write round may assign. `no_fallacy` is assignable only in
# PvP, where the system samples types over the full six-way space.
WRITABLE_LABELS: tuple[FallacyLabel, ...] = tuple(
    l for l in LABELS if l is not FallacyLabel.NO_FALLACY
)


def label_from_code(code: str) -> FallacyLabel:
    try:
        return FallacyLabel(code)
    except ValueError:
        raise err("schema_violation", f"unknown fallacy label {code!r}") from None


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def ts_to_str(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat()


def ts_from_str(raw: str) -> datetime:
    # clients may send the Z suffix, which fromisoformat only learned in 3.11
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    parsed = datetime.fromisoformat(raw)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


@dataclass(frozen=True)
class Topic:
    id: str
    language: str
    title: str
    description: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "language": self.language,
            "title": self.title,
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Topic":
        return cls(
            id=d["id"],
            language=d["language"],
            title=d["title"],
            description=d.get("description", ""),
        )


@dataclass(frozen=True)
class GoldAssignment:
    """Aggregated gold label for an argument.

    label is the argmax of the posterior (ties broken by enum order) and the
    posterior entropy must lie below the configured threshold, both enforced
    by the aggregation pipeline before this value is ever constructed.
    """

    label: FallacyLabel
    posterior: tuple[float, ...]
    entropy_nats: float
    batch_id: str

    def to_dict(self) -> dict:
        return {
            "label": self.label.value,
            "posterior": list(self.posterior),
            "entropy_nats": self.entropy_nats,
            "batch_id": self.batch_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GoldAssignment":
        return cls(
            label=FallacyLabel(d["label"]),
            posterior=tuple(d["posterior"]),
            entropy_nats=d["entropy_nats"],
            batch_id=d["batch_id"],
        )


@dataclass(frozen=True)
class Argument:
    """A user-written (or seed) argument. Seeds have author_id None."""

    id: str
    author_id: Optional[str]
    topic_id: str
    language: str
    text: str
    assigned_type: FallacyLabel
    created_at: datetime
    status: str = "active"  # active | flagged | removed
    gold: Optional[GoldAssignment] = None

    def with_status(self, status: str) -> "Argument":
        return replace(self, status=status)

    def with_gold(self, gold: Optional[GoldAssignment]) -> "Argument":
        return replace(self, gold=gold)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "author_id": self.author_id,
            "topic_id": self.topic_id,
            "language": self.language,
            "text": self.text,
            "assigned_type": self.assigned_type.value,
            "created_at": ts_to_str(self.created_at),
            "status": self.status,
            "gold": self.gold.to_dict() if self.gold else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Argument":
        gold = d.get("gold")
        return cls(
            id=d["id"],
            author_id=d["author_id"],
            topic_id=d["topic_id"],
            language=d["language"],
            text=d["text"],
            assigned_type=FallacyLabel(d["assigned_type"]),
            created_at=ts_from_str(d["created_at"]),
            status=d["status"],
            gold=GoldAssignment.from_dict(gold) if gold else None,
        )


JUDGMENT_SOURCES = ("authored", "recognition_round", "pvp_guess")


@dataclass(frozen=True)
class Judgment:
    """One (item, rater, label) vote. At most one per (item, rater)."""

    item_id: str
    rater_id: str
    label: FallacyLabel
    source: str
    created_at: datetime

    @property
    def key(self) -> str:
        return judgment_key(self.item_id, self.rater_id)

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "rater_id": self.rater_id,
            "label": self.label.value,
            "source": self.source,
            "created_at": ts_to_str(self.created_at),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Judgment":
        return cls(
            item_id=d["item_id"],
            rater_id=d["rater_id"],
            label=FallacyLabel(d["label"]),
            source=d["source"],
            created_at=ts_from_str(d["created_at"]),
        )


def judgment_key(item_id: str, rater_id: str) -> str:
    return f"{item_id}:{rater_id}"


@dataclass(frozen=True)
class UserAccount:
    id: str
    handle: str
    avatar_id: str
    password_digest: str
    roles: tuple[str, ...]
    total_points: int
    created_at: datetime
    is_bot: bool = False

    @property
    def is_admin(self) -> bool:
        return "admin" in self.roles

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "handle": self.handle,
            "avatar_id": self.avatar_id,
            "password_digest": self.password_digest,
            "roles": list(self.roles),
            "total_points": self.total_points,
            "created_at": ts_to_str(self.created_at),
            "is_bot": self.is_bot,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UserAccount":
        return cls(
            id=d["id"],
            handle=d["handle"],
            avatar_id=d["avatar_id"],
            password_digest=d["password_digest"],
            roles=tuple(d["roles"]),
            total_points=d["total_points"],
            created_at=ts_from_str(d["created_at"]),
            is_bot=d.get("is_bot", False),
        )


SCORE_REASONS = (
    "soft_feedback",
    "hard_correct",
    "write_submit",
    "deferred_author_bonus",
    "pvp_guess_correct",
)


@dataclass(frozen=True)
class ScoreEvent:
    id: str
    user_id: str
    points: int
    reason: str
    occurred_at: datetime
    ref: str  # related round / match / argument id

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "user_id": self.user_id,
            "points": self.points,
            "reason": self.reason,
            "occurred_at": ts_to_str(self.occurred_at),
            "ref": self.ref,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreEvent":
        return cls(
            id=d["id"],
            user_id=d["user_id"],
            points=d["points"],
            reason=d["reason"],
            occurred_at=ts_from_str(d["occurred_at"]),
            ref=d["ref"],
        )


def validate_argument_text(text: str, limits: tuple[int, int]) -> str:
    """Return the trimmed text, or raise empty/too_short/too_long.

    Whitespace-only input counts as empty regardless of the lower bound.
    """
    min_chars, max_chars = limits
    trimmed = text.strip()
    if not trimmed:
        raise err("empty", "argument text is empty")
    if len(trimmed) < min_chars:
        raise err("too_short", f"argument shorter than {min_chars} characters")
    if len(trimmed) > max_chars:
        raise err("too_long", f"argument longer than {max_chars} characters")
    return trimmed


def check_distribution(p: Sequence[float], size: int = N_LABELS) -> None:
    if len(p) != size:
        raise err("malformed_distribution", f"expected {size} entries, got {len(p)}")
    if any(x < 0 for x in p):
        raise err("malformed_distribution", "negative probability")
    if abs(sum(p) - 1.0) > DIST_TOL:
        raise err("malformed_distribution", f"probabilities sum to {sum(p)!r}")


def argmax_label(posterior: Sequence[float]) -> FallacyLabel:
    """Label of maximal probability; exact ties go to the smallest enum index."""
    check_distribution(posterior)
    best = max(posterior)
    return LABELS[list(posterior).index(best)]


def posterior_entropy(p: Sequence[float]) -> float:
    """Shannon entropy in nats, with 0 * ln 0 := 0."""
    if any(x < 0 for x in p):
        raise err("malformed_distribution", "negative probability")
    if abs(sum(p) - 1.0) > DIST_TOL:
        raise err("malformed_distribution", f"probabilities sum to {sum(p)!r}")
    return -sum(x * math.log(x) for x in p if x > 0.0)

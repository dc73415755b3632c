"""World/level/round state machine, scoring, progression, and leaderboards.

Round payloads are computed and persisted at mutation time (level start or a
submit advancing the cursor); reading the current round returns the cached
payload, so reads never mutate state and repeated reads are identical. A level
session completes as soon as its last round is submitted, regardless of
whether any answer was correct.
"""

from __future__ import annotations

import random
from datetime import date, datetime, timedelta
from typing import Callable, Optional

from .aggregation import GoldBatch
from .config import ContentPack, GameConfig, LevelConfig, RoundConfig, WorldConfig
from .domain import (
    Argument,
    FallacyLabel,
    Judgment,
    ScoreEvent,
    UserAccount,
    WRITABLE_LABELS,
    judgment_key,
    label_from_code,
    ts_to_str,
    utcnow,
    validate_argument_text,
)
from .errors import err
from .store import Repository

SOFT_FEEDBACK_KEY = "feedback.soft"


def explanation_key(label: FallacyLabel) -> str:
    return f"fallacy.{label.value}.explanation"


class GameEngine:
    """Gameplay rules evaluated against a repository snapshot.

    All randomness flows through one seeded Random instance, so a fixed seed
    plus a fixed call sequence replays bit-identically.
    """

    def __init__(
        self,
        repo: Repository,
        config: GameConfig,
        packs: dict[str, ContentPack],
        rng: random.Random,
        now_fn: Callable[[], datetime] = utcnow,
    ):
        self.repo = repo
        self.config = config
        self.packs = packs
        self.rng = rng
        self.now = now_fn

    # ---- lookups ----------------------------------------------------------

    def user(self, user_id: str) -> UserAccount:
        entity = self.repo.get("user", user_id)
        if entity is None:
            raise err("unknown_user", f"no user {user_id!r}")
        return UserAccount.from_dict(entity.data)

    def pack(self, language: str) -> ContentPack:
        if language not in self.packs:
            raise err("unknown_language", f"no content pack for {language!r}")
        return self.packs[language]

    def argument(self, argument_id: str) -> Argument:
        entity = self.repo.get("argument", argument_id)
        if entity is None:
            raise err("unknown_argument", f"no argument {argument_id!r}")
        return Argument.from_dict(entity.data)

    def bot_ids(self) -> frozenset[str]:
        return frozenset(
            e.id for e in self.repo.scan("user", lambda e: e.data.get("is_bot", False))
        )

    def judgments_of_item(self, item_id: str) -> list[Judgment]:
        rows = self.repo.scan("judgment", lambda e: e.data["item_id"] == item_id)
        return [Judgment.from_dict(e.data) for e in rows]

    def vote_count(self, item_id: str, bot_ids: frozenset[str]) -> int:
        """Aggregation-eligible votes only; bot votes never count."""
        return sum(1 for j in self.judgments_of_item(item_id) if j.rater_id not in bot_ids)

    def has_judged(self, user_id: str, item_id: str) -> bool:
        return self.repo.exists("judgment", judgment_key(item_id, user_id))

    # ---- progression ------------------------------------------------------

    def completed_levels(self, user_id: str) -> set[str]:
        entity = self.repo.get("progress", user_id)
        return set(entity.data["completed_levels"]) if entity else set()

    def world_completed(self, world: WorldConfig, completed: set[str]) -> bool:
        return all(level.id in completed for level in world.levels)

    def world_unlocked(self, world: WorldConfig, completed: set[str]) -> bool:
        if world.unlock_requires is None:
            return True
        required = self.config.world(world.unlock_requires)
        return self.world_completed(required, completed)

    def fog_fraction(self, world: WorldConfig, completed: set[str]) -> float:
        if not world.levels:
            return 0.0
        done = sum(1 for level in world.levels if level.id in completed)
        return 1.0 - done / len(world.levels)

    def pvp_unlocked(self, user_id: str) -> bool:
        world = self.config.pvp_world()
        if world is None:
            return False
        return self.world_unlocked(world, self.completed_levels(user_id))

    def progression_view(self, user_id: str) -> dict:
        account = self.user(user_id)
        completed = self.completed_levels(user_id)
        worlds = []
        for world in self.config.worlds:
            worlds.append(
                {
                    "id": world.id,
                    "title_key": world.title_key,
                    "theme": world.theme,
                    "kind": world.kind,
                    "unlocked": self.world_unlocked(world, completed),
                    "fog_fraction": self.fog_fraction(world, completed),
                    "levels": [
                        {
                            "id": level.id,
                            "completed": level.id in completed,
                            "rounds": len(level.rounds),
                        }
                        for level in world.levels
                    ],
                }
            )
        return {"worlds": worlds, "total_points": account.total_points}

    # ---- level sessions ---------------------------------------------------

    def start_level(self, user_id: str, level_id: str, language: str = "en") -> dict:
        self.user(user_id)
        self.pack(language)
        world, level = self.config.find_level(level_id)
        if not self.world_unlocked(world, self.completed_levels(user_id)):
            raise err("world_locked", f"world {world.id!r} is still locked")
        session_id = self.repo.next_id("session", "session")
        data = {
            "id": session_id,
            "user_id": user_id,
            "level_id": level_id,
            "language": language,
            "round_cursor": 0,
            "round_results": [],
            "state": "in_progress",
            "pending_round": None,
            "created_at": ts_to_str(self.now()),
        }
        data["pending_round"] = self._build_round_payload(data, level)
        self.repo.put("session", session_id, data)
        return self.session_view(data)

    def session_view(self, data: dict) -> dict:
        _, level = self.config.find_level(data["level_id"])
        return {
            "session_id": data["id"],
            "level_id": data["level_id"],
            "language": data["language"],
            "state": data["state"],
            "cursor": data["round_cursor"],
            "total_rounds": len(level.rounds),
        }

    def _session(self, session_id: str, user_id: str) -> dict:
        entity = self.repo.get("session", session_id)
        if entity is None:
            raise err("unknown_session", f"no session {session_id!r}")
        if entity.data["user_id"] != user_id:
            raise err("forbidden", "session belongs to another user")
        return dict(entity.data)

    def _build_round_payload(self, session: dict, level: LevelConfig) -> Optional[dict]:
        """Payload for the round at the cursor, pinned now; None past the end."""
        cursor = session["round_cursor"]
        if cursor >= len(level.rounds):
            return None
        round_cfg = level.rounds[cursor]
        base = {
            "session_id": session["id"],
            "round_id": round_cfg.id,
            "kind": round_cfg.kind,
            "cursor": cursor,
            "total_rounds": len(level.rounds),
        }
        if round_cfg.kind == "write_fallacy":
            return {**base, **self._write_round_payload(session, level, round_cfg)}
        return {**base, **self._recognize_round_payload(session, level, round_cfg)}

    def _write_round_payload(
        self, session: dict, level: LevelConfig, round_cfg: RoundConfig
    ) -> dict:
        pack = self.pack(session["language"])
        assignable = [l for l in level.fallacy_subset if l in WRITABLE_LABELS]
        assigned = self.rng.choice(assignable)
        topic = self.rng.choice(sorted(pack.topics, key=lambda t: t.id))
        return {
            "topic": topic.to_dict(),
            "assigned_type": assigned.value,
            "assigned_type_description": pack.description_of(assigned),
            "explanation_key": explanation_key(assigned),
            "limits": {
                "min_chars": self.config.text_limits[0],
                "max_chars": self.config.text_limits[1],
            },
        }

    def _recognize_round_payload(
        self, session: dict, level: LevelConfig, round_cfg: RoundConfig
    ) -> dict:
        pack = self.pack(session["language"])
        try:
            argument = self.select_argument_for_judging(
                session["user_id"], session["language"], level.fallacy_subset
            )
        except Exception as exc:
            code = getattr(exc, "code", None)
            if code == "pool_empty":
                return {"error": "content_exhausted"}
            raise
        return {
            "argument": {
                "id": argument.id,
                "text": argument.text,
                "topic_id": argument.topic_id,
                "topic_title": pack.topic(argument.topic_id).title,
            },
            "candidate_labels": [l.value for l in round_cfg.candidate_labels],
        }

    def serve_round(self, session_id: str, user_id: str) -> dict:
        """Read-only: returns the payload pinned by the last mutation."""
        session = self._session(session_id, user_id)
        if session["state"] == "completed":
            raise err("session_completed", "level already completed")
        pending = session["pending_round"]
        if pending is None:
            raise err("session_completed", "no round pending")
        if pending.get("error") == "content_exhausted":
            raise err("content_exhausted", "no argument available to judge")
        return pending

    def select_argument_for_judging(
        self, user_id: str, language: str, fallacy_subset: tuple[FallacyLabel, ...]
    ) -> Argument:
        """Pick uniformly within the neediest tier.

        Tier (a): arguments still short of the vote gate (1..min_votes-1
        eligible votes). Tier (b): gold-labeled arguments, which enable hard
        feedback. Tier (c): the rest, which at cold start is exactly the
        zero-vote seed content.
        """
        bots = self.bot_ids()
        subset = set(fallacy_subset)
        judged = {
            e.data["item_id"]
            for e in self.repo.scan("judgment", lambda e: e.data["rater_id"] == user_id)
        }
        # arguments whose duel guess is still pending stay out of the pool, so
        # the guesser can never be blocked by an earlier recognition vote
        in_flight = set()
        for entity in self.repo.scan("match", lambda e: e.data["state"] != "finished"):
            for exchange in entity.data["exchanges"]:
                if exchange["argument_id"] and exchange["guess"] is None:
                    in_flight.add(exchange["argument_id"])
        eligible = []
        for entity in self.repo.scan("argument"):
            arg = Argument.from_dict(entity.data)
            if arg.status != "active" or arg.language != language:
                continue
            if arg.assigned_type not in subset:
                continue
            if arg.author_id == user_id or arg.id in judged or arg.id in in_flight:
                continue
            eligible.append(arg)
        min_votes = self.config.aggregation.min_votes
        tier_a, tier_b, tier_c = [], [], []
        for arg in eligible:
            votes = self.vote_count(arg.id, bots)
            if 1 <= votes < min_votes:
                tier_a.append(arg)
            elif arg.gold is not None:
                tier_b.append(arg)
            else:
                tier_c.append(arg)
        for tier in (tier_a, tier_b, tier_c):
            if tier:
                return self.rng.choice(sorted(tier, key=lambda a: a.id))
        raise err("pool_empty", "no eligible argument to judge")

    # ---- submits ----------------------------------------------------------

    def _pending_or_wrong_round(self, session: dict, round_id: str, kind: str) -> dict:
        if session["state"] == "completed" or session["pending_round"] is None:
            raise err("session_completed", "level already completed")
        pending = session["pending_round"]
        if pending.get("error") == "content_exhausted":
            raise err("content_exhausted", "no argument available to judge")
        if pending["round_id"] != round_id or pending["kind"] != kind:
            raise err(
                "wrong_round",
                f"expected round {pending['round_id']!r} of kind {pending['kind']!r}",
            )
        return pending

    def _advance(self, session: dict, level: LevelConfig, result: dict) -> None:
        session["round_results"] = session["round_results"] + [result]
        session["round_cursor"] += 1
        if session["round_cursor"] >= len(level.rounds):
            session["state"] = "completed"
            session["pending_round"] = None
        else:
            session["pending_round"] = self._build_round_payload(session, level)
        self.repo.put("session", session["id"], session)
        if session["state"] == "completed":
            self._apply_level_completion(session["user_id"], session["level_id"])

    def record_score(self, user_id: str, points: int, reason: str, ref: str) -> Optional[ScoreEvent]:
        """Persist a score event and bump the account total in one atomic
        batch (total_points must equal the event sum even across a crash).
        Zero-point outcomes and bot accounts record nothing."""
        if points <= 0:
            return None
        account = self.user(user_id)
        if account.is_bot:
            return None
        event = ScoreEvent(
            id=self.repo.next_id("score_event", "ev"),
            user_id=user_id,
            points=points,
            reason=reason,
            occurred_at=self.now(),
            ref=ref,
        )
        data = account.to_dict()
        data["total_points"] = account.total_points + points
        self.repo.put_batch(
            [("score_event", event.id, event.to_dict()), ("user", user_id, data)]
        )
        return event

    def store_argument(
        self,
        author_id: Optional[str],
        topic_id: str,
        language: str,
        text: str,
        assigned_type: FallacyLabel,
    ) -> Argument:
        """Persist an argument plus, for authored content, the author's single
        authored vote."""
        argument = Argument(
            id=self.repo.next_id("argument", "arg"),
            author_id=author_id,
            topic_id=topic_id,
            language=language,
            text=text,
            assigned_type=assigned_type,
            created_at=self.now(),
        )
        items = [("argument", argument.id, argument.to_dict())]
        if author_id is not None:
            judgment = Judgment(
                item_id=argument.id,
                rater_id=author_id,
                label=assigned_type,
                source="authored",
                created_at=self.now(),
            )
            items.append(("judgment", judgment.key, judgment.to_dict()))
        self.repo.put_batch(items)
        return argument

    def submit_write_round(self, session_id: str, user_id: str, round_id: str, text: str) -> dict:
        session = self._session(session_id, user_id)
        _, level = self.config.find_level(session["level_id"])
        pending = self._pending_or_wrong_round(session, round_id, "write_fallacy")
        clean = validate_argument_text(text, self.config.text_limits)
        argument = self.store_argument(
            author_id=user_id,
            topic_id=pending["topic"]["id"],
            language=session["language"],
            text=clean,
            assigned_type=label_from_code(pending["assigned_type"]),
        )
        reward = self.config.scoring.write_submit_points
        self.record_score(user_id, reward, "write_submit", argument.id)
        feedback = {"kind": "soft", "explanation_key": SOFT_FEEDBACK_KEY}
        self._advance(
            session,
            level,
            {
                "round_id": round_id,
                "response": {"argument_id": argument.id},
                "reward": reward,
                "feedback_kind": "soft",
            },
        )
        return {
            "feedback": feedback,
            "reward": reward,
            "argument_id": argument.id,
            "session": self.session_view(session),
        }

    def submit_recognition_round(
        self, session_id: str, user_id: str, round_id: str, guess: FallacyLabel
    ) -> dict:
        session = self._session(session_id, user_id)
        _, level = self.config.find_level(session["level_id"])
        pending = self._pending_or_wrong_round(session, round_id, "recognize_fallacy")
        item_id = pending["argument"]["id"]
        if self.has_judged(user_id, item_id):
            # stale pin (e.g. judged through a parallel session): repin so the
            # next read serves fresh content, then surface the conflict
            session["pending_round"] = self._build_round_payload(session, level)
            self.repo.put("session", session["id"], session)
            raise err("duplicate_judgment", f"already judged {item_id!r}")
        argument = self.argument(item_id)
        judgment = Judgment(
            item_id=item_id,
            rater_id=user_id,
            label=guess,
            source="recognition_round",
            created_at=self.now(),
        )
        self.repo.put("judgment", judgment.key, judgment.to_dict())

        # the gate uses the gold label as of judgment time; later aggregation
        # runs never retroactively change awarded points
        if argument.gold is not None:
            correct = guess is argument.gold.label
            reward = self.config.scoring.hard_correct_points if correct else 0
            if reward:
                self.record_score(user_id, reward, "hard_correct", item_id)
            feedback = {
                "kind": "hard",
                "correct": correct,
                "gold_label": argument.gold.label.value,
                "explanation_key": explanation_key(argument.gold.label),
                "explanation": self.pack(session["language"]).description_of(
                    argument.gold.label
                ),
            }
            feedback_kind = "hard"
        else:
            reward = self.config.scoring.soft_feedback_points
            self.record_score(user_id, reward, "soft_feedback", item_id)
            feedback = {"kind": "soft", "explanation_key": SOFT_FEEDBACK_KEY}
            feedback_kind = "soft"
        self._advance(
            session,
            level,
            {
                "round_id": round_id,
                "response": {"argument_id": item_id, "guess": guess.value},
                "reward": reward,
                "feedback_kind": feedback_kind,
            },
        )
        return {
            "feedback": feedback,
            "reward": reward,
            "session": self.session_view(session),
        }

    # ---- completion and bonuses -------------------------------------------

    def _apply_level_completion(self, user_id: str, level_id: str) -> None:
        completed = self.completed_levels(user_id)
        if level_id in completed:
            return
        completed.add(level_id)
        self.repo.put(
            "progress", user_id, {"user_id": user_id, "completed_levels": sorted(completed)}
        )

    def finish_level(self, session_id: str, user_id: str) -> dict:
        session = self._session(session_id, user_id)
        world, level = self.config.find_level(session["level_id"])
        if session["round_cursor"] < len(level.rounds):
            raise err("session_incomplete", "rounds remain")
        self._apply_level_completion(user_id, session["level_id"])
        completed = self.completed_levels(user_id)
        return {
            "level_id": level.id,
            "world_id": world.id,
            "fog_fraction": self.fog_fraction(world, completed),
            "unlocked_worlds": [
                w.id for w in self.config.worlds if self.world_unlocked(w, completed)
            ],
        }

    def compute_deferred_author_bonuses(self, batch: GoldBatch) -> list[dict]:
        """Pending bonus descriptors for a finished aggregation batch.

        A bonus is due when the gold label confirms the assigned type, at most
        once per argument ever (idempotent across reruns). Returns plain
        descriptors so the caller controls atomicity of the actual writes.
        """
        already = {
            e.data["ref"]
            for e in self.repo.scan(
                "score_event", lambda e: e.data["reason"] == "deferred_author_bonus"
            )
        }
        bots = self.bot_ids()
        due = []
        for item_id, gold in sorted(batch.gold.items()):
            if item_id in already:
                continue
            argument = self.argument(item_id)
            if argument.author_id is None or argument.author_id in bots:
                continue
            if gold.label is not argument.assigned_type:
                continue
            due.append(
                {
                    "user_id": argument.author_id,
                    "points": self.config.scoring.deferred_author_bonus,
                    "ref": item_id,
                }
            )
        return due

    def apply_deferred_author_bonus(self, batch: GoldBatch) -> list[ScoreEvent]:
        events = []
        for bonus in self.compute_deferred_author_bonuses(batch):
            event = self.record_score(
                bonus["user_id"], bonus["points"], "deferred_author_bonus", bonus["ref"]
            )
            if event:
                events.append(event)
        return events

    # ---- leaderboards -----------------------------------------------------

    @staticmethod
    def iso_week(ts: datetime) -> tuple[int, int]:
        cal = ts.date().isocalendar()
        return (cal[0], cal[1])

    def _weekly_points(self, week: tuple[int, int]) -> dict[str, int]:
        totals: dict[str, int] = {}
        for entity in self.repo.scan("score_event"):
            event = ScoreEvent.from_dict(entity.data)
            if self.iso_week(event.occurred_at) == week:
                totals[event.user_id] = totals.get(event.user_id, 0) + event.points
        return totals

    def _ranked(self, points_of: Callable[[UserAccount], int]) -> list[dict]:
        players = [
            UserAccount.from_dict(e.data)
            for e in self.repo.scan("user", lambda e: not e.data.get("is_bot", False))
        ]
        players.sort(key=lambda u: (-points_of(u), u.created_at, u.id))
        return [
            {
                "rank": k + 1,
                "user_id": u.id,
                "handle": u.handle,
                "avatar_id": u.avatar_id,
                "points": points_of(u),
            }
            for k, u in enumerate(players)
        ]

    def leaderboard(self, period: str, now: Optional[datetime] = None) -> dict:
        if period not in ("all_time", "weekly"):
            raise err("invalid_period", f"unknown leaderboard period {period!r}")
        now = now or self.now()
        this_week = self.iso_week(now)
        monday = date.fromisocalendar(this_week[0], this_week[1], 1)
        prev_cal = (monday - timedelta(days=1)).isocalendar()
        prev_totals = self._weekly_points((prev_cal[0], prev_cal[1]))

        player_of_the_week = None
        if prev_totals:
            by_user = {e.id: e for e in self.repo.scan("user")}
            candidates = sorted(
                prev_totals.items(),
                key=lambda kv: (
                    -kv[1],
                    UserAccount.from_dict(by_user[kv[0]].data).created_at,
                    kv[0],
                ),
            )
            top_id = candidates[0][0]
            top = UserAccount.from_dict(by_user[top_id].data)
            player_of_the_week = {
                "user_id": top.id,
                "handle": top.handle,
                "points": prev_totals[top_id],
            }

        if period == "all_time":
            rankings = self._ranked(lambda u: u.total_points)
        else:
            week_totals = self._weekly_points(this_week)
            rankings = self._ranked(lambda u: week_totals.get(u.id, 0))
        return {
            "period": period,
            "rankings": rankings,
            "player_of_the_week": player_of_the_week,
        }

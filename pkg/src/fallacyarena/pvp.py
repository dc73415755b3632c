"""Asynchronous duels: alternating write/guess turns on a controversy, turn
notifications, and a keyword-heuristic bot opponent.

Protocol for a match of N exchanges between A (challenger) and B:
A writes, B guesses, B writes, A guesses, ... so writers alternate and nobody
writes twice in a row. After a guess that does not end the match the guesser
immediately becomes the next writer (no ownership change, no notification);
after a write the other player takes over and gets a your_turn notification.

Every match mutation is compare-and-swap on the stored match version; a stale
expected_version is rejected before any write happens.
"""

from __future__ import annotations

from typing import Optional

from .domain import (
    LABELS,
    Argument,
    FallacyLabel,
    Judgment,
    ts_from_str,
    ts_to_str,
    validate_argument_text,
)
from .engine import GameEngine
from .errors import err


def lexicon_guess(text: str, lexicon: dict) -> FallacyLabel:
    """Per-label keyword hit count, argmax with enum-order tie-break; a
    cue-less text is guessed non-fallacious."""
    lowered = text.lower()
    scores = []
    for label in LABELS:
        words = lexicon.get(label.value, [])
        scores.append(sum(lowered.count(w) for w in words))
    if max(scores) == 0:
        return FallacyLabel.NO_FALLACY
    return LABELS[scores.index(max(scores))]


def _fresh_ids(repo, kind: str, prefix: str, count: int) -> list[str]:
    first = repo.next_id(kind, prefix)
    start = int(first.rsplit("-", 1)[1])
    return [f"{prefix}-{start + k}" for k in range(count)]


class PvpArena:
    def __init__(self, engine: GameEngine):
        self.engine = engine
        self.repo = engine.repo
        self.config = engine.config
        self.rng = engine.rng
        self.now = engine.now

    # ---- helpers -----------------------------------------------------------

    def _match(self, match_id: str) -> tuple[dict, int]:
        entity = self.repo.get("match", match_id)
        if entity is None:
            raise err("unknown_match", f"no match {match_id!r}")
        return dict(entity.data), entity.version

    def _other(self, match: dict, player_id: str) -> str:
        a, b = match["players"]
        return b if player_id == a else a

    def _notification(self, note_id: str, user_id: str, kind: str, match_id: str) -> tuple:
        data = {
            "id": note_id,
            "user_id": user_id,
            "kind": kind,
            "match_id": match_id,
            "created_at": ts_to_str(self.now()),
            "read": False,
        }
        return ("notification", note_id, data)

    def _new_exchange(self, writer_id: str) -> dict:
        assigned = self.rng.choice(LABELS)
        return {
            "writer": writer_id,
            "assigned_type": assigned.value,
            "argument_id": None,
            "guess": None,
            "guess_correct": None,
        }

    # ---- operations --------------------------------------------------------

    def create_match(
        self,
        challenger_id: str,
        opponent_id: str,
        topic_id: Optional[str] = None,
        language: str = "en",
    ) -> dict:
        challenger = self.engine.user(challenger_id)
        opponent = self.engine.user(opponent_id)
        if opponent_id == challenger_id:
            raise err("self_match", "cannot challenge yourself")
        if not self.engine.pvp_unlocked(challenger_id):
            raise err("pvp_locked", "finish the first world to unlock duels")
        pack = self.engine.pack(language)
        if topic_id is None:
            topic_id = self.rng.choice(sorted(pack.topics, key=lambda t: t.id)).id
        else:
            pack.topic(topic_id)
        match_id = self.repo.next_id("match", "match")
        match = {
            "id": match_id,
            "topic_id": topic_id,
            "language": language,
            "players": [challenger_id, opponent_id],
            "exchanges": [self._new_exchange(challenger_id)],
            "turn_owner": challenger_id,
            "state": "awaiting_write",
            "rounds_total": 2 * self.config.pvp_exchanges_per_player,
            "created_at": ts_to_str(self.now()),
        }
        items = [("match", match_id, match)]
        if not opponent.is_bot:
            note_id = _fresh_ids(self.repo, "notification", "note", 1)[0]
            items.append(self._notification(note_id, opponent_id, "challenge_received", match_id))
        self.repo.put_batch(items)
        self._run_bot(match_id)
        return self.view_match(match_id, challenger_id)

    def submit_turn(self, match_id: str, player_id: str, expected_version: int, text: str) -> dict:
        self._apply_turn(match_id, player_id, expected_version, text)
        self._run_bot(match_id)
        return self.view_match(match_id, player_id)

    def _apply_turn(self, match_id: str, player_id: str, expected_version: int, text: str) -> None:
        match, version = self._match(match_id)
        if match["state"] != "awaiting_write":
            raise err("not_your_turn", f"match is {match['state']}")
        if match["turn_owner"] != player_id:
            raise err("not_your_turn", "another player owns this turn")
        if expected_version != version:
            raise err("version_conflict", f"version is {version}, not {expected_version}")
        clean = validate_argument_text(text, self.config.text_limits)
        exchange = match["exchanges"][-1]
        argument = self.engine.store_argument(
            author_id=player_id,
            topic_id=match["topic_id"],
            language=match["language"],
            text=clean,
            assigned_type=FallacyLabel(exchange["assigned_type"]),
        )
        exchange["argument_id"] = argument.id
        other = self._other(match, player_id)
        match["turn_owner"] = other
        match["state"] = "awaiting_guess"
        items = [("match", match_id, match)]
        if not self.engine.user(other).is_bot:
            note_id = _fresh_ids(self.repo, "notification", "note", 1)[0]
            items.append(self._notification(note_id, other, "your_turn", match_id))
        self.repo.put_batch(items)

    def submit_guess(
        self, match_id: str, player_id: str, expected_version: int, guess: FallacyLabel
    ) -> dict:
        feedback = self._apply_guess(match_id, player_id, expected_version, guess)
        self._run_bot(match_id)
        view = self.view_match(match_id, player_id)
        view["feedback"] = feedback
        return view

    def _apply_guess(
        self, match_id: str, player_id: str, expected_version: int, guess: FallacyLabel
    ) -> dict:
        match, version = self._match(match_id)
        if match["state"] != "awaiting_guess":
            raise err("not_your_turn", f"match is {match['state']}")
        if match["turn_owner"] != player_id:
            raise err("not_your_turn", "another player owns this turn")
        if expected_version != version:
            raise err("version_conflict", f"version is {version}, not {expected_version}")
        exchange = match["exchanges"][-1]
        item_id = exchange["argument_id"]
        if self.engine.has_judged(player_id, item_id):
            raise err("duplicate_judgment", f"already judged {item_id!r}")
        assigned = FallacyLabel(exchange["assigned_type"])
        correct = guess is assigned
        exchange["guess"] = guess.value
        exchange["guess_correct"] = correct
        judgment = Judgment(
            item_id=item_id,
            rater_id=player_id,
            label=guess,
            source="pvp_guess",
            created_at=self.now(),
        )
        items = [("judgment", judgment.key, judgment.to_dict())]
        finished = len(match["exchanges"]) >= match["rounds_total"]
        if finished:
            match["state"] = "finished"
            match["turn_owner"] = None
            humans = [p for p in match["players"] if not self.engine.user(p).is_bot]
            note_ids = _fresh_ids(self.repo, "notification", "note", len(humans))
            for note_id, user_id in zip(note_ids, humans):
                items.append(self._notification(note_id, user_id, "match_finished", match_id))
        else:
            # the guesser writes next; ownership stays put, nobody to notify
            match["exchanges"].append(self._new_exchange(player_id))
            match["state"] = "awaiting_write"
            match["turn_owner"] = player_id
        items.insert(0, ("match", match_id, match))
        self.repo.put_batch(items)
        reward = 0
        if correct:
            reward = self.config.scoring.pvp_guess_points
            self.engine.record_score(player_id, reward, "pvp_guess_correct", match_id)
        return {
            "correct": correct,
            "assigned_type": assigned.value,
            "reward": reward,
        }

    # ---- bot ---------------------------------------------------------------

    def _run_bot(self, match_id: str) -> None:
        """Let the bot act for as long as it owns the turn."""
        while True:
            match, _ = self._match(match_id)
            owner = match["turn_owner"]
            if match["state"] == "finished" or owner is None:
                return
            if not self.engine.user(owner).is_bot:
                return
            self.bot_take_turn(match_id)

    def bot_take_turn(self, match_id: str) -> dict:
        match, version = self._match(match_id)
        owner = match["turn_owner"]
        if owner is None or not self.engine.user(owner).is_bot:
            raise err("bot_not_owner", "bot does not own this turn")
        if match["state"] == "awaiting_write":
            text = self._bot_pick_text(match)
            self._apply_turn(match_id, owner, version, text)
        else:
            exchange = match["exchanges"][-1]
            argument = self.engine.argument(exchange["argument_id"])
            lexicon = self.engine.pack(match["language"]).bot_lexicon
            guess = lexicon_guess(argument.text, lexicon)
            self._apply_guess(match_id, owner, version, guess)
        return self.view_match(match_id, owner)

    def _bot_pick_text(self, match: dict) -> str:
        """Look up an existing argument of the bot's secret type for the topic,
        preferring gold-confirmed ones; fall back to pack seeds."""
        wanted = FallacyLabel(match["exchanges"][-1]["assigned_type"])
        topic_id = match["topic_id"]
        pool = [
            Argument.from_dict(e.data)
            for e in self.repo.scan(
                "argument",
                lambda e: e.data["status"] == "active"
                and e.data["topic_id"] == topic_id
                and e.data["language"] == match["language"],
            )
        ]
        gold_hits = sorted(
            (a for a in pool if a.gold is not None and a.gold.label is wanted),
            key=lambda a: a.id,
        )
        if gold_hits:
            return self.rng.choice(gold_hits).text
        assigned_hits = sorted((a for a in pool if a.assigned_type is wanted), key=lambda a: a.id)
        if assigned_hits:
            return self.rng.choice(assigned_hits).text
        pack = self.engine.pack(match["language"])
        seeds = [s for s in pack.seed_arguments if s.topic_id == topic_id]
        typed = [s for s in seeds if s.assigned_type is wanted]
        if typed:
            return self.rng.choice(sorted(typed, key=lambda s: s.id)).text
        if seeds:
            return self.rng.choice(sorted(seeds, key=lambda s: s.id)).text
        if pool:
            return self.rng.choice(sorted(pool, key=lambda a: a.id)).text
        raise err("content_exhausted", f"nothing to say about topic {topic_id!r}")

    # ---- views and notifications -------------------------------------------

    def view_match(self, match_id: str, viewer_id: str) -> dict:
        match, version = self._match(match_id)
        players = []
        for player_id in match["players"]:
            account = self.engine.user(player_id)
            players.append(
                {"user_id": account.id, "handle": account.handle, "is_bot": account.is_bot}
            )
        exchanges = []
        for exchange in match["exchanges"]:
            revealed = exchange["guess"] is not None or exchange["writer"] == viewer_id
            text = None
            if exchange["argument_id"]:
                text = self.engine.argument(exchange["argument_id"]).text
            exchanges.append(
                {
                    "writer": exchange["writer"],
                    "argument_id": exchange["argument_id"],
                    "argument_text": text,
                    "assigned_type": exchange["assigned_type"] if revealed else None,
                    "guess": exchange["guess"],
                    "guess_correct": exchange["guess_correct"],
                }
            )
        return {
            "match_id": match["id"],
            "topic_id": match["topic_id"],
            "language": match["language"],
            "players": players,
            "state": match["state"],
            "turn_owner": match["turn_owner"],
            "version": version,
            "rounds_total": match["rounds_total"],
            "exchanges": exchanges,
            "your_turn": match["turn_owner"] == viewer_id and match["state"] != "finished",
        }

    def matches_of(self, user_id: str) -> list[dict]:
        rows = self.repo.scan("match", lambda e: user_id in e.data["players"])
        return [self.view_match(e.id, user_id) for e in rows]

    def pull_notifications(self, user_id: str, since: Optional[str] = None) -> list[dict]:
        """Non-destructive read: unread ones, or everything after `since`."""
        rows = self.repo.scan("notification", lambda e: e.data["user_id"] == user_id)
        notes = [dict(e.data) for e in rows]
        if since is not None:
            cutoff = ts_from_str(since)
            notes = [n for n in notes if ts_from_str(n["created_at"]) > cutoff]
        else:
            notes = [n for n in notes if not n["read"]]
        notes.sort(key=lambda n: (n["created_at"], n["id"]))
        return notes

    def mark_notifications_read(self, user_id: str, note_ids: list[str]) -> int:
        """Idempotent: already-read ids count as done, foreign ids rejected."""
        marked = 0
        for note_id in note_ids:
            entity = self.repo.get("notification", note_id)
            if entity is None or entity.data["user_id"] != user_id:
                raise err("unknown_notification", f"no notification {note_id!r}")
            if not entity.data["read"]:
                data = dict(entity.data)
                data["read"] = True
                self.repo.put("notification", note_id, data)
            marked += 1
        return marked

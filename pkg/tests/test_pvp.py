"""Duel protocol: turn order, optimistic concurrency, the bot opponent, and
notifications."""

import pytest

from fallacyarena.domain import FallacyLabel
from fallacyarena.errors import GameError
from fallacyarena.pvp import lexicon_guess

from conftest import complete_world, make_platform, register

TEXT = "That claim is pure nonsense and everyone can plainly see it."


@pytest.fixture
def arena(platform):
    ada = register(platform, "ada")
    bob = register(platform, "bob")
    complete_world(platform, ada, "w1")
    complete_world(platform, bob, "w1")
    return platform, ada, bob


def secret_type(platform, match_id, index=-1):
    match = platform.repo.get("match", match_id).data
    return FallacyLabel(match["exchanges"][index]["assigned_type"])


class TestLexiconGuess:
    LEXICON = {
        "ad_hominem": ["idiot", "moron"],
        "appeal_to_emotion": ["crying", "heartbreaking"],
    }

    def test_keyword_hit(self):
        text = "Only an idiot would think that."
        assert lexicon_guess(text, self.LEXICON) is FallacyLabel.AD_HOMINEM

    def test_counts_not_presence(self):
        text = "Crying children, crying parents, and one idiot."
        assert lexicon_guess(text, self.LEXICON) is FallacyLabel.APPEAL_TO_EMOTION

    def test_tie_goes_to_enum_order(self):
        text = "An idiot left everyone crying."
        assert lexicon_guess(text, self.LEXICON) is FallacyLabel.AD_HOMINEM

    def test_no_cue_means_no_fallacy(self):
        assert lexicon_guess("A calm, factual claim.", self.LEXICON) is FallacyLabel.NO_FALLACY

    def test_case_insensitive(self):
        assert lexicon_guess("IDIOT!", self.LEXICON) is FallacyLabel.AD_HOMINEM


class TestMatchLifecycle:
    def test_create_match_shape(self, arena):
        platform, ada, bob = arena
        view = platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        assert view["state"] == "awaiting_write"
        assert view["turn_owner"] == ada
        assert view["your_turn"] is True
        assert view["rounds_total"] == 2
        assert [p["user_id"] for p in view["players"]] == [ada, bob]
        assert len(view["exchanges"]) == 1
        # the writer sees the secret; notifications reach the opponent
        assert view["exchanges"][0]["assigned_type"] is not None
        notes = platform.pvp.pull_notifications(bob)
        assert [n["kind"] for n in notes] == ["challenge_received"]

    def test_full_match_both_humans(self, arena):
        platform, ada, bob = arena
        view = platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        mid = view["match_id"]

        view = platform.pvp.submit_turn(mid, ada, view["version"], TEXT)
        assert view["state"] == "awaiting_guess"
        assert view["turn_owner"] == bob
        assert [n["kind"] for n in platform.pvp.pull_notifications(bob)] == [
            "challenge_received",
            "your_turn",
        ]

        # opponent view hides the secret until the guess lands
        bob_view = platform.pvp.view_match(mid, bob)
        assert bob_view["exchanges"][0]["assigned_type"] is None
        assert bob_view["exchanges"][0]["argument_text"] == TEXT

        secret = secret_type(platform, mid)
        notes_before = len(platform.pvp.pull_notifications(bob, since="1970-01-01T00:00:00Z"))
        out = platform.pvp.submit_guess(mid, bob, bob_view["version"], secret)
        assert out["feedback"] == {
            "correct": True,
            "assigned_type": secret.value,
            "reward": 3,
        }
        assert platform.engine.user(bob).total_points == 3
        # second exchange: the guesser writes next, nothing new to notify
        assert out["state"] == "awaiting_write"
        assert out["turn_owner"] == bob
        notes_after = len(platform.pvp.pull_notifications(bob, since="1970-01-01T00:00:00Z"))
        assert notes_after == notes_before

        view = platform.pvp.submit_turn(mid, bob, out["version"], TEXT + " Truly.")
        assert view["turn_owner"] == ada
        ada_view = platform.pvp.view_match(mid, ada)
        secret2 = secret_type(platform, mid)
        wrong = next(l for l in FallacyLabel if l is not secret2)
        out = platform.pvp.submit_guess(mid, ada, ada_view["version"], wrong)
        assert out["feedback"]["correct"] is False
        assert out["feedback"]["reward"] == 0
        assert out["feedback"]["assigned_type"] == secret2.value
        assert out["state"] == "finished"
        assert out["turn_owner"] is None
        assert out["your_turn"] is False
        for player in (ada, bob):
            kinds = [n["kind"] for n in platform.pvp.pull_notifications(player)]
            assert kinds.count("match_finished") == 1
        # everything is revealed once the match ends
        final = platform.pvp.view_match(mid, bob)
        assert all(e["assigned_type"] is not None for e in final["exchanges"])
        assert [e["writer"] for e in final["exchanges"]] == [ada, bob]

    def test_guess_creates_judgment(self, arena):
        platform, ada, bob = arena
        view = platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        mid = view["match_id"]
        view = platform.pvp.submit_turn(mid, ada, view["version"], TEXT)
        arg_id = view["exchanges"][0]["argument_id"]
        platform.pvp.submit_guess(mid, bob, view["version"], FallacyLabel.RED_HERRING)
        judgments = platform.engine.judgments_of_item(arg_id)
        sources = sorted((j.rater_id, j.source) for j in judgments)
        assert sources == sorted([(ada, "authored"), (bob, "pvp_guess")])


class TestTurnEnforcement:
    def test_not_your_turn_to_write(self, arena):
        platform, ada, bob = arena
        view = platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        with pytest.raises(GameError) as exc:
            platform.pvp.submit_turn(view["match_id"], bob, view["version"], TEXT)
        assert exc.value.code == "not_your_turn"

    def test_guess_before_write_rejected(self, arena):
        platform, ada, bob = arena
        view = platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        with pytest.raises(GameError) as exc:
            platform.pvp.submit_guess(
                view["match_id"], bob, view["version"], FallacyLabel.NO_FALLACY
            )
        assert exc.value.code == "not_your_turn"

    def test_stale_version_rejected_without_side_effects(self, arena):
        platform, ada, bob = arena
        view = platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        args_before = platform.repo.count("argument")
        with pytest.raises(GameError) as exc:
            platform.pvp.submit_turn(view["match_id"], ada, view["version"] + 7, TEXT)
        assert exc.value.code == "version_conflict"
        assert platform.repo.count("argument") == args_before
        assert platform.pvp.view_match(view["match_id"], ada)["state"] == "awaiting_write"

    def test_stale_guess_rejected_without_judgment(self, arena):
        platform, ada, bob = arena
        view = platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        view = platform.pvp.submit_turn(view["match_id"], ada, view["version"], TEXT)
        judgments_before = platform.repo.count("judgment")
        with pytest.raises(GameError) as exc:
            platform.pvp.submit_guess(
                view["match_id"], bob, view["version"] - 1, FallacyLabel.NO_FALLACY
            )
        assert exc.value.code == "version_conflict"
        assert platform.repo.count("judgment") == judgments_before

    def test_duplicate_guess_rejected(self, arena):
        platform, ada, bob = arena
        view = platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        mid = view["match_id"]
        view = platform.pvp.submit_turn(mid, ada, view["version"], TEXT)
        from conftest import put_judgment

        put_judgment(platform, view["exchanges"][0]["argument_id"], bob, FallacyLabel.NO_FALLACY)
        with pytest.raises(GameError) as exc:
            platform.pvp.submit_guess(mid, bob, view["version"], FallacyLabel.NO_FALLACY)
        assert exc.value.code == "duplicate_judgment"

    def test_self_match_rejected(self, arena):
        platform, ada, _ = arena
        with pytest.raises(GameError) as exc:
            platform.pvp.create_match(ada, ada)
        assert exc.value.code == "self_match"

    def test_pvp_locked_until_first_world_done(self, platform):
        ada = register(platform, "ada")
        bob = register(platform, "bob")
        with pytest.raises(GameError) as exc:
            platform.pvp.create_match(ada, bob)
        assert exc.value.code == "pvp_locked"

    def test_unknown_topic_rejected(self, arena):
        platform, ada, bob = arena
        with pytest.raises(GameError) as exc:
            platform.pvp.create_match(ada, bob, topic_id="t-nope")
        assert exc.value.code == "unknown_id"


class TestBotOpponent:
    def test_bot_plays_through_and_never_gets_notified(self, arena):
        platform, ada, _ = arena
        bot = platform.bot_id
        view = platform.pvp.create_match(ada, bot, topic_id="t-uniforms")
        mid = view["match_id"]
        # bot is not on turn yet: the challenger writes first
        assert view["turn_owner"] == ada

        view = platform.pvp.submit_turn(mid, ada, view["version"], TEXT)
        # the bot guessed and wrote back synchronously
        assert view["state"] == "awaiting_guess"
        assert view["turn_owner"] == ada
        assert len(view["exchanges"]) == 2
        assert view["exchanges"][0]["guess"] is not None
        assert view["exchanges"][1]["writer"] == bot
        assert view["exchanges"][1]["argument_text"]

        secret = secret_type(platform, mid)
        out = platform.pvp.submit_guess(mid, ada, view["version"], secret)
        assert out["state"] == "finished"
        assert out["feedback"]["correct"] is True
        assert platform.pvp.pull_notifications(bot, since="1970-01-01T00:00:00Z") == []
        # a human still gets the closing notification
        kinds = [n["kind"] for n in platform.pvp.pull_notifications(ada)]
        assert "match_finished" in kinds

    def test_bot_guess_follows_its_lexicon(self, arena):
        platform, ada, _ = arena
        view = platform.pvp.create_match(ada, platform.bot_id, topic_id="t-uniforms")
        mid = view["match_id"]
        view = platform.pvp.submit_turn(
            mid, ada, view["version"], "You utter idiot, only an idiot says that."
        )
        assert view["exchanges"][0]["guess"] == "ad_hominem"

    def test_bot_takes_no_points(self, arena):
        platform, ada, _ = arena
        view = platform.pvp.create_match(ada, platform.bot_id, topic_id="t-uniforms")
        mid = view["match_id"]
        platform.pvp.submit_turn(
            mid, ada, view["version"], "You utter idiot, only an idiot says that."
        )
        assert platform.engine.user(platform.bot_id).total_points == 0

    def test_bot_text_comes_from_known_content(self, arena):
        platform, ada, _ = arena
        view = platform.pvp.create_match(ada, platform.bot_id, topic_id="t-games")
        view = platform.pvp.submit_turn(view["match_id"], ada, view["version"], TEXT)
        bot_text = view["exchanges"][1]["argument_text"]
        known = {a.data["text"] for a in platform.repo.scan("argument")}
        assert bot_text in known

    def test_longer_matches_alternate_writers(self):
        platform = make_platform(pvp={"exchanges_per_player": 2})
        ada = register(platform, "ada")
        complete_world(platform, ada, "w1")
        view = platform.pvp.create_match(ada, platform.bot_id, topic_id="t-uniforms")
        mid = view["match_id"]
        for _ in range(2):
            view = platform.pvp.view_match(mid, ada)
            if view["state"] == "awaiting_write":
                view = platform.pvp.submit_turn(mid, ada, view["version"], TEXT)
            view = platform.pvp.view_match(mid, ada)
            secret = secret_type(platform, mid)
            view = platform.pvp.submit_guess(mid, ada, view["version"], secret)
        assert view["state"] == "finished"
        assert len(view["exchanges"]) == 4
        writers = [e["writer"] for e in view["exchanges"]]
        assert writers == [ada, platform.bot_id, ada, platform.bot_id]


class TestPoolInteraction:
    def test_pending_duel_argument_stays_out_of_judging_pool(self, arena):
        platform, ada, bob = arena
        carol = register(platform, "carol")
        view = platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        mid = view["match_id"]
        view = platform.pvp.submit_turn(mid, ada, view["version"], TEXT)
        arg_id = view["exchanges"][0]["argument_id"]
        subset = tuple(FallacyLabel)
        for _ in range(10):
            picked = platform.engine.select_argument_for_judging(carol, "en", subset)
            assert picked.id != arg_id
        platform.pvp.submit_guess(mid, bob, view["version"], FallacyLabel.NO_FALLACY)
        platform.pvp.view_match(mid, ada)
        # once guessed (match over), the argument becomes fair game
        seen = set()
        for _ in range(40):
            seen.add(platform.engine.select_argument_for_judging(carol, "en", subset).id)
        assert arg_id in seen


class TestNotifications:
    def test_mark_read_idempotent(self, arena):
        platform, ada, bob = arena
        platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        notes = platform.pvp.pull_notifications(bob)
        assert len(notes) == 1
        assert platform.pvp.mark_notifications_read(bob, [notes[0]["id"]]) == 1
        assert platform.pvp.pull_notifications(bob) == []
        assert platform.pvp.mark_notifications_read(bob, [notes[0]["id"]]) == 1

    def test_foreign_notification_rejected(self, arena):
        platform, ada, bob = arena
        platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        notes = platform.pvp.pull_notifications(bob)
        with pytest.raises(GameError) as exc:
            platform.pvp.mark_notifications_read(ada, [notes[0]["id"]])
        assert exc.value.code == "unknown_notification"

    def test_since_filter(self, arena):
        platform, ada, bob = arena
        platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        first = platform.pvp.pull_notifications(bob)[0]
        platform.pvp.create_match(ada, bob, topic_id="t-games")
        later = platform.pvp.pull_notifications(bob, since=first["created_at"])
        assert [n["kind"] for n in later] == ["challenge_received"]
        assert later[0]["id"] != first["id"]

    def test_matches_listing(self, arena):
        platform, ada, bob = arena
        carol = register(platform, "carol")
        complete_world(platform, carol, "w1")
        platform.pvp.create_match(ada, bob, topic_id="t-uniforms")
        platform.pvp.create_match(carol, ada, topic_id="t-games")
        assert len(platform.pvp.matches_of(ada)) == 2
        assert len(platform.pvp.matches_of(bob)) == 1
        assert len(platform.pvp.matches_of(carol)) == 1

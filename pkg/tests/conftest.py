"""Shared fixtures: a compact in-memory platform with a deterministic clock.

The clock ticks one second per reading so created_at ordering is stable; tests
that need wall-time jumps (leaderboard weeks, token expiry) advance it by hand.
"""

import copy
from datetime import datetime, timedelta, timezone

import pytest

from fallacyarena.config import LocaleBundle, parse_content_pack, parse_game_config
from fallacyarena.domain import Argument, FallacyLabel, Judgment
from fallacyarena.service import Platform
from fallacyarena.store import open_repository


class TickingClock:
    def __init__(self, start=datetime(2024, 3, 4, 12, 0, 0, tzinfo=timezone.utc)):
        self.current = start

    def __call__(self):
        self.current = self.current + timedelta(seconds=1)
        return self.current

    def advance(self, **kwargs):
        self.current = self.current + timedelta(**kwargs)


class FrozenClock:
    """Never advances; for byte-identical artifact tests."""

    def __init__(self, at=datetime(2024, 3, 4, 12, 0, 0, tzinfo=timezone.utc)):
        self.at = at

    def __call__(self):
        return self.at


ALL_CODES = [
    "ad_hominem",
    "appeal_to_emotion",
    "red_herring",
    "hasty_generalization",
    "irrelevant_authority",
    "no_fallacy",
]

CONFIG_DOC = {
    "version": 1,
    "worlds": [
        {
            "id": "w1",
            "title_key": "world.w1.title",
            "theme": "island",
            "kind": "standard",
            "levels": [
                {
                    "id": "lv-intro",
                    "fallacy_subset": ["ad_hominem", "no_fallacy"],
                    "rounds": [
                        {"id": "r-write", "kind": "write_fallacy"},
                        {"id": "r-guess", "kind": "recognize_fallacy"},
                    ],
                },
                {
                    "id": "lv-open",
                    "fallacy_subset": list(ALL_CODES),
                    "rounds": [{"id": "r-open-write", "kind": "write_fallacy"}],
                },
                {
                    "id": "lv-hg",
                    "fallacy_subset": ["hasty_generalization"],
                    "rounds": [{"id": "r-hg", "kind": "recognize_fallacy"}],
                },
                {
                    "id": "lv-ia",
                    "fallacy_subset": ["irrelevant_authority"],
                    "rounds": [{"id": "r-ia", "kind": "recognize_fallacy"}],
                },
            ],
        },
        {
            "id": "w2",
            "title_key": "world.w2.title",
            "theme": "city",
            "kind": "standard",
            "unlock_requires": "w1",
            "levels": [
                {
                    "id": "lv-city",
                    "fallacy_subset": ["red_herring"],
                    "rounds": [{"id": "r-city", "kind": "recognize_fallacy"}],
                }
            ],
        },
        {
            "id": "w-arena",
            "title_key": "world.arena.title",
            "theme": "arena",
            "kind": "pvp",
            "unlock_requires": "w1",
            "levels": [],
        },
    ],
    "scoring": {
        "soft_feedback_points": 1,
        "hard_correct_points": 3,
        "hard_wrong_points": 0,
        "write_submit_points": 1,
        "deferred_author_bonus": 2,
        "pvp_guess_points": 3,
    },
    "aggregation": {
        "min_votes": 3,
        "entropy_threshold_nats": 0.7,
        "em": {"restarts": 3, "max_iterations": 60, "rng_seed": 11},
    },
    "limits": {"min_chars": 5, "max_chars": 400},
    "pvp": {"exchanges_per_player": 1},
}

CONTENT_DOC = {
    "version": 1,
    "language": "en",
    "topics": [
        {
            "id": "t-games",
            "title": "Violent video games cause aggression",
        },
        {
            "id": "t-uniforms",
            "title": "School uniforms should be mandatory",
            "description": "Dress codes in public schools.",
        },
    ],
    "fallacy_descriptions": {
        "ad_hominem": "Attacks the person instead of the argument.",
        "appeal_to_emotion": "Manipulates feelings in place of evidence.",
        "red_herring": "Distracts with an irrelevant point.",
        "hasty_generalization": "Concludes from too few cases.",
        "irrelevant_authority": "Cites an authority outside their field.",
        "no_fallacy": "A sound argument.",
    },
    "seed_arguments": [
        {
            "id": "seed-ah-1",
            "topic_id": "t-uniforms",
            "text": "Only an idiot would oppose uniforms, so your view is worthless.",
            "assigned_type": "ad_hominem",
        },
        {
            "id": "seed-ah-2",
            "topic_id": "t-games",
            "text": "You clearly failed school, so nothing you say about games counts.",
            "assigned_type": "ad_hominem",
        },
        {
            "id": "seed-nf-1",
            "topic_id": "t-uniforms",
            "text": "Uniforms reduce visible income differences between students.",
            "assigned_type": "no_fallacy",
        },
        {
            "id": "seed-hg-1",
            "topic_id": "t-games",
            "text": "My cousin played one shooter and got angry, so every gamer is violent.",
            "assigned_type": "hasty_generalization",
        },
        {
            "id": "seed-ia-1",
            "topic_id": "t-uniforms",
            "text": "A famous actor says uniforms are harmful, so they must be banned.",
            "assigned_type": "irrelevant_authority",
        },
        {
            "id": "seed-rh-1",
            "topic_id": "t-games",
            "text": "Why worry about games when school lunches are this bad?",
            "assigned_type": "red_herring",
        },
        {
            "id": "seed-ae-1",
            "topic_id": "t-uniforms",
            "text": "Think of the poor children crying in their drab uniforms every morning!",
            "assigned_type": "appeal_to_emotion",
        },
    ],
    "bot_lexicon": {
        "ad_hominem": ["idiot", "failed school"],
        "appeal_to_emotion": ["crying", "poor children"],
        "red_herring": ["why worry about"],
        "hasty_generalization": ["every gamer"],
        "irrelevant_authority": ["famous actor"],
    },
}

LOCALE_ENTRIES = {
    "world.w1.title": "Fallacy Island",
    "world.w2.title": "Sophistry City",
    "world.arena.title": "The Arena",
    "fallacy.ad_hominem.explanation": "The speaker attacked the person, not the claim.",
    "fallacy.appeal_to_emotion.explanation": "The speaker swapped evidence for feelings.",
    "fallacy.red_herring.explanation": "The speaker changed the subject.",
    "fallacy.hasty_generalization.explanation": "The speaker generalized from too little.",
    "fallacy.irrelevant_authority.explanation": "The cited authority has no standing here.",
    "fallacy.no_fallacy.explanation": "The argument holds up.",
    "feedback.soft": "Thanks! Your answer was recorded; the crowd will confirm it.",
}


def make_platform(config_doc=None, rng_seed=7, clock=None, **config_overrides):
    doc = copy.deepcopy(config_doc or CONFIG_DOC)
    for key, value in config_overrides.items():
        doc[key] = copy.deepcopy(value)
    config = parse_game_config(doc)
    packs = {"en": parse_content_pack(copy.deepcopy(CONTENT_DOC))}
    locales = {"en": LocaleBundle(language="en", entries=dict(LOCALE_ENTRIES))}
    clock = clock or TickingClock()
    platform = Platform(
        open_repository(None), config, packs, locales, rng_seed=rng_seed, now_fn=clock
    )
    platform.clock = clock
    return platform


@pytest.fixture
def platform():
    return make_platform()


def register(platform, handle, password="correct-horse-battery"):
    out = platform.register(handle, password)
    return out["user"]["user_id"]


def complete_world(platform, user_id, world_id):
    """Fixture shortcut: mark every level of a world as completed."""
    world = platform.config.world(world_id)
    done = platform.engine.completed_levels(user_id)
    done.update(level.id for level in world.levels)
    platform.repo.put(
        "progress", user_id, {"user_id": user_id, "completed_levels": sorted(done)}
    )


def put_argument(platform, arg_id, assigned, topic_id="t-uniforms", author_id=None,
                 status="active", gold=None, text=None):
    argument = Argument(
        id=arg_id,
        author_id=author_id,
        topic_id=topic_id,
        language="en",
        text=text or f"Handcrafted argument {arg_id} long enough to pass limits.",
        assigned_type=assigned,
        created_at=platform.now(),
        status=status,
        gold=gold,
    )
    platform.repo.put("argument", argument.id, argument.to_dict())
    return argument


def put_judgment(platform, item_id, rater_id, label, source="recognition_round"):
    judgment = Judgment(
        item_id=item_id,
        rater_id=rater_id,
        label=label,
        source=source,
        created_at=platform.now(),
    )
    platform.repo.put("judgment", judgment.key, judgment.to_dict())
    return judgment


# test_acceptance appends one line per criterion; shown after the run so the
# verdicts survive pytest's stdout capture
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

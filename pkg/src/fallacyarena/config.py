"""Declarative game workflow, locale bundles, and per-language content packs.

All three documents are strict JSON with an explicit "version" field; unknown
keys are rejected so config typos fail loudly at startup instead of silently
changing gameplay. Schemas are documented in docs/config-schemas.md.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

from .aggregation import AggregationConfig, EmConfig
from .domain import (
    LABEL_CODES,
    Argument,
    FallacyLabel,
    Topic,
    label_from_code,
)
from .errors import err

CONFIG_VERSION = 1
ROUND_KINDS = ("write_fallacy", "recognize_fallacy")
WORLD_KINDS = ("standard", "pvp")

# Seeds carry a fixed epoch timestamp so content loading is deterministic.
SEED_CREATED_AT = datetime(1970, 1, 1, tzinfo=timezone.utc)


def _require_keys(doc: dict, required: tuple[str, ...], optional: tuple[str, ...], where: str):
    if not isinstance(doc, dict):
        raise err("schema_violation", f"{where}: expected an object")
    missing = [k for k in required if k not in doc]
    if missing:
        raise err("schema_violation", f"{where}: missing {', '.join(missing)}")
    unknown = [k for k in doc if k not in required and k not in optional]
    if unknown:
        raise err("schema_violation", f"{where}: unknown keys {', '.join(unknown)}")


def _load_json(path: str, code: str = "parse_error") -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise err("io_error", f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise err(code, f"{path}: {exc}") from exc


@dataclass(frozen=True)
class RoundConfig:
    id: str
    kind: str
    parameters: dict = field(default_factory=dict)

    @property
    def candidate_labels(self) -> tuple[FallacyLabel, ...]:
        codes = self.parameters.get("candidate_labels") or list(LABEL_CODES)
        return tuple(label_from_code(c) for c in codes)

    def to_dict(self) -> dict:
        return {"id": self.id, "kind": self.kind, "parameters": dict(self.parameters)}


@dataclass(frozen=True)
class LevelConfig:
    id: str
    fallacy_subset: tuple[FallacyLabel, ...]
    rounds: tuple[RoundConfig, ...]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "fallacy_subset": [l.value for l in self.fallacy_subset],
            "rounds": [r.to_dict() for r in self.rounds],
        }


@dataclass(frozen=True)
class WorldConfig:
    id: str
    title_key: str
    theme: str
    kind: str
    levels: tuple[LevelConfig, ...]
    unlock_requires: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title_key": self.title_key,
            "theme": self.theme,
            "kind": self.kind,
            "unlock_requires": self.unlock_requires,
            "levels": [l.to_dict() for l in self.levels],
        }


@dataclass(frozen=True)
class ScoringConfig:
    soft_feedback_points: int = 1
    hard_correct_points: int = 3
    hard_wrong_points: int = 0
    write_submit_points: int = 1
    deferred_author_bonus: int = 2
    pvp_guess_points: int = 3

    def to_dict(self) -> dict:
        return {
            "soft_feedback_points": self.soft_feedback_points,
            "hard_correct_points": self.hard_correct_points,
            "hard_wrong_points": self.hard_wrong_points,
            "write_submit_points": self.write_submit_points,
            "deferred_author_bonus": self.deferred_author_bonus,
            "pvp_guess_points": self.pvp_guess_points,
        }


@dataclass(frozen=True)
class GameConfig:
    worlds: tuple[WorldConfig, ...]
    scoring: ScoringConfig
    aggregation: AggregationConfig
    text_limits: tuple[int, int] = (10, 600)
    pvp_exchanges_per_player: int = 2

    def world(self, world_id: str) -> WorldConfig:
        for world in self.worlds:
            if world.id == world_id:
                return world
        raise err("unknown_id", f"unknown world {world_id!r}")

    def find_level(self, level_id: str) -> tuple[WorldConfig, LevelConfig]:
        for world in self.worlds:
            for level in world.levels:
                if level.id == level_id:
                    return world, level
        raise err("unknown_level", f"unknown level {level_id!r}")

    def pvp_world(self) -> Optional[WorldConfig]:
        for world in self.worlds:
            if world.kind == "pvp":
                return world
        return None

    def to_dict(self) -> dict:
        return {
            "version": CONFIG_VERSION,
            "worlds": [w.to_dict() for w in self.worlds],
            "scoring": self.scoring.to_dict(),
            "aggregation": self.aggregation.to_dict(),
            "limits": {"min_chars": self.text_limits[0], "max_chars": self.text_limits[1]},
            "pvp": {"exchanges_per_player": self.pvp_exchanges_per_player},
        }


def parse_game_config(doc: dict) -> GameConfig:
    _require_keys(
        doc,
        required=("version", "worlds", "scoring", "aggregation"),
        optional=("limits", "pvp"),
        where="config",
    )
    if doc["version"] != CONFIG_VERSION:
        raise err("schema_violation", f"unsupported config version {doc['version']!r}")

    scoring_doc = doc["scoring"]
    _require_keys(
        scoring_doc,
        required=(
            "soft_feedback_points",
            "hard_correct_points",
            "hard_wrong_points",
            "write_submit_points",
            "deferred_author_bonus",
            "pvp_guess_points",
        ),
        optional=(),
        where="scoring",
    )
    for key, value in scoring_doc.items():
        if not isinstance(value, int) or value < 0:
            raise err("schema_violation", f"scoring.{key} must be a non-negative integer")
    scoring = ScoringConfig(**scoring_doc)

    agg_doc = doc["aggregation"]
    _require_keys(
        agg_doc,
        required=("min_votes", "entropy_threshold_nats", "em"),
        optional=(),
        where="aggregation",
    )
    _require_keys(
        agg_doc["em"],
        required=(),
        optional=("restarts", "max_iterations", "smoothing_delta", "convergence_epsilon", "rng_seed"),
        where="aggregation.em",
    )
    if not isinstance(agg_doc["min_votes"], int) or agg_doc["min_votes"] < 1:
        raise err("schema_violation", "aggregation.min_votes must be >= 1")
    if agg_doc["entropy_threshold_nats"] < 0:
        raise err("schema_violation", "aggregation.entropy_threshold_nats must be >= 0")
    aggregation = AggregationConfig(
        min_votes=agg_doc["min_votes"],
        entropy_threshold_nats=float(agg_doc["entropy_threshold_nats"]),
        em=EmConfig(**agg_doc["em"]),
    )

    limits_doc = doc.get("limits", {"min_chars": 10, "max_chars": 600})
    _require_keys(limits_doc, required=("min_chars", "max_chars"), optional=(), where="limits")
    if limits_doc["min_chars"] < 1 or limits_doc["max_chars"] < limits_doc["min_chars"]:
        raise err("schema_violation", "limits must satisfy 1 <= min_chars <= max_chars")

    pvp_doc = doc.get("pvp", {"exchanges_per_player": 2})
    _require_keys(pvp_doc, required=("exchanges_per_player",), optional=(), where="pvp")
    if not isinstance(pvp_doc["exchanges_per_player"], int) or pvp_doc["exchanges_per_player"] < 1:
        raise err("schema_violation", "pvp.exchanges_per_player must be >= 1")

    worlds = []
    seen_world_ids: set[str] = set()
    seen_level_ids: set[str] = set()
    seen_round_ids: set[str] = set()
    for world_doc in doc["worlds"]:
        _require_keys(
            world_doc,
            required=("id", "title_key", "levels"),
            optional=("theme", "kind", "unlock_requires"),
            where="world",
        )
        if world_doc["id"] in seen_world_ids:
            raise err("schema_violation", f"duplicate world id {world_doc['id']!r}")
        seen_world_ids.add(world_doc["id"])
        kind = world_doc.get("kind", "standard")
        if kind not in WORLD_KINDS:
            raise err("schema_violation", f"world {world_doc['id']!r}: unknown kind {kind!r}")
        levels = []
        for level_doc in world_doc["levels"]:
            _require_keys(
                level_doc,
                required=("id", "fallacy_subset", "rounds"),
                optional=(),
                where=f"level in world {world_doc['id']!r}",
            )
            if level_doc["id"] in seen_level_ids:
                raise err("schema_violation", f"duplicate level id {level_doc['id']!r}")
            seen_level_ids.add(level_doc["id"])
            subset = tuple(label_from_code(c) for c in level_doc["fallacy_subset"])
            if not subset:
                raise err("schema_violation", f"level {level_doc['id']!r}: empty fallacy_subset")
            if len(set(subset)) != len(subset):
                raise err("schema_violation", f"level {level_doc['id']!r}: repeated label in subset")
            rounds = []
            for round_doc in level_doc["rounds"]:
                _require_keys(
                    round_doc,
                    required=("id", "kind"),
                    optional=("parameters",),
                    where=f"round in level {level_doc['id']!r}",
                )
                if round_doc["id"] in seen_round_ids:
                    raise err("schema_violation", f"duplicate round id {round_doc['id']!r}")
                seen_round_ids.add(round_doc["id"])
                if round_doc["kind"] not in ROUND_KINDS:
                    raise err(
                        "schema_violation",
                        f"round {round_doc['id']!r}: unknown kind {round_doc['kind']!r}",
                    )
                parameters = round_doc.get("parameters", {})
                if round_doc["kind"] == "recognize_fallacy":
                    for code in parameters.get("candidate_labels", []):
                        label_from_code(code)
                if round_doc["kind"] == "write_fallacy" and not any(
                    l is not FallacyLabel.NO_FALLACY for l in subset
                ):
                    # writing rounds assign a concrete fallacy; no_fallacy alone
                    # leaves nothing to assign
                    raise err(
                        "schema_violation",
                        f"level {level_doc['id']!r}: write round needs a writable label",
                    )
                rounds.append(
                    RoundConfig(id=round_doc["id"], kind=round_doc["kind"], parameters=parameters)
                )
            if not rounds:
                raise err("schema_violation", f"level {level_doc['id']!r}: rounds must be non-empty")
            levels.append(LevelConfig(id=level_doc["id"], fallacy_subset=subset, rounds=tuple(rounds)))
        worlds.append(
            WorldConfig(
                id=world_doc["id"],
                title_key=world_doc["title_key"],
                theme=world_doc.get("theme", "default"),
                kind=kind,
                levels=tuple(levels),
                unlock_requires=world_doc.get("unlock_requires"),
            )
        )

    # referential checks across worlds
    for world in worlds:
        if world.unlock_requires is not None and world.unlock_requires not in seen_world_ids:
            raise err(
                "dangling_reference",
                f"world {world.id!r} requires unknown world {world.unlock_requires!r}",
            )
        if world.kind == "pvp" and world.unlock_requires != worlds[0].id:
            raise err(
                "schema_violation",
                f"pvp world {world.id!r} must unlock after the first world",
            )

    # unlock graph must be acyclic
    by_id = {w.id: w for w in worlds}
    state: dict[str, int] = {}

    def visit(world_id: str):
        if state.get(world_id) == 1:
            raise err("cyclic_unlock", f"unlock cycle through world {world_id!r}")
        if state.get(world_id) == 2:
            return
        state[world_id] = 1
        requires = by_id[world_id].unlock_requires
        if requires is not None:
            visit(requires)
        state[world_id] = 2

    for world in worlds:
        visit(world.id)

    return GameConfig(
        worlds=tuple(worlds),
        scoring=scoring,
        aggregation=aggregation,
        text_limits=(limits_doc["min_chars"], limits_doc["max_chars"]),
        pvp_exchanges_per_player=pvp_doc["exchanges_per_player"],
    )


def load_game_config(path: str) -> GameConfig:
    return parse_game_config(_load_json(path))


@dataclass(frozen=True)
class LocaleBundle:
    language: str
    entries: dict

    def resolve(self, key: str, fallback: Optional["LocaleBundle"] = None) -> str:
        if key in self.entries:
            return self.entries[key]
        if fallback is not None and key in fallback.entries:
            return fallback.entries[key]
        return key  # surface the key itself rather than hiding the gap


def parse_locale(doc_pairs: list, language_hint: str = "") -> LocaleBundle:
    doc: dict = {}
    for key, value in doc_pairs:
        if key in doc:
            raise err("duplicate_key", f"duplicate top-level key {key!r}")
        doc[key] = value
    _require_keys(doc, required=("version", "language", "entries"), optional=(), where="locale")
    entries: dict = {}
    for key, value in doc["entries"]:
        if key in entries:
            raise err("duplicate_key", f"duplicate locale key {key!r}")
        if not isinstance(value, str):
            raise err("schema_violation", f"locale entry {key!r} must be a string")
        entries[key] = value
    return LocaleBundle(language=doc["language"], entries=entries)


def load_locale(path: str) -> LocaleBundle:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            # keep raw pairs so duplicate keys are detectable
            doc_pairs = json.load(fh, object_pairs_hook=lambda pairs: pairs)
    except OSError as exc:
        raise err("io_error", f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise err("parse_error", f"{path}: {exc}") from exc
    bundle = parse_locale(doc_pairs)
    return bundle


@dataclass(frozen=True)
class ContentPack:
    language: str
    topics: tuple[Topic, ...]
    seed_arguments: tuple[Argument, ...]
    fallacy_descriptions: dict
    bot_lexicon: dict  # label code -> list of lowercase keywords

    def topic(self, topic_id: str) -> Topic:
        for topic in self.topics:
            if topic.id == topic_id:
                return topic
        raise err("unknown_id", f"unknown topic {topic_id!r}")

    def description_of(self, label: FallacyLabel) -> str:
        return self.fallacy_descriptions.get(label.value, "")


def parse_content_pack(doc: dict) -> ContentPack:
    _require_keys(
        doc,
        required=("version", "language", "topics", "fallacy_descriptions"),
        optional=("seed_arguments", "bot_lexicon"),
        where="content pack",
    )
    language = doc["language"]
    topics = []
    topic_ids = set()
    for topic_doc in doc["topics"]:
        _require_keys(topic_doc, required=("id", "title"), optional=("description",), where="topic")
        if not topic_doc["title"]:
            raise err("schema_violation", f"topic {topic_doc['id']!r}: empty title")
        if topic_doc["id"] in topic_ids:
            raise err("schema_violation", f"duplicate topic id {topic_doc['id']!r}")
        topic_ids.add(topic_doc["id"])
        topics.append(
            Topic(
                id=topic_doc["id"],
                language=language,
                title=topic_doc["title"],
                description=topic_doc.get("description", ""),
            )
        )
    seeds = []
    for seed_doc in doc.get("seed_arguments", []):
        _require_keys(
            seed_doc, required=("id", "topic_id", "text", "assigned_type"), optional=(), where="seed"
        )
        if seed_doc["topic_id"] not in topic_ids:
            raise err(
                "dangling_topic",
                f"seed {seed_doc['id']!r} references unknown topic {seed_doc['topic_id']!r}",
            )
        seeds.append(
            Argument(
                id=seed_doc["id"],
                author_id=None,
                topic_id=seed_doc["topic_id"],
                language=language,
                text=seed_doc["text"],
                assigned_type=label_from_code(seed_doc["assigned_type"]),
                created_at=SEED_CREATED_AT,
            )
        )
    descriptions = doc["fallacy_descriptions"]
    for code in descriptions:
        label_from_code(code)
    lexicon = doc.get("bot_lexicon", {})
    for code, words in lexicon.items():
        label_from_code(code)
        if not isinstance(words, list):
            raise err("schema_violation", f"bot_lexicon.{code} must be a list of keywords")
    return ContentPack(
        language=language,
        topics=tuple(topics),
        seed_arguments=tuple(seeds),
        fallacy_descriptions=dict(descriptions),
        bot_lexicon={k: [w.lower() for w in v] for k, v in lexicon.items()},
    )


def load_content_pack(path: str) -> ContentPack:
    return parse_content_pack(_load_json(path))


def validate_locale_coverage(config: GameConfig, bundles: dict) -> None:
    """Every key the config or engine will emit must resolve in every locale."""
    needed = [w.title_key for w in config.worlds]
    needed += [f"fallacy.{code}.explanation" for code in LABEL_CODES]
    needed.append("feedback.soft")
    for language, bundle in bundles.items():
        missing = [k for k in needed if k not in bundle.entries]
        if missing:
            raise err(
                "schema_violation",
                f"locale {language!r} missing keys: {', '.join(sorted(missing))}",
            )

"""Spam reporting and resolution, aggregation batch runs, corpus export, and
operational statistics.

Moderation is soft-delete only: an upheld report sets the argument's status to
removed, which takes it out of every serve pool, every future aggregation
matrix, and every export, while keeping judgments and score history intact.
A freshly reported argument is parked as flagged until an admin acts.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import replace
from typing import Optional

from .aggregation import GoldBatch, estimate_gold
from .domain import Argument, GoldAssignment, Judgment, ts_to_str
from .engine import GameEngine
from .errors import err

EXPORT_LICENSE = "CC-BY"
EXPORT_SCHEMA_VERSION = 1
_PSEUDONYM_SALT = b"corpus-pseudonym-v1"

# one corpus line; schema_version in the manifest tracks revisions of this
EXPORT_RECORD_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "id",
        "language",
        "topic_title",
        "text",
        "assigned_type",
        "author_pseudonym",
        "judgments",
        "license",
    ],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "language": {"type": "string", "minLength": 2},
        "topic_title": {"type": "string", "minLength": 1},
        "text": {"type": "string", "minLength": 1},
        "assigned_type": {
            "type": "string",
            "enum": [
                "ad_hominem",
                "appeal_to_emotion",
                "red_herring",
                "hasty_generalization",
                "irrelevant_authority",
                "no_fallacy",
            ],
        },
        "author_pseudonym": {
            "type": ["string", "null"],
            "pattern": "^[0-9a-f]{16}$",
        },
        "judgments": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "source"],
                "additionalProperties": False,
                "properties": {
                    "label": {"type": "string"},
                    "source": {"type": "string"},
                },
            },
        },
        "license": {"const": EXPORT_LICENSE},
        "gold_label": {"type": "string"},
        "posterior": {
            "type": "array",
            "minItems": 6,
            "maxItems": 6,
            "items": {"type": "number", "minimum": 0, "maximum": 1},
        },
        "entropy_nats": {"type": "number", "minimum": 0},
    },
    "dependentRequired": {
        "gold_label": ["posterior", "entropy_nats"],
        "posterior": ["gold_label"],
        "entropy_nats": ["gold_label"],
    },
}


def author_pseudonym(author_id: Optional[str]) -> Optional[str]:
    """Stable, non-reversible stand-in for the author; never the handle."""
    if author_id is None:
        return None
    return hashlib.sha256(_PSEUDONYM_SALT + author_id.encode()).hexdigest()[:16]


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


class Moderation:
    def __init__(self, engine: GameEngine):
        self.engine = engine
        self.repo = engine.repo
        self.config = engine.config
        self.now = engine.now

    def _require_admin(self, user_id: str):
        account = self.engine.user(user_id)
        if not account.is_admin:
            raise err("forbidden", "admin role required")
        return account

    # ---- spam reports -----------------------------------------------------

    def report_spam(self, user_id: str, argument_id: str, reason: str = "") -> dict:
        self.engine.user(user_id)
        argument = self.engine.argument(argument_id)
        if argument.author_id == user_id:
            raise err("self_report", "cannot report your own argument")
        existing = self.repo.scan(
            "report",
            lambda e: e.data["argument_id"] == argument_id
            and e.data["reporter_id"] == user_id
            and e.data["state"] == "open",
        )
        if existing:
            return dict(existing[0].data)
        report_id = self.repo.next_id("report", "report")
        report = {
            "id": report_id,
            "argument_id": argument_id,
            "reporter_id": user_id,
            "reason_text": reason,
            "state": "open",
            "resolved_by": None,
            "created_at": ts_to_str(self.now()),
        }
        items = [("report", report_id, report)]
        if argument.status == "active":
            # park the argument until an admin decides
            items.append(("argument", argument_id, argument.with_status("flagged").to_dict()))
        self.repo.put_batch(items)
        return report

    def list_reports(self, admin_id: str, state: Optional[str] = None) -> list[dict]:
        self._require_admin(admin_id)
        rows = self.repo.scan(
            "report", (lambda e: e.data["state"] == state) if state else None
        )
        return sorted((dict(e.data) for e in rows), key=lambda r: r["id"])

    def resolve_report(self, admin_id: str, report_id: str, action: str) -> dict:
        self._require_admin(admin_id)
        entity = self.repo.get("report", report_id)
        if entity is None:
            raise err("unknown_report", f"no report {report_id!r}")
        report = dict(entity.data)
        if report["state"] != "open":
            raise err("already_resolved", f"report is {report['state']}")
        if action not in ("dismiss", "uphold"):
            raise err("invalid_action", f"unknown action {action!r}")
        argument = self.engine.argument(report["argument_id"])
        report["state"] = "dismissed" if action == "dismiss" else "upheld"
        report["resolved_by"] = admin_id
        new_status = "active" if action == "dismiss" else "removed"
        self.repo.put_batch(
            [
                ("report", report_id, report),
                ("argument", argument.id, argument.with_status(new_status).to_dict()),
            ]
        )
        return report

    # ---- aggregation ------------------------------------------------------

    def trigger_aggregation(self, admin_id: str, seed: Optional[int] = None) -> dict:
        """Snapshot the pool, estimate gold, and apply the whole batch (gold
        updates, batch record, deferred author bonuses) in one atomic write."""
        self._require_admin(admin_id)
        arguments = [Argument.from_dict(e.data) for e in self.repo.scan("argument")]
        judgments = [Judgment.from_dict(e.data) for e in self.repo.scan("judgment")]
        config = self.config.aggregation
        if seed is not None:
            config = replace(config, em=replace(config.em, rng_seed=seed))
        batch_id = self.repo.next_id("batch", "batch")
        batch = estimate_gold(
            arguments,
            judgments,
            config,
            batch_id=batch_id,
            bot_rater_ids=self.engine.bot_ids(),
        )
        return self._apply_batch(batch, arguments)

    def _apply_batch(self, batch: GoldBatch, arguments: list[Argument]) -> dict:
        by_id = {a.id: a for a in arguments}
        newly_gold = 0
        gold_lost = 0
        items = []
        for item_id in batch.considered:
            argument = by_id[item_id]
            new_gold: Optional[GoldAssignment] = batch.gold.get(item_id)
            if new_gold is not None and argument.gold is None:
                newly_gold += 1
            if new_gold is None and argument.gold is not None:
                gold_lost += 1
            items.append(("argument", item_id, argument.with_gold(new_gold).to_dict()))

        bonuses = self.engine.compute_deferred_author_bonuses(batch)
        totals: dict[str, int] = {}
        event_ids = []
        if bonuses:
            first = self.repo.next_id("score_event", "ev")
            start = int(first.rsplit("-", 1)[1])
            event_ids = [f"ev-{start + k}" for k in range(len(bonuses))]
        for event_id, bonus in zip(event_ids, bonuses):
            items.append(
                (
                    "score_event",
                    event_id,
                    {
                        "id": event_id,
                        "user_id": bonus["user_id"],
                        "points": bonus["points"],
                        "reason": "deferred_author_bonus",
                        "occurred_at": ts_to_str(self.now()),
                        "ref": bonus["ref"],
                    },
                )
            )
            totals[bonus["user_id"]] = totals.get(bonus["user_id"], 0) + bonus["points"]
        for user_id, extra in sorted(totals.items()):
            account = self.engine.user(user_id)
            data = account.to_dict()
            data["total_points"] = account.total_points + extra
            items.append(("user", user_id, data))

        entropies = [
            item.entropy_nats for result in batch.results for item in result.items
        ]
        summary = {
            "batch_id": batch.batch_id,
            "items_considered": len(batch.considered),
            "gold_assigned": len(batch.gold),
            "newly_gold": newly_gold,
            "gold_lost": gold_lost,
            "coverage_fraction": (
                len(batch.gold) / len(batch.considered) if batch.considered else 0.0
            ),
            "mean_entropy_nats": (
                sum(entropies) / len(entropies) if entropies else 0.0
            ),
            "author_bonuses": len(bonuses),
            "config": batch.config.to_dict(),
            "ran_at": ts_to_str(self.now()),
        }
        items.append(("batch", batch.batch_id, summary))
        self.repo.put_batch(items)
        return summary

    # ---- export -----------------------------------------------------------

    def export_records(
        self, language: Optional[str] = None, gold_only: bool = False
    ) -> list[dict]:
        """Deterministic record list: pure function of the store snapshot."""
        bots = self.engine.bot_ids()
        judgments_by_item: dict[str, list[Judgment]] = {}
        for entity in self.repo.scan("judgment"):
            judgment = Judgment.from_dict(entity.data)
            if judgment.rater_id in bots:
                continue
            judgments_by_item.setdefault(judgment.item_id, []).append(judgment)
        records = []
        for entity in sorted(self.repo.scan("argument"), key=lambda e: e.id):
            argument = Argument.from_dict(entity.data)
            if argument.status != "active":
                continue
            if language is not None and argument.language != language:
                continue
            if gold_only and argument.gold is None:
                continue
            votes = sorted(
                judgments_by_item.get(argument.id, []),
                key=lambda j: (j.created_at, j.rater_id),
            )
            record = {
                "id": argument.id,
                "language": argument.language,
                "topic_title": self.engine.pack(argument.language).topic(
                    argument.topic_id
                ).title,
                "text": argument.text,
                "assigned_type": argument.assigned_type.value,
                "author_pseudonym": author_pseudonym(argument.author_id),
                "judgments": [{"label": j.label.value, "source": j.source} for j in votes],
                "license": EXPORT_LICENSE,
            }
            if argument.gold is not None:
                record["gold_label"] = argument.gold.label.value
                record["posterior"] = list(argument.gold.posterior)
                record["entropy_nats"] = argument.gold.entropy_nats
            records.append(record)
        return records

    def export_corpus(
        self,
        destination: str,
        language: Optional[str] = None,
        gold_only: bool = False,
    ) -> dict:
        records = self.export_records(language=language, gold_only=gold_only)
        batches = sorted(self.repo.scan("batch"), key=lambda e: e.id)
        manifest = {
            "schema_version": EXPORT_SCHEMA_VERSION,
            "record_count": len(records),
            "filter": {"language": language, "gold_only": gold_only},
            "batch_id": batches[-1].id if batches else None,
            "aggregation_config": self.config.aggregation.to_dict(),
            "license": EXPORT_LICENSE,
            "exported_at": ts_to_str(self.now()),
        }
        os.makedirs(os.path.dirname(os.path.abspath(destination)), exist_ok=True)
        with open(destination, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(_dump(record) + "\n")
        manifest_path = destination + ".manifest.json"
        with open(manifest_path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
        return {
            "corpus_path": destination,
            "manifest_path": manifest_path,
            "manifest": manifest,
        }

    # ---- stats ------------------------------------------------------------

    def stats(self, admin_id: str) -> dict:
        self._require_admin(admin_id)
        arguments = [Argument.from_dict(e.data) for e in self.repo.scan("argument")]
        by_status: dict[str, int] = {}
        gold_count = 0
        for argument in arguments:
            by_status[argument.status] = by_status.get(argument.status, 0) + 1
            if argument.gold is not None:
                gold_count += 1
        bots = self.engine.bot_ids()
        human_judgments = self.repo.scan(
            "judgment", lambda e: e.data["rater_id"] not in bots
        )
        return {
            "users": self.repo.count("user") - len(bots),
            "arguments": len(arguments),
            "arguments_by_status": by_status,
            "gold_labeled": gold_count,
            "judgments": len(human_judgments),
            "open_reports": len(
                self.repo.scan("report", lambda e: e.data["state"] == "open")
            ),
            "matches": self.repo.count("match"),
            "batches": self.repo.count("batch"),
        }

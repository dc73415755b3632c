"""Durable storage: append-only checksummed journal + in-memory indexes.

Journal file format (documented bit-exactly; little-endian):

    record  := [u32 length][u32 crc][payload bytes]
    length  := byte length of payload
    crc     := CRC-32 (zlib.crc32) of payload
    payload := UTF-8 JSON, one of
               {"seq": N, "kind": K, "id": I, "version": V, "data": {...}}
               {"seq": N, "batch": [{"kind":..., "id":..., "version":..., "data":...}, ...]}

Sequence numbers strictly increase with no gaps. A batch is applied
atomically: it occupies a single record, so after a crash it is either fully
replayed or (if torn) fully discarded. On startup the journal is replayed to
rebuild the indexes; a torn trailing record is dropped and the file truncated
back to the last intact record. A checksum failure that is *not* at the tail
means real corruption and raises corrupt_journal.

Concurrency: one writer (guarded by a lock), many readers. scan() copies the
relevant index under the lock, so it observes a consistent snapshot and never
a half-applied batch.
"""

from __future__ import annotations

import copy
import json
import os
import struct
import threading
import zlib
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .errors import err

_HEADER = struct.Struct("<II")


@dataclass(frozen=True)
class JournalRecord:
    sequence_number: int
    payload: bytes


def _encode_record(payload: bytes) -> bytes:
    return _HEADER.pack(len(payload), zlib.crc32(payload)) + payload


def read_journal(path: str) -> tuple[list[JournalRecord], int]:
    """Replay a journal file.

    Returns (records, intact_byte_length). A torn trailing record is not
    included in the records and not counted in the intact length. Corruption
    followed by further bytes that are not part of the torn tail raises
    corrupt_journal.
    """
    records: list[JournalRecord] = []
    if not os.path.exists(path):
        return records, 0
    with open(path, "rb") as fh:
        blob = fh.read()
    offset = 0
    size = len(blob)
    seq = 0
    while offset < size:
        start = offset
        header = blob[offset : offset + _HEADER.size]
        if len(header) < _HEADER.size:
            break  # torn header at tail
        length, crc = _HEADER.unpack(header)
        payload = blob[offset + _HEADER.size : offset + _HEADER.size + length]
        if len(payload) < length:
            break  # torn payload at tail
        if zlib.crc32(payload) != crc:
            # Bad checksum with a full-length payload present: only tolerable
            # if nothing follows (a torn write that happened to keep the old
            # length bytes). Anything after it is unexplained corruption.
            if offset + _HEADER.size + length >= size:
                break
            raise err("corrupt_journal", f"checksum mismatch at byte {start}")
        seq += 1
        records.append(JournalRecord(seq, payload))
        offset += _HEADER.size + length
    return records, offset


class Journal:
    """Single-writer append-only journal."""

    def __init__(self, path: str):
        self.path = path
        self._records, intact = read_journal(path)
        self._seq = len(self._records)
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        # Drop any torn tail so appends continue from the last intact record.
        if os.path.exists(path) and os.path.getsize(path) != intact:
            with open(path, "r+b") as fh:
                fh.truncate(intact)
        self._fh = open(path, "ab")

    def append(self, payload: bytes) -> int:
        self._seq += 1
        self._fh.write(_encode_record(payload))
        self._fh.flush()
        os.fsync(self._fh.fileno())
        return self._seq

    @property
    def sequence(self) -> int:
        return self._seq

    def records(self) -> list[JournalRecord]:
        return list(self._records)

    def close(self) -> None:
        self._fh.close()


class MemoryJournal:
    """Journal stand-in for tests and pure in-memory servers."""

    def __init__(self):
        self._seq = 0

    def append(self, payload: bytes) -> int:
        self._seq += 1
        return self._seq

    @property
    def sequence(self) -> int:
        return self._seq

    def records(self) -> list[JournalRecord]:
        return []

    def close(self) -> None:
        pass


@dataclass(frozen=True)
class Entity:
    kind: str
    id: str
    version: int
    data: dict


class Repository:
    """Keyed entity store with optimistic concurrency, backed by the journal.

    All writes are serialized by a single lock and acknowledged only after
    the journal append returns. put_batch writes one journal record, so a
    multi-entity mutation (for example a gold-assignment batch) is atomic
    across recovery.
    """

    def __init__(self, journal):
        self._journal = journal
        self._lock = threading.Lock()
        self._tables: dict[str, dict[str, Entity]] = {}
        for record in journal.records():
            doc = json.loads(record.payload.decode("utf-8"))
            if doc.get("seq") != record.sequence_number:
                raise err("corrupt_journal", "sequence number gap in journal")
            for item in doc.get("batch") or [doc]:
                self._apply(
                    Entity(item["kind"], item["id"], item["version"], item["data"])
                )

    def _apply(self, entity: Entity) -> None:
        self._tables.setdefault(entity.kind, {})[entity.id] = entity

    def _write(self, entities: list[Entity]) -> None:
        seq = self._journal.sequence + 1
        items = [
            {"kind": e.kind, "id": e.id, "version": e.version, "data": e.data}
            for e in entities
        ]
        doc = {"seq": seq, **items[0]} if len(items) == 1 else {"seq": seq, "batch": items}
        try:
            self._journal.append(json.dumps(doc, separators=(",", ":")).encode("utf-8"))
        except OSError as exc:
            raise err("io_error", str(exc)) from exc
        for entity in entities:
            self._apply(entity)

    def put(self, kind: str, id: str, data: dict) -> Entity:
        with self._lock:
            current = self._tables.get(kind, {}).get(id)
            entity = Entity(kind, id, (current.version if current else 0) + 1, data)
            self._write([entity])
            return entity

    def compare_and_put(self, kind: str, id: str, data: dict, expected_version: int) -> Entity:
        with self._lock:
            current = self._tables.get(kind, {}).get(id)
            version = current.version if current else 0
            if version != expected_version:
                raise err(
                    "version_conflict",
                    f"{kind}/{id}: expected version {expected_version}, have {version}",
                )
            entity = Entity(kind, id, version + 1, data)
            self._write([entity])
            return entity

    def put_batch(self, items: list[tuple[str, str, dict]]) -> list[Entity]:
        """Atomically apply several puts (one journal record)."""
        if not items:
            return []
        with self._lock:
            entities = []
            bumped: dict[tuple[str, str], int] = {}
            for kind, id, data in items:
                key = (kind, id)
                if key not in bumped:
                    current = self._tables.get(kind, {}).get(id)
                    bumped[key] = current.version if current else 0
                bumped[key] += 1
                entities.append(Entity(kind, id, bumped[key], data))
            self._write(entities)
            return entities

    def get(self, kind: str, id: str) -> Optional[Entity]:
        with self._lock:
            return self._tables.get(kind, {}).get(id)

    def exists(self, kind: str, id: str) -> bool:
        return self.get(kind, id) is not None

    def scan(self, kind: str, predicate: Optional[Callable[[Entity], bool]] = None) -> list[Entity]:
        """Snapshot of a table, in insertion order, optionally filtered."""
        with self._lock:
            snapshot = list(self._tables.get(kind, {}).values())
        if predicate is None:
            return snapshot
        return [e for e in snapshot if predicate(e)]

    def count(self, kind: str) -> int:
        with self._lock:
            return len(self._tables.get(kind, {}))

    def dump(self) -> dict:
        """Deep JSON-safe snapshot of every table; for tests and diagnostics."""
        with self._lock:
            return {
                kind: {
                    eid: {"version": e.version, "data": copy.deepcopy(e.data)}
                    for eid, e in table.items()
                }
                for kind, table in sorted(self._tables.items())
            }

    def next_id(self, kind: str, prefix: str) -> str:
        """Sequential human-readable ids, stable across journal replay."""
        with self._lock:
            table = self._tables.get(kind, {})
            top = 0
            for key in table:
                tail = key.rsplit("-", 1)[-1]
                if tail.isdigit():
                    top = max(top, int(tail))
            return f"{prefix}-{top + 1}"

    def close(self) -> None:
        self._journal.close()


def open_repository(journal_path: Optional[str]) -> Repository:
    journal = Journal(journal_path) if journal_path else MemoryJournal()
    return Repository(journal)

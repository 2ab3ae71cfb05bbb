"""File-backed versioned document store.

One JSON file per document under the data directory, written with atomic
rename-on-write and fsync so an acknowledged write survives a crash.
Writes use optimistic concurrency: an update is accepted only when the
caller's expected version matches the stored version, and the version then
advances by exactly 1.  Each accepted write is appended to the document's
history (version + content hash).
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path

DOCUMENT_KINDS = ("scenario", "plan", "runResult", "analyticsInput")


class UnknownDocument(KeyError):
    pass


def content_hash(payload) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class StoredDocument:
    doc_id: str
    kind: str
    version: int
    payload: dict
    content_hash: str
    history: list[dict]  # [{"version": int, "contentHash": str}]

    def to_dict(self) -> dict:
        return {
            "docId": self.doc_id,
            "kind": self.kind,
            "version": self.version,
            "contentHash": self.content_hash,
            "history": self.history,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StoredDocument":
        return cls(
            doc_id=d["docId"],
            kind=d["kind"],
            version=d["version"],
            payload=d["payload"],
            content_hash=d["contentHash"],
            history=d.get("history", []),
        )


@dataclass
class UpdateResult:
    accepted: bool
    version: int
    payload: dict
    content_hash: str


class DocumentStore:
    """Durable store with per-document serialized writes."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.docs_dir = self.data_dir / "docs"
        self.docs_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._doc_locks: dict[str, threading.Lock] = {}

    def _doc_lock(self, doc_id: str) -> threading.Lock:
        with self._lock:
            return self._doc_locks.setdefault(doc_id, threading.Lock())

    def _path(self, doc_id: str) -> Path:
        return self.docs_dir / f"{doc_id}.json"

    def _write(self, doc: StoredDocument) -> None:
        path = self._path(doc.doc_id)
        tmp = path.with_suffix(".tmp")
        data = json.dumps(doc.to_dict(), indent=2).encode()
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    def _read(self, doc_id: str) -> StoredDocument:
        path = self._path(doc_id)
        if not path.exists():
            raise UnknownDocument(doc_id)
        with open(path, "rb") as fh:
            return StoredDocument.from_dict(json.loads(fh.read()))

    def create(self, kind: str, payload: dict, doc_id: str | None = None) -> StoredDocument:
        if kind not in DOCUMENT_KINDS:
            raise ValueError(f"unknown document kind {kind!r}")
        doc_id = doc_id or uuid.uuid4().hex[:12]
        chash = content_hash(payload)
        doc = StoredDocument(
            doc_id=doc_id,
            kind=kind,
            version=1,
            payload=payload,
            content_hash=chash,
            history=[{"version": 1, "contentHash": chash}],
        )
        with self._doc_lock(doc_id):
            if self._path(doc_id).exists():
                raise ValueError(f"document {doc_id} already exists")
            self._write(doc)
        return doc

    def get(self, doc_id: str) -> StoredDocument:
        with self._doc_lock(doc_id):
            return self._read(doc_id)

    def update(self, doc_id: str, expected_version: int, payload: dict) -> UpdateResult:
        """Compare-and-set; on conflict returns the current version and
        payload so the caller can rebase."""
        with self._doc_lock(doc_id):
            doc = self._read(doc_id)
            if doc.version != expected_version:
                return UpdateResult(False, doc.version, doc.payload, doc.content_hash)
            doc.version = expected_version + 1
            doc.payload = payload
            doc.content_hash = content_hash(payload)
            doc.history.append(
                {"version": doc.version, "contentHash": doc.content_hash}
            )
            self._write(doc)
            return UpdateResult(True, doc.version, doc.payload, doc.content_hash)

    def delete(self, doc_id: str) -> None:
        with self._doc_lock(doc_id):
            path = self._path(doc_id)
            if not path.exists():
                raise UnknownDocument(doc_id)
            path.unlink()

    def list(self, kind: str | None = None) -> list[StoredDocument]:
        docs = []
        for path in self.docs_dir.glob("*.json"):
            try:
                doc = StoredDocument.from_dict(json.loads(path.read_bytes()))
            except (json.JSONDecodeError, KeyError):
                continue  # partial/foreign file; never acknowledged
            if kind is None or doc.kind == kind:
                docs.append(doc)
        docs.sort(key=lambda d: (d.kind, d.doc_id))
        return docs

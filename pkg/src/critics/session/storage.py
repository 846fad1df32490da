"""Durable session storage: one JSON snapshot per session plus an append-only
event log, both fsynced before an operation is acknowledged."""

from __future__ import annotations

import json
import os
from pathlib import Path

from critics.errors import NotFound, StorageError
from critics.session.model import Session


def _fsync_write(path: Path, data: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc}") from exc


class SessionStore:
    """Filesystem-backed store under one data directory."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError(f"cannot create data dir {self.root}: {exc}") from exc

    def _session_path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.json"

    def _events_path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.events.jsonl"

    def save(self, session: Session, event: dict | None = None) -> None:
        """Write-ahead: append the event record (with the resulting snapshot),
        then replace the snapshot document."""
        record = {
            "version": session.version,
            "event": event,
            "snapshot": session.to_dict(),
        }
        try:
            with open(self._events_path(session.id), "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise StorageError(f"cannot append event log for {session.id}: {exc}") from exc
        _fsync_write(self._session_path(session.id), json.dumps(session.to_dict(), sort_keys=True, indent=1))

    def load(self, session_id: str) -> Session:
        path = self._session_path(session_id)
        if not path.exists():
            raise NotFound(f"session {session_id} not found")
        try:
            return Session.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except (OSError, ValueError, KeyError) as exc:
            raise StorageError(f"corrupt session {session_id}: {exc}") from exc

    def replay(self, session_id: str) -> Session:
        """Reconstruct the latest state from the event log alone."""
        path = self._events_path(session_id)
        if not path.exists():
            raise NotFound(f"no event log for session {session_id}")
        last = None
        for line in path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                last = json.loads(line)
        if last is None:
            raise StorageError(f"empty event log for {session_id}")
        return Session.from_dict(last["snapshot"])

    def events(self, session_id: str) -> list[dict]:
        path = self._events_path(session_id)
        if not path.exists():
            return []
        return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json") if not p.stem.endswith(".events"))

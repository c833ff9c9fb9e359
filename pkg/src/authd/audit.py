"""
Append-only NDJSON audit log.
"""

import json
import os
import threading
from pathlib import Path
from typing import Iterator, List, Union

from src.authd.records import AuditRecord
from src.errors import StoreError


class AuditLog:
    """Serialized appends to an NDJSON file; each record is flushed and synced."""

    def __init__(self, path: Union[str, Path]) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: AuditRecord) -> None:
        line = json.dumps(record.to_dict(), sort_keys=True) + '\n'
        with self._lock:
            try:
                with open(self.path, 'a', encoding='utf-8') as f:
                    f.write(line)
                    f.flush()
                    os.fsync(f.fileno())
            except OSError as e:
                raise StoreError(f"Cannot append to audit log {self.path}: {e.strerror}")

    def lines(self) -> Iterator[str]:
        """Yield raw NDJSON lines written so far."""
        with self._lock:
            if not self.path.exists():
                return iter(())
            text = self.path.read_text(encoding='utf-8')
        return iter(text.splitlines(keepends=True))

    def records(self) -> List[dict]:
        return [json.loads(line) for line in self.lines() if line.strip()]

    def flush(self) -> None:
        # appends are synced as they happen; taking the lock waits out any in flight
        with self._lock:
            pass

"""
Persistent user store.

Layout of a store directory::

    index.json            user records (password hashes, metadata, fingerprint file names)
    <key>.prnufp          one PRNUFP1 fingerprint per user
    audit.ndjson          audit log (owned by AuditLog)

Saving writes every fingerprint file, then swaps in the new index with an
atomic rename; the index is the commit point.
"""

import hashlib
import json
from dataclasses import dataclass, field, replace
from datetime import datetime
from pathlib import Path
from typing import Dict, Union

from src.authd.records import UserRecord
from src.errors import FingerprintFileError, StoreError
from src.prnu.fpfile import atomic_write_bytes, encode_fingerprint, load_fingerprint
from src.utils.logging import get_logger

INDEX_NAME = 'index.json'
AUDIT_NAME = 'audit.ndjson'
INDEX_VERSION = 1


def fingerprint_file_name(user_id: str) -> str:
    return hashlib.sha256(user_id.encode('utf-8')).hexdigest()[:16] + '.prnufp'


@dataclass
class UserStore:
    """In-memory user table.

    ``quarantined`` maps user_id to the reason its record failed to load; the
    raw index entry is kept in ``held`` so a later save does not drop it.
    """

    users: Dict[str, UserRecord] = field(default_factory=dict)
    quarantined: Dict[str, str] = field(default_factory=dict)
    held: Dict[str, dict] = field(default_factory=dict)

    def __contains__(self, user_id: str) -> bool:
        return user_id in self.users

    def __len__(self) -> int:
        return len(self.users)

    def add(self, record: UserRecord) -> None:
        self.users[record.user_id] = record


def _record_entry(record: UserRecord) -> dict:
    fp = record.fingerprint
    return {
        'user_id': record.user_id,
        'fingerprint_file': fingerprint_file_name(record.user_id),
        'password_hash': record.password_hash,
        'registered_at': record.registered_at.isoformat(),
        'source_label': fp.source_label,
        'created_at': fp.created_at.isoformat(),
    }


def save_store(store: UserStore, path: Union[str, Path]) -> Path:
    """Persist a store atomically.

    Raises:
        StoreError: If any file cannot be written
    """
    root = Path(path)
    try:
        root.mkdir(parents=True, exist_ok=True)
        entries = []
        for user_id in sorted(store.users):
            record = store.users[user_id]
            atomic_write_bytes(root / fingerprint_file_name(user_id), encode_fingerprint(record.fingerprint))
            entries.append(_record_entry(record))
        entries.extend(entry for uid, entry in sorted(store.held.items()) if uid not in store.users)
        entries.sort(key=lambda entry: entry['user_id'])
        index = {'version': INDEX_VERSION, 'users': entries}
        atomic_write_bytes(root / INDEX_NAME, (json.dumps(index, indent=2, sort_keys=True) + '\n').encode('utf-8'))
    except OSError as e:
        raise StoreError(f"Cannot save store to {root}: {e.strerror or e}")
    return root


def load_store(path: Union[str, Path]) -> UserStore:
    """Load a store; a missing directory or index gives an empty store.

    A record whose fingerprint file is missing or fails its CRC is quarantined
    and the rest still load.

    Raises:
        StoreError: If the index itself is corrupt
    """
    root = Path(path)
    index_path = root / INDEX_NAME
    store = UserStore()
    if not index_path.exists():
        return store
    try:
        index = json.loads(index_path.read_text(encoding='utf-8'))
        entries = index['users']
        if index.get('version') != INDEX_VERSION or not isinstance(entries, list):
            raise ValueError(f"unsupported index version {index.get('version')!r}")
    except OSError as e:
        raise StoreError(f"Cannot read store index {index_path}: {e.strerror}")
    except (ValueError, KeyError, TypeError, AttributeError) as e:
        raise StoreError(f"Corrupt store index {index_path}: {e}")

    logger = get_logger()
    for entry in entries:
        try:
            user_id = entry['user_id']
            fp = load_fingerprint(root / entry['fingerprint_file'])
            fp = replace(
                fp,
                source_label=entry.get('source_label', ''),
                created_at=datetime.fromisoformat(entry['created_at']),
            )
            record = UserRecord(
                user_id=user_id,
                fingerprint=fp,
                password_hash=entry['password_hash'],
                registered_at=datetime.fromisoformat(entry['registered_at']),
            )
        except FingerprintFileError as e:
            store.quarantined[entry.get('user_id', '?')] = str(e)
            store.held[entry.get('user_id', '?')] = dict(entry)
            logger.warning(f"Quarantined user {entry.get('user_id')!r}: {e}")
            continue
        except (KeyError, TypeError, ValueError) as e:
            raise StoreError(f"Corrupt store index {index_path}: bad record ({e})")
        if user_id in store.users:
            raise StoreError(f"Corrupt store index {index_path}: duplicate user {user_id!r}")
        store.add(record)
    logger.debug(f"Loaded {len(store)} users from {root} ({len(store.quarantined)} quarantined)")
    return store

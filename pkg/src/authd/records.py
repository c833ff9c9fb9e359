"""
Records held and produced by the admission gateway.
"""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, Optional

from src.prnu.fingerprint import Fingerprint
from src.prnu.matcher import PceReport


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


class Decision(str, Enum):
    ADMITTED_PRNU = 'admitted_prnu'
    ADMITTED_PASSWORD = 'admitted_password'
    PASSWORD_REQUIRED = 'password_required'
    REJECTED = 'rejected'


@dataclass(frozen=True, eq=False)
class UserRecord:
    """A registered participant: camera fingerprint plus fallback password hash."""

    user_id: str
    fingerprint: Fingerprint
    password_hash: str
    registered_at: datetime = field(default_factory=utcnow)

    def __post_init__(self) -> None:
        if not self.user_id:
            raise ValueError("user_id must be non-empty")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UserRecord):
            return NotImplemented
        return (
            self.user_id == other.user_id
            and self.fingerprint == other.fingerprint
            and self.password_hash == other.password_hash
            and self.registered_at == other.registered_at
        )

    __hash__ = None  # type: ignore[assignment]

    def summary(self) -> Dict[str, Any]:
        """Public view of the record; never includes the password hash."""
        return {
            'user_id': self.user_id,
            'width': self.fingerprint.width,
            'height': self.fingerprint.height,
            'frames_used': self.fingerprint.frames_used,
            'postprocessed': self.fingerprint.postprocessed,
            'registered_at': self.registered_at.isoformat(),
        }


@dataclass(frozen=True)
class AuthOutcome:
    decision: Decision
    user_id: str
    pce_report: Optional[PceReport] = None
    challenge_token: Optional[str] = None
    session_id: Optional[str] = None
    reason: Optional[str] = None
    attempts_remaining: Optional[int] = None
    timestamp: datetime = field(default_factory=utcnow, compare=False)

    def __post_init__(self) -> None:
        if self.decision is Decision.ADMITTED_PRNU:
            if self.pce_report is None or not self.pce_report.accepted:
                raise ValueError("admitted_prnu requires an accepted PCE report")
        if self.decision is Decision.PASSWORD_REQUIRED:
            if self.pce_report is None or self.pce_report.accepted:
                raise ValueError("password_required requires a rejected PCE report")

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            'decision': self.decision.value,
            'user_id': self.user_id,
            'timestamp': self.timestamp.isoformat(),
        }
        if self.pce_report is not None:
            out['pce'] = self.pce_report.pce
            out['pce_report'] = self.pce_report.to_dict()
        if self.challenge_token is not None:
            out['challenge_token'] = self.challenge_token
        if self.session_id is not None:
            out['session_id'] = self.session_id
        if self.attempts_remaining is not None:
            out['attempts_remaining'] = self.attempts_remaining
        if self.reason is not None:
            out['reason'] = self.reason
        return out


@dataclass(frozen=True)
class AuditRecord:
    """One line of the audit log."""

    event: str
    user_id: str
    outcome: str
    timestamp: datetime = field(default_factory=utcnow)
    pce_report: Optional[PceReport] = None
    token_hint: Optional[str] = None
    reason: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            'event': self.event,
            'user_id': self.user_id,
            'outcome': self.outcome,
            'timestamp': self.timestamp.isoformat(),
        }
        if self.pce_report is not None:
            out['pce_report'] = self.pce_report.to_dict()
        if self.token_hint is not None:
            out['token'] = self.token_hint
        if self.reason is not None:
            out['reason'] = self.reason
        return out

"""
Meeting-admission gateway.

Registration stores a camera fingerprint and a password hash per participant.
A join computes a fingerprint from the opening frames of the participant's
video and matches it against the registered one; a failed match issues a
single-use password challenge bound to the user and the join session.
"""

import secrets
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterator, Optional, Tuple, Union

from src.authd.audit import AuditLog
from src.authd.passwords import hash_password, verify_password
from src.authd.records import AuditRecord, AuthOutcome, Decision, UserRecord
from src.authd.store import AUDIT_NAME, UserStore, load_store, save_store
from src.errors import (
    DegenerateInputError,
    DimensionMismatchError,
    DuplicateUserError,
    InsufficientFramesError,
    InvalidTokenError,
    PrnuGateError,
    StoreError,
)
from src.frames.selection import select_query_frames, select_registration_frames
from src.frames.types import FrameSequence
from src.prnu.fingerprint import Fingerprint, estimate_fingerprint
from src.prnu.matcher import PceReport, match_fingerprints
from src.utils.config import AppConfig, DenoiserConfig, MeetingPolicy
from src.utils.logging import get_logger, log_pce_report, log_sequence, token_hint

TOKEN_BYTES = 16


@dataclass
class Challenge:
    token: str
    user_id: str
    session_id: str
    expires_at: float
    attempts_remaining: int
    pce_report: PceReport


@dataclass
class _Event:
    user_id: str


def _failure_outcome(error: Exception) -> Tuple[str, Optional[str]]:
    if isinstance(error, DuplicateUserError):
        return 'duplicate', None
    if isinstance(error, InsufficientFramesError):
        return 'refused', error.code
    if isinstance(error, InvalidTokenError):
        return 'invalid_token', None
    if isinstance(error, PrnuGateError):
        return 'error', error.code
    return 'error', type(error).__name__.lower()


class Gateway:
    """Admission decisions over a persistent user store.

    The lock guards the user table and the challenge table only; frame
    selection, fingerprint estimation, matching and password hashing run
    outside it.
    """

    def __init__(
        self,
        store_path: Union[str, Path],
        policy: MeetingPolicy = MeetingPolicy(),
        denoiser: DenoiserConfig = DenoiserConfig(),
        challenge_ttl_seconds: float = 300.0,
        threads: int = 1,
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        self.store_path = Path(store_path)
        self.policy = policy
        self.denoiser = denoiser
        self.challenge_ttl_seconds = challenge_ttl_seconds
        self.threads = threads
        self._clock = clock
        self._lock = threading.Lock()
        self._challenges: Dict[str, Challenge] = {}
        self.logger = get_logger()
        self.store: UserStore = load_store(self.store_path)
        self.store_path.mkdir(parents=True, exist_ok=True)
        self.audit = AuditLog(self.store_path / AUDIT_NAME)
        if self.store.quarantined:
            self.logger.warning(f"{len(self.store.quarantined)} user record(s) quarantined in {self.store_path}")

    @classmethod
    def from_config(cls, cfg: AppConfig, clock: Callable[[], float] = time.monotonic) -> 'Gateway':
        return cls(
            cfg.store_path,
            policy=cfg.policy,
            denoiser=cfg.denoiser,
            challenge_ttl_seconds=cfg.challenge_ttl_seconds,
            threads=cfg.threads,
            clock=clock,
        )

    def _audit(self, event: str, user_id: str, outcome: str, **extra) -> None:
        self.audit.append(AuditRecord(event=event, user_id=user_id, outcome=outcome, **extra))

    @contextmanager
    def _audited(self, event: str, user_id: str, **extra) -> Iterator['_Event']:
        """Append exactly one failure record for any exception leaving the block."""
        current = _Event(user_id)
        try:
            yield current
        except Exception as e:
            outcome, reason = _failure_outcome(e)
            try:
                self._audit(event, current.user_id, outcome, reason=reason, **extra)
            except StoreError as lost:
                self.logger.error(f"Audit record for failed {event} of {current.user_id!r} not written: {lost}")
            raise

    def _is_known(self, user_id: str) -> bool:
        return user_id in self.store.users or user_id in self.store.quarantined

    def register_user(self, user_id: str, frames: FrameSequence, password: str) -> UserRecord:
        """Register a participant's camera.

        Args:
            user_id: New, non-empty user id
            frames: Registration video
            password: Fallback password (only its hash is kept)

        Returns:
            The stored record

        Raises:
            DuplicateUserError: user_id already registered
            InsufficientFramesError: Fewer selectable frames than the policy floor
            StoreError: The store could not be saved
        """
        with self._audited('register', user_id):
            if not user_id:
                raise ValueError("user_id must be non-empty")
            with self._lock:
                known = self._is_known(user_id)
            if known:
                raise DuplicateUserError(f"User {user_id!r} is already registered")

            log_sequence(self.logger, frames)
            selected = select_registration_frames(frames, self.policy.registration_frame_count)
            if len(selected) < self.policy.registration_floor:
                raise InsufficientFramesError(
                    f"Only {len(selected)} registration frames available; at least "
                    f"{self.policy.registration_floor} are required"
                )
            fp = estimate_fingerprint(
                selected, self.denoiser, postprocess=self.policy.postprocess, threads=self.threads,
            ).as_float32()
            record = UserRecord(user_id=user_id, fingerprint=fp, password_hash=hash_password(password))

            with self._lock:
                if self._is_known(user_id):
                    raise DuplicateUserError(f"User {user_id!r} is already registered")
                self.store.add(record)
                try:
                    save_store(self.store, self.store_path)
                except StoreError:
                    del self.store.users[user_id]
                    raise

            self._audit('register', user_id, 'registered')
        self.logger.info(f"Registered {user_id!r} from {fp.frames_used} frames ({fp.width}x{fp.height})")
        return record

    def request_join(
        self,
        user_id: str,
        frames: Optional[FrameSequence] = None,
        fingerprint: Optional[Fingerprint] = None,
        session_id: Optional[str] = None,
    ) -> AuthOutcome:
        """Decide a join request from query frames or a precomputed query fingerprint.

        Returns:
            admitted_prnu on a match, password_required with a challenge token
            otherwise, rejected for an unknown user
        """
        with self._audited('join', user_id):
            return self._decide_join(user_id, frames, fingerprint, session_id)

    def _decide_join(
        self,
        user_id: str,
        frames: Optional[FrameSequence],
        fingerprint: Optional[Fingerprint],
        session_id: Optional[str],
    ) -> AuthOutcome:
        if (frames is None) == (fingerprint is None):
            raise ValueError("Exactly one of frames or fingerprint must be given")
        session_id = session_id or secrets.token_hex(8)

        with self._lock:
            record = self.store.users.get(user_id)
        if record is None:
            why = 'quarantined' if user_id in self.store.quarantined else 'unknown_user'
            self.logger.warning(f"Join rejected for {user_id!r}: {why}")
            self._audit('join', user_id, Decision.REJECTED.value, reason=why)
            return AuthOutcome(decision=Decision.REJECTED, user_id=user_id, session_id=session_id, reason=why)

        if frames is not None:
            log_sequence(self.logger, frames)
            query_frames = select_query_frames(frames, self.policy.query_frame_count)
            fingerprint = estimate_fingerprint(
                query_frames, self.denoiser, postprocess=self.policy.postprocess, threads=self.threads,
            )

        reason: Optional[str] = None
        threshold = self.policy.matcher.pce_threshold
        try:
            report = match_fingerprints(record.fingerprint, fingerprint, self.policy.matcher)
        except (DimensionMismatchError, DegenerateInputError) as e:
            reason = e.code
            self.logger.info(f"Join for {user_id!r} treated as non-match: {e}")
            report = PceReport.non_match(threshold)
        log_pce_report(self.logger, user_id, report)

        if report.accepted:
            self._audit('join', user_id, Decision.ADMITTED_PRNU.value, pce_report=report)
            return AuthOutcome(
                decision=Decision.ADMITTED_PRNU, user_id=user_id, pce_report=report, session_id=session_id,
            )

        token = secrets.token_hex(TOKEN_BYTES)
        challenge = Challenge(
            token=token,
            user_id=user_id,
            session_id=session_id,
            expires_at=self._clock() + self.challenge_ttl_seconds,
            attempts_remaining=self.policy.password_attempt_limit,
            pce_report=report,
        )
        with self._lock:
            self._purge_expired()
            self._challenges[token] = challenge
        self._audit(
            'join', user_id, Decision.PASSWORD_REQUIRED.value,
            pce_report=report, token_hint=token_hint(token), reason=reason,
        )
        return AuthOutcome(
            decision=Decision.PASSWORD_REQUIRED,
            user_id=user_id,
            pce_report=report,
            challenge_token=token,
            session_id=session_id,
            reason=reason,
            attempts_remaining=challenge.attempts_remaining,
        )

    def _purge_expired(self) -> None:
        now = self._clock()
        for token in [t for t, c in self._challenges.items() if c.expires_at <= now]:
            del self._challenges[token]

    def submit_password(
        self,
        challenge_token: str,
        password: str,
        session_id: Optional[str] = None,
    ) -> AuthOutcome:
        """Answer a password challenge.

        Raises:
            InvalidTokenError: Token unknown, expired, consumed or bound to another session
        """
        with self._audited('password', '', token_hint=token_hint(challenge_token)) as current:
            return self._check_password(current, challenge_token, password, session_id)

    def _check_password(
        self,
        current: '_Event',
        challenge_token: str,
        password: str,
        session_id: Optional[str],
    ) -> AuthOutcome:
        with self._lock:
            challenge = self._challenges.get(challenge_token)
            if challenge is not None and challenge.expires_at <= self._clock():
                del self._challenges[challenge_token]
                challenge = None
            if challenge is not None and session_id is not None and session_id != challenge.session_id:
                challenge = None
            if challenge is not None:
                # the attempt is spent before the slow hash check
                challenge.attempts_remaining -= 1
                remaining = challenge.attempts_remaining
                if remaining <= 0:
                    del self._challenges[challenge_token]
                record = self.store.users.get(challenge.user_id)

        if challenge is None:
            raise InvalidTokenError("Challenge token is invalid, expired or already used")

        hint = token_hint(challenge_token)
        user_id = current.user_id = challenge.user_id
        if record is not None and verify_password(password, record.password_hash):
            with self._lock:
                self._challenges.pop(challenge_token, None)
            self._audit('password', user_id, Decision.ADMITTED_PASSWORD.value, token_hint=hint)
            return AuthOutcome(
                decision=Decision.ADMITTED_PASSWORD, user_id=user_id, session_id=challenge.session_id,
            )

        if remaining <= 0:
            self.logger.warning(f"Password attempts exhausted for {user_id!r}")
            self._audit('password', user_id, Decision.REJECTED.value, token_hint=hint, reason='attempts_exhausted')
            return AuthOutcome(
                decision=Decision.REJECTED,
                user_id=user_id,
                session_id=challenge.session_id,
                reason='attempts_exhausted',
                attempts_remaining=0,
            )

        self._audit('password', user_id, Decision.PASSWORD_REQUIRED.value, token_hint=hint, reason='wrong_password')
        return AuthOutcome(
            decision=Decision.PASSWORD_REQUIRED,
            user_id=user_id,
            pce_report=challenge.pce_report,
            challenge_token=challenge_token,
            session_id=challenge.session_id,
            reason='wrong_password',
            attempts_remaining=remaining,
        )

    def audit_lines(self) -> Iterator[str]:
        return self.audit.lines()

    def close(self) -> None:
        """Persist the store and flush the audit log."""
        with self._lock:
            save_store(self.store, self.store_path)
        self.audit.flush()
        self.logger.info(f"Gateway closed; store saved to {self.store_path}")

"""
HTTP/1.1 + JSON front end for the admission gateway.

    POST /register   {user_id, password, frames_ref}            -> 201 record summary
    POST /join       {user_id, frames_ref | fingerprint_b64}    -> 200 {decision, pce, challenge_token?}
    POST /password   {challenge_token, password}                -> 200 {decision}
    GET  /audit                                                 -> NDJSON audit stream
"""

import asyncio
import base64
import binascii
import socket
from typing import Optional

import uvicorn
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, Field, model_validator

from src.authd.gateway import Gateway
from src.errors import (
    DimensionMismatchError,
    DuplicateUserError,
    EmptySequenceError,
    FingerprintFileError,
    FrameFormatError,
    FrameTooSmallError,
    InsufficientFramesError,
    InvalidTokenError,
    PrnuGateError,
    ServiceError,
)
from src.frames.loader import load_sequence
from src.prnu.fingerprint import Fingerprint
from src.prnu.fpfile import decode_fingerprint
from src.utils.config import AppConfig
from src.utils.logging import get_logger

logger = get_logger()

_STATUS = {
    DuplicateUserError: 409,
    InsufficientFramesError: 422,
    InvalidTokenError: 404,
    FrameFormatError: 400,
    EmptySequenceError: 400,
    FrameTooSmallError: 400,
    DimensionMismatchError: 400,
    FingerprintFileError: 400,
}

# ------------------- Models for request validation -------------------


class RegisterRequest(BaseModel):
    user_id: str = Field(min_length=1)
    password: str = Field(min_length=1)
    frames_ref: str = Field(min_length=1)

    def __repr__(self) -> str:
        return f"RegisterRequest(user_id={self.user_id!r})"


class JoinRequest(BaseModel):
    user_id: str = Field(min_length=1)
    frames_ref: Optional[str] = None
    fingerprint_b64: Optional[str] = None
    session_id: Optional[str] = None

    @model_validator(mode='after')
    def _one_query(self) -> 'JoinRequest':
        if (self.frames_ref is None) == (self.fingerprint_b64 is None):
            raise ValueError('exactly one of frames_ref or fingerprint_b64 is required')
        return self


class PasswordRequest(BaseModel):
    challenge_token: str = Field(min_length=1)
    password: str
    session_id: Optional[str] = None

    def __repr__(self) -> str:
        return "PasswordRequest(<redacted>)"


def validation_body(exc: RequestValidationError) -> dict:
    problems = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err.get("loc", ()) if part != "body")
        problems.append(f"{loc}: {err.get('msg', 'invalid')}" if loc else err.get("msg", "invalid"))
    return {"error": "validation", "message": "; ".join(problems) or "invalid request body"}


def _decode_query_fingerprint(text: str) -> Fingerprint:
    try:
        blob = base64.b64decode(text, validate=True)
    except (binascii.Error, ValueError):
        raise FingerprintFileError("fingerprint_b64 is not valid base64")
    return decode_fingerprint(blob, source_label="request")


def status_for(error: PrnuGateError) -> int:
    for cls in type(error).__mro__:
        if cls in _STATUS:
            return _STATUS[cls]
    return 500


def create_app(gateway: Gateway) -> FastAPI:
    """Build the FastAPI application around a gateway."""
    app = FastAPI(title="prnu_gate admission service", version="1.0.0")

    @app.exception_handler(PrnuGateError)
    async def handle_gate_error(request: Request, exc: PrnuGateError) -> JSONResponse:
        status = status_for(exc)
        if status >= 500:
            logger.error(f"{request.method} {request.url.path} failed: {exc}")
        return JSONResponse(status_code=status, content=exc.to_dict())

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        # pydantic echoes the offending input; only field paths and messages go out
        return JSONResponse(status_code=422, content=validation_body(exc))

    # ------------------- Routes -------------------

    @app.post("/register", status_code=201)
    async def register(body: RegisterRequest) -> dict:
        frames = await asyncio.to_thread(load_sequence, body.frames_ref)
        record = await asyncio.to_thread(gateway.register_user, body.user_id, frames, body.password)
        return record.summary()

    @app.post("/join")
    async def join(body: JoinRequest) -> dict:
        if body.fingerprint_b64 is not None:
            fingerprint = await asyncio.to_thread(_decode_query_fingerprint, body.fingerprint_b64)
            outcome = await asyncio.to_thread(
                gateway.request_join, body.user_id, None, fingerprint, body.session_id,
            )
        else:
            frames = await asyncio.to_thread(load_sequence, body.frames_ref)
            outcome = await asyncio.to_thread(gateway.request_join, body.user_id, frames, None, body.session_id)
        return outcome.to_dict()

    @app.post("/password")
    async def password(body: PasswordRequest) -> dict:
        outcome = await asyncio.to_thread(
            gateway.submit_password, body.challenge_token, body.password, body.session_id,
        )
        return outcome.to_dict()

    @app.get("/audit")
    async def audit() -> StreamingResponse:
        lines = await asyncio.to_thread(lambda: list(gateway.audit_lines()))
        return StreamingResponse(iter(lines), media_type="application/x-ndjson")

    return app


def _check_port(host: str, port: int) -> None:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            sock.bind((host, port))
        except OSError as e:
            raise ServiceError(f"Cannot listen on {host}:{port}: {e.strerror}")


def run_server(cfg: AppConfig) -> None:
    """Serve until interrupted, then save the store and flush the audit log.

    Raises:
        ServiceError: If the port is unavailable
    """
    _check_port(cfg.host, cfg.port)
    gateway = Gateway.from_config(cfg)
    app = create_app(gateway)
    server = uvicorn.Server(uvicorn.Config(app, host=cfg.host, port=cfg.port, log_level="warning"))
    logger.info(f"Serving admission gateway on http://{cfg.host}:{cfg.port} (store {cfg.store_path})")
    try:
        server.run()
    except KeyboardInterrupt:
        # uvicorn re-raises the captured SIGINT once shutdown is complete
        pass
    finally:
        gateway.close()
        logger.info("Shutting down...")

"""
JSON client for the admission service.
"""

import asyncio
import json
import urllib.parse
from typing import Any, Dict, List, Optional

import httpx

from src.errors import RemoteError


class AuthdClient:
    """Calls /register, /join, /password and /audit on a running service."""

    def __init__(
        self,
        url: str,
        timeout: float = 120.0,
        verify_ssl: bool = True,
        transport: Optional[httpx.AsyncBaseTransport] = None,
    ) -> None:
        parsed = urllib.parse.urlparse(url)
        if parsed.scheme not in ('http', 'https') or not parsed.hostname:
            raise ValueError(f"Service URL must be http(s)://host[:port], got {url!r}")
        self.base_url = url.rstrip('/')
        self.timeout = timeout
        self.verify_ssl = verify_ssl
        self.transport = transport

    def _client(self) -> httpx.AsyncClient:
        return httpx.AsyncClient(
            base_url=self.base_url,
            timeout=self.timeout,
            verify=self.verify_ssl,
            transport=self.transport,
            headers={'Accept': 'application/json'},
        )

    async def _call(self, method: str, path: str, payload: Optional[Dict[str, Any]] = None) -> httpx.Response:
        try:
            async with self._client() as client:
                response = await client.request(method, path, json=payload)
        except httpx.TimeoutException as e:
            raise TimeoutError(f"{method} {path} timed out after {self.timeout}s") from e
        except httpx.TransportError as e:
            raise ConnectionError(f"Cannot reach {self.base_url}: {e}") from e

        if response.status_code >= 400:
            try:
                detail = response.json()
            except ValueError:
                detail = {}
            code = detail.get('error') if isinstance(detail, dict) else None
            message = detail.get('message') if isinstance(detail, dict) else None
            raise RemoteError(
                message or f"{method} {path} failed with HTTP {response.status_code}",
                status=response.status_code,
                remote_code=code,
            )
        return response

    async def _json(self, method: str, path: str, payload: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        return (await self._call(method, path, payload)).json()

    async def register(self, user_id: str, password: str, frames_ref: str) -> Dict[str, Any]:
        return await self._json('POST', '/register', {'user_id': user_id, 'password': password, 'frames_ref': frames_ref})

    async def join(
        self,
        user_id: str,
        frames_ref: Optional[str] = None,
        fingerprint_b64: Optional[str] = None,
        session_id: Optional[str] = None,
    ) -> Dict[str, Any]:
        payload: Dict[str, Any] = {'user_id': user_id}
        if frames_ref is not None:
            payload['frames_ref'] = frames_ref
        if fingerprint_b64 is not None:
            payload['fingerprint_b64'] = fingerprint_b64
        if session_id is not None:
            payload['session_id'] = session_id
        return await self._json('POST', '/join', payload)

    async def submit_password(self, challenge_token: str, password: str) -> Dict[str, Any]:
        return await self._json('POST', '/password', {'challenge_token': challenge_token, 'password': password})

    async def audit(self) -> List[Dict[str, Any]]:
        response = await self._call('GET', '/audit')
        return [json.loads(line) for line in response.text.splitlines() if line.strip()]

    def run(self, coro):
        """Run one client coroutine to completion from synchronous code."""
        return asyncio.run(coro)

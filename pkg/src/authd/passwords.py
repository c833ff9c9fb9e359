"""
Salted scrypt password hashes.

Stored form: ``scrypt$<n>$<r>$<p>$<salt b64>$<hash b64>``.
"""

import base64
import os

from cryptography.exceptions import InvalidKey
from cryptography.hazmat.primitives.kdf.scrypt import Scrypt

SCHEME = 'scrypt'
SALT_BYTES = 16
HASH_BYTES = 32
N = 2 ** 14
R = 8
P = 1


def _kdf(salt: bytes, n: int, r: int, p: int) -> Scrypt:
    return Scrypt(salt=salt, length=HASH_BYTES, n=n, r=r, p=p)


def hash_password(password: str) -> str:
    salt = os.urandom(SALT_BYTES)
    digest = _kdf(salt, N, R, P).derive(password.encode('utf-8'))
    return '$'.join([
        SCHEME, str(N), str(R), str(P),
        base64.b64encode(salt).decode('ascii'),
        base64.b64encode(digest).decode('ascii'),
    ])


def verify_password(password: str, stored: str) -> bool:
    """Check a password against a stored hash (constant-time comparison).

    Malformed stored hashes never verify.
    """
    try:
        scheme, n, r, p, salt_b64, hash_b64 = stored.split('$')
        if scheme != SCHEME:
            return False
        salt = base64.b64decode(salt_b64, validate=True)
        expected = base64.b64decode(hash_b64, validate=True)
        kdf = Scrypt(salt=salt, length=len(expected), n=int(n), r=int(r), p=int(p))
    except ValueError:
        return False
    try:
        kdf.verify(password.encode('utf-8'), expected)
    except InvalidKey:
        return False
    return True

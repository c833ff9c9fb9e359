"""
Meeting-admission gateway: registration, PRNU verification and password fallback.
"""

from src.authd.gateway import Gateway
from src.authd.records import AuthOutcome, Decision, UserRecord
from src.authd.store import UserStore, load_store, save_store

__all__ = ['AuthOutcome', 'Decision', 'Gateway', 'UserRecord', 'UserStore', 'load_store', 'save_store']

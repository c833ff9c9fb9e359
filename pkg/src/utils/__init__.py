"""
Shared utilities: logging, configuration and TLS.
"""

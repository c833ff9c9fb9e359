"""
HTTP client for the admission service.
"""

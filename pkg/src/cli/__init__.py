"""
Command-line interface for prnu_gate.
"""

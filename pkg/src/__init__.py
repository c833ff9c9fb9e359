"""PRNU camera fingerprinting and meeting-admission gateway.

Sensor-noise fingerprints are extracted from webcam frames, matched by
peak-to-correlation energy, and used to admit meeting participants with a
password fallback.
"""

__version__ = '0.1.0'

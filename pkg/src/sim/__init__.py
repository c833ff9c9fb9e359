"""
Synthetic sensors, datasets and the verification experiment.
"""

"""
PRNU core: denoising, residuals, fingerprint estimation, file format and matching.
"""

"""Small-inclusion Bloch dispersion: closed forms, DtN spectral check, plane-wave oracle."""
__version__ = "0.1.0"

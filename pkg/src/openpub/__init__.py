"""openpub: anonymous publication protocol library and validator simulator."""

__version__ = "0.1.0"

"""Soft torus RFD - finite dimensional witnesses for almost-commuting unitaries."""

__version__ = "0.1.0"

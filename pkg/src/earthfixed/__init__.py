"""Earth-fixed LEO beam layouts, beam hopping and common-signalling scheduling."""

__version__ = "0.1.0"

"""csmell: extraction and classification of inline code comment smells."""

__version__ = "0.1.0"

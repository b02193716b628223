"""TF-CR and baseline category weighting for embedding-based text classification."""

__version__ = "0.1.0"

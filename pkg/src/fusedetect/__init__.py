"""Detection of AI-generated images from fused statistical, semantic, and
texture features, with a from-scratch evaluation harness."""

__version__ = "0.1.0"

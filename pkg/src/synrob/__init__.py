"""Syntactic robustness testing for LLM code generators."""

__version__ = "0.1.0"

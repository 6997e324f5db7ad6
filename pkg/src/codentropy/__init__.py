"""Information content of source code across a repository's history."""

__version__ = "0.1.0"

"""HTTP front end over the library: compile, decode, score, evaluate."""

from .app import create_app

__all__ = ["create_app"]

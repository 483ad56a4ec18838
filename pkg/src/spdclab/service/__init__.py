"""HTTP layer: pydantic schemas, pure handlers, FastAPI app factory."""

from . import api, schemas
from .app import create_app

__all__ = ["api", "schemas", "create_app"]

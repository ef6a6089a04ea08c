from .app import app, create_app
from .store import ModelStore

__all__ = ["app", "create_app", "ModelStore"]

"""In-memory registry of fitted models for the long-running service."""

from __future__ import annotations

import threading
import uuid

from ..model import MultiOrderModel


class ModelStore:
    def __init__(self):
        self._models: dict[str, MultiOrderModel] = {}
        self._lock = threading.Lock()

    def put(self, model: MultiOrderModel) -> str:
        model_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._models[model_id] = model
        return model_id

    def get(self, model_id: str) -> MultiOrderModel | None:
        with self._lock:
            return self._models.get(model_id)

    def delete(self, model_id: str) -> bool:
        with self._lock:
            return self._models.pop(model_id, None) is not None

    def ids(self) -> list[str]:
        with self._lock:
            return list(self._models)

"""Handle-based bindings over the spatialmem memory store.

Agent frameworks drive the engine through opaque integer handles and
plain Python values (lists, floats, dicts); numpy arrays never cross the
boundary.  All engine failures surface as :class:`BindingError` carrying
a machine-readable ``code`` (and ``field`` for dimension mismatches), so
callers can dispatch on errors without importing the engine's exception
taxonomy.

Marshaling is lossless: every number crosses the boundary as a Python
float (IEEE double), so bound results match native results exactly.
"""

import functools
import itertools

from spatialmem import (ConfigError, DimensionError, EmptyStoreError,
                        EngineConfig, EngineError, MemoryStore,
                        OutOfWorldError, StoreFormatError)

__version__ = "0.1.0"

__all__ = ["BindingError", "BoundStore", "bind_create", "bind_load",
           "bind_write", "bind_retrieve", "bind_save", "bind_stats",
           "bind_config", "bind_close"]


class BindingError(Exception):
    """Engine failure surfaced across the binding boundary.

    ``code`` is machine-readable; ``field`` names the offending argument
    for dimension mismatches, else None.
    """

    def __init__(self, code: str, message: str, field: str | None = None):
        super().__init__(message)
        self.code = code
        self.field = field


_ERROR_CODES = [
    (DimensionError, "dimension_mismatch"),
    (EmptyStoreError, "empty_store"),
    (OutOfWorldError, "out_of_world"),
    (StoreFormatError, "bad_store_file"),
    (ConfigError, "bad_config"),
    (EngineError, "engine_error"),
]

_handles: dict[int, MemoryStore] = {}
_next_handle = itertools.count(1)


def _translate(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EngineError as exc:
            for klass, code in _ERROR_CODES:
                if isinstance(exc, klass):
                    field = getattr(exc, "field", None)
                    raise BindingError(code, str(exc), field=field) from exc
            raise  # unreachable: EngineError is the last entry
    return wrapper


def _store(handle: int) -> MemoryStore:
    store = _handles.get(handle)
    if store is None:
        raise BindingError("invalid_handle", f"no open store for handle {handle}")
    return store


def _register(store: MemoryStore) -> int:
    handle = next(_next_handle)
    _handles[handle] = store
    return handle


@_translate
def bind_create(config: dict | None = None) -> int:
    """Open a fresh store; returns its handle."""
    cfg = EngineConfig.from_dict(config) if config else EngineConfig()
    return _register(MemoryStore(cfg))


@_translate
def bind_load(path) -> int:
    """Open a store persisted by :func:`bind_save` (or natively)."""
    return _register(MemoryStore.load(path))


def bind_close(handle: int) -> None:
    """Release a handle; closing an unknown or closed handle is a no-op."""
    _handles.pop(handle, None)


@_translate
def bind_write(handle: int, v, p, object_id: str | None = None,
               c_instr: float = 0.0) -> dict:
    receipt = _store(handle).write([float(x) for x in v],
                                   [float(x) for x in p],
                                   object_id=object_id,
                                   c_instr=float(c_instr))
    return {
        "leaf_key": receipt.leaf_key,
        "leaf_created": receipt.leaf_created,
        "node_id": receipt.node_id,
        "node_created": receipt.node_created,
        "stm_evicted": receipt.stm_evicted,
        "step": receipt.step,
    }


@_translate
def bind_retrieve(handle: int, v, p) -> dict:
    result = _store(handle).retrieve([float(x) for x in v],
                                     [float(x) for x in p])
    return {
        "source": result.source,
        "items": [{
            "embedding": [float(x) for x in item.embedding],
            "position": [float(x) for x in item.position],
            "descriptor": [float(x) for x in item.descriptor],
            "similarity": float(item.similarity),
        } for item in result.items],
        "aggregate": [float(x) for x in result.aggregate],
    }


@_translate
def bind_save(handle: int, path) -> int:
    """Persist the store; returns bytes written."""
    return _store(handle).save(path)


@_translate
def bind_stats(handle: int) -> dict:
    return dict(_store(handle).stats())


@_translate
def bind_config(handle: int) -> dict:
    """Echo of the effective engine configuration."""
    return _store(handle).cfg.to_dict()


class BoundStore:
    """Object-style wrapper over the handle API; usable as a context
    manager.  The handle stays valid until :meth:`close`."""

    def __init__(self, config: dict | None = None, _handle: int | None = None):
        self._handle = bind_create(config) if _handle is None else _handle

    @classmethod
    def load(cls, path) -> "BoundStore":
        return cls(_handle=bind_load(path))

    @property
    def handle(self) -> int:
        return self._handle

    def write(self, v, p, object_id=None, c_instr=0.0) -> dict:
        return bind_write(self._handle, v, p, object_id, c_instr)

    def retrieve(self, v, p) -> dict:
        return bind_retrieve(self._handle, v, p)

    def save(self, path) -> int:
        return bind_save(self._handle, path)

    def stats(self) -> dict:
        return bind_stats(self._handle)

    def config(self) -> dict:
        return bind_config(self._handle)

    def close(self) -> None:
        bind_close(self._handle)

    def __enter__(self) -> "BoundStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

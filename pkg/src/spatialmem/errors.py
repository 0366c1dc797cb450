"""Error taxonomy for the memory engine.

Every error carries a stable machine-readable ``code`` so foreign callers
(bindings, CLI) can dispatch on it without parsing messages.
"""


class EngineError(Exception):
    code = "engine_error"


class OutOfWorldError(EngineError):
    """Position falls outside [0, L)^3 after origin normalization."""

    code = "out_of_world"

    def __init__(self, axis: str, value: float, limit: float):
        self.axis = axis
        self.value = value
        self.limit = limit
        super().__init__(f"coordinate {axis}={value} outside [0, {limit})")


class MortonRangeError(EngineError):
    code = "morton_range"


class DimensionError(EngineError):
    code = "dimension_mismatch"

    def __init__(self, field: str, expected: int, got: int):
        self.field = field
        self.expected = expected
        self.got = got
        super().__init__(f"{field}: expected length {expected}, got {got}")


class DepthUnderflowError(EngineError):
    """Requested more unroll steps than writes absorbed."""

    code = "unroll_underflow"


class NumericOverflowError(EngineError):
    code = "numeric_overflow"


class TrainingDivergedError(EngineError):
    code = "training_diverged"


class NotTrainedError(EngineError):
    code = "decoder_not_trained"


class NodeNotFoundError(EngineError):
    code = "node_not_found"


class DuplicateIdError(EngineError):
    code = "duplicate_id"


class EmptyIndexError(EngineError):
    code = "empty_index"


class EmptyStoreError(EngineError):
    code = "empty_store"


class EmptyInputError(EngineError):
    code = "empty_input"


class ConfigError(EngineError):
    code = "bad_config"


class StoreFormatError(EngineError):
    code = "bad_store_file"


class BadMagicError(StoreFormatError):
    code = "bad_magic"


class BadChecksumError(StoreFormatError):
    code = "bad_checksum"


class UnsupportedVersionError(StoreFormatError):
    code = "unsupported_version"


class TruncatedFileError(StoreFormatError):
    code = "truncated_file"

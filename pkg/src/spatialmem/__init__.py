"""Spatial cognition memory engine.

A hierarchical spatial memory for embodied agents: a sparse octree with
Morton-coded leaves and a dynamic landmark graph share reversible memory
tokens, a bounded short-term cache answers local queries, and an
approximate nearest-neighbor index over token states serves long-term
recall with exact reconstruction of the stored observations.
"""

from .attention import gated_attention_fuse, sigmoid_gate, softmax_attention
from .config import EngineConfig
from .core import as_embedding, as_position, cosine_similarity, normalize_position
from .errors import (BadChecksumError, BadMagicError, ConfigError,
                     DepthUnderflowError, DimensionError, DuplicateIdError,
                     EmptyIndexError, EmptyInputError, EmptyStoreError,
                     EngineError, MortonRangeError, NodeNotFoundError,
                     NotTrainedError, NumericOverflowError, OutOfWorldError,
                     StoreFormatError, TrainingDivergedError,
                     TruncatedFileError, UnsupportedVersionError)
from .graph import GraphEdge, GraphNode, SemanticGraph
from .hnsw import HnswIndex
from .kernels import BACKEND
from .morton import cell_bounds, key_for_position, morton_decode, morton_encode, quantize
from .octree import OctreeLeaf, SparseOctree
from .reversible import (DecoderSet, ResidualMLP, RevBlockParams, TokenChain,
                         cycle_loss_and_grads, cycle_reconstruct, rev_forward,
                         rev_inverse, train_cycle, train_decoder)
from .stm import StmCache, StmEntry
from .store import (FeatureFlags, MemoryStore, RetrievalResult, RetrievedItem,
                    WriteReceipt)

__version__ = "0.1.0"

__all__ = [
    "EngineConfig", "MemoryStore", "FeatureFlags", "WriteReceipt",
    "RetrievedItem", "RetrievalResult",
    "SparseOctree", "OctreeLeaf", "SemanticGraph", "GraphNode", "GraphEdge",
    "StmCache", "StmEntry", "HnswIndex",
    "TokenChain", "RevBlockParams", "ResidualMLP", "DecoderSet",
    "rev_forward", "rev_inverse", "cycle_reconstruct", "cycle_loss_and_grads",
    "train_cycle", "train_decoder",
    "morton_encode", "morton_decode", "quantize", "key_for_position",
    "cell_bounds",
    "softmax_attention", "gated_attention_fuse", "sigmoid_gate",
    "as_embedding", "as_position", "cosine_similarity", "normalize_position",
    "EngineError", "OutOfWorldError", "MortonRangeError", "DimensionError",
    "DepthUnderflowError", "NumericOverflowError", "TrainingDivergedError",
    "NotTrainedError", "NodeNotFoundError", "DuplicateIdError",
    "EmptyIndexError", "EmptyStoreError", "EmptyInputError", "ConfigError",
    "StoreFormatError", "BadMagicError", "BadChecksumError",
    "UnsupportedVersionError", "TruncatedFileError",
    "BACKEND", "__version__",
]

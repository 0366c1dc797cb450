"""Reference softmax attention and the gated memory fusion blend."""

import numpy as np

from .errors import DimensionError


def softmax_attention(Q, K, V) -> np.ndarray:
    """softmax(Q K^T / sqrt(d_k)) V with row-wise normalization."""
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    K = np.atleast_2d(np.asarray(K, dtype=np.float64))
    V = np.atleast_2d(np.asarray(V, dtype=np.float64))
    if Q.shape[1] != K.shape[1]:
        raise DimensionError("key dim", Q.shape[1], K.shape[1])
    if K.shape[0] != V.shape[0]:
        raise DimensionError("value rows", K.shape[0], V.shape[0])
    scores = Q @ K.T / np.sqrt(Q.shape[1])
    scores -= scores.max(axis=1, keepdims=True)
    weights = np.exp(scores)
    weights /= weights.sum(axis=1, keepdims=True)
    return weights @ V


def gated_attention_fuse(Q, K, V, m_t, alpha_t: float) -> np.ndarray:
    """Blend attention with and without the memory vector appended to K/V.

    alpha_t = 0 reproduces plain attention; alpha_t = 1 attends fully over
    the memory-augmented keys/values.
    """
    if not (0.0 <= alpha_t <= 1.0):
        raise ValueError(f"alpha_t must be in [0, 1], got {alpha_t}")
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    K = np.atleast_2d(np.asarray(K, dtype=np.float64))
    V = np.atleast_2d(np.asarray(V, dtype=np.float64))
    m = np.asarray(m_t, dtype=np.float64).reshape(1, -1)
    if m.shape[1] != K.shape[1]:
        raise DimensionError("memory vector", K.shape[1], m.shape[1])
    K_aug = np.vstack([K, m])
    V_aug = np.vstack([V, m])
    return (alpha_t * softmax_attention(Q, K_aug, V_aug)
            + (1.0 - alpha_t) * softmax_attention(Q, K, V))


def sigmoid_gate(Q, m_t, w: np.ndarray, b: float) -> float:
    """Optional learned scalar gate sigmoid(w . [mean(Q); m_t] + b)."""
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    feat = np.concatenate([Q.mean(axis=0), np.asarray(m_t, dtype=np.float64)])
    if feat.shape != np.asarray(w).shape:
        raise DimensionError("gate weights", feat.shape[0], int(np.asarray(w).size))
    return float(1.0 / (1.0 + np.exp(-(feat @ w + b))))

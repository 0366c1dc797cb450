"""Invertible additive-coupling memory tokens and their decoders.

The write operator is a stack of additive coupling layers
``y1 = x1 + F(x2); y2 = x2 + G(y1)`` which is bijective for arbitrary F, G
and inverts by subtraction in reverse layer order.  Each spatial element
keeps a token chain whose state is the 2d-wide output pair of the latest
write; the half displaced by each write is retained so the whole history
can be unrolled exactly.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (DepthUnderflowError, DimensionError, NotTrainedError,
                     NumericOverflowError, TrainingDivergedError)


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NumericOverflowError("non-finite value in coupling pass")


@dataclass
class ResidualMLP:
    """x -> A x + b + W2 tanh(W1 x + b1).

    The linear skip A makes exact identities and exact projections
    representable, which the nonlinear two-layer part alone cannot do.
    """

    A: np.ndarray
    b: np.ndarray
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray

    @classmethod
    def init(cls, d_in: int, d_out: int, hidden: int, scale: float, rng) -> "ResidualMLP":
        return cls(
            A=rng.normal(0.0, scale / np.sqrt(d_in), size=(d_out, d_in)),
            b=np.zeros(d_out),
            W1=rng.normal(0.0, 1.0 / np.sqrt(d_in), size=(hidden, d_in)),
            b1=np.zeros(hidden),
            W2=rng.normal(0.0, scale / np.sqrt(hidden), size=(d_out, hidden)),
        )

    @classmethod
    def zero(cls, d_in: int, d_out: int, hidden: int) -> "ResidualMLP":
        return cls(np.zeros((d_out, d_in)), np.zeros(d_out),
                   np.zeros((hidden, d_in)), np.zeros(hidden),
                   np.zeros((d_out, hidden)))

    @classmethod
    def identity(cls, d: int, hidden: int) -> "ResidualMLP":
        p = cls.zero(d, d, hidden)
        p.A = np.eye(d)
        return p

    def __call__(self, x: np.ndarray) -> np.ndarray:
        h = np.tanh(x @ self.W1.T + self.b1)
        return x @ self.A.T + self.b + h @ self.W2.T

    def grads(self, x: np.ndarray, dy: np.ndarray):
        """Parameter gradients and input gradient for batched x, dy."""
        x2 = np.atleast_2d(x)
        dy2 = np.atleast_2d(dy)
        h = np.tanh(x2 @ self.W1.T + self.b1)
        gA = dy2.T @ x2
        gb = dy2.sum(axis=0)
        gW2 = dy2.T @ h
        gpre = (dy2 @ self.W2) * (1.0 - h * h)
        gW1 = gpre.T @ x2
        gb1 = gpre.sum(axis=0)
        dx = dy2 @ self.A + gpre @ self.W1
        return {"A": gA, "b": gb, "W1": gW1, "b1": gb1, "W2": gW2}, dx

    def param_items(self):
        return [("A", self.A), ("b", self.b), ("W1", self.W1),
                ("b1", self.b1), ("W2", self.W2)]

    def copy(self) -> "ResidualMLP":
        return ResidualMLP(*(p.copy() for _, p in self.param_items()))


@dataclass
class RevBlockParams:
    """Parameters of the L-layer coupling stack; immutable once built."""

    layers: list  # list of (F: ResidualMLP, G: ResidualMLP)
    d: int

    @classmethod
    def init(cls, d: int, hidden: int, num_layers: int, scale: float, rng) -> "RevBlockParams":
        layers = [(ResidualMLP.init(d, d, hidden, scale, rng),
                   ResidualMLP.init(d, d, hidden, scale, rng))
                  for _ in range(num_layers)]
        return cls(layers=layers, d=d)

    @classmethod
    def identity(cls, d: int, num_layers: int = 1, hidden: int = 1) -> "RevBlockParams":
        return cls(layers=[(ResidualMLP.zero(d, d, hidden),
                            ResidualMLP.zero(d, d, hidden))
                           for _ in range(num_layers)], d=d)


def rev_forward(params: RevBlockParams, x1, x2):
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    for F, G in params.layers:
        x1 = x1 + F(x2)
        x2 = x2 + G(x1)
    _check_finite(x1, x2)
    return x1, x2


def rev_inverse(params: RevBlockParams, y1, y2):
    y1 = np.asarray(y1, dtype=np.float64)
    y2 = np.asarray(y2, dtype=np.float64)
    for F, G in reversed(params.layers):
        y2 = y2 - G(y1)
        y1 = y1 - F(y2)
    _check_finite(y1, y2)
    return y1, y2


@dataclass
class TokenChain:
    """Reversible token state of one spatial element.

    ``(h1, h2)`` is the output pair of the most recent write; ``spares``
    holds the h2 halves displaced by each write, oldest first, so that the
    inverse pass can rebuild every intermediate state.  Chains are value
    objects: ``write`` returns a new chain, so readers hold stable
    snapshots.
    """

    h1: np.ndarray
    h2: np.ndarray
    depth: int = 0
    spares: tuple = field(default_factory=tuple)

    @classmethod
    def fresh(cls, d: int, rng) -> "TokenChain":
        return cls(h1=rng.normal(size=d), h2=rng.normal(size=d))

    @property
    def state(self) -> np.ndarray:
        """The 2d read-token used for indexing and queries."""
        return np.concatenate([self.h1, self.h2])

    def write(self, params: RevBlockParams, v: np.ndarray) -> "TokenChain":
        v = np.asarray(v, dtype=np.float64)
        if v.shape != self.h1.shape:
            raise DimensionError("write embedding", self.h1.shape[0], int(v.size))
        y1, y2 = rev_forward(params, self.h1, v)
        return TokenChain(h1=y1, h2=y2, depth=self.depth + 1,
                          spares=self.spares + (self.h2,))

    def unroll(self, params: RevBlockParams, steps: int):
        """Recover the last ``steps`` written embeddings, most recent first."""
        if steps < 1:
            raise DepthUnderflowError("steps must be >= 1")
        if steps > self.depth:
            raise DepthUnderflowError(
                f"cannot unroll {steps} steps from depth {self.depth}")
        h1, h2 = self.h1, self.h2
        recovered = []
        for i in range(steps):
            prev_h1, v_hat = rev_inverse(params, h1, h2)
            recovered.append(v_hat)
            h1 = prev_h1
            h2 = self.spares[self.depth - 1 - i]
        return recovered

    def initial_state(self, params: RevBlockParams):
        """Rebuild the seeded pre-write state by full inverse unrolling."""
        h1, h2 = self.h1, self.h2
        for i in range(self.depth):
            h1, _ = rev_inverse(params, h1, h2)
            h2 = self.spares[self.depth - 1 - i]
        return h1, h2


# ---------------------------------------------------------------------------
# Decoders


@dataclass
class DecoderSet:
    """Projection heads recovering position / descriptor / embedding from
    reversed hidden states."""

    pi_p: ResidualMLP   # d -> 3
    pi_d: ResidualMLP   # d -> d
    pi_v: ResidualMLP   # 2d -> d
    mode: str = "passthrough"
    pos_stamp_scale: float = 0.01
    trained: bool = False

    @classmethod
    def init(cls, d: int, hidden: int, rng, mode: str = "passthrough",
             pos_stamp_scale: float = 0.01, scale: float = 0.05) -> "DecoderSet":
        return cls(
            pi_p=ResidualMLP.init(d, 3, hidden, scale, rng),
            pi_d=ResidualMLP.identity(d, hidden),
            pi_v=ResidualMLP.init(2 * d, d, hidden, scale, rng),
            mode=mode,
            pos_stamp_scale=pos_stamp_scale,
        )

    @classmethod
    def exact_inverse(cls, d: int, hidden: int = 1) -> "DecoderSet":
        """pi_v selects the v-half of the reversed pair exactly."""
        pi_v = ResidualMLP.zero(2 * d, d, hidden)
        pi_v.A[:, d:] = np.eye(d)
        return cls(pi_p=ResidualMLP.zero(d, 3, hidden),
                   pi_d=ResidualMLP.identity(d, hidden),
                   pi_v=pi_v, mode="trained", trained=True)

    def decode_position(self, v_hat: np.ndarray) -> np.ndarray:
        if self.mode == "passthrough":
            return np.asarray(v_hat[:3], dtype=np.float64) / self.pos_stamp_scale
        if self.mode == "strict" and not self.trained:
            raise NotTrainedError("position decoder has not been trained")
        return self.pi_p(np.asarray(v_hat, dtype=np.float64))

    def decode_descriptor(self, v_hat: np.ndarray) -> np.ndarray:
        if self.mode == "passthrough":
            return np.asarray(v_hat, dtype=np.float64)
        if self.mode == "strict" and not self.trained:
            raise NotTrainedError("descriptor decoder has not been trained")
        return self.pi_d(np.asarray(v_hat, dtype=np.float64))


# ---------------------------------------------------------------------------
# Cycle-consistency training


def cycle_reconstruct(params: RevBlockParams, pi_v: ResidualMLP,
                      theta: np.ndarray, v: np.ndarray):
    """Push (theta, v) through the coupling stack and back, then project."""
    y1, y2 = rev_forward(params, theta, v)
    x1b, x2b = rev_inverse(params, y1, y2)
    z = np.concatenate([np.atleast_2d(x1b), np.atleast_2d(x2b)], axis=1)
    return pi_v(z)


def cycle_loss_and_grads(params: RevBlockParams, pi_v: ResidualMLP,
                         theta: np.ndarray, v: np.ndarray):
    """Mean squared reconstruction error and analytic decoder gradients.

    The forward-then-inverse composition is the identity map for any
    coupling parameters, so those parameters receive exactly zero gradient
    from this loss; only the projection head learns.
    """
    theta = np.atleast_2d(np.asarray(theta, dtype=np.float64))
    v = np.atleast_2d(np.asarray(v, dtype=np.float64))
    n = v.shape[0]
    y1, y2 = rev_forward(params, theta, v)
    x1b, x2b = rev_inverse(params, y1, y2)
    z = np.concatenate([x1b, x2b], axis=1)
    v_hat = pi_v(z)
    resid = v_hat - v
    loss = float(np.sum(resid * resid) / n)
    grads, _ = pi_v.grads(z, 2.0 * resid / n)
    return loss, grads


def train_cycle(params: RevBlockParams, pi_v: ResidualMLP,
                theta: np.ndarray, v: np.ndarray,
                steps: int = 100, lr: float = 1e-3):
    """Gradient-descent minimization of the reconstruction loss.

    Returns (pi_v, loss_history); raises TrainingDivergedError when the
    loss leaves the finite range.
    """
    pi_v = pi_v.copy()
    history = []
    for _ in range(steps):
        loss, grads = cycle_loss_and_grads(params, pi_v, theta, v)
        if not np.isfinite(loss):
            raise TrainingDivergedError(f"loss became {loss}")
        history.append(loss)
        for name, param in pi_v.param_items():
            param -= lr * grads[name]
    history.append(cycle_loss_and_grads(params, pi_v, theta, v)[0])
    return pi_v, history


def supervised_loss_and_grads(dec: ResidualMLP, x: np.ndarray, y: np.ndarray):
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    n = x.shape[0]
    pred = dec(x)
    resid = pred - y
    loss = float(np.sum(resid * resid) / n)
    grads, _ = dec.grads(x, 2.0 * resid / n)
    return loss, grads


def train_decoder(dec: ResidualMLP, x: np.ndarray, y: np.ndarray,
                  steps: int = 200, lr: float = 1e-2):
    """Supervised MSE training for the position/descriptor heads."""
    dec = dec.copy()
    history = []
    for _ in range(steps):
        loss, grads = supervised_loss_and_grads(dec, x, y)
        if not np.isfinite(loss):
            raise TrainingDivergedError(f"loss became {loss}")
        history.append(loss)
        for name, param in dec.param_items():
            param -= lr * grads[name]
    history.append(supervised_loss_and_grads(dec, x, y)[0])
    return dec, history

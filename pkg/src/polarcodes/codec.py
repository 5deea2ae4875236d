"""Polar encoding and successive cancellation decoding.

Both operate on single words (1-D arrays) or on batches (2-D arrays with one
word per row); batching is how the Monte Carlo driver gets its speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Channel
from .construct import CodeSpec
from .errors import InvalidParameterError

# normalized pairs closer than this are treated as ties and decided as 0
TIE_TOL = 1e-12


def polar_transform(u) -> np.ndarray:
    """Apply ``G_n`` to bit vectors of length ``2**n`` along the last axis.

    One stage maps ``u`` to ``(u_even ^ u_odd, u_odd)`` inside every block,
    then recurses on both halves; ``n`` stages of ``N/2`` XORs each.
    """
    x = np.array(u, dtype=np.uint8)
    N = x.shape[-1]
    if N < 1 or N & (N - 1):
        raise InvalidParameterError(f"length must be a power of two, got {N}")
    lead = x.shape[:-1]
    blocks, size = 1, N
    while size > 1:
        x = x.reshape(*lead, blocks, size)
        even, odd = x[..., 0::2], x[..., 1::2]
        x = np.concatenate([even ^ odd, odd], axis=-1)
        blocks, size = blocks * 2, size // 2
    return x.reshape(*lead, N)


def scatter_message(spec: CodeSpec, message) -> np.ndarray:
    message = np.asarray(message, dtype=np.uint8)
    if message.shape[-1] != spec.dimension:
        raise InvalidParameterError(
            f"message length must be {spec.dimension} for this code, got {message.shape[-1]}"
        )
    u = np.zeros(message.shape[:-1] + (spec.length,), dtype=np.uint8)
    u[..., spec.info_indices] = message
    return u


def encode(spec: CodeSpec, message) -> np.ndarray:
    """Codeword ``G_n u`` where ``u`` carries ``message`` on the unfrozen indices."""
    return polar_transform(scatter_message(spec, message))


@dataclass
class GenieStats:
    """Outcome of genie-aided decoding over a batch.

    ``errors[t, i]`` is True when the decision on index ``i`` of trial ``t``
    was wrong given correct earlier bits. ``first_error[t]`` is the first wrong
    unfrozen index, or -1; SC decoding fails exactly when it is not -1.
    """

    errors: np.ndarray
    first_error: np.ndarray

    @property
    def trials(self) -> int:
        return self.errors.shape[0]

    @property
    def error_counts(self) -> np.ndarray:
        return self.errors.sum(axis=0)

    @property
    def error_rates(self) -> np.ndarray:
        return self.error_counts / max(self.trials, 1)


class SCDecoder:
    """Successive cancellation decoder for one code and one channel.

    Probabilities travel as normalized pairs ``(q0, q1)``. Each tree node
    splits its outputs into adjacent pairs ``(y_2j, y_2j+1)``: the left child
    sees the minus combination of each pair, the right child the plus
    combination given the left child's re-encoded bits.

    The instance keeps a node-evaluation counter, so one decode should be in
    flight per instance.
    """

    def __init__(self, spec: CodeSpec, channel: Channel, allow_mismatch: bool = False):
        if spec.channel and channel.name and spec.channel != channel.name and not allow_mismatch:
            raise InvalidParameterError(
                f"code was designed for {spec.channel} but decoding uses {channel.name}; "
                "pass allow_mismatch=True to decode anyway"
            )
        self.spec = spec
        self.channel = channel
        self.mismatched = bool(spec.channel and channel.name and spec.channel != channel.name)
        self._frozen = spec.frozen_mask
        self.node_evaluations = 0

    def _likelihoods(self, received) -> tuple[np.ndarray, np.ndarray]:
        y = np.asarray(received)
        if y.shape[-1] != self.spec.length:
            raise InvalidParameterError(
                f"received word must have length {self.spec.length}, got {y.shape[-1]}"
            )
        if y.size and (y.min() < 0 or y.max() >= self.channel.output_size):
            raise InvalidParameterError("received symbol outside the channel's output alphabet")
        y = np.atleast_2d(y)
        p0 = self.channel.prob[0][y]
        p1 = self.channel.prob[1][y]
        self.node_evaluations += y.shape[-1]
        return _normalize(p0, p1)

    def decode(self, received) -> np.ndarray:
        """Decoded message bits (unfrozen positions of ``u_hat``)."""
        u = self.decode_full(received)
        return u[..., self.spec.info_indices]

    def decode_full(self, received) -> np.ndarray:
        """The whole estimate ``u_hat`` including frozen zeros."""
        single = np.ndim(received) == 1
        self.node_evaluations = 0
        p0, p1 = self._likelihoods(received)
        u = np.zeros(p0.shape, dtype=np.uint8)
        self._node(p0, p1, 0, u, None, None)
        return u[0] if single else u

    def decode_genie(self, received, true_u) -> GenieStats:
        """Decide every index, record mistakes, then continue with the true bit.

        Frozen indices are decided too (their true value is 0), which gives
        per-index error rates for the whole subchannel ladder.
        """
        self.node_evaluations = 0
        p0, p1 = self._likelihoods(received)
        true_u = np.atleast_2d(np.asarray(true_u, dtype=np.uint8))
        if true_u.shape != p0.shape:
            raise InvalidParameterError("true message shape does not match received words")
        u = np.zeros(p0.shape, dtype=np.uint8)
        errors = np.zeros(p0.shape, dtype=bool)
        self._node(p0, p1, 0, u, true_u, errors)
        wrong = errors & ~self._frozen[None, :]
        first = np.where(wrong.any(axis=1), wrong.argmax(axis=1), -1)
        return GenieStats(errors, first)

    def _node(self, p0, p1, offset, u, genie, errors) -> np.ndarray:
        size = p0.shape[1]
        if size == 1:
            i = offset
            decide_one = (p1[:, 0] - p0[:, 0]) > TIE_TOL
            if genie is not None:
                errors[:, i] = decide_one != genie[:, i].astype(bool)
                u[:, i] = genie[:, i]
            elif not self._frozen[i]:
                u[:, i] = decide_one
            return u[:, i : i + 1]
        a0, a1 = p0[:, 0::2], p1[:, 0::2]
        b0, b1 = p0[:, 1::2], p1[:, 1::2]
        half = size // 2
        c0, c1 = _normalize(a0 * b0 + a1 * b1, a0 * b1 + a1 * b0)
        self.node_evaluations += half
        xc = self._node(c0, c1, offset, u, genie, errors).astype(bool)
        d0, d1 = _normalize(np.where(xc, a1, a0) * b0, np.where(xc, a0, a1) * b1)
        self.node_evaluations += half
        xd = self._node(d0, d1, offset + half, u, genie, errors)
        x = np.empty((p0.shape[0], size), dtype=np.uint8)
        x[:, 0::2] = xc ^ xd
        x[:, 1::2] = xd
        return x


def _normalize(q0, q1):
    # A zero pair means the decided prefix contradicts the outputs. It stays
    # (0, 0) so every later decision sees 0/0, a tie, like the exact posterior.
    s = q0 + q1
    s = np.where(s > 0, s, 1.0)
    return q0 / s, q1 / s


def decode_sc(spec: CodeSpec, channel: Channel, received, allow_mismatch: bool = False) -> np.ndarray:
    return SCDecoder(spec, channel, allow_mismatch).decode(received)


def decode_sc_genie(spec: CodeSpec, channel: Channel, received, true_message, allow_mismatch: bool = False) -> GenieStats:
    """Genie-aided pass; ``true_message`` holds the unfrozen bits."""
    true_u = scatter_message(spec, true_message)
    return SCDecoder(spec, channel, allow_mismatch).decode_genie(received, true_u)

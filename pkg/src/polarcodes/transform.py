"""The minus/plus channel transforms and their iteration along index paths.

Index convention: the subchannel ``W_n^(i)`` is obtained from ``W`` by
applying one transform per bit of ``i``, most significant bit first, with a
0 bit selecting MINUS and a 1 bit selecting PLUS. This is the unrolling of
``W_{n+1}^(i) = (W_n^(i // 2))^{- if i even else +}``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .channel import Channel, _unchecked
from .errors import InvalidParameterError, SizeLimitError

DEFAULT_SIZE_CAP = 10**6


class TransformSign(enum.IntEnum):
    MINUS = 0
    PLUS = 1


@dataclass(frozen=True)
class IndexPath:
    """Subchannel address: level ``n`` and index ``i`` in ``[0, 2**n)``."""

    n: int
    i: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.i < (1 << self.n):
            raise InvalidParameterError(f"index {self.i} out of range for level {self.n}")

    def signs(self) -> list[TransformSign]:
        """Transforms in the order they are applied (MSB first)."""
        return [TransformSign((self.i >> b) & 1) for b in range(self.n - 1, -1, -1)]

    def __iter__(self) -> Iterator[TransformSign]:
        return iter(self.signs())


def _check_cap(size: int, cap: int | None):
    if cap is not None and size > cap:
        raise SizeLimitError(f"transformed alphabet would have {size} symbols (cap {cap})")


def transform_minus(ch: Channel, size_cap: int | None = DEFAULT_SIZE_CAP) -> Channel:
    """``W^-(y1, y2 | x1) = 1/2 sum_x2 W(y1 | x1 ^ x2) W(y2 | x2)``.

    Output symbol ``(y1, y2)`` has index ``y1 * |Y| + y2``.
    """
    q = ch.output_size
    _check_cap(q * q, size_cap)
    w0, w1 = ch.prob
    row0 = 0.5 * (np.outer(w0, w0) + np.outer(w1, w1))
    row1 = 0.5 * (np.outer(w1, w0) + np.outer(w0, w1))
    perm = None
    if ch.symmetry_perm is not None:
        # mirror y1 only; x1 reaches the outputs through y1 alone
        s = ch.symmetry_perm
        perm = (s[:, None] * q + np.arange(q)[None, :]).ravel()
    return _unchecked(np.vstack([row0.ravel(), row1.ravel()]), perm)


def transform_plus(ch: Channel, size_cap: int | None = DEFAULT_SIZE_CAP) -> Channel:
    """``W^+(y1, y2, x1 | x2) = 1/2 W(y1 | x1 ^ x2) W(y2 | x2)``.

    Output symbol ``(x1, y1, y2)`` has index ``x1 * |Y|**2 + y1 * |Y| + y2``.
    """
    q = ch.output_size
    _check_cap(2 * q * q, size_cap)
    w0, w1 = ch.prob
    # x2 = 0: x1 = 0 block uses W(y1|0), x1 = 1 block uses W(y1|1)
    row0 = 0.5 * np.concatenate([np.outer(w0, w0).ravel(), np.outer(w1, w0).ravel()])
    row1 = 0.5 * np.concatenate([np.outer(w1, w1).ravel(), np.outer(w0, w1).ravel()])
    perm = None
    if ch.symmetry_perm is not None:
        # (y1, y2, x1) -> (y1, sigma y2, x1 ^ 1)
        s = ch.symmetry_perm
        base = (np.arange(q)[:, None] * q + s[None, :]).ravel()
        perm = np.concatenate([base + q * q, base])
    return _unchecked(np.vstack([row0, row1]), perm)


def transform(ch: Channel, sign: TransformSign, size_cap: int | None = DEFAULT_SIZE_CAP) -> Channel:
    if sign == TransformSign.MINUS:
        return transform_minus(ch, size_cap)
    return transform_plus(ch, size_cap)


def evolve_path(
    ch: Channel,
    path: IndexPath,
    binner: Callable[[Channel], Channel] | None = None,
    size_cap: int | None = DEFAULT_SIZE_CAP,
) -> Channel:
    """Return ``W_n^(i)``, or its degraded estimate when ``binner`` is given.

    With a binner the channel is re-binned after every transform, which is
    what keeps the alphabet bounded.
    """
    out = ch
    for sign in path:
        out = transform(out, sign, size_cap)
        if binner is not None:
            out = binner(out)
    return out


def bec_minus(z):
    return 2.0 * z - z * z


def bec_plus(z):
    return z * z


def bec_evolve(z: float, path: IndexPath) -> float:
    """Exact Bhattacharyya parameter of a BEC subchannel."""
    if not 0.0 <= z <= 1.0:
        raise InvalidParameterError(f"z must lie in [0, 1], got {z}")
    for sign in path:
        z = bec_plus(z) if sign == TransformSign.PLUS else bec_minus(z)
    return z


def bec_all(z: float, n: int) -> np.ndarray:
    """Exact BEC parameters of all ``2**n`` subchannels, in index order."""
    if not 0.0 <= z <= 1.0:
        raise InvalidParameterError(f"z must lie in [0, 1], got {z}")
    cur = np.array([float(z)])
    for _ in range(n):
        nxt = np.empty(2 * cur.size)
        nxt[0::2] = bec_minus(cur)
        nxt[1::2] = bec_plus(cur)
        cur = nxt
    return cur


def z_bound_all(z0, n: int) -> np.ndarray:
    """Upper bounds on ``Z`` of every subchannel below a channel with ``Z <= z0``.

    Uses ``Z(W^+) = Z^2`` and ``Z(W^-) <= 2Z - Z^2``; both maps are
    increasing on ``[0, 1]``, so the bound carries through every level.
    """
    return bec_all(min(1.0, float(z0)), n)

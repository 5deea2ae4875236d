"""Output-symbol binning and iterated subchannel estimation.

Binning merges output symbols whose input posterior ``p(0|y)`` falls into the
same cell ``[j/k, (j+1)/k)``; symbols with posterior exactly 1 get their own
cell ``k``. The merged channel is a degraded version of the original, so its
entropy can only go up, by at most ``2 lg(k) / k``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import Channel, _unchecked, bhattacharyya, entropy
from .errors import BudgetExceededError, InvalidParameterError
from .transform import transform_minus, transform_plus

DEFAULT_BINS = 256
DEFAULT_WORK_BUDGET = 10**10
STATS_SCHEMA = "subchannel-stats/1"


@dataclass(frozen=True)
class BinningConfig:
    bin_count: int = DEFAULT_BINS

    def __post_init__(self):
        if int(self.bin_count) != self.bin_count or self.bin_count < 2:
            raise InvalidParameterError(f"bin count must be an integer >= 2, got {self.bin_count}")

    @property
    def entropy_slack(self) -> float:
        """Worst-case entropy increase of one binning step."""
        k = self.bin_count
        return 2.0 * math.log2(k) / k


def bin_channel(ch: Channel, cfg: BinningConfig | int) -> Channel:
    """Merge outputs by posterior cell; the result has at most ``k + 1`` symbols.

    Symbols of zero total mass are dropped and empty cells are pruned, so
    output symbols are the occupied cells in increasing posterior order.
    """
    k = cfg.bin_count if isinstance(cfg, BinningConfig) else BinningConfig(cfg).bin_count
    w0, w1 = ch.prob
    py = 0.5 * (w0 + w1)
    keep = py > 0
    w0, w1, py = w0[keep], w1[keep], py[keep]
    post = 0.5 * w0 / py
    cell = np.minimum(np.floor(k * post).astype(np.int64), k)
    m0 = np.bincount(cell, weights=w0, minlength=k + 1)
    m1 = np.bincount(cell, weights=w1, minlength=k + 1)
    used = (m0 + m1) > 0
    return _unchecked(np.vstack([m0[used], m1[used]]))


@dataclass
class SubchannelStats:
    """Estimated entropy and Bhattacharyya parameter for every index at level ``n``."""

    n: int
    h_hat: np.ndarray
    z_hat: np.ndarray
    bin_count: int | None = None  # None means exact values

    def __post_init__(self):
        self.h_hat = np.asarray(self.h_hat, dtype=float)
        self.z_hat = np.asarray(self.z_hat, dtype=float)
        if self.h_hat.shape != (1 << self.n,) or self.z_hat.shape != (1 << self.n,):
            raise InvalidParameterError("stats arrays must have length 2**n")

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def z_from_entropy(self) -> np.ndarray:
        """``sqrt(H_hat)``, an upper bound on the true ``Z`` of each subchannel."""
        return np.sqrt(np.clip(self.h_hat, 0.0, 1.0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema: {STATS_SCHEMA}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "H_hat", "Z_hat"])
        for i, (h, z) in enumerate(zip(self.h_hat.tolist(), self.z_hat.tolist())):
            w.writerow([i, repr(h), repr(z)])
        return buf.getvalue()

    def write_csv(self, path):
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    @classmethod
    def from_csv(cls, text: str, bin_count: int | None = None) -> "SubchannelStats":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
        if not rows or rows[0] != ["index", "H_hat", "Z_hat"]:
            raise InvalidParameterError("stats CSV must start with header index,H_hat,Z_hat")
        body = rows[1:]
        idx = [int(r[0]) for r in body]
        if idx != list(range(len(body))) or len(body) & (len(body) - 1):
            raise InvalidParameterError("stats CSV must list indices 0..2**n-1 in order")
        n = len(body).bit_length() - 1
        return cls(n, [float(r[1]) for r in body], [float(r[2]) for r in body], bin_count)


def _cost(ch: Channel) -> int:
    q = ch.output_size
    return 3 * q * q


def estimate_all_subchannels(
    ch: Channel,
    n: int,
    cfg: BinningConfig | None = None,
    work_budget: int | None = DEFAULT_WORK_BUDGET,
) -> SubchannelStats:
    """Estimate ``H`` and ``Z`` of all ``2**n`` subchannels by iterated binning.

    The base channel is binned first; then, level by level, every channel is
    replaced by the binned versions of its minus and plus transforms. Only one
    level of tables is held in memory. ``work_budget`` caps the total number of
    transformed table entries.
    """
    cfg = cfg or BinningConfig()
    if n < 0:
        raise InvalidParameterError("level must be non-negative")
    level = [bin_channel(ch, cfg)]
    work = 0
    for lvl in range(n):
        step = sum(_cost(c) for c in level)
        if work_budget is not None and work + step > work_budget:
            raise BudgetExceededError(
                f"estimation budget of {work_budget} exceeded while expanding level {lvl}", level=lvl
            )
        work += step
        nxt = []
        for c in level:
            nxt.append(bin_channel(transform_minus(c, None), cfg))
            nxt.append(bin_channel(transform_plus(c, None), cfg))
        level = nxt
    h = np.array([entropy(c) for c in level])
    z = np.array([bhattacharyya(c) for c in level])
    return SubchannelStats(n, np.clip(h, 0.0, 1.0), np.clip(z, 0.0, 1.0), cfg.bin_count)


def telescoped_entropy_slack(n: int, k: int) -> float:
    """Upper bound on ``sum_i H_hat[i] - 2**n H(W)`` for the sweep above.

    Counts one binning of the base channel plus one per transform.
    """
    step = 2.0 * math.log2(k) / k
    return step * ((1 << n) + (1 << (n + 1)) - 2)

"""Frozen-set selection.

Three constructions are provided:

* ``construct_by_sort`` keeps the indices with the smallest estimated ``Z``.
* ``construct_two_step`` keeps indices whose first ``m`` transforms reach a
  roughly polarized channel (estimated entropy at most ``3 rho**m``) and whose
  remaining transforms contain enough PLUS steps in every block.
* ``construct_bec_exact`` runs the sort rule on exact erasure-channel values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import Channel, bhattacharyya
from .degrade import BinningConfig, SubchannelStats, estimate_all_subchannels
from .errors import InvalidParameterError
from .transform import bec_all, z_bound_all


@dataclass(frozen=True)
class CodeSpec:
    """A polar code of length ``2**n`` with all-zero frozen bits."""

    n: int
    frozen: tuple[int, ...]
    mode: str = "sort"
    z_bound: float = float("nan")
    channel: str | None = None

    def __post_init__(self):
        frozen = tuple(sorted(int(i) for i in self.frozen))
        N = 1 << self.n
        if len(set(frozen)) != len(frozen):
            raise InvalidParameterError("frozen indices must be unique")
        if frozen and (frozen[0] < 0 or frozen[-1] >= N):
            raise InvalidParameterError(f"frozen indices must lie in [0, {N})")
        object.__setattr__(self, "frozen", frozen)

    @property
    def length(self) -> int:
        return 1 << self.n

    @property
    def dimension(self) -> int:
        return self.length - len(self.frozen)

    @property
    def rate(self) -> float:
        return self.dimension / self.length

    @property
    def frozen_mask(self) -> np.ndarray:
        mask = np.zeros(self.length, dtype=bool)
        mask[list(self.frozen)] = True
        return mask

    @property
    def info_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.frozen_mask)

    def to_text(self) -> str:
        lines = [
            f"n={self.n}",
            "frozen=" + ",".join(str(i) for i in self.frozen),
            f"mode={self.mode}",
            f"z_bound={self.z_bound!r}",
        ]
        if self.channel:
            lines.append(f"channel={self.channel}")
        return "\n".join(lines) + "\n"

    def write(self, path):
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def from_text(cls, text: str) -> "CodeSpec":
        fields: dict[str, str] = {}
        for ln in text.splitlines():
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            key, sep, value = ln.partition("=")
            if not sep:
                raise InvalidParameterError(f"malformed code spec line: {ln!r}")
            fields[key.strip()] = value.strip()
        try:
            n = int(fields["n"])
            frozen = [int(t) for t in fields.get("frozen", "").split(",") if t.strip()]
            z = float(fields.get("z_bound", "nan"))
        except (KeyError, ValueError) as exc:
            raise InvalidParameterError(f"bad code spec: {exc}") from None
        return cls(n, tuple(frozen), fields.get("mode", "sort"), z, fields.get("channel"))

    @classmethod
    def read(cls, path) -> "CodeSpec":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def _dimension(n: int, target_rate: float) -> int:
    if not 0.0 < target_rate <= 1.0:
        raise InvalidParameterError(f"target rate must lie in (0, 1], got {target_rate}")
    # tolerate float noise such as 0.3 * 1024 = 307.20000000000005
    return math.ceil(round((1 << n) * target_rate, 9))


def _select_by_z(z: np.ndarray, n: int, target_rate: float, mode: str, channel=None) -> CodeSpec:
    N = 1 << n
    K = _dimension(n, target_rate)
    order = np.argsort(z, kind="stable")  # ties go to the smaller index
    info = np.sort(order[:K])
    frozen = np.setdiff1d(np.arange(N), info)
    return CodeSpec(n, tuple(frozen.tolist()), mode, float(z[info].sum()), channel)


def construct_by_sort(stats: SubchannelStats, target_rate: float, channel: str | None = None) -> CodeSpec:
    """Unfreeze the ``ceil(N * rate)`` indices with the smallest ``Z_hat``."""
    if stats is None or stats.size == 0:
        raise InvalidParameterError("empty subchannel statistics")
    return _select_by_z(stats.z_hat, stats.n, target_rate, "sort", channel)


def bec_exact_stats(p: float, n: int) -> SubchannelStats:
    z = bec_all(p, n)
    # for an erasure channel H = Z
    return SubchannelStats(n, z.copy(), z)


def construct_bec_exact(p: float, n: int, target_rate: float) -> CodeSpec:
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"erasure probability must lie in [0, 1], got {p}")
    return _select_by_z(bec_all(p, n), n, target_rate, "bec-exact", f"bec:{p:g}")


# ---------------------------------------------------------------------------
# two-step construction


@dataclass(frozen=True)
class TheoryParams:
    """Constants of the rough + fine construction.

    Give ``beta`` and ``rho`` plus exactly one of ``m`` (rough levels) or
    ``delta``; the other is derived once the total level count is known.
    """

    rho: float
    beta: float
    delta: float | None = None
    m: int | None = None

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise InvalidParameterError("rho must lie in (0, 1)")
        if not 0.0 < self.beta < 0.5:
            raise InvalidParameterError("beta must lie in (0, 1/2)")
        if (self.delta is None) == (self.m is None):
            raise InvalidParameterError("give exactly one of delta or m")
        if self.delta is not None and not 0.0 < self.delta < self.beta:
            raise InvalidParameterError("delta must lie in (0, beta)")

    def resolve(self, n_total: int) -> "ResolvedParams":
        if self.m is not None:
            m = int(self.m)
            if not 0 < m < n_total:
                raise InvalidParameterError(f"need 0 < m < n, got m={m}, n={n_total}")
            gamma = (n_total - m) / m
            delta = gamma * self.beta / (1.0 + gamma)
        else:
            delta = float(self.delta)
            gamma = delta / (self.beta - delta)
            m = int(round(n_total / (1.0 + gamma)))
            if not 0 < m < n_total:
                raise InvalidParameterError(
                    f"delta={delta} gives m={m} rough levels out of n={n_total}; need 0 < m < n"
                )
        n_fine = n_total - m
        c_rho = math.ceil(n_fine / (2 * m * math.log2(2.0 / self.rho)))
        return ResolvedParams(self.rho, self.beta, delta, gamma, m, n_fine, c_rho)


@dataclass(frozen=True)
class ResolvedParams:
    rho: float
    beta: float
    delta: float
    gamma: float
    m: int
    n_fine: int
    c_rho: int
    blocks: tuple[tuple[int, int], ...] = field(init=False)
    min_ones: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        # block j covers fine steps [floor(j L / c), floor((j+1) L / c))
        L, c = self.n_fine, self.c_rho
        bounds = [(j * L) // c for j in range(c + 1)]
        blocks = tuple((bounds[j], bounds[j + 1]) for j in range(c))
        if any(hi - lo < 1 for lo, hi in blocks):
            raise InvalidParameterError(
                f"{L} fine levels cannot be split into {c} non-empty blocks; increase n or rho"
            )
        object.__setattr__(self, "blocks", blocks)
        # at least beta * block_length ones, rounded up
        object.__setattr__(self, "min_ones", tuple(math.ceil(self.beta * (hi - lo) - 1e-12) for lo, hi in blocks))

    @property
    def rough_threshold(self) -> float:
        return 3.0 * self.rho**self.m

    @property
    def theory_bin_count(self) -> float:
        """``(2/rho)**(2m)``, the bin count the existence proof asks for."""
        return (2.0 / self.rho) ** (2 * self.m)


def fine_steps(j: np.ndarray | int, n_fine: int) -> np.ndarray:
    """PLUS/MINUS choices of the fine part, in application order.

    Column ``t`` holds bit ``n_fine - 1 - t`` of ``j``.
    """
    j = np.atleast_1d(np.asarray(j, dtype=np.int64))
    shifts = np.arange(n_fine - 1, -1, -1, dtype=np.int64)
    return (j[:, None] >> shifts[None, :]) & 1


def fine_good_mask(params: ResolvedParams) -> np.ndarray:
    """Membership of every fine index ``j < 2**n_fine`` in the block-ones set."""
    steps = fine_steps(np.arange(1 << params.n_fine), params.n_fine)
    ok = np.ones(steps.shape[0], dtype=bool)
    for (lo, hi), need in zip(params.blocks, params.min_ones):
        ok &= steps[:, lo:hi].sum(axis=1) >= need
    return ok


def rough_good_mask(stats: SubchannelStats, params: ResolvedParams) -> np.ndarray:
    return stats.h_hat <= params.rough_threshold


def construct_two_step(
    ch: Channel,
    n: int,
    params: TheoryParams,
    cfg: BinningConfig | None = None,
    stats: SubchannelStats | None = None,
) -> CodeSpec:
    """Rough polarization by estimation, fine polarization by bit counting.

    Index ``i`` is unfrozen iff its first ``m`` transforms (the top ``m`` bits
    under the MSB-first convention) land on a channel with estimated entropy at
    most ``3 rho**m``, and its last ``n - m`` transforms (the low bits) lie in the
    block-ones set. ``stats`` may supply precomputed level-``m`` estimates.

    ``z_bound`` is a rigorous bound: each kept rough channel starts from
    ``sqrt(H_hat) >= Z`` and is pushed through the ``Z`` evolution bounds.
    """
    rp = params.resolve(n)
    if stats is None:
        stats = estimate_all_subchannels(ch, rp.m, cfg)
    elif stats.n != rp.m:
        raise InvalidParameterError(f"stats are for level {stats.n}, need level m={rp.m}")
    rough = rough_good_mask(stats, rp)
    fine = fine_good_mask(rp)
    keep = (rough[:, None] & fine[None, :]).ravel()  # index r * 2**n_fine + j
    info = np.flatnonzero(keep)
    bound = float(two_step_z_bounds(stats, rp)[info].sum())
    frozen = np.setdiff1d(np.arange(1 << n), info)
    return CodeSpec(n, tuple(frozen.tolist()), "two-step", bound, ch.name)


def two_step_z_bounds(stats: SubchannelStats, params: ResolvedParams) -> np.ndarray:
    """Upper bounds on ``Z`` for all ``2**n`` indices from level-``m`` estimates.

    Each rough channel starts at ``sqrt(H_hat)`` and follows ``z**2`` (PLUS)
    and ``2z - z**2`` (MINUS) through the fine levels. Valid only where
    ``H_hat`` bounds the true entropy from above, as binning guarantees.
    """
    z0 = stats.z_from_entropy
    return np.concatenate([z_bound_all(z, params.n_fine) for z in z0])


def sort_stats_for(ch: Channel, n: int, cfg: BinningConfig | None = None) -> SubchannelStats:
    """Exact stats for erasure channels, binned estimates otherwise."""
    if is_erasure_channel(ch):
        return bec_exact_stats(bhattacharyya(ch), n)
    return estimate_all_subchannels(ch, n, cfg)


def is_erasure_channel(ch: Channel, tol: float = 1e-12) -> bool:
    """True when every output is either a perfect verdict or a full erasure."""
    w0, w1 = ch.prob
    tie = np.abs(w0 - w1) <= tol
    sure = (w0 <= tol) | (w1 <= tol)
    return bool(np.all(tie | sure))

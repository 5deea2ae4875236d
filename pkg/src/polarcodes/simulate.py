"""Monte Carlo block-error simulation.

Trial ``t`` under seed ``s`` draws all of its randomness from a Philox stream
with key ``s`` and counter ``(0, 0, t, 0)``, so any trial can be replayed on
its own and the totals do not depend on how trials are split across workers.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import binomtest

from .channel import Channel, sample_outputs
from .codec import SCDecoder, encode
from .construct import CodeSpec
from .errors import InvalidParameterError

REPORT_SCHEMA = "sim-report/1"
DEFAULT_CHUNK = 2000


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, trial, 0]))


def draw_trial(spec: CodeSpec, channel: Channel, seed: int, trial: int):
    """Message bits and received symbols of one trial."""
    rng = trial_rng(seed, trial)
    msg = rng.integers(0, 2, spec.dimension, dtype=np.uint8)
    y = sample_outputs(channel, encode(spec, msg), rng)
    return msg, y


@dataclass
class SimReport:
    trials: int
    block_errors: int
    bit_errors: int
    bler: float
    bler_ci95: tuple[float, float]
    ber: float
    z_bound: float
    bound_sigma: float  # binomial std of the estimate if BLER equalled z_bound
    seed: int
    code_n: int
    code_rate: float
    channel: str | None
    mismatched: bool = False
    wall_time: float | None = None
    schema: str = field(default=REPORT_SCHEMA)

    @property
    def within_bound(self) -> bool:
        """Measured BLER at most ``z_bound + 3 sigma``."""
        return self.bler <= self.z_bound + 3.0 * self.bound_sigma

    def to_json(self) -> str:
        d = asdict(self)
        if d["wall_time"] is None:
            del d["wall_time"]
        d["bler_ci95"] = list(d["bler_ci95"])
        return json.dumps(d, sort_keys=True, indent=2) + "\n"


def wilson_interval(errors: int, trials: int) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    ci = binomtest(errors, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return (float(ci.low), float(ci.high))


def _run_chunk(args) -> tuple[int, int]:
    spec, channel, seed, start, stop, allow_mismatch = args
    if stop <= start:
        return 0, 0
    dec = SCDecoder(spec, channel, allow_mismatch)
    msgs, ys = zip(*(draw_trial(spec, channel, seed, t) for t in range(start, stop)))
    msgs = np.stack(msgs)
    decoded = dec.decode(np.stack(ys))
    wrong = decoded != msgs
    return int(wrong.any(axis=1).sum()), int(wrong.sum())


def simulate(
    spec: CodeSpec,
    channel: Channel,
    trials: int,
    seed: int = 0,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
    allow_mismatch: bool = False,
    record_time: bool = False,
) -> SimReport:
    """Encode random messages, pass them through ``channel`` and SC-decode.

    Chunk boundaries depend only on ``chunk``, never on ``workers``.
    """
    if trials < 0:
        raise InvalidParameterError("trial count must be non-negative")
    if workers < 1 or chunk < 1:
        raise InvalidParameterError("workers and chunk must be positive")
    # fail fast on a mismatched channel before spawning anything
    dec = SCDecoder(spec, channel, allow_mismatch)
    t0 = time.perf_counter()
    jobs = [(spec, channel, seed, s, min(s + chunk, trials), allow_mismatch) for s in range(0, trials, chunk)]
    if workers == 1 or len(jobs) <= 1:
        results = [_run_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, jobs))
    block = sum(r[0] for r in results)
    bits = sum(r[1] for r in results)
    z = float(spec.z_bound)
    zc = min(max(z, 0.0), 1.0) if math.isfinite(z) else float("nan")
    sigma = math.sqrt(zc * (1 - zc) / trials) if trials else 0.0
    return SimReport(
        trials=trials,
        block_errors=block,
        bit_errors=bits,
        bler=block / trials if trials else 0.0,
        bler_ci95=wilson_interval(block, trials),
        ber=bits / (trials * spec.dimension) if trials and spec.dimension else 0.0,
        z_bound=z,
        bound_sigma=sigma,
        seed=seed,
        code_n=spec.n,
        code_rate=spec.rate,
        channel=channel.name,
        mismatched=dec.mismatched,
        wall_time=time.perf_counter() - t0 if record_time else None,
    )


def genie_error_rates(spec: CodeSpec, channel: Channel, trials: int, seed: int = 0, chunk: int = DEFAULT_CHUNK):
    """Per-index genie-aided error frequencies over ``trials`` random messages."""
    dec = SCDecoder(spec, channel, allow_mismatch=True)
    counts = np.zeros(spec.length, dtype=np.int64)
    for start in range(0, trials, chunk):
        stop = min(start + chunk, trials)
        msgs, ys = zip(*(draw_trial(spec, channel, seed, t) for t in range(start, stop)))
        u = np.zeros((stop - start, spec.length), dtype=np.uint8)
        u[:, spec.info_indices] = np.stack(msgs)
        counts += dec.decode_genie(np.stack(ys), u).error_counts
    return counts / max(trials, 1)

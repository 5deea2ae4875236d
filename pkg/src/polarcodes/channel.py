"""Binary-input channels with a finite output alphabet.

A channel is stored as a ``2 x |Y|`` table of transition probabilities
``W(y|x)``. The information functionals (entropy, Bhattacharyya parameter,
ML error) are computed for a uniform input bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError

ROW_TOL = 1e-12
SYMMETRY_TOL = 1e-12


def binary_entropy(p):
    """Binary entropy in bits, with ``0 log 0 = 0``. Works elementwise."""
    p = np.asarray(p, dtype=float)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.where(p > 0, p * np.log2(p), 0.0) - np.where(q > 0, q * np.log2(q), 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class Channel:
    """Binary-input channel ``W: {0,1} -> Y`` as a transition table.

    Parameters
    ----------
    prob : array_like, shape (2, |Y|)
        ``prob[x, y] = W(y|x)``.
    symmetry_perm : array_like of int, optional
        Involution ``sigma`` on outputs with ``W(y|0) = W(sigma(y)|1)``.
    name : str, optional
        Short label such as ``"bec:0.5"``; used to flag mismatched decoding.
    """

    prob: np.ndarray
    symmetry_perm: np.ndarray | None = None
    name: str | None = None
    _checked: bool = field(default=True, repr=False)

    def __post_init__(self):
        prob = np.array(self.prob, dtype=float)
        if prob.ndim != 2 or prob.shape[0] != 2 or prob.shape[1] < 1:
            raise InvalidParameterError(f"transition table must have shape (2, |Y|), got {prob.shape}")
        prob.setflags(write=False)
        object.__setattr__(self, "prob", prob)
        if self.symmetry_perm is not None:
            perm = np.array(self.symmetry_perm, dtype=np.int64)
            perm.setflags(write=False)
            object.__setattr__(self, "symmetry_perm", perm)
        if self._checked:
            problems = validate(self)
            if problems:
                raise InvalidParameterError("invalid channel: " + "; ".join(str(v) for v in problems))

    @property
    def output_size(self) -> int:
        return self.prob.shape[1]

    def __repr__(self):
        label = self.name or "Channel"
        return f"<{label} |Y|={self.output_size}>"


def _unchecked(prob, symmetry_perm=None, name=None) -> Channel:
    # internal fast path for tables built by trusted transforms
    return Channel(prob, symmetry_perm, name, _checked=False)


@dataclass(frozen=True)
class ChannelMetrics:
    entropy: float
    mutual_info: float
    bhattacharyya: float
    ml_error: float
    symmetric_entropy: float


@dataclass(frozen=True)
class Violation:
    kind: str  # "shape", "negative", "row_sum", "permutation", "asymmetric"
    magnitude: float
    detail: str = ""

    def __str__(self):
        return f"{self.kind} ({self.magnitude:.3g}){': ' + self.detail if self.detail else ''}"


def validate(ch, tol: float = ROW_TOL) -> list[Violation]:
    """Report problems with a channel table without raising.

    Accepts a :class:`Channel` or a raw ``(prob, symmetry_perm)`` pair.
    """
    if isinstance(ch, Channel):
        prob, perm = ch.prob, ch.symmetry_perm
    else:
        prob, perm = ch
        prob = np.asarray(prob, dtype=float)
    out: list[Violation] = []
    if prob.ndim != 2 or prob.shape[0] != 2:
        return [Violation("shape", float("nan"), f"shape {prob.shape}")]
    neg = float(-prob.min()) if prob.size else 0.0
    if neg > 0:
        out.append(Violation("negative", neg, "negative transition probability"))
    for x in (0, 1):
        drift = abs(float(prob[x].sum()) - 1.0)
        if drift > tol:
            out.append(Violation("row_sum", drift, f"row {x}"))
    if perm is not None:
        perm = np.asarray(perm)
        size = prob.shape[1]
        if perm.shape != (size,) or sorted(perm.tolist()) != list(range(size)):
            out.append(Violation("permutation", float("nan"), "sigma is not a permutation of the outputs"))
        elif np.any(perm[perm] != np.arange(size)):
            out.append(Violation("permutation", float("nan"), "sigma is not an involution"))
        else:
            gap = float(np.max(np.abs(prob[0] - prob[1, perm])))
            if gap > SYMMETRY_TOL:
                out.append(Violation("asymmetric", gap, "W(y|0) != W(sigma(y)|1)"))
    return out


def symmetry_violation(ch: Channel, perm=None) -> float:
    """``max_y |W(y|0) - W(sigma(y)|1)|`` for the given or stored sigma."""
    perm = ch.symmetry_perm if perm is None else np.asarray(perm)
    if perm is None:
        raise InvalidParameterError("channel carries no symmetry permutation")
    return float(np.max(np.abs(ch.prob[0] - ch.prob[1, perm])))


def renormalize(prob) -> np.ndarray:
    """Clip negatives and rescale each row to sum to one."""
    prob = np.clip(np.asarray(prob, dtype=float), 0.0, None)
    sums = prob.sum(axis=1, keepdims=True)
    if np.any(sums <= 0):
        raise InvalidParameterError("cannot renormalize an all-zero row")
    return prob / sums


def make_bec(erasure_prob: float) -> Channel:
    """Binary erasure channel with outputs ``(0, erasure, 1)``."""
    p = float(erasure_prob)
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"erasure probability must lie in [0, 1], got {p}")
    prob = [[1.0 - p, p, 0.0], [0.0, p, 1.0 - p]]
    return Channel(prob, [2, 1, 0], name=f"bec:{p:g}")


def make_bsc(crossover: float) -> Channel:
    """Binary symmetric channel with outputs ``(0, 1)``."""
    p = float(crossover)
    if not 0.0 <= p <= 0.5:
        raise InvalidParameterError(f"crossover probability must lie in [0, 1/2], got {p}")
    return Channel([[1.0 - p, p], [p, 1.0 - p]], [1, 0], name=f"bsc:{p:g}")


def entropy(ch: Channel) -> float:
    """``H(X|Y)`` for uniform ``X``."""
    w0, w1 = ch.prob
    py = 0.5 * (w0 + w1)
    mask = py > 0
    post = 0.5 * w0[mask] / py[mask]
    return float(np.dot(py[mask], binary_entropy(post)))


def bhattacharyya(ch: Channel) -> float:
    return float(np.sqrt(ch.prob[0] * ch.prob[1]).sum())


def ml_error(ch: Channel) -> float:
    # a tie counts as an error, so both inputs pay for it
    w0, w1 = ch.prob
    return float(0.5 * (w0[w0 <= w1].sum() + w1[w1 <= w0].sum()))


def metrics(ch: Channel) -> ChannelMetrics:
    h = entropy(ch)
    return ChannelMetrics(
        entropy=h,
        mutual_info=1.0 - h,
        bhattacharyya=bhattacharyya(ch),
        ml_error=ml_error(ch),
        symmetric_entropy=h * (1.0 - h),
    )


def relabel(ch: Channel, order) -> Channel:
    """Permute output labels: new symbol ``j`` is old symbol ``order[j]``."""
    order = np.asarray(order)
    perm = None
    if ch.symmetry_perm is not None:
        inv = np.empty_like(order)
        inv[order] = np.arange(order.size)
        perm = inv[ch.symmetry_perm[order]]
    return Channel(ch.prob[:, order], perm, ch.name)


def sample_output(ch: Channel, input_bit: int, rng: np.random.Generator) -> int:
    """Draw one output symbol for ``input_bit``."""
    return int(sample_outputs(ch, np.array([input_bit]), rng)[0])


def sample_outputs(ch: Channel, bits, rng: np.random.Generator) -> np.ndarray:
    """Draw output symbols for an array of input bits (any shape).

    Uses one uniform draw per symbol and inverse-CDF lookup, so the result is a
    deterministic function of the generator state.
    """
    bits = np.asarray(bits)
    u = rng.random(bits.shape)
    cdf = np.cumsum(ch.prob, axis=1)
    cdf[:, -1] = np.inf  # guard against row sums a hair below 1
    out = np.empty(bits.shape, dtype=np.int64)
    for x in (0, 1):
        sel = bits == x
        out[sel] = np.searchsorted(cdf[x], u[sel], side="right")
    return out


def hard_decision_symbols(ch: Channel) -> np.ndarray:
    """Most likely output symbol for each input, as a length-2 array."""
    return np.argmax(ch.prob, axis=1)


def random_symmetric_channel(rng: np.random.Generator, sizes=(2, 4, 6, 8)) -> Channel:
    """Random symmetric channel from an output size drawn from ``sizes``.

    Row 0 is a random distribution; row 1 is its mirror through a random
    involution ``sigma`` with at least one swapped pair. Fixed points of
    ``sigma`` (erasure-like symbols) are allowed.
    """
    size = int(rng.choice(sizes))
    return _random_symmetric(rng, size)


def _random_symmetric(rng: np.random.Generator, size: int) -> Channel:
    labels = rng.permutation(size)
    # at least one swapped pair; the identity involution gives a useless channel
    n_pairs = int(rng.integers(1, size // 2 + 1))
    perm = np.arange(size)
    for j in range(n_pairs):
        a, b = labels[2 * j], labels[2 * j + 1]
        perm[a], perm[b] = b, a
    # heavy-tailed weights so near-deterministic symbols show up too
    row0 = rng.dirichlet(np.full(size, 0.5))
    row1 = row0[perm]
    prob = renormalize(np.vstack([row0, row1]))
    # averaging with the mirror keeps the symmetry exact after renormalization
    prob[1] = prob[0, perm]
    return Channel(prob, perm)


# ---------------------------------------------------------------------------
# text format


def parse_channel_text(text: str) -> Channel:
    """Parse the channel spec format.

    ::

        outputs: 3
        0.7 0.3 0
        0 0.3 0.7
        sigma: 2 1 0

    Blank lines and ``#`` comments are ignored. Numbers are read as exact
    decimals before conversion to floats.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    size = None
    rows: list[list[float]] = []
    sigma = None
    for ln in lines:
        key, sep, rest = ln.partition(":")
        key = key.strip().lower()
        if sep and key == "outputs":
            size = _parse_int(rest.strip())
        elif sep and key == "sigma":
            sigma = [_parse_int(tok) for tok in rest.replace(",", " ").split()]
        else:
            rows.append([_parse_decimal(tok) for tok in ln.replace(",", " ").split()])
    if size is None:
        raise InvalidParameterError("channel file lacks an 'outputs:' line")
    if len(rows) != 2 or any(len(r) != size for r in rows):
        raise InvalidParameterError(f"expected two rows of {size} probabilities")
    return Channel(rows, sigma)


def format_channel_text(ch: Channel) -> str:
    lines = [f"outputs: {ch.output_size}"]
    for row in ch.prob:
        lines.append(" ".join(repr(float(v)) for v in row))
    if ch.symmetry_perm is not None:
        lines.append("sigma: " + " ".join(str(int(v)) for v in ch.symmetry_perm))
    return "\n".join(lines) + "\n"


def load_channel(path) -> Channel:
    return parse_channel_text(Path(path).read_text(encoding="utf-8"))


def channel_from_arg(arg: str) -> Channel:
    """Resolve ``bec:p``, ``bsc:p`` or a path to a channel file."""
    kind, sep, value = arg.partition(":")
    if sep and kind.lower() in ("bec", "bsc"):
        try:
            p = float(_parse_decimal(value))
        except InvalidParameterError:
            raise InvalidParameterError(f"bad channel parameter in {arg!r}") from None
        return make_bec(p) if kind.lower() == "bec" else make_bsc(p)
    path = Path(arg)
    if not path.exists():
        raise InvalidParameterError(f"unknown channel {arg!r}: expected bec:p, bsc:p or a file")
    ch = load_channel(path)
    return Channel(ch.prob, ch.symmetry_perm, name=path.name)


def _parse_decimal(tok: str) -> float:
    try:
        d = Decimal(tok.strip())
    except InvalidOperation:
        raise InvalidParameterError(f"not a decimal number: {tok!r}") from None
    if not d.is_finite():
        raise InvalidParameterError(f"not a finite number: {tok!r}")
    return float(d)


def _parse_int(tok: str) -> int:
    try:
        return int(tok.strip())
    except ValueError:
        raise InvalidParameterError(f"not an integer: {tok!r}") from None

"""File framing for the codec commands.

A file holds a fixed header followed by a payload::

    magic     4 bytes   b"PLCW" (codewords) or b"PLRX" (received symbols)
    version   uint8
    payload   uint64    number of message bits carried
    N         uint32    code length
    K         uint32    code dimension
    blocks    uint32    number of codewords

All integers are little endian. Codeword bits are packed little endian (bit
``j`` of the stream is bit ``j % 8`` of byte ``j // 8``); received symbols are
``uint16`` little endian. The message is cut into ``K``-bit blocks, the last
one zero padded.
"""

from __future__ import annotations

import struct

import numpy as np

from .channel import Channel, hard_decision_symbols, sample_outputs
from .codec import SCDecoder, encode
from .construct import CodeSpec
from .errors import InvalidParameterError
from .simulate import trial_rng

HEADER = struct.Struct("<4sBQIII")
VERSION = 1
CODEWORD_MAGIC = b"PLCW"
RECEIVED_MAGIC = b"PLRX"


def pack_bits(bits) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little").tobytes()


def unpack_bits(data: bytes, count: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    if bits.size < count:
        raise InvalidParameterError(f"payload holds {bits.size} bits, need {count}")
    return bits[:count]


def _header(magic, payload_bits, spec: CodeSpec, blocks) -> bytes:
    return HEADER.pack(magic, VERSION, payload_bits, spec.length, spec.dimension, blocks)


def read_header(data: bytes):
    """``(magic, payload_bits, N, K, blocks, body)``; raises on a bad header."""
    if len(data) < HEADER.size:
        raise InvalidParameterError("file too short for a codec header")
    magic, version, payload, N, K, blocks = HEADER.unpack_from(data)
    if magic not in (CODEWORD_MAGIC, RECEIVED_MAGIC):
        raise InvalidParameterError(f"unknown file magic {magic!r}")
    if version != VERSION:
        raise InvalidParameterError(f"unsupported codec file version {version}")
    return magic, payload, N, K, blocks, data[HEADER.size :]


def _check_code(spec: CodeSpec, N, K, blocks, payload):
    if (N, K) != (spec.length, spec.dimension):
        raise InvalidParameterError(
            f"file was written for N={N}, K={K}; code has N={spec.length}, K={spec.dimension}"
        )
    if K == 0 or blocks != -(-payload // K):
        raise InvalidParameterError("block count does not match payload length")


def encode_file(spec: CodeSpec, message: bytes) -> bytes:
    """Frame and encode the bytes of ``message``."""
    K = spec.dimension
    if K == 0:
        raise InvalidParameterError("code has no information bits")
    bits = np.unpackbits(np.frombuffer(message, dtype=np.uint8), bitorder="little")
    blocks = -(-bits.size // K)
    padded = np.zeros(blocks * K, dtype=np.uint8)
    padded[: bits.size] = bits
    words = encode(spec, padded.reshape(blocks, K)) if blocks else np.zeros((0, spec.length), np.uint8)
    return _header(CODEWORD_MAGIC, bits.size, spec, blocks) + pack_bits(words.ravel())


def _codewords(spec: CodeSpec, data: bytes):
    magic, payload, N, K, blocks, body = read_header(data)
    if magic != CODEWORD_MAGIC:
        raise InvalidParameterError("expected a codeword file")
    _check_code(spec, N, K, blocks, payload)
    if len(body) != -(-(blocks * N) // 8):
        raise InvalidParameterError("codeword payload has the wrong length")
    return payload, unpack_bits(body, blocks * N).reshape(blocks, N)


def transmit_file(spec: CodeSpec, channel: Channel, data: bytes, seed: int = 0) -> bytes:
    """Pass every codeword through ``channel``; block ``b`` uses trial stream ``b``."""
    payload, words = _codewords(spec, data)
    if channel.output_size > 1 << 16:
        raise InvalidParameterError("received symbols are stored as uint16")
    out = np.empty(words.shape, dtype="<u2")
    for b, w in enumerate(words):
        out[b] = sample_outputs(channel, w, trial_rng(seed, b))
    return _header(RECEIVED_MAGIC, payload, spec, words.shape[0]) + out.tobytes()


def decode_file(spec: CodeSpec, channel: Channel, data: bytes, allow_mismatch: bool = False) -> bytes:
    """Recover the message bytes.

    A codeword file is read as if sent noiselessly: each bit becomes the
    channel's most likely output for that input.
    """
    magic, payload, N, K, blocks, body = read_header(data)
    if magic == CODEWORD_MAGIC:
        payload, words = _codewords(spec, data)
        y = hard_decision_symbols(channel)[words]
    else:
        _check_code(spec, N, K, blocks, payload)
        if len(body) != 2 * blocks * N:
            raise InvalidParameterError("received payload has the wrong length")
        y = np.frombuffer(body, dtype="<u2").astype(np.int64).reshape(blocks, N)
    if blocks == 0:
        return b""
    msg = SCDecoder(spec, channel, allow_mismatch).decode(y)
    bits = msg.ravel()[:payload]
    if payload % 8:
        raise InvalidParameterError("payload is not a whole number of bytes")
    return pack_bits(bits)

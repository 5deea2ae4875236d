import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from polarcodes import channel as chm
from polarcodes.codec import SCDecoder, decode_sc, decode_sc_genie, encode, polar_transform
from polarcodes.construct import CodeSpec, construct_bec_exact
from polarcodes.degrade import BinningConfig, estimate_all_subchannels
from polarcodes.errors import InvalidParameterError
from polarcodes.simulate import draw_trial
from polarcodes.transform import bec_all


def test_n1_base_case():
    for u0, u1 in itertools.product((0, 1), repeat=2):
        assert list(polar_transform([u0, u1])) == [u0 ^ u1, u1]


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_transform_matches_matrix_oracle(n):
    cols = oracles.encoder_matrix(n)
    for u in itertools.product((0, 1), repeat=1 << n):
        if n == 4 and sum(u) > 3:
            continue
        assert list(polar_transform(u)) == oracles.encode_with_matrix(cols, u)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10), st.data())
def test_linearity_and_involution(n, data):
    N = 1 << n
    u = np.array(data.draw(st.lists(st.integers(0, 1), min_size=N, max_size=N)), dtype=np.uint8)
    v = np.array(data.draw(st.lists(st.integers(0, 1), min_size=N, max_size=N)), dtype=np.uint8)
    assert np.array_equal(polar_transform(u ^ v), polar_transform(u) ^ polar_transform(v))
    assert np.array_equal(polar_transform(polar_transform(u)), u)


def test_bad_lengths():
    with pytest.raises(InvalidParameterError):
        polar_transform([0, 1, 1])
    spec = construct_bec_exact(0.5, 3, 0.5)
    with pytest.raises(InvalidParameterError):
        encode(spec, [0, 1, 1])
    with pytest.raises(InvalidParameterError):
        decode_sc(spec, chm.make_bec(0.5), np.zeros(4, dtype=int))
    with pytest.raises(InvalidParameterError):
        decode_sc(spec, chm.make_bec(0.5), np.full(8, 3))


def test_all_zero_message():
    spec = construct_bec_exact(0.5, 5, 0.5)
    assert not encode(spec, np.zeros(spec.dimension)).any()


def test_noiseless_round_trip(rng):
    spec = construct_bec_exact(0.0, 8, 0.5)
    ch = chm.make_bec(0.0)
    msgs = rng.integers(0, 2, (100, spec.dimension), dtype=np.uint8)
    y = chm.sample_outputs(ch, encode(spec, msgs), rng)
    assert np.array_equal(decode_sc(spec, ch, y), msgs)


def test_noiseless_rate_one_large_n(rng):
    # normalization drift would show up as wrong decisions here
    n = 16
    spec = CodeSpec(n, (), channel="bsc:0")
    ch = chm.make_bsc(0.0)
    msg = rng.integers(0, 2, 1 << n, dtype=np.uint8)
    y = chm.sample_outputs(ch, encode(spec, msg), rng)
    dec = SCDecoder(spec, ch)
    assert np.array_equal(dec.decode(y), msg)
    assert dec.node_evaluations == (1 << n) * (n + 1)


def test_single_and_batch_agree(rng):
    spec = construct_bec_exact(0.4, 6, 0.5)
    ch = chm.make_bec(0.4)
    y = rng.integers(0, 3, (20, 64))
    batch = decode_sc(spec, ch, y)
    for row, b in zip(y, batch):
        assert np.array_equal(decode_sc(spec, ch, row), b)


def test_frozen_positions_decode_to_zero(rng):
    spec = construct_bec_exact(0.5, 5, 0.3)
    u = SCDecoder(spec, chm.make_bec(0.5)).decode_full(rng.integers(0, 3, (50, 32)))
    assert not u[:, list(spec.frozen)].any()


def test_mismatch_needs_flag():
    spec = construct_bec_exact(0.5, 4, 0.5)
    with pytest.raises(InvalidParameterError):
        SCDecoder(spec, chm.make_bec(0.3))
    dec = SCDecoder(spec, chm.make_bec(0.3), allow_mismatch=True)
    assert dec.mismatched
    assert not SCDecoder(spec, chm.make_bec(0.5)).mismatched


def test_genie_noiseless():
    spec = construct_bec_exact(0.0, 5, 0.5)
    ch = chm.make_bec(0.0)
    msg = np.ones(spec.dimension, dtype=np.uint8)
    y = chm.sample_outputs(ch, encode(spec, msg), np.random.default_rng(0))
    g = decode_sc_genie(spec, ch, y, msg)
    assert g.error_counts.sum() == 0
    assert g.first_error[0] == -1


def _genie_rates(spec, ch, trials, seed):
    msgs, ys = zip(*(draw_trial(spec, ch, seed, t) for t in range(trials)))
    g = decode_sc_genie(spec, ch, np.stack(ys), np.stack(msgs), allow_mismatch=True)
    return g.error_rates


def test_genie_bec_rates_follow_exact_z():
    # rate-1 code so every index carries a uniform bit; a tie is decided 0,
    # which is wrong half the time, so the genie error rate is Z / 2
    n, trials = 6, 100_000
    spec = CodeSpec(n, (), channel="bec:0.5")
    ch = chm.make_bec(0.5)
    rates = _genie_rates(spec, ch, trials, seed=11)
    z = bec_all(0.5, n)
    sigma = np.sqrt(np.clip(z, 1e-12, 1) / 2 * (1 - z / 2) / trials)
    assert np.all(rates <= z + 3 * sigma)
    assert np.all(np.abs(rates - z / 2) <= 4.5 * sigma + 1e-12)
    # ordering pins the index convention: better channels err less
    assert np.corrcoef(rates, z)[0, 1] > 0.999


def test_genie_bsc_against_degraded_estimate():
    # recorded, not asserted: a degraded Z estimate need not bound the true one
    n, trials = 6, 20_000
    spec = CodeSpec(n, (), channel="bsc:0.11")
    ch = chm.make_bsc(0.11)
    rates = _genie_rates(spec, ch, trials, seed=12)
    z_hat = estimate_all_subchannels(ch, n, BinningConfig(512)).z_hat
    sigma = np.sqrt(np.clip(z_hat, 1e-12, 1) * (1 - z_hat) / trials)
    over = int(np.sum(rates > z_hat + 3 * sigma))
    print(f"BSC(0.11) n=6: {over} of 64 genie rates exceed Z_hat + 3 sigma")
    assert np.corrcoef(rates, z_hat)[0, 1] > 0.9


def test_genie_first_error_matches_plain_decoding(rng):
    spec = construct_bec_exact(0.5, 6, 0.4)
    ch = chm.make_bec(0.5)
    msgs = rng.integers(0, 2, (500, spec.dimension), dtype=np.uint8)
    ys = chm.sample_outputs(ch, encode(spec, msgs), rng)
    g = decode_sc_genie(spec, ch, ys, msgs)
    block_err = (decode_sc(spec, ch, ys) != msgs).any(axis=1)
    assert np.array_equal(g.first_error >= 0, block_err)

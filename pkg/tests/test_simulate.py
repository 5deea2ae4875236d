import json

import numpy as np
import pytest

from polarcodes import channel as chm
from polarcodes import framing
from polarcodes.construct import construct_bec_exact
from polarcodes.errors import InvalidParameterError
from polarcodes.simulate import draw_trial, simulate, trial_rng, wilson_interval


@pytest.fixture(scope="module")
def bec_code():
    return construct_bec_exact(0.5, 8, 0.3), chm.make_bec(0.5)


def test_trial_streams_are_independent_of_order():
    a = trial_rng(7, 5).random(4)
    trial_rng(7, 4).random(100)
    assert np.array_equal(trial_rng(7, 5).random(4), a)
    assert not np.array_equal(trial_rng(7, 6).random(4), a)
    assert not np.array_equal(trial_rng(8, 5).random(4), a)


def test_zero_trials(bec_code):
    rep = simulate(*bec_code, 0)
    assert rep.trials == 0 and rep.block_errors == 0 and rep.bler == 0.0
    assert rep.bler_ci95 == (0.0, 1.0)
    json.loads(rep.to_json())


def test_worker_count_does_not_change_results(bec_code):
    one = simulate(*bec_code, 3000, seed=9, workers=1, chunk=500)
    two = simulate(*bec_code, 3000, seed=9, workers=2, chunk=500)
    assert one.to_json() == two.to_json()


def test_chunking_does_not_change_results(bec_code):
    a = simulate(*bec_code, 1500, seed=4, chunk=1500)
    b = simulate(*bec_code, 1500, seed=4, chunk=128)
    assert (a.block_errors, a.bit_errors) == (b.block_errors, b.bit_errors)


def test_report_fields(bec_code):
    spec, ch = bec_code
    rep = simulate(spec, ch, 2000, seed=1)
    assert 0 <= rep.block_errors <= rep.trials
    lo, hi = rep.bler_ci95
    assert lo <= rep.bler <= hi
    d = json.loads(rep.to_json())
    assert d["schema"] == "sim-report/1"
    assert "wall_time" not in d
    assert "wall_time" in json.loads(simulate(spec, ch, 10, record_time=True).to_json())


def test_replaying_one_trial(bec_code):
    spec, ch = bec_code
    msg, y = draw_trial(spec, ch, 3, 17)
    msg2, y2 = draw_trial(spec, ch, 3, 17)
    assert np.array_equal(msg, msg2) and np.array_equal(y, y2)


def test_wilson_matches_closed_form():
    k, n, z = 3, 100, 1.959963984540054
    p = k / n
    centre = (p + z * z / (2 * n)) / (1 + z * z / n)
    half = z / (1 + z * z / n) * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    assert wilson_interval(k, n) == pytest.approx((centre - half, centre + half), rel=1e-9)


def test_bad_arguments(bec_code):
    with pytest.raises(InvalidParameterError):
        simulate(*bec_code, -1)
    with pytest.raises(InvalidParameterError):
        simulate(*bec_code, 10, workers=0)
    with pytest.raises(InvalidParameterError):
        simulate(bec_code[0], chm.make_bec(0.2), 10)


# ---------------------------------------------------------------------------
# file framing


def test_noiseless_file_round_trip(bec_code):
    spec, _ = bec_code
    data = bytes(range(256)) * 3
    cw = framing.encode_file(spec, data)
    assert cw[:4] == b"PLCW"
    out = framing.decode_file(spec, chm.make_bec(0.0), cw, allow_mismatch=True)
    assert out == data


def test_empty_file(bec_code):
    spec, ch = bec_code
    assert framing.decode_file(spec, ch, framing.encode_file(spec, b"")) == b""


def test_transmit_and_decode_large_file():
    spec = construct_bec_exact(0.3, 14, 0.4)
    ch = chm.make_bec(0.3)
    data = np.random.default_rng(0).integers(0, 256, 125_000, dtype=np.uint8).tobytes()
    rx = framing.transmit_file(spec, ch, framing.encode_file(spec, data), seed=3)
    assert rx[:4] == b"PLRX"
    out = framing.decode_file(spec, ch, rx)
    a = np.unpackbits(np.frombuffer(data, np.uint8))
    b = np.unpackbits(np.frombuffer(out, np.uint8))
    assert np.mean(a != b) <= 2 * spec.z_bound


def test_framing_errors(bec_code):
    spec, ch = bec_code
    cw = framing.encode_file(spec, b"hello")
    with pytest.raises(InvalidParameterError):
        framing.decode_file(spec, ch, cw[:-1])
    with pytest.raises(InvalidParameterError):
        framing.decode_file(spec, ch, cw[:10])
    with pytest.raises(InvalidParameterError):
        framing.decode_file(spec, ch, b"XXXX" + cw[4:])
    other = construct_bec_exact(0.5, 8, 0.5)
    with pytest.raises(InvalidParameterError):
        framing.decode_file(other, ch, cw)
    with pytest.raises(InvalidParameterError):
        framing.transmit_file(spec, ch, framing.transmit_file(spec, ch, cw))

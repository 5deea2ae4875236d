import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from polarcodes import channel as chm
from polarcodes.errors import InvalidParameterError


def test_bec_metrics():
    m = chm.metrics(chm.make_bec(0.5))
    assert m.entropy == pytest.approx(0.5, abs=1e-15)
    assert m.mutual_info == pytest.approx(0.5, abs=1e-15)
    assert m.bhattacharyya == pytest.approx(0.5, abs=1e-15)
    # an erasure is a tie, and ties count as errors
    assert m.ml_error == pytest.approx(0.5, abs=1e-15)
    assert m.symmetric_entropy == pytest.approx(0.25, abs=1e-15)


def test_bsc_metrics():
    p = 0.11
    m = chm.metrics(chm.make_bsc(p))
    assert m.entropy == pytest.approx(oracles.h2(p), abs=1e-14)
    assert m.bhattacharyya == pytest.approx(2 * math.sqrt(p * (1 - p)), abs=1e-14)
    assert m.ml_error == pytest.approx(p, abs=1e-15)


def test_useless_and_perfect_channels():
    assert chm.ml_error(chm.make_bsc(0.5)) == pytest.approx(1.0)
    assert chm.entropy(chm.make_bsc(0.5)) == pytest.approx(1.0)
    assert chm.entropy(chm.make_bec(0.0)) == 0.0
    assert chm.bhattacharyya(chm.make_bec(1.0)) == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_functionals_match_oracle(seed):
    ch = chm.random_symmetric_channel(np.random.default_rng(seed))
    rows = ch.prob.tolist()
    assert chm.entropy(ch) == pytest.approx(oracles.entropy(rows), abs=1e-12)
    assert chm.bhattacharyya(ch) == pytest.approx(oracles.bhattacharyya(rows), abs=1e-12)
    assert chm.ml_error(ch) == pytest.approx(oracles.ml_error_ties_as_errors(rows), abs=1e-12)


def test_random_channels_are_valid_and_symmetric(rng):
    for _ in range(200):
        ch = chm.random_symmetric_channel(rng)
        assert ch.output_size in (2, 4, 6, 8)
        assert chm.validate(ch) == []
        assert chm.symmetry_violation(ch) == 0.0
        assert not np.array_equal(ch.symmetry_perm, np.arange(ch.output_size))


def test_validate_reports_without_raising():
    bad = chm.validate((np.array([[0.5, 0.6], [0.5, 0.5]]), None))
    assert {v.kind for v in bad} == {"row_sum"}
    neg = chm.validate((np.array([[1.2, -0.2], [0.5, 0.5]]), None))
    assert "negative" in {v.kind for v in neg}
    asym = chm.validate((np.array([[0.9, 0.1], [0.2, 0.8]]), np.array([1, 0])))
    assert [v.kind for v in asym] == ["asymmetric"]
    notperm = chm.validate((np.array([[0.9, 0.1], [0.1, 0.9]]), np.array([1, 1])))
    assert [v.kind for v in notperm] == ["permutation"]
    shape = chm.validate((np.ones((3, 2)) / 2, None))
    assert [v.kind for v in shape] == ["shape"]


def test_constructor_rejects_bad_tables():
    with pytest.raises(InvalidParameterError):
        chm.Channel([[0.5, 0.6], [0.5, 0.5]])
    with pytest.raises(InvalidParameterError):
        chm.make_bec(1.5)
    with pytest.raises(InvalidParameterError):
        chm.make_bsc(0.7)


def test_channel_is_read_only():
    ch = chm.make_bsc(0.2)
    with pytest.raises(ValueError):
        ch.prob[0, 0] = 1.0


def test_relabel_preserves_functionals(rng):
    ch = chm.random_symmetric_channel(rng)
    order = rng.permutation(ch.output_size)
    r = chm.relabel(ch, order)
    assert chm.symmetry_violation(r) == 0.0
    assert chm.entropy(r) == pytest.approx(chm.entropy(ch), abs=1e-15)


def test_sampling_frequencies(rng):
    ch = chm.make_bec(0.3)
    y = chm.sample_outputs(ch, np.zeros(200_000, dtype=np.uint8), rng)
    freq = np.bincount(y, minlength=3) / y.size
    assert freq == pytest.approx([0.7, 0.3, 0.0], abs=5e-3)
    y1 = chm.sample_outputs(ch, np.ones(1000, dtype=np.uint8), rng)
    assert set(np.unique(y1)) <= {1, 2}


def test_sampling_is_deterministic():
    ch = chm.make_bsc(0.2)
    bits = np.arange(50) % 2
    a = chm.sample_outputs(ch, bits, np.random.default_rng(3))
    b = chm.sample_outputs(ch, bits, np.random.default_rng(3))
    assert np.array_equal(a, b)


def test_text_round_trip(tmp_path, rng):
    ch = chm.random_symmetric_channel(rng)
    path = tmp_path / "w.txt"
    path.write_text(chm.format_channel_text(ch))
    back = chm.channel_from_arg(str(path))
    assert np.array_equal(back.prob, ch.prob)
    assert np.array_equal(back.symmetry_perm, ch.symmetry_perm)
    assert back.name == "w.txt"


def test_parse_comments_and_errors():
    text = "# a BSC\noutputs: 2\n0.9 0.1\n0.1 0.9  # row 1\nsigma: 1 0\n"
    ch = chm.parse_channel_text(text)
    assert chm.entropy(ch) == pytest.approx(oracles.h2(0.1))
    with pytest.raises(InvalidParameterError):
        chm.parse_channel_text("0.9 0.1\n0.1 0.9\n")
    with pytest.raises(InvalidParameterError):
        chm.parse_channel_text("outputs: 3\n0.9 0.1\n0.1 0.9\n")
    with pytest.raises(InvalidParameterError):
        chm.parse_channel_text("outputs: 2\n0.9 abc\n0.1 0.9\n")


def test_channel_shorthand():
    assert chm.channel_from_arg("bec:0.25").name == "bec:0.25"
    assert chm.channel_from_arg("BSC:0.1").output_size == 2
    with pytest.raises(InvalidParameterError):
        chm.channel_from_arg("bec:x")
    with pytest.raises(InvalidParameterError):
        chm.channel_from_arg("awgn:1.0")


def test_hard_decision_symbols():
    assert list(chm.hard_decision_symbols(chm.make_bec(0.0))) == [0, 2]
    assert list(chm.hard_decision_symbols(chm.make_bsc(0.1))) == [0, 1]

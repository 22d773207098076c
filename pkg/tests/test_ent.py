import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chaoscipher import ent
from chaoscipher.keystream import keystream

import oracles

# 64 KiB of keystream under fixed inputs; statistic from plain counting and
# percentile from the mpmath regularized upper incomplete gamma, then frozen
CHI_KEYSTREAM_STAT = 250.7578125
CHI_KEYSTREAM_PCT = 56.329633382155166


def test_entropy_examples():
    assert ent.ent_entropy(b"\x07" * 100) == 0.0
    assert ent.ent_entropy(bytes(range(256))) == pytest.approx(8.0)
    assert ent.ent_entropy(b"\x00\x01") == pytest.approx(1.0)


def test_entropy_equals_eight_only_when_uniform():
    assert ent.ent_entropy(bytes(range(256)) * 3) == pytest.approx(8.0, abs=1e-12)
    skewed = bytes(range(256)) * 3 + b"\x00"
    assert ent.ent_entropy(skewed) < 8.0


@given(st.binary(min_size=1, max_size=300), st.randoms(use_true_random=False))
def test_entropy_permutation_invariant_and_bounded(data, rnd):
    shuffled = bytearray(data)
    rnd.shuffle(shuffled)
    h = ent.ent_entropy(data)
    assert 0.0 <= h <= 8.0
    assert ent.ent_entropy(bytes(shuffled)) == pytest.approx(h, abs=1e-12)


def test_optimum_compression():
    assert ent.ent_optimum_compression(6.6894) == pytest.approx(0.8362, abs=1e-4)
    assert ent.ent_optimum_compression(8.0) == 1.0
    assert ent.ent_optimum_compression(0.0) == 0.0
    with pytest.raises(ValueError):
        ent.ent_optimum_compression(8.5)


def test_chi_square_examples():
    assert ent.ent_chi_square(bytes(range(256)) * 4) == (0.0, 100.0)
    stat, pct = ent.ent_chi_square(b"\x41" * 2560)
    assert stat == pytest.approx(255 * 2560)
    assert pct < 1e-100


def test_chi_square_pinned_against_cdf_oracle():
    data = keystream(b"\x11" * 32, b"\x22" * 16, b"ent", 65536)
    stat, pct = ent.ent_chi_square(data)
    assert stat == pytest.approx(CHI_KEYSTREAM_STAT, abs=1e-6)
    assert pct == pytest.approx(CHI_KEYSTREAM_PCT, abs=1e-6)
    assert pct == pytest.approx(100 * oracles.igamc(127.5, stat / 2), abs=1e-6)


@given(st.binary(min_size=1, max_size=2000), st.binary(min_size=1, max_size=2000))
def test_chi_square_percentile_range_and_monotone(a, b):
    sa, pa = ent.ent_chi_square(a)
    sb, pb = ent.ent_chi_square(b)
    assert 0.0 <= pa <= 100.0
    if sa < sb:
        assert pa >= pb


def test_mean_examples():
    assert ent.ent_mean(b"\xff" * 10) == 255.0
    assert ent.ent_mean(b"\x00\xff" * 10) == 127.5


def test_monte_carlo_pi():
    assert ent.ent_monte_carlo_pi(bytes(6))[0] == 4.0
    assert ent.ent_monte_carlo_pi(b"\xff" * 6)[0] == 0.0
    # leftover bytes are ignored
    assert ent.ent_monte_carlo_pi(bytes(6) + b"\xff" * 5)[0] == 4.0
    with pytest.raises(ValueError):
        ent.ent_monte_carlo_pi(bytes(5))
    est, err = ent.ent_monte_carlo_pi(b"\x80\x00\x00\x80\x00\x00" + b"\xff" * 6)
    assert est == 2.0
    assert err == pytest.approx(100 * abs(2.0 - math.pi) / math.pi)


def test_serial_correlation():
    assert ent.ent_serial_correlation(bytes(range(256))) > 0.99
    assert ent.ent_serial_correlation(b"\x00\xff" * 100) < -0.99
    assert ent.ent_serial_correlation(b"\x05" * 50, return_flag=True) == (0.0, True)
    with pytest.raises(ValueError):
        ent.ent_serial_correlation(b"\x01")


def test_serial_correlation_matches_numpy():
    data = keystream(b"\x01" * 32, b"\x02" * 16, b"", 5000)
    x = np.frombuffer(data, dtype=np.uint8).astype(float)
    assert ent.ent_serial_correlation(data) == pytest.approx(np.corrcoef(x[:-1], x[1:])[0, 1], abs=1e-12)


def test_empty_input_errors():
    for fn in (ent.ent_entropy, ent.ent_chi_square, ent.ent_mean, ent.analyze):
        with pytest.raises(ValueError):
            fn(b"")


def test_report():
    r = ent.analyze(bytes(range(256)) * 8)
    assert r.entropy_bits_per_byte == pytest.approx(8.0)
    assert r.optimum_compression == pytest.approx(r.entropy_bits_per_byte / 8)
    assert r.arithmetic_mean == 127.5
    assert r.pi_error_percent == pytest.approx(100 * abs(r.monte_carlo_pi - math.pi) / math.pi)
    d = json.loads(r.to_json())
    assert [row["test"] for row in d["table"]] == [
        "Entropy", "Optimum Compression", "Chi-Square", "Arithmetic Mean",
        "Monte Carlo π", "Serial Correlation"]
    assert "Entropy" in r.format_table()
    assert not r.chi_square_ok()  # perfectly uniform counts sit at 100%
    assert r.chi_square_ok((0, 100))


def test_short_report_marks_missing_metrics():
    r = ent.analyze(b"\x01")
    assert r.monte_carlo_pi is None and r.serial_correlation_undefined

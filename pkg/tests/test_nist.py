import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chaoscipher import nist

import nist_cases
import oracles

# worked examples from the SP 800-22 test descriptions
LONGEST_RUN_128 = (
    "11001100000101010110110001001100111000000000001001001101010100010001"
    "001111010110100000001101011111001100111001101101100010110010"
)


@pytest.mark.parametrize("fn, bits, expected", [
    (lambda s: nist.monobit(s), "1011010101", 0.527089),
    (lambda s: nist.block_frequency(s, M=3), "0110011010", 0.801252),
    (lambda s: nist.runs(s), "1001101011", 0.147232),
    (lambda s: nist.approximate_entropy(s, 3), "0100110101", 0.261961),
    (lambda s: nist.cumulative_sums(s)[0], "1011010111", 0.4116588),
])
def test_known_answers(fn, bits, expected):
    assert fn(bits).p_value == pytest.approx(expected, abs=1e-6)


def test_serial_known_answer():
    r = nist.serial("0011011101", 3)
    assert r.p_values[0] == pytest.approx(0.808792, abs=1e-6)
    assert r.p_values[1] == pytest.approx(0.670320, abs=1e-6)
    assert r.params["reduced_power"]


def test_longest_run_asymptotic_known_answer():
    r = nist.longest_run(LONGEST_RUN_128)
    assert r.params["observed"] == [4, 9, 3, 0]
    assert r.statistic == pytest.approx(4.882605, abs=1e-6)
    assert r.params["asymptotic_p"] == pytest.approx(oracles.igamc(1.5, r.statistic / 2), abs=1e-9)
    # expected counts below 5, so the headline is the exact tail
    assert r.params["p_method"] == "exact"


def test_universal_statistic_known_answer():
    r = nist.universal("01011010011101010111", L=2, Q=4)
    assert r.statistic == pytest.approx(1.1949875, abs=1e-7)


@pytest.mark.parametrize("case", nist_cases.CASES, ids=[c[0] for c in nist_cases.CASES])
def test_matches_oracle(case):
    err, compared = nist_cases.max_error(case)
    assert compared >= 5
    assert err < 1e-6


@pytest.mark.parametrize("M, Q", [(2, 2), (2, 3), (3, 3), (3, 4)])
def test_rank_probabilities_bruteforce(M, Q):
    full = min(M, Q)
    brute = oracles.rank_probs_bruteforce(M, Q)
    got = [nist.rank_probability(full, M, Q), nist.rank_probability(full - 1, M, Q)]
    assert got == pytest.approx(brute[:2], abs=1e-12)


def test_aperiodic_templates():
    t9 = nist.aperiodic_templates(9)
    assert len(t9) == 148
    assert t9[0] == "000000001"
    assert nist.aperiodic_templates(2) == ["01", "10"]


def test_count_non_overlapping():
    text = "10100100101110010110"
    assert nist.count_non_overlapping(nist.as_bits(text), "001") == 3
    assert oracles._count_non_overlapping([int(c) for c in text], [0, 0, 1]) == 3


def test_runs_constant_short_input_not_applicable():
    r = nist.runs("0000")
    assert not r.applicable


def test_battery_rows_and_order():
    bits = np.array(oracles.test_bits(b"battery", 6480), dtype=np.uint8)
    results = nist.run_battery(bits)
    assert [r.name for r in results] == list(nist.LABELS)
    assert len(results) == 16
    for r in results:
        assert r.applicable
        assert all(0.0 <= p <= 1.0 for p in r.p_values)
    json.dumps([r.to_dict() for r in results])
    threaded = nist.run_battery(bits, threads=4)
    assert [r.p_values for r in threaded] == [r.p_values for r in results]


def test_all_zeros_fails():
    results = nist.run_battery(bytes(810))
    assert len(results) == 16
    applicable = [r for r in results if r.applicable]
    assert not all(r.passed for r in applicable)
    for name in ("monobit", "block_frequency", "longest_run", "rank", "serial", "cumulative_sums_forward"):
        r = next(r for r in results if r.name == name)
        assert not r.passed
    runs = next(r for r in results if r.name == "runs")
    assert not runs.applicable


def test_format_table():
    results = nist.run_battery(bytes(810))
    table = nist.format_table(results, n=6480)
    assert "Frequency (Monobit)" in table
    assert "n=6480" in table
    assert "n/a" in table


@given(st.binary(min_size=1, max_size=40))
def test_p_values_in_unit_interval(data):
    bits = nist.BitSequence.from_bytes(data).bits
    for r in (nist.monobit(bits), nist.runs(bits), nist.block_frequency(bits, M=8),
              nist.serial(bits, 2), nist.approximate_entropy(bits, 1),
              *nist.cumulative_sums(bits), nist.random_excursions(bits),
              nist.random_excursions_variant(bits), nist.dft(bits)):
        if r.applicable:
            assert all(0.0 <= p <= 1.0 for p in r.p_values)
            assert r.passed == (min(r.p_values) >= nist.ALPHA)


@given(st.binary(min_size=2, max_size=64))
def test_cusum_reverse_is_forward_of_reversed(data):
    bits = nist.BitSequence.from_bytes(data).bits
    fwd, bwd = nist.cumulative_sums(bits)
    assert nist.cumulative_sums(bits[::-1].copy())[0].p_values == bwd.p_values


@given(st.binary(min_size=1, max_size=64))
def test_monobit_complement_symmetry(data):
    bits = nist.BitSequence.from_bytes(data).bits
    assert math.isclose(nist.monobit(bits).p_value, nist.monobit(1 - bits).p_value)


def test_universal_tier_at_table_size():
    assert nist.universal_block_length(6480) == (2, True)
    r = nist.universal(np.array(oracles.test_bits(b"u", 6480), dtype=np.uint8))
    assert (r.params["L"], r.params["Q"]) == (2, 40)
    assert r.params["variance_method"] == "exact_variance"


def test_bit_sequence_parsing():
    assert nist.BitSequence.from_bytes(b"\x80").bits.tolist() == [1, 0, 0, 0, 0, 0, 0, 0]
    assert nist.BitSequence.from_string("0101").n == 4
    with pytest.raises(ValueError):
        nist.as_bits("012")

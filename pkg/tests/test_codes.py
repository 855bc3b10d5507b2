import numpy as np
import pytest

from pmcwnet.codes import (
    CodeSequence,
    circular_shift,
    generate_p3,
    load_sequence,
    periodic_autocorrelation,
    radar_code_shift,
    save_sequence,
    search_apas,
    verify_almost_perfect,
)
from pmcwnet.errors import IndivisibleCodeError, IoError, OddLengthError, SearchTooLargeError


def direct_autocorrelation(chips):
    # independent O(L^2) oracle
    L = chips.size
    out = np.zeros(L, dtype=np.complex128)
    for p in range(L):
        acc = 0.0 + 0.0j
        for l in range(L):
            acc += chips[(l + p) % L] * np.conj(chips[l])
        out[p] = acc
    return out


@pytest.mark.parametrize("length", [4, 8, 16, 504])
def test_autocorrelation_matches_direct_sum_polyphase(length):
    seq = generate_p3(length)
    got = periodic_autocorrelation(seq)
    want = direct_autocorrelation(seq.chips)
    assert np.max(np.abs(got - want)) < 1e-9 * length


@pytest.mark.parametrize("seed", range(5))
def test_autocorrelation_matches_direct_sum_binary(seed):
    rng = np.random.default_rng(seed)
    chips = rng.choice([-1.0, 1.0], size=12).astype(np.complex128)
    seq = CodeSequence(chips=chips, family="imported")
    got = periodic_autocorrelation(seq)
    want = direct_autocorrelation(chips)
    assert np.max(np.abs(got - want)) == 0.0  # binary path is exact integer math


def test_known_almost_perfect_length4():
    seq = CodeSequence(chips=np.array([1, 1, -1, -1], dtype=np.complex128), family="apas_binary")
    ac = periodic_autocorrelation(seq)
    assert np.allclose(ac.real, [4, 0, -4, 0]) and np.allclose(ac.imag, 0)
    report = verify_almost_perfect(seq, tolerance=0.0)
    assert report.passed
    assert report.peak == 4.0
    assert report.half_lag_value == -4.0
    assert report.max_sidelobe == 0.0


def test_all_ones_rejected():
    seq = CodeSequence(chips=np.ones(8, dtype=np.complex128), family="imported")
    report = verify_almost_perfect(seq, tolerance=0.0)
    assert not report.passed
    assert report.half_lag_value == 8.0  # positive half lag disqualifies


def test_m_sequence_odd_length_raises():
    # length-7 m-sequence: the property is only defined for even lengths
    m7 = CodeSequence(
        chips=np.array([1, 1, 1, -1, -1, 1, -1], dtype=np.complex128),
        family="imported",
    )
    with pytest.raises(OddLengthError):
        verify_almost_perfect(m7, tolerance=0.0)


def test_p3_not_almost_perfect_binary_property():
    # polyphase P3 is perfect (zero at every nonzero lag) so the negative
    # half-lag requirement fails
    report = verify_almost_perfect(generate_p3(8), tolerance=1e-9)
    assert not report.passed


# frozen by exhaustive search: canonical classes and the negative peak value
APAS_CENSUS = {4: (1, -4), 8: (2, -4), 12: (2, -8), 16: (4, -12)}


@pytest.mark.parametrize("length", sorted(APAS_CENSUS))
def test_search_census(length):
    n_expected, half_expected = APAS_CENSUS[length]
    hits = search_apas(length)
    assert len(hits) == n_expected
    for seq in hits:
        assert seq.is_binary
        report = verify_almost_perfect(seq, tolerance=0.0)
        assert report.passed
        assert report.half_lag_value == half_expected


def test_search_canonical_deduplication():
    for seq in search_apas(8):
        bits = tuple(int(c.real) for c in seq.chips)
        variants = []
        for s in range(8):
            rolled = bits[-s:] + bits[:-s]
            variants.append(rolled)
            variants.append(tuple(-b for b in rolled))
        assert bits == min(variants)


def test_search_no_sequences_at_length6():
    assert search_apas(6) == []


def test_search_input_validation():
    with pytest.raises(OddLengthError):
        search_apas(7)
    with pytest.raises(SearchTooLargeError):
        search_apas(22)


@pytest.mark.parametrize("length", [2, 4, 5, 8, 9, 16, 17, 504, 505])
def test_p3_perfect_autocorrelation(length):
    seq = generate_p3(length)
    ac = periodic_autocorrelation(seq)
    assert abs(ac[0] - length) < 1e-9 * length
    assert np.max(np.abs(ac[1:])) < 1e-9 * length


def test_p3_unit_modulus_and_family():
    seq = generate_p3(504)
    assert seq.family == "p3"
    assert not seq.is_binary
    assert np.max(np.abs(np.abs(seq.chips) - 1.0)) < 1e-12


def test_circular_shift_moves_correlation_peak():
    seq = generate_p3(16)
    shifted = circular_shift(seq, 5)
    L = seq.length
    cross = np.array(
        [
            np.sum(shifted.chips[(np.arange(L) + p) % L] * np.conj(seq.chips))
            for p in range(L)
        ]
    )
    assert int(np.argmax(np.abs(cross))) == 5


def test_radar_code_shift_values():
    assert radar_code_shift(1, 2, 504) == 0
    assert radar_code_shift(2, 2, 504) == 126
    assert radar_code_shift(2, 4, 504) == 63
    assert radar_code_shift(4, 4, 504) == 189


def test_radar_code_shift_errors():
    with pytest.raises(IndivisibleCodeError):
        radar_code_shift(2, 2, 505)
    with pytest.raises(ValueError):
        radar_code_shift(3, 2, 504)
    with pytest.raises(ValueError):
        radar_code_shift(0, 2, 504)


def test_code_sequence_validation():
    with pytest.raises(ValueError):
        CodeSequence(chips=np.array([1.0, 0.5], dtype=np.complex128), family="imported")
    with pytest.raises(ValueError):
        CodeSequence(chips=np.array([1.0], dtype=np.complex128), family="imported")


def test_sequence_file_roundtrip_binary(tmp_path):
    seq = search_apas(8)[0]
    path = tmp_path / "code.txt"
    save_sequence(seq, path)
    back = load_sequence(path)
    assert back.family == "imported"
    assert np.array_equal(back.chips, seq.chips)


def test_sequence_file_roundtrip_polyphase(tmp_path):
    seq = generate_p3(9)
    path = tmp_path / "code.txt"
    save_sequence(seq, path)
    back = load_sequence(path)
    assert np.max(np.abs(back.chips - seq.chips)) == 0.0  # repr round trip is exact


def test_load_sequence_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1\nnot a number\n")
    with pytest.raises(IoError):
        load_sequence(path)


def test_load_sequence_missing_file(tmp_path):
    with pytest.raises(IoError):
        load_sequence(tmp_path / "absent.txt")

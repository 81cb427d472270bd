import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from compressarg.avoidance import (ForbiddenSet, LetterSource, Record, check_miller, decode_record,
                                   encode_record, event_inequalities, format_forbidden, miller_at,
                                   parse_forbidden, reconstruct_letters, record_model, run_tetris,
                                   text_to_word, word_to_text)
from compressarg.entropy_coding import C_SLACK
from compressarg.errors import IntegrityError, ParseError


def grid_says_holds(fs, points=200_001):
    """Dense scan of f(x) = sum a_j x^j - m x + 1 over (1/m, x_hi]."""
    hi = max(1.0, float(fs.max_length))
    while fs.profile and sum(j * a * hi ** (j - 1) for j, a in fs.profile.items()) < fs.m:
        hi *= 2
    xs = np.linspace(1 / fs.m, hi, points)[1:]
    f = sum(a * xs**j for j, a in fs.profile.items()) - fs.m * xs + 1
    return bool((f < 0).any())


def scan_has_factor(s, fs):
    text = "".join(map(str, s))
    return any(word_to_text(w) in text for w in fs.words())


@st.composite
def forbidden_sets(draw, max_m=4, max_len=6, max_words=8):
    m = draw(st.integers(2, max_m))
    words = draw(st.lists(
        st.integers(2, max_len).flatmap(lambda j: st.tuples(*[st.integers(0, m - 1)] * j)),
        max_size=max_words))
    return ForbiddenSet.from_strings(m, words)


# --- forbidden sets ---------------------------------------------------------------


def test_forbidden_set_validation():
    with pytest.raises(ValueError):
        ForbiddenSet.from_strings(2, ["0"])
    with pytest.raises(ValueError):
        ForbiddenSet.from_strings(2, [(0, 2)])
    with pytest.raises(ValueError):
        ForbiddenSet.from_strings(1, [])
    fs = ForbiddenSet.from_strings(3, ["012", "00", "12"])
    assert fs.profile == {2: 2, 3: 1}
    assert fs.words() == [(0, 0), (1, 2), (0, 1, 2)]
    assert fs.forbidden_suffix((2, 0, 1, 2)) == (1, 2)
    assert fs.forbidden_suffix((2, 1)) is None


def test_parse_forbidden_file():
    fs = parse_forbidden("# comment\nalphabet 2\n\n000  # trailing\n")
    assert fs.m == 2 and fs.words() == [(0, 0, 0)]
    assert parse_forbidden(format_forbidden(fs)) == fs
    assert parse_forbidden("alphabet 2\n").by_length == {}


@pytest.mark.parametrize("text,line", [
    ("alphabet two\n", 1),
    ("000\n", 1),
    ("alphabet 2\n0\n", 2),
    ("alphabet 2\n012\n", 2),
    ("alphabet 40\n", 1),
])
def test_parse_forbidden_errors(text, line):
    with pytest.raises(ParseError) as err:
        parse_forbidden(text)
    assert err.value.line == line


def test_parse_forbidden_empty():
    with pytest.raises(ParseError):
        parse_forbidden("# nothing\n")


@given(forbidden_sets())
def test_forbidden_file_round_trip(fs):
    assert parse_forbidden(format_forbidden(fs)) == fs


def test_text_words():
    assert text_to_word("0a", 11) == (0, 10) and word_to_text((0, 10)) == "0a"
    with pytest.raises(ValueError):
        text_to_word("3", 3)


def test_letter_source_uniform_and_deterministic():
    a = LetterSource(3, 4)
    draws = [a.draw() for _ in range(3000)]
    b = LetterSource(3, 4)
    assert draws == [b.draw() for _ in range(3000)]
    counts = np.bincount(draws, minlength=3)
    assert counts.min() > 900
    assert a.log == draws


# --- Miller ---------------------------------------------------------------------


def test_miller_empty():
    rep = check_miller(ForbiddenSet.from_strings(2, []))
    assert rep.holds and rep.witness_x == 1 and rep.margin == 1 and rep.c == 0


def test_miller_000():
    fs = ForbiddenSet.from_strings(2, ["000"])
    rep = check_miller(fs)
    assert rep.holds and rep.margin > 0
    assert rep.witness_x.denominator <= 10**6
    assert rep.margin == 2 * rep.witness_x - 1 - rep.witness_x**3
    # the minimizer of x^3 - 2x + 1 is sqrt(2/3)
    assert rep.minimizer == pytest.approx(math.sqrt(2 / 3), abs=1e-9)
    at7 = miller_at(fs, Fraction(7, 10))
    assert at7.holds and Fraction(7, 10) ** 3 == Fraction(343, 1000) < Fraction(2, 5)
    assert at7.margin == Fraction(2, 5) - Fraction(343, 1000)


def test_miller_00_11_fails():
    fs = ForbiddenSet.from_strings(2, ["00", "11"])
    rep = check_miller(fs)
    assert not rep.holds and rep.witness_x is None
    # 2x^2 - 2x + 1 has discriminant 4 - 8 < 0, so it never goes negative
    assert 2**2 - 4 * 2 * 1 < 0
    assert rep.min_value == pytest.approx(0.5)


def test_miller_at_rejects_nonpositive():
    with pytest.raises(ValueError):
        miller_at(ForbiddenSet.from_strings(2, []), 0)


@given(forbidden_sets())
def test_miller_agrees_with_grid(fs):
    rep = check_miller(fs)
    assert rep.holds == grid_says_holds(fs)
    if rep.holds:
        assert rep.margin > 0 and rep.witness_x > Fraction(1, fs.m)
        assert rep.c == pytest.approx(-math.log2(rep.witness_x))


# --- record model -----------------------------------------------------------------


def test_record_model_empty():
    fs = ForbiddenSet.from_strings(2, [])
    rm = record_model(fs, check_miller(fs))
    assert rm.model.probs == (Fraction(1, 2),)


def test_record_model_000_at_seven_tenths():
    fs = ForbiddenSet.from_strings(2, ["000"])
    rm = record_model(fs, miller_at(fs, Fraction(7, 10)))
    p0, p3 = rm.model.probs
    assert p0 == Fraction(5, 7)
    assert p3 == Fraction(343, 1000) / Fraction(14, 10) == Fraction(49, 200)
    assert p0 + p3 < 1 and float(p0 + p3) == pytest.approx(0.95928, abs=1e-5)


def test_record_model_requires_holds():
    fs = ForbiddenSet.from_strings(2, ["00", "11"])
    with pytest.raises(ValueError):
        record_model(fs, check_miller(fs))


@given(forbidden_sets())
def test_record_model_mass_and_inequalities(fs):
    rep = check_miller(fs)
    if not rep.holds:
        return
    rm = record_model(fs, rep)
    assert sum(rm.model.probs) < 1
    assert all(event_inequalities(fs, rep).values())


# --- tetris --------------------------------------------------------------------------


def test_tetris_empty_set():
    fs = ForbiddenSet.from_strings(2, [])
    src = LetterSource(2, 3)
    st_ = run_tetris(fs, src, 100, 100)
    assert list(st_.current) == src.log and st_.record == Record((None,) * 100)


def test_tetris_000_scan_oracle():
    fs = ForbiddenSet.from_strings(2, ["000"])
    for seed in range(30):
        src = LetterSource(2, seed)
        state = run_tetris(fs, src, 50, 10_000, check=True)
        assert not state.exhausted and len(state.current) == 50
        assert not scan_has_factor(state.current, fs)
        assert reconstruct_letters(fs, state.current, state.record) == src.log


def test_tetris_all_pairs_exhausts():
    fs = ForbiddenSet.from_strings(2, ["00", "01", "10", "11"])
    src = LetterSource(2, 1)
    state = run_tetris(fs, src, 5, 40, check=True)
    assert state.exhausted and state.letters_drawn == 40 and len(state.current) <= 1
    assert state.record.events[1::2] == tuple(tuple(src.log[i - 1:i + 1]) for i in range(1, 40, 2))
    assert reconstruct_letters(fs, state.current, state.record) == src.log


def test_tetris_rejects_bad_args():
    fs = ForbiddenSet.from_strings(2, [])
    with pytest.raises(ValueError):
        run_tetris(fs, LetterSource(2, 0), 10, 5)
    with pytest.raises(ValueError):
        run_tetris(fs, LetterSource(3, 0), 1, 5)


@given(forbidden_sets(max_len=4), st.integers(0, 2**32 - 1), st.integers(0, 60))
def test_tetris_reconstruction_property(fs, seed, target):
    src = LetterSource(fs.m, seed)
    state = run_tetris(fs, src, target, 3 * target + 20, check=True)
    assert len(state.record) == state.letters_drawn == len(src.log)
    assert not scan_has_factor(state.current, fs)
    assert reconstruct_letters(fs, state.current, state.record) == src.log


def test_reconstruct_empty():
    assert reconstruct_letters(ForbiddenSet.from_strings(2, ["00"]), (), Record()) == []


def test_reconstruct_detects_inconsistency():
    fs = ForbiddenSet.from_strings(2, ["000", "11"])
    with pytest.raises(IntegrityError):
        reconstruct_letters(fs, (0, 0, 0), Record((None,) * 3))
    with pytest.raises(IntegrityError):
        reconstruct_letters(fs, (), Record((None,)))
    with pytest.raises(IntegrityError):
        reconstruct_letters(fs, (1, 0), Record((None,)))
    with pytest.raises(IntegrityError):
        reconstruct_letters(fs, (1, 0), Record(((0, 1),)))
    with pytest.raises(IntegrityError):
        # the process would have deleted the shorter suffix 00, not 000
        reconstruct_letters(ForbiddenSet.from_strings(2, ["000", "00"]), (1,), Record((None, (0, 0, 0))))


def test_record_json_round_trip():
    rec = Record((None, (0, 0, 1), None))
    assert rec.to_json() == [{"op": "+"}, {"op": "+", "del": "001"}, {"op": "+"}]
    assert Record.from_json(rec.to_json(), 2) == rec
    assert rec.deletions == 1 and len(rec) == 3


# --- record coding ------------------------------------------------------------------


def test_record_coding_all_plus():
    fs = ForbiddenSet.from_strings(2, [])
    rep = miller_at(fs, Fraction(9, 10))
    T = 300
    bits, acc = encode_record(fs, Record((None,) * T), rep)
    assert acc.total_bits <= T * (1 - rep.c) + C_SLACK
    assert decode_record(fs, bits, T, rep) == Record((None,) * T)


def test_record_coding_000_runs_to_500():
    fs = ForbiddenSet.from_strings(2, ["000"])
    rep = check_miller(fs)
    for seed in range(20):
        src = LetterSource(2, seed)
        state = run_tetris(fs, src, 500, 10_000)
        bits, acc = encode_record(fs, state.record, rep, len(state.current))
        assert acc.final_length == 500
        assert acc.total_bits <= acc.bound
        assert acc.saved >= rep.c * 500 - C_SLACK
        assert decode_record(fs, bits, len(state.record), rep) == state.record


def test_encode_record_rejects_foreign_deletion():
    fs = ForbiddenSet.from_strings(2, ["000"])
    with pytest.raises(ValueError):
        encode_record(fs, Record(((1, 1),)), check_miller(fs))


@given(forbidden_sets(max_len=5), st.integers(0, 2**32 - 1))
def test_amortized_coding_property(fs, seed):
    rep = check_miller(fs)
    if not rep.holds:
        return
    src = LetterSource(fs.m, seed)
    state = run_tetris(fs, src, 80, 2000)
    bits, acc = encode_record(fs, state.record, rep, len(state.current))
    assert acc.total_bits <= acc.bound + 1e-9
    assert decode_record(fs, bits, len(state.record), rep) == state.record

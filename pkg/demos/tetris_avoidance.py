"""Growing a string that avoids forbidden factors.

Append random letters; whenever a forbidden string shows up as a suffix,
delete it. The final string together with the record of deletions pins
down every letter drawn, and the record is cheap to encode when the
forbidden set is sparse enough, so the process cannot stall for long.
"""

from compressarg.avoidance import (ForbiddenSet, LetterSource, check_miller, encode_record,
                                   reconstruct_letters, run_tetris, word_to_text)
from compressarg.entropy_coding import C_SLACK

for words in (["000"], ["00", "11"], ["0101", "111", "2200"]):
    m = 3 if any("2" in w for w in words) else 2
    fs = ForbiddenSet.from_strings(m, words)
    rep = check_miller(fs)
    print(f"m={m} F={words}: condition holds={rep.holds}", end="")
    print(f", witness x={float(rep.witness_x):.4f}, c={rep.c:.4f}" if rep.holds else
          f", min of f is {rep.min_value:.4f}")

fs = ForbiddenSet.from_strings(2, ["000"])
rep = check_miller(fs)
src = LetterSource(2, 11)
state = run_tetris(fs, src, 500, 10**5)
assert reconstruct_letters(fs, state.current, state.record) == src.log
bits, acc = encode_record(fs, state.record, rep, len(state.current))
print(f"\nF={{000}}: reached length 500 after {state.letters_drawn} letters "
      f"({state.record.deletions} deletions)")
print(f"  first 60 letters of the result: {word_to_text(state.current[:60])}")
print(f"  record coded in {acc.total_bits} bits; the letters were worth {acc.naive_bits:.0f}")
print(f"  saving {acc.saved:.1f} bits, guaranteed at least c*500 - {C_SLACK} = {rep.c * 500 - C_SLACK:.1f}")

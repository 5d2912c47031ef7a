"""Golden pins for the frozen glue-term library.

Published constants depend on these exact encodings; if a definition
changes, every recorded complexity value changes meaning, so the hashes
here must only ever be updated deliberately.
"""

import hashlib

from razorlab.bits import encode_pair
from razorlab.combinators import (COPY, ECHO1, PAD_READER, PAIRL, PRINT, Y,
                                  bake_cost, bake_data, chain_constant,
                                  chain_program, const_program, constant_band,
                                  drop_reader, measured_constants,
                                  pair_program, padded_program, proj_program,
                                  skip_program, swap_program)
from razorlab.machine import Gas, Status, run, is_valid_run
from razorlab.terms import encode_term

GAS = Gas(100_000)


def _sha(term):
    return hashlib.sha256(encode_term(term).encode()).hexdigest()[:16]


def test_golden_encodings():
    # small terms pinned literally, large ones by length + digest
    assert encode_term(COPY) == "0000110"
    assert encode_term(Y) == "000100011100110100001110011010"
    goldens = {
        "copy": (COPY, 7, "efdfbb7e458422be"),
        "echo1": (ECHO1, 30, "0195d074ab5f6076"),
        "y": (Y, 30, "ccf190e853e8ecf8"),
        "pairl": (PAIRL, 77, "2892ee2815dd57a6"),
        "pad_reader": (PAD_READER, 125, "d0b8181a8fae7a0b"),
        "print": (PRINT, 519, "1bfd2fabe9421e14"),
    }
    for name, (term, length, digest) in goldens.items():
        code = encode_term(term)
        assert len(code) == length, (name, len(code))
        assert _sha(term) == digest, (name, _sha(term))


def test_measured_constants_frozen():
    assert measured_constants() == {
        "c_bake_base": 13,
        "c_bake_per_bit": 16,
        "c_copy": 7,
        "c_pair": 103,
        "c_proj": 229,
        "c_swap": 576,
        "c_skip": 229,
        "c_chain_glue": 281,
        "c_chain_lit_per_bit": 14,
        "c_print": 519,
        "pad_reader_bits": 127,
        "c_echo1": 30,
    }
    assert constant_band() == 127
    assert chain_constant(5) == 281 + 5 * 14
    assert bake_cost(0) == 0
    assert bake_cost(3) == 13 + 3 * 16


def test_const_program_emits_literal():
    for x in ("", "0", "1", "0110"):
        out = run(encode_term(const_program(x)), "", GAS)
        assert out.status == Status.HALTED and out.output == x
        assert out.bits_read == 0


def test_pair_glue():
    prog = pair_program(const_program("110"), const_program("01"))
    out = run(encode_term(prog), "", GAS)
    assert out.output == encode_pair("110", "01")


def test_proj_and_swap_glue():
    base = pair_program(const_program("110"), const_program("01"))
    out = run(encode_term(proj_program(base)), "", GAS)
    assert out.output == "110"
    out = run(encode_term(swap_program(base)), "", GAS)
    assert out.output == encode_pair("01", "110")


def test_skip_glue():
    cond = encode_pair("101", "1111")
    prog = skip_program(COPY)  # copy wants z itself; adapter unwraps first
    out = run(encode_term(prog), cond, GAS)
    assert out.output == "101"


def test_chain_glue():
    prog = chain_program(const_program("0"), const_program("1"), "101")
    out = run(encode_term(prog), "", GAS)
    assert out.output == encode_pair("0", "1")


def test_pad_reader_reads_exactly_eta_plus_pads():
    prog, (r, chi, eta) = padded_program(const_program("0"), 3)
    assert eta == "1110"
    assert prog == r + chi + eta
    for pad in ("000", "101", "111"):
        out = run(prog + pad, "", GAS)
        assert out.status == Status.HALTED and out.output == "0"
        assert out.bits_read == len(eta) + 3
        assert is_valid_run(out, len(eta) + 3)


def test_pad_reader_demands_fixed_count():
    # demand count depends only on the pad length, not the pad contents
    prog, (r, chi, eta) = padded_program(const_program("1"), 2)
    outs = {run(prog + pad, "", GAS).bits_read
            for pad in ("00", "01", "10", "11")}
    assert outs == {len(eta) + 2}


def test_print_echoes_pure_code_programs():
    print_code = encode_term(PRINT)
    for target in (COPY, const_program("10"), PAIRL):
        bits = encode_term(target)
        out = run(print_code + bits, "", GAS)
        assert out.status == Status.HALTED
        assert out.output == bits
        assert out.bits_read == len(bits)
        assert is_valid_run(out, len(bits))


def test_bake_data():
    baked = bake_data(ECHO1, "1")
    out = run(encode_term(baked), "", GAS)
    assert out.status == Status.HALTED
    assert out.output == "1" and out.bits_read == 0


def test_drop_reader():
    prog = drop_reader(2, COPY)
    out = run(encode_term(prog) + "10", "01", GAS)
    assert out.output == "01" and out.bits_read == 2
    assert drop_reader(0, COPY) is COPY

import hypothesis.strategies as st
import pytest
from hypothesis import given

from semantics.tags import (
    ELL, EMPTY, HBAR, IDENTITY, NEST_PAIR, PREPEND_THREAD, STRIP_THREAD, UNNEST_PAIR, UNWRAP_ARGUMENT,
    WRAP_ARGUMENT, OuterTag, Pipe, check_wellformed, closing, constant, decode_tag, join_thread, opening,
    parse_token, seq_decode, seq_encode, split_thread, thread, thread_layer, thread_strip, validate_inner,
)
from utils.errors import TagError


@st.composite
def outer_tags(draw, depth=0, size=3):
    tokens = []
    for i in range(draw(st.integers(1, 3))):
        if i:
            tokens.append(HBAR)
        if size > 0 and draw(st.booleans()):
            tokens.append(opening(depth))
            tokens.extend(draw(outer_tags(depth + 1, size - 1)).tokens)
            tokens.append(closing(depth))
        else:
            tokens.extend([ELL] * draw(st.integers(0, 2)))
    return OuterTag(tuple(tokens))


@st.composite
def local_tags(draw):
    """Tags that open with a thread, as every exponential move does."""
    return thread(draw(outer_tags())) + draw(outer_tags())


def test_codec_round_trip_small_codes():
    for n in range(2000):
        assert seq_encode(seq_decode(n)) == n


@given(st.lists(st.integers(0, 50), max_size=5))
def test_codec_round_trip_sequences(values):
    assert seq_decode(seq_encode(values)) == tuple(values)


def test_codec_is_injective_on_short_sequences():
    seen = {}
    for a in range(6):
        for b in range(6):
            for seq in ((a,), (a, b), (b, a, 0)):
                code = seq_encode(seq)
                assert seen.setdefault(code, seq) == seq


@pytest.mark.parametrize(
    "word, expected",
    [
        ("", (0,)),
        ("l l l", (3,)),
        ("h", (0, 0)),
        ("l l h l", (2, 1)),
        ("[0 ]0 h", (1, 0)),
        ("[0 l ]0", (3,)),
        ("[0 h ]0", (2,)),
        ("[0 [1 ]1 ]0", (3,)),
        ("[0 l l ]0 h l", (6, 1)),
    ],
)
def test_decode_tag(word, expected):
    assert decode_tag(OuterTag.parse(word)) == expected


@pytest.mark.parametrize("word", ["]0", "[0 l", "[1 ]1", "[0 ]0 l", "l [0 ]0", "[0 ]1"])
def test_malformed_tags_are_rejected(word):
    verdict = check_wellformed(OuterTag.parse(word))
    assert not verdict
    assert verdict.reason


def test_bad_tokens_and_inner_tags():
    with pytest.raises(TagError):
        parse_token("x")
    with pytest.raises(TagError):
        validate_inner("WQ")
    assert validate_inner("WENS") == "WENS"


@given(outer_tags())
def test_generated_tags_are_wellformed_and_print_back(e):
    assert check_wellformed(e)
    assert OuterTag.parse(str(e)) == e


@given(outer_tags())
def test_thread_decodes_to_a_pair(f):
    assert decode_tag(thread(f)) == (seq_encode(decode_tag(f)), 0)


@given(outer_tags())
def test_enter_then_leave_thread(e):
    entered = PREPEND_THREAD.apply(e)
    assert entered == thread() + e
    assert STRIP_THREAD.apply(entered) == e


def test_leave_thread_needs_a_thread():
    with pytest.raises(TagError):
        STRIP_THREAD.apply(OuterTag.parse("l h"))


def test_nest_and_unnest_pair():
    flat = OuterTag.parse("[0 l ]0 h [0 ]0 h l")
    nested = NEST_PAIR.apply(flat)
    assert nested == OuterTag.parse("[0 [1 l ]1 h [1 ]1 ]0 h l")
    assert UNNEST_PAIR.apply(nested) == flat


def test_wrap_and_unwrap_argument():
    flat = OuterTag.parse("[0 ]0 h [0 l ]0 h l")
    wrapped = WRAP_ARGUMENT.apply(flat)
    assert wrapped == OuterTag.parse("[0 [1 l ]1 ]0 h l")
    assert UNWRAP_ARGUMENT.apply(wrapped) == flat


def test_constant_and_pipe():
    tag = thread(OuterTag.of(ELL))
    assert constant(tag).apply(OuterTag.parse("l l h")) == tag
    assert Pipe(PREPEND_THREAD, STRIP_THREAD).apply(OuterTag.parse("l h")) == OuterTag.parse("l h")
    assert IDENTITY.apply(EMPTY) == EMPTY


@given(outer_tags(), local_tags(), st.sampled_from(["A", "B"]))
def test_split_inverts_join(f, local, side):
    joined = join_thread(f, local, side)
    assert check_wellformed(joined)
    assert split_thread(joined, side) == (f, local)
    assert thread_strip(side).apply(joined) == local


@given(outer_tags(), local_tags(), st.sampled_from(["A", "B"]), st.sampled_from(["A", "B"]))
def test_thread_layer_moves_a_tag_between_sides(f, local, src, out):
    assert thread_layer(src, out, IDENTITY).apply(join_thread(f, local, src)) == join_thread(f, local, out)


def test_thread_layer_runs_the_local_rewrite():
    f, local = OuterTag.of(ELL), thread()
    out = thread_layer("B", "B", STRIP_THREAD).apply(join_thread(f, local, "B"))
    assert out == thread(f)

import pytest
from hypothesis import given, strategies as st

from bitlabel import (
    EMPTY,
    Field,
    FieldLayout,
    Label,
    LabelReader,
    ceil_log2,
    concat,
    field_width,
    format_label_file,
    format_label_line,
    get_uint,
    loglog,
    minimal_binary,
    pack_fields,
    pad_to,
    parse_label_file,
    parse_label_line,
    put_uint,
    split_fields,
)
from errors import InvalidParams, MalformedInput, OutOfRange, Overflow, TooLong, ZeroNotEncodable


@pytest.mark.parametrize("n, expected", [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (16, 4), (17, 5), (10**6, 20)])
def test_ceil_log2(n, expected):
    assert ceil_log2(n) == expected


def test_ceil_log2_rejects_zero():
    with pytest.raises(InvalidParams):
        ceil_log2(0)
    with pytest.raises(ValueError):
        ceil_log2(-3)


@pytest.mark.parametrize("n, expected", [(1, 1), (4, 1), (16, 2), (256, 3), (1 << 16, 4)])
def test_loglog(n, expected):
    assert loglog(n) == expected


def test_field_width_never_zero():
    assert field_width(1) == 1
    assert field_width(2) == 1
    assert field_width(10) == 4


def test_put_and_get_fields():
    label = put_uint(put_uint(EMPTY, 5, 3), 2, 4)
    assert label.bit_len == 7
    assert label.bits == "1010010"
    assert get_uint(label, 0, 3) == 5
    assert get_uint(label, 3, 4) == 2


def test_zero_width_field_is_empty():
    assert put_uint(EMPTY, 0, 0) == EMPTY


def test_put_overflow():
    with pytest.raises(Overflow):
        put_uint(EMPTY, 8, 3)


def test_get_out_of_range():
    with pytest.raises(OutOfRange):
        get_uint(Label(4, 3), 2, 3)


def test_codec_errors_are_value_errors():
    with pytest.raises(ValueError):
        put_uint(EMPTY, 1, 0)


def test_minimal_binary():
    assert minimal_binary(1) == ("1", 1)
    assert minimal_binary(6) == ("110", 3)
    with pytest.raises(ZeroNotEncodable):
        minimal_binary(0)


def test_pad_to():
    assert pad_to(Label.from_bits("101"), 6).bits == "101000"
    with pytest.raises(TooLong):
        pad_to(Label(5, 0), 4)


def test_concat_and_reader():
    label = concat(Label.from_bits("11"), Label.from_bits("0101"))
    reader = LabelReader(label)
    assert reader.read(2) == 3
    assert reader.remaining == 4
    assert reader.read_label(4) == Label.from_bits("0101")


def test_split_fields():
    assert split_fields(pack_fields([3, 1, 2], 2), 3) == (3, 1, 2)
    with pytest.raises(OutOfRange):
        split_fields(Label(5, 0), 2)


@pytest.mark.parametrize(
    "bits, digits",
    [("", "0"), ("00", "0"), ("1", "8"), ("000000", "00"), ("001000", "20"), ("100001", "84"), ("1111", "f")],
)
def test_hex_form(bits, digits):
    label = Label.from_bits(bits)
    assert label.to_hex() == digits
    assert Label.from_hex(len(bits), digits) == label


def test_from_hex_rejects_bad_padding_and_length():
    with pytest.raises(MalformedInput):
        Label.from_hex(2, "1")
    with pytest.raises(MalformedInput):
        Label.from_hex(6, "0")


def bit_labels(max_bits):
    return st.integers(0, max_bits).flatmap(lambda n: st.builds(Label, st.just(n), st.integers(0, (1 << n) - 1)))


@given(bit_labels(4096))
def test_hex_roundtrip(label):
    assert Label.from_hex(label.bit_len, label.to_hex()) == label


@given(st.lists(bit_labels(40), max_size=30))
def test_label_order_matches_serialized_form(items):
    def serialized(label):
        _, bit_len, digits = format_label_line("x", label).split()
        return int(bit_len), digits

    assert sorted(items) == sorted(items, key=serialized)


def test_field_layout_with_dependent_width():
    layout = FieldLayout(
        (
            Field("sep", 2),
            Field("rank", lambda decoded: decoded["sep"]),
            Field("inner", 3, raw=True),
        ),
        total=10,
    )
    label = layout.pack({"sep": 3, "rank": 5, "inner": Label.from_bits("110")})
    assert label.bit_len == 10
    decoded = layout.unpack(label)
    assert decoded["sep"] == 3
    assert decoded["rank"] == 5
    assert decoded["inner"] == Label.from_bits("110")


def test_label_file_roundtrip():
    text = format_label_file("adj-sib-kannan", 5, [("a", Label.from_bits("001000")), ("b", Label(6, 0))])
    assert text == "labels scheme=adj-sib-kannan n=5\na 6 20\nb 6 00\n"
    scheme, n, labels = parse_label_file(text)
    assert (scheme, n) == ("adj-sib-kannan", 5)
    assert labels["a"] == Label.from_bits("001000")


def test_parse_label_file_errors():
    with pytest.raises(MalformedInput):
        parse_label_file("")
    with pytest.raises(MalformedInput):
        parse_label_file("forest n=3\n")
    with pytest.raises(MalformedInput):
        parse_label_line("a 6")
    with pytest.raises(MalformedInput):
        parse_label_file("labels scheme=conn-sorted n=0\na 1 0\n")


def test_empty_label_prints_epsilon():
    assert str(EMPTY) == "ε"
    assert str(Label.from_bits("10")) == "10"

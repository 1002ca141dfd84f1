# bitlabel.py
# Exact-width bit-string labels and the field codecs every scheme is built from.
# A label is an immutable (bit_len, value) pair: the bits are the binary form of
# `value`, most-significant first, left-padded with zeros to exactly `bit_len` bits.
# Fields are appended big-endian, so a label grows by shifting left, like a
# packed-bits writer that never has to flush.

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

from errors import InvalidParams, MalformedInput, OutOfRange, Overflow, TooLong, ZeroNotEncodable

# Labels longer than this are never produced by any scheme in the project.
MAX_LABEL_BITS = 1 << 20


# --- Logarithms (log n is always the ceiling of log2 n) ---

def ceil_log2(n: int) -> int:
    """Return ⌈log₂ n⌉ for n ≥ 1 (0 for n = 1)."""
    if n < 1:
        raise InvalidParams(f"ceil_log2 is defined for n >= 1, got {n}")
    return (n - 1).bit_length()


def loglog(n: int) -> int:
    """Return ⌈log₂(max(2, ⌈log₂ n⌉))⌉, the project's reading of log log n."""
    return ceil_log2(max(2, ceil_log2(n)))


def field_width(n: int) -> int:
    """Width of an id field able to hold 0..n-1, never less than one bit."""
    return max(1, ceil_log2(max(1, n)))


# --- Label value type ---

@dataclass(frozen=True, order=True, slots=True)
class Label:
    """A bit string with an explicit length.

    Ordering compares the length first and then the value, which is the same
    order as the serialized `<bit_len> <hex>` form.
    """

    bit_len: int
    value: int

    def __post_init__(self):
        if self.bit_len < 0 or self.bit_len > MAX_LABEL_BITS:
            raise TooLong(f"label length {self.bit_len} outside 0..{MAX_LABEL_BITS}")
        if self.value < 0 or self.value >> self.bit_len:
            raise Overflow(f"value {self.value} does not fit in {self.bit_len} bits")

    @property
    def bits(self) -> str:
        if self.bit_len == 0:
            return ""
        return format(self.value, f"0{self.bit_len}b")

    @classmethod
    def from_bits(cls, bits: str) -> "Label":
        if bits and set(bits) - {"0", "1"}:
            raise MalformedInput(f"not a bit string: {bits!r}")
        return cls(len(bits), int(bits, 2) if bits else 0)

    def to_hex(self) -> str:
        """Hex digits of the bits MSB-first, last nibble zero-padded."""
        nibbles = max(1, -(-self.bit_len // 4))
        shifted = self.value << (nibbles * 4 - self.bit_len)
        return format(shifted, f"0{nibbles}x")

    @classmethod
    def from_hex(cls, bit_len: int, digits: str) -> "Label":
        try:
            raw = int(digits, 16)
        except ValueError as e:
            raise MalformedInput(f"bad hex digits {digits!r}") from e
        nibbles = max(1, -(-bit_len // 4))
        if len(digits) != nibbles:
            raise MalformedInput(f"expected {nibbles} hex digit(s) for {bit_len} bits, got {digits!r}")
        spare = nibbles * 4 - bit_len
        if raw & ((1 << spare) - 1):
            raise MalformedInput(f"padding bits of {digits!r} are not zero")
        return cls(bit_len, raw >> spare)

    def __str__(self) -> str:
        return self.bits or "ε"


EMPTY = Label(0, 0)


# --- Field codec ---

def put_uint(label: Label, value: int, width: int) -> Label:
    """Append `value` as a big-endian field of exactly `width` bits."""
    if width < 0:
        raise Overflow(f"negative width {width}")
    if value < 0 or value >> width:
        raise Overflow(f"{value} does not fit in {width} bit(s)")
    return Label(label.bit_len + width, (label.value << width) | value)


def get_uint(label: Label, offset: int, width: int) -> int:
    """Read the `width`-bit field starting `offset` bits from the left."""
    if offset < 0 or width < 0 or offset + width > label.bit_len:
        raise OutOfRange(f"bits [{offset}, {offset + width}) outside a {label.bit_len}-bit label")
    shift = label.bit_len - offset - width
    return (label.value >> shift) & ((1 << width) - 1)


def concat(left: Label, right: Label) -> Label:
    return Label(left.bit_len + right.bit_len, (left.value << right.bit_len) | right.value)


def slice_label(label: Label, offset: int, width: int) -> Label:
    return Label(width, get_uint(label, offset, width))


def pack_fields(values: Iterable[int], width: int) -> Label:
    """Append every value as a `width`-bit field; one Label is built at the end."""
    if width < 0:
        raise Overflow(f"negative width {width}")
    bit_len = packed = 0
    for value in values:
        if value < 0 or value >> width:
            raise Overflow(f"{value} does not fit in {width} bit(s)")
        packed = (packed << width) | value
        bit_len += width
    return Label(bit_len, packed)


def split_fields(label: Label, count: int) -> tuple[int, ...]:
    """Split a label into `count` equal-width fields; the width is bit_len / count."""
    if label.bit_len % count:
        raise OutOfRange(f"{label.bit_len}-bit label is not {count} equal fields")
    width = label.bit_len // count
    mask = (1 << width) - 1
    value = label.value
    return tuple((value >> (width * i)) & mask for i in range(count - 1, -1, -1))


def minimal_binary(value: int) -> tuple[str, int]:
    """Binary form of a positive integer without leading zeros, and its width."""
    if value < 1:
        raise ZeroNotEncodable(f"minimal binary needs a positive integer, got {value}")
    width = value.bit_length()
    return format(value, "b"), width


def pad_to(label: Label, total: int) -> Label:
    """Append zero bits until the label is exactly `total` bits long."""
    if label.bit_len > total:
        raise TooLong(f"label of {label.bit_len} bits exceeds total width {total}")
    return Label(total, label.value << (total - label.bit_len))


class LabelReader:
    """Forward cursor over a label, reading fixed-width fields in order."""

    def __init__(self, label: Label):
        self.label = label
        self.offset = 0

    def read(self, width: int) -> int:
        value = get_uint(self.label, self.offset, width)
        self.offset += width
        return value

    def read_label(self, width: int) -> Label:
        return Label(width, self.read(width))

    @property
    def remaining(self) -> int:
        return self.label.bit_len - self.offset


# --- Field layouts ---

Width = Union[int, Callable[[Mapping[str, int]], int]]


@dataclass(frozen=True)
class Field:
    """One field of a layout.

    `width` is either a fixed number of bits or a function of the fields decoded
    so far (plus whatever global parameters the caller closed over). A `raw`
    field carries a nested Label instead of an integer.
    """

    name: str
    width: Width
    raw: bool = False

    def resolve(self, decoded: Mapping[str, int]) -> int:
        return self.width(decoded) if callable(self.width) else self.width


@dataclass(frozen=True)
class FieldLayout:
    fields: tuple[Field, ...]
    total: int | None = None

    def pack(self, values: Mapping[str, Union[int, Label]]) -> Label:
        label = EMPTY
        decoded: dict = {}
        for f in self.fields:
            width = f.resolve(decoded)
            value = values[f.name]
            if f.raw:
                if value.bit_len != width:
                    raise Overflow(f"field {f.name}: nested label has {value.bit_len} bits, layout wants {width}")
                label = concat(label, value)
            else:
                label = put_uint(label, value, width)
            decoded[f.name] = value
        if self.total is not None:
            label = pad_to(label, self.total)
        return label

    def unpack(self, label: Label) -> dict:
        if self.total is not None and label.bit_len != self.total:
            raise OutOfRange(f"layout expects {self.total} bits, label has {label.bit_len}")
        reader = LabelReader(label)
        decoded: dict = {}
        for f in self.fields:
            width = f.resolve(decoded)
            decoded[f.name] = reader.read_label(width) if f.raw else reader.read(width)
        return decoded


# --- Label text files ---

def format_label_line(external_id: str, label: Label) -> str:
    return f"{external_id} {label.bit_len} {label.to_hex()}"


def parse_label_line(line: str) -> tuple[str, Label]:
    parts = line.split()
    if len(parts) != 3:
        raise MalformedInput(f"label line needs 3 tokens: {line!r}")
    external_id, bit_len, digits = parts
    try:
        length = int(bit_len)
    except ValueError as e:
        raise MalformedInput(f"bad bit length in {line!r}") from e
    return external_id, Label.from_hex(length, digits)


def format_label_header(scheme: str, n: int) -> str:
    return f"labels scheme={scheme} n={n}"


def format_label_file(scheme: str, n: int, items: Iterable[tuple[str, Label]]) -> str:
    lines = [format_label_header(scheme, n)]
    lines.extend(format_label_line(ext, label) for ext, label in items)
    return "\n".join(lines) + "\n"


def parse_label_file(text: str) -> tuple[str, int, dict[str, Label]]:
    """Return (scheme name, n, external id -> label) from a label file."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise MalformedInput("empty label file")
    header = lines[0].split()
    params = dict(token.split("=", 1) for token in header[1:] if "=" in token)
    if not header or header[0] != "labels" or "scheme" not in params or "n" not in params:
        raise MalformedInput(f"bad label header: {lines[0]!r}")
    try:
        n = int(params["n"])
    except ValueError as e:
        raise MalformedInput(f"bad n in header: {lines[0]!r}") from e
    if n < 1:
        raise MalformedInput(f"label files need n >= 1: {lines[0]!r}")
    labels: dict[str, Label] = {}
    for line in lines[1:]:
        ext, label = parse_label_line(line)
        labels[ext] = label
    return params["scheme"], n, labels

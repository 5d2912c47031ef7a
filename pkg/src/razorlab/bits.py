"""Bit strings and their serialized forms.

Bit strings are plain Python strings over '0'/'1'; the empty string is the
empty bit string. Two interchange formats:

* ASCII text: the string itself, as printed in CLI output and CSV cells.
* Packed binary: 8 bits per byte, most significant bit first within each
  byte, followed by a single trailing byte holding the number of bits used
  in the final data byte (0 for the empty string). This keeps files
  self-describing without a leading header.

Pairs use a unary length header: pair(x, y) = '1'*len(x) + '0' + x + y.
The header makes the encoding injective; the second component runs to the
end of whatever container carries the pair.
"""

from .errors import MalformedCode

_BITSET = frozenset("01")


def check_bits(b):
    """Validate that `b` is a str over '0'/'1'; returns it unchanged."""
    if not isinstance(b, str) or (b and not _BITSET.issuperset(b)):
        raise ValueError(f"not a bit string: {b!r}")
    return b


def to_packed(bits):
    """Pack a bit string into bytes with the trailing-length byte."""
    check_bits(bits)
    out = bytearray()
    for i in range(0, len(bits), 8):
        chunk = bits[i:i + 8]
        out.append(int(chunk.ljust(8, "0"), 2))
    tail = len(bits) % 8
    if bits and tail == 0:
        tail = 8
    out.append(tail)
    return bytes(out)


def from_packed(data):
    """Inverse of to_packed."""
    if len(data) < 1:
        raise ValueError("packed bit string needs at least the trailing byte")
    tail = data[-1]
    body = data[:-1]
    if tail == 0:
        if body:
            raise ValueError("nonzero body with zero trailing length")
        return ""
    if not 1 <= tail <= 8 or not body:
        raise ValueError(f"bad trailing-length byte {tail}")
    bits = "".join(f"{byte:08b}" for byte in body)
    drop = 8 - tail
    if drop and any(c == "1" for c in bits[len(bits) - drop:]):
        raise ValueError("nonzero padding in final byte")
    return bits[:len(bits) - drop] if drop else bits


def write_bits(path, bits):
    with open(path, "wb") as fh:
        fh.write(to_packed(bits))


def read_bits(path):
    with open(path, "rb") as fh:
        return from_packed(fh.read())


def bits_to_hex(bits):
    """Compact CSV form: '<bitlen>:<hex of packed body>' ('0:' for empty)."""
    packed = to_packed(bits)
    return f"{len(bits)}:{packed[:-1].hex()}"


def hex_to_bits(text):
    length_s, _, hexpart = text.partition(":")
    length = int(length_s)
    body = bytes.fromhex(hexpart)
    tail = length % 8
    if length and tail == 0:
        tail = 8
    return from_packed(body + bytes([tail]))


def encode_pair(x, y):
    """Self-delimiting pair: unary header for len(x), then x, then y."""
    check_bits(x)
    check_bits(y)
    return "1" * len(x) + "0" + x + y


def decode_pair(bits):
    """Inverse of encode_pair; consumes the whole input."""
    check_bits(bits)
    header = 0
    while header < len(bits) and bits[header] == "1":
        header += 1
    if header == len(bits):
        raise MalformedCode(header, "pair header missing terminator")
    start = header + 1
    end = start + header
    if end > len(bits):
        raise MalformedCode(len(bits), "pair first component truncated")
    return bits[start:end], bits[end:]


def int_to_bits(n):
    """Binary expansion of a non-negative integer, '0' for zero."""
    if n < 0:
        raise ValueError("negative integer has no binary expansion here")
    return format(n, "b")

"""Bit-level sink/source and Golomb codeword primitives.

Bits are MSB-first within each byte.  A Golomb codeword for a mapped
residual M with parameter m is the unary quotient (floor(M/m) ones, then a
zero) followed by the remainder M mod m in minimal binary.  m = 1 emits the
unary part only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Longest legal unary run while decoding; anything above is corruption.
DEFAULT_MAX_RUN = 1 << 20


class CorruptStreamError(ValueError):
    """Bitstream ended early or contains an impossible codeword."""


@dataclass(frozen=True)
class GolombParam:
    """Coding parameter m with the derived minimal-binary split.

    ``bits`` is ceil(lg m); remainders below ``threshold`` = 2**bits - m are
    written in bits-1 binary digits, the rest (offset by threshold) in bits.
    """

    m: int
    bits: int = field(init=False, repr=False, compare=False)
    threshold: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"golomb parameter must be >= 1, got {self.m}")
        b = (self.m - 1).bit_length()
        object.__setattr__(self, "bits", b)
        object.__setattr__(self, "threshold", (1 << b) - self.m)


def minimal_binary_length(k: int, g: GolombParam) -> int:
    """Bits needed for remainder k under g (0 for m = 1)."""
    if not 0 <= k < g.m:
        raise ValueError(f"remainder {k} out of range for m={g.m}")
    return g.bits - 1 if k < g.threshold else g.bits


def code_length(m_value: int, g: GolombParam) -> int:
    """Total codeword length in bits for mapped residual m_value."""
    if m_value < 0:
        raise ValueError(f"mapped residual must be non-negative, got {m_value}")
    j, k = divmod(m_value, g.m)
    return j + 1 + (g.bits - 1 if k < g.threshold else g.bits)


class BitSink:
    """Accumulates bits MSB-first; finish() pads the last byte with zeros."""

    def __init__(self) -> None:
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0  # bits currently in _acc (0..7 between writes)
        self.bit_length = 0
        self._done = False

    def write_bits(self, value: int, nbits: int) -> None:
        if nbits < 0 or value >> nbits:
            raise ValueError(f"value {value} does not fit in {nbits} bits")
        if self._done:
            raise ValueError("sink already finished")
        if nbits == 0:
            return
        acc = (self._acc << nbits) | value
        nacc = self._nacc + nbits
        self.bit_length += nbits
        buf = self._buf
        while nacc >= 8:
            nacc -= 8
            buf.append((acc >> nacc) & 0xFF)
        self._acc = acc & ((1 << nacc) - 1)
        self._nacc = nacc

    def write_unary(self, j: int) -> None:
        """j ones followed by a terminating zero."""
        if j < 0:
            raise ValueError(f"unary value must be non-negative, got {j}")
        while j >= 32:
            self.write_bits(0xFFFFFFFF, 32)
            j -= 32
        self.write_bits(((1 << j) - 1) << 1, j + 1)

    def write_minimal_binary(self, k: int, g: GolombParam) -> None:
        if not 0 <= k < g.m:
            raise ValueError(f"remainder {k} out of range for m={g.m}")
        if g.bits == 0:
            return
        if k < g.threshold:
            self.write_bits(k, g.bits - 1)
        else:
            self.write_bits(k + g.threshold, g.bits)

    def finish(self) -> bytes:
        """Zero-pad to a whole byte and return the bytes written so far."""
        if not self._done:
            if self._nacc:
                self._buf.append((self._acc << (8 - self._nacc)) & 0xFF)
                self._acc = 0
                self._nacc = 0
            self._done = True
        return bytes(self._buf)


class BitSource:
    """Reads bits MSB-first from a bytes-like payload."""

    def __init__(self, data, max_run: int = DEFAULT_MAX_RUN) -> None:
        self._data = bytes(data)
        self._pos = 0
        self._nbits = 8 * len(self._data)
        self._max_run = max_run

    @property
    def bits_left(self) -> int:
        return self._nbits - self._pos

    def read_bits(self, nbits: int) -> int:
        if nbits < 0:
            raise ValueError("cannot read a negative number of bits")
        pos = self._pos
        if pos + nbits > self._nbits:
            raise CorruptStreamError("unexpected end of stream")
        data = self._data
        result = 0
        while nbits > 0:
            avail = 8 - (pos & 7)
            take = avail if avail < nbits else nbits
            chunk = (data[pos >> 3] >> (avail - take)) & ((1 << take) - 1)
            result = (result << take) | chunk
            pos += take
            nbits -= take
        self._pos = pos
        return result

    def read_unary(self) -> int:
        data = self._data
        nbits = self._nbits
        pos = self._pos
        limit = self._max_run
        count = 0
        while True:
            if pos >= nbits:
                raise CorruptStreamError("unexpected end of stream")
            if (pos & 7) == 0:
                # skip solid 0xff bytes in one step
                while pos + 8 <= nbits and data[pos >> 3] == 0xFF:
                    pos += 8
                    count += 8
                    if count > limit:
                        raise CorruptStreamError(f"unary run exceeds {limit} bits")
                if pos >= nbits:
                    raise CorruptStreamError("unexpected end of stream")
            if (data[pos >> 3] >> (7 - (pos & 7))) & 1:
                pos += 1
                count += 1
                if count > limit:
                    raise CorruptStreamError(f"unary run exceeds {limit} bits")
            else:
                pos += 1
                break
        self._pos = pos
        return count

    def read_minimal_binary(self, g: GolombParam) -> int:
        if g.bits == 0:
            return 0
        v = self.read_bits(g.bits - 1)
        if v < g.threshold:
            return v
        return ((v << 1) | self.read_bits(1)) - g.threshold

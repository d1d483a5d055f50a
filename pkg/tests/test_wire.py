import math
import socket

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qflip.wire import (
    BBit,
    Conn,
    Detect,
    ErrorMsg,
    Hello,
    Lost,
    Measure,
    Prepare,
    RevealMsg,
    VerdictMsg,
    WireError,
    decode_frame,
    encode_frame,
)

angles = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
bits = st.integers(min_value=0, max_value=1)
texts = st.text(max_size=200)

messages = st.one_of(
    st.builds(Prepare, angles),
    st.builds(Measure, angles),
    st.builds(Detect, bits),
    st.just(Lost()),
    st.builds(BBit, bits),
    st.builds(RevealMsg, bits, bits),
    st.builds(VerdictMsg, st.integers(min_value=0, max_value=2)),
    st.builds(Hello, st.integers(min_value=0, max_value=255), bits, texts),
    st.builds(ErrorMsg, texts),
)


class TestLayout:
    def test_b_bit_layout_is_bit_exact(self):
        assert encode_frame(BBit(1)) == bytes([0x02, 0x00, 0x00, 0x00, 0x04, 0x01])

    def test_lost_is_five_bytes(self):
        assert encode_frame(Lost()) == bytes([0x01, 0x00, 0x00, 0x00, 0x03])

    def test_prepare_carries_little_endian_double(self):
        import struct

        angle = math.pi / 4
        frame = encode_frame(Prepare(angle))
        assert frame[:4] == bytes([0x09, 0x00, 0x00, 0x00])
        assert frame[4] == 0x00
        assert struct.unpack("<d", frame[5:])[0] == angle


class TestRoundTrip:
    @settings(max_examples=500, deadline=None)
    @given(messages)
    def test_decode_inverts_encode(self, msg):
        assert decode_frame(encode_frame(msg)) == msg

    def test_bulk_random_messages(self):
        # ten thousand draws through the codec, deterministic seed
        import random

        pyrng = random.Random(1234)
        count = 0
        for _ in range(10_000):
            choice = pyrng.randrange(6)
            if choice == 0:
                msg = Prepare(pyrng.uniform(-10, 10))
            elif choice == 1:
                msg = Measure(pyrng.uniform(-10, 10))
            elif choice == 2:
                msg = Detect(pyrng.randrange(2))
            elif choice == 3:
                msg = BBit(pyrng.randrange(2))
            elif choice == 4:
                msg = RevealMsg(pyrng.randrange(2), pyrng.randrange(2))
            else:
                msg = VerdictMsg(pyrng.randrange(3))
            assert decode_frame(encode_frame(msg)) == msg
            count += 1
        assert count == 10_000


class TestDecodeErrors:
    def test_unknown_type(self):
        frame = bytes([0x01, 0x00, 0x00, 0x00, 0xFF])
        with pytest.raises(WireError, match="unknown type"):
            decode_frame(frame)

    def test_truncated(self):
        with pytest.raises(WireError, match="truncated"):
            decode_frame(bytes([0x02, 0x00]))

    def test_length_mismatch(self):
        frame = bytes([0x05, 0x00, 0x00, 0x00, 0x04, 0x01])  # claims 5, carries 2
        with pytest.raises(WireError, match="length mismatch"):
            decode_frame(frame)

    def test_payload_size_enforced(self):
        frame = bytes([0x03, 0x00, 0x00, 0x00, 0x04, 0x01, 0x00])  # B_BIT with 2 bytes
        with pytest.raises(WireError, match="length mismatch"):
            decode_frame(frame)

    def test_non_finite_angle_rejected(self):
        import struct

        payload = struct.pack("<d", math.nan)
        frame = bytes([0x09, 0x00, 0x00, 0x00, 0x00]) + payload
        with pytest.raises(WireError, match="non-finite"):
            decode_frame(frame)

    def test_bad_bit_rejected(self):
        frame = bytes([0x02, 0x00, 0x00, 0x00, 0x02, 0x07])  # DETECT outcome 7
        with pytest.raises(WireError, match="outcome"):
            decode_frame(frame)

    def test_encode_rejects_non_finite(self):
        with pytest.raises(WireError):
            encode_frame(Measure(math.inf))


class TestConn:
    def test_socketpair_round_trip(self):
        left, right = socket.socketpair()
        a, b = Conn(left, timeout=5), Conn(right, timeout=5)
        a.send(Prepare(1.25))
        a.send(BBit(0))
        assert b.recv() == Prepare(1.25)
        assert b.recv() == BBit(0)
        b.send(ErrorMsg("bye"))
        assert a.recv() == ErrorMsg("bye")
        a.close()
        b.close()

    def test_closed_peer_raises(self):
        left, right = socket.socketpair()
        a, b = Conn(left, timeout=5), Conn(right, timeout=5)
        a.close()
        with pytest.raises(ConnectionError):
            b.recv()
        b.close()

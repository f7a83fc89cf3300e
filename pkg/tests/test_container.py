import struct

import numpy as np
import pytest

from actcomp import codecs
from actcomp.baselines import LowRankPayload, TopKPayload
from actcomp.container import HEADER_SIZE, decode, encode, read_payload, write_payload
from actcomp.errors import BadMagic, CorruptPayload, UnsupportedVersion
from actcomp.fourier import FourierPayload


@pytest.mark.parametrize("codec", codecs.CODECS)
@pytest.mark.parametrize("mode", ["corner", "centered"])
def test_round_trip_all_codecs(smooth64, codec, mode, tmp_path):
    p = codecs.compress(smooth64, codec, 8, mode)
    write_payload(p, tmp_path / "x.fcmp")
    raw = (tmp_path / "x.fcmp").read_bytes()
    assert len(raw) == HEADER_SIZE + p.nbytes
    q = read_payload(tmp_path / "x.fcmp")
    assert type(q) is type(p)
    assert encode(q) == raw
    assert codecs.decompress(q) == codecs.decompress(p)


def test_header_layout(smooth64):
    raw = encode(codecs.compress(smooth64, "fourier", 8, "centered"))
    magic, version, codec, mode, S, D, ks, kd = struct.unpack_from("<4sHBBIIII", raw)
    assert (magic, version, codec, mode, S, D, ks, kd) == (b"FCMP", 1, 0, 1, 64, 64, 16, 16)
    raw = encode(codecs.compress(smooth64, "topk", 8))
    assert struct.unpack_from("<BB", raw, 6) == (1, 0)
    assert struct.unpack_from("<II", raw, 16) == (64 * 64 * 4 // 8 // 8, 0)
    raw = encode(codecs.compress(smooth64, "qr", 8))
    assert struct.unpack_from("<BB", raw, 6) == (3, 0)
    assert struct.unpack_from("<I", raw, 16) == (4,)


def test_fourier_body_is_interleaved_f32(smooth64):
    p = codecs.compress(smooth64, "fourier", 32)
    body = np.frombuffer(encode(p)[HEADER_SIZE:], "<f4")
    flat = p.coeffs.ravel()
    np.testing.assert_array_equal(body[0::2], flat.real)
    np.testing.assert_array_equal(body[1::2], flat.imag)


def test_topk_body_entries():
    p = TopKPayload(2, 2, np.array([1, 3], np.uint32), np.array([5, -2], np.float32))
    body = encode(p)[HEADER_SIZE:]
    assert struct.unpack("<IfIf", body) == (1, 5.0, 3, -2.0)


def test_lowrank_body_order():
    left = np.arange(3, dtype=np.float32).reshape(3, 1)
    right = np.arange(10, 14, dtype=np.float32).reshape(1, 4)
    body = encode(LowRankPayload(3, 4, 2, left, right))[HEADER_SIZE:]
    np.testing.assert_array_equal(np.frombuffer(body, "<f4"), [0, 1, 2, 10, 11, 12, 13])


def test_rejects_bad_input(smooth64):
    good = encode(codecs.compress(smooth64, "fourier", 8))
    with pytest.raises(BadMagic):
        decode(b"XXXX" + good[4:])
    with pytest.raises(UnsupportedVersion):
        decode(good[:4] + struct.pack("<H", 9) + good[6:])
    with pytest.raises(CorruptPayload):
        decode(good[:-1])
    with pytest.raises(CorruptPayload):
        decode(good[:6] + bytes([7]) + good[7:])
    bad_k = good[:16] + struct.pack("<II", 65, 16) + good[24:]
    with pytest.raises(CorruptPayload):
        decode(bad_k)

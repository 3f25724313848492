"""Keccak-256, the pre-NIST padding variant exposed by the EVM's SHA3 opcode.

hashlib only ships the final SHA3 (domain byte 0x06); contract-compatible
digests need the original 0x01 padding, so the permutation is implemented
here and jitted with numba for throughput.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

_ROUND_CONSTANTS = np.array(
    [
        0x0000000000000001, 0x0000000000008082, 0x800000000000808A,
        0x8000000080008000, 0x000000000000808B, 0x0000000080000001,
        0x8000000080008081, 0x8000000000008009, 0x000000000000008A,
        0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
        0x000000008000808B, 0x800000000000008B, 0x8000000000008089,
        0x8000000000008003, 0x8000000000008002, 0x8000000000000080,
        0x000000000000800A, 0x800000008000000A, 0x8000000080008081,
        0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
    ],
    dtype=np.uint64,
)

# Rotation offset of lane (x, y), flattened as x + 5*y.
_ROTATIONS = np.array(
    [
        0, 1, 62, 28, 27,
        36, 44, 6, 55, 20,
        3, 10, 43, 25, 39,
        41, 45, 15, 21, 8,
        18, 2, 61, 56, 14,
    ],
    dtype=np.uint64,
)

_RATE_BYTES = 136  # 1088-bit rate / 512-bit capacity
_RATE_LANES = 17


@njit(cache=True)
def _keccak_f1600(state, rc, rot):
    c = np.empty(5, dtype=np.uint64)
    d = np.empty(5, dtype=np.uint64)
    b = np.empty(25, dtype=np.uint64)
    for rnd in range(24):
        # theta
        for x in range(5):
            c[x] = state[x] ^ state[x + 5] ^ state[x + 10] ^ state[x + 15] ^ state[x + 20]
        for x in range(5):
            t = c[(x + 1) % 5]
            d[x] = c[(x + 4) % 5] ^ ((t << uint64(1)) | (t >> uint64(63)))
        for x in range(5):
            for y in range(5):
                state[x + 5 * y] ^= d[x]
        # rho and pi
        for x in range(5):
            for y in range(5):
                r = rot[x + 5 * y]
                v = state[x + 5 * y]
                if r != uint64(0):
                    v = (v << r) | (v >> (uint64(64) - r))
                b[y + 5 * ((2 * x + 3 * y) % 5)] = v
        # chi
        for x in range(5):
            for y in range(5):
                state[x + 5 * y] = b[x + 5 * y] ^ ((~b[(x + 1) % 5 + 5 * y]) & b[(x + 2) % 5 + 5 * y])
        # iota
        state[0] ^= rc[rnd]


def keccak256(data: bytes) -> bytes:
    """Digest of ``data`` under Keccak-256 (32 bytes)."""
    padded = bytearray(data)
    padded += b"\x00" * (_RATE_BYTES - (len(data) % _RATE_BYTES))
    padded[len(data)] ^= 0x01
    padded[-1] ^= 0x80
    state = np.zeros(25, dtype=np.uint64)
    for off in range(0, len(padded), _RATE_BYTES):
        block = np.frombuffer(bytes(padded[off : off + _RATE_BYTES]), dtype=np.uint64)
        state[:_RATE_LANES] ^= block
        _keccak_f1600(state, _ROUND_CONSTANTS, _ROTATIONS)
    return state[:4].tobytes()

"""Secret-key material: parameters, generation, compression, file format.

A secret key has four parts:

* ``info_indices`` — K synthetic-channel indices (1-based) drawn from the
  most-reliable ``pool`` channels of the design-time reliability table;
* ``lfsr_state`` — the (N-K)-bit initial fill of the syndrome register;
* ``scrambler`` — a nonsingular K x K block-circulant matrix S built from
  k0 x k0 circulant blocks of size l x l, each block drawn with ``mu_s``
  ones in its first row (plus a diagonal parity lift, see below);
* ``permutation`` — an N x N block-diagonal matrix P of n0 cyclic-shift
  blocks, one shift offset per block.

Both matrices compress to a few positions/offsets, which is what the
serialized key stores.

Scrambler lift
--------------
With k0 >= 2 equal-weight circulant blocks the naive construction is
always singular: every block of size l = 2**a satisfies x**l - 1 =
(x + 1)**l over GF(2), so rank deficiency reduces to the k0 x k0 matrix
of block weight parities, which is constant (mu_s mod 2) in every cell
and therefore has rank <= 1.  We therefore XOR the identity onto the
drawn matrix when k0 >= 2 ("diagonal parity lift"): diagonal blocks stay
circulant with first-row weight mu_s +/- 1, the compressed form is
unchanged, and the parity argument now guarantees nonsingularity
whenever mu_s is even, or mu_s is odd with k0 even.  Draws are still
rejection-tested and a generation error is raised if no nonsingular
draw is found.
"""
from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from .gf2 import GF2Matrix, SingularMatrixError
from .lfsr import validate_taps
from .polar import ReliabilityTable, bhattacharyya

MAGIC = b"PKC1"

DEFAULT_MAX_SCRAMBLER_ATTEMPTS = 100


class KeyFormatError(ValueError):
    """Malformed, corrupted or inconsistent key material."""


class KeyGenerationError(RuntimeError):
    """Random generation failed to produce a usable component."""


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KeyParams:
    """Public system parameters (everything except the secret draws).

    Attributes
    ----------
    n : int
        log2 of the block length N.
    k0, n0 : int
        Scrambler / permutation block counts; K = k0*l, N = n0*l.
    l : int
        Circulant block size.
    mu_s : int
        Ones per first row in each drawn scrambler block.
    epsilon : float
        Design erasure probability used to rank channels.
    pool : int
        Size of the reliable-channel pool the secret indices are drawn
        from (the pool is public, the chosen subset is not).
    taps : tuple of int
        Feedback polynomial exponents of the degree-(N-K) syndrome LFSR.
    """

    n: int
    k0: int
    n0: int
    l: int
    mu_s: int
    epsilon: float
    pool: int
    taps: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "taps", validate_taps(self.taps))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if min(self.k0, self.n0, self.l, self.mu_s) < 1:
            raise ValueError("k0, n0, l, mu_s must be positive")
        if self.n0 * self.l != self.block_length:
            raise ValueError(f"n0*l = {self.n0 * self.l} must equal N = {self.block_length}")
        if self.k0 >= self.n0:
            raise ValueError("k0 must be < n0 (the code must have redundancy)")
        if self.mu_s > self.l:
            raise ValueError("mu_s cannot exceed the block size l")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if not self.num_info <= self.pool <= self.block_length:
            raise ValueError("pool must satisfy K <= pool <= N")
        if self.taps[0] != self.block_length - self.num_info:
            raise ValueError(
                f"LFSR degree {self.taps[0]} must equal N - K = "
                f"{self.block_length - self.num_info}"
            )

    @property
    def block_length(self) -> int:
        return 1 << self.n

    @property
    def num_info(self) -> int:
        return self.k0 * self.l

    @property
    def num_frozen(self) -> int:
        return self.block_length - self.num_info

    @property
    def uses_lift(self) -> bool:
        """Whether the diagonal parity lift applies to the scrambler."""
        return self.k0 >= 2

    def reliability_table(self) -> ReliabilityTable:
        return bhattacharyya(self.n, self.epsilon)


def reference_params() -> KeyParams:
    """The headline parameter set: N=1024, K=768, eps=0.05, pool=819."""
    return KeyParams(
        n=10, k0=6, n0=8, l=128, mu_s=2, epsilon=0.05, pool=819,
        taps=(256, 254, 251, 246),
    )


# ---------------------------------------------------------------------------
# component generation
# ---------------------------------------------------------------------------

def select_secret_indices(
    table: ReliabilityTable, pool: int, k: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw K distinct indices uniformly from the ``pool`` best channels."""
    if not k <= pool <= table.block_length:
        raise ValueError("need K <= pool <= N")
    prefix = table.pi[:pool]
    chosen = rng.choice(prefix, size=k, replace=False)
    return np.sort(chosen.astype(np.int64))


def _assemble_scrambler(positions: np.ndarray, params: KeyParams, lift: bool) -> np.ndarray:
    """Dense K x K scrambler from (k0, k0, mu_s) 0-based first-row positions."""
    k0, l = params.k0, params.l
    dense = np.zeros((params.num_info, params.num_info), dtype=np.uint8)
    shifts = np.arange(l)
    for bj in range(k0):
        for bk in range(k0):
            cols = (positions[bj, bk][None, :] + shifts[:, None]) % l
            block = np.zeros((l, l), dtype=np.uint8)
            block[shifts[:, None], cols] = 1
            dense[bj * l : (bj + 1) * l, bk * l : (bk + 1) * l] = block
    if lift:
        dense[np.arange(params.num_info), np.arange(params.num_info)] ^= 1
    return dense


def gen_scrambler(
    params: KeyParams,
    rng: np.random.Generator,
    max_attempts: int = DEFAULT_MAX_SCRAMBLER_ATTEMPTS,
) -> GF2Matrix:
    """Draw a nonsingular block-circulant scrambler.

    Each of the k0*k0 blocks gets ``mu_s`` uniformly-drawn first-row
    positions; with k0 >= 2 the diagonal parity lift is applied (see
    module docstring).  Draws failing the invertibility check are
    rejected; ``KeyGenerationError`` after ``max_attempts``.
    """
    k0, l, mu = params.k0, params.l, params.mu_s
    for _ in range(max_attempts):
        positions = np.empty((k0, k0, mu), dtype=np.int64)
        for bj in range(k0):
            for bk in range(k0):
                positions[bj, bk] = np.sort(rng.choice(l, size=mu, replace=False))
        dense = _assemble_scrambler(positions, params, params.uses_lift)
        candidate = GF2Matrix.from_dense(dense)
        if candidate.is_nonsingular():
            return candidate
    raise KeyGenerationError(
        f"no nonsingular scrambler found in {max_attempts} attempts "
        f"(k0={k0}, l={l}, mu_s={mu})"
    )


def compress_scrambler(scrambler: GF2Matrix, params: KeyParams) -> tuple[int, ...]:
    """Block first-row positions (1-based) of a structured scrambler.

    Blocks are scanned row-major; positions within a block are ascending.
    Raises ``KeyFormatError`` if the matrix is not block-circulant of the
    declared shape (after removing the diagonal parity lift).
    """
    k = params.num_info
    if (scrambler.nrows, scrambler.ncols) != (k, k):
        raise KeyFormatError(f"scrambler must be {k}x{k}")
    dense = scrambler.to_dense()
    if params.uses_lift:
        dense = dense.copy()
        dense[np.arange(k), np.arange(k)] ^= 1
    k0, l, mu = params.k0, params.l, params.mu_s
    out: list[int] = []
    shifts = np.arange(l)
    for bj in range(k0):
        for bk in range(k0):
            block = dense[bj * l : (bj + 1) * l, bk * l : (bk + 1) * l]
            pos = np.nonzero(block[0])[0]
            if pos.size != mu:
                raise KeyFormatError(
                    f"block ({bj},{bk}) first-row weight {pos.size} != mu_s = {mu}"
                )
            expect = np.zeros((l, l), dtype=np.uint8)
            expect[shifts[:, None], (pos[None, :] + shifts[:, None]) % l] = 1
            if not np.array_equal(block, expect):
                raise KeyFormatError(f"block ({bj},{bk}) is not circulant")
            out.extend(int(p) + 1 for p in pos)
    return tuple(out)


def decompress_scrambler(positions: tuple[int, ...], params: KeyParams) -> GF2Matrix:
    """Rebuild the scrambler matrix from 1-based first-row positions."""
    k0, l, mu = params.k0, params.l, params.mu_s
    expected = mu * k0 * k0
    if len(positions) != expected:
        raise KeyFormatError(f"expected {expected} scrambler positions, got {len(positions)}")
    arr = np.asarray(positions, dtype=np.int64).reshape(k0, k0, mu)
    if arr.min() < 1 or arr.max() > l:
        raise KeyFormatError(f"scrambler positions must lie in 1..{l}")
    for bj in range(k0):
        for bk in range(k0):
            blockpos = arr[bj, bk]
            if np.unique(blockpos).size != mu or np.any(np.diff(blockpos) <= 0):
                raise KeyFormatError(
                    f"positions of block ({bj},{bk}) must be distinct and ascending"
                )
    dense = _assemble_scrambler(arr - 1, params, params.uses_lift)
    return GF2Matrix.from_dense(dense)


def perm_offsets_to_dst(offsets: np.ndarray, l: int) -> np.ndarray:
    """Destination map of the block-shift permutation.

    ``dst[i]`` is the column holding the 1 in row ``i``; applying the
    permutation to a row vector x gives ``y[dst] = x``.
    """
    offsets = np.asarray(offsets, dtype=np.int64)
    r = np.arange(l)
    return (np.arange(offsets.size)[:, None] * l + (r[None, :] + offsets[:, None]) % l).reshape(-1)


def gen_permutation(params: KeyParams, rng: np.random.Generator) -> GF2Matrix:
    """Draw the block-diagonal permutation: one cyclic shift per block."""
    offsets = rng.integers(0, params.l, size=params.n0, dtype=np.int64)
    return decompress_permutation(tuple(int(f) for f in offsets), params)


def compress_permutation(perm: GF2Matrix, params: KeyParams) -> tuple[int, ...]:
    """Per-block shift offsets (0-based) of a structured permutation."""
    size = params.block_length
    if (perm.nrows, perm.ncols) != (size, size):
        raise KeyFormatError(f"permutation must be {size}x{size}")
    dense = perm.to_dense()
    l = params.l
    offsets: list[int] = []
    for b in range(params.n0):
        block = dense[b * l : (b + 1) * l, b * l : (b + 1) * l]
        pos = np.nonzero(block[0])[0]
        if pos.size != 1:
            raise KeyFormatError(f"permutation block {b} first row must have a single 1")
        offsets.append(int(pos[0]))
    rebuilt = decompress_permutation(tuple(offsets), params)
    if rebuilt != perm:
        raise KeyFormatError("permutation is not block-diagonal cyclic-shift structured")
    return tuple(offsets)


def decompress_permutation(offsets: tuple[int, ...], params: KeyParams) -> GF2Matrix:
    """Rebuild the permutation matrix from per-block shift offsets."""
    if len(offsets) != params.n0:
        raise KeyFormatError(f"expected {params.n0} permutation offsets, got {len(offsets)}")
    arr = np.asarray(offsets, dtype=np.int64)
    if arr.min() < 0 or arr.max() >= params.l:
        raise KeyFormatError(f"permutation offsets must lie in 0..{params.l - 1}")
    size = params.block_length
    dst = perm_offsets_to_dst(arr, params.l)
    dense = np.zeros((size, size), dtype=np.uint8)
    dense[np.arange(size), dst] = 1
    return GF2Matrix.from_dense(dense)


def gen_lfsr_state(params: KeyParams, rng: np.random.Generator) -> np.ndarray:
    """Uniform non-zero initial fill for the syndrome register."""
    while True:
        state = rng.integers(0, 2, size=params.num_frozen, dtype=np.uint8)
        if state.any():
            return state


# ---------------------------------------------------------------------------
# key objects
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SecretKey:
    """Fully materialized secret key."""

    params: KeyParams
    info_indices: np.ndarray = field(repr=False)
    lfsr_state: np.ndarray = field(repr=False)
    scrambler: GF2Matrix = field(repr=False)
    permutation: GF2Matrix = field(repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SecretKey):
            return NotImplemented
        return (
            self.params == other.params
            and np.array_equal(self.info_indices, other.info_indices)
            and np.array_equal(self.lfsr_state, other.lfsr_state)
            and self.scrambler == other.scrambler
            and self.permutation == other.permutation
        )


@dataclass(frozen=True, eq=False)
class CompressedKey:
    """Compact key: matrices replaced by positions/offsets."""

    params: KeyParams
    info_indices: np.ndarray = field(repr=False)
    lfsr_state: np.ndarray = field(repr=False)
    scrambler_positions: tuple[int, ...]
    permutation_offsets: tuple[int, ...]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompressedKey):
            return NotImplemented
        return (
            self.params == other.params
            and np.array_equal(self.info_indices, other.info_indices)
            and np.array_equal(self.lfsr_state, other.lfsr_state)
            and self.scrambler_positions == other.scrambler_positions
            and self.permutation_offsets == other.permutation_offsets
        )


def generate_key(params: KeyParams, rng: np.random.Generator) -> SecretKey:
    """Draw a complete secret key for the given parameters."""
    table = params.reliability_table()
    indices = select_secret_indices(table, params.pool, params.num_info, rng)
    state = gen_lfsr_state(params, rng)
    scrambler = gen_scrambler(params, rng)
    permutation = gen_permutation(params, rng)
    return SecretKey(
        params=params,
        info_indices=indices,
        lfsr_state=state,
        scrambler=scrambler,
        permutation=permutation,
    )


def compress_key(key: SecretKey) -> CompressedKey:
    return CompressedKey(
        params=key.params,
        info_indices=key.info_indices.copy(),
        lfsr_state=key.lfsr_state.copy(),
        scrambler_positions=compress_scrambler(key.scrambler, key.params),
        permutation_offsets=compress_permutation(key.permutation, key.params),
    )


def decompress_key(ck: CompressedKey) -> SecretKey:
    return SecretKey(
        params=ck.params,
        info_indices=np.asarray(ck.info_indices, dtype=np.int64).copy(),
        lfsr_state=np.asarray(ck.lfsr_state, dtype=np.uint8).copy(),
        scrambler=decompress_scrambler(ck.scrambler_positions, ck.params),
        permutation=decompress_permutation(ck.permutation_offsets, ck.params),
    )


def validate_key(key: SecretKey, table: ReliabilityTable | None = None) -> None:
    """Check every key invariant; raises ``KeyFormatError`` on failure."""
    p = key.params
    idx = np.asarray(key.info_indices, dtype=np.int64)
    if idx.shape != (p.num_info,):
        raise KeyFormatError(f"expected {p.num_info} secret indices, got {idx.shape}")
    if np.any(np.diff(idx) <= 0):
        raise KeyFormatError("secret indices must be strictly ascending")
    if idx.min() < 1 or idx.max() > p.block_length:
        raise KeyFormatError(f"secret indices must lie in 1..{p.block_length}")
    if table is None:
        table = p.reliability_table()
    pool_set = set(int(i) for i in table.pi[: p.pool])
    outside = [int(i) for i in idx if int(i) not in pool_set]
    if outside:
        raise KeyFormatError(
            f"secret indices {outside[:4]}... fall outside the {p.pool}-channel pool"
        )
    state = np.asarray(key.lfsr_state, dtype=np.uint8)
    if state.shape != (p.num_frozen,):
        raise KeyFormatError(f"LFSR state must have length {p.num_frozen}")
    if state.max(initial=0) > 1 or not state.any():
        raise KeyFormatError("LFSR state must be a non-zero bit vector")
    compress_scrambler(key.scrambler, p)  # structural check
    if not key.scrambler.is_nonsingular():
        raise KeyFormatError("scrambler matrix is singular")
    compress_permutation(key.permutation, p)


# ---------------------------------------------------------------------------
# serialization (.pkc)
# ---------------------------------------------------------------------------

def serialize_key(key: SecretKey) -> bytes:
    """Binary key file: header, compressed components, CRC32 trailer.

    All integers little-endian; bit vectors packed LSB-first; indices
    and positions stored 0-based on disk.
    """
    ck = compress_key(key)
    p = ck.params
    out = bytearray()
    out += MAGIC
    out += struct.pack("<BHHHBBB", p.n, p.num_info, p.pool, p.l, p.n0, p.k0, p.mu_s)
    out += struct.pack("<d", p.epsilon)
    out += struct.pack("<B", len(p.taps))
    out += struct.pack(f"<{len(p.taps)}H", *p.taps)
    out += np.packbits(ck.lfsr_state, bitorder="little").tobytes()
    out += struct.pack(f"<{p.num_info}H", *(int(i) - 1 for i in ck.info_indices))
    out += struct.pack(
        f"<{len(ck.scrambler_positions)}H", *(s - 1 for s in ck.scrambler_positions)
    )
    out += struct.pack(f"<{p.n0}H", *ck.permutation_offsets)
    out += struct.pack("<I", zlib.crc32(bytes(out)))
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise KeyFormatError("key file truncated")
        chunk = self.data[self.pos : self.pos + count]
        self.pos += count
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def deserialize_key(data: bytes) -> SecretKey:
    """Parse and fully validate a serialized key.

    Raises ``KeyFormatError`` for bad magic, truncation, CRC mismatch,
    out-of-range fields, malformed structure, or indices outside the
    reliability pool.
    """
    if len(data) < len(MAGIC) + 4:
        raise KeyFormatError("key file too short")
    if data[: len(MAGIC)] != MAGIC:
        raise KeyFormatError(f"bad magic {data[:4]!r}")
    body, (crc_stored,) = data[:-4], struct.unpack("<I", data[-4:])
    crc = zlib.crc32(body)
    if crc != crc_stored:
        raise KeyFormatError(f"CRC mismatch (stored {crc_stored:#010x}, computed {crc:#010x})")

    r = _Reader(body)
    r.take(len(MAGIC))
    n, k, pool, l, n0, k0, mu_s = r.unpack("<BHHHBBB")
    (epsilon,) = r.unpack("<d")
    (tap_count,) = r.unpack("<B")
    taps = r.unpack(f"<{tap_count}H")
    try:
        params = KeyParams(
            n=n, k0=k0, n0=n0, l=l, mu_s=mu_s, epsilon=epsilon, pool=pool,
            taps=tuple(int(t) for t in taps),
        )
    except ValueError as exc:
        raise KeyFormatError(f"inconsistent key parameters: {exc}") from exc
    if params.num_info != k:
        raise KeyFormatError(f"stored K = {k} does not match k0*l = {params.num_info}")

    state_bytes = r.take((params.num_frozen + 7) // 8)
    state_bits = np.unpackbits(
        np.frombuffer(state_bytes, dtype=np.uint8), bitorder="little"
    )
    if state_bits[params.num_frozen :].any():
        raise KeyFormatError("padding bits of the LFSR state must be zero")
    lfsr_state = state_bits[: params.num_frozen].copy()

    raw_idx = r.unpack(f"<{k}H")
    info_indices = np.asarray(raw_idx, dtype=np.int64) + 1
    n_pos = params.mu_s * params.k0 * params.k0
    raw_pos = r.unpack(f"<{n_pos}H")
    scrambler_positions = tuple(int(s) + 1 for s in raw_pos)
    raw_off = r.unpack(f"<{params.n0}H")
    if r.pos != len(body):
        raise KeyFormatError(f"{len(body) - r.pos} unexpected trailing bytes")

    ck = CompressedKey(
        params=params,
        info_indices=info_indices,
        lfsr_state=lfsr_state,
        scrambler_positions=scrambler_positions,
        permutation_offsets=tuple(int(f) for f in raw_off),
    )
    try:
        key = decompress_key(ck)
    except (KeyFormatError, ValueError) as exc:
        raise KeyFormatError(str(exc)) from exc
    try:
        validate_key(key)
    except SingularMatrixError as exc:  # pragma: no cover - defensive
        raise KeyFormatError(str(exc)) from exc
    return key

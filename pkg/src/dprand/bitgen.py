"""Uniform bit-generator handles and the per-worker stream manager.

A handle is single-owner: hand it between threads if you like, never share
one. Parallel randomness comes from spawn_streams, which derives mutually
independent generators and fails closed when two of them would start from
identical seed material (the cloned-VM hazard).
"""
from __future__ import annotations

import enum
import json
import secrets
import threading
import time
from hashlib import sha256

from .drbg import SEED_LEN, CtrDrbg, DrbgConfig
from .entropy import EntropyBlock, mix
from .errors import DuplicateSeed
from .mt19937 import Mt19937, MtState

_DOUBLE_SCALE = 2.0 ** -53


class Backend(enum.Enum):
    DRBG = "drbg"
    MT19937_INSECURE = "mt19937_insecure"


class GeneratorHandle:
    """Uniform 32/64-bit words and 53-bit doubles over a DRBG or (insecure) MT19937.

    words_emitted counts 32-bit words consumed, whatever the call mix:
    next_u32 is one word, next_u64 and next_double53 are two.
    """

    def __init__(self, backend: Backend, state, *, buffer_bytes: int = 65536):
        # not for direct use: the named constructors keep the insecure path loud
        self.backend = backend
        self.words_emitted = 0
        if backend is Backend.DRBG:
            self._drbg: CtrDrbg = state
            self._chunk = min(buffer_bytes, self._drbg.config.max_bytes_per_request)
            self._buf = b""
            self._pos = 0
        else:
            self._mt: Mt19937 = state

    @classmethod
    def from_drbg(cls, drbg: CtrDrbg, *, buffer_bytes: int = 65536) -> "GeneratorHandle":
        return cls(Backend.DRBG, drbg, buffer_bytes=buffer_bytes)

    @classmethod
    def from_drbg_seed(cls, seed_material: bytes | str,
                       config: DrbgConfig | None = None) -> "GeneratorHandle":
        return cls(Backend.DRBG, CtrDrbg(seed_material, config))

    @classmethod
    def insecure_mt19937(cls, seed: int) -> "GeneratorHandle":
        """Attack/testing backend only; the name is the warning label."""
        return cls(Backend.MT19937_INSECURE, Mt19937.from_seed(seed))

    @classmethod
    def insecure_mt19937_from_state(cls, state: MtState) -> "GeneratorHandle":
        return cls(Backend.MT19937_INSECURE, Mt19937(state))

    # --- byte plumbing (DRBG backend) ---

    def _take(self, n: int) -> bytes:
        out = bytearray()
        while n > 0:
            if self._pos >= len(self._buf):
                self._buf = self._drbg.generate(self._chunk)
                self._pos = 0
            take = min(n, len(self._buf) - self._pos)
            out += self._buf[self._pos:self._pos + take]
            self._pos += take
            n -= take
        return bytes(out)

    def reseed(self, seed_material: bytes | str) -> None:
        """Forward fresh seed material to the DRBG; buffered keystream is dropped."""
        if self.backend is not Backend.DRBG:
            raise TypeError("only DRBG-backed handles reseed")
        self._drbg.reseed(seed_material)
        self._buf = b""
        self._pos = 0

    # --- word interface ---

    def next_u32(self) -> int:
        if self.backend is Backend.MT19937_INSECURE:
            word = self._mt.next_u32()
        else:
            word = int.from_bytes(self._take(4), "little")
        self.words_emitted += 1
        return word

    def next_u64(self) -> int:
        """Two 32-bit draws on MT, low word first; 8 little-endian bytes on DRBG."""
        if self.backend is Backend.MT19937_INSECURE:
            lo = self._mt.next_u32()
            hi = self._mt.next_u32()
            self.words_emitted += 2
            return (hi << 32) | lo
        value = int.from_bytes(self._take(8), "little")
        self.words_emitted += 2
        return value

    def next_double53(self) -> float:
        """Uniform in [0, 1) with 53 random bits; consumes exactly one 64-bit word."""
        return (self.next_u64() >> 11) * _DOUBLE_SCALE

    def next_bytes(self, n: int) -> bytes:
        """Bulk byte draw for the statistical tests; n must be word-aligned."""
        if n % 4:
            raise ValueError("byte draws must be a multiple of 4 to keep word accounting exact")
        if self.backend is Backend.MT19937_INSECURE:
            words = n // 4
            out = b"".join(self._mt.next_u32().to_bytes(4, "little") for _ in range(words))
            self.words_emitted += words
            return out
        out = self._take(n)
        self.words_emitted += n // 4
        return out


class StreamAuditLog:
    """Seed fingerprints for every spawned stream, dumpable as JSON lines."""

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: list[dict] = []

    def append(self, stream_index: int, fingerprint_hex: str):
        with self._lock:
            self._entries.append({
                "stream_index": stream_index,
                "fingerprint_hex": fingerprint_hex,
                "timestamp": time.time(),
            })

    def entries(self) -> list[dict]:
        with self._lock:
            return list(self._entries)

    def fingerprints(self) -> set[str]:
        with self._lock:
            return {e["fingerprint_hex"] for e in self._entries}

    def dump_jsonl(self) -> str:
        return "\n".join(json.dumps(e) for e in self.entries())


STREAM_AUDIT = StreamAuditLog()


def _default_tag(nonce: str, index: int) -> str:
    return f"dprand/stream/{nonce}/{index}"


def spawn_streams(seed_root, count: int, *,
                  config: DrbgConfig | None = None,
                  nonce: str | None = None,
                  audit_log: StreamAuditLog | None = None,
                  tag_builder=_default_tag) -> list[GeneratorHandle]:
    """Derive `count` independent DRBG-backed handles.

    seed_root is a callable returning fresh EntropyBlocks per invocation
    (a SeedProvider fits). Each stream's seed is mix(blocks, tag) where the
    tag carries a per-run nonce and the stream index, so even byte-identical
    entropy cannot produce byte-identical streams. Identical seed material
    AND identical tags still collide, and that collision is the clone hazard:
    spawn fails closed with DuplicateSeed instead of returning twins.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if nonce is None:
        nonce = secrets.token_hex(16)
    log = audit_log if audit_log is not None else STREAM_AUDIT
    seen = log.fingerprints()
    handles = []
    for index in range(count):
        blocks = seed_root()
        if isinstance(blocks, EntropyBlock):
            blocks = [blocks]
        seed = mix(list(blocks), SEED_LEN, tag_builder(nonce, index))
        fingerprint = sha256(seed).hexdigest()
        if fingerprint in seen:
            raise DuplicateSeed(
                f"stream {index} derived already-seen seed material "
                f"(fingerprint {fingerprint[:16]}...); refusing to run twins")
        seen.add(fingerprint)
        log.append(index, fingerprint)
        handles.append(GeneratorHandle.from_drbg_seed(seed, config))
    return handles

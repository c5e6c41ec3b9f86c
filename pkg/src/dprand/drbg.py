"""AES-256 counter-mode DRBG (no derivation function) with a tunable reseed policy.

The no-df variant requires full-entropy 48-byte seed material (32-byte key
plus one 16-byte block); conditioning raw entropy down to full entropy is the
mixer's job, not ours. Reseeding is an out-of-band signal: this module never
reaches for entropy itself, so every seeding event stays auditable.
"""
from __future__ import annotations

from dataclasses import dataclass

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .errors import BadSeedLength, ReseedRequired, RequestTooLarge

KEY_LEN = 32
BLOCK_LEN = 16
SEED_LEN = KEY_LEN + BLOCK_LEN  # 48

MAX_REQUEST_LIMIT = 65536
_CTR_MOD = 1 << 128


@dataclass(frozen=True)
class DrbgConfig:
    """Reseed policy knobs.

    reseed_interval: generate calls allowed per (re)seed.
    max_bytes_per_request: cap on a single generate call.
    prediction_resistance: require fresh seed material before every generate.
    """

    reseed_interval: int = 65536
    max_bytes_per_request: int = MAX_REQUEST_LIMIT
    prediction_resistance: bool = False

    def __post_init__(self):
        if self.reseed_interval < 1:
            raise ValueError("reseed_interval must be >= 1")
        if not 1 <= self.max_bytes_per_request <= MAX_REQUEST_LIMIT:
            raise ValueError(f"max_bytes_per_request must be in [1, {MAX_REQUEST_LIMIT}]")


def _coerce_seed(seed_material: bytes | str, what: str = "seed material") -> bytes:
    """Accept raw bytes or hex text; enforce the exact no-df seed length."""
    if isinstance(seed_material, str):
        try:
            seed_material = bytes.fromhex(seed_material.strip())
        except ValueError as exc:
            raise BadSeedLength(f"{what} is not valid hex: {exc}") from None
    if len(seed_material) != SEED_LEN:
        raise BadSeedLength(f"{what} must be exactly {SEED_LEN} bytes, got {len(seed_material)}")
    return bytes(seed_material)


def _xor48(a: bytes, b: bytes) -> bytes:
    return (int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).to_bytes(SEED_LEN, "big")


class CtrDrbg:
    """One instantiation of the AES-256 no-df counter-mode DRBG.

    Single-owner: a state may move between threads but must never be shared.
    Run one instance per worker instead of locking one instance.
    """

    def __init__(self, seed_material: bytes | str, config: DrbgConfig | None = None):
        self.config = config or DrbgConfig()
        seed = _coerce_seed(seed_material)
        self._key = bytes(KEY_LEN)
        self._v = bytes(BLOCK_LEN)
        self._update(seed)
        self.reseed_counter = 1
        # instantiate counts as fresh entropy for the first PR-mode generate
        self._fresh_seed = True

    # AES-CTR over the whole 128-bit block is exactly the standard's
    # increment-then-encrypt loop; the keystream for k blocks starting at
    # V+1 leaves V advanced by k.
    def _keystream(self, nblocks: int) -> bytes:
        counter = (int.from_bytes(self._v, "big") + 1) % _CTR_MOD
        enc = Cipher(algorithms.AES(self._key), modes.CTR(counter.to_bytes(BLOCK_LEN, "big"))).encryptor()
        out = enc.update(bytes(BLOCK_LEN * nblocks))
        self._v = ((counter + nblocks - 1) % _CTR_MOD).to_bytes(BLOCK_LEN, "big")
        return out

    def _update(self, provided: bytes):
        temp = _xor48(self._keystream(3), provided)
        self._key = temp[:KEY_LEN]
        self._v = temp[KEY_LEN:]

    @property
    def key(self) -> bytes:
        return self._key

    @property
    def v(self) -> bytes:
        return self._v

    def reseed(self, seed_material: bytes | str) -> None:
        """Absorb fresh 48-byte seed material and reset the generate budget."""
        seed = _coerce_seed(seed_material)
        self._update(seed)
        self.reseed_counter = 1
        self._fresh_seed = True

    def generate(self, n: int, additional_input: bytes | None = None) -> bytes:
        """Return n bytes of keystream, then ratchet the state forward.

        Raises ReseedRequired when the reseed interval is spent, or on any
        repeat call in prediction-resistance mode; the caller must bring its
        own entropy via reseed().
        """
        if n < 0:
            raise ValueError("byte count must be >= 0")
        if n > self.config.max_bytes_per_request:
            raise RequestTooLarge(
                f"requested {n} bytes, limit is {self.config.max_bytes_per_request}")
        if self.config.prediction_resistance and not self._fresh_seed:
            raise ReseedRequired("prediction resistance demands a reseed before every generate")
        if self.reseed_counter > self.config.reseed_interval:
            raise ReseedRequired(
                f"{self.reseed_counter - 1} generates since last seed "
                f"(interval {self.config.reseed_interval})")

        if additional_input is not None:
            if len(additional_input) != SEED_LEN:
                raise ValueError(f"additional input must be exactly {SEED_LEN} bytes")
            self._update(additional_input)
            tail = additional_input
        else:
            tail = bytes(SEED_LEN)

        nblocks = (n + BLOCK_LEN - 1) // BLOCK_LEN
        out = self._keystream(nblocks)[:n] if nblocks else b""
        self._update(tail)
        self.reseed_counter += 1
        self._fresh_seed = False
        return out


def instantiate(seed_material: bytes | str, config: DrbgConfig | None = None) -> CtrDrbg:
    """Spell out the lifecycle verb; identical to the constructor."""
    return CtrDrbg(seed_material, config)

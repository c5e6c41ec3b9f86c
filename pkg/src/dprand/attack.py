"""State recovery against MT19937-protected sparse histograms.

Cells whose true count is known to be zero expose raw noise draws. When the
observation channel can map those draws back to generator words, 312 cells
yield the 624 words that pin the whole internal state; the 313th cell then
validates the reconstruction and every later cell's noise is predicted
exactly. Against the DRBG backend the same procedure must come out refuted,
and that difference is the entire point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ChannelNotInvertible
from .mechanisms import MechanismParams, NoisyMeasurement
from .mt19937 import Mt19937, MtState, N, untemper  # noqa: F401  (untemper is part of this surface)

MIN_CELLS = 313  # 312 cells of words plus one validation cell
_WORDS_NEEDED = 2 * (MIN_CELLS - 1)


@dataclass
class AttackTranscript:
    observed_cells: list[int]
    recovered_words: list[int]
    reconstructed_state: MtState | None
    validation: str  # "validated" | "refuted"
    predicted_cells: list[int] = field(default_factory=list)
    recovered_true_counts: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": "dprand.attack/1",
            "cells_observed": len(self.observed_cells),
            "validation": self.validation,
            "predicted_cells": self.predicted_cells,
            "recovered_true_counts": self.recovered_true_counts,
        }


class IdentityChannel:
    """Observed value IS the raw 64-bit draw; low word first per the bit generator."""

    name = "identity"

    def invert(self, value: int) -> tuple[int, int]:
        if not 0 <= value < 1 << 64:
            raise ChannelNotInvertible(f"value {value} is not a 64-bit word")
        return value & 0xFFFFFFFF, value >> 32

    def forward(self, u64: int) -> int:
        return u64


class GeometricInvCdfChannel:
    """Partial inverse of the inverse-CDF geometric fast path.

    A noise value k pins the uniform u to the interval (F(k-1), F(k)], which
    determines at most the 53 mantissa bits of the consumed word and usually
    far fewer; the 11 dropped low bits are never recoverable. This channel
    therefore reports per-cell recovered-bit coverage instead of words, and
    full state recovery through it stays out of reach.
    """

    name = "geometric-invcdf"

    def __init__(self, params: MechanismParams):
        self.params = params

    def coverage_bits(self, value: int) -> int:
        alpha = self.params.alpha
        c = 1.0 / (1.0 + alpha)

        def cdf(k: int) -> float:
            return c * alpha ** (-k) if k < 0 else 1.0 - c * alpha ** (k + 1)

        k = int(value)
        width = max(cdf(k) - cdf(k - 1), 2.0 ** -53)  # preimage interval of u
        return min(53, max(0, int(-math.log2(width))))

    def invert(self, value: int) -> tuple[int, int]:
        raise ChannelNotInvertible(
            "the inverse-CDF channel recovers at most 53 of 64 bits per draw; "
            "it reports coverage, not words",
            coverage=self.coverage_bits(value))


def reconstruct_state(outputs: list[int]) -> MtState:
    """Rebuild a state from exactly 624 consecutive outputs, any alignment.

    Untempering the window gives 624 consecutive values of the underlying
    linear recurrence; the cyclic in-place twist advances such a window
    correctly whether or not it started at a twist boundary, so no phase
    search is needed.
    """
    if len(outputs) != N:
        raise ValueError(f"state recovery needs exactly {N} consecutive outputs, got {len(outputs)}")
    return MtState([untemper(y & 0xFFFFFFFF) for y in outputs], N)


def predict_outputs(state: MtState, count: int) -> list[int]:
    clone = Mt19937(state)
    return [clone.next_u32() for _ in range(count)]


def _cell_values(measurements) -> list[int]:
    values = []
    for m in measurements:
        values.append(int(m.value) if isinstance(m, NoisyMeasurement) else int(m))
    return values


def sparse_histogram_attack(measurements, channel=None) -> AttackTranscript:
    """Run the known-zero-cells protocol over cell-ordered measurements.

    The first 312 cells are inverted to 624 words and the state is rebuilt;
    the 313th cell must match its forward prediction exactly for the
    transcript to come back validated. On validation, every remaining cell's
    noise is predicted and the true counts fall out by subtraction. A refuted
    transcript (as the DRBG backend must always produce) predicts nothing.
    """
    channel = channel or IdentityChannel()
    observed = _cell_values(measurements)
    if len(observed) < MIN_CELLS:
        raise ValueError(f"need >= {MIN_CELLS} cells ({len(observed)} supplied): "
                         f"{MIN_CELLS - 1} to invert plus one to validate")

    words: list[int] = []
    for value in observed[:MIN_CELLS - 1]:
        lo, hi = channel.invert(value)
        words.append(lo)
        words.append(hi)
    assert len(words) == _WORDS_NEEDED

    state = reconstruct_state(words)
    clone = Mt19937(state)

    def next_value() -> int:
        lo = clone.next_u32()
        hi = clone.next_u32()
        return channel.forward((hi << 32) | lo)

    check = next_value()
    if check != observed[MIN_CELLS - 1]:
        return AttackTranscript(observed, words, state, "refuted")

    predicted = [next_value() for _ in range(len(observed) - MIN_CELLS)]
    recovered = [obs - pred for obs, pred in zip(observed[MIN_CELLS:], predicted)]
    return AttackTranscript(observed, words, state, "validated", predicted, recovered)

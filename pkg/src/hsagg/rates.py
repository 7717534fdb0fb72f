"""Rate tuples: achievable corner, converse lower bounds, measured values.

All four rates count symbols per input symbol and are kept as exact
rationals; the equalities the acceptance suite asserts (1/B, 5/3, ...)
leave no room for floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .protocol import Transcript


@dataclass(frozen=True)
class RateTuple:
    """(user upload, relay upload, per-user key, source key) rates."""

    user_upload: Fraction
    relay_upload: Fraction
    user_key: Fraction
    source_key: Fraction

    def dominates(self, other: "RateTuple") -> bool:
        """Componentwise >=, i.e. this tuple lies inside other's region."""
        return (
            self.user_upload >= other.user_upload
            and self.relay_upload >= other.relay_upload
            and self.user_key >= other.user_key
            and self.source_key >= other.source_key
        )

    def gap_flags(self, bound: "RateTuple") -> tuple[str, ...]:
        names = ("RX", "RY", "RZ", "RZS")
        mine = (self.user_upload, self.relay_upload, self.user_key, self.source_key)
        theirs = (bound.user_upload, bound.relay_upload, bound.user_key, bound.source_key)
        return tuple(n for n, a, b in zip(names, mine, theirs) if a > b)

    def to_dict(self) -> dict:
        return {
            "RX": str(self.user_upload),
            "RY": str(self.relay_upload),
            "RZ": str(self.user_key),
            "RZS": str(self.source_key),
        }


def _check_params(K: int, B: int) -> None:
    # K >= 2 matches the protocol; the B = K corner divides by K - 1
    if K < 2 or not 1 <= B <= K:
        raise ValueError(f"invalid parameters K={K}, B={B}")


def achievable_rates(K: int, B: int) -> RateTuple:
    """The corner achieved by the constructed schemes."""
    _check_params(K, B)
    if B <= K - 1:
        return RateTuple(
            user_upload=Fraction(1),
            relay_upload=Fraction(1, B),
            user_key=Fraction(1, B),
            source_key=max(Fraction(1), Fraction(K, B) - 1),
        )
    return RateTuple(
        user_upload=Fraction(1),
        relay_upload=Fraction(1, K - 1),
        user_key=Fraction(1, K - 1),
        source_key=Fraction(1),
    )


def converse_bounds(K: int, B: int) -> RateTuple:
    """Componentwise lower bounds valid for every scheme."""
    _check_params(K, B)
    return RateTuple(
        user_upload=Fraction(1),
        relay_upload=max(Fraction(1, B), Fraction(1, K - 1)),
        user_key=Fraction(1, B),
        source_key=max(Fraction(1), Fraction(K, B) - 1),
    )


def measured_rates(transcript: Transcript, L: int) -> RateTuple:
    """Symbol counts from a transcript, normalized by the input length."""
    K = len(transcript.relay_symbols)
    return RateTuple(
        user_upload=Fraction(transcript.user_symbols, L),
        relay_upload=Fraction(sum(transcript.relay_symbols.values()), K * L),
        user_key=Fraction(transcript.key_symbols, L),
        source_key=Fraction(transcript.source_key_symbols, L),
    )

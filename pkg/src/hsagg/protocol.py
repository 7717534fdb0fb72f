"""One aggregation round: sample keys, encode, relay, decode.

Inputs of length L are processed in independent blocks of block_size
symbols (L must be a multiple; no padding, since padding would distort
the rate identities the audits assert).  Per block, every user sends one
symbol to each associated relay, reusing a single key symbol across its
outgoing messages; every relay forwards the sum of what it received; the
server multiplies the relay symbols by the recovery matrix and reads off
the blockwise input sum.

For B = K the scheme is the B = K-1 design with the last outgoing link
of each user disabled; the disabled link carries an explicit empty
message so transcripts and rate accounting can see it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

from .code_design import CodeDesign, build_code_design, check_points, default_points
from .gf import Matrix, PrimeField
from .key_design import (
    ConstructionError,
    KeyDesign,
    ValidationReport,
    build_keys,
    select_field,
    validate_scheme,
)
from .topology import Topology, relays_of_user, users_of_relay


class SizeMismatchError(ValueError):
    pass


class MissingMessageError(LookupError):
    def __init__(self, sender: str, receiver: str):
        super().__init__(f"missing message from {sender} to {receiver}")


@dataclass(frozen=True, eq=False)
class SchemeParams:
    """Everything the protocol needs to run rounds, plus provenance.

    topo is the association actually coded: for requested B = K it is the
    inner (K, K-1) topology and requested_B records the original K.
    """

    topo: Topology
    requested_B: int
    field: PrimeField
    input_coeffs: Mapping[tuple[int, int], tuple[int, ...]]
    key_coeffs: Matrix
    key_matrix: Matrix
    recovery: Matrix
    code: "CodeDesign | None" = dc_field(default=None, repr=False)
    keys: "KeyDesign | None" = dc_field(default=None, repr=False)
    validation: "ValidationReport | None" = dc_field(default=None, repr=False)

    @property
    def K(self) -> int:
        return self.topo.K

    @property
    def block_size(self) -> int:
        return self.topo.B

    @property
    def source_key_len(self) -> int:
        """Fresh source symbols consumed per block."""
        return self.key_matrix.ncols

    @property
    def reduced(self) -> bool:
        """True when requested B = K runs on the inner B = K-1 design."""
        return self.requested_B > self.topo.B

    def disabled_relay(self, k: int) -> "int | None":
        """The relay user k skips in the full-association reduction."""
        if not self.reduced:
            return None
        return (k - 2) % self.K + 1

    def disabled_user(self, i: int) -> "int | None":
        """The user whose link to relay i is disabled, if any."""
        if not self.reduced:
            return None
        return i % self.K + 1


@dataclass(frozen=True)
class Transcript:
    """Messages and symbol counts of one round, for rates and audits."""

    user_messages: Mapping[tuple[int, int], tuple[int, ...]]
    relay_messages: Mapping[int, tuple[int, ...]]
    input_len: int
    user_symbols: int
    relay_symbols: Mapping[int, int]
    key_symbols: int
    source_key_symbols: int

    def to_dict(self) -> dict:
        return {
            "input_len": self.input_len,
            "user_messages": {
                f"{k}->{i}": list(v) for (k, i), v in sorted(self.user_messages.items())
            },
            "relay_messages": {str(i): list(v) for i, v in sorted(self.relay_messages.items())},
            "sizes": {
                "per_user": self.user_symbols,
                "per_relay": {str(i): n for i, n in sorted(self.relay_symbols.items())},
                "per_user_key": self.key_symbols,
                "source_key": self.source_key_symbols,
            },
        }


@dataclass(frozen=True)
class RoundResult:
    recovered_sum: tuple[int, ...]
    transcript: Transcript


def build_scheme(
    K: int,
    B: int,
    q: "int | None" = None,
    seed: int = 0,
    points: "Sequence[int] | None" = None,
) -> SchemeParams:
    """Construct and validate a scheme for K users with association count B."""
    if K < 2:
        raise ValueError(f"need at least 2 users, got K={K}")
    if not 1 <= B <= K:
        raise ValueError(f"B must lie in [1, {K}], got {B}")
    field = select_field(K, B) if q is None else PrimeField(q)
    coded_B = B if B < K else K - 1
    topo = Topology(K, coded_B)
    pts = default_points(field, K) if points is None else check_points(field, K, tuple(points))
    code = build_code_design(topo, field, pts)
    keys = build_keys(K, B, field, pts, seed)
    report = validate_scheme(keys, code)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        raise ConstructionError(f"construction failed validation: {names}")
    return SchemeParams(
        topo=topo,
        requested_B=B,
        field=field,
        input_coeffs=code.input_coeffs,
        key_coeffs=keys.key_coeffs,
        key_matrix=keys.key_matrix,
        recovery=code.recovery,
        code=code,
        keys=keys,
        validation=report,
    )


def _block_count(params: SchemeParams, L: int) -> int:
    if L <= 0 or L % params.block_size:
        raise SizeMismatchError(
            f"input length {L} is not a positive multiple of block size {params.block_size}"
        )
    return L // params.block_size


def sample_source_key(params: SchemeParams, block_count: int, seed: int) -> tuple[int, ...]:
    """Fresh i.i.d. uniform source symbols, one segment per block."""
    rng = random.Random(seed)
    return tuple(
        rng.randrange(params.field.q)
        for _ in range(block_count * params.source_key_len)
    )


def derive_keys(params: SchemeParams, source_key: Sequence[int]) -> dict[int, tuple[int, ...]]:
    """Per-user keys, one symbol per block: row k of the key matrix times each segment."""
    n = params.source_key_len
    if len(source_key) == 0 or len(source_key) % n:
        raise SizeMismatchError(
            f"source key length {len(source_key)} is not a positive multiple of {n}"
        )
    q = params.field.q
    blocks = len(source_key) // n
    out = {}
    for k in params.topo.users():
        row = params.key_matrix.row(k - 1)
        out[k] = tuple(
            sum(h * source_key[t * n + m] for m, h in enumerate(row)) % q
            for t in range(blocks)
        )
    return out


def user_encode(
    params: SchemeParams, k: int, w: Sequence[int], z: Sequence[int]
) -> dict[int, tuple[int, ...]]:
    """Messages of user k: per block, coeffs . input-block + coeff * key."""
    bs = params.block_size
    blocks = _block_count(params, len(w))
    if len(z) != blocks:
        raise SizeMismatchError(f"expected {blocks} key symbols, got {len(z)}")
    q = params.field.q
    out: dict[int, tuple[int, ...]] = {}
    for i in relays_of_user(params.topo, k):
        coeffs = params.input_coeffs[(k, i)]
        lam = params.key_coeffs.rows[k - 1][i - 1]
        out[i] = tuple(
            (sum(c * w[t * bs + j] for j, c in enumerate(coeffs)) + lam * z[t]) % q
            for t in range(blocks)
        )
    disabled = params.disabled_relay(k)
    if disabled is not None:
        out[disabled] = ()
    return out


def relay_encode(
    params: SchemeParams, i: int, incoming: Mapping[int, Sequence[int]]
) -> tuple[int, ...]:
    """Symbolwise sum of the messages relay i received."""
    senders = users_of_relay(params.topo, i)
    msgs = []
    for k in senders:
        if k not in incoming:
            raise MissingMessageError(f"user {k}", f"relay {i}")
        msgs.append(incoming[k])
    silent = params.disabled_user(i)
    if silent is not None:
        if silent not in incoming:
            raise MissingMessageError(f"user {silent}", f"relay {i}")
        if len(incoming[silent]) != 0:
            raise SizeMismatchError(f"disabled link {silent}->{i} must carry an empty message")
    n = len(msgs[0])
    if any(len(m) != n for m in msgs):
        raise SizeMismatchError(f"relay {i} received messages of unequal length")
    q = params.field.q
    return tuple(sum(m[t] for m in msgs) % q for t in range(n))


def server_decode(params: SchemeParams, relay_msgs: Mapping[int, Sequence[int]]) -> tuple[int, ...]:
    """Recover the blockwise input sum by applying the recovery matrix."""
    for i in params.topo.relays():
        if i not in relay_msgs:
            raise MissingMessageError(f"relay {i}", "server")
    blocks = len(relay_msgs[1])
    if any(len(relay_msgs[i]) != blocks for i in params.topo.relays()):
        raise SizeMismatchError("relay messages of unequal length")
    q = params.field.q
    out = []
    for t in range(blocks):
        y = [relay_msgs[i][t] for i in params.topo.relays()]
        for b in range(params.block_size):
            col = params.recovery.column(b)
            out.append(sum(a * c for a, c in zip(y, col)) % q)
    return tuple(out)


def run_round(
    params: SchemeParams, inputs: Mapping[int, Sequence[int]], seed: int = 0
) -> RoundResult:
    """Execute one full round; the recovered sum is exact by construction."""
    K = params.K
    if sorted(inputs) != list(params.topo.users()):
        raise SizeMismatchError(f"inputs must cover users 1..{K}")
    L = len(inputs[1])
    if any(len(inputs[k]) != L for k in params.topo.users()):
        raise SizeMismatchError("all users must share one input length")
    blocks = _block_count(params, L)

    source_key = sample_source_key(params, blocks, seed)
    keys = derive_keys(params, source_key)

    user_msgs: dict[tuple[int, int], tuple[int, ...]] = {}
    for k in params.topo.users():
        for i, msg in user_encode(params, k, inputs[k], keys[k]).items():
            user_msgs[(k, i)] = msg

    relay_msgs = {
        i: relay_encode(
            params, i, {k: user_msgs[(k, i)] for k in _senders(params, i) if (k, i) in user_msgs}
        )
        for i in params.topo.relays()
    }
    recovered = server_decode(params, relay_msgs)

    transcript = Transcript(
        user_messages=user_msgs,
        relay_messages=relay_msgs,
        input_len=L,
        user_symbols=sum(len(m) for (k, _), m in user_msgs.items() if k == 1),
        relay_symbols={i: len(m) for i, m in relay_msgs.items()},
        key_symbols=blocks,
        source_key_symbols=blocks * params.source_key_len,
    )
    return RoundResult(recovered_sum=recovered, transcript=transcript)


def _senders(params: SchemeParams, i: int) -> tuple[int, ...]:
    senders = users_of_relay(params.topo, i)
    silent = params.disabled_user(i)
    return senders if silent is None else senders + (silent,)


def random_inputs(params: SchemeParams, L: int, seed: int) -> dict[int, tuple[int, ...]]:
    """Uniform inputs for simulation; one length-L vector per user."""
    _block_count(params, L)
    rng = random.Random(seed)
    return {
        k: tuple(rng.randrange(params.field.q) for _ in range(L))
        for k in params.topo.users()
    }


def direct_sum(params: SchemeParams, inputs: Mapping[int, Sequence[int]]) -> tuple[int, ...]:
    """Componentwise input sum, the oracle every decode is compared against."""
    q = params.field.q
    L = len(inputs[1])
    return tuple(sum(inputs[k][t] for k in params.topo.users()) % q for t in range(L))

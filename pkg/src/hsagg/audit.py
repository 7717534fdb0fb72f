"""Security audits: algebraic for any size, exhaustive and exact at toy size.

The algebraic checks are the literal hypotheses the security arguments
rest on: every relay's B masked messages carry B linearly independent key
rows, and the only relay-message combinations that cancel the keys are
the recovery combinations.

The exhaustive audits enumerate every realization of (inputs, source key)
and test the two independence statements on raw count tables.  A joint
table factorizes exactly (total * joint == marginal * marginal, in
integers) if and only if the mutual information is zero, so the verdicts
are exact and never thresholded.  State spaces above the cap are refused
rather than sampled.

This module also carries the worked 3-user instance over GF(3) as a
hard-coded golden scheme; its coefficients come from a manual design and
are intentionally not regenerated by the general constructions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf import Matrix, PrimeField
from .key_design import CheckResult
from .protocol import SchemeParams
from .topology import Topology, users_of_relay


class StateSpaceError(RuntimeError):
    def __init__(self, required: int, cap: int):
        self.required = required
        self.cap = cap
        super().__init__(f"state space of {required} realizations exceeds cap {cap}")


@dataclass(frozen=True)
class AuditReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }


# ---------------------------------------------------------------------------
# Algebraic checks
# ---------------------------------------------------------------------------


def relay_security_algebraic(params: SchemeParams, i: int) -> CheckResult:
    """Relay i's masks: scaled key rows of its senders must have rank B."""
    senders = users_of_relay(params.topo, i)
    q = params.field.q
    rows = []
    zero_coeff = False
    for k in senders:
        lam = params.key_coeffs.rows[k - 1][i - 1]
        if lam == 0:
            zero_coeff = True
        rows.append([lam * h % q for h in params.key_matrix.row(k - 1)])
    rank = Matrix(params.field, rows).rank()
    want = params.topo.B
    passed = not zero_coeff and rank == want
    return CheckResult(
        f"relay-security-algebraic[{i}]",
        passed,
        f"masked key rows rank {rank}/{want}"
        + (", zero coefficient on an associated link" if zero_coeff else ""),
    )


def server_security_algebraic(params: SchemeParams) -> CheckResult:
    """Key-canceling combinations must be exactly the recovery combinations."""
    K, B = params.K, params.topo.B
    masked = params.key_matrix.transpose() @ params.key_coeffs
    rank = masked.rank()
    cancels = (masked @ params.recovery).is_zero()
    null = masked.nullspace()
    null_dim = 0 if null is None else null.ncols
    spans = (
        null_dim == B
        and params.recovery.rank() == B
        and cancels
        and null is not None
        and null.hstack(params.recovery).rank() == B
    )
    passed = rank == K - B and spans
    return CheckResult(
        "server-security-algebraic",
        passed,
        f"masked rank {rank}/{K - B}, null dim {null_dim}/{B}, cancellation {cancels}",
    )


def algebraic_audit(params: SchemeParams) -> AuditReport:
    checks = [relay_security_algebraic(params, i) for i in params.topo.relays()]
    checks.append(server_security_algebraic(params))
    return AuditReport(tuple(checks))


# ---------------------------------------------------------------------------
# Exhaustive enumeration
# ---------------------------------------------------------------------------


class _StateSpace:
    """All realizations of (inputs, source key), lexicographic, vectorized.

    Variable v takes value (index // q**(n_vars-1-v)) % q, so variable 0
    varies slowest.  Input symbols come first, source symbols last.
    """

    def __init__(self, params: SchemeParams, L: int, max_states: int):
        bs = params.block_size
        if L <= 0 or L % bs:
            raise ValueError(f"L={L} is not a positive multiple of block size {bs}")
        self.params = params
        self.q = params.field.q
        self.K = params.K
        self.L = L
        self.blocks = L // bs
        self.n_w = self.K * L
        self.n_z = self.blocks * params.source_key_len
        self.n_vars = self.n_w + self.n_z
        self.size = self.q**self.n_vars
        if self.size > max_states:
            raise StateSpaceError(self.size, max_states)
        self.index = np.arange(self.size, dtype=np.int64)
        self._cache: dict[int, np.ndarray] = {}

    def w_var(self, k: int, pos: int) -> int:
        return (k - 1) * self.L + pos

    def z_var(self, block: int, m: int) -> int:
        return self.n_w + block * self.params.source_key_len + m

    def var(self, v: int) -> np.ndarray:
        arr = self._cache.get(v)
        if arr is None:
            block = self.q ** (self.n_vars - 1 - v)
            arr = np.tile(
                np.repeat(np.arange(self.q, dtype=np.int64), block),
                self.size // (block * self.q),
            )
            self._cache[v] = arr
        return arr

    def evaluate(self, form: dict[int, int]) -> np.ndarray:
        # q is tiny whenever enumeration is feasible, so the unreduced sum
        # of coeff * value terms stays far below 2**63; one final mod.
        acc = np.zeros(self.size, dtype=np.int64)
        scratch = np.empty(self.size, dtype=np.int64)
        for v, c in form.items():
            if c:
                np.multiply(self.var(v), c, out=scratch)
                acc += scratch
        acc %= self.q
        return acc

    def pack(self, arrays: list[np.ndarray]) -> np.ndarray:
        code = np.zeros(self.size, dtype=np.int64)
        for arr in arrays:
            code = code * self.q + arr
        return code

    def message_form(self, k: int, i: int, block: int) -> dict[int, int]:
        """Linear form of the block-th symbol of the (k, i) message."""
        p = self.params
        q = self.q
        bs = p.block_size
        form: dict[int, int] = {}
        for j, c in enumerate(p.input_coeffs[(k, i)]):
            if c:
                form[self.w_var(k, block * bs + j)] = c
        lam = p.key_coeffs.rows[k - 1][i - 1]
        for m, h in enumerate(p.key_matrix.row(k - 1)):
            c = lam * h % q
            if c:
                form[self.z_var(block, m)] = c
        return form

    def relay_form(self, i: int, block: int) -> dict[int, int]:
        form: dict[int, int] = {}
        for k in users_of_relay(self.params.topo, i):
            for v, c in self.message_form(k, i, block).items():
                form[v] = (form.get(v, 0) + c) % self.q
        return form

    def input_code(self) -> np.ndarray:
        """All input symbols packed; they are the leading digits of the index."""
        return self.index // self.q**self.n_z

    def sum_arrays(self) -> list[np.ndarray]:
        out = []
        for pos in range(self.L):
            form = {self.w_var(k, pos): 1 for k in range(1, self.K + 1)}
            out.append(self.evaluate(form))
        return out

    def relay_arrays(self) -> list[list[np.ndarray]]:
        return [
            [self.evaluate(self.relay_form(i, t)) for t in range(self.blocks)]
            for i in self.params.topo.relays()
        ]


def _factorizes(code_a: np.ndarray, n_a: int, code_b: np.ndarray, n_b: int) -> bool:
    """Exact independence test over known value ranges, via count tables.

    Checks total * joint == marginal_a * marginal_b on every cell, zero
    cells included.  Caller guarantees n_a * n_b stays within the state
    cap, so the dense table is affordable.
    """
    total = len(code_a)
    joint = np.bincount(code_a * n_b + code_b, minlength=n_a * n_b)
    count_a = np.bincount(code_a, minlength=n_a).astype(np.int64)
    count_b = np.bincount(code_b, minlength=n_b).astype(np.int64)
    return bool(
        (joint.reshape(n_a, n_b) * total == np.outer(count_a, count_b)).all()
    )


def _factorizes_sparse(code_a: np.ndarray, code_b: np.ndarray) -> bool:
    """Independence test that first compacts values; for small subsets."""
    _, inv_a = np.unique(code_a, return_inverse=True)
    _, inv_b = np.unique(code_b, return_inverse=True)
    n_a = int(inv_a.max()) + 1
    n_b = int(inv_b.max()) + 1
    return _factorizes(inv_a.astype(np.int64), n_a, inv_b.astype(np.int64), n_b)


def exhaustive_mi_audit(
    params: SchemeParams, L: "int | None" = None, max_states: int = 10**8
) -> AuditReport:
    """Exact zero-information verdicts for every relay and for the server."""
    L = params.block_size if L is None else L
    space = _StateSpace(params, L, max_states)
    w_code = space.input_code()
    n_w = space.q**space.n_w
    checks = []

    for i in params.topo.relays():
        msgs = [
            space.evaluate(space.message_form(k, i, t))
            for k in users_of_relay(params.topo, i)
            for t in range(space.blocks)
        ]
        # n_msgs * n_w <= state count because each block consumes at least
        # as many fresh source symbols as any relay sees messages.
        ok = _factorizes(space.pack(msgs), space.q ** len(msgs), w_code, n_w)
        checks.append(
            CheckResult(
                f"relay-mi[{i}]",
                ok,
                f"received messages {'independent of' if ok else 'correlated with'} inputs"
                f" over {space.size} realizations",
            )
        )

    y_code = space.pack([arr for row in space.relay_arrays() for arr in row])
    sum_code = space.pack(space.sum_arrays())
    server_ok = True
    for s in np.unique(sum_code):
        mask = sum_code == s
        if not _factorizes_sparse(y_code[mask], w_code[mask]):
            server_ok = False
            break
    checks.append(
        CheckResult(
            "server-mi",
            server_ok,
            f"relay messages conditionally independent of inputs given the sum: {server_ok}",
        )
    )
    return AuditReport(tuple(checks))


def exhaustive_recovery_audit(
    params: SchemeParams, L: "int | None" = None, max_states: int = 10**8
) -> CheckResult:
    """Decode equals the true sum on every realization, and the relay
    messages determine the sum as a function."""
    L = params.block_size if L is None else L
    space = _StateSpace(params, L, max_states)
    q = space.q
    relay_arrays = space.relay_arrays()
    sums = space.sum_arrays()

    decode_ok = True
    for t in range(space.blocks):
        for b in range(params.block_size):
            col = params.recovery.column(b)
            acc = np.zeros(space.size, dtype=np.int64)
            for idx_i, c in enumerate(col):
                if c:
                    acc = (acc + c * relay_arrays[idx_i][t]) % q
            if not (acc == sums[t * params.block_size + b]).all():
                decode_ok = False

    y_code = space.pack([arr for row in relay_arrays for arr in row])
    sum_code = space.pack(sums)
    n_y = q ** (space.K * space.blocks)
    n_s = q**space.L
    observed_y = int((np.bincount(y_code, minlength=n_y) > 0).sum())
    observed_pairs = int(
        (np.bincount(y_code * n_s + sum_code, minlength=n_y * n_s) > 0).sum()
    )
    functional = observed_pairs == observed_y

    passed = decode_ok and functional
    return CheckResult(
        "recovery-exhaustive",
        passed,
        f"decode exact: {decode_ok}; messages determine the sum: {functional}"
        f" ({space.size} realizations)",
    )


def full_audit(
    params: SchemeParams,
    level: str = "algebraic",
    L: "int | None" = None,
    max_states: int = 10**8,
) -> AuditReport:
    checks = list(algebraic_audit(params).checks)
    if level == "exhaustive":
        checks.extend(exhaustive_mi_audit(params, L, max_states).checks)
        checks.append(exhaustive_recovery_audit(params, L, max_states))
    elif level != "algebraic":
        raise ValueError(f"unknown audit level {level!r}")
    return AuditReport(tuple(checks))


# ---------------------------------------------------------------------------
# Golden scheme: 3 users, 2 relays each, GF(3), inputs of length 2
# ---------------------------------------------------------------------------


def golden_example1() -> SchemeParams:
    """The worked 3-user scheme over GF(3), stored symbol for symbol.

    Keys: Z1 = N1, Z2 = N2, Z3 = N1 + N2.  Writing (a, b) for the two
    symbols of each input, the messages are (all mod 3):

        user 1:  to relay 1: -2 W1a - Z1
                 to relay 2: -(W1a + W1b) + Z1
        user 2:  to relay 2:  W2a - W2b + 2 Z2
                 to relay 3:  2 W2a + Z2
        user 3:  to relay 3:  W3a + W3b + Z3
                 to relay 1:  W3b - W3a + 2 Z3

    The server recovers (sum_a, sum_b) via (Y3 - Y1)/2 and
    (Y1 - 2 Y2 + Y3)/2; those combinations are the two recovery columns.
    """
    field = PrimeField(3)
    return SchemeParams(
        topo=Topology(3, 2),
        requested_B=2,
        field=field,
        input_coeffs={
            (1, 1): (1, 0),  # -2 W1a - Z1
            (1, 2): (2, 2),  # -(W1a + W1b) + Z1
            (2, 2): (1, 2),  # W2a - W2b + 2 Z2
            (2, 3): (2, 0),  # 2 W2a + Z2
            (3, 3): (1, 1),  # W3a + W3b + Z3
            (3, 1): (2, 1),  # W3b - W3a + 2 Z3
        },
        key_coeffs=Matrix(field, [[2, 1, 0], [0, 2, 1], [2, 0, 1]]),
        key_matrix=Matrix(field, [[1, 0], [0, 1], [1, 1]]),
        recovery=Matrix(field, [[1, 2], [0, 2], [2, 2]]),
    )


def golden_decode(relay_msgs: dict[int, tuple[int, ...]]) -> tuple[int, ...]:
    """The decode exactly as worked in the golden instance: (Y3 - Y1)/2,
    then (Y1 - 2 Y2 + Y3)/2, per block; 1/2 == 2 in GF(3)."""
    y1, y2, y3 = relay_msgs[1], relay_msgs[2], relay_msgs[3]
    out = []
    for t in range(len(y1)):
        out.append((y3[t] - y1[t]) * 2 % 3)
        out.append((y1[t] - 2 * y2[t] + y3[t]) * 2 % 3)
    return tuple(out)

"""Key generation: the matrices that mask inputs and cancel at the server.

Each user's key is one fresh symbol per block, derived linearly from a
pool of max(B, K-B) independent source symbols via a K-row key matrix.
The key coefficient matrix (K x K, row k supported exactly on user k's
associated relays) scales that key inside each outgoing message.  Two
joint conditions drive every construction here:

  cancellation   key_matrix^T @ key_coeffs @ recovery == 0
  tightness      rank(key_coeffs^T @ key_matrix) == K - B, so the only
                 combinations of relay messages that cancel the keys are
                 spanned by the recovery matrix

plus the MDS condition that any B rows of the key matrix are linearly
independent, which hands every relay B mutually independent masks.

Four regimes, by association count B:

  single       B = 1.  Key coefficients are the identity; the key matrix
               is an extended Vandermonde block with rows rescaled so the
               keys cancel under the actual recovery column.
  circulant    2 <= B <= K/2.  The coefficient matrix is a circulant
               whose first row is the geometric progression 1, r, ...,
               r**(B-1); the ratio r is searched until the coefficient
               matrix is invertible and the solved key matrix is MDS.
  vandermonde  K/2 < B <= K-1.  The key matrix is a K x B Vandermonde
               block; each relay's coefficient vector is solved from a
               target row whose leading entry (the anchor) is searched
               outside a finite bad set so no coefficient collapses to 0.
  full         B = K.  Reduction: run the B = K-1 regime and disable the
               last outgoing link of each user.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from math import comb

from .code_design import CodeDesign
from .gf import Matrix, PrimeField, SingularMatrixError, is_prime, vandermonde
from .topology import Topology, relays_of_user, users_of_relay

REGIME_SINGLE = "single"
REGIME_CIRCULANT = "circulant"
REGIME_VANDERMONDE = "vandermonde"
REGIME_FULL = "full"


class ConstructionError(RuntimeError):
    """A key-design search or construction failed for the given field."""


@dataclass(frozen=True)
class KeyDesign:
    """Key matrix, coefficient matrix, and the regime that produced them."""

    key_matrix: Matrix
    key_coeffs: Matrix
    regime: str
    ratio: "int | None" = None   # circulant progression ratio
    anchor: "int | None" = None  # leading target entry of the vandermonde solve

    @property
    def source_key_len(self) -> int:
        return self.key_matrix.ncols


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
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


def regime_for(K: int, B: int) -> str:
    if not 1 <= B <= K:
        raise ValueError(f"B must lie in [1, {K}], got {B}")
    if B == K:
        return REGIME_FULL
    if B == 1:
        return REGIME_SINGLE
    if 2 * B <= K:
        return REGIME_CIRCULANT
    return REGIME_VANDERMONDE


def sufficient_field_size(K: int, B: int) -> int:
    """Field size above which the circulant ratio search always succeeds."""
    return comb(K, B) * (K - B) * (K - 1) * (B - 1) + B * K + 2


def _next_prime_above(n: int) -> int:
    q = n + 1
    while not is_prime(q):
        q += 1
    return q


def select_field(K: int, B: int) -> PrimeField:
    """Smallest prime field with the guarantees of the (K, B) regime.

    Callers may override with any prime; below-bound overrides are still
    attempted and fail with ConstructionError only if the search comes up
    empty.
    """
    regime = regime_for(K, B)
    if regime in (REGIME_SINGLE, REGIME_FULL):
        return PrimeField(_next_prime_above(K + 1))
    if regime == REGIME_CIRCULANT:
        lo = sufficient_field_size(K, B)
        q = ((lo - 2) // K + 1) * K + 1  # smallest q >= lo with q % K == 1
        while not is_prime(q):
            q += K
        return PrimeField(q)
    return PrimeField(_next_prime_above(max(K * B, K)))


def _search_order(q: int, seed: int) -> list[int]:
    # Pseudorandom but reproducible order over the nonzero field elements.
    order = list(range(1, q))
    random.Random(seed).shuffle(order)
    return order


def _every_subset_full_rank(M: Matrix, size: int) -> bool:
    return all(
        M.take_rows(rows).rank() == size
        for rows in combinations(range(M.nrows), size)
    )


def _circulant(field: PrimeField, K: int, B: int, ratio: int) -> Matrix:
    rows = []
    for k in range(K):
        row = [0] * K
        for j in range(B):
            row[(k + j) % K] = pow(ratio, j, field.q)
        rows.append(row)
    return Matrix(field, rows)


def circulant_ratio_valid(
    field: PrimeField, K: int, B: int, points: tuple[int, ...], ratio: int
) -> bool:
    """Full validity predicate used by the ratio search and its sampler."""
    q = field.q
    if ratio % q == 0 or pow(ratio, K, q) == 1:
        return False
    coeffs = _circulant(field, K, B, ratio)
    target = vandermonde(field, points, K - B)
    try:
        key_matrix = coeffs.transpose().solve(target)
    except SingularMatrixError:
        return False
    return _every_subset_full_rank(key_matrix, K - B)


def circulant_keygen(
    K: int, B: int, field: PrimeField, points: tuple[int, ...], seed: int = 0
) -> KeyDesign:
    """Regime 2 <= B <= K/2; requires K | (q - 1)."""
    if not (2 <= B and 2 * B <= K):
        raise ValueError(f"circulant regime needs 2 <= B <= K/2, got K={K}, B={B}")
    if (field.q - 1) % K != 0:
        raise ConstructionError(
            f"circulant regime needs K | (q-1); q={field.q}, K={K}"
        )
    target = vandermonde(field, points, K - B)
    for ratio in _search_order(field.q, seed):
        if not circulant_ratio_valid(field, K, B, points, ratio):
            continue
        coeffs = _circulant(field, K, B, ratio)
        key_matrix = coeffs.transpose().solve(target)
        return KeyDesign(key_matrix, coeffs, REGIME_CIRCULANT, ratio=ratio)
    raise ConstructionError(
        f"no valid circulant ratio in GF({field.q}); "
        f"size {sufficient_field_size(K, B)} suffices"
    )


def sample_circulant_validity(
    K: int,
    B: int,
    field: PrimeField,
    points: tuple[int, ...],
    samples: int,
    seed: int = 0,
) -> int:
    """Count valid ratios among uniform draws from the whole field."""
    rng = random.Random(seed)
    return sum(
        circulant_ratio_valid(field, K, B, points, rng.randrange(field.q))
        for _ in range(samples)
    )


def _lagrange_constant_terms(
    field: PrimeField, pts: tuple[int, ...]
) -> tuple[int, ...]:
    # Constant term of the j-th Lagrange basis polynomial over pts;
    # nonzero whenever the points are nonzero and distinct.
    q = field.q
    out = []
    for j, pj in enumerate(pts):
        num, den = 1, 1
        for m, pm in enumerate(pts):
            if m == j:
                continue
            num = num * (-pm) % q
            den = den * (pj - pm) % q
        out.append(num * field.inv(den) % q)
    return tuple(out)


def _relay_solve_data(
    K: int, B: int, field: PrimeField, points: tuple[int, ...]
) -> dict[int, tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]]:
    """Per relay: (senders, first inverse row, anchor-free part).

    The relay's coefficient vector is anchor * first + rest, rows taken
    from the inverse of the relay's point submatrix of the key matrix.
    The first inverse row is cross-checked against the Lagrange constant
    term product, which is nonzero for nonzero distinct points.
    """
    q = field.q
    topo = Topology(K, B)
    key_matrix = vandermonde(field, points, B)
    out: dict[int, tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]] = {}
    for i in topo.relays():
        senders = users_of_relay(topo, i)
        pts_i = tuple(points[u - 1] for u in senders)
        sub_inv = key_matrix.take_rows([u - 1 for u in senders]).inverse()
        first = sub_inv.row(0)
        if first != _lagrange_constant_terms(field, pts_i):
            raise ConstructionError(
                f"inverse first row disagrees with Lagrange constant terms at relay {i}"
            )
        if any(x == 0 for x in first):
            raise ConstructionError(
                f"zero Lagrange constant term at relay {i}; points must be nonzero and distinct"
            )
        rest = [0] * B
        for t in range(1, K - B):
            scale = pow(points[i - 1], t, q)
            row = sub_inv.row(t)
            rest = [(a + scale * b) % q for a, b in zip(rest, row)]
        out[i] = (senders, first, tuple(rest))
    return out


def anchor_bad_sets(
    K: int, B: int, field: PrimeField, points: tuple[int, ...]
) -> dict[int, set[int]]:
    """Anchors that zero some coefficient of a relay; at most B per relay."""
    return {
        i: {-r * field.inv(f) % field.q for f, r in zip(first, rest)}
        for i, (_, first, rest) in _relay_solve_data(K, B, field, points).items()
    }


def vandermonde_keygen(
    K: int, B: int, field: PrimeField, points: tuple[int, ...], seed: int = 0
) -> KeyDesign:
    """Regime K/2 < B <= K-1; requires nonzero distinct points."""
    if not (2 * B > K and B <= K - 1):
        raise ValueError(f"vandermonde regime needs K/2 < B <= K-1, got K={K}, B={B}")
    q = field.q
    key_matrix = vandermonde(field, points, B)
    per_relay = _relay_solve_data(K, B, field, points)
    bad: set[int] = set()
    for _, first, rest in per_relay.values():
        bad.update(-r * field.inv(f) % q for f, r in zip(first, rest))

    anchor = next((c for c in _search_order(q, seed) if c not in bad), None)
    if anchor is None:
        raise ConstructionError(
            f"every nonzero anchor lies in the bad set over GF({q}); "
            f"q > {K * B} suffices"
        )

    coeff_rows = [[0] * K for _ in range(K)]
    for i, (senders, first, rest) in per_relay.items():
        for j, u in enumerate(senders):
            value = (anchor * first[j] + rest[j]) % q
            if value == 0:
                raise ConstructionError("anchor escaped the bad set but zeroed a coefficient")
            coeff_rows[u - 1][i - 1] = value
    return KeyDesign(
        key_matrix, Matrix(field, coeff_rows), REGIME_VANDERMONDE, anchor=anchor
    )


def single_assoc_keygen(
    K: int, field: PrimeField, points: tuple[int, ...]
) -> KeyDesign:
    """Regime B = 1: identity coefficients, extended Vandermonde key matrix.

    Rows 1..K-1 are Vandermonde rows and row K is the negated sum of the
    others, so the unscaled rows sum to zero.  Each row is then divided by
    the matching entry of the recovery column, which moves the zero-sum
    property to exactly the combination the server applies.
    """
    if field.q <= K + 1:
        raise ValueError(f"single-association regime needs q > K+1, got q={field.q}")
    q = field.q
    ext = [[pow(points[k], j, q) for j in range(K - 1)] for k in range(K - 1)]
    ext.append([-sum(col) % q for col in zip(*ext)])
    theta = vandermonde(field, points, K).transpose()
    recovery_col = theta.inverse().column(K - 1)
    rows = [
        [v * field.inv(r) % q for v in row]
        for row, r in zip(ext, recovery_col)
    ]
    key_matrix = Matrix(field, rows)
    if not _every_subset_full_rank(key_matrix, K - 1):
        raise ConstructionError(
            "single-association key matrix lost full rank on some K-1 rows; redraw points"
        )
    return KeyDesign(key_matrix, Matrix.identity(field, K), REGIME_SINGLE)


def full_assoc_keygen(
    K: int, field: PrimeField, points: tuple[int, ...], seed: int = 0
) -> KeyDesign:
    """Regime B = K: reuse the B = K-1 design (one link per user is disabled)."""
    if K < 2:
        raise ValueError("full-association regime needs K >= 2")
    if K == 2:
        inner = single_assoc_keygen(2, field, points)
    else:
        inner = vandermonde_keygen(K, K - 1, field, points, seed)
    return KeyDesign(
        inner.key_matrix,
        inner.key_coeffs,
        REGIME_FULL,
        ratio=inner.ratio,
        anchor=inner.anchor,
    )


def build_keys(
    K: int, B: int, field: PrimeField, points: tuple[int, ...], seed: int = 0
) -> KeyDesign:
    regime = regime_for(K, B)
    if regime == REGIME_SINGLE:
        return single_assoc_keygen(K, field, points)
    if regime == REGIME_CIRCULANT:
        return circulant_keygen(K, B, field, points, seed)
    if regime == REGIME_VANDERMONDE:
        return vandermonde_keygen(K, B, field, points, seed)
    return full_assoc_keygen(K, field, points, seed)


def validate_scheme(keys: KeyDesign, code: CodeDesign) -> ValidationReport:
    """Run the five structural checks every emitted scheme must pass.

    Failures land in the report instead of raising; the builder treats a
    failing report as a construction error, while tests mutate schemes and
    assert on individual entries.
    """
    topo = code.topo
    K, B = topo.K, topo.B
    coeffs, key_matrix, recovery = keys.key_coeffs, keys.key_matrix, code.recovery
    checks = []

    supported = all(
        (coeffs.rows[k - 1][i - 1] != 0) == (i in relays_of_user(topo, k))
        for k in topo.users()
        for i in topo.relays()
    )
    checks.append(
        CheckResult(
            "coefficient-support",
            supported,
            "nonzero exactly on associated links",
        )
    )

    cancel = (key_matrix.transpose() @ coeffs @ recovery).is_zero()
    checks.append(
        CheckResult("key-cancellation", cancel, "key_matrix^T @ coeffs @ recovery == 0")
    )

    mixed_rank = (coeffs.transpose() @ key_matrix).rank()
    checks.append(
        CheckResult(
            "mixed-rank",
            mixed_rank == K - B,
            f"rank(coeffs^T @ key_matrix) = {mixed_rank}, expected {K - B}",
        )
    )

    masked = key_matrix.transpose() @ coeffs
    null = masked.nullspace()
    null_dim = 0 if null is None else null.ncols
    span_ok = (
        null_dim == B
        and recovery.rank() == B
        and (masked @ recovery).is_zero()
        and (null is not None and null.hstack(recovery).rank() == B)
    )
    checks.append(
        CheckResult(
            "nullspace-equals-recovery-span",
            span_ok,
            f"null dim {null_dim}, recovery rank {recovery.rank()}, expected both {B}",
        )
    )

    mds = _every_subset_full_rank(key_matrix, B)
    checks.append(
        CheckResult("key-matrix-mds", mds, f"every {B} rows independent")
    )
    return ValidationReport(tuple(checks))

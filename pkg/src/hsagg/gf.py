"""Exact arithmetic and linear algebra over a prime field GF(q).

Field elements are plain Python ints reduced into [0, q).  Everything in
this layer is integer-exact; the security audits downstream compare
matrices for literal equality, so floats are banned throughout.

The modulus is capped below 2**31 so that a product of two reduced
elements always fits in a 64-bit intermediate.
"""

from __future__ import annotations

from typing import Iterable, Sequence

MAX_MODULUS = 1 << 31

# Deterministic Miller-Rabin witness set, valid for all n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        if a >= n:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """Arithmetic modulo a prime q.  Elements are ints in [0, q)."""

    __slots__ = ("q",)

    def __init__(self, q: int):
        if not isinstance(q, int) or q < 2:
            raise ValueError(f"modulus must be an integer >= 2, got {q!r}")
        if q >= MAX_MODULUS:
            raise ValueError(f"modulus {q} exceeds the 2**31 cap")
        if not is_prime(q):
            raise ValueError(f"modulus {q} is not prime")
        self.q = q

    def reduce(self, a: int) -> int:
        return a % self.q

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def neg(self, a: int) -> int:
        return -a % self.q

    def mul(self, a: int, b: int) -> int:
        return a * b % self.q

    def inv(self, a: int) -> int:
        """Multiplicative inverse; raises ZeroDivisionError on 0."""
        a %= self.q
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.q})")
        return pow(a, self.q - 2, self.q)

    def pow(self, a: int, e: int) -> int:
        return pow(a % self.q, e, self.q)

    def elements(self) -> range:
        return range(self.q)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("PrimeField", self.q))

    def __repr__(self) -> str:
        return f"PrimeField({self.q})"


class SingularMatrixError(ValueError):
    """Raised when inverting or solving against a rank-deficient matrix."""

    def __init__(self, rank: int, size: int):
        self.rank = rank
        self.size = size
        super().__init__(f"matrix is singular: rank {rank} < {size}")


class DuplicatePointsError(ValueError):
    pass


class Matrix:
    """Immutable dense matrix over a prime field.

    Rows are tuples of reduced ints.  Rank, inverse and null space use
    Gaussian elimination with first-nonzero pivoting, so every derived
    matrix is reproducible bit for bit.
    """

    __slots__ = ("field", "rows")

    def __init__(self, field: PrimeField, rows: Iterable[Sequence[int]]):
        q = field.q
        self.field = field
        self.rows = tuple(tuple(x % q for x in row) for row in rows)
        if not self.rows or not self.rows[0]:
            raise ValueError("matrix must have at least one row and column")
        ncols = len(self.rows[0])
        if any(len(row) != ncols for row in self.rows):
            raise ValueError("ragged rows")

    @classmethod
    def zeros(cls, field: PrimeField, nrows: int, ncols: int) -> "Matrix":
        return cls(field, [[0] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "Matrix":
        return cls(field, [[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def row(self, i: int) -> tuple:
        return self.rows[i]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.rows)

    def transpose(self) -> "Matrix":
        return Matrix(self.field, zip(*self.rows))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.field != other.field:
            raise ValueError("field mismatch")
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch: {self.ncols} vs {other.nrows}")
        q = self.field.q
        cols = other.transpose().rows
        return Matrix(
            self.field,
            [[sum(a * b for a, b in zip(row, col)) % q for col in cols] for row in self.rows],
        )

    def take_rows(self, indices: Sequence[int]) -> "Matrix":
        return Matrix(self.field, [self.rows[i] for i in indices])

    def take_cols(self, indices: Sequence[int]) -> "Matrix":
        return Matrix(self.field, [[row[j] for j in indices] for row in self.rows])

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return Matrix(self.field, [a + b for a, b in zip(self.rows, other.rows)])

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    def _echelon(self, aug: "list[list[int]] | None" = None):
        """Row-reduce a working copy; returns (rows, aug, pivot_cols)."""
        q = self.field.q
        work = [list(row) for row in self.rows]
        pivots: list[int] = []
        r = 0
        for c in range(self.ncols):
            piv = next((i for i in range(r, self.nrows) if work[i][c]), None)
            if piv is None:
                continue
            work[r], work[piv] = work[piv], work[r]
            if aug is not None:
                aug[r], aug[piv] = aug[piv], aug[r]
            scale = pow(work[r][c], q - 2, q)
            work[r] = [x * scale % q for x in work[r]]
            if aug is not None:
                aug[r] = [x * scale % q for x in aug[r]]
            for i in range(self.nrows):
                if i != r and work[i][c]:
                    f = work[i][c]
                    work[i] = [(x - f * y) % q for x, y in zip(work[i], work[r])]
                    if aug is not None:
                        aug[i] = [(x - f * y) % q for x, y in zip(aug[i], aug[r])]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        return work, aug, pivots

    def rank(self) -> int:
        _, _, pivots = self._echelon()
        return len(pivots)

    def solve(self, rhs: "Matrix") -> "Matrix":
        """Solve self @ X = rhs for square self; exact."""
        if self.nrows != self.ncols:
            raise ValueError("solve requires a square matrix")
        if rhs.nrows != self.nrows:
            raise ValueError("right-hand side row count mismatch")
        aug = [list(row) for row in rhs.rows]
        _, aug, pivots = self._echelon(aug)
        if len(pivots) < self.ncols:
            raise SingularMatrixError(len(pivots), self.ncols)
        return Matrix(self.field, aug)

    def inverse(self) -> "Matrix":
        return self.solve(Matrix.identity(self.field, self.nrows))

    def nullspace(self) -> "Matrix | None":
        """Basis of {x : self @ x = 0} as columns; None if only the zero vector."""
        q = self.field.q
        work, _, pivots = self._echelon()
        free = [c for c in range(self.ncols) if c not in pivots]
        if not free:
            return None
        basis = []
        for c in free:
            vec = [0] * self.ncols
            vec[c] = 1
            for r, pc in enumerate(pivots):
                vec[pc] = -work[r][c] % q
            basis.append(vec)
        return Matrix(self.field, basis).transpose()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and other.field == self.field
            and other.rows == self.rows
        )

    def __hash__(self) -> int:
        return hash((self.field, self.rows))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in row) for row in self.rows)
        return f"Matrix(GF({self.field.q}), [{body}])"


def vandermonde(field: PrimeField, points: Sequence[int], ncols: int) -> Matrix:
    """Rows [1, p, p**2, ..., p**(ncols-1)] for each evaluation point p."""
    reduced = [p % field.q for p in points]
    if len(set(reduced)) != len(reduced):
        raise DuplicatePointsError(f"evaluation points collide mod {field.q}: {points}")
    if ncols < 1:
        raise ValueError("ncols must be positive")
    return Matrix(field, [[pow(p, j, field.q) for j in range(ncols)] for p in reduced])


class Polynomial:
    """Dense univariate polynomial; coeffs[j] multiplies x**j.

    Trailing zero coefficients are stripped, so the zero polynomial has an
    empty coefficient tuple and degree -1.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: PrimeField, coeffs: Iterable[int]):
        q = field.q
        cs = [c % q for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls, field: PrimeField) -> "Polynomial":
        return cls(field, ())

    @classmethod
    def one(cls, field: PrimeField) -> "Polynomial":
        return cls(field, (1,))

    @classmethod
    def monic_from_roots(cls, field: PrimeField, roots: Iterable[int]) -> "Polynomial":
        q = field.q
        coeffs = [1]
        for r in roots:
            coeffs = [0] + coeffs
            for j in range(len(coeffs) - 1):
                coeffs[j] = (coeffs[j] - r * coeffs[j + 1]) % q
        return cls(field, coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, j: int) -> int:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else 0

    def __call__(self, x: int) -> int:
        q = self.field.q
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % q
        return acc

    def times_x(self) -> "Polynomial":
        return Polynomial(self.field, (0,) + self.coeffs)

    def scale(self, c: int) -> "Polynomial":
        return Polynomial(self.field, (c * a for a in self.coeffs))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(
            self.field, (self.coeff(j) + other.coeff(j) for j in range(n))
        )

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(
            self.field, (self.coeff(j) - other.coeff(j) for j in range(n))
        )

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not self.coeffs or not other.coeffs:
            return Polynomial.zero(self.field)
        q = self.field.q
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = (out[i + j] + a * b) % q
        return Polynomial(self.field, out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and other.field == self.field
            and other.coeffs == self.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __repr__(self) -> str:
        return f"Polynomial(GF({self.field.q}), {list(self.coeffs)})"

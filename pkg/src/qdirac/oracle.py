"""Independent dense-matrix evaluator and equivalence predicates.

This module deliberately shares nothing with the rewrite engine beyond the
Term type: terms are evaluated recursively into plain row-major complex
matrices, and equivalence is decided numerically.  It serves as the test
oracle for the symbolic side and as the baseline in benchmarks, so the
kernels are the straightforward O(n^3) dense ones with no sparsity tricks.
"""

from __future__ import annotations

import cmath
import random
from dataclasses import dataclass
from typing import Optional

from .errors import DimMismatch, NotSquare
from .term import ADD, DAG, IDENT, KET0, KET1, KRON, MUL, SCALE, ZERO, Term

DEFAULT_TOL = 1e-9
DEFAULT_SAMPLES = 3
DEFAULT_SEED = 42

# Dense evaluation above this dimension is skipped by the corpus runner and
# benchmarks; pure-Python kernels get impractical past a few thousand rows.
DENSE_DIM_LIMIT = 2048


class DenseMatrix:
    """Row-major complex matrix with the handful of ops evaluation needs."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: list[complex]):
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match dims")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @staticmethod
    def zero(rows: int, cols: int) -> "DenseMatrix":
        return DenseMatrix(rows, cols, [0j] * (rows * cols))

    @staticmethod
    def identity(n: int) -> "DenseMatrix":
        m = DenseMatrix.zero(n, n)
        for i in range(n):
            m.entries[i * n + i] = 1 + 0j
        return m

    def get(self, i: int, j: int) -> complex:
        return self.entries[i * self.cols + j]

    def matmul(self, other: "DenseMatrix") -> "DenseMatrix":
        if self.cols != other.rows:
            raise DimMismatch((self.cols, self.cols), (other.rows, other.cols))
        n, k, m = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = [0j] * (n * m)
        for i in range(n):
            row = i * k
            orow = i * m
            for p in range(k):
                v = a[row + p]
                if v == 0:
                    continue
                brow = p * m
                for j in range(m):
                    out[orow + j] += v * b[brow + j]
        return DenseMatrix(n, m, out)

    def add(self, other: "DenseMatrix") -> "DenseMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimMismatch((self.rows, self.cols), (other.rows, other.cols))
        return DenseMatrix(
            self.rows, self.cols,
            [x + y for x, y in zip(self.entries, other.entries)],
        )

    def kron(self, other: "DenseMatrix") -> "DenseMatrix":
        r = self.rows * other.rows
        c = self.cols * other.cols
        out = [0j] * (r * c)
        for i1 in range(self.rows):
            for j1 in range(self.cols):
                v = self.entries[i1 * self.cols + j1]
                if v == 0:
                    continue
                for i2 in range(other.rows):
                    base = (i1 * other.rows + i2) * c + j1 * other.cols
                    orow = i2 * other.cols
                    for j2 in range(other.cols):
                        out[base + j2] = v * other.entries[orow + j2]
        return DenseMatrix(r, c, out)

    def dagger(self) -> "DenseMatrix":
        out = [0j] * (self.rows * self.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                out[j * self.rows + i] = self.entries[i * self.cols + j].conjugate()
        return DenseMatrix(self.cols, self.rows, out)

    def scale(self, c: complex) -> "DenseMatrix":
        return DenseMatrix(self.rows, self.cols, [c * x for x in self.entries])

    def approx_eq(self, other: "DenseMatrix", tol: float = DEFAULT_TOL) -> bool:
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(abs(x - y) <= tol for x, y in zip(self.entries, other.entries))

    def max_abs_index(self) -> tuple[int, int]:
        best, idx = -1.0, 0
        for k, v in enumerate(self.entries):
            a = abs(v)
            if a > best:
                best, idx = a, k
        return divmod(idx, self.cols)

    def trace(self) -> complex:
        if self.rows != self.cols:
            raise NotSquare(f"trace of {self.rows}x{self.cols} matrix")
        return sum(self.entries[i * self.cols + i] for i in range(self.rows))

    def render(self, precision: int = 4) -> str:
        def fmt(z: complex) -> str:
            re = round(z.real, precision) + 0.0
            im = round(z.imag, precision) + 0.0
            if im == 0:
                return f"{re:g}"
            if re == 0:
                return f"{im:g}i"
            sign = "+" if im > 0 else "-"
            return f"{re:g}{sign}{abs(im):g}i"

        cells = [[fmt(self.get(i, j)) for j in range(self.cols)] for i in range(self.rows)]
        width = max((len(c) for row in cells for c in row), default=1)
        return "\n".join("  ".join(c.rjust(width) for c in row) for row in cells)

    def as_lists(self) -> list[list[list[float]]]:
        """Structured [[ [re, im], ... ], ...] document form."""
        return [
            [[self.get(i, j).real, self.get(i, j).imag] for j in range(self.cols)]
            for i in range(self.rows)
        ]


@dataclass
class SampleEnv:
    """One random binding of every free atom; conjugate atoms pair up."""

    bindings: dict[str, complex]
    seed: int

    @staticmethod
    def sample(variables: set[str], angles: set[str], seed: int,
               norm_pairs: tuple[tuple[str, str], ...] = ()) -> "SampleEnv":
        rng = random.Random(seed)
        bindings: dict[str, complex] = {}
        constrained = {n for pair in norm_pairs for n in pair}
        for name in sorted(variables - constrained):
            bindings[name] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        for a, b in norm_pairs:
            va = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            vb = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            norm = (abs(va) ** 2 + abs(vb) ** 2) ** 0.5
            if norm < 1e-6:
                va, vb = 1 + 0j, 0j
                norm = 1.0
            bindings[a] = va / norm
            bindings[b] = vb / norm
        for name in sorted(angles):
            bindings[name] = complex(rng.uniform(0, 2 * cmath.pi), 0.0)
        return SampleEnv(bindings, seed)


def collect_atoms(t: Term) -> tuple[set[str], set[str]]:
    """All (variable, phase-angle) atom names under Scale nodes of t."""
    variables: set[str] = set()
    angles: set[str] = set()
    stack = [t]
    seen = set()
    while stack:
        cur = stack.pop()
        if id(cur) in seen:
            continue
        seen.add(id(cur))
        if cur.kind == SCALE:
            v, a = cur.payload.atoms()
            variables |= v
            angles |= a
        stack.extend(cur.children)
    return variables, angles


def eval_dense(t: Term, env: SampleEnv | None = None) -> DenseMatrix:
    env = env or SampleEnv({}, 0)
    kind = t.kind
    if kind == KET0:
        return DenseMatrix(2, 1, [1 + 0j, 0j])
    if kind == KET1:
        return DenseMatrix(2, 1, [0j, 1 + 0j])
    if kind == ZERO:
        return DenseMatrix.zero(t.rows, t.cols)
    if kind == IDENT:
        return DenseMatrix.identity(t.payload)
    if kind == SCALE:
        return eval_dense(t.children[0], env).scale(t.payload.evaluate(env.bindings))
    if kind == MUL:
        return eval_dense(t.children[0], env).matmul(eval_dense(t.children[1], env))
    if kind == ADD:
        return eval_dense(t.children[0], env).add(eval_dense(t.children[1], env))
    if kind == KRON:
        return eval_dense(t.children[0], env).kron(eval_dense(t.children[1], env))
    return eval_dense(t.children[0], env).dagger()


def _envs_for(a: Term, b: Term, samples: Optional[int], seed: int,
              norm_pairs: tuple[tuple[str, str], ...]) -> list[SampleEnv]:
    va, aa = collect_atoms(a)
    vb, ab = collect_atoms(b)
    variables, angles = va | vb, aa | ab
    if not variables and not angles and not norm_pairs:
        return [SampleEnv({}, seed)]
    n = samples if samples is not None else DEFAULT_SAMPLES
    return [
        SampleEnv.sample(variables, angles, seed + k, norm_pairs) for k in range(n)
    ]


def mat_equiv(a: Term, b: Term, samples: Optional[int] = None,
              tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED,
              norm_pairs: tuple[tuple[str, str], ...] = (),
              basis: bool = False) -> bool:
    """Numeric equality of a and b, sampled over free atoms.

    With basis=True the comparison applies both terms to every computational
    basis column vector instead of comparing raw entries; the two paths agree
    by linearity and both are exposed for cross-checking.
    """
    if a.dims != b.dims:
        raise DimMismatch(a.dims, b.dims)
    for env in _envs_for(a, b, samples, seed, norm_pairs):
        ma = eval_dense(a, env)
        mb = eval_dense(b, env)
        if basis:
            for j in range(a.cols):
                e = DenseMatrix.zero(a.cols, 1)
                e.entries[j] = 1 + 0j
                if not ma.matmul(e).approx_eq(mb.matmul(e), tol):
                    return False
        elif not ma.approx_eq(mb, tol):
            return False
    return True


@dataclass(frozen=True)
class ObsResult:
    equivalent: bool
    phase: complex | None = None
    witness: tuple[int, int, complex, complex] | None = None

    def __str__(self):
        if self.equivalent:
            p = self.phase
            return f"Equivalent(phase={p.real:+.6f}{p.imag:+.6f}i)"
        i, j, x, y = self.witness
        return f"NotEquivalent(entry ({i},{j}): {x:.6g} vs {y:.6g})"


def obs_equiv(a: Term, b: Term, samples: Optional[int] = None,
              tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED,
              norm_pairs: tuple[tuple[str, str], ...] = ()) -> ObsResult:
    """Equality up to a single global phase of unit modulus."""
    if a.dims != b.dims:
        raise DimMismatch(a.dims, b.dims)
    phase: complex | None = None
    for env in _envs_for(a, b, samples, seed, norm_pairs):
        ma = eval_dense(a, env)
        mb = eval_dense(b, env)
        i, j = ma.max_abs_index()
        xa, xb = ma.get(i, j), mb.get(i, j)
        if abs(xa) <= tol:
            if mb.approx_eq(DenseMatrix.zero(b.rows, b.cols), tol):
                c = 1 + 0j
            else:
                i, j = mb.max_abs_index()
                return ObsResult(False, witness=(i, j, xa, mb.get(i, j)))
        else:
            c = xb / xa
        if abs(abs(c) - 1) > tol:
            return ObsResult(False, witness=(i, j, xa, xb))
        if not ma.scale(c).approx_eq(mb, tol):
            diffs = [
                (abs(x * c - y), k)
                for k, (x, y) in enumerate(zip(ma.entries, mb.entries))
            ]
            _, k = max(diffs)
            wi, wj = divmod(k, ma.cols)
            return ObsResult(False, witness=(wi, wj, ma.get(wi, wj), mb.get(wi, wj)))
        if phase is None:
            phase = c
        elif abs(phase - c) > 10 * tol:
            return ObsResult(False, witness=(i, j, xa, xb))
    return ObsResult(True, phase=phase if phase is not None else 1 + 0j)


def trace_dense(m: DenseMatrix) -> complex:
    return m.trace()

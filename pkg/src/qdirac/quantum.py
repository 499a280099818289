"""Density matrices, super-operators, mixed states and measurement."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DimMismatch, NonInvertibleScalar, NotAnOperator, NotAVector, PatternMismatch,
)
from .oracle import DEFAULT_SEED, DEFAULT_TOL, mat_equiv
from .rewrite import (
    F_KB, NormalForm, Rewriter, _factor_class, normalize_operator, operate_reduce,
)
from .scalar import Scalar
from .term import Term, dag, gate, mul, render

NormPairs = tuple[tuple[str, str], ...]


def density(psi: Term) -> Term:
    if psi.cols != 1:
        raise NotAVector(f"density needs a column vector, got dims {psi.dims}")
    return mul(psi, dag(psi))


def super_(m: Term, rho: Term) -> Term:
    if rho.rows != rho.cols:
        raise DimMismatch((rho.rows, rho.rows), rho.dims, "super operand")
    if m.cols != rho.rows:
        raise DimMismatch((m.rows, rho.rows), rho.dims, "super operand")
    return mul(mul(m, rho), dag(m))


def super_reduce(m: Term, psi: Term, norm_pairs: NormPairs = (),
                 rewriter: Rewriter | None = None) -> NormalForm:
    """Normalize super(m, density(psi)) by reducing the vector side first."""
    if psi.cols != 1:
        raise PatternMismatch(f"super_reduce needs a density of a vector, got {psi.dims}")
    if m.cols != psi.rows:
        raise DimMismatch((m.rows, psi.rows), psi.dims, "super_reduce operand")
    rw = rewriter or Rewriter()
    v = operate_reduce(mul(m, psi), rewriter=rw).to_term()
    nf = normalize_operator(mul(v, dag(v)), rewriter=rw)
    return _apply_hyp(nf, norm_pairs)


def _apply_hyp(nf: NormalForm, norm_pairs: NormPairs) -> NormalForm:
    if not norm_pairs:
        return nf
    return nf.map_scalars(lambda s: s.apply_norm_hypothesis(norm_pairs))


def sym_trace(nf: NormalForm) -> Scalar:
    total = Scalar.zero()
    for s, factors in nf.summands:
        if any(_factor_class(f) != 2 for f in factors):
            raise NotAnOperator("trace of a non-operator normal form")
        diagonal = all((f - F_KB) in (0, 3) for f in factors)
        if diagonal:
            total = total + s
    return total


def probability(psi: Term, m_op: Term, norm_pairs: NormPairs = ()) -> Scalar:
    if psi.cols != 1:
        raise NotAVector(f"probability needs a state vector, got {psi.dims}")
    if m_op.rows != m_op.cols or m_op.cols != psi.rows:
        raise DimMismatch((psi.rows, psi.rows), m_op.dims, "measurement operator")
    expr = mul(dag(psi), mul(dag(m_op), mul(m_op, psi)))
    value = operate_reduce(expr).as_scalar()
    return value.apply_norm_hypothesis(norm_pairs) if norm_pairs else value


@dataclass(frozen=True)
class MixedState:
    """Ordered ensemble of (probability, operator) branches."""

    branches: tuple[tuple[Scalar, Term], ...]

    def __post_init__(self):
        dims = {op.dims for _, op in self.branches}
        if len(dims) > 1:
            raise DimMismatch(dims.pop(), dims.pop(), "mixed-state branches")
        for _, op in self.branches:
            if op.rows != op.cols:
                raise NotAnOperator(f"branch operator has dims {op.dims}")

    @property
    def dims(self) -> tuple[int, int]:
        return self.branches[0][1].dims if self.branches else (0, 0)

    def __str__(self):
        return " ; ".join(f"{p} : {render(op)}" for p, op in self.branches)


def pure_mix(op: Term) -> MixedState:
    return MixedState(((Scalar.one(), op),))


def unit_mix(u: Term, m: MixedState, norm_pairs: NormPairs = ()) -> MixedState:
    out = []
    for p, op in m.branches:
        nf = _apply_hyp(normalize_operator(super_(u, op)), norm_pairs)
        out.append((p, nf.to_term()))
    return MixedState(tuple(out))


def mea_mix(n: int, k: int, m: MixedState, norm_pairs: NormPairs = ()) -> MixedState:
    out = []
    for p, rho in m.branches:
        if rho.rows != 2 ** (n + 1):
            raise DimMismatch((2 ** (n + 1), 2 ** (n + 1)), rho.dims, "mea_mix branch")
        for proj_name in ("Mea0", "Mea1"):
            proj = gate(proj_name, n, k)
            # projective, so tr(M rho M) = tr(M rho)
            prob_nf = _apply_hyp(normalize_operator(mul(proj, rho)), norm_pairs)
            branch_p = sym_trace(prob_nf)
            if norm_pairs:
                branch_p = branch_p.apply_norm_hypothesis(norm_pairs)
            if branch_p.is_zero():
                continue
            post_nf = _apply_hyp(
                normalize_operator(mul(proj, mul(rho, proj))), norm_pairs
            )
            try:
                inv = branch_p.reciprocal()
                post_nf = post_nf.map_scalars(lambda s: s * inv)
            except NonInvertibleScalar:
                pass  # symbolic trace: leave the branch unnormalized
            out.append((p * branch_p, post_nf.to_term()))
    return MixedState(tuple(out))


def total_mass(m: MixedState, norm_pairs: NormPairs = ()) -> Scalar:
    total = Scalar.zero()
    for p, _ in m.branches:
        total = total + p
    return total.apply_norm_hypothesis(norm_pairs) if norm_pairs else total


def mix_equal(a: MixedState, b: MixedState, samples=None, tol: float = DEFAULT_TOL,
              seed: int = DEFAULT_SEED, norm_pairs: NormPairs = (),
              multiset: bool = False) -> bool:
    """Ordered branchwise equality: exact probabilities, numeric operators."""
    if len(a.branches) != len(b.branches):
        return False
    if multiset:
        remaining = list(b.branches)
        for branch in a.branches:
            for i, other in enumerate(remaining):
                if _branch_equal(branch, other, samples, tol, seed, norm_pairs):
                    remaining.pop(i)
                    break
            else:
                return False
        return True
    return all(
        _branch_equal(x, y, samples, tol, seed, norm_pairs)
        for x, y in zip(a.branches, b.branches)
    )


def _branch_equal(x, y, samples, tol, seed, norm_pairs) -> bool:
    (pa, oa), (pb, ob) = x, y
    diff = pa - pb
    if norm_pairs:
        diff = diff.apply_norm_hypothesis(norm_pairs)
    if not diff.is_zero():
        return False
    if oa.dims != ob.dims:
        return False
    return mat_equiv(oa, ob, samples=samples, tol=tol, seed=seed, norm_pairs=norm_pairs)

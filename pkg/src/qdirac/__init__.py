"""Symbolic rewriting and equivalence checking for Dirac-notation circuits."""

from .errors import (
    ArityMismatch, DimMismatch, FuelExhausted, InvalidQubitIndex,
    NonInvertibleScalar, NotAnOperator, NotAVector, NotInReducedShape, NotSquare,
    ParseError, PatternMismatch, QDiracError, UnboundAtom, UnknownCase, UnknownGate,
)
from .scalar import Coefficient, Scalar
from .term import (
    Term, add, dag, gate, gate_names, identity, ket0, ket1, ket_string, kron,
    kron_n, mul, render, scale, uf, zero,
)
from .rewrite import (
    NormalForm, RewriteTrace, Rewriter, assoc_right, base_reduce, cancel_zero,
    contract_inner, dagger_push, distribute, gate_reduce, mult_kron,
    normalize_operator, operate_reduce, render_nf, replay, unified_base,
)
from .oracle import (
    DenseMatrix, ObsResult, SampleEnv, eval_dense, mat_equiv, obs_equiv, trace_dense,
)
from .quantum import (
    MixedState, density, mea_mix, mix_equal, probability, pure_mix, super_,
    super_reduce, sym_trace, total_mass, unit_mix,
)
from .parser import parse, parse_mixed, parse_scalar
from .corpus import Assertion, RunConfig, RunReport, parse_corpus, run_file

__version__ = "0.1.0"

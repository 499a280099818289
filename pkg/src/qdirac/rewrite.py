"""Law-driven normalization of Dirac terms.

The catalog follows the usual algebra of scaled matrix expressions: inner
products of basis vectors collapse to scalars (L1), associativity (L2),
scalar/zero/identity absorption (L3-L10), distribution (L11/L12), the
mixed-product law for tensors (L13) and conjugate-transpose pushing
(L14-L16).  Two derived lookup tables speed up the common cases: B_db for
the four basis matrices acting on single-qubit states, and G_db for the
Pauli/Hadamard gates; their entries are computed from the primitive laws at
import time, not written down by hand.

The driver is a deterministic staged pipeline: push daggers to the leaves,
reduce to a fixpoint under the inner rule set (outermost-first, retrying a
node after its children change), then collect the result into a canonical
sum over computational-basis tensor factors.

When no trace is requested the same normal form is computed directly over
the sparse sum-of-basis-factors representation (each subterm becomes a map
from basis row/column bit strings to exact scalars), which skips the
intermediate term churn; the step-by-step pipeline is the traced mode and
the two are required to agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional

from .errors import FuelExhausted, NotInReducedShape
from .scalar import Scalar
from .term import (
    ADD, DAG, IDENT, KET0, KET1, KRON, MUL, SCALE, ZERO,
    Term, add, dag, gate, identity, ket0, ket1, kron, kron_all, mul, render, scale, zero,
)

DEFAULT_FUEL = 10 ** 6

# Basis factors of a normal form, one per 2-dimensional tensor slot.
F_K0, F_K1 = 0, 1
F_B0, F_B1 = 2, 3          # bras <0|, <1|
F_KB = 4                   # F_KB + 2*b + b' encodes |b><b'|


def f_kb(b: int, bp: int) -> int:
    return F_KB + 2 * b + bp


_FACTOR_NAMES = {
    F_K0: "|0>", F_K1: "|1>", F_B0: "<0|", F_B1: "<1|",
    f_kb(0, 0): "B0", f_kb(0, 1): "B1", f_kb(1, 0): "B2", f_kb(1, 1): "B3",
}


def _factor_class(f: int) -> int:
    if f in (F_K0, F_K1):
        return 0
    if f in (F_B0, F_B1):
        return 1
    return 2


def _factors_from_bits(rbits: tuple[int, ...], cbits: tuple[int, ...]) -> tuple[int, ...]:
    """Canonical factor tuple for a summand |rbits><cbits|: paired |b><b'|
    slots first, then the leftover ket or bra slots."""
    k = min(len(rbits), len(cbits))
    out = [f_kb(rbits[i], cbits[i]) for i in range(k)]
    out.extend(F_K0 + b for b in rbits[k:])
    out.extend(F_B0 + b for b in cbits[k:])
    return tuple(out)


def _factors_to_bits(factors: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    rbits, cbits = [], []
    for f in factors:
        if f in (F_K0, F_K1):
            rbits.append(f)
        elif f in (F_B0, F_B1):
            cbits.append(f - F_B0)
        else:
            b, bp = divmod(f - F_KB, 2)
            rbits.append(b)
            cbits.append(bp)
    return tuple(rbits), tuple(cbits)


@dataclass(frozen=True)
class NormalForm:
    """Canonical sum of scalar-weighted tensor products of basis factors."""

    dims: tuple[int, int]
    summands: tuple[tuple[Scalar, tuple[int, ...]], ...]

    def is_zero(self) -> bool:
        return not self.summands

    def as_scalar(self) -> Scalar:
        """Coerce a 1x1 normal form to its scalar value."""
        if self.dims != (1, 1):
            raise NotInReducedShape(f"not a 1x1 normal form: dims {self.dims}")
        total = Scalar.zero()
        for s, _ in self.summands:
            total = total + s
        return total

    def to_term(self) -> Term:
        if not self.summands:
            return zero(*self.dims)
        parts = []
        for s, factors in self.summands:
            if factors:
                body = kron_all([_factor_term(f) for f in factors])
            else:
                body = identity(1)
            parts.append(body if s.is_one() else scale(s, body))
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = add(p, out)
        return out

    def map_scalars(self, fn) -> "NormalForm":
        items = {}
        for s, factors in self.summands:
            s2 = fn(s)
            if not s2.is_zero():
                items[factors] = s2
        return NormalForm(self.dims, tuple(sorted(((s, f) for f, s in items.items()),
                                                  key=lambda kv: kv[1])))

    def __str__(self):
        return render_nf(self)


def _factor_term(f: int) -> Term:
    if f == F_K0:
        return ket0()
    if f == F_K1:
        return ket1()
    if f == F_B0:
        return dag(ket0())
    if f == F_B1:
        return dag(ket1())
    b, bp = divmod(f - F_KB, 2)
    return mul(ket0() if b == 0 else ket1(), dag(ket0() if bp == 0 else ket1()))


# --- rewrite trace -----------------------------------------------------


@dataclass
class RewriteStep:
    law: str
    path: tuple[int, ...]
    before: Term
    after: Term

    def as_dict(self) -> dict:
        return {
            "law": self.law,
            "path": list(self.path),
            "before": render(self.before),
            "after": render(self.after),
        }

    def as_line(self) -> str:
        pos = ".".join(map(str, self.path)) or "root"
        return f"{self.law} @ {pos}: {render(self.before)}  ->  {render(self.after)}"


class RewriteTrace:
    def __init__(self):
        self.steps: list[RewriteStep] = []

    def append(self, law, path, before, after):
        self.steps.append(RewriteStep(law, tuple(path), before, after))

    def as_lines(self) -> list[str]:
        return [s.as_line() for s in self.steps]

    def as_dicts(self) -> list[dict]:
        return [s.as_dict() for s in self.steps]


def _rebuild(t: Term, children) -> Term:
    if t.kind == SCALE:
        return scale(t.payload, children[0])
    if t.kind == MUL:
        return mul(children[0], children[1])
    if t.kind == ADD:
        return add(children[0], children[1])
    if t.kind == KRON:
        return kron(children[0], children[1])
    if t.kind == DAG:
        return dag(children[0])
    return t


def _subst(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    children = list(t.children)
    children[path[0]] = _subst(children[path[0]], path[1:], new)
    return _rebuild(t, children)


def replay(t: Term, trace: RewriteTrace) -> Term:
    """Re-apply a recorded trace; each step must match the current subterm."""
    for step in trace.steps:
        cur = t
        for i in step.path:
            cur = cur.children[i]
        if cur is not step.before:
            raise ValueError(f"trace replay mismatch at {step.path}")
        t = _subst(t, step.path, step.after)
    return t


# --- cached exact-scalar arithmetic for the sparse evaluator -----------


class _SparseUnsupported(Exception):
    """Raised for dims the basis-factor representation cannot express."""


_S_ONE = Scalar.one()
_S_INTERN: dict[Scalar, Scalar] = {_S_ONE: _S_ONE}
_SMUL_CACHE: dict[tuple[Scalar, Scalar], Scalar] = {}
_SADD_CACHE: dict[tuple[Scalar, Scalar], Scalar] = {}
_SCONJ_CACHE: dict[Scalar, Scalar] = {}


def _intern_scalar(s: Scalar) -> Scalar:
    hit = _S_INTERN.get(s)
    if hit is None:
        _S_INTERN[s] = s
        return s
    return hit


def _cmul(a: Scalar, b: Scalar) -> Scalar:
    if a is _S_ONE:
        return b
    if b is _S_ONE:
        return a
    key = (a, b)
    hit = _SMUL_CACHE.get(key)
    if hit is None:
        hit = _intern_scalar(a * b)
        _SMUL_CACHE[key] = hit
    return hit


def _cadd(a: Scalar, b: Scalar) -> Scalar:
    key = (a, b)
    hit = _SADD_CACHE.get(key)
    if hit is None:
        hit = _intern_scalar(a + b)
        _SADD_CACHE[key] = hit
    return hit


def _cconj(a: Scalar) -> Scalar:
    hit = _SCONJ_CACHE.get(a)
    if hit is None:
        hit = _intern_scalar(a.conj())
        _SCONJ_CACHE[a] = hit
    return hit


# --- rule groups -------------------------------------------------------

ALL_GROUPS = frozenset(
    ["assoc", "scale", "zero", "ident", "contract", "gate_db", "base_db",
     "mult_kron", "distribute"]
)

_PLUS = gate("ket_plus")
_MINUS = gate("ket_minus")
_PROTECTED = (_PLUS, _MINUS)

G_TABLE: dict[tuple[Term, Term], Term] = {}
B_TABLE: dict[tuple[Term, Term], Term] = {}


def _flatten_kron(t: Term) -> list[Term]:
    out = []
    stack = [t]
    while stack:
        cur = stack.pop()
        if cur.kind == KRON:
            stack.append(cur.children[1])
            stack.append(cur.children[0])
        else:
            out.append(cur)
    return out


def _try_mult_kron(a: Term, b: Term) -> Optional[Term]:
    fa, fb = _flatten_kron(a), _flatten_kron(b)
    if len(fa) == 1 and len(fb) == 1:
        return None
    segments = []
    i = j = 0
    while i < len(fa) and j < len(fb):
        acc_l, acc_r = [fa[i]], [fb[j]]
        cols_l, rows_r = fa[i].cols, fb[j].rows
        i += 1
        j += 1
        while cols_l != rows_r:
            if cols_l < rows_r:
                if i >= len(fa):
                    return None
                acc_l.append(fa[i])
                cols_l *= fa[i].cols
                i += 1
            else:
                if j >= len(fb):
                    return None
                acc_r.append(fb[j])
                rows_r *= fb[j].rows
                j += 1
        segments.append((acc_l, acc_r))
    if i < len(fa) or j < len(fb) or len(segments) < 2:
        return None
    return kron_all([mul(kron_all(l), kron_all(r)) for l, r in segments])


class Rewriter:
    """Stateful driver: fuel accounting, optional trace, memoized reduction."""

    def __init__(self, groups=ALL_GROUPS, fuel: int = DEFAULT_FUEL,
                 trace: RewriteTrace | None = None, use_tables: bool = True):
        self.groups = frozenset(groups)
        self.fuel = fuel
        self.steps = 0
        self.trace = trace
        self.use_tables = use_tables
        self._memo: dict[Term, Term] = {}
        self._sparse_memo: dict[Term, dict] = {}

    # -- bookkeeping
    def _log(self, law: str, path, before: Term, after: Term):
        self.steps += 1
        if self.steps > self.fuel:
            raise FuelExhausted(self.fuel)
        if self.trace is not None:
            self.trace.append(law, path, before, after)

    # -- the inner rule set, tried at the root of a node
    def _rewrite_root(self, t: Term):
        g = self.groups
        kind = t.kind
        if kind == SCALE:
            c, x = t.payload, t.children[0]
            if "scale" in g and x.kind == SCALE:
                return "L2", scale(c * x.payload, x.children[0])
            if "zero" in g:
                if c.is_zero():
                    return "L3", zero(*t.dims)
                if x.kind == ZERO:
                    return "L3", zero(*t.dims)
                if c.is_one():
                    return "L3", x
            return None
        if kind == MUL:
            a, b = t.children
            if "zero" in g and (a.kind == ZERO or b.kind == ZERO):
                return "L7", zero(a.rows, b.cols)
            if "scale" in g:
                if a.kind == SCALE:
                    return "L5", scale(a.payload, mul(a.children[0], b))
                if b.kind == SCALE:
                    return "L5", scale(b.payload, mul(a, b.children[0]))
            if "ident" in g:
                if a.kind == IDENT:
                    return "L8", b
                if b.kind == IDENT:
                    return "L8", a
            if self.use_tables:
                if "gate_db" in g:
                    hit = G_TABLE.get((a, b))
                    if hit is not None:
                        return "G_db", hit
                if "base_db" in g:
                    hit = B_TABLE.get((a, b))
                    if hit is not None:
                        return "B_db", hit
            if "contract" in g and a.kind == DAG and a.children[0].kind in (KET0, KET1):
                bra_bit = 0 if a.children[0].kind == KET0 else 1
                if b.kind in (KET0, KET1):
                    ket_bit = 0 if b.kind == KET0 else 1
                    return "L1", identity(1) if bra_bit == ket_bit else zero(1, 1)
                if b.kind == MUL and b.children[0].kind in (KET0, KET1):
                    ket_bit = 0 if b.children[0].kind == KET0 else 1
                    if bra_bit == ket_bit:
                        return "L1", b.children[1]
                    return "L1", zero(1, b.cols)
            if "assoc" in g and a.kind == MUL:
                return "L2", mul(a.children[0], mul(a.children[1], b))
            if "mult_kron" in g and (a.kind == KRON or b.kind == KRON):
                out = _try_mult_kron(a, b)
                if out is not None:
                    return "L13", out
            if "distribute" in g:
                if a.kind == ADD:
                    return "L11", add(mul(a.children[0], b), mul(a.children[1], b))
                if b.kind == ADD:
                    return "L11", add(mul(a, b.children[0]), mul(a, b.children[1]))
            return None
        if kind == KRON:
            a, b = t.children
            if "zero" in g and (a.kind == ZERO or b.kind == ZERO):
                return "L10", zero(*t.dims)
            if "scale" in g:
                if a.kind == SCALE:
                    return "L6", scale(a.payload, kron(a.children[0], b))
                if b.kind == SCALE:
                    return "L6", scale(b.payload, kron(a, b.children[0]))
            if "ident" in g:
                if a.kind == IDENT and a.payload == 1:
                    return "L8", b
                if b.kind == IDENT and b.payload == 1:
                    return "L8", a
                if a.kind == IDENT and b.kind == IDENT:
                    return "L8", identity(a.payload * b.payload)
            if "assoc" in g and a.kind == KRON:
                return "L2", kron(a.children[0], kron(a.children[1], b))
            if "distribute" in g:
                if a.kind == ADD and a not in _PROTECTED:
                    return "L12", add(kron(a.children[0], b), kron(a.children[1], b))
                if b.kind == ADD and b not in _PROTECTED:
                    return "L12", add(kron(a, b.children[0]), kron(a, b.children[1]))
            return None
        if kind == ADD:
            a, b = t.children
            if "zero" in g:
                if a.kind == ZERO:
                    return "L9", b
                if b.kind == ZERO:
                    return "L9", a
            if "assoc" in g and a.kind == ADD:
                return "L2", add(a.children[0], add(a.children[1], b))
            if "distribute" in g and self.groups == frozenset({"distribute", "scale"}):
                # standalone distribute() also pushes scalars through sums (L4)
                pass
            return None
        return None

    def reduce(self, t: Term, _path: tuple[int, ...] = ()) -> Term:
        memo_ok = self.trace is None
        if memo_ok:
            hit = self._memo.get(t)
            if hit is not None:
                return hit
        start = t
        while True:
            r = self._rewrite_root(t)
            if r is not None:
                law, new = r
                self._log(law, _path, t, new)
                t = new
                continue
            if not t.children:
                break
            changed = False
            new_children = []
            for i, c in enumerate(t.children):
                rc = self.reduce(c, _path + (i,))
                new_children.append(rc)
                changed = changed or rc is not c
            if not changed:
                break
            t = _rebuild(t, new_children)
        if memo_ok:
            self._memo[start] = t
            self._memo[t] = t
        return t

    # -- dagger pushing (L14-L16), run as a first stage
    def push_daggers(self, t: Term, _path: tuple[int, ...] = ()) -> Term:
        while t.kind == DAG:
            x = t.children[0]
            if x.kind == DAG:
                self._log("L16", _path, t, x.children[0])
                t = x.children[0]
            elif x.kind == SCALE:
                new = scale(x.payload.conj(), dag(x.children[0]))
                self._log("L14", _path, t, new)
                t = new
            elif x.kind == MUL:
                new = mul(dag(x.children[1]), dag(x.children[0]))
                self._log("L14", _path, t, new)
                t = new
            elif x.kind == ADD:
                new = add(dag(x.children[0]), dag(x.children[1]))
                self._log("L15", _path, t, new)
                t = new
            elif x.kind == KRON:
                new = kron(dag(x.children[0]), dag(x.children[1]))
                self._log("L15", _path, t, new)
                t = new
            elif x.kind == IDENT:
                self._log("D_db", _path, t, x)
                t = x
            elif x.kind == ZERO:
                new = zero(x.cols, x.rows)
                self._log("D_db", _path, t, new)
                t = new
            else:
                break  # dagger of a basis ket stays: that is a bra leaf
        if not t.children or (t.kind == DAG and t.children[0].kind in (KET0, KET1)):
            return t
        new_children = tuple(
            self.push_daggers(c, _path + (i,)) for i, c in enumerate(t.children)
        )
        if any(nc is not c for nc, c in zip(new_children, t.children)):
            t = _rebuild(t, new_children)
        return t

    def normalize(self, t: Term) -> NormalForm:
        if self.trace is None and self.use_tables and self.groups == ALL_GROUPS:
            try:
                return self._normalize_sparse(t)
            except _SparseUnsupported:
                pass
        reduced = self.reduce(self.push_daggers(t))
        return unified_base(reduced)

    # -- direct sparse evaluation (untraced mode)
    def _normalize_sparse(self, t: Term) -> NormalForm:
        entries = self._sparse(t)
        acc: dict[tuple[int, ...], Scalar] = {}
        for (rbits, cbits), s in entries.items():
            acc[_factors_from_bits(rbits, cbits)] = s
        summands = tuple(sorted(((s, f) for f, s in acc.items()), key=lambda kv: kv[1]))
        return NormalForm(t.dims, summands)

    def _sparse(self, t: Term) -> dict:
        hit = self._sparse_memo.get(t)
        if hit is not None:
            return hit
        kind = t.kind
        if kind == KET0:
            out = {((0,), ()): Scalar.one()}
        elif kind == KET1:
            out = {((1,), ()): Scalar.one()}
        elif kind == ZERO:
            out = {}
        elif kind == IDENT:
            n = t.payload
            if n == 1:
                out = {((), ()): Scalar.one()}
            else:
                slots = n.bit_length() - 1
                if 2 ** slots != n:
                    raise _SparseUnsupported(n)
                one = Scalar.one()
                out = {(bits, bits): one for bits in product((0, 1), repeat=slots)}
        elif kind == SCALE:
            c = _intern_scalar(t.payload)
            if c.is_zero():
                out = {}
            else:
                out = {k: _cmul(c, s) for k, s in self._sparse(t.children[0]).items()}
        elif kind == DAG:
            out = {
                (cbits, rbits): _cconj(s)
                for (rbits, cbits), s in self._sparse(t.children[0]).items()
            }
        elif kind == ADD:
            out = dict(self._sparse(t.children[0]))
            for k, s in self._sparse(t.children[1]).items():
                cur = out.get(k)
                merged = s if cur is None else _cadd(cur, s)
                if merged.is_zero():
                    del out[k]
                else:
                    out[k] = merged
        elif kind == KRON:
            left = self._sparse(t.children[0])
            right = self._sparse(t.children[1])
            out = {}
            for (ra, ca), sa in left.items():
                for (rb, cb), sb in right.items():
                    out[(ra + rb, ca + cb)] = _cmul(sa, sb)
        else:  # MUL: contract column bits against row bits, vector end first
            chain = self._mul_chain(t)
            if chain[-1].cols == 1:
                out = self._sparse(chain[-1])
                for f in reversed(chain[:-1]):
                    out = self._mul_maps(self._sparse(f), out)
            else:
                out = self._sparse(chain[0])
                for f in chain[1:]:
                    out = self._mul_maps(out, self._sparse(f))
        self.steps += len(out)
        if self.steps > self.fuel:
            raise FuelExhausted(self.fuel)
        self._sparse_memo[t] = out
        return out

    def _mul_chain(self, t: Term) -> list[Term]:
        """Flatten a MatMul spine, keeping already-evaluated subterms whole."""
        out: list[Term] = []
        stack = [t.children[1], t.children[0]]
        while stack:
            cur = stack.pop()
            if cur.kind == MUL and cur not in self._sparse_memo:
                stack.append(cur.children[1])
                stack.append(cur.children[0])
            else:
                out.append(cur)
        return out

    def _mul_maps(self, left: dict, right: dict) -> dict:
        by_row: dict[tuple[int, ...], list] = {}
        for (rb, cb), sb in right.items():
            by_row.setdefault(rb, []).append((cb, sb))
        out: dict = {}
        for (ra, ca), sa in left.items():
            for cb, sb in by_row.get(ca, ()):
                key = (ra, cb)
                prod = _cmul(sa, sb)
                cur = out.get(key)
                merged = prod if cur is None else _cadd(cur, prod)
                if merged.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = merged
        self.steps += len(out)
        return out


# --- normal-form collection (the unified_base step) --------------------


def _expand(t: Term) -> list[tuple[Scalar, tuple[int, ...]]]:
    kind = t.kind
    if kind == ZERO:
        return []
    if kind == KET0:
        return [(Scalar.one(), (F_K0,))]
    if kind == KET1:
        return [(Scalar.one(), (F_K1,))]
    if kind == DAG:
        inner = t.children[0]
        if inner.kind == KET0:
            return [(Scalar.one(), (F_B0,))]
        if inner.kind == KET1:
            return [(Scalar.one(), (F_B1,))]
        raise NotInReducedShape(f"irreducible dagger: {render(t)}")
    if kind == IDENT:
        n = t.payload
        if n == 1:
            return [(Scalar.one(), ())]
        slots = n.bit_length() - 1
        if 2 ** slots != n:
            raise NotInReducedShape(f"identity of non-power-of-two dim {n}")
        return [
            (Scalar.one(), tuple(f_kb(b, b) for b in bits))
            for bits in product((0, 1), repeat=slots)
        ]
    if kind == SCALE:
        return [(t.payload * s, f) for s, f in _expand(t.children[0])]
    if kind == ADD:
        return _expand(t.children[0]) + _expand(t.children[1])
    if kind == KRON:
        left, right = _expand(t.children[0]), _expand(t.children[1])
        return [(sl * sr, fl + fr) for sl, fl in left for sr, fr in right]
    if kind == MUL:
        a, b = t.children
        if a.kind in (KET0, KET1) and b.kind == DAG and b.children[0].kind in (KET0, KET1):
            bb = 0 if a.kind == KET0 else 1
            bp = 0 if b.children[0].kind == KET0 else 1
            return [(Scalar.one(), (f_kb(bb, bp),))]
        raise NotInReducedShape(f"irreducible product: {render(t)}")
    raise NotInReducedShape(f"unexpected node in reduced term: {render(t)}")


def unified_base(t: Term) -> NormalForm:
    """Collect a fully reduced term into its canonical normal form."""
    acc: dict[tuple[int, ...], Scalar] = {}
    signature = None
    for s, raw_factors in _expand(t):
        factors = _factors_from_bits(*_factors_to_bits(raw_factors))
        classes = tuple(_factor_class(f) for f in factors)
        if signature is None:
            signature = classes
        elif signature != classes:
            raise NotInReducedShape("summands with mismatched tensor signatures")
        cur = acc.get(factors)
        acc[factors] = s if cur is None else cur + s
    summands = tuple(
        sorted(((s, f) for f, s in acc.items() if not s.is_zero()), key=lambda kv: kv[1])
    )
    return NormalForm(t.dims, summands)


# --- public single-purpose passes and pipelines ------------------------


def operate_reduce(t: Term, fuel: int = DEFAULT_FUEL,
                   trace: RewriteTrace | None = None,
                   rewriter: Rewriter | None = None) -> NormalForm:
    rw = rewriter or Rewriter(fuel=fuel, trace=trace)
    return rw.normalize(t)


def normalize_operator(t: Term, fuel: int = DEFAULT_FUEL,
                       trace: RewriteTrace | None = None,
                       rewriter: Rewriter | None = None) -> NormalForm:
    return operate_reduce(t, fuel=fuel, trace=trace, rewriter=rewriter)


def _pass(t: Term, groups, use_tables: bool = True) -> Term:
    return Rewriter(groups=frozenset(groups), use_tables=use_tables).reduce(t)


def contract_inner(t: Term) -> Term:
    return _pass(t, {"contract"})


def base_reduce(t: Term) -> Term:
    return _pass(t, {"base_db", "contract", "assoc", "scale", "zero", "ident"})


def gate_reduce(t: Term) -> Term:
    return _pass(t, {"gate_db", "scale", "zero", "ident"})


def assoc_right(t: Term) -> Term:
    return _pass(t, {"assoc"})


def mult_kron(t: Term) -> Term:
    return _pass(t, {"mult_kron"})


def distribute(t: Term) -> Term:
    out = _pass(t, {"distribute", "scale"})
    return _distribute_scale_over_add(out)


def _distribute_scale_over_add(t: Term) -> Term:
    if t.kind == SCALE and t.children[0].kind == ADD:
        a, b = t.children[0].children
        return add(
            _distribute_scale_over_add(scale(t.payload, a)),
            _distribute_scale_over_add(scale(t.payload, b)),
        )
    if not t.children:
        return t
    return _rebuild(t, tuple(_distribute_scale_over_add(c) for c in t.children))


def cancel_zero(t: Term) -> Term:
    return _pass(t, {"zero", "ident"})


def dagger_push(t: Term) -> Term:
    return Rewriter().push_daggers(t)


# --- derived tables (B_db, G_db) ---------------------------------------

_STATES = {
    "|0>": ket0(),
    "|1>": ket1(),
    "|+>": _PLUS,
    "|->": _MINUS,
}


def _state_nf(t: Term) -> NormalForm:
    return Rewriter(use_tables=False).normalize(t)


_STATE_NFS = [(t, _state_nf(t)) for t in _STATES.values()]


def _resugar_state(nf: NormalForm) -> Term:
    """Write a single-qubit normal form as c .* s with s in {|0>,|1>,|+>,|->}."""
    if nf.is_zero():
        return zero(*nf.dims)
    for cand, cand_nf in _STATE_NFS:
        if len(cand_nf.summands) != len(nf.summands):
            continue
        if any(f1 != f2 for (_, f1), (_, f2) in zip(cand_nf.summands, nf.summands)):
            continue
        ratios = {
            s * cs.reciprocal() for (cs, _), (s, _) in zip(cand_nf.summands, nf.summands)
        }
        if len(ratios) == 1:
            c = ratios.pop()
            return cand if c.is_one() else scale(c, cand)
    return nf.to_term()


def _init_tables():
    states = list(_STATES.values())
    for name in ("X", "Y", "Z", "H"):
        body = gate(name)
        for s in states:
            nf = _state_nf(mul(body, s))
            G_TABLE[(body, s)] = _resugar_state(nf)
    for name in ("B0", "B1", "B2", "B3"):
        body = gate(name)
        for s in states:
            nf = _state_nf(mul(body, s))
            B_TABLE[(body, s)] = _resugar_state(nf)


_init_tables()


# --- sugared rendering of normal forms ---------------------------------

_KNOWN_OPERATORS: list[tuple[str, Term]] = [
    (name, gate(name))
    for name in ("B0", "B1", "B2", "B3", "X", "Y", "Z", "H", "CX", "CZ", "SWAP", "TOF")
]


def _nf_key(nf: NormalForm):
    return (nf.dims, nf.summands)


_KNOWN_OPERATOR_NFS = {
    _nf_key(Rewriter().normalize(t)): name for name, t in _KNOWN_OPERATORS
}
for _n in (2, 4, 8):
    _KNOWN_OPERATOR_NFS[_nf_key(unified_base(identity(_n)))] = f"I({_n})"


_SQRT2_SCALAR = Scalar.sqrt2()


def _factor_vector(summands) -> Optional[tuple[Scalar, list[str]]]:
    """Try to factor a ket normal form into single-qubit sugar tokens."""
    if not summands:
        return None
    width = len(summands[0][1])
    if width == 1:
        for cand, cand_nf in _STATE_NFS:
            if len(cand_nf.summands) != len(summands):
                continue
            if any(f1 != f2 for (_, f1), (s, f1_) in zip(cand_nf.summands, summands)
                   for f2 in [f1_]):
                continue
            ratios = set()
            for (cs, _), (s, _) in zip(cand_nf.summands, summands):
                try:
                    ratios.add(s * cs.reciprocal())
                except Exception:
                    return None
            if len(ratios) == 1:
                token = {id(v): k for k, v in _STATES.items()}[id(cand)]
                return ratios.pop(), [token]
        return None
    groups: dict[int, list] = {}
    for s, factors in summands:
        groups.setdefault(factors[0], []).append((s, factors[1:]))
    if set(groups) == {F_K0}:
        rest = _factor_vector(groups[F_K0])
        return None if rest is None else (rest[0], ["|0>"] + rest[1])
    if set(groups) == {F_K1}:
        rest = _factor_vector(groups[F_K1])
        return None if rest is None else (rest[0], ["|1>"] + rest[1])
    if set(groups) == {F_K0, F_K1}:
        r0 = _factor_vector(groups[F_K0])
        r1 = _factor_vector(groups[F_K1])
        if r0 is None or r1 is None or r0[1] != r1[1]:
            return None
        s0, s1 = r0[0], r1[0]
        try:
            ratio = s1 * s0.reciprocal()
        except Exception:
            return None
        if ratio.is_one():
            return s0 * _SQRT2_SCALAR, ["|+>"] + r0[1]
        if ratio == Scalar.rational(-1):
            return s0 * _SQRT2_SCALAR, ["|->"] + r0[1]
    return None


def _join_tokens(tokens: list[str]) -> str:
    if all(t in ("|0>", "|1>") for t in tokens) and len(tokens) > 1:
        return "|" + ",".join(t[1] for t in tokens) + ">"
    return " # ".join(tokens)


def render_nf(nf: NormalForm) -> str:
    if nf.is_zero():
        return f"O({nf.dims[0]},{nf.dims[1]})"
    name = _KNOWN_OPERATOR_NFS.get(_nf_key(nf))
    if name is not None:
        return name
    if nf.summands and nf.summands[0][1] and all(
        _factor_class(f) == 0 for f in nf.summands[0][1]
    ):
        factored = _factor_vector(list(nf.summands))
        if factored is not None:
            s, tokens = factored
            body = _join_tokens(tokens)
            if s.is_one():
                return body
            if len(tokens) > 1 and " # " in body:
                body = f"({body})"
            return f"{s} .* {body}" if len(s.terms) == 1 else f"({s}) .* {body}"
    parts = []
    for s, factors in nf.summands:
        if not factors:
            parts.append(str(s))
            continue
        classes = {_factor_class(f) for f in factors}
        if classes == {0}:
            body = "|" + ",".join("01"[f] for f in factors) + ">"
        elif classes == {1}:
            body = "<" + ",".join("01"[f - F_B0] for f in factors) + "|"
        else:
            body = " # ".join(_FACTOR_NAMES[f] for f in factors)
        if s.is_one():
            parts.append(body)
        else:
            s_str = str(s) if len(s.terms) == 1 and " + " not in str(s) else f"({s})"
            parts.append(f"{s_str} .* {body}")
    return " + ".join(parts)

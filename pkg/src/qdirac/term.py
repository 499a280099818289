"""Dimension-annotated expression trees for Dirac terms, plus the gate library.

Terms are immutable and hash-consed: structurally equal terms are the same
object, so equality checks used by the rewrite tables are O(1).  Dimension
errors can only arise at construction time; every rewrite therefore maps
well-formed terms to well-formed terms.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ArityMismatch, DimMismatch, InvalidQubitIndex, UnknownGate
from .scalar import Scalar

KET0 = "ket0"
KET1 = "ket1"
ZERO = "zero"
IDENT = "ident"
SCALE = "scale"
MUL = "mul"
ADD = "add"
KRON = "kron"
DAG = "dag"

_intern: dict = {}


class Term:
    __slots__ = ("kind", "payload", "children", "rows", "cols", "_hash")

    def __new__(cls, kind, payload, children, rows, cols):
        key = (kind, payload, tuple(id(c) for c in children))
        cached = _intern.get(key)
        if cached is not None:
            return cached
        self = object.__new__(cls)
        self.kind = kind
        self.payload = payload
        self.children = children
        self.rows = rows
        self.cols = cols
        self._hash = hash((kind, payload, children))
        _intern[key] = self
        return self

    @property
    def dims(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __hash__(self):
        return self._hash

    # Hash-consing makes identity coincide with structural equality.
    def __eq__(self, other):
        return self is other

    def dagger(self) -> "Term":
        return dag(self)

    def __repr__(self):
        return f"<{render(self)} : {self.rows}x{self.cols}>"


def ket0() -> Term:
    return Term(KET0, None, (), 2, 1)


def ket1() -> Term:
    return Term(KET1, None, (), 2, 1)


def zero(rows: int, cols: int) -> Term:
    if rows < 1 or cols < 1:
        raise DimMismatch("positive dims", (rows, cols), "zero")
    return Term(ZERO, (rows, cols), (), rows, cols)


def identity(n: int) -> Term:
    if n < 1:
        raise DimMismatch("positive dim", n, "identity")
    return Term(IDENT, n, (), n, n)


def scale(c: Scalar, t: Term) -> Term:
    return Term(SCALE, c, (t,), t.rows, t.cols)


def mul(a: Term, b: Term) -> Term:
    if a.cols != b.rows:
        raise DimMismatch(a.cols, b.rows, "matmul inner dimension")
    return Term(MUL, None, (a, b), a.rows, b.cols)


def add(a: Term, b: Term) -> Term:
    if a.dims != b.dims:
        raise DimMismatch(a.dims, b.dims, "addition")
    return Term(ADD, None, (a, b), a.rows, a.cols)


def kron(a: Term, b: Term) -> Term:
    return Term(KRON, None, (a, b), a.rows * b.rows, a.cols * b.cols)


def dag(t: Term) -> Term:
    return Term(DAG, None, (t,), t.cols, t.rows)


def add_all(terms) -> Term:
    terms = list(terms)
    if not terms:
        raise ValueError("empty sum")
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = add(t, out)
    return out


def kron_all(terms) -> Term:
    terms = list(terms)
    if not terms:
        raise ValueError("empty tensor product")
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = kron(t, out)
    return out


def recompute_dims(t: Term) -> tuple[int, int]:
    """Recompute dims bottom-up, ignoring the cached values (debug checks)."""
    if t.kind in (KET0, KET1):
        return (2, 1)
    if t.kind == ZERO:
        return t.payload
    if t.kind == IDENT:
        return (t.payload, t.payload)
    if t.kind == SCALE:
        return recompute_dims(t.children[0])
    if t.kind == MUL:
        (ar, ac), (br, bc) = recompute_dims(t.children[0]), recompute_dims(t.children[1])
        if ac != br:
            raise DimMismatch(ac, br, "matmul inner dimension")
        return (ar, bc)
    if t.kind == ADD:
        d0, d1 = recompute_dims(t.children[0]), recompute_dims(t.children[1])
        if d0 != d1:
            raise DimMismatch(d0, d1, "addition")
        return d0
    if t.kind == KRON:
        (ar, ac), (br, bc) = recompute_dims(t.children[0]), recompute_dims(t.children[1])
        return (ar * br, ac * bc)
    if t.kind == DAG:
        r, c = recompute_dims(t.children[0])
        return (c, r)
    raise ValueError(f"unknown node kind {t.kind}")


# --- rendering ---------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_KRON, _PREC_SCALE, _PREC_ATOM = 0, 1, 2, 3, 4


def render(t: Term) -> str:
    """Canonical ASCII surface syntax; parse(render(t)) reproduces t's meaning."""
    return _render(t, _PREC_ADD)


def _render(t: Term, prec: int) -> str:
    if t.kind == KET0:
        return "|0>"
    if t.kind == KET1:
        return "|1>"
    if t.kind == ZERO:
        return f"O({t.rows},{t.cols})"
    if t.kind == IDENT:
        return f"I({t.payload})"
    if t.kind == DAG:
        inner = t.children[0]
        if inner.kind == KET0:
            return "<0|"
        if inner.kind == KET1:
            return "<1|"
        return _wrap(_render(inner, _PREC_ATOM) + "^", _PREC_ATOM, prec)
    if t.kind == SCALE:
        c = str(t.payload)
        if len(t.payload.terms) > 1:
            c = f"({c})"
        body = f"{c} .* {_render(t.children[0], _PREC_SCALE)}"
        return _wrap(body, _PREC_SCALE, prec)
    if t.kind == MUL:
        body = f"{_render(t.children[0], _PREC_MUL)} * {_render(t.children[1], _PREC_MUL)}"
        return _wrap(body, _PREC_MUL, prec)
    if t.kind == ADD:
        body = f"{_render(t.children[0], _PREC_ADD)} + {_render(t.children[1], _PREC_ADD)}"
        return _wrap(body, _PREC_ADD, prec)
    if t.kind == KRON:
        body = f"{_render(t.children[0], _PREC_KRON)} # {_render(t.children[1], _PREC_KRON)}"
        return _wrap(body, _PREC_KRON, prec)
    raise ValueError(f"unknown node kind {t.kind}")


def _wrap(body: str, body_prec: int, ctx_prec: int) -> str:
    return f"({body})" if body_prec < ctx_prec else body


# --- gate and state library -------------------------------------------


def _b(j: int, k: int) -> Term:
    lhs = ket0() if j == 0 else ket1()
    rhs = ket0() if k == 0 else ket1()
    return mul(lhs, dag(rhs))


def _scaled_sum(pairs) -> Term:
    return add_all(scale(c, t) if c is not None else t for c, t in pairs)


_HALF = Scalar.rational(1, 2)
_INV_SQRT2 = Scalar.inv_sqrt2()
_NEG_INV_SQRT2 = -Scalar.inv_sqrt2()
_NEG_ONE = Scalar.rational(-1)
_NEG_I = -Scalar.i()
_I = Scalar.i()


def _build_library() -> dict[str, Term]:
    b0, b1, b2, b3 = _b(0, 0), _b(0, 1), _b(1, 0), _b(1, 1)
    i2 = identity(2)
    x = add(b1, b2)
    y = add(scale(_NEG_I, b1), scale(_I, b2))
    z = add(b0, scale(_NEG_ONE, b3))
    h = _scaled_sum(
        [(_INV_SQRT2, b0), (_INV_SQRT2, b1), (_INV_SQRT2, b2), (_NEG_INV_SQRT2, b3)]
    )
    plus = add(scale(_INV_SQRT2, ket0()), scale(_INV_SQRT2, ket1()))
    minus = add(scale(_INV_SQRT2, ket0()), scale(_NEG_INV_SQRT2, ket1()))
    cx = add(kron(b0, i2), kron(b3, x))
    xc = add(kron(x, b3), kron(i2, b0))
    swap = add_all([kron(b0, b0), kron(b1, b2), kron(b2, b1), kron(b3, b3)])
    cz = add(kron(b0, i2), kron(b3, z))
    tof = add(kron(b0, identity(4)), kron(b3, cx))
    not_cx = add(kron(b0, x), kron(b3, i2))
    cxx = add(kron(b0, kron(i2, i2)), kron(b3, kron(x, x)))
    cix = add(kron(b0, kron(i2, i2)), kron(b3, kron(i2, x)))
    bell00 = add(scale(_INV_SQRT2, kron(ket0(), ket0())), scale(_INV_SQRT2, kron(ket1(), ket1())))
    bell01 = add(scale(_INV_SQRT2, kron(ket0(), ket1())), scale(_INV_SQRT2, kron(ket1(), ket0())))
    bell10 = add(
        scale(_INV_SQRT2, kron(ket0(), ket0())), scale(_NEG_INV_SQRT2, kron(ket1(), ket1()))
    )
    bell11 = add(
        scale(_INV_SQRT2, kron(ket0(), ket1())), scale(_NEG_INV_SQRT2, kron(ket1(), ket0()))
    )
    basis_sum = add_all([b0, b1, b2, b3])
    mi = kron(basis_sum, basis_sum)
    cps = kron(add(scale(_HALF, mi), scale(_NEG_ONE, kron(i2, i2))), i2)
    ora0 = add(kron(b0, add(kron(b0, x), kron(b3, i2))), kron(b3, kron(i2, i2)))
    ora1 = add(kron(b0, cx), kron(b3, kron(i2, i2)))
    ora2 = add(kron(b0, kron(i2, i2)), kron(b3, add(kron(b0, x), kron(b3, i2))))
    ora3 = add(kron(b0, kron(i2, i2)), kron(b3, cx))
    return {
        "B0": b0,
        "B1": b1,
        "B2": b2,
        "B3": b3,
        "I2": i2,
        "X": x,
        "Y": y,
        "Z": z,
        "H": h,
        "CX": cx,
        "XC": xc,
        "SWAP": swap,
        "CZ": cz,
        "TOF": tof,
        "not_CX": not_cx,
        "CXX": cxx,
        "CIX": cix,
        "ket_plus": plus,
        "ket_minus": minus,
        "bell00": bell00,
        "bell01": bell01,
        "bell10": bell10,
        "bell11": bell11,
        "MI": mi,
        "CPS": cps,
        "ORA0": ora0,
        "ORA1": ora1,
        "ORA2": ora2,
        "ORA3": ora3,
    }


_LIBRARY = _build_library()

# Parameterised entries: name -> number of parameters.
_PARAMETRIC = {"CE": 1, "Mea0": 2, "Mea1": 2, "Mea": 2, "Uf": 1, "kron_n": 2}


def gate_names() -> list[str]:
    return sorted(_LIBRARY) + sorted(_PARAMETRIC)


def gate(name: str, *params) -> Term:
    if name in _LIBRARY:
        if params:
            raise ArityMismatch(f"{name} takes no parameters")
        return _LIBRARY[name]
    if name not in _PARAMETRIC:
        raise UnknownGate(name)
    if len(params) != _PARAMETRIC[name]:
        raise ArityMismatch(f"{name} takes {_PARAMETRIC[name]} parameter(s), got {len(params)}")
    if name == "CE":
        return _ce(params[0])
    if name in ("Mea0", "Mea1", "Mea"):
        return _mea(name, int(params[0]), int(params[1]))
    if name == "Uf":
        return uf(int(params[0]))
    if name == "kron_n":
        return kron_n(int(params[0]), params[1])
    raise UnknownGate(name)


def _ce(angle: str) -> Term:
    phase = Scalar.phase(angle)
    b0, b3, i2 = _LIBRARY["B0"], _LIBRARY["B3"], _LIBRARY["I2"]
    return add(kron(b0, i2), kron(b3, add(scale(phase, b0), scale(phase, b3))))


def _mea(name: str, n: int, k: int) -> Term:
    if n < 0 or k < 0 or k > n:
        raise InvalidQubitIndex(f"measurement index k={k} outside 0..{n}")
    proj = _LIBRARY["B0"] if name == "Mea0" else _LIBRARY["B3"]
    if name == "Mea":
        return add(_mea("Mea0", n, k), _mea("Mea1", n, k))
    return kron(identity(2 ** k), kron(proj, identity(2 ** (n - k))))


def uf(n: int) -> Term:
    """The CX-ladder oracle on n+1 qubits used by the Deutsch-Jozsa family."""
    if n < 0:
        raise ValueError("uf needs n >= 0")
    if n == 0:
        return identity(2)
    wing = kron(_LIBRARY["CX"], identity(2 ** (n - 1)))
    return mul(wing, mul(kron(identity(2), uf(n - 1)), wing))


def kron_n(n: int, base: Term) -> Term:
    if n < 0:
        raise ValueError("kron_n needs n >= 0")
    if n == 0:
        return identity(1)
    out = base
    for _ in range(n - 1):
        out = kron(base, out)
    return out


def ket_string(bits: str) -> Term:
    """Tensor of single-qubit states from a comma-free component string."""
    states = {"0": ket0(), "1": ket1(), "+": _LIBRARY["ket_plus"], "-": _LIBRARY["ket_minus"]}
    try:
        return kron_all([states[b] for b in bits])
    except KeyError as exc:
        raise UnknownGate(f"unknown ket component {exc.args[0]!r}") from None

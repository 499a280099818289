"""Exact scalar ring: canonical forms, evaluation, conjugation, hypotheses."""

from __future__ import annotations

import random

import pytest

from qdirac.errors import NonInvertibleScalar, UnboundAtom
from qdirac.scalar import Coefficient, Scalar, s_add, s_eval, s_is_zero, s_mul

from conftest import rand_scalar

TOL = 1e-9


def _envs(names, count=5, seed=7):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        out.append({n: complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for n in names})
    return out


def _names(*scalars):
    names = set()
    for s in scalars:
        v, a = s.atoms()
        names |= v | a
    return names


def test_like_term_collection():
    assert Scalar.inv_sqrt2() + Scalar.inv_sqrt2() == Scalar.sqrt2()


def test_sqrt2_square_is_two():
    assert Scalar.sqrt2() * Scalar.sqrt2() == Scalar.rational(2)


def test_inv_sqrt2_sixth_power():
    s = Scalar.one()
    for _ in range(6):
        s = s * Scalar.inv_sqrt2()
    assert s == Scalar.rational(1, 8)


def test_additive_identity_and_cancellation():
    a = Scalar.var("alpha")
    assert a + Scalar.zero() == a
    assert s_is_zero(Scalar.inv_sqrt2() - Scalar.inv_sqrt2())
    assert not s_is_zero(a)


def test_mixed_radical_sum():
    half = Scalar.rational(1, 2)
    rad = Scalar.inv_sqrt2() * Scalar.inv_sqrt2() * Scalar.sqrt2()  # 1/2 * sqrt2
    assert (half + rad) + (half - rad) == Scalar.one()


def test_ring_axioms_random():
    rng = random.Random(1)
    for _ in range(60):
        x = rand_scalar(rng, closed=False)
        y = rand_scalar(rng, closed=False)
        z = rand_scalar(rng, closed=False)
        assert s_add(x, y) == s_add(y, x)
        assert s_mul(x, y) == s_mul(y, x)
        assert s_add(s_add(x, y), z) == s_add(x, s_add(y, z))
        assert s_mul(s_mul(x, y), z) == s_mul(x, s_mul(y, z))
        assert s_mul(x, s_add(y, z)) == s_add(s_mul(x, y), s_mul(x, z))


def test_eval_is_ring_homomorphism():
    rng = random.Random(2)
    for _ in range(60):
        x = rand_scalar(rng, closed=False)
        y = rand_scalar(rng, closed=False)
        for env in _envs(_names(x, y), count=3):
            lhs = s_eval(s_mul(x, y), env)
            rhs = s_eval(x, env) * s_eval(y, env)
            assert abs(lhs - rhs) <= TOL
            lhs = s_eval(s_add(x, y), env)
            rhs = s_eval(x, env) + s_eval(y, env)
            assert abs(lhs - rhs) <= TOL


def test_is_zero_matches_evaluation():
    rng = random.Random(3)
    for _ in range(60):
        x = rand_scalar(rng, closed=False)
        if rng.random() < 0.3:
            x = x - x
        vanishes = all(
            abs(s_eval(x, env)) <= TOL for env in _envs(_names(x), count=5)
        )
        assert s_is_zero(x) == vanishes


def test_conjugation_involution_and_distribution():
    rng = random.Random(4)
    for _ in range(60):
        x = rand_scalar(rng, closed=False)
        y = rand_scalar(rng, closed=False)
        assert x.conj().conj() == x
        assert (x + y).conj() == x.conj() + y.conj()
        assert (x * y).conj() == x.conj() * y.conj()


def test_conjugation_examples():
    assert Scalar.i().conj() == -Scalar.i()
    assert Scalar.var("a").conj() == Scalar.conj_var("a")
    assert Scalar.phase("u").conj() == Scalar.phase("u", -1)


def test_phase_cancellation_is_formal():
    assert Scalar.phase("u") * Scalar.phase("u", -1) == Scalar.one()
    assert Scalar.phase("u") * Scalar.phase("v", -1) != Scalar.one()
    assert Scalar.phase("u", 2) == Scalar.phase("u") * Scalar.phase("u")


def test_evaluation_values():
    assert abs(s_eval(Scalar.inv_sqrt2()) - 0.7071067811865476) < 1e-12
    env = {"a": 0.6 + 0.8j}
    assert s_eval(Scalar.var("a"), env) == 0.6 + 0.8j
    assert s_eval(Scalar.conj_var("a"), env) == 0.6 - 0.8j
    with pytest.raises(UnboundAtom):
        s_eval(Scalar.var("missing"))


def test_norm_hypothesis_rewrite():
    a, b = Scalar.var("a"), Scalar.var("b")
    expr = a * Scalar.conj_var("a") + b * Scalar.conj_var("b")
    assert expr.apply_norm_hypothesis((("a", "b"),)) == Scalar.one()
    half = Scalar.rational(1, 2)
    assert (half * expr).apply_norm_hypothesis((("a", "b"),)) == half
    env = {"a": 0.6 + 0.0j, "b": 0.8j}
    assert abs(s_eval(expr, env) - 1.0) <= TOL


def test_reciprocal():
    q = Scalar.rational(1, 4)
    assert q.reciprocal() == Scalar.rational(4)
    assert Scalar.inv_sqrt2().reciprocal() == Scalar.sqrt2()
    assert Scalar.phase("u").reciprocal() == Scalar.phase("u", -1)
    with pytest.raises(NonInvertibleScalar):
        Scalar.var("a").reciprocal()
    with pytest.raises(NonInvertibleScalar):
        Scalar.zero().reciprocal()


def test_coefficient_canonical_lowest_terms():
    c = Coefficient(2, 0, 0, 0) * Coefficient("1/2", 0, 0, 0)
    assert c == Coefficient(1)
    assert str(Scalar.rational(2, 4)) == "1/2"


def test_rendering():
    assert str(Scalar.zero()) == "0"
    assert str(Scalar.inv_sqrt2()) == "1/2*sqrt2"
    assert str(Scalar.conj_var("a")) == "a^*"
    assert str(Scalar.phase("u", -2)) == "e(-2*u)"
    assert str(Scalar.rational(1, 2) - Scalar.inv_sqrt2() * Scalar.i()) \
        == "1/2 + -1/2*sqrt2*i"

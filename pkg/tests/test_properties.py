"""Randomized property suites (>= 1000 cases each, fixed seeds)."""

import random

import numpy as np

from modinv.gca import (
    Element,
    Signature,
    content,
    degree_basis,
    differential,
    exact_div,
    poly_gcd,
)
from modinv.groups import MatrixGroup, act
from modinv.steenrod import bockstein, power

N_CASES = 1000

SIG = Signature.bv(3, 3)
SL3 = MatrixGroup.special_linear(3, 3)
GL2 = MatrixGroup.general_linear(3, 2)
SIG2 = Signature.standard(3, 2)


def random_homogeneous(sig, rng, d_max=8, allow_zero=False):
    for _ in range(10):
        d = rng.randrange(0, d_max + 1)
        basis = degree_basis(sig, d)
        if not basis:
            continue
        k = rng.randrange(0 if allow_zero else 1, min(4, len(basis)) + 1)
        terms = {m: rng.randrange(1, sig.p) for m in rng.sample(basis, k)}
        if terms or allow_zero:
            return Element(sig, terms)
    return sig.one()


def random_polynomial(sig, rng, w_max=4):
    exps_pool = [
        tuple(rng.randrange(0, w_max) for _ in range(sig.n_poly)) for _ in range(3)
    ]
    terms = {}
    for e in exps_pool[: rng.randrange(1, 4)]:
        terms[(e, ())] = rng.randrange(1, sig.p)
    return Element(sig, terms)


def test_graded_commutativity():
    rng = random.Random(101)
    for _ in range(N_CASES):
        a = random_homogeneous(SIG, rng)
        b = random_homogeneous(SIG, rng)
        sign = -1 if (a.degree() % 2) and (b.degree() % 2) else 1
        assert a * b == (b * a) * sign


def test_mul_associative():
    rng = random.Random(109)
    for _ in range(N_CASES):
        a = random_homogeneous(SIG, rng, d_max=6)
        b = random_homogeneous(SIG, rng, d_max=6)
        c = random_homogeneous(SIG, rng, d_max=6)
        assert (a * b) * c == a * (b * c)


def test_leibniz_and_d_squared():
    rng = random.Random(102)
    for _ in range(N_CASES):
        a = random_homogeneous(SIG, rng)
        b = random_homogeneous(SIG, rng)
        sign = -1 if a.degree() % 2 else 1
        assert differential(a * b) == differential(a) * b + a * differential(b) * sign
        assert differential(differential(a)).is_zero()


def test_cartan_formula():
    rng = random.Random(103)
    for _ in range(N_CASES):
        a = random_homogeneous(SIG, rng, d_max=6)
        b = random_homogeneous(SIG, rng, d_max=6)
        k = rng.randrange(0, 4)
        lhs = power(k, a * b)
        rhs = SIG.zero()
        for i in range(k + 1):
            rhs = rhs + power(i, a) * power(k - i, b)
        assert lhs == rhs


def test_bockstein_squared_and_leibniz():
    rng = random.Random(104)
    for _ in range(N_CASES):
        a = random_homogeneous(SIG, rng)
        b = random_homogeneous(SIG, rng)
        assert bockstein(bockstein(a)).is_zero()
        sign = -1 if a.degree() % 2 else 1
        assert bockstein(a * b) == bockstein(a) * b + a * bockstein(b) * sign


def test_action_equivariance_of_d_and_powers():
    rng = random.Random(105)
    rng_np = np.random.default_rng(105)
    closure = None
    for case in range(N_CASES):
        a = random_homogeneous(SIG, rng, d_max=6)
        g = SL3.generators[case % 2]
        assert act(g, differential(a)) == differential(act(g, a))
        k = rng.randrange(0, 3)
        assert act(g, power(k, a)) == power(k, act(g, a))
        assert act(g, bockstein(a)) == bockstein(act(g, a))


def test_action_composition():
    rng = random.Random(106)
    elems = GL2.closure()
    for _ in range(N_CASES):
        a = random_homogeneous(SIG2, rng, d_max=6)
        g = elems[rng.randrange(len(elems))]
        h = elems[rng.randrange(len(elems))]
        gh = np.array(g, dtype=np.int64) @ np.array(h, dtype=np.int64) % 3
        assert act(g, act(h, a)) == act(gh, a)


def test_gcd_exact_div_round_trips():
    rng = random.Random(107)
    for _ in range(N_CASES):
        q = random_polynomial(SIG2, rng, w_max=3)
        b = random_homogeneous(SIG2, rng, d_max=6)
        assert exact_div(q * b, q) == b
        # gcd divides both inputs exactly
        f = random_polynomial(SIG2, rng, w_max=3)
        g = poly_gcd(q, f)
        exact_div(q, g)
        exact_div(f, g)


def test_content_multiplicativity_monic():
    rng = random.Random(108)
    for _ in range(N_CASES):
        q = random_polynomial(SIG2, rng, w_max=3)
        a = random_homogeneous(SIG2, rng, d_max=5)
        if (q * a).is_zero():
            continue
        lhs = content(q * a)
        rhs = (q.monic() * content(a)).monic()
        assert lhs == rhs

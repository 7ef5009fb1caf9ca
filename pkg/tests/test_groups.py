import numpy as np
import pytest

from modinv.gca import Signature
from modinv.groups import (
    ClosureCapError,
    LinearCharacter,
    MatrixGroup,
    NotSemiInvariantError,
    act,
    action_matrix,
    character_of,
    invariant_dimension,
    invariant_space,
    is_invariant,
    minimal_relative_invariant,
    relative_invariant_space,
)
from modinv.forge import dickson_generators

SIG2 = Signature.standard(3, 2)
SIG3 = Signature.bv(3, 3)
GL2 = MatrixGroup.general_linear(3, 2)
SL3 = MatrixGroup.special_linear(3, 3)
L2 = SIG2.parse("x1*x2^3 - x2*x1^3")


def test_closure_orders():
    # no generators: closure is the identity alone
    empty = MatrixGroup(3, [], n=2)
    assert empty.order() == 1
    triv = MatrixGroup.trivial(3, 2)
    assert triv.order() == 1
    # cross-check the classical order formulas
    assert GL2.order() == (9 - 1) * (9 - 3)
    assert SL3.order() == (27 - 1) * (27 - 3) * (27 - 9) // 2


def test_closure_cap():
    fresh = MatrixGroup.special_linear(3, 3)
    with pytest.raises(ClosureCapError):
        fresh.closure(cap=100)


def test_generators_invertible():
    with pytest.raises(ValueError):
        MatrixGroup(3, [[[1, 2], [2, 4]]])


def test_from_json():
    g = MatrixGroup.from_json({"p": 3, "generators": [[[2, 0], [0, 1]]]})
    assert g.order() == 2


def test_closure_closed_under_product_and_inverse():
    import modinv.linalg as linalg

    elems = set(GL2.closure())
    listed = list(elems)
    rng = np.random.default_rng(8)
    for _ in range(100):
        a = listed[rng.integers(len(listed))]
        b = listed[rng.integers(len(listed))]
        prod = tuple(tuple(int(v) for v in row) for row in np.array(a) @ np.array(b) % 3)
        assert prod in elems
        inv = tuple(tuple(int(v) for v in row) for row in linalg.mat_inv(np.array(a), 3))
        assert inv in elems


def test_act_identity_and_diagonal():
    a = SIG2.parse("x1*dx2 + 2*x2^2*dx1")
    assert act(np.eye(2, dtype=np.int64), a) == a
    g = [[2, 0], [0, 1]]  # diag(-1, 1)
    assert act(g, SIG2.parse("x1*dx2")) == -SIG2.parse("x1*dx2")


def test_act_is_left_action():
    rng = np.random.default_rng(5)
    elems = GL2.closure()
    a = SIG2.parse("x1^2*dx1 + x2*dx1dx2 + 2*x1*x2")
    for _ in range(25):
        g = elems[rng.integers(len(elems))]
        h = elems[rng.integers(len(elems))]
        gh = np.array(g) @ np.array(h) % 3
        assert act(g, act(h, a)) == act(gh, a)


def test_act_v1v2v3_sl3_invariant():
    vvv = SIG3.parse("v1v2v3")
    for g in SL3.generators:
        assert act(g, vvv) == vvv


def test_is_invariant_examples():
    assert is_invariant(SIG2.one(), GL2)
    L3 = dickson_generators(SIG3, 3)[0]
    assert is_invariant(L3, SL3)
    assert not is_invariant(SIG2.var("x1"), GL2)


def test_relative_invariant_space_examples():
    assert [str(e) for e in relative_invariant_space(GL2, SIG2, LinearCharacter.trivial(GL2), 0)] == ["1"]
    space = relative_invariant_space(GL2, SIG2, LinearCharacter.det(GL2), 8)
    assert len(space) == 1
    assert space[0].monic() == L2.monic()
    for d in (0, 2, 4, 6):
        assert relative_invariant_space(GL2, SIG2, LinearCharacter.det_inverse(GL2), d) == []


def test_minimal_relative_invariant_examples():
    assert minimal_relative_invariant(GL2, SIG2, LinearCharacter.trivial(GL2)) == SIG2.one()
    assert minimal_relative_invariant(GL2, SIG2, LinearCharacter.det_inverse(GL2)) == L2.monic()
    assert minimal_relative_invariant(SL3, SIG3, LinearCharacter.det_inverse(SL3)) == SIG3.one()


def test_character_of_examples():
    assert character_of(SIG2.one(), GL2) == LinearCharacter.trivial(GL2)
    assert character_of(L2, GL2) == LinearCharacter.det(GL2)
    with pytest.raises(NotSemiInvariantError):
        character_of(SIG2.var("x1"), GL2)
    with pytest.raises(NotSemiInvariantError):
        character_of(SIG2.zero(), GL2)


def test_character_multiplicative_on_closure():
    det = LinearCharacter.det(GL2)
    values = det.extend_to_closure()
    assert len(values) == 48
    import modinv.linalg as linalg

    for m, v in values.items():
        assert v == linalg.det(np.array(m), 3)


def test_invariant_space_examples():
    assert [str(e) for e in invariant_space(GL2, SIG2, 0)] == ["1"]
    inv3 = invariant_space(SL3, SIG3, 3, full_k=True)
    assert [str(e) for e in inv3] == ["v1v2v3"]
    space16 = invariant_space(GL2, SIG2, 16)
    assert len(space16) == 1
    assert space16[0].monic() == (L2**2).monic()


def test_rank_one_freeness_restated_degreewise():
    """dim of chi-relative invariants at d equals dim of invariants at d - deg f_chi."""
    for chi in (LinearCharacter.det(GL2), LinearCharacter.det_inverse(GL2)):
        f = minimal_relative_invariant(GL2, SIG2, chi)
        df = f.degree()
        for d in range(0, 25, 2):
            rel = len(relative_invariant_space(GL2, SIG2, chi, d))
            inv = invariant_dimension(GL2, SIG2, d - df) if d >= df else 0
            assert rel == inv, (chi.values, d)


def test_action_matrix_matches_substitution():
    import random

    from modinv.gca import Element, degree_basis

    rng = random.Random(2)
    for d in (2, 5, 8):
        basis = degree_basis(SIG3, d)
        for g in SL3.generators:
            mat = action_matrix(SIG3, g, d, full_k=True)
            for _ in range(4):
                i = rng.randrange(len(basis))
                img = act(g, Element(SIG3, {basis[i]: 1}))
                col = {m: int(mat[j, i]) for j, m in enumerate(basis) if mat[j, i]}
                assert img.terms == col

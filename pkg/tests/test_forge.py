import pytest

from modinv.gca import Signature, differential, exact_div
from modinv.groups import MatrixGroup
from modinv.forge import (
    InvariantSystem,
    InvariantTheoryError,
    construct_M_family,
    dickson_generators,
    jacobian_criterion,
    verify_free_module,
)
from modinv.series import free_module_series

SIG2 = Signature.standard(3, 2)
SIG3 = Signature.bv(3, 3)
GL2 = MatrixGroup.general_linear(3, 2)
SL3 = MatrixGroup.special_linear(3, 3)


@pytest.fixture(scope="module")
def example1():
    L2, Q21 = dickson_generators(SIG2, 2)
    system = InvariantSystem(SIG2, GL2, [L2**2, Q21])
    return L2, Q21, system


@pytest.fixture(scope="module")
def example2():
    L3, Q32, Q31 = dickson_generators(SIG3, 3)
    system = InvariantSystem(SIG3, SL3, [L3, Q32, Q31])
    return L3, Q32, Q31, system


def test_dickson_k2(example1):
    L2, Q21, _ = example1
    x1, x2 = SIG2.var("x1"), SIG2.var("x2")
    assert L2 == x1 * x2**3 - x2 * x1**3
    assert L2.degree() == 8 and Q21.degree() == 12
    # Q21 is the exact quotient of the (1, p^2) Moore determinant
    assert Q21 == exact_div(x1 * x2**9 - x2 * x1**9, L2)


def test_dickson_k3_degrees():
    L3, Q32, Q31 = dickson_generators(SIG3, 3)
    assert (L3.degree(), Q32.degree(), Q31.degree()) == (26, 36, 48)


def test_dickson_bad_k():
    with pytest.raises(ValueError):
        dickson_generators(SIG2, 4)


def test_invariant_system_validates():
    x1, x2 = SIG2.var("x1"), SIG2.var("x2")
    with pytest.raises(InvariantTheoryError):
        InvariantSystem(SIG2, GL2, [x1, x2])  # not invariant
    with pytest.raises(InvariantTheoryError):
        InvariantSystem(SIG2, GL2, [x1])  # wrong count


def test_jacobian_identity_system():
    triv = MatrixGroup.trivial(3, 2)
    x1, x2 = SIG2.var("x1"), SIG2.var("x2")
    system = InvariantSystem(SIG2, triv, [x1, x2])
    assert system.jacobian == SIG2.one()
    verdict = jacobian_criterion(system)
    assert verdict.holds and verdict.iota == SIG2.one()


def test_jacobian_example1(example1):
    L2, _, system = example1
    assert system.jacobian == -(L2**3)
    # J dx1 dx2 equals the product of the d rho_i
    top = SIG2.var("dx1") * SIG2.var("dx2")
    prod = system.d_rho[0] * system.d_rho[1]
    assert prod == system.jacobian * top


def test_jacobian_reflection_group():
    refl = MatrixGroup(3, [[[2, 0], [0, 1]]], name="reflection")
    x1, x2 = SIG2.var("x1"), SIG2.var("x2")
    system = InvariantSystem(SIG2, refl, [x1**2, x2])
    assert system.jacobian == 2 * x1
    verdict = jacobian_criterion(system)
    assert verdict.holds
    assert verdict.f_det_inv == x1


def test_criterion_example1(example1):
    L2, _, system = example1
    verdict = jacobian_criterion(system)
    assert not verdict.holds
    assert verdict.iota == (L2**2).monic()
    top = SIG2.var("dx1") * SIG2.var("dx2")
    assert verdict.witness == L2.monic() * top


def test_m_family_example1(example1):
    L2, Q21, system = example1
    fam = construct_M_family(system)
    M1, M2, M12 = fam[(0,)], fam[(1,)], fam[(0, 1)]
    assert M1.M == differential(L2**2) and M1.B == SIG2.one()
    assert M2.M == differential(Q21) and M2.B == SIG2.one()
    assert M1.M * M2.M == L2**2 * M12.M
    top = SIG2.var("dx1") * SIG2.var("dx2")
    assert M12.M == -(L2 * top)
    assert M12.B == (L2**2).monic()


def test_m_family_example2(example2):
    L3, Q32, Q31, system = example2
    fam = construct_M_family(system)
    # M_2 = (1/L3) dQ32 with B_2 = L3 (up to monic normalization)
    assert fam[(1,)].B == L3.monic()
    assert fam[(1,)].M.monic() == exact_div(differential(Q32), L3).monic()
    assert fam[(2,)].B == L3.monic()
    # M_{1,2,3} = -(1/L3^4) dL3 dQ32 dQ31 equals v1v2v3 up to monic normalization
    assert fam[(0, 1, 2)].B == (L3**4).monic()
    assert fam[(0, 1, 2)].M.monic() == SIG3.parse("v1v2v3")
    degrees = sorted(e.M.degree() for e in fam.values())
    assert degrees == [3, 4, 8, 9, 20, 21, 25]


def test_f_det_inv_divides_jacobian(example1, example2):
    for system in (example1[2], example2[3]):
        verdict = jacobian_criterion(system)
        quotient = exact_div(system.jacobian.monic(), verdict.f_det_inv)
        assert quotient  # exact division succeeded


def test_free_module_trivial_group():
    triv = MatrixGroup.trivial(3, 2)
    x1, x2 = SIG2.var("x1"), SIG2.var("x2")
    system = InvariantSystem(SIG2, triv, [x1, x2])
    fam = construct_M_family(system)
    report = verify_free_module(system, fam, 10)
    assert report.passed


def test_solomon_nonmodular_case():
    """p does not divide |G|: K(V*)^G = P[rho] (x) E[d rho] degreewise."""
    refl = MatrixGroup(3, [[[2, 0], [0, 1]]], name="reflection")
    x1, x2 = SIG2.var("x1"), SIG2.var("x2")
    system = InvariantSystem(SIG2, refl, [x1**2, x2])
    verdict = jacobian_criterion(system)
    assert verdict.holds
    fam = construct_M_family(system)
    report = verify_free_module(system, fam, 16)
    assert report.passed
    # the free-module series with exterior degrees {3, 1} over P[4, 2]
    expected = free_module_series([0, 3, 1, 4], [4, 2], 16)
    assert report.details["expected"] == expected

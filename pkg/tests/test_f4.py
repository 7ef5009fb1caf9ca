import pytest

from modinv import linalg
from modinv.gca import to_coords
from modinv.f4 import F4Suite, toda_steenrod_table
from modinv.groups import is_invariant
from modinv.steenrod import bockstein, power
from modinv.steenrod_audit import TableAction


@pytest.fixture(scope="module")
def suite():
    return F4Suite(d_max=60)


def test_torus_r15_vanishes(suite):
    t = suite.torus
    assert t.r15.is_zero()
    assert t.sign_convention == 1
    assert (t.p1.degree(), t.pbar2.degree(), t.pbar5.degree()) == (4, 8, 20)
    assert (t.pbar9.degree(), t.pbar12.degree()) == (36, 48)


def test_v3_model_invariance(suite):
    v3 = suite.v3
    for name, elem in v3.elements.items():
        assert is_invariant(elem, v3.group), name


def test_v2_model(suite):
    v2 = suite.v2
    assert v2.Q21.degree() == 12 and v2.Q22.degree() == 16
    assert is_invariant(v2.Q21, v2.group)
    assert is_invariant(v2.Q22, v2.group)


def test_res_t_golden_images(suite):
    t = suite.torus
    res = suite.res_t
    g = suite.toda.sig.gens()
    assert res.evaluate(g["x20"]) == t.p4 * t.p1 + t.p3 * t.pbar2
    assert res.evaluate(g["x9"]).is_zero()
    rel = (
        g["x20"] ** 3
        - g["x48"] * g["x4"] ** 3
        - g["x36"] * g["x8"] ** 3
        + g["x20"] ** 2 * g["x8"] ** 2 * g["x4"]
    )
    assert res.evaluate(rel).is_zero()


def test_phi_hat_golden_images(suite):
    phi = suite.phi_hat
    v3 = suite.v3
    g = suite.toda.sig.gens()
    assert phi.evaluate(g["x4"]) == v3.sig.parse("u1*v2v3 + 2*u2*v1v3 + u3*v1v2")
    assert phi.evaluate(g["x9"] * g["x4"]).is_zero()
    assert phi.evaluate(g["x26"] ** 3) == v3.L3**3
    assert phi.evaluate(g["x36"]) == v3.Q32


def test_steenrod_compat_examples(suite):
    phi = suite.phi_hat
    v3 = suite.v3
    g = suite.toda.sig.gens()
    # (x8, beta): phi(x9) = m9 equals beta(m8)
    assert phi.evaluate(g["x9"]) == bockstein(v3.m8)
    # (x4, P1): phi(-x8 + x4^2) equals P1(m4)
    assert phi.evaluate(-g["x8"] + g["x4"] ** 2) == power(1, v3.m4)
    # (x36, P3) on the torus side
    res = suite.res_t
    cell = g["x48"] - g["x36"] * (g["x8"] + g["x4"] ** 2) * g["x4"] + g["x20"] ** 2 * (
        g["x8"] + g["x4"] ** 2
    )
    assert res.evaluate(cell) == power(3, suite.torus.pbar9)


def test_table_rejects_degree_incorrect_cell(suite):
    # the printed P^3 entry for x20 has degree 28, the cell needs 32
    assert ("x20", 3) in suite.table.rejected
    action = TableAction(suite.toda, suite.table, suite.steenrod_resolver())
    value = action.cell("x20", 3)
    g = suite.toda.sig.gens()
    expected = suite.toda.normal_form(g["x20"] * (-g["x8"] + g["x4"] ** 2) * g["x4"])
    assert value == expected


def test_blank_cells_resolved_to_zero(suite):
    action = TableAction(suite.toda, suite.table, suite.steenrod_resolver())
    for gen, op in (("x20", 1), ("x25", 1), ("x26", 1)):
        assert action.cell(gen, op).is_zero()
    assert action.cell("x9", 3) == suite.toda.normal_form(suite.toda.sig.var("x21"))


def test_kernel_degreewise_examples(suite):
    # degree 8: ker phi_hat is spanned by x4^2
    kernel8 = suite.kernel_degreewise("phi", 8)
    g = suite.toda.sig.gens()
    assert len(kernel8) == 1
    assert kernel8[0].monic() == suite.toda.normal_form(g["x4"] ** 2)
    # degree 9: phi_hat(x9) = m9 is nonzero, kernel trivial
    assert suite.kernel_degreewise("phi", 9) == []
    # degree 4: kernel trivial
    assert suite.kernel_degreewise("phi", 4) == []
    # any hom at degree 0 has zero kernel
    assert suite.kernel_degreewise("joint", 0) == []


def test_sigma_hat_values(suite):
    v3, v2 = suite.v3, suite.v2
    assert suite.sigma_hat_on_coords(36, to_coords(v3.Q32, 36)) == v2.Q21**3
    assert suite.sigma_hat_on_coords(48, to_coords(v3.Q31, 48)) == v2.Q22**3
    for name in ("m3", "m4", "m8", "m9", "m20", "m21", "m25", "L3"):
        e = v3.elements[name]
        assert suite.sigma_hat_on_coords(e.degree(), to_coords(e, e.degree())).is_zero()


def test_check_torus(suite):
    assert suite.check_torus().passed


def test_check_maps(suite):
    rep = suite.check_maps()
    assert rep.passed
    assert rep.details["resolved_cells"]["x20.P1"]["value"] == "0"


def test_check_toda_consistency(suite):
    assert suite.check_toda().passed


def test_check_kernel(suite):
    assert suite.check_kernel().passed


def test_check_main(suite):
    assert suite.check_main().passed


def test_check_coker(suite):
    rep = suite.check_coker()
    assert rep.passed
    # spot values: degree 3 (m3), degree 39 (m3 Q32), degree 5 (nothing)
    series = suite.invariant_series
    for d, expected in ((3, 1), (39, 1), (5, 0)):
        image = linalg.rank(suite.eval_matrix("phi", d), 3)
        assert series[d] - image == expected


def test_check_pullback_defect_signature(suite):
    """The radical-quotient square passes; the closing display as printed
    fails exactly in the degrees of {m4, m8, m20} * P[Q32, Q31], and the
    corrected corner Im(phi)/phi(ker res_T) repairs it."""
    rep = suite.check_pullback()
    assert not rep.passed
    predicted = sorted(
        deg + 36 * b + 48 * c
        for deg in (4, 8, 20)
        for b in range(2)
        for c in range(2)
        if deg + 36 * b + 48 * c <= 60
    )
    assert rep.details["defect_degrees"] == sorted(set(predicted))
    assert all("full fiber product" in f.witness for f in rep.failures)
    assert rep.details["corrected_corner"]["status"] == "pass"
    assert rep.details["gl2_invariants_degree_3"] == 0


def test_pullback_dimension_examples(suite):
    # d = 26: radical-quotient square has left dim 1 = fiber dim 1
    assert suite.radical_quotient.graded_dimension(26) == 1
    # d = 3: Toda algebra is zero, coker starts with m3
    assert suite.toda.graded_dimension(3) == 0
    assert suite.invariant_series[3] == 1


def test_jobs_parallel_matches_serial():
    serial = F4Suite(d_max=20, jobs=1).check_main()
    parallel = F4Suite(d_max=20, jobs=4).check_main()
    assert serial.passed and parallel.passed


def test_consistency_audit_catches_mutations(suite):
    """The audit must reject corrupted tables (guards against a vacuous check)."""
    from modinv.steenrod_audit import SteenrodTable, steenrod_consistency

    alg = suite.toda
    g = alg.sig.gens()
    resolver = suite.steenrod_resolver()
    from modinv.steenrod_audit import BETA

    mutations = {
        ("x4", 1): g["x4"] ** 2,  # drop the -x8 term
        ("x9", 3): -g["x21"],  # sign flip
        ("x21", 1): g["x25"] * 2,  # wrong scalar
        ("x8", BETA): -g["x9"],  # Bockstein sign flip
    }
    for cell, bad_value in mutations.items():
        entries = dict(toda_steenrod_table(alg).entries)
        entries[cell] = bad_value
        rep = steenrod_consistency(alg, SteenrodTable(alg, entries), resolver)
        assert not rep.passed, f"mutation at {cell} was not detected"
        assert any(str(cell[0]) in f.witness for f in rep.failures)


def test_hom_verification_catches_mutations(suite):
    from modinv.presented import AlgebraHom, HomomorphismError

    v3 = suite.v3
    images = dict(suite.phi_hat.images)
    images["x21"] = -v3.m21
    with pytest.raises(HomomorphismError):
        AlgebraHom(suite.toda, images, name="phi_flip")

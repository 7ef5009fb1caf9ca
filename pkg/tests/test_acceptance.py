"""Acceptance gate: every criterion at its stated runtime, exact arithmetic.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion.  Criterion 10 deserves a note: its "closing display" pullback
identity is reproduced exactly as printed and fails in seven degrees;
the failure signature is pinned here and explained in the README (the
corner of the printed square forgets that res_T is nonzero on x4, x8,
x20; the corrected corner passes in every degree).
"""

import time

from modinv.gca import Signature, differential
from modinv.groups import MatrixGroup
from modinv.forge import (
    InvariantSystem,
    construct_M_family,
    dickson_generators,
    jacobian_criterion,
)
from modinv.f4 import F4Suite
from modinv.steenrod import bockstein, power

SUITE = F4Suite(d_max=60)


def _line(num, label, elapsed, passed, note=""):
    status = "PASS" if passed else "FAIL"
    print(f"\ncriterion {num:>3} ({label}): {status} [{elapsed:.2f}s]{note}")


def test_criterion_01_example1_goldens():
    t0 = time.perf_counter()
    sig = Signature.standard(3, 2)
    x1, x2, dx1, dx2 = (sig.var(n) for n in ("x1", "x2", "dx1", "dx2"))
    L2, Q21 = dickson_generators(sig, 2)
    ok = L2 == x1 * x2**3 - x2 * x1**3
    # dL2^(p-1) = -L2^(p-2)(x2^p dx1 - x1^p dx2) and dQ21 = -L2^(p-2)(x2 dx1 - x1 dx2)
    ok &= differential(L2**2).monic() == (L2 * (x2**3 * dx1 - x1**3 * dx2)).monic()
    ok &= differential(Q21).monic() == (L2 * (x2 * dx1 - x1 * dx2)).monic()
    system = InvariantSystem(sig, MatrixGroup.general_linear(3, 2), [L2**2, Q21])
    fam = construct_M_family(system)
    ok &= fam[(0,)].M * fam[(1,)].M == L2**2 * fam[(0, 1)].M  # M1 M2 = L2^(p-1) M12 exactly
    elapsed = time.perf_counter() - t0
    _line(1, "Dickson/Example-1 goldens", elapsed, ok)
    assert ok
    assert elapsed < 1.0


def test_criterion_02_jacobian_criterion():
    t0 = time.perf_counter()
    sig = Signature.standard(3, 2)
    L2, Q21 = dickson_generators(sig, 2)
    gl2 = MatrixGroup.general_linear(3, 2)
    v1 = jacobian_criterion(InvariantSystem(sig, gl2, [L2**2, Q21]))
    top = sig.var("dx1") * sig.var("dx2")
    ok = (not v1.holds) and v1.iota == (L2**2).monic() and v1.witness == L2.monic() * top
    refl = MatrixGroup(3, [[[2, 0], [0, 1]]], name="reflection")
    v2 = jacobian_criterion(InvariantSystem(sig, refl, [sig.var("x1") ** 2, sig.var("x2")]))
    ok &= v2.holds
    elapsed = time.perf_counter() - t0
    _line(2, "Jacobian criterion", elapsed, ok)
    assert ok
    assert elapsed < 1.0


def test_criterion_03_example2_steenrod_table():
    t0 = time.perf_counter()
    sig = Signature.bv(3, 3)
    L3, Q32, Q31 = dickson_generators(sig, 3)
    entries = [
        (power(1, L3), sig.zero()),
        (power(3, L3), sig.zero()),
        (power(9, L3), Q32 * L3),
        (power(1, Q32), sig.zero()),
        (power(3, Q32), Q31),
        (power(9, Q32), -(Q32**2)),
        (power(1, Q31), L3**2),
        (power(3, Q31), sig.zero()),
        (power(9, Q31), -(Q32 * Q31)),
    ]
    ok = all(got == want for got, want in entries)
    m3 = sig.parse("v1v2v3")
    m4 = bockstein(m3)
    m8 = -power(1, m4)
    m9 = bockstein(m8)
    m20 = power(3, m8)
    m21 = power(3, m9)
    m25 = power(1, m21)
    ok &= [e.degree() for e in (m4, m8, m9, m20, m21, m25)] == [4, 8, 9, 20, 21, 25]
    ok &= bockstein(m25) == L3
    elapsed = time.perf_counter() - t0
    _line(3, "Example-2 Steenrod table + M-chain", elapsed, ok)
    assert ok
    assert elapsed < 10.0


def test_criterion_04_mui_free_module():
    t0 = time.perf_counter()
    report = SUITE.check_mui()
    elapsed = time.perf_counter() - t0
    _line(4, "Mui freeness GL2<=40, SL3<=60", elapsed, report.passed)
    assert report.passed, report.summary()
    assert elapsed < 600.0


def test_criterion_05_torus_model():
    t0 = time.perf_counter()
    report = SUITE.check_torus()
    elapsed = time.perf_counter() - t0
    _line(5, "torus r15 + Hilbert to 60", elapsed, report.passed)
    assert report.passed, report.summary()
    assert elapsed < 300.0


def test_criterion_06_toda_consistency():
    t0 = time.perf_counter()
    report = SUITE.check_toda()
    elapsed = time.perf_counter() - t0
    _line(6, "Toda table consistency", elapsed, report.passed)
    assert report.passed, report.summary()
    assert elapsed < 300.0


def test_criterion_07_maps_and_compat():
    t0 = time.perf_counter()
    report = SUITE.check_maps()
    elapsed = time.perf_counter() - t0
    _line(7, "res_T/phi_hat + Steenrod compat", elapsed, report.passed)
    assert report.passed, report.summary()
    assert elapsed < 300.0


def test_criterion_08_kernel_ideal():
    t0 = time.perf_counter()
    report = SUITE.check_kernel()
    elapsed = time.perf_counter() - t0
    _line(8, "ker phi_hat = (x4^2, ..., x8*x4)", elapsed, report.passed)
    assert report.passed, report.summary()
    assert elapsed < 600.0


def test_criterion_09_main_theorem():
    t0 = time.perf_counter()
    report = SUITE.check_main()
    elapsed = time.perf_counter() - t0
    _line(9, "joint kernel of (res_T, phi_hat) = 0", elapsed, report.passed)
    assert report.passed, report.summary()
    assert elapsed < 900.0


def test_criterion_10_pullback_and_coker():
    t0 = time.perf_counter()
    coker = SUITE.check_coker()
    pullback = SUITE.check_pullback()
    elapsed = time.perf_counter() - t0
    radical_ok = not any(
        "radical" in f.witness or "commute" in f.witness for f in pullback.failures
    )
    _line("10a", "radical-quotient pullback formula", elapsed, radical_ok)
    _line("10b", "coker phi_hat = m3 P[Q32, Q31]", elapsed, coker.passed)
    # The closing display as printed: reproduce and pin its failure exactly.
    literal_ok = pullback.passed
    predicted_defect = sorted(
        {
            g + 36 * b + 48 * c
            for g in (4, 8, 20)
            for b in range(2)
            for c in range(2)
            if g + 36 * b + 48 * c <= 60
        }
    )
    _line(
        "10c",
        "closing-display pullback as printed",
        elapsed,
        literal_ok,
        note=(
            ""
            if literal_ok
            else f" (known defect at degrees {predicted_defect}; "
            "corrected corner Im(phi_hat)/phi_hat(ker res_T) passes; see README)"
        ),
    )
    assert radical_ok
    assert coker.passed, coker.summary()
    assert not literal_ok, "the closing display unexpectedly became true; revisit the analysis"
    assert pullback.details["defect_degrees"] == predicted_defect
    assert pullback.details["corrected_corner"]["status"] == "pass"
    assert elapsed < 600.0

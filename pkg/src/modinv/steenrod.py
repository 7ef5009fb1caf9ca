"""Unstable Steenrod operations on K(V*) in the H*(BV;F_p) convention.

The total reduced power sends a degree-2 polynomial generator u to
u + u^p t and fixes degree-1 exterior generators; P^k takes the t^k
coefficient and the Cartan formula holds by construction.  The
Bockstein is the signed derivation with beta(v_i) = u_i, beta(u_i) = 0.
Signatures must be of BV type: all polynomial degrees 2, all exterior
degrees 1, with the exterior generators paired to the polynomial ones
by index (or absent entirely, as for a torus, where beta = 0).
"""

from __future__ import annotations

from math import comb

from .gca import Element, Signature
from .report import Report

__all__ = ["bockstein", "power", "total_power_coefficients", "verify_instability"]


def _check_bv(sig: Signature):
    if any(d != 2 for d in sig.poly_degrees) or any(d != 1 for d in sig.ext_degrees):
        raise ValueError("Steenrod operations require |u|=2, |v|=1 generators")
    if sig.n_ext not in (0, sig.n_poly):
        raise ValueError("exterior generators must pair with polynomial ones")


def bockstein(a: Element) -> Element:
    """beta: v_i -> u_i, u_i -> 0, extended as a signed derivation (degree +1)."""
    sig = a.sig
    _check_bv(sig)
    if not a.is_homogeneous():
        raise ValueError("bockstein requires a homogeneous element")
    p = sig.p
    out: dict = {}
    for (exps, ext), c in a.terms.items():
        for pos, j in enumerate(ext):
            sign = -1 if pos % 2 else 1
            new_exps = exps[:j] + (exps[j] + 1,) + exps[j + 1 :]
            new_ext = ext[:pos] + ext[pos + 1 :]
            key = (new_exps, new_ext)
            v = (out.get(key, 0) + sign * c) % p
            if v:
                out[key] = v
            elif key in out:
                del out[key]
    return Element(sig, out)


def power(k: int, a: Element) -> Element:
    """P^k(a): t^k coefficient of the multiplicative total power."""
    if k < 0:
        raise ValueError("k must be non-negative")
    sig = a.sig
    _check_bv(sig)
    if not a.is_homogeneous():
        raise ValueError("reduced powers require a homogeneous element")
    if k == 0:
        return a
    p = sig.p
    out: dict = {}
    for (exps, ext), c in a.terms.items():
        for splits, coeff in _power_splits(exps, k, p):
            new_exps = tuple(e + (p - 1) * s for e, s in zip(exps, splits))
            key = (new_exps, ext)
            v = (out.get(key, 0) + coeff * c) % p
            if v:
                out[key] = v
            elif key in out:
                del out[key]
    return Element(sig, out)


def _power_splits(exps: tuple, k: int, p: int):
    """Distributions of weight k over the factors: prod_i C(e_i, k_i) u_i^{e_i+(p-1)k_i}."""
    n = len(exps)
    results = []

    def rec(i, rem, prefix, coeff):
        if coeff % p == 0:
            return
        if i == n:
            if rem == 0:
                results.append((tuple(prefix), coeff % p))
            return
        top = min(exps[i], rem)
        for s in range(top + 1):
            rec(i + 1, rem - s, prefix + [s], coeff * comb(exps[i], s))

    rec(0, k, [], 1)
    return results


def total_power_coefficients(a: Element, k_max: int) -> list:
    """[P^0(a), P^1(a), ..., P^{k_max}(a)]."""
    return [power(k, a) for k in range(k_max + 1)]


def verify_instability(a: Element, k_max: int) -> Report:
    """Sanity oracle: P^k(a)=0 for 2k > |a| and P^{|a|/2}(a) = a^p for even |a|."""
    d = a.degree()
    report = Report("instability", (0, k_max))
    if d is None:
        return report
    for k in range(k_max + 1):
        pk = power(k, a)
        if 2 * k > d and pk:
            report.add_failure(k, f"P^{k} nonzero on degree {d}: {pk}")
        if 2 * k == d and pk != a ** a.sig.p:
            report.add_failure(k, f"P^{k} != a^p on degree {d}")
    return report

"""Integer power-series helpers for Hilbert-function bookkeeping."""

from __future__ import annotations


def geometric_product(degrees, d_max: int) -> list:
    """Coefficients of prod_i 1/(1 - t^d_i) up to degree d_max."""
    coeffs = [0] * (d_max + 1)
    coeffs[0] = 1
    for d in degrees:
        if d <= 0:
            raise ValueError("degrees must be positive")
        for k in range(d, d_max + 1):
            coeffs[k] += coeffs[k - d]
    return coeffs


def series_mul(a, b, d_max: int) -> list:
    out = [0] * (d_max + 1)
    for i, ai in enumerate(a[: d_max + 1]):
        if ai:
            for j, bj in enumerate(b[: d_max + 1 - i]):
                out[i + j] += ai * bj
    return out


def shifted(a, shift: int, d_max: int) -> list:
    out = [0] * (d_max + 1)
    for i, ai in enumerate(a):
        if 0 <= i + shift <= d_max:
            out[i + shift] += ai
    return out


def series_sub(a, b) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


def free_module_series(generator_degrees, base_degrees, d_max: int) -> list:
    """Hilbert series of a free module: (sum_g t^deg g) * prod 1/(1-t^d)."""
    base = geometric_product(base_degrees, d_max)
    out = [0] * (d_max + 1)
    for g in generator_degrees:
        for k in range(g, d_max + 1):
            out[k] += base[k - g]
    return out


def quotient_by_regular_element(base_degrees, relation_degree: int, d_max: int) -> list:
    """Series of P[d_1..d_k]/(f) for a regular relation f: free * (1 - t^deg f)."""
    base = geometric_product(base_degrees, d_max)
    return series_sub(base, shifted(base, relation_degree, d_max))[: d_max + 1]

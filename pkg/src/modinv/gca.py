"""Graded-commutative algebra K(V*) = P[x1..xn] (x) E[dx1..dxn] over F_p.

Elements are sparse F_p-linear combinations of monomials (polynomial
exponent vector, sorted exterior index tuple).  Polynomial generators
have even positive degree, exterior generators odd positive degree, so
the Koszul sign of a product is governed by the exterior word lengths.

Monomial order (pinned for determinism of leading terms, monic
normalization and printing): total degree, then polynomial exponents
lexicographically descending, then exterior indices ascending.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .ffield import PrimeField, is_prime

Monomial = tuple  # (exps: tuple[int, ...], ext: tuple[int, ...])


class SignatureError(ValueError):
    pass


class ParseError(ValueError):
    pass


class ExactDivisionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Signature:
    """Variable names and degrees of P[poly] (x) E[ext] over F_p."""

    p: int
    poly_names: tuple
    poly_degrees: tuple
    ext_names: tuple = ()
    ext_degrees: tuple = ()

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise SignatureError(f"p must be an odd prime, got {self.p}")
        if len(self.poly_names) != len(self.poly_degrees):
            raise SignatureError("polynomial names/degrees length mismatch")
        if len(self.ext_names) != len(self.ext_degrees):
            raise SignatureError("exterior names/degrees length mismatch")
        names = self.poly_names + self.ext_names
        if len(set(names)) != len(names):
            raise SignatureError("variable names must be unique")
        for d in self.poly_degrees:
            if d <= 0 or d % 2:
                raise SignatureError("polynomial degrees must be even and positive")
        for d in self.ext_degrees:
            if d <= 0 or d % 2 == 0:
                raise SignatureError("exterior degrees must be odd and positive")

    @classmethod
    def standard(cls, p: int, n: int, prefix: str = "x") -> "Signature":
        """P[x1..xn] (x) E[dx1..dxn] with |x|=2, |dx|=1."""
        return cls(
            p,
            tuple(f"{prefix}{i + 1}" for i in range(n)),
            (2,) * n,
            tuple(f"d{prefix}{i + 1}" for i in range(n)),
            (1,) * n,
        )

    @classmethod
    def bv(cls, p: int, n: int) -> "Signature":
        """H*(BV;F_p) naming: P[u1..un] (x) E[v1..vn], u_i = beta(v_i)."""
        return cls(
            p,
            tuple(f"u{i + 1}" for i in range(n)),
            (2,) * n,
            tuple(f"v{i + 1}" for i in range(n)),
            (1,) * n,
        )

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.p)

    @property
    def n_poly(self) -> int:
        return len(self.poly_names)

    @property
    def n_ext(self) -> int:
        return len(self.ext_names)

    def monomial_degree(self, mono: Monomial) -> int:
        exps, ext = mono
        d = 0
        for e, w in zip(exps, self.poly_degrees):
            d += e * w
        for i in ext:
            d += self.ext_degrees[i]
        return d

    def one_monomial(self) -> Monomial:
        return ((0,) * self.n_poly, ())

    # -- element constructors ------------------------------------------

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return self.const(1)

    def const(self, c: int) -> "Element":
        c %= self.p
        return Element(self, {self.one_monomial(): c} if c else {})

    def var(self, name: str) -> "Element":
        if name in self.poly_names:
            i = self.poly_names.index(name)
            exps = tuple(1 if j == i else 0 for j in range(self.n_poly))
            return Element(self, {(exps, ()): 1})
        if name in self.ext_names:
            i = self.ext_names.index(name)
            return Element(self, {((0,) * self.n_poly, (i,)): 1})
        raise SignatureError(f"unknown variable {name!r}")

    def gens(self) -> dict:
        return {n: self.var(n) for n in self.poly_names + self.ext_names}

    def parse(self, text: str) -> "Element":
        return parse_element(self, text)


def _merge_ext(s: tuple, t: tuple):
    """Merge sorted disjoint index tuples; sign = (-1)^inversions.

    Returns (None, 0) when the tuples intersect (the product vanishes).
    """
    if not s:
        return t, 1
    if not t:
        return s, 1
    merged = []
    i = j = 0
    inv = 0
    ls = len(s)
    while i < ls and j < len(t):
        a, b = s[i], t[j]
        if a == b:
            return None, 0
        if a < b:
            merged.append(a)
            i += 1
        else:
            merged.append(b)
            j += 1
            inv += ls - i
    merged.extend(s[i:])
    merged.extend(t[j:])
    return tuple(merged), (1 if inv % 2 == 0 else -1)


def monomial_sort_key(mono: Monomial):
    """Sort key: exponents descending, exterior ascending (use reverse=True)."""
    exps, ext = mono
    return (exps, tuple(-i for i in ext))


class Element:
    """F_p-linear combination of monomials of a fixed signature."""

    __slots__ = ("sig", "terms")

    def __init__(self, sig: Signature, terms: dict):
        self.sig = sig
        self.terms = terms

    # -- basic structure -----------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_polynomial(self) -> bool:
        return all(not ext for (_, ext) in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {self.sig.monomial_degree(m) for m in self.terms}
        return len(degs) <= 1

    def degree(self):
        """Degree of a homogeneous element (None for 0)."""
        degs = {self.sig.monomial_degree(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"element is not homogeneous: {self}")
        return degs.pop()

    def coefficient(self, mono: Monomial) -> int:
        return self.terms.get(mono, 0)

    def copy(self) -> "Element":
        return Element(self.sig, dict(self.terms))

    # -- ring operations -----------------------------------------------

    def _check_sig(self, other: "Element"):
        if self.sig != other.sig:
            raise SignatureError("elements live in different algebras")

    def __add__(self, other):
        if isinstance(other, int):
            other = self.sig.const(other)
        self._check_sig(other)
        p = self.sig.p
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = (out.get(m, 0) + c) % p
            if v:
                out[m] = v
            elif m in out:
                del out[m]
        return Element(self.sig, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.sig.p
        return Element(self.sig, {m: (-c) % p for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.sig.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            c = other % self.sig.p
            if c == 0:
                return self.sig.zero()
            if c == 1:
                return self
            p = self.sig.p
            return Element(self.sig, {m: cm * c % p for m, cm in self.terms.items()})
        self._check_sig(other)
        p = self.sig.p
        out = {}
        for (e1, s1), c1 in self.terms.items():
            for (e2, s2), c2 in other.terms.items():
                if s1 and s2:
                    ext, sign = _merge_ext(s1, s2)
                    if ext is None:
                        continue
                elif s1:
                    ext, sign = s1, 1
                else:
                    ext, sign = s2, 1
                exps = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2 if sign > 0 else -c1 * c2
                key = (exps, ext)
                v = (out.get(key, 0) + c) % p
                if v:
                    out[key] = v
                elif key in out:
                    del out[key]
        return Element(self.sig, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not defined")
        p = self.sig.p
        if n == 0:
            return self.sig.one()
        # Frobenius shortcut for purely polynomial elements
        if n % p == 0 and self.is_polynomial():
            return self._frobenius() ** (n // p)
        base = self
        result = None
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def _frobenius(self) -> "Element":
        p = self.sig.p
        out = {}
        for (e, s), c in self.terms.items():
            assert not s
            out[(tuple(a * p for a in e), ())] = c  # c^p = c in F_p
        return Element(self.sig, out)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.terms == self.sig.const(other).terms
        return isinstance(other, Element) and self.sig == other.sig and self.terms == other.terms

    def __hash__(self):
        return hash((self.sig, frozenset(self.terms.items())))

    # -- normalization ---------------------------------------------------

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero element has no leading monomial")
        deg = max(self.sig.monomial_degree(m) for m in self.terms)
        cands = [m for m in self.terms if self.sig.monomial_degree(m) == deg]
        return max(cands, key=monomial_sort_key)

    def leading_coefficient(self) -> int:
        return self.terms[self.leading_monomial()]

    def monic(self) -> "Element":
        if not self.terms:
            return self
        inv = self.sig.field.inv(self.leading_coefficient())
        return self * inv

    def sorted_terms(self):
        return sorted(
            self.terms.items(),
            key=lambda it: (self.sig.monomial_degree(it[0]),) + monomial_sort_key(it[0]),
            reverse=True,
        )

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"<Element {self}>"


# -- differential --------------------------------------------------------


def differential(a: Element) -> Element:
    """The derivation d with d(x_i) = dx_i, d(dx_i) = 0 (degree -1)."""
    sig = a.sig
    if sig.n_poly != sig.n_ext:
        raise SignatureError("differential requires paired poly/exterior variables")
    if not a.is_homogeneous():
        raise ValueError("differential requires a homogeneous element")
    p = sig.p
    out = {}
    for (exps, ext), c in a.terms.items():
        for i, e in enumerate(exps):
            if e == 0 or i in ext:
                continue
            # insert dx_i into ext: sign (-1)^{#indices in ext below i}
            pos = sum(1 for j in ext if j < i)
            sign = -1 if pos % 2 else 1
            new_ext = tuple(sorted(ext + (i,)))
            new_exps = exps[:i] + (e - 1,) + exps[i + 1 :]
            v = (out.get((new_exps, new_ext), 0) + sign * c * e) % p
            key = (new_exps, new_ext)
            if v:
                out[key] = v
            elif key in out:
                del out[key]
    return Element(sig, out)


# -- polynomial dictionaries (internal carriers for gcd/division) ---------


def _pkey(exps: tuple, weights: tuple):
    return (sum(e * w for e, w in zip(exps, weights)), exps)


def _plead(f: dict, weights: tuple):
    return max(f, key=lambda e: _pkey(e, weights))


def _pmul(f: dict, g: dict, p: int) -> dict:
    out = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = (out.get(e, 0) + c1 * c2) % p
            if v:
                out[e] = v
            elif e in out:
                del out[e]
    return out


def _pscale(f: dict, c: int, p: int) -> dict:
    c %= p
    if c == 0:
        return {}
    return {e: v * c % p for e, v in f.items()}


def _psub(f: dict, g: dict, p: int) -> dict:
    out = dict(f)
    for e, c in g.items():
        v = (out.get(e, 0) - c) % p
        if v:
            out[e] = v
        elif e in out:
            del out[e]
    return out


def _pmonic(f: dict, weights: tuple, p: int) -> dict:
    if not f:
        return f
    c = f[_plead(f, weights)]
    if c == 1:
        return f
    return _pscale(f, pow(c, p - 2, p), p)


def _pdiv_exact(f: dict, q: dict, weights: tuple, p: int) -> dict:
    """Quotient f/q when exact; raises ExactDivisionError otherwise."""
    if not q:
        raise ZeroDivisionError("division by the zero polynomial")
    f = dict(f)
    out = {}
    qlead = _plead(q, weights)
    qinv = pow(q[qlead], p - 2, p)
    while f:
        lead = _plead(f, weights)
        diff = tuple(a - b for a, b in zip(lead, qlead))
        if any(d < 0 for d in diff):
            raise ExactDivisionError(f"not divisible: leading term x^{lead} vs x^{qlead}")
        c = f[lead] * qinv % p
        out[diff] = c
        for m, cm in q.items():
            t = tuple(a + b for a, b in zip(diff, m))
            v = (f.get(t, 0) - c * cm) % p
            if v:
                f[t] = v
            elif t in f:
                del f[t]
    return out


def _pmono_gcd(f: dict) -> tuple:
    """Componentwise minimum of the support (the monomial content)."""
    it = iter(f)
    m = list(next(it))
    for e in it:
        for i, v in enumerate(e):
            if v < m[i]:
                m[i] = v
    return tuple(m)


def _pshift_down(f: dict, m: tuple) -> dict:
    if not any(m):
        return f
    return {tuple(a - b for a, b in zip(e, m)): c for e, c in f.items()}


def _vars_in(f: dict):
    out = set()
    for e in f:
        for i, v in enumerate(e):
            if v:
                out.add(i)
    return out


def _to_univ(f: dict, k: int) -> dict:
    out = {}
    for e, c in f.items():
        d = e[k]
        e0 = e[:k] + (0,) + e[k + 1 :]
        out.setdefault(d, {})[e0] = c
    return out


def _from_univ(u: dict, k: int) -> dict:
    out = {}
    for d, coef in u.items():
        for e0, c in coef.items():
            out[e0[:k] + (d,) + e0[k + 1 :]] = c
    return out


def _pgcd(f: dict, g: dict, weights: tuple, p: int) -> dict:
    if not f:
        return _pmonic(g, weights, p)
    if not g:
        return _pmonic(f, weights, p)
    mf, mg = _pmono_gcd(f), _pmono_gcd(g)
    common = tuple(min(a, b) for a, b in zip(mf, mg))
    f = _pshift_down(f, mf)
    g = _pshift_down(g, mg)
    one = {tuple(0 for _ in weights): 1}
    core = _pgcd_primitive(f, g, weights, p)
    result = _pmul({common: 1}, core, p) if any(common) else core
    return _pmonic(result if result else one, weights, p)


def _pgcd_primitive(f: dict, g: dict, weights: tuple, p: int) -> dict:
    one = {tuple(0 for _ in weights): 1}
    vf, vg = _vars_in(f), _vars_in(g)
    if not vf or not vg:
        return one
    both = vf & vg
    if not both:
        return one
    # main variable: smallest combined degree keeps pseudo-division short
    k = min(both, key=lambda i: max(e[i] for e in f) + max(e[i] for e in g))
    uf, ug = _to_univ(f, k), _to_univ(g, k)

    def content(u):
        coeffs = sorted(u.values(), key=len)
        c = coeffs[0]
        for other in coeffs[1:]:
            c = _pgcd(c, other, weights, p)
            if c == one:
                break
        return c

    def primitive(u, cont):
        if cont == one:
            return u
        return {d: _pdiv_exact(coef, cont, weights, p) for d, coef in u.items()}

    cf, cg = content(uf), content(ug)
    cont = _pgcd(cf, cg, weights, p)
    a, b = primitive(uf, cf), primitive(ug, cg)
    while b:
        a, b = b, _prem(a, b, weights, p)
        if b:
            b = primitive(b, content(b))
    res = _from_univ(a, k)
    if cont != one:
        res = _pmul(res, cont, p)
    return res


def _prem(a: dict, b: dict, weights: tuple, p: int) -> dict:
    """Pseudo-remainder of univariate polys with multivariate coefficients."""
    da, db = max(a), max(b)
    lb = b[db]
    while a and max(a) >= db:
        da = max(a)
        la = a[da]
        # a <- lb*a - la*x^(da-db)*b
        new = {}
        for d, coef in a.items():
            new[d] = _pmul(coef, lb, p)
        for d, coef in b.items():
            t = d + da - db
            v = _psub(new.get(t, {}), _pmul(coef, la, p), p)
            if v:
                new[t] = v
            elif t in new:
                del new[t]
        a = {d: c for d, c in new.items() if c}
    return a


# -- public polynomial operations on Elements ------------------------------


def _as_pdict(a: Element) -> dict:
    if not a.is_polynomial():
        raise ValueError("operation requires a purely polynomial element")
    return {exps: c for (exps, _), c in a.terms.items()}


def _from_pdict(sig: Signature, f: dict) -> Element:
    return Element(sig, {(e, ()): c for e, c in f.items()})


def poly_gcd(f: Element, g: Element) -> Element:
    """Monic gcd of purely polynomial elements; gcd(f, 0) = monic f."""
    if f.sig != g.sig:
        raise SignatureError("elements live in different algebras")
    sig = f.sig
    res = _pgcd(_as_pdict(f), _as_pdict(g), sig.poly_degrees, sig.p)
    return _from_pdict(sig, res)


def content(a: Element) -> Element:
    """Monic gcd of the polynomial coefficients over the exterior basis."""
    if not a:
        raise ValueError("content of the zero element is undefined")
    sig = a.sig
    groups: dict[tuple, dict] = {}
    for (exps, ext), c in a.terms.items():
        groups.setdefault(ext, {})[exps] = c
    coeffs = sorted(groups.values(), key=len)
    acc = _pmonic(coeffs[0], sig.poly_degrees, sig.p)
    one = {(0,) * sig.n_poly: 1}
    for f in coeffs[1:]:
        if acc == one:
            break
        acc = _pgcd(acc, f, sig.poly_degrees, sig.p)
    return _from_pdict(sig, acc)


def exact_div(a: Element, q: Element) -> Element:
    """The element b with q*b = a, for a polynomial divisor q."""
    if a.sig != q.sig:
        raise SignatureError("elements live in different algebras")
    if not q:
        raise ZeroDivisionError("division by zero")
    sig = a.sig
    qd = _as_pdict(q)
    groups: dict[tuple, dict] = {}
    for (exps, ext), c in a.terms.items():
        groups.setdefault(ext, {})[exps] = c
    out = {}
    for ext, f in groups.items():
        quo = _pdiv_exact(f, qd, sig.poly_degrees, sig.p)
        for e, c in quo.items():
            out[(e, ext)] = c
    return Element(sig, out)


def substitute(a: Element, images: dict) -> Element:
    """Apply the algebra homomorphism determined by generator images.

    All images must be homogeneous elements of one common signature with
    degrees matching the variables they replace.
    """
    sig = a.sig
    names = sig.poly_names + sig.ext_names
    degrees = sig.poly_degrees + sig.ext_degrees
    target = None
    for name, deg in zip(names, degrees):
        if name not in images:
            raise SignatureError(f"missing image for variable {name!r}")
        img = images[name]
        if target is None:
            target = img.sig
        elif img.sig != target:
            raise SignatureError("images live in different algebras")
        if img and img.degree() != deg:
            raise SignatureError(
                f"image of {name!r} has degree {img.degree()}, expected {deg}"
            )
    if not a:
        return target.zero() if target else a
    pow_cache: dict[tuple, Element] = {}

    def power(name: str, k: int) -> Element:
        key = (name, k)
        v = pow_cache.get(key)
        if v is None:
            v = images[name] ** k
            pow_cache[key] = v
        return v

    result = target.zero()
    for (exps, ext), c in a.terms.items():
        term = target.const(c)
        for i, e in enumerate(exps):
            if e:
                term = term * power(sig.poly_names[i], e)
                if not term:
                    break
        if term:
            for i in ext:
                term = term * images[sig.ext_names[i]]
                if not term:
                    break
        result = result + term
    return result


# -- monomial enumeration ---------------------------------------------------


def _weighted_exps(total: int, weights: tuple):
    """All exponent tuples e with sum(e_i * w_i) == total."""
    if not weights:
        return [()] if total == 0 else []
    out = []

    def rec(i, rem, prefix):
        if i == len(weights) - 1:
            if rem % weights[i] == 0:
                out.append(prefix + (rem // weights[i],))
            return
        w = weights[i]
        for e in range(rem // w + 1):
            rec(i + 1, rem - e * w, prefix + (e,))

    rec(0, total, ())
    return out


@lru_cache(maxsize=None)
def degree_basis(sig: Signature, d: int) -> tuple:
    """All monomials of total degree d, in the pinned deterministic order."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    out = []
    for k in range(sig.n_ext + 1):
        for ext in combinations(range(sig.n_ext), k):
            rem = d - sum(sig.ext_degrees[i] for i in ext)
            if rem < 0:
                continue
            for exps in _weighted_exps(rem, sig.poly_degrees):
                out.append((exps, ext))
    out.sort(key=monomial_sort_key, reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def basis_index(sig: Signature, d: int) -> dict:
    return {m: i for i, m in enumerate(degree_basis(sig, d))}


def to_coords(a: Element, d: int):
    """Coordinate vector of a degree-d homogeneous element."""
    import numpy as np

    idx = basis_index(a.sig, d)
    v = np.zeros(len(idx), dtype=np.int64)
    for m, c in a.terms.items():
        if a.sig.monomial_degree(m) != d:
            raise ValueError("element has a term outside the requested degree")
        v[idx[m]] = c
    return v


def from_coords(sig: Signature, d: int, vec) -> Element:
    basis = degree_basis(sig, d)
    p = sig.p
    terms = {}
    for i, c in enumerate(vec):
        c = int(c) % p
        if c:
            terms[basis[i]] = c
    return Element(sig, terms)


# -- text grammar ------------------------------------------------------------


def format_element(a: Element) -> str:
    """Canonical text form: `2*u1^3*v2v3 + u2*v1v3`; coefficients in 1..p-1."""
    if not a.terms:
        return "0"
    sig = a.sig
    parts = []
    for (exps, ext), c in a.sorted_terms():
        factors = []
        for i, e in enumerate(exps):
            if e == 1:
                factors.append(sig.poly_names[i])
            elif e:
                factors.append(f"{sig.poly_names[i]}^{e}")
        if ext:
            factors.append("".join(sig.ext_names[i] for i in ext))
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append(f"{c}*" + "*".join(factors))
    return " + ".join(parts)


def _split_ext_word(sig: Signature, word: str):
    """Greedy longest-match split of a juxtaposed exterior word."""
    names = sorted(sig.ext_names, key=len, reverse=True)
    out = []
    pos = 0
    while pos < len(word):
        for name in names:
            if word.startswith(name, pos):
                out.append(sig.ext_names.index(name))
                pos += len(name)
                break
        else:
            return None
    return out


def parse_element(sig: Signature, text: str) -> Element:
    text = text.replace(" ", "")
    if not text:
        raise ParseError("empty element string")
    if text == "0":
        return sig.zero()
    # split into signed terms
    terms = []
    start = 0
    sign = 1
    if text[0] in "+-":
        sign = -1 if text[0] == "-" else 1
        start = 1
    cur = start
    cur_sign = sign
    pieces = []
    while cur <= len(text):
        if cur == len(text) or text[cur] in "+-":
            pieces.append((cur_sign, text[start:cur]))
            if cur < len(text):
                cur_sign = -1 if text[cur] == "-" else 1
                start = cur + 1
        cur += 1
    result = sig.zero()
    for sg, term in pieces:
        if not term:
            raise ParseError(f"empty term in {text!r}")
        coeff = sg
        elem = None
        for factor in term.split("*"):
            if not factor:
                raise ParseError(f"empty factor in term {term!r}")
            if factor.isdigit():
                coeff *= int(factor)
                continue
            if "^" in factor:
                base, _, exp = factor.partition("^")
                if not exp.isdigit():
                    raise ParseError(f"bad exponent in {factor!r}")
                if base not in sig.poly_names:
                    raise ParseError(f"exponent on non-polynomial factor {factor!r}")
                f = sig.var(base) ** int(exp)
            elif factor in sig.poly_names:
                f = sig.var(factor)
            else:
                idxs = _split_ext_word(sig, factor)
                if idxs is None:
                    raise ParseError(f"unknown factor {factor!r}")
                f = sig.one()
                for i in idxs:
                    f = f * Element(sig, {((0,) * sig.n_poly, (i,)): 1})
            elem = f if elem is None else elem * f
        if elem is None:
            elem = sig.one()
        result = result + elem * coeff
    return result

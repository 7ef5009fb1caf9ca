"""Finitely presented graded-commutative F_p-algebras via confluent rewriting.

A presentation is compiled, degree by degree up to a bound, into a
rewrite system by Buchberger-style completion in the free graded
-commutative algebra (even generators commute, odd ones anticommute and
square to zero).  Rewriting sends the largest monomial under graded
reverse-lex (over a declared generator order) to smaller ones, so every
element of degree <= d_max has a unique normal form.

Completion processes the classical S-pairs together with the odd
obstructions theta * tail for each odd generator theta dividing a rule's
leading monomial; both are required for confluence in the presence of
exterior squares.
"""

from __future__ import annotations

import heapq
import os

import numpy as np

from .gca import Element, Signature, _merge_ext, degree_basis

__all__ = [
    "PresentedAlgebra",
    "AlgebraHom",
    "HomomorphismError",
    "CompletionBudgetError",
    "load_presentation",
]

DEFAULT_PAIR_BUDGET = 200_000


class CompletionBudgetError(RuntimeError):
    pass


class HomomorphismError(ValueError):
    pass


def _pair_budget(explicit: int | None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("MODINV_DEGREE_CAP", "").strip()
    if env:
        return int(env)
    return DEFAULT_PAIR_BUDGET


class PresentedAlgebra:
    """Quotient of a free graded-commutative algebra by homogeneous relations."""

    def __init__(
        self,
        sig: Signature,
        relations,
        d_max: int = 60,
        gen_order=None,
        pair_budget: int | None = None,
    ):
        self.sig = sig
        self.d_max = d_max
        self.relations = [r if isinstance(r, Element) else sig.parse(r) for r in relations]
        for r in self.relations:
            if not r.is_homogeneous():
                raise ValueError(f"relation is not homogeneous: {r}")
        names = sig.poly_names + sig.ext_names
        if gen_order is None:
            gen_order = sorted(names, key=lambda n: (self._gen_degree(n), n))
        if set(gen_order) != set(names):
            raise ValueError("gen_order must list every generator exactly once")
        self.gen_order = tuple(gen_order)
        # slot i of the combined exponent vector <- generator gen_order[i]
        self._slots = []
        for name in self.gen_order:
            if name in sig.poly_names:
                self._slots.append(("p", sig.poly_names.index(name)))
            else:
                self._slots.append(("e", sig.ext_names.index(name)))
        self.rules: list = []  # (lead monomial, tail Element, combined lead exps)
        self._basis_cache: dict = {}
        self._complete(pair_budget)

    def _gen_degree(self, name: str) -> int:
        sig = self.sig
        if name in sig.poly_names:
            return sig.poly_degrees[sig.poly_names.index(name)]
        return sig.ext_degrees[sig.ext_names.index(name)]

    # -- monomial order ------------------------------------------------------

    def _combined(self, mono) -> tuple:
        exps, ext = mono
        extset = set(ext)
        out = []
        for kind, i in self._slots:
            out.append(exps[i] if kind == "p" else (1 if i in extset else 0))
        return tuple(out)

    def order_key(self, mono):
        """Graded reverse-lex key: within a degree, a monomial is larger when
        it uses less of the earliest declared generators (so relation leaders
        like x20^3 beat x48*x4^3 and x20^2*x8^2*x4)."""
        deg = self.sig.monomial_degree(mono)
        return (deg, tuple(-e for e in self._combined(mono)))

    def leading_monomial(self, elem: Element):
        return max(elem.terms, key=self.order_key)

    # -- rewriting -------------------------------------------------------------

    @staticmethod
    def _divides(lead, mono) -> bool:
        (le, ls), (me, ms) = lead, mono
        if any(a > b for a, b in zip(le, me)):
            return False
        return set(ls) <= set(ms)

    def _find_rule(self, mono):
        for rule in self.rules:
            if self._divides(rule[0], mono):
                return rule
        return None

    def normal_form(self, elem: Element) -> Element:
        """Unique normal form of an element of degree <= d_max."""
        if isinstance(elem, str):
            elem = self.sig.parse(elem)
        p = self.sig.p
        work: dict = dict(elem.terms)
        heap = [(_neg(self.order_key(m)), m) for m in work]
        heapq.heapify(heap)
        out: dict = {}
        while heap:
            _, mono = heapq.heappop(heap)
            c = work.pop(mono, 0)
            if not c:
                continue
            rule = self._find_rule(mono)
            if rule is None:
                out[mono] = c
                continue
            lead, tail, _ = rule
            le, ls = lead
            me, ms = mono
            q_exps = tuple(a - b for a, b in zip(me, le))
            q_ext = tuple(i for i in ms if i not in ls)
            _, sign = _merge_ext(q_ext, ls)
            if tail:
                repl = Element(self.sig, {(q_exps, q_ext): c * sign % p}) * tail
                for m2, c2 in repl.terms.items():
                    prev = work.get(m2, 0)
                    v = (prev + c2) % p
                    if v:
                        if not prev:
                            heapq.heappush(heap, (_neg(self.order_key(m2)), m2))
                        work[m2] = v
                    elif m2 in work:
                        del work[m2]
        return Element(self.sig, out)

    def mul_nf(self, a: Element, b: Element) -> Element:
        return self.normal_form(a * b)

    # -- completion --------------------------------------------------------------

    def _complete(self, pair_budget: int | None):
        budget = _pair_budget(pair_budget)
        pending = [r for r in self.relations if r]
        processed = 0
        while pending:
            cand = pending.pop(0)
            processed += 1
            if processed > budget:
                raise CompletionBudgetError(
                    f"completion exceeded the pair budget ({budget})"
                )
            deg = cand.degree()
            if deg is None or deg > self.d_max:
                continue
            h = self.normal_form(cand)
            if not h:
                continue
            lead = self.leading_monomial(h)
            inv = self.sig.field.inv(h.terms[lead])
            h = h * inv
            tail = Element(self.sig, {lead: 1}) - h
            # retire rules whose lead is now reducible; requeue their content
            keep = []
            for rule in self.rules:
                if self._divides(lead, rule[0]):
                    pending.append(Element(self.sig, {rule[0]: 1}) - rule[1])
                else:
                    keep.append(rule)
            self.rules = keep
            new_rule = (lead, tail, self._combined(lead))
            # S-pairs with every retained rule
            for rule in self.rules:
                sp = self._spoly(new_rule, rule)
                if sp is not None:
                    pending.append(sp)
            # odd obstructions: theta * tail for odd theta dividing the lead
            for i in lead[1]:
                theta = Element(self.sig, {((0,) * self.sig.n_poly, (i,)): 1})
                ob = theta * tail
                if ob:
                    pending.append(ob)
            self.rules.append(new_rule)
            self.rules.sort(key=lambda r: self.order_key(r[0]))
            self._basis_cache.clear()

    def _spoly(self, r1, r2):
        (l1, t1, _), (l2, t2, _) = r1, r2
        e1, s1 = l1
        e2, s2 = l2
        if not s1 and not s2 and all(min(a, b) == 0 for a, b in zip(e1, e2)):
            return None  # coprime even leads: S-polynomial reduces to zero
        lcm_e = tuple(max(a, b) for a, b in zip(e1, e2))
        lcm_s = tuple(sorted(set(s1) | set(s2)))
        lcm = (lcm_e, lcm_s)
        if self.sig.monomial_degree(lcm) > self.d_max:
            return None
        part1 = self._multiple_of(lcm, l1, t1)
        part2 = self._multiple_of(lcm, l2, t2)
        return part1 - part2

    def _multiple_of(self, lcm, lead, tail) -> Element:
        """sigma * q * tail so that the lcm-terms of the two parts cancel."""
        le, ls = lead
        q_exps = tuple(a - b for a, b in zip(lcm[0], le))
        q_ext = tuple(i for i in lcm[1] if i not in ls)
        _, sign = _merge_ext(q_ext, ls)
        return Element(self.sig, {(q_exps, q_ext): sign % self.sig.p}) * tail

    # -- graded structure ---------------------------------------------------------

    def basis(self, d: int) -> tuple:
        """Normal-form monomials of degree d."""
        if d > self.d_max:
            raise ValueError(f"degree {d} exceeds the compiled bound {self.d_max}")
        cached = self._basis_cache.get(d)
        if cached is None:
            cached = tuple(
                m for m in degree_basis(self.sig, d) if self._find_rule(m) is None
            )
            self._basis_cache[d] = cached
        return cached

    def graded_dimension(self, d: int) -> int:
        return len(self.basis(d))

    def to_coords(self, elem: Element, d: int) -> np.ndarray:
        elem = self.normal_form(elem)
        basis = self.basis(d)
        idx = {m: i for i, m in enumerate(basis)}
        v = np.zeros(len(basis), dtype=np.int64)
        for m, c in elem.terms.items():
            if self.sig.monomial_degree(m) != d:
                raise ValueError("element not homogeneous of the requested degree")
            v[idx[m]] = c
        return v

    def from_coords(self, d: int, vec) -> Element:
        basis = self.basis(d)
        terms = {}
        for i, c in enumerate(vec):
            c = int(c) % self.sig.p
            if c:
                terms[basis[i]] = c
        return Element(self.sig, terms)

    def gens(self) -> dict:
        return self.sig.gens()

    def parse(self, text: str) -> Element:
        return self.sig.parse(text)

    def ideal_basis(self, generators, d: int):
        """Coordinate matrix of the degree-d piece of the ideal (generators)."""
        rows = []
        for g in generators:
            g = self.normal_form(g if isinstance(g, Element) else self.parse(g))
            dg = g.degree()
            if dg is None or dg > d:
                continue
            for mono in degree_basis(self.sig, d - dg):
                prod = self.normal_form(Element(self.sig, {mono: 1}) * g)
                if prod:
                    rows.append(self.to_coords(prod, d))
        if not rows:
            return np.zeros((0, len(self.basis(d))), dtype=np.int64)
        return np.array(rows, dtype=np.int64)


def _neg(key):
    deg, rest = key
    return (-deg, tuple(-v for v in rest))


class AlgebraHom:
    """Generator-image homomorphism out of a presented algebra.

    The target is either a concrete K(V*)-signature (normalize=None) or
    another presented algebra (normalize=that.normal_form).  Construction
    verifies that every relation of the source maps to zero.
    """

    def __init__(self, source: PresentedAlgebra, images: dict, normalize=None, name=""):
        self.source = source
        self.name = name or "hom"
        self.normalize = normalize if normalize is not None else (lambda e: e)
        src_names = source.sig.poly_names + source.sig.ext_names
        missing = [n for n in src_names if n not in images]
        if missing:
            raise HomomorphismError(f"missing images for {missing}")
        self.images = dict(images)
        target_sig = None
        for n in src_names:
            img = self.images[n]
            if target_sig is None:
                target_sig = img.sig
            elif img.sig != target_sig:
                raise HomomorphismError("images live in different algebras")
            if img and img.degree() != source._gen_degree(n):
                raise HomomorphismError(
                    f"image of {n} has degree {img.degree()}, expected {source._gen_degree(n)}"
                )
        self.target_sig = target_sig
        self._pow_cache: dict = {}
        for k, r in enumerate(self.source.relations):
            value = self.evaluate(r)
            if value:
                raise HomomorphismError(
                    f"{self.name}: relation {k} ({r}) maps to nonzero {value}"
                )

    def _power(self, name: str, e: int) -> Element:
        key = (name, e)
        v = self._pow_cache.get(key)
        if v is None:
            if e == 1:
                v = self.images[name]
            else:
                v = self.normalize(self._power(name, e - 1) * self.images[name])
            self._pow_cache[key] = v
        return v

    def evaluate(self, elem: Element) -> Element:
        if isinstance(elem, str):
            elem = self.source.sig.parse(elem)
        sig = self.source.sig
        out = self.target_sig.zero()
        for (exps, ext), c in elem.terms.items():
            term = self.target_sig.const(c)
            for i, e in enumerate(exps):
                if e and term:
                    term = self.normalize(term * self._power(sig.poly_names[i], e))
            for i in ext:
                if term:
                    term = self.normalize(term * self.images[sig.ext_names[i]])
            out = out + term
        return self.normalize(out)

    __call__ = evaluate


def load_presentation(data, p: int = 3, d_max: int = 60, **kwargs) -> PresentedAlgebra:
    """Build from {"generators": [{"name", "degree"}], "relations": [strings]}."""
    gens = data["generators"]
    poly = [(g["name"], g["degree"]) for g in gens if g["degree"] % 2 == 0]
    ext = [(g["name"], g["degree"]) for g in gens if g["degree"] % 2 == 1]
    sig = Signature(
        p,
        tuple(n for n, _ in poly),
        tuple(d for _, d in poly),
        tuple(n for n, _ in ext),
        tuple(d for _, d in ext),
    )
    order = [g["name"] for g in gens]
    return PresentedAlgebra(sig, data.get("relations", []), d_max=d_max, gen_order=order, **kwargs)
